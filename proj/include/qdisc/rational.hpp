#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace qdisc {

// Exact rationals. Every value produced by this library is canonical
// (gcd(num, den) == 1, den > 0).
using Rational = mpq_class;
using BigInt = mpz_class;

Rational make_rational(long long num, long long den = 1);
Rational make_rational(const BigInt& num, const BigInt& den);

// Parses "p/q" or "p". Throws InvalidParameter on malformed input or q == 0.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& r);
std::string to_string(const BigInt& z);

BigInt floor_of(const Rational& r);
BigInt ceil_of(const Rational& r);

// floor(k * alpha) exactly.
BigInt floor_mul(long long k, const Rational& alpha);

// Exact conversion of a finite double (every double is a dyadic rational).
Rational from_double(double x);

std::optional<std::int64_t> to_int64(const BigInt& z);

// Numerator/denominator pair that fits in 64 bits, for hot loops.
struct SmallFraction {
  std::int64_t num = 0;
  std::int64_t den = 1;
};

std::optional<SmallFraction> to_small(const Rational& r);

}  // namespace qdisc
