#include "qdisc/rational.hpp"

#include <cmath>
#include <limits>

#include "qdisc/errors.hpp"

namespace qdisc {

Rational make_rational(long long num, long long den) {
  if (den == 0) throw InvalidParameter("rational with zero denominator");
  Rational r(BigInt(static_cast<long>(num)), BigInt(static_cast<long>(den)));
  r.canonicalize();
  return r;
}

Rational make_rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw InvalidParameter("rational with zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

namespace {

BigInt parse_integer(std::string_view text, std::string_view whole) {
  std::string_view digits = text;
  if (!digits.empty() && (digits.front() == '-' || digits.front() == '+')) digits.remove_prefix(1);
  if (digits.empty()) throw InvalidParameter("malformed rational '" + std::string(whole) + "'");
  for (char ch : digits) {
    if (ch < '0' || ch > '9') throw InvalidParameter("malformed rational '" + std::string(whole) + "'");
  }
  std::string s(text);
  if (!s.empty() && s.front() == '+') s.erase(0, 1);
  return BigInt(s, 10);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_integer(text, text));
  BigInt num = parse_integer(text.substr(0, slash), text);
  BigInt den = parse_integer(text.substr(slash + 1), text);
  if (den == 0) throw InvalidParameter("rational with zero denominator '" + std::string(text) + "'");
  return make_rational(num, den);
}

std::string to_string(const Rational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

std::string to_string(const BigInt& z) { return z.get_str(); }

BigInt floor_of(const Rational& r) {
  BigInt q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

BigInt ceil_of(const Rational& r) {
  BigInt q;
  mpz_cdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

BigInt floor_mul(long long k, const Rational& alpha) {
  BigInt prod = alpha.get_num() * BigInt(static_cast<long>(k));
  BigInt q;
  mpz_fdiv_q(q.get_mpz_t(), prod.get_mpz_t(), alpha.get_den_mpz_t());
  return q;
}

Rational from_double(double x) {
  if (!std::isfinite(x)) throw InvalidParameter("non-finite value");
  Rational r(x);
  r.canonicalize();
  return r;
}

std::optional<std::int64_t> to_int64(const BigInt& z) {
  if (!z.fits_slong_p()) return std::nullopt;
  static_assert(sizeof(long) == sizeof(std::int64_t));
  return static_cast<std::int64_t>(z.get_si());
}

std::optional<SmallFraction> to_small(const Rational& r) {
  auto num = to_int64(r.get_num());
  auto den = to_int64(r.get_den());
  if (!num || !den) return std::nullopt;
  return SmallFraction{*num, *den};
}

}  // namespace qdisc
