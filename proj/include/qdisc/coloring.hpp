#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qdisc/rational.hpp"

namespace qdisc {

enum class ColoringKind { base3, base3_star, legendre, random, constant, alternating, file };

// Provenance of a coloring together with the parameter its kind needs.
struct ColoringSource {
  ColoringKind kind = ColoringKind::constant;
  std::int64_t p = 0;          // legendre
  std::uint64_t seed = 0;      // random
  int constant_value = 1;      // constant

  static ColoringSource base3() { return {ColoringKind::base3}; }
  static ColoringSource base3_star() { return {ColoringKind::base3_star}; }
  static ColoringSource legendre(std::int64_t p) { return {ColoringKind::legendre, p}; }
  static ColoringSource random(std::uint64_t seed) { return {ColoringKind::random, 0, seed}; }
  static ColoringSource constant(int c) { return {ColoringKind::constant, 0, 0, c}; }
  static ColoringSource alternating() { return {ColoringKind::alternating}; }
  static ColoringSource file() { return {ColoringKind::file}; }

  std::string describe() const;
};

// A map {0..n} -> {-1, 0, +1}. Immutable once built.
class Coloring {
 public:
  Coloring(std::vector<std::int8_t> values, ColoringSource source);

  std::int64_t n() const { return static_cast<std::int64_t>(values_.size()) - 1; }
  const ColoringSource& source() const { return source_; }
  std::span<const std::int8_t> values() const { return values_; }

  int operator[](std::int64_t k) const { return values_[static_cast<std::size_t>(k)]; }
  // Bounds-checked; throws RangeError.
  int at(std::int64_t k) const;

  friend bool operator==(const Coloring& a, const Coloring& b) { return a.values_ == b.values_; }

 private:
  std::vector<std::int8_t> values_;
  ColoringSource source_;
};

bool is_odd_prime(std::int64_t p);

// Legendre symbol (k / p) via Euler's criterion.
int legendre_symbol(std::int64_t k, std::int64_t p);

Coloring generate(const ColoringSource& source, std::int64_t n);

// Zeroes each entry independently with probability 1 - rho (seeded).
Coloring apply_density_mask(const Coloring& c, double rho, std::uint64_t seed);

struct ColoringStats {
  Rational density;
  std::int64_t switch_count = 0;
};

ColoringStats stats(const Coloring& c);

// All b in [lo, hi] with c(b) != c(b-1), ascending.
std::vector<std::int64_t> switch_values(const Coloring& c, std::int64_t lo, std::int64_t hi);

// File format: "n=<N>" then one line of N+1 symbols from {+,-,0}.
void save(const Coloring& c, std::ostream& out);
Coloring load(std::istream& in);
void save_file(const Coloring& c, const std::filesystem::path& path);
Coloring load_file(const std::filesystem::path& path);

}  // namespace qdisc
