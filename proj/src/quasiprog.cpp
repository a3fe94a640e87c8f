#include "qdisc/quasiprog.hpp"

#include <cmath>
#include <cstdlib>

#include "qdisc/errors.hpp"

namespace qdisc {

void validate(const QPDescriptor& q) {
  if (q.alpha < 1) throw InvalidParameter("quasi-progression needs alpha >= 1, got " + to_string(q.alpha));
  if (q.s < 0 || q.t < q.s) throw InvalidParameter("quasi-progression needs 0 <= s <= t");
}

Mode parse_mode(const std::string& text) {
  if (text == "window") return Mode::window;
  if (text == "prefix") return Mode::prefix;
  throw InvalidParameter("mode must be 'window' or 'prefix', got '" + text + "'");
}

std::string to_string(Mode mode) { return mode == Mode::window ? "window" : "prefix"; }

namespace {

// Evaluates floor(k*alpha) for k = first..last, using 128-bit arithmetic when
// the fraction fits in 64 bits.
template <typename Fn>
void for_each_term(const Rational& alpha, std::int64_t first, std::int64_t last, Fn&& fn) {
  if (auto small = to_small(alpha)) {
    for (std::int64_t k = first; k <= last; ++k) {
      __int128 prod = static_cast<__int128>(small->num) * k;
      __int128 q = prod / small->den;
      if (q > INT64_MAX) throw RangeError("quasi-progression term exceeds 64 bits");
      fn(k, static_cast<std::int64_t>(q));
    }
    return;
  }
  for (std::int64_t k = first; k <= last; ++k) {
    auto value = to_int64(floor_mul(k, alpha));
    if (!value) throw RangeError("quasi-progression term exceeds 64 bits");
    fn(k, *value);
  }
}

}  // namespace

std::vector<std::int64_t> materialize(const QPDescriptor& q) {
  validate(q);
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(q.t - q.s + 1));
  for_each_term(q.alpha, q.s, q.t, [&](std::int64_t, std::int64_t v) { out.push_back(v); });
  return out;
}

std::int64_t signed_sum(const Coloring& c, const QPDescriptor& q) {
  validate(q);
  auto last = to_int64(floor_mul(q.t, q.alpha));
  if (!last || *last > c.n()) {
    throw RangeError("quasi-progression leaves the coloring domain [0," + std::to_string(c.n()) + "]");
  }
  std::int64_t sum = 0;
  for_each_term(q.alpha, q.s, q.t, [&](std::int64_t, std::int64_t v) { sum += c[v]; });
  return sum;
}

std::int64_t term_count(const Rational& alpha, std::int64_t n) {
  if (n < 0) return 0;
  // floor(k*alpha) <= n  <=>  k < (n+1)/alpha.
  Rational bound = Rational(BigInt(static_cast<long>(n)) + 1) / alpha;
  BigInt k = ceil_of(bound) - 1;
  auto out = to_int64(k);
  if (!out) throw RangeError("term count exceeds 64 bits");
  return *out;
}

DiscrepancyWitness witness_from_prefix_sums(std::span<const std::int64_t> sums, Mode mode) {
  const auto count = static_cast<std::int64_t>(sums.size()) - 1;
  if (count <= 0) return {};
  if (mode == Mode::window) {
    std::int64_t first_max = 0;
    std::int64_t first_min = 0;
    for (std::int64_t k = 1; k <= count; ++k) {
      if (sums[k] > sums[first_max]) first_max = k;
      if (sums[k] < sums[first_min]) first_min = k;
    }
    std::int64_t value = sums[first_max] - sums[first_min];
    if (value == 0) return {0, 1, 1, 0};
    std::int64_t u = std::min(first_max, first_min);
    std::int64_t v = std::max(first_max, first_min);
    return {value, u + 1, v, sums[v] - sums[u]};
  }
  std::int64_t best = 1;
  for (std::int64_t k = 2; k <= count; ++k) {
    if (std::llabs(sums[k]) > std::llabs(sums[best])) best = k;
  }
  return {std::llabs(sums[best]), 1, best, sums[best]};
}

DiscrepancyWitness max_discrepancy(const Coloring& c, const Rational& alpha, std::int64_t n, Mode mode) {
  if (alpha < 1) throw InvalidParameter("max_discrepancy needs alpha >= 1, got " + to_string(alpha));
  if (n > c.n()) throw RangeError("n exceeds the coloring domain");
  const std::int64_t count = term_count(alpha, n);
  std::vector<std::int64_t> sums(static_cast<std::size_t>(std::max<std::int64_t>(count, 0)) + 1, 0);
  for_each_term(alpha, 1, count, [&](std::int64_t k, std::int64_t v) { sums[k] = sums[k - 1] + c[v]; });
  return witness_from_prefix_sums(sums, mode);
}

std::int64_t point_discrepancy(const Coloring& c, const Rational& x, const Rational& y) {
  if (x <= 0) throw InvalidParameter("point_discrepancy needs x > 0");
  if (y < 0) throw InvalidParameter("point_discrepancy needs y >= 0");
  auto columns = to_int64(floor_of(x));
  if (!columns) throw RangeError("x exceeds 64 bits");
  if (*columns == 0) return 0;
  Rational slope = y / x;
  auto top = to_int64(floor_mul(*columns, slope));
  if (!top || *top > c.n()) throw RangeError("segment leaves the coloring domain");
  std::int64_t sum = 0;
  for_each_term(slope, 1, *columns, [&](std::int64_t, std::int64_t v) { sum += c[v]; });
  return sum;
}

std::int64_t point_discrepancy(const Coloring& c, double x, double y) {
  if (!(x > 0)) throw InvalidParameter("point_discrepancy needs x > 0");
  if (!(y >= 0)) throw InvalidParameter("point_discrepancy needs y >= 0");
  const auto columns = static_cast<std::int64_t>(std::floor(x));
  const double slope = y / x;
  std::int64_t sum = 0;
  for (std::int64_t a = 1; a <= columns; ++a) {
    auto h = static_cast<std::int64_t>(std::floor(static_cast<double>(a) * slope));
    sum += c.at(h);
  }
  return sum;
}

}  // namespace qdisc
