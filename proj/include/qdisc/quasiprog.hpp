#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qdisc/coloring.hpp"
#include "qdisc/rational.hpp"

namespace qdisc {

// Q(alpha; s, t) = floor(s*alpha), floor((s+1)*alpha), ..., floor(t*alpha).
struct QPDescriptor {
  Rational alpha;
  std::int64_t s = 0;
  std::int64_t t = 0;
};

// Throws InvalidParameter unless alpha >= 1 and 0 <= s <= t.
void validate(const QPDescriptor& q);

// A maximizing run (s, t) with value == |signed_sum|. When no index k >= 1 has
// floor(k*alpha) <= n the witness is the empty run s = 1, t = 0, value 0.
struct DiscrepancyWitness {
  std::int64_t value = 0;
  std::int64_t s = 1;
  std::int64_t t = 0;
  std::int64_t signed_sum = 0;

  friend bool operator==(const DiscrepancyWitness&, const DiscrepancyWitness&) = default;
};

// window: max over all runs s..t; prefix: runs starting at s = 1 only.
enum class Mode { window, prefix };

Mode parse_mode(const std::string& text);
std::string to_string(Mode mode);

std::vector<std::int64_t> materialize(const QPDescriptor& q);

std::int64_t signed_sum(const Coloring& c, const QPDescriptor& q);

// Largest K with floor(K*alpha) <= n (0 if none); alpha >= 1.
std::int64_t term_count(const Rational& alpha, std::int64_t n);

// Witness for prefix sums S_0 = 0, S_1..S_K under the tie-break rules
// (smallest t, then smallest s).
DiscrepancyWitness witness_from_prefix_sums(std::span<const std::int64_t> sums, Mode mode);

DiscrepancyWitness max_discrepancy(const Coloring& c, const Rational& alpha, std::int64_t n, Mode mode);

// Sum of colors of the unit segments crossed by the segment (0,0)-(x,y):
// sum_{a=1}^{floor x} c(floor(a*y/x)).
std::int64_t point_discrepancy(const Coloring& c, const Rational& x, const Rational& y);

// Floating-point version for Monte-Carlo sampling.
std::int64_t point_discrepancy(const Coloring& c, double x, double y);

}  // namespace qdisc
