#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qdisc/coloring.hpp"
#include "qdisc/quasiprog.hpp"
#include "qdisc/rational.hpp"

namespace qdisc {

// Half-open [lo, hi) on which every floor(k*alpha) relevant to {0..n} is constant.
struct AlphaInterval {
  Rational lo;
  Rational hi;
  Rational rep;  // (lo + hi) / 2

  friend bool operator==(const AlphaInterval&, const AlphaInterval&) = default;
};

AlphaInterval make_interval(const Rational& lo, const Rational& hi);

struct AtlasRow {
  AlphaInterval interval;
  DiscrepancyWitness witness;

  friend bool operator==(const AtlasRow&, const AtlasRow&) = default;
};

struct AtlasResult {
  DiscrepancyWitness global;
  AlphaInterval arg_interval;
  std::vector<AtlasRow> table;
};

struct SweepOptions {
  unsigned threads = 1;
  bool keep_table = true;
};

// Reduced b/k in (lo, hi] with 1 <= k <= K(lo, n) and k*lo < b <= k*hi, ascending.
std::vector<Rational> breakpoints(std::int64_t n, const Rational& lo, const Rational& hi);

// The subset of breakpoints in (lo, hi) at which some term floor(k*alpha) <= n+1
// changes, i.e. where the restriction of the quasi-progressions to {0..n} changes.
std::vector<Rational> effective_breakpoints(std::int64_t n, const Rational& lo, const Rational& hi);

// Exact maximum of max_discrepancy(c, alpha, n, mode) over alpha in [lo, hi).
// Incremental engine: each breakpoint crossing is an O(log K) tree update.
AtlasResult sweep(const Coloring& c, std::int64_t n, const Rational& lo, const Rational& hi, Mode mode,
                  const SweepOptions& options = {});

// Reference route: recomputes max_discrepancy at every interval representative.
AtlasResult sweep_naive(const Coloring& c, std::int64_t n, const Rational& lo, const Rational& hi, Mode mode);

// Maximal disjoint intervals of alpha in [lo, hi) whose prefix discrepancy is <= M.
std::vector<AlphaInterval> balanced_intervals(const Coloring& c, std::int64_t n, std::int64_t M, const Rational& lo,
                                              const Rational& hi, unsigned threads = 1);

// Exact Lebesgue measure of the M-balanced alpha in [lo, hi).
Rational balanced_measure(const Coloring& c, std::int64_t n, std::int64_t M, const Rational& lo, const Rational& hi,
                          unsigned threads = 1);

// Measure of the part of `intervals` (sorted, disjoint) that lies in [lo, hi).
Rational measure_within(const std::vector<AlphaInterval>& intervals, const Rational& lo, const Rational& hi);

std::string sweep_table_csv(const AtlasResult& result);

struct GrowthConfig {
  ColoringSource family;
  std::vector<std::int64_t> ns;
  Rational slope_base = 1;  // window [t0, t0 + 1)
  double threshold_scale = 1.0;  // M(n) = floor(scale * (ln n)^(1/4))
  unsigned threads = 1;
};

struct GrowthRow {
  std::int64_t n = 0;
  std::int64_t threshold = 0;
  Rational balanced_fraction;
  std::int64_t global_max = 0;
  double reference = 0.0;  // (ln n)^(1/4)
};

std::vector<GrowthRow> growth_experiment(const GrowthConfig& config);
std::string growth_csv(const std::vector<GrowthRow>& rows);

}  // namespace qdisc
