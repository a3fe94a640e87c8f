#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qdisc/rational.hpp"

namespace qdisc {

// Strictly increasing positive integers b_1 < ... < b_q.
class PointSet {
 public:
  explicit PointSet(std::vector<std::int64_t> bs);

  // {1, 2, ..., q}
  static PointSet range(std::int64_t q);

  const std::vector<std::int64_t>& values() const { return bs_; }
  std::int64_t size() const { return static_cast<std::int64_t>(bs_.size()); }

 private:
  std::vector<std::int64_t> bs_;
};

// [offset, offset + length) taken mod 1; wraps when offset + length > 1.
struct TargetInterval {
  Rational offset;
  Rational length;

  void validate() const;
};

// Fractional parts {b_j * alpha}, in input order.
std::vector<Rational> fractional_parts(const PointSet& ps, const Rational& alpha);

bool contains(const TargetInterval& J, const Rational& x);
bool contains(double offset, double length, double x);

std::int64_t count_hits(const PointSet& ps, const Rational& alpha, const TargetInterval& J);
std::int64_t count_hits(const PointSet& ps, double alpha, double offset, double length);

// sup over [a, b) in [0,1] of |#{x_j in [a,b)}/q - (b - a)|, exactly.
Rational extreme_discrepancy(const std::vector<Rational>& points);
Rational extreme_discrepancy(const PointSet& ps, const Rational& alpha);

// |S_n(alpha)| where S_n = (1/q) sum_j exp(2 pi i n b_j alpha).
double exp_sum_abs(const PointSet& ps, std::int64_t n, double alpha);

struct MomentRow {
  std::int64_t n = 0;
  double integral_estimate = 0.0;  // mean of |S_n|^2 over the grid
  double exact = 0.0;              // 1/q
  double max_abs = 0.0;            // max |S_n| on the grid
};

// Riemann sums on the grid alpha = g / grid, g = 0..grid-1.
std::vector<MomentRow> exp_sum_moments(const PointSet& ps, std::int64_t nmax, std::int64_t grid);

struct LevequeCheck {
  double lhs = 0.0;        // Delta^3
  double rhs_upper = 0.0;  // (6/pi^2)(sum_{n<=T} |S_n|^2/n^2 + sum_{n>T} 1/n^2)
  bool holds = false;
};

LevequeCheck leveque_check(const PointSet& ps, const Rational& alpha, std::int64_t trunc);

struct Lemma2Outcome {
  std::int64_t samples = 0;
  std::int64_t successes = 0;  // samples with N(alpha, J) >= q*lambda/2
  double fraction = 0.0;
  double bound = 0.0;  // 1 - 8/sqrt(q)
  bool hypothesis_met = false;  // q >= lambda^-6
};

// Monte-Carlo over uniform alpha in [0,1). Samples are split into fixed-size
// blocks with per-block seeds, so the outcome is independent of `threads`.
Lemma2Outcome lemma2_experiment(const PointSet& ps, const TargetInterval& J, std::int64_t samples,
                                std::uint64_t seed, unsigned threads = 1);

std::string moments_csv(const std::vector<MomentRow>& rows);

}  // namespace qdisc
