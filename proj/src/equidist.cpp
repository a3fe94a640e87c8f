#include "qdisc/equidist.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <thread>

#include "qdisc/errors.hpp"
#include "qdisc/io.hpp"

namespace qdisc {

PointSet::PointSet(std::vector<std::int64_t> bs) : bs_(std::move(bs)) {
  if (bs_.empty()) throw InvalidParameter("point set needs q >= 1");
  if (bs_.front() < 1) throw InvalidParameter("point set values must be positive");
  for (std::size_t i = 1; i < bs_.size(); ++i) {
    if (bs_[i] <= bs_[i - 1]) throw InvalidParameter("point set must be strictly increasing");
  }
}

PointSet PointSet::range(std::int64_t q) {
  if (q < 1) throw InvalidParameter("point set needs q >= 1");
  std::vector<std::int64_t> bs(static_cast<std::size_t>(q));
  for (std::int64_t i = 0; i < q; ++i) bs[i] = i + 1;
  return PointSet(std::move(bs));
}

void TargetInterval::validate() const {
  if (offset < 0 || offset >= 1) throw InvalidParameter("interval offset must lie in [0,1)");
  if (length <= 0 || length > 1) throw InvalidParameter("interval length must lie in (0,1]");
}

std::vector<Rational> fractional_parts(const PointSet& ps, const Rational& alpha) {
  std::vector<Rational> out;
  out.reserve(ps.values().size());
  const BigInt& den = alpha.get_den();
  for (auto b : ps.values()) {
    BigInt prod = alpha.get_num() * BigInt(static_cast<long>(b));
    BigInt r;
    mpz_fdiv_r(r.get_mpz_t(), prod.get_mpz_t(), den.get_mpz_t());
    out.push_back(make_rational(r, den));
  }
  return out;
}

bool contains(const TargetInterval& J, const Rational& x) {
  Rational end = J.offset + J.length;
  if (end <= 1) return x >= J.offset && x < end;
  return x >= J.offset || x < end - 1;
}

bool contains(double offset, double length, double x) {
  double end = offset + length;
  if (end <= 1.0) return x >= offset && x < end;
  return x >= offset || x < end - 1.0;
}

std::int64_t count_hits(const PointSet& ps, const Rational& alpha, const TargetInterval& J) {
  J.validate();
  std::int64_t hits = 0;
  for (const auto& x : fractional_parts(ps, alpha)) {
    if (contains(J, x)) ++hits;
  }
  return hits;
}

std::int64_t count_hits(const PointSet& ps, double alpha, double offset, double length) {
  std::int64_t hits = 0;
  for (auto b : ps.values()) {
    double y = static_cast<double>(b) * alpha;
    double frac = y - std::floor(y);
    if (contains(offset, length, frac)) ++hits;
  }
  return hits;
}

Rational extreme_discrepancy(const std::vector<Rational>& points) {
  if (points.empty()) throw InvalidParameter("extreme discrepancy needs at least one point");
  std::vector<Rational> x = points;
  std::sort(x.begin(), x.end());
  const auto q = static_cast<long>(x.size());
  // With x sorted and 1-based index i:
  //   closed-interval excess:  max_j (j/q - x_j)  + max_i (x_i - (i-1)/q)
  // The unconstrained pairing of the two maxima also covers the empty gaps
  // (lo, hi) between points and the [0, x) / (x, 1) end pieces via the zero terms.
  Rational over_right = 0;
  Rational over_left = 0;
  for (long i = 1; i <= q; ++i) {
    Rational right = Rational(i, q) - x[i - 1];
    Rational left = x[i - 1] - Rational(i - 1, q);
    if (right > over_right) over_right = right;
    if (left > over_left) over_left = left;
  }
  Rational out = over_right + over_left;
  out.canonicalize();
  return out;
}

Rational extreme_discrepancy(const PointSet& ps, const Rational& alpha) {
  return extreme_discrepancy(fractional_parts(ps, alpha));
}

double exp_sum_abs(const PointSet& ps, std::int64_t n, double alpha) {
  std::complex<double> sum = 0.0;
  for (auto b : ps.values()) {
    // Reduce n*b*alpha mod 1 before scaling by 2 pi to keep the phase accurate.
    double phase = static_cast<double>(n) * static_cast<double>(b) * alpha;
    phase -= std::floor(phase);
    sum += std::polar(1.0, 2.0 * std::numbers::pi * phase);
  }
  return std::abs(sum) / static_cast<double>(ps.size());
}

namespace {

// |S_n|^2 for a rational alpha, with the phase reduced exactly.
double exp_sum_norm_sq(const PointSet& ps, std::int64_t n, const Rational& alpha) {
  const BigInt& den = alpha.get_den();
  std::complex<double> sum = 0.0;
  for (auto b : ps.values()) {
    BigInt prod = alpha.get_num() * BigInt(static_cast<long>(b)) * BigInt(static_cast<long>(n));
    BigInt r;
    mpz_fdiv_r(r.get_mpz_t(), prod.get_mpz_t(), den.get_mpz_t());
    double phase = Rational(r, den).get_d();
    sum += std::polar(1.0, 2.0 * std::numbers::pi * phase);
  }
  double mod = std::abs(sum) / static_cast<double>(ps.size());
  return mod * mod;
}

}  // namespace

std::vector<MomentRow> exp_sum_moments(const PointSet& ps, std::int64_t nmax, std::int64_t grid) {
  if (nmax < 1) throw InvalidParameter("nmax must be >= 1");
  if (grid < 1000) throw InvalidParameter("alpha grid must have at least 1000 points");
  std::vector<MomentRow> rows;
  for (std::int64_t n = 1; n <= nmax; ++n) {
    MomentRow row{n, 0.0, 1.0 / static_cast<double>(ps.size()), 0.0};
    long double acc = 0.0L;
    for (std::int64_t g = 0; g < grid; ++g) {
      double s = exp_sum_abs(ps, n, static_cast<double>(g) / static_cast<double>(grid));
      acc += static_cast<long double>(s) * s;
      row.max_abs = std::max(row.max_abs, s);
    }
    row.integral_estimate = static_cast<double>(acc / static_cast<long double>(grid));
    rows.push_back(row);
  }
  return rows;
}

LevequeCheck leveque_check(const PointSet& ps, const Rational& alpha, std::int64_t trunc) {
  if (trunc < 1) throw InvalidParameter("truncation must be >= 1");
  LevequeCheck out;
  const double delta = extreme_discrepancy(ps, alpha).get_d();
  out.lhs = delta * delta * delta;

  long double head = 0.0L;
  long double zeta_head = 0.0L;
  for (std::int64_t n = 1; n <= trunc; ++n) {
    const long double inv_sq = 1.0L / (static_cast<long double>(n) * n);
    head += exp_sum_norm_sq(ps, n, alpha) * inv_sq;
    zeta_head += inv_sq;
  }
  const long double pi = std::numbers::pi_v<long double>;
  const long double tail = pi * pi / 6.0L - zeta_head;
  out.rhs_upper = static_cast<double>(6.0L / (pi * pi) * (head + tail));
  // Relative slack for rounding: with q = 1 both sides equal 1 exactly.
  out.holds = out.lhs <= out.rhs_upper * (1.0 + 1e-12);
  return out;
}

Lemma2Outcome lemma2_experiment(const PointSet& ps, const TargetInterval& J, std::int64_t samples,
                                std::uint64_t seed, unsigned threads) {
  if (samples < 100) throw InvalidParameter("hit-fraction experiment needs at least 100 samples");
  J.validate();
  const double q = static_cast<double>(ps.size());
  const double lambda = J.length.get_d();
  const double offset = J.offset.get_d();

  Lemma2Outcome out;
  out.samples = samples;
  out.bound = 1.0 - 8.0 / std::sqrt(q);
  out.hypothesis_met = q >= std::pow(lambda, -6.0);

  constexpr std::int64_t kBlock = 4096;
  const std::int64_t blocks = (samples + kBlock - 1) / kBlock;
  std::vector<std::int64_t> block_hits(static_cast<std::size_t>(blocks), 0);
  const double needed = q * lambda / 2.0;
  auto run_block = [&](std::int64_t blk) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32U),
                      static_cast<std::uint32_t>(blk), static_cast<std::uint32_t>(blk >> 32U)};
    std::mt19937_64 rng(seq);
    const std::int64_t begin = blk * kBlock;
    const std::int64_t end = std::min(samples, begin + kBlock);
    std::int64_t hits = 0;
    for (std::int64_t i = begin; i < end; ++i) {
      double alpha = static_cast<double>(rng() >> 11U) * 0x1.0p-53;
      if (static_cast<double>(count_hits(ps, alpha, offset, lambda)) >= needed) ++hits;
    }
    block_hits[blk] = hits;
  };
  threads = std::max(1U, threads);
  if (threads == 1) {
    for (std::int64_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::int64_t b = w; b < blocks; b += threads) run_block(b);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto h : block_hits) out.successes += h;
  out.fraction = static_cast<double>(out.successes) / static_cast<double>(samples);
  return out;
}

std::string moments_csv(const std::vector<MomentRow>& rows) {
  CsvWriter csv({"n", "integral_estimate", "exact", "max_abs"});
  for (const auto& r : rows) {
    csv.add_row({std::to_string(r.n), format_double(r.integral_estimate), format_double(r.exact),
                 format_double(r.max_abs)});
  }
  return csv.str();
}

}  // namespace qdisc
