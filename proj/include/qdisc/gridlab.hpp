#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qdisc/alpha_atlas.hpp"
#include "qdisc/coloring.hpp"
#include "qdisc/rational.hpp"

namespace qdisc {

// Slope subinterval [lo, hi) of [t, t+1). Index 0 starts at the lowest
// sloping line; index -1 is the partial piece below it, and the topmost
// sector is partial as well.
struct Sector {
  std::int64_t index = 0;
  Rational lo;
  Rational hi;
  double lo_d = 0.0;
  double hi_d = 0.0;
  bool full = false;
};

// One randomly placed trapezoidal grid over the region
// R = {m/2 <= x <= m, t <= y/x < t+1}.
struct GridSpec {
  int level = 1;
  std::int64_t ell = 2;
  std::int64_t t_slope = 1;
  int u = 1;
  std::int64_t m = 2;
  std::int64_t n = 4;  // (t_slope + 1) * m
  double c2 = 1.0;
  double beta = 1.0;  // c2 * (ln n)^(1/4)
  double tau = 1.0;   // 1 / (ell * beta * m)
  double v_offset = 0.0;  // a vertical line sits here; in [n - ell, n)
  double s_offset = 1.0;  // lowest sloping line; in [t, t + tau)
  std::vector<Sector> sectors;  // ascending, tiling [t, t+1)

  Rational v_offset_exact() const { return from_double(v_offset); }

  // Column k spans [v_offset + k*ell, v_offset + (k+1)*ell).
  std::int64_t column_of(double x) const;
  std::int64_t column_of(const Rational& x) const;
  std::pair<Rational, Rational> column_bounds(std::int64_t k) const;
  bool column_full(std::int64_t k) const;
  std::vector<std::int64_t> full_columns() const;

  // Position in `sectors` of the sector holding the slope; nullopt outside [t, t+1).
  std::optional<std::size_t> sector_position(double slope) const;
  std::optional<std::size_t> sector_position(const Rational& slope) const;

  // Exact area of the trapezoid (full column k, sector at position p).
  Rational trapezoid_area(std::int64_t k, std::size_t p) const;
};

// Offsets are drawn from `seed`. Grids built from the same seed at different
// levels have nested vertical lines. Requires 1 <= i <= u, t_slope >= 1, c2 > 0.
GridSpec build_grid(int i, std::int64_t t_slope, int u, double c2, std::uint64_t seed);

// Level range used by the report: max(1, floor(log2(m) / 8)).
int level_count(int u);

struct Location {
  std::int64_t column = 0;
  std::int64_t sector = 0;  // Sector::index
  std::size_t sector_pos = 0;
};

// nullopt when (x, y) lies outside R. Throws InvalidParameter for x <= 0.
std::optional<Location> locate(const GridSpec& g, double x, double y);

// ||b a' / a|| < 1/(ell*beta) for some a' != a with |a' - a| <= ell.
bool is_bad_switch_point(std::int64_t a, std::int64_t b, std::int64_t ell, double beta);

struct SwitchPoint {
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::int64_t column = 0;
  std::int64_t sector = 0;
  std::size_t sector_pos = 0;
  bool good = false;
};

struct SectorReport {
  std::int64_t index = 0;
  bool full = false;
  Rational width;
  Rational balanced;      // mu_ij
  double mu_star = 0.0;   // mu_ij / width
  std::int64_t good = 0;  // s*_ij
  bool rich = false;      // mu_star > delta / 2
};

struct SwitchPointReport {
  std::vector<SwitchPoint> points;
  std::vector<SectorReport> sectors;  // parallel to GridSpec::sectors
  std::int64_t good_total = 0;
  std::int64_t bad_total = 0;
  double bad_bound = 0.0;  // m^2 / beta
  std::int64_t rich_count = 0;
  double delta = 0.0;
  std::int64_t M = 0;
};

// `balanced` are the M-balanced slope intervals of [t, t+1) for n = (t+1) m.
SwitchPointReport collect_switch_points(const Coloring& c, const GridSpec& g, double delta, std::int64_t M,
                                        const std::vector<AlphaInterval>& balanced);
SwitchPointReport collect_switch_points(const Coloring& c, const GridSpec& g, double delta, std::int64_t M);

struct CheckerCell {
  std::int64_t column = 0;
  std::size_t sector_pos = 0;
  std::int64_t a = 0;
  std::int64_t b = 0;
  int sign = 1;
  double x_divider = 0.0;
  Rational slope_divider;
  double slope_divider_d = 0.0;
  Rational area;
};

// G_i: on each full trapezoid holding exactly one switch point, value s on
// the upper-left and lower-right cells and -s on the other two; 0 elsewhere.
class CheckerFunction {
 public:
  CheckerFunction(GridSpec grid, std::vector<CheckerCell> cells);

  const GridSpec& grid() const { return grid_; }
  const std::vector<CheckerCell>& cells() const { return cells_; }
  double operator()(double x, double y) const;
  Rational support_area() const;

 private:
  GridSpec grid_;
  std::vector<CheckerCell> cells_;
  std::map<std::pair<std::int64_t, std::size_t>, std::size_t> by_trapezoid_;
};

// Slope in [lo, hi) splitting the balanced measure of [lo, hi) in half, exactly.
// Falls back to the midpoint when the sector holds no balanced measure.
Rational balanced_median(const std::vector<AlphaInterval>& balanced, const Rational& lo, const Rational& hi);

CheckerFunction build_checker(const Coloring& c, const GridSpec& g, const SwitchPointReport& report,
                              const std::vector<AlphaInterval>& balanced);

// Uniform sampler over R for a fixed (t_slope, m).
struct RegionSampler {
  std::int64_t t_slope = 1;
  std::int64_t m = 2;
  double area() const;  // 3 m^2 / 8
};

struct InnerProductTable {
  std::int64_t samples = 0;
  std::vector<std::vector<double>> mean;    // estimates of <f_i, f_j>
  std::vector<std::vector<double>> stderr_;  // standard errors
};

using PlaneFunction = std::function<double(double, double)>;

// Monte-Carlo <f_i, f_j> over R. Blocks of samples use per-block seeds, so the
// result does not depend on `threads`.
InnerProductTable mc_inner_products(const RegionSampler& region, const std::vector<PlaneFunction>& fns,
                                    std::int64_t samples, std::uint64_t seed, unsigned threads = 1);

// H(x, y) = D(x, y) when y/x is M-balanced, else 0.
PlaneFunction make_balanced_discrepancy(const Coloring& c, const std::vector<AlphaInterval>& balanced);

// Normalized estimate <g_i, g_j> = <G_i, G_j> / (|G_i| |G_j|) with its standard error;
// nullopt when either norm estimate is zero.
std::optional<std::pair<double, double>> normalized_product(const InnerProductTable& table, std::size_t i,
                                                            std::size_t j);

double compute_c0(double rho, double t_slope, double delta);

struct ReportConfig {
  std::int64_t t_slope = 1;
  int u = 6;
  double delta = 0.5;
  double rho = 1.0;
  double c2 = 1.0;
  std::int64_t M = 2;
  std::vector<std::uint64_t> seeds{1};
  std::int64_t samples = 100000;
  unsigned threads = 1;
};

struct LevelReport {
  int i = 0;
  double lemma1_lhs = 0.0;
  double lemma1_lhs_se = 0.0;
  double lemma1_rhs = 0.0;
  double lemma3_lhs = 0.0;
  double lemma3_rhs = 0.0;
  double rich_sectors = 0.0;
  double rich_bound = 0.0;  // (delta/2) m ell beta
  double bad_count = 0.0;
  double bad_bound = 0.0;   // m^2 / beta
};

struct MainLemmaReport {
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::int64_t t_slope = 0;
  double beta = 0.0;
  int levels = 0;
  std::int64_t q = 0;  // switch values in [n/2, n]
  Rational balanced_measure;
  double c0 = 0.0;
  double c2 = 0.0;
  double c2_threshold = 0.0;  // 4096 c0 t / (delta^3 rho)
  std::vector<LevelReport> per_level;
};

MainLemmaReport main_lemma_report(const Coloring& c, const ReportConfig& config);
std::string to_json(const MainLemmaReport& report);
std::string to_csv(const MainLemmaReport& report);

}  // namespace qdisc
