#include "qdisc/gridlab.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <thread>

#include <json.hpp>

#include "qdisc/errors.hpp"
#include "qdisc/io.hpp"

namespace qdisc {

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11U) * 0x1.0p-53; }

std::int64_t floor_to_int(const Rational& r) {
  auto v = to_int64(floor_of(r));
  if (!v) throw RangeError("value exceeds 64 bits");
  return *v;
}

}  // namespace

std::int64_t GridSpec::column_of(double x) const {
  return static_cast<std::int64_t>(std::floor((x - v_offset) / static_cast<double>(ell)));
}

std::int64_t GridSpec::column_of(const Rational& x) const {
  return floor_to_int((x - v_offset_exact()) / static_cast<long>(ell));
}

std::pair<Rational, Rational> GridSpec::column_bounds(std::int64_t k) const {
  Rational lo = v_offset_exact() + Rational(static_cast<long>(k * ell));
  Rational hi = lo + static_cast<long>(ell);
  lo.canonicalize();
  hi.canonicalize();
  return {lo, hi};
}

bool GridSpec::column_full(std::int64_t k) const {
  auto [lo, hi] = column_bounds(k);
  return 2 * lo >= Rational(static_cast<long>(m)) && hi <= Rational(static_cast<long>(m));
}

std::vector<std::int64_t> GridSpec::full_columns() const {
  std::vector<std::int64_t> out;
  const Rational half(static_cast<long>(m), 2L);
  const Rational top(static_cast<long>(m));
  for (std::int64_t k = column_of(half); k <= column_of(top); ++k) {
    if (column_full(k)) out.push_back(k);
  }
  return out;
}

std::optional<std::size_t> GridSpec::sector_position(double slope) const {
  if (slope < static_cast<double>(t_slope) || slope >= static_cast<double>(t_slope + 1)) return std::nullopt;
  auto it = std::upper_bound(sectors.begin(), sectors.end(), slope,
                             [](double s, const Sector& sec) { return s < sec.lo_d; });
  return static_cast<std::size_t>(it - sectors.begin()) - 1;
}

std::optional<std::size_t> GridSpec::sector_position(const Rational& slope) const {
  if (slope < Rational(static_cast<long>(t_slope)) || slope >= Rational(static_cast<long>(t_slope + 1))) {
    return std::nullopt;
  }
  auto it = std::upper_bound(sectors.begin(), sectors.end(), slope,
                             [](const Rational& s, const Sector& sec) { return s < sec.lo; });
  return static_cast<std::size_t>(it - sectors.begin()) - 1;
}

Rational GridSpec::trapezoid_area(std::int64_t k, std::size_t p) const {
  auto [x1, x2] = column_bounds(k);
  const auto& sec = sectors.at(p);
  Rational area = (sec.hi - sec.lo) * (x2 * x2 - x1 * x1) / 2;
  area.canonicalize();
  return area;
}

int level_count(int u) { return std::max(1, u / 8); }

GridSpec build_grid(int i, std::int64_t t_slope, int u, double c2, std::uint64_t seed) {
  if (u < 1 || u > 30) throw InvalidParameter("grid needs 1 <= u <= 30");
  if (i < 1 || i > u) throw InvalidParameter("grid level i must satisfy 1 <= i <= u (ell <= m)");
  if (t_slope < 1) throw InvalidParameter("slope base t must be >= 1");
  if (!(c2 > 0)) throw InvalidParameter("c2 must be positive");

  GridSpec g;
  g.level = i;
  g.ell = std::int64_t{1} << i;
  g.t_slope = t_slope;
  g.u = u;
  g.m = std::int64_t{1} << u;
  g.n = (t_slope + 1) * g.m;
  g.c2 = c2;
  g.beta = c2 * std::pow(std::log(static_cast<double>(g.n)), 0.25);
  g.tau = 1.0 / (static_cast<double>(g.ell) * g.beta * static_cast<double>(g.m));

  // One anchor in [0, m) shared by every level; reducing it mod ell keeps each
  // level uniform on [n - ell, n) while nesting the vertical lines dyadically.
  std::mt19937_64 rng(seed);
  const double anchor = uniform01(rng) * static_cast<double>(g.m);
  g.v_offset = static_cast<double>(g.n - g.ell) + std::fmod(anchor, static_cast<double>(g.ell));
  g.s_offset = static_cast<double>(t_slope) + uniform01(rng) * g.tau;

  const double bottom = static_cast<double>(t_slope);
  const double top = static_cast<double>(t_slope + 1);
  std::vector<double> edges;
  std::int64_t first_index = 0;
  if (g.s_offset > bottom) {
    edges.push_back(bottom);
    first_index = -1;
  }
  for (std::int64_t j = 0;; ++j) {
    double e = g.s_offset + static_cast<double>(j) * g.tau;
    if (e >= top) break;
    edges.push_back(e);
  }
  edges.push_back(top);
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    Sector s;
    s.index = first_index + static_cast<std::int64_t>(p);
    s.lo_d = edges[p];
    s.hi_d = edges[p + 1];
    s.lo = from_double(edges[p]);
    s.hi = from_double(edges[p + 1]);
    s.full = s.index >= 0 && p + 2 < edges.size();
    g.sectors.push_back(std::move(s));
  }
  return g;
}

std::optional<Location> locate(const GridSpec& g, double x, double y) {
  if (!(x > 0)) throw InvalidParameter("locate needs x > 0");
  if (x < static_cast<double>(g.m) / 2.0 || x > static_cast<double>(g.m)) return std::nullopt;
  auto pos = g.sector_position(y / x);
  if (!pos) return std::nullopt;
  return Location{g.column_of(x), g.sectors[*pos].index, *pos};
}

bool is_bad_switch_point(std::int64_t a, std::int64_t b, std::int64_t ell, double beta) {
  for (std::int64_t ap = a - ell; ap <= a + ell; ++ap) {
    if (ap == a) continue;
    std::int64_t r = ((b * ap) % a + a) % a;
    std::int64_t dist = std::min(r, a - r);
    // ||b a'/a|| = dist / a  <  1 / (ell beta)
    if (static_cast<double>(dist) * static_cast<double>(ell) * beta < static_cast<double>(a)) return true;
  }
  return false;
}

SwitchPointReport collect_switch_points(const Coloring& c, const GridSpec& g, double delta, std::int64_t M,
                                        const std::vector<AlphaInterval>& balanced) {
  if (c.n() < g.n) throw RangeError("coloring must cover {0..n} for the grid");
  SwitchPointReport rep;
  rep.delta = delta;
  rep.M = M;
  rep.bad_bound = static_cast<double>(g.m) * static_cast<double>(g.m) / g.beta;

  rep.sectors.resize(g.sectors.size());
  for (std::size_t p = 0; p < g.sectors.size(); ++p) {
    const auto& sec = g.sectors[p];
    auto& sr = rep.sectors[p];
    sr.index = sec.index;
    sr.full = sec.full;
    sr.width = sec.hi - sec.lo;
    sr.width.canonicalize();
    sr.balanced = measure_within(balanced, sec.lo, sec.hi);
    Rational ratio = sr.balanced / sr.width;
    sr.mu_star = ratio.get_d();
  }

  for (std::int64_t a = g.m / 2; a <= g.m; ++a) {
    for (std::int64_t b = g.t_slope * a; b < (g.t_slope + 1) * a; ++b) {
      if (b < 1 || c[b] == c[b - 1]) continue;
      SwitchPoint sp;
      sp.a = a;
      sp.b = b;
      auto pos = g.sector_position(make_rational(b, a));
      sp.sector_pos = *pos;  // b/a lies in [t, t+1) by construction
      sp.sector = g.sectors[*pos].index;
      sp.column = g.column_of(Rational(static_cast<long>(a)));
      sp.good = !is_bad_switch_point(a, b, g.ell, g.beta);
      if (sp.good) {
        ++rep.good_total;
        ++rep.sectors[*pos].good;
      } else {
        ++rep.bad_total;
      }
      rep.points.push_back(sp);
    }
  }
  for (auto& sr : rep.sectors) {
    sr.rich = sr.mu_star > delta / 2.0;
    if (sr.rich) ++rep.rich_count;
  }
  return rep;
}

SwitchPointReport collect_switch_points(const Coloring& c, const GridSpec& g, double delta, std::int64_t M) {
  auto balanced = balanced_intervals(c, g.n, M, Rational(static_cast<long>(g.t_slope)),
                                     Rational(static_cast<long>(g.t_slope + 1)));
  return collect_switch_points(c, g, delta, M, balanced);
}

Rational balanced_median(const std::vector<AlphaInterval>& balanced, const Rational& lo, const Rational& hi) {
  Rational total = measure_within(balanced, lo, hi);
  if (total == 0) {
    Rational mid = (lo + hi) / 2;
    mid.canonicalize();
    return mid;
  }
  Rational half = total / 2;
  Rational acc = 0;
  for (const auto& iv : balanced) {
    if (iv.hi <= lo) continue;
    if (iv.lo >= hi) break;
    const Rational& a = iv.lo > lo ? iv.lo : lo;
    const Rational& b = iv.hi < hi ? iv.hi : hi;
    Rational len = b - a;
    if (acc + len >= half) {
      Rational out = a + (half - acc);
      out.canonicalize();
      return out;
    }
    acc += len;
  }
  return hi;  // unreachable: the pieces sum to total
}

CheckerFunction::CheckerFunction(GridSpec grid, std::vector<CheckerCell> cells)
    : grid_(std::move(grid)), cells_(std::move(cells)) {
  for (std::size_t i = 0; i < cells_.size(); ++i) by_trapezoid_[{cells_[i].column, cells_[i].sector_pos}] = i;
}

double CheckerFunction::operator()(double x, double y) const {
  auto loc = locate(grid_, x, y);
  if (!loc) return 0.0;
  auto it = by_trapezoid_.find({loc->column, loc->sector_pos});
  if (it == by_trapezoid_.end()) return 0.0;
  const auto& cell = cells_[it->second];
  const bool left = x < cell.x_divider;
  const bool upper = y / x >= cell.slope_divider_d;
  return upper == left ? cell.sign : -cell.sign;
}

Rational CheckerFunction::support_area() const {
  Rational total = 0;
  for (const auto& cell : cells_) total += cell.area;
  total.canonicalize();
  return total;
}

CheckerFunction build_checker(const Coloring& c, const GridSpec& g, const SwitchPointReport& report,
                              const std::vector<AlphaInterval>& balanced) {
  std::map<std::pair<std::int64_t, std::size_t>, std::vector<const SwitchPoint*>> occupancy;
  for (const auto& sp : report.points) occupancy[{sp.column, sp.sector_pos}].push_back(&sp);

  std::vector<CheckerCell> cells;
  for (const auto& [key, pts] : occupancy) {
    const auto [column, pos] = key;
    if (pts.size() != 1 || !g.column_full(column) || !g.sectors[pos].full) continue;
    const SwitchPoint& sp = *pts.front();
    const auto& sec = g.sectors[pos];
    auto [x1, x2] = g.column_bounds(column);
    CheckerCell cell;
    cell.column = column;
    cell.sector_pos = pos;
    cell.a = sp.a;
    cell.b = sp.b;
    cell.x_divider = Rational((x1 + x2) / 2).get_d();
    cell.slope_divider = balanced_median(balanced, sec.lo, sec.hi);
    cell.slope_divider_d = cell.slope_divider.get_d();
    // Right of x = a, the segment at (a, b) contributes c(b) above slope b/a
    // and c(b-1) below; the right cells carry -s (upper) and +s (lower), so
    // this sign makes the contribution nonnegative.
    const int jump = c[sp.b] - c[sp.b - 1];
    cell.sign = jump > 0 ? -1 : 1;
    cell.area = g.trapezoid_area(column, pos);
    cells.push_back(std::move(cell));
  }
  return CheckerFunction(g, std::move(cells));
}

double RegionSampler::area() const {
  const auto mm = static_cast<double>(m);
  return 3.0 * mm * mm / 8.0;
}

InnerProductTable mc_inner_products(const RegionSampler& region, const std::vector<PlaneFunction>& fns,
                                    std::int64_t samples, std::uint64_t seed, unsigned threads) {
  if (samples < 2) throw InvalidParameter("Monte-Carlo needs at least 2 samples");
  const std::size_t k = fns.size();
  constexpr std::int64_t kBlock = 8192;
  const std::int64_t blocks = (samples + kBlock - 1) / kBlock;
  struct Partial {
    std::vector<long double> sum;
    std::vector<long double> sum_sq;
  };
  std::vector<Partial> partials(static_cast<std::size_t>(blocks));

  const double mm = static_cast<double>(region.m);
  const double t = static_cast<double>(region.t_slope);
  auto run_block = [&](std::int64_t blk) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32U),
                      static_cast<std::uint32_t>(blk), static_cast<std::uint32_t>(blk >> 32U)};
    std::mt19937_64 rng(seq);
    Partial part{std::vector<long double>(k * k, 0.0L), std::vector<long double>(k * k, 0.0L)};
    std::vector<double> values(k);
    const std::int64_t end = std::min(samples, (blk + 1) * kBlock);
    for (std::int64_t s = blk * kBlock; s < end; ++s) {
      // Density proportional to x on [m/2, m] and uniform slope give the
      // uniform distribution on R.
      const double x = std::sqrt(mm * mm / 4.0 + uniform01(rng) * 0.75 * mm * mm);
      const double y = (t + uniform01(rng)) * x;
      for (std::size_t f = 0; f < k; ++f) values[f] = fns[f](x, y);
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
          const long double p = static_cast<long double>(values[i]) * values[j];
          part.sum[i * k + j] += p;
          part.sum_sq[i * k + j] += p * p;
        }
      }
    }
    partials[blk] = std::move(part);
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
    for (auto& th : pool) th.join();
  }

  InnerProductTable out;
  out.samples = samples;
  out.mean.assign(k, std::vector<double>(k, 0.0));
  out.stderr_.assign(k, std::vector<double>(k, 0.0));
  const long double N = static_cast<long double>(samples);
  const long double area = region.area();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      long double sum = 0.0L, sum_sq = 0.0L;
      for (const auto& part : partials) {
        sum += part.sum[i * k + j];
        sum_sq += part.sum_sq[i * k + j];
      }
      const long double mean = sum / N;
      const long double var = std::max(0.0L, (sum_sq - N * mean * mean) / (N - 1));
      out.mean[i][j] = out.mean[j][i] = static_cast<double>(area * mean);
      out.stderr_[i][j] = out.stderr_[j][i] = static_cast<double>(area * std::sqrt(var / N));
    }
  }
  return out;
}

PlaneFunction make_balanced_discrepancy(const Coloring& c, const std::vector<AlphaInterval>& balanced) {
  auto edges = std::make_shared<std::vector<std::pair<double, double>>>();
  for (const auto& iv : balanced) edges->emplace_back(iv.lo.get_d(), iv.hi.get_d());
  return [&c, edges](double x, double y) -> double {
    const double slope = y / x;
    auto it = std::upper_bound(edges->begin(), edges->end(), slope,
                               [](double s, const std::pair<double, double>& e) { return s < e.first; });
    if (it == edges->begin()) return 0.0;
    --it;
    if (slope >= it->second) return 0.0;
    return static_cast<double>(point_discrepancy(c, x, y));
  };
}

std::optional<std::pair<double, double>> normalized_product(const InnerProductTable& table, std::size_t i,
                                                            std::size_t j) {
  const double ni = table.mean[i][i];
  const double nj = table.mean[j][j];
  if (!(ni > 0) || !(nj > 0)) return std::nullopt;
  const double scale = std::sqrt(ni * nj);
  return std::make_pair(table.mean[i][j] / scale, table.stderr_[i][j] / scale);
}

double compute_c0(double rho, double t_slope, double delta) {
  if (!(rho > 0) || !(t_slope > 0) || !(delta > 0)) throw InvalidParameter("c0 needs positive rho, t, delta");
  if (delta > 1 || rho > 1) throw InvalidParameter("c0 needs delta <= 1 and rho <= 1");
  return std::sqrt(rho) * std::pow(delta, 13.0 / 4.0) / (142.0 * std::pow(t_slope, 3.0 / 4.0));
}

MainLemmaReport main_lemma_report(const Coloring& c, const ReportConfig& cfg) {
  if (cfg.seeds.empty()) throw InvalidParameter("report needs at least one grid seed");
  if (!(cfg.delta > 0) || cfg.delta > 1) throw InvalidParameter("delta must lie in (0,1]");
  if (cfg.M < 0) throw InvalidParameter("M must be >= 0");

  MainLemmaReport rep;
  rep.t_slope = cfg.t_slope;
  rep.m = std::int64_t{1} << cfg.u;
  rep.n = (cfg.t_slope + 1) * rep.m;
  if (c.n() < rep.n) throw RangeError("coloring must cover {0..(t+1)m}");
  rep.c2 = cfg.c2;
  rep.beta = cfg.c2 * std::pow(std::log(static_cast<double>(rep.n)), 0.25);
  rep.levels = level_count(cfg.u);
  rep.q = static_cast<std::int64_t>(switch_values(c, std::max<std::int64_t>(1, rep.n / 2), rep.n).size());
  rep.c0 = compute_c0(cfg.rho, static_cast<double>(cfg.t_slope), cfg.delta);
  rep.c2_threshold = 4096.0 * rep.c0 * static_cast<double>(cfg.t_slope) / (std::pow(cfg.delta, 3.0) * cfg.rho);

  const Rational lo(static_cast<long>(cfg.t_slope));
  const Rational hi(static_cast<long>(cfg.t_slope + 1));
  const auto balanced = balanced_intervals(c, rep.n, cfg.M, lo, hi, cfg.threads);
  rep.balanced_measure = measure_within(balanced, lo, hi);
  const auto H = make_balanced_discrepancy(c, balanced);
  const RegionSampler region{cfg.t_slope, rep.m};
  const double seeds = static_cast<double>(cfg.seeds.size());

  for (int i = 1; i <= rep.levels; ++i) {
    LevelReport lvl;
    lvl.i = i;
    const double ell = std::ldexp(1.0, i);
    lvl.rich_bound = cfg.delta / 2.0 * static_cast<double>(rep.m) * ell * rep.beta;
    lvl.lemma3_rhs = std::pow(cfg.delta, 5.0) * static_cast<double>(rep.m) * static_cast<double>(rep.q) /
                     (4096.0 * static_cast<double>(cfg.t_slope));
    double se_sq = 0.0;
    for (auto seed : cfg.seeds) {
      const auto grid = build_grid(i, cfg.t_slope, cfg.u, cfg.c2, seed);
      const auto sp = collect_switch_points(c, grid, cfg.delta, cfg.M, balanced);
      const auto checker = build_checker(c, grid, sp, balanced);
      double weighted = 0.0;
      for (const auto& s : sp.sectors) weighted += s.mu_star * s.mu_star * static_cast<double>(s.good);
      lvl.lemma3_lhs += weighted / seeds;
      lvl.lemma1_rhs += weighted / (32.0 * rep.beta) / seeds;
      lvl.rich_sectors += static_cast<double>(sp.rich_count) / seeds;
      lvl.bad_count += static_cast<double>(sp.bad_total) / seeds;
      lvl.bad_bound = sp.bad_bound;

      std::vector<PlaneFunction> fns{H, [&checker](double x, double y) { return checker(x, y); }};
      const std::uint64_t mc_seed = seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(i);
      const auto table = mc_inner_products(region, fns, cfg.samples, mc_seed, cfg.threads);
      lvl.lemma1_lhs += table.mean[0][1] / seeds;
      se_sq += table.stderr_[0][1] * table.stderr_[0][1];
    }
    lvl.lemma1_lhs_se = std::sqrt(se_sq) / seeds;
    rep.per_level.push_back(lvl);
  }
  return rep;
}

std::string to_json(const MainLemmaReport& r) {
  nlohmann::ordered_json j;
  j["n"] = r.n;
  j["m"] = r.m;
  j["t_slope"] = r.t_slope;
  j["beta"] = r.beta;
  j["levels"] = r.levels;
  j["q"] = r.q;
  j["balanced_measure"] = to_string(r.balanced_measure);
  j["c0"] = r.c0;
  j["c2"] = r.c2;
  j["c2_threshold"] = r.c2_threshold;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& l : r.per_level) {
    arr.push_back({{"i", l.i},
                   {"lemma1_lhs", l.lemma1_lhs},
                   {"lemma1_lhs_se", l.lemma1_lhs_se},
                   {"lemma1_rhs", l.lemma1_rhs},
                   {"lemma3_lhs", l.lemma3_lhs},
                   {"lemma3_rhs", l.lemma3_rhs},
                   {"rich_sectors", l.rich_sectors},
                   {"rich_bound", l.rich_bound},
                   {"bad_count", l.bad_count},
                   {"bad_bound", l.bad_bound}});
  }
  j["per_level"] = arr;
  return j.dump(2) + "\n";
}

std::string to_csv(const MainLemmaReport& r) {
  CsvWriter csv({"i", "lemma1_lhs", "lemma1_lhs_se", "lemma1_rhs", "lemma3_lhs", "lemma3_rhs", "rich_sectors",
                 "rich_bound", "bad_count", "bad_bound"});
  for (const auto& l : r.per_level) {
    csv.add_row({std::to_string(l.i), format_double(l.lemma1_lhs), format_double(l.lemma1_lhs_se),
                 format_double(l.lemma1_rhs), format_double(l.lemma3_lhs), format_double(l.lemma3_rhs),
                 format_double(l.rich_sectors), format_double(l.rich_bound), format_double(l.bad_count),
                 format_double(l.bad_bound)});
  }
  return csv.str();
}

}  // namespace qdisc
