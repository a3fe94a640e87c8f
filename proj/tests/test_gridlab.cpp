#include <doctest.h>

#include <cmath>
#include <random>

#include <json.hpp>

#include "qdisc/errors.hpp"
#include "qdisc/gridlab.hpp"

using namespace qdisc;

namespace {

double c2_for_beta(double beta, std::int64_t n) { return beta / std::pow(std::log(static_cast<double>(n)), 0.25); }

}  // namespace

TEST_CASE("grid construction") {
  auto g = build_grid(1, 1, 3, c2_for_beta(2.0, 16), 42);
  CHECK(g.m == 8);
  CHECK(g.n == 16);
  CHECK(g.ell == 2);
  CHECK(g.beta == doctest::Approx(2.0));
  CHECK(g.tau == doctest::Approx(1.0 / 32));
  CHECK(g.v_offset >= 14);
  CHECK(g.v_offset < 16);
  CHECK(g.s_offset >= 1);
  CHECK(g.s_offset < 1 + g.tau);
  auto cols = g.full_columns();
  REQUIRE_FALSE(cols.empty());
  for (auto k : cols) {
    auto [x1, x2] = g.column_bounds(k);
    CHECK(2 * x1 >= 8);
    CHECK(x2 <= 8);
    for (std::size_t p = 0; p < g.sectors.size(); ++p) {
      if (!g.sectors[p].full) continue;
      double area = g.trapezoid_area(k, p).get_d();
      CHECK(area >= 0.25 * (1 - 1e-9));
      CHECK(area <= 0.5 * (1 + 1e-9));
    }
  }

  auto again = build_grid(1, 1, 3, c2_for_beta(2.0, 16), 42);
  CHECK(again.v_offset == g.v_offset);
  CHECK(again.s_offset == g.s_offset);
  auto other = build_grid(1, 1, 3, c2_for_beta(2.0, 16), 43);
  CHECK(other.v_offset != g.v_offset);

  CHECK_THROWS_AS(build_grid(4, 1, 3, 1.0, 1), InvalidParameter);
  CHECK_THROWS_AS(build_grid(0, 1, 3, 1.0, 1), InvalidParameter);
  CHECK_THROWS_AS(build_grid(1, 0, 3, 1.0, 1), InvalidParameter);
  CHECK_THROWS_AS(build_grid(1, 1, 3, 0.0, 1), InvalidParameter);
}

TEST_CASE("sectors tile the slope range") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    for (std::int64_t t : {1, 3}) {
      auto g = build_grid(2, t, 6, 1.0, seed);
      REQUIRE_FALSE(g.sectors.empty());
      CHECK(g.sectors.front().lo == t);
      CHECK(g.sectors.back().hi == t + 1);
      for (std::size_t p = 0; p + 1 < g.sectors.size(); ++p) {
        CHECK(g.sectors[p].hi == g.sectors[p + 1].lo);
        CHECK(g.sectors[p].lo < g.sectors[p].hi);
      }
      for (const auto& s : g.sectors) {
        if (s.full) CHECK(s.hi_d - s.lo_d == doctest::Approx(g.tau).epsilon(1e-9));
      }
      auto zero = std::find_if(g.sectors.begin(), g.sectors.end(), [](const Sector& s) { return s.index == 0; });
      REQUIRE(zero != g.sectors.end());
      CHECK(zero->lo_d == g.s_offset);
    }
  }
}

TEST_CASE("locate") {
  auto g = build_grid(2, 1, 5, 1.0, 7);
  const double x = 24.0;
  auto on_line = locate(g, x, g.s_offset * x);
  REQUIRE(on_line);
  CHECK(on_line->sector == 0);
  auto mid = locate(g, x, (g.s_offset + 1.5 * g.tau) * x);
  REQUIRE(mid);
  CHECK(mid->sector == 1);
  CHECK_FALSE(locate(g, 10.0, 15.0));   // x < m/2
  CHECK_FALSE(locate(g, 20.0, 10.0));   // slope below t
  CHECK_FALSE(locate(g, 20.0, 40.0));   // slope t + 1 is outside
  CHECK_THROWS_AS(locate(g, 0.0, 1.0), InvalidParameter);

  // naive scan over sector boundaries
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux(16.0, 32.0), us(1.0, 2.0);
  for (int i = 0; i < 2000; ++i) {
    double px = ux(rng), slope = us(rng);
    auto loc = locate(g, px, slope * px);
    REQUIRE(loc);
    double s = (slope * px) / px;
    std::size_t naive = 0;
    while (naive + 1 < g.sectors.size() && s >= g.sectors[naive + 1].lo_d) ++naive;
    CHECK(loc->sector_pos == naive);
    CHECK(loc->column == static_cast<std::int64_t>(std::floor((px - g.v_offset) / 4.0)));
  }
}

TEST_CASE("bad switch points") {
  // ||b a'/a|| for a = 10, b = 15: a' = 9 gives 13.5 -> 1/2; a' = 12 gives 18 -> 0
  CHECK(is_bad_switch_point(10, 15, 2, 1.0));
  CHECK_FALSE(is_bad_switch_point(10, 15, 1, 4.0));  // a' = 9, 11 give distance 1/2 >= 1/4
  // brute force definition
  for (std::int64_t a = 8; a <= 40; ++a) {
    for (std::int64_t b = a; b < 2 * a; ++b) {
      for (std::int64_t ell : {2, 4}) {
        double beta = 1.3;
        bool bad = false;
        for (std::int64_t ap = a - ell; ap <= a + ell; ++ap) {
          if (ap == a) continue;
          double v = static_cast<double>(b * ap) / static_cast<double>(a);
          double dist = std::abs(v - std::round(v));
          bad = bad || dist < 1.0 / (static_cast<double>(ell) * beta) - 1e-12;
        }
        CHECK(is_bad_switch_point(a, b, ell, beta) == bad);
      }
    }
  }
}

TEST_CASE("switch point report") {
  auto cst = generate(ColoringSource::constant(1), 64);
  auto g = build_grid(1, 1, 5, 1.0, 1);
  auto rep = collect_switch_points(cst, g, 0.5, 2);
  CHECK(rep.points.empty());
  CHECK(rep.good_total == 0);
  CHECK(rep.bad_total == 0);

  auto alt = generate(ColoringSource::alternating(), 32);
  auto g16 = build_grid(1, 1, 4, 1.0, 5);
  auto r = collect_switch_points(alt, g16, 0.5, 2);
  CHECK(static_cast<double>(r.bad_total) <= r.bad_bound);
  CHECK(r.good_total + r.bad_total == static_cast<std::int64_t>(r.points.size()));
  std::int64_t expected_points = 0;
  for (std::int64_t a = 8; a <= 16; ++a) expected_points += a;  // every b in [a, 2a) switches
  CHECK(static_cast<std::int64_t>(r.points.size()) == expected_points);
  std::int64_t good = 0;
  for (const auto& s : r.sectors) {
    CHECK(s.mu_star >= 0.0);
    CHECK(s.mu_star <= 1.0 + 1e-12);
    good += s.good;
  }
  CHECK(good == r.good_total);

  CHECK_THROWS_AS(collect_switch_points(generate(ColoringSource::alternating(), 20), g16, 0.5, 2), RangeError);
}

TEST_CASE("balanced median") {
  std::vector<AlphaInterval> uniform{make_interval(make_rational(1), make_rational(2))};
  CHECK(balanced_median(uniform, make_rational(5, 4), make_rational(3, 2)) == make_rational(11, 8));
  CHECK(balanced_median({}, make_rational(1), make_rational(2)) == make_rational(3, 2));
  std::vector<AlphaInterval> two{make_interval(make_rational(1), make_rational(11, 10)),
                                 make_interval(make_rational(19, 10), make_rational(2))};
  auto med = balanced_median(two, make_rational(1), make_rational(2));
  CHECK(measure_within(two, make_rational(1), med) == measure_within(two, med, make_rational(2)));
}

TEST_CASE("checkerboard function") {
  auto alt = generate(ColoringSource::alternating(), 128);
  auto g = build_grid(2, 1, 6, 1.0, 11);
  auto balanced = balanced_intervals(alt, g.n, 2, make_rational(1), make_rational(2));
  auto rep = collect_switch_points(alt, g, 0.5, 2, balanced);
  auto checker = build_checker(alt, g, rep, balanced);
  REQUIRE_FALSE(checker.cells().empty());

  std::map<std::pair<std::int64_t, std::size_t>, int> occupancy;
  for (const auto& sp : rep.points) ++occupancy[{sp.column, sp.sector_pos}];
  Rational area = 0;
  for (const auto& cell : checker.cells()) {
    CHECK(occupancy[{cell.column, cell.sector_pos}] == 1);
    CHECK(g.column_full(cell.column));
    CHECK(g.sectors[cell.sector_pos].full);
    const auto& sec = g.sectors[cell.sector_pos];
    CHECK(cell.slope_divider >= sec.lo);
    CHECK(cell.slope_divider <= sec.hi);
    CHECK(cell.sign == (alt[cell.b] - alt[cell.b - 1] > 0 ? -1 : 1));
    area += cell.area;

    // four cell centers: upper-left, upper-right, lower-left, lower-right
    auto [x1, x2] = g.column_bounds(cell.column);
    double xl = (x1.get_d() + cell.x_divider) / 2, xr = (cell.x_divider + x2.get_d()) / 2;
    double su = (cell.slope_divider_d + sec.hi_d) / 2, sl = (sec.lo_d + cell.slope_divider_d) / 2;
    CHECK(checker(xl, su * xl) == cell.sign);
    CHECK(checker(xr, su * xr) == -cell.sign);
    CHECK(checker(xl, sl * xl) == -cell.sign);
    CHECK(checker(xr, sl * xr) == cell.sign);
  }
  CHECK(checker.support_area() == area);
  CHECK(checker(5.0, 7.0) == 0.0);
}

TEST_CASE("Monte-Carlo inner products") {
  RegionSampler region{1, 16};
  CHECK(region.area() == doctest::Approx(96.0));
  PlaneFunction one = [](double, double) { return 1.0; };
  PlaneFunction zero = [](double, double) { return 0.0; };
  auto tab = mc_inner_products(region, {one, zero}, 20000, 5, 1);
  CHECK(tab.mean[0][0] == doctest::Approx(96.0));
  CHECK(tab.mean[0][1] == 0.0);
  CHECK(tab.mean[1][1] == 0.0);
  auto par = mc_inner_products(region, {one, zero}, 20000, 5, 3);
  CHECK(par.mean == tab.mean);
  CHECK_FALSE(normalized_product(tab, 0, 1));

  // region sampler is uniform: the area below slope 3/2 is (5/12) of ... = (slope width 1/2) * 3m^2/8 / 1
  PlaneFunction lower = [](double x, double y) { return y / x < 1.5 ? 1.0 : 0.0; };
  PlaneFunction left = [](double x, double) { return x < 12.0 ? 1.0 : 0.0; };
  auto t2 = mc_inner_products(region, {lower, left}, 400000, 9, 4);
  CHECK(std::abs(t2.mean[0][0] - 48.0) <= 4 * t2.stderr_[0][0]);
  // x in [8, 12], all slopes: (12^2 - 8^2) / 2 = 40
  CHECK(std::abs(t2.mean[1][1] - 40.0) <= 4 * t2.stderr_[1][1]);
}

TEST_CASE("checker against a constructed indicator") {
  auto alt = generate(ColoringSource::alternating(), 128);
  auto g = build_grid(3, 1, 6, 1.0, 2);
  auto balanced = balanced_intervals(alt, g.n, 2, make_rational(1), make_rational(2));
  auto rep = collect_switch_points(alt, g, 0.5, 2, balanced);
  auto checker = build_checker(alt, g, rep, balanced);
  REQUIRE_FALSE(checker.cells().empty());
  const auto cell = checker.cells().front();
  const auto& sec = g.sectors[cell.sector_pos];
  auto [x1, x2] = g.column_bounds(cell.column);
  const double xa = x1.get_d(), xd = cell.x_divider, sd = cell.slope_divider_d, sh = sec.hi_d;
  PlaneFunction upper_left = [=](double x, double y) {
    double s = y / x;
    return (x >= xa && x < xd && s >= sd && s < sh) ? 1.0 : 0.0;
  };
  PlaneFunction G = [&checker](double x, double y) { return checker(x, y); };
  auto tab = mc_inner_products({1, g.m}, {upper_left, G}, 2000000, 17, 4);
  const double cell_area = (sh - sd) * (xd * xd - xa * xa) / 2;
  CHECK(std::abs(tab.mean[0][1] - cell.sign * cell_area) <= 4 * tab.stderr_[0][1] + 1e-12);
  CHECK(tab.mean[0][1] * cell.sign >= 0);
}

TEST_CASE("c0") {
  CHECK(compute_c0(1, 1, 1) == 1.0 / 142.0);
  CHECK(compute_c0(0.25, 1, 1) == doctest::Approx(0.5 / 142.0));
  CHECK_THROWS_AS(compute_c0(0, 1, 1), InvalidParameter);
  CHECK_THROWS_AS(compute_c0(1, 1, 2), InvalidParameter);
}

TEST_CASE("grid level report") {
  ReportConfig cfg;
  cfg.u = 5;
  cfg.samples = 20000;
  cfg.seeds = {1, 2};
  auto zero = generate(ColoringSource::constant(1), 64);
  auto rep = main_lemma_report(zero, cfg);
  REQUIRE(rep.per_level.size() == 1);
  CHECK(rep.q == 0);
  CHECK(rep.per_level[0].lemma1_lhs == 0.0);
  CHECK(rep.per_level[0].lemma1_rhs == 0.0);
  CHECK(rep.c0 == doctest::Approx(std::pow(0.5, 3.25) / 142));

  auto alt = generate(ColoringSource::alternating(), 128);
  cfg.u = 6;
  auto a = main_lemma_report(alt, cfg);
  auto b = main_lemma_report(alt, cfg);
  CHECK(to_json(a) == to_json(b));
  CHECK(to_csv(a) == to_csv(b));
  for (const auto& l : a.per_level) {
    CHECK(std::isfinite(l.lemma1_lhs));
    CHECK(std::isfinite(l.lemma1_rhs));
    CHECK(std::isfinite(l.lemma3_lhs));
    CHECK(l.rich_sectors <= static_cast<double>(build_grid(l.i, 1, 6, cfg.c2, 1).sectors.size()));
  }
  auto j = nlohmann::json::parse(to_json(a));
  CHECK(j["m"] == 64);
  CHECK(j["per_level"].size() == a.per_level.size());

  cfg.seeds.clear();
  CHECK_THROWS_AS(main_lemma_report(alt, cfg), InvalidParameter);
  cfg.seeds = {1};
  CHECK_THROWS_AS(main_lemma_report(generate(ColoringSource::alternating(), 100), cfg), RangeError);
}

TEST_CASE("vertical lines nest across levels") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    std::vector<GridSpec> grids;
    for (int i = 1; i <= 5; ++i) grids.push_back(build_grid(i, 1, 6, 1.0, seed));
    for (std::size_t a = 0; a < grids.size(); ++a) {
      for (std::size_t b = a + 1; b < grids.size(); ++b) {
        Rational diff = grids[b].v_offset_exact() - grids[a].v_offset_exact();
        Rational steps = diff / static_cast<long>(grids[a].ell);
        CHECK(steps.get_den() == 1);
      }
    }
  }
}
