#include <doctest.h>

#include <cmath>
#include <random>

#include <json.hpp>

#include "oracles.hpp"
#include "qdisc/errors.hpp"
#include "qdisc/extremal.hpp"

using namespace qdisc;

TEST_CASE("roth_search examples") {
  auto alt = generate(ColoringSource::alternating(), 10);
  auto w = roth_search(alt, 0, 10, 2, 2);
  CHECK(w.a == 0);
  CHECK(w.len == 6);
  CHECK(w.value() == 6);

  auto cst = generate(ColoringSource::constant(1), 55);
  w = roth_search(cst, 0, 55, 2, 7);
  CHECK(w.d == 2);
  CHECK(w.a == 0);
  CHECK(w.len == 28);
  CHECK(w.value() == 28);

  auto rnd = generate(ColoringSource::random(11), 100);
  CHECK(roth_search(rnd, 0, 100, 2, 10) == oracle::roth(rnd, 0, 100, 2, 10));
  CHECK_THROWS_AS(roth_search(rnd, 50, 40, 2, 3), InvalidParameter);
  CHECK_THROWS_AS(roth_search(rnd, 0, 101, 2, 3), InvalidParameter);
  CHECK_THROWS_AS(roth_search(rnd, 0, 100, 0, 3), InvalidParameter);
}

TEST_CASE("roth_search agrees with the exhaustive oracle") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 150; ++trial) {
    std::int64_t n = 10 + static_cast<std::int64_t>(rng() % 120);
    auto c = generate(trial % 4 == 0 ? ColoringSource::base3() : ColoringSource::random(rng()), n);
    std::int64_t wlo = static_cast<std::int64_t>(rng() % (n / 2));
    std::int64_t whi = n - static_cast<std::int64_t>(rng() % 3);
    std::int64_t dmin = 1 + static_cast<std::int64_t>(rng() % 3);
    std::int64_t dmax = dmin + static_cast<std::int64_t>(rng() % 9);
    auto expect = oracle::roth(c, wlo, whi, dmin, dmax);
    INFO("n=" << n << " window=[" << wlo << "," << whi << "] d=[" << dmin << "," << dmax << "]");
    REQUIRE(roth_search(c, wlo, whi, dmin, dmax, 1 + trial % 4) == expect);
  }
}

TEST_CASE("AP witness helpers") {
  APWitness w{1, 3, 4, 10, 2};
  CHECK(w.first() == 11);
  CHECK(w.last() == 20);
  CHECK(w.elements() == std::vector<std::int64_t>{11, 14, 17, 20});
  APWitness neg{0, 2, 1, 0, -3};
  CHECK(neg.value() == 3);
}

TEST_CASE("adversary window size") {
  CHECK(adversary_window(1000) == 55);
  for (std::int64_t n : {8, 27, 100, 999, 1000, 1001, 10000, 100000, 1000000}) {
    std::int64_t m = adversary_window(n);
    CHECK(6 * m * m * m <= n * n);
    CHECK(6 * (m + 1) * (m + 1) * (m + 1) > n * n);
  }
}

TEST_CASE("realize_shifted_ap") {
  // {945, 947, ..., 999}
  APWitness ap{0, 2, 28, 945, 0};
  auto r = realize_shifted_ap(1000, 55, ap);
  CHECK(materialize(r.qp) == ap.elements());
  CHECK(r.qp.s == 473);
  CHECK(r.qp.t == 500);
  CHECK(r.block == 1);
  CHECK(r.qp.alpha == 2 - r.epsilon);
  CHECK(r.qp.alpha > 1);
  CHECK(r.epsilon.get_num() == 1);
  // the scan accepts the first L that works; a larger one must also work
  CHECK(materialize({make_rational(1999, 1000), 473, 500}) == ap.elements());
  for (std::int64_t L = 1; L < r.epsilon.get_den().get_si(); ++L) {
    CHECK(materialize({make_rational(2 * L - 1, L), 473, 500}) != ap.elements());
  }

  APWitness single{0, 2, 1, 19, 0};
  r = realize_shifted_ap(20, 4, single);
  CHECK(materialize(r.qp) == std::vector<std::int64_t>{19});
  const auto L = r.epsilon.get_den().get_si();
  for (std::int64_t smaller = 1; smaller < L; ++smaller) {
    Rational alpha = make_rational(2 * smaller - 1, smaller);
    if (alpha > 1) CHECK(materialize({alpha, r.qp.s, r.qp.t}) != std::vector<std::int64_t>{19});
  }

  CHECK_THROWS_AS(realize_shifted_ap(20, 4, APWitness{0, 1, 2, 18, 0}), InvalidParameter);
  CHECK_THROWS_AS(realize_shifted_ap(20, 4, APWitness{0, 2, 2, 10, 0}), InvalidParameter);
}

TEST_CASE("realization over every AP in small windows") {
  for (std::int64_t n : {30, 200, 1000}) {
    std::int64_t m = adversary_window(n);
    std::int64_t dmax = static_cast<std::int64_t>(std::sqrt(6.0 * m));
    int ok = 0, failed = 0;
    for (std::int64_t d = 2; d <= dmax; ++d) {
      for (std::int64_t e0 = n - m; e0 <= n; ++e0) {
        for (std::int64_t len = 1; e0 + (len - 1) * d <= n; ++len) {
          APWitness ap{(e0 - (n - m)) % d, d, len, e0 - (e0 - (n - m)) % d, 0};
          try {
            auto r = realize_shifted_ap(n, m, ap);
            REQUIRE(materialize(r.qp) == ap.elements());
            REQUIRE(r.qp.alpha > 1);
            REQUIRE(r.qp.alpha < d);
            ++ok;
          } catch (const ConstructionFailure& e) {
            CHECK(e.scan_lo() <= e.scan_hi());
            ++failed;
          }
        }
      }
    }
    MESSAGE("n=" << n << " realized " << ok << " APs, " << failed << " not realizable by d - 1/L");
    CHECK(ok > 0);
  }
}

TEST_CASE("adversary") {
  auto cst = generate(ColoringSource::constant(1), 1000);
  auto res = adversary(cst, 1000);
  CHECK(res.m == 55);
  CHECK(res.ap.value() == 28);
  CHECK(res.ap.d == 2);
  CHECK(res.ap.first() == 945);
  CHECK(res.qp.s == 473);
  CHECK(res.qp.t == 500);
  CHECK(materialize(res.qp) == res.ap.elements());
  CHECK(res.bound == doctest::Approx(std::pow(1000.0, 1.0 / 6.0) / 50));
  CHECK(res.discrepancy == 28);

  auto alt = generate(ColoringSource::alternating(), 10000);
  auto ra = adversary(alt, 10000);
  CHECK(static_cast<double>(ra.discrepancy) >= ra.bound);
  CHECK(ra.discrepancy >= 1);

  auto json = nlohmann::json::parse(to_json(res));
  CHECK(json["n"] == 1000);
  CHECK(json["m"] == 55);
  CHECK(json["ap"]["len"] == 28);
  CHECK(json["discrepancy"] == 28);
  CHECK(json["s"] == 473);

  CHECK_THROWS_AS(adversary(cst, 1001), RangeError);
  CHECK_THROWS_AS(adversary(cst, 7), InvalidParameter);
}
