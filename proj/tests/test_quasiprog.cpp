#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "qdisc/errors.hpp"
#include "qdisc/quasiprog.hpp"

using namespace qdisc;

TEST_CASE("materialize") {
  CHECK(materialize({make_rational(3, 2), 1, 5}) == std::vector<std::int64_t>{1, 3, 4, 6, 7});
  CHECK(materialize({make_rational(2), 1, 4}) == std::vector<std::int64_t>{2, 4, 6, 8});
  CHECK(materialize({make_rational(1999, 1000), 473, 475}) == std::vector<std::int64_t>{945, 947, 949});
  CHECK_THROWS_AS(materialize({make_rational(5, 3), 4, 3}), InvalidParameter);
  CHECK_THROWS_AS(materialize({make_rational(1, 2), 1, 3}), InvalidParameter);
  CHECK_THROWS_AS(materialize({make_rational(2), -1, 3}), InvalidParameter);
}

TEST_CASE("materialize agrees with direct floors for huge rationals") {
  Rational alpha(BigInt("100000000000000000003"), BigInt("70000000000000000001"));
  auto got = materialize({alpha, 10, 30});
  for (std::int64_t k = 10; k <= 30; ++k) CHECK(got[k - 10] == floor_of(alpha * k).get_si());
}

TEST_CASE("signed_sum") {
  auto cst = generate(ColoringSource::constant(1), 20);
  auto alt = generate(ColoringSource::alternating(), 20);
  auto leg = generate(ColoringSource::legendre(3), 20);
  CHECK(signed_sum(cst, {make_rational(2), 1, 4}) == 4);
  CHECK(signed_sum(alt, {make_rational(1), 0, 9}) == 0);
  CHECK(signed_sum(leg, {make_rational(3), 1, 5}) == 0);
  CHECK_THROWS_AS(signed_sum(cst, {make_rational(2), 1, 11}), RangeError);
}

TEST_CASE("term_count") {
  CHECK(term_count(make_rational(2), 10) == 5);
  CHECK(term_count(make_rational(3, 2), 5) == 3);  // 1, 3, 4
  CHECK(term_count(make_rational(1), 0) == 0);
  CHECK(term_count(make_rational(7), 6) == 0);
  for (std::int64_t n : {0, 1, 7, 40}) {
    for (auto [p, q] : {std::pair{7, 5}, {3, 2}, {13, 4}, {1, 1}}) {
      CHECK(term_count(make_rational(p, q), n) == static_cast<std::int64_t>(oracle::terms(p, q, n).size()));
    }
  }
}

TEST_CASE("max_discrepancy examples") {
  auto alt = generate(ColoringSource::alternating(), 10);
  auto w = max_discrepancy(alt, make_rational(2), 10, Mode::window);
  CHECK(w.value == 5);
  CHECK(w.s == 1);
  CHECK(w.t == 5);
  CHECK(max_discrepancy(alt, make_rational(1), 10, Mode::window).value == 1);
  CHECK_THROWS_AS(max_discrepancy(alt, make_rational(1, 2), 10, Mode::window), InvalidParameter);

  auto rnd = generate(ColoringSource::random(1), 40);
  auto elems = oracle::terms(7, 5, 40);
  CHECK(max_discrepancy(rnd, make_rational(7, 5), 40, Mode::window) == oracle::exhaustive(rnd, elems, Mode::window));
}

TEST_CASE("empty and all-zero cases") {
  auto zero = generate(ColoringSource::constant(0), 5);
  auto w = max_discrepancy(zero, make_rational(7), 5, Mode::window);
  CHECK(w == DiscrepancyWitness{0, 1, 0, 0});
  auto elems = oracle::terms(3, 2, 5);
  CHECK(max_discrepancy(zero, make_rational(3, 2), 5, Mode::window) == oracle::exhaustive(zero, elems, Mode::window));
  CHECK(max_discrepancy(zero, make_rational(3, 2), 5, Mode::prefix) == oracle::exhaustive(zero, elems, Mode::prefix));
}

TEST_CASE("max_discrepancy matches exhaustive search, witnesses included") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    std::int64_t n = 1 + static_cast<std::int64_t>(rng() % 60);
    auto c = generate(trial % 3 == 0 ? ColoringSource::legendre(5) : ColoringSource::random(rng()), n);
    std::int64_t q = 1 + static_cast<std::int64_t>(rng() % 12);
    std::int64_t p = q + static_cast<std::int64_t>(rng() % (3 * q));
    auto elems = oracle::terms(p, q, n);
    for (auto mode : {Mode::window, Mode::prefix}) {
      INFO("n=" << n << " alpha=" << p << "/" << q);
      REQUIRE(max_discrepancy(c, make_rational(p, q), n, mode) == oracle::exhaustive(c, elems, mode));
    }
  }
}

TEST_CASE("point_discrepancy") {
  auto cst = generate(ColoringSource::constant(1), 20);
  auto alt = generate(ColoringSource::alternating(), 20);
  auto leg = generate(ColoringSource::legendre(3), 20);
  CHECK(point_discrepancy(cst, make_rational(5), make_rational(5)) == 5);
  CHECK(point_discrepancy(alt, make_rational(4), make_rational(8)) == 4);
  CHECK(point_discrepancy(leg, make_rational(6), make_rational(9)) == 3);
  CHECK(point_discrepancy(leg, 6.0, 9.0) == 3);
  CHECK(point_discrepancy(cst, make_rational(1, 2), make_rational(3)) == 0);
  CHECK_THROWS_AS(point_discrepancy(cst, make_rational(10), make_rational(30)), RangeError);

  // equals the prefix sum at slope alpha
  auto rnd = generate(ColoringSource::random(5), 200);
  Rational alpha = make_rational(17, 7);
  auto elems = oracle::terms(17, 7, 200);
  std::int64_t sum = 0;
  for (std::size_t k = 1; k <= elems.size(); ++k) {
    sum += rnd[elems[k - 1]];
    Rational x(static_cast<long>(k));
    CHECK(point_discrepancy(rnd, x, alpha * x) == sum);
  }
}

TEST_CASE("mode names") {
  CHECK(parse_mode("window") == Mode::window);
  CHECK(parse_mode("prefix") == Mode::prefix);
  CHECK(to_string(Mode::prefix) == "prefix");
  CHECK_THROWS_AS(parse_mode("both"), InvalidParameter);
}
