#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qdisc/coloring.hpp"
#include "qdisc/quasiprog.hpp"
#include "qdisc/rational.hpp"

namespace qdisc {

// P = base + {a, a+d, ..., a+(len-1)d}, with base - window_lo divisible by d.
struct APWitness {
  std::int64_t a = 0;
  std::int64_t d = 1;
  std::int64_t len = 0;
  std::int64_t base = 0;
  std::int64_t signed_sum = 0;

  std::int64_t value() const { return signed_sum < 0 ? -signed_sum : signed_sum; }
  std::int64_t first() const { return base + a; }
  std::int64_t last() const { return base + a + (len - 1) * d; }
  std::vector<std::int64_t> elements() const;

  friend bool operator==(const APWitness&, const APWitness&) = default;
};

// Maximum |sum| AP with difference in [dmin, dmax] inside [wlo, whi]. Ties go
// to smaller d, then smaller a, then smaller len, then the earlier start.
APWitness roth_search(const Coloring& c, std::int64_t wlo, std::int64_t whi, std::int64_t dmin, std::int64_t dmax,
                      unsigned threads = 1);

struct Realization {
  QPDescriptor qp;
  Rational epsilon;  // qp.alpha == d - epsilon
  std::int64_t block = 0;  // j with first element == -j (mod d)
};

// Realizes the AP as Q(d - 1/L; s, t) for the first L in the scan range whose
// materialization reproduces the AP exactly. Throws ConstructionFailure.
Realization realize_shifted_ap(std::int64_t n, std::int64_t m, const APWitness& ap);

// m = max{m' : 6 m'^3 <= n^2}, i.e. floor(6^(-1/3) n^(2/3)).
std::int64_t adversary_window(std::int64_t n);

struct AdversaryResult {
  std::int64_t n = 0;
  std::int64_t m = 0;
  APWitness ap;
  QPDescriptor qp;
  Rational epsilon;
  std::int64_t discrepancy = 0;
  double bound = 0.0;  // n^(1/6) / 50
};

// Throws ConstructionFailure, or std::logic_error if the realized
// quasi-progression does not carry the AP's signed sum.
AdversaryResult adversary(const Coloring& c, std::int64_t n, unsigned threads = 1);

std::string to_json(const AdversaryResult& result);

}  // namespace qdisc
