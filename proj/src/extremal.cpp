#include "qdisc/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "qdisc/errors.hpp"

namespace qdisc {

std::vector<std::int64_t> APWitness::elements() const {
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(len));
  for (std::int64_t i = 0; i < len; ++i) out.push_back(base + a + i * d);
  return out;
}

namespace {

// Ordering key: larger value first, then smaller d, a, len, start.
bool preferred(const APWitness& x, const APWitness& y) {
  if (x.value() != y.value()) return x.value() > y.value();
  return std::tie(x.d, x.a, x.len, x.base) < std::tie(y.d, y.a, y.len, y.base);
}

// Best contiguous run in one residue class (elements start, start+d, ...).
std::optional<APWitness> best_in_class(const Coloring& c, std::int64_t wlo, std::int64_t whi, std::int64_t d,
                                       std::int64_t a) {
  const std::int64_t start = wlo + a;
  if (start > whi) return std::nullopt;
  const std::int64_t count = (whi - start) / d + 1;

  // For each end v, the best start for a positive run is the latest argmin of
  // the earlier prefix sums (shortest run), and symmetrically for negative runs.
  std::int64_t prefix = 0;
  std::int64_t min_prefix = 0, min_at = 0;
  std::int64_t max_prefix = 0, max_at = 0;
  std::optional<APWitness> best;
  auto consider = [&](std::int64_t sum, std::int64_t u, std::int64_t v) {
    APWitness w{a, d, v - u, wlo + u * d, sum};
    if (!best || preferred(w, *best)) best = w;
  };
  for (std::int64_t v = 1; v <= count; ++v) {
    prefix += c[start + (v - 1) * d];
    consider(prefix - min_prefix, min_at, v);
    consider(prefix - max_prefix, max_at, v);
    if (prefix <= min_prefix) {
      min_prefix = prefix;
      min_at = v;
    }
    if (prefix >= max_prefix) {
      max_prefix = prefix;
      max_at = v;
    }
  }
  return best;
}

std::optional<APWitness> best_for_difference(const Coloring& c, std::int64_t wlo, std::int64_t whi, std::int64_t d) {
  std::optional<APWitness> best;
  for (std::int64_t a = 0; a < d; ++a) {
    auto w = best_in_class(c, wlo, whi, d, a);
    if (w && (!best || preferred(*w, *best))) best = w;
  }
  return best;
}

}  // namespace

APWitness roth_search(const Coloring& c, std::int64_t wlo, std::int64_t whi, std::int64_t dmin, std::int64_t dmax,
                      unsigned threads) {
  if (wlo < 0 || wlo > whi || whi > c.n()) throw InvalidParameter("roth_search window must satisfy 0 <= wlo <= whi <= n");
  if (dmin < 1 || dmin > dmax) throw InvalidParameter("roth_search needs 1 <= dmin <= dmax");

  const auto ds = static_cast<std::size_t>(dmax - dmin + 1);
  std::vector<std::optional<APWitness>> per_d(ds);
  threads = std::max(1U, threads);
  auto work = [&](unsigned worker) {
    for (std::size_t i = worker; i < ds; i += threads) {
      per_d[i] = best_for_difference(c, wlo, whi, dmin + static_cast<std::int64_t>(i));
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  std::optional<APWitness> best;
  for (const auto& w : per_d) {
    if (w && (!best || preferred(*w, *best))) best = w;
  }
  return *best;  // the window is nonempty, so d = dmin has a class
}

Realization realize_shifted_ap(std::int64_t n, std::int64_t m, const APWitness& ap) {
  if (ap.d < 2) throw InvalidParameter("shifted AP realization needs d >= 2");
  if (ap.len < 1) throw InvalidParameter("shifted AP realization needs a nonempty AP");
  if (ap.first() < n - m || ap.last() > n) throw InvalidParameter("AP must lie in the window [n-m, n]");

  const std::int64_t d = ap.d;
  const std::int64_t e0 = ap.first();
  const std::int64_t e1 = ap.last();
  const std::int64_t j = e0 % d == 0 ? d : d - e0 % d;
  const std::int64_t s = (e0 + j) / d;
  const std::int64_t t = (e1 + j) / d;

  auto ceil_div = [](std::int64_t x, std::int64_t y) { return (x + y - 1) / y; };
  const std::int64_t scan_lo = std::max<std::int64_t>(1, ceil_div(n, j * d) - 2);
  const std::int64_t scan_hi = ceil_div(n - m, std::max<std::int64_t>(1, j - 1)) + 2;
  const auto expected = ap.elements();

  for (std::int64_t L = scan_lo; L <= scan_hi; ++L) {
    Rational alpha = make_rational(d * L - 1, L);
    if (!(alpha > 1)) continue;
    // Quick necessary conditions before the exact check: s and t inside block j.
    if (t > j * L || (j - 1) * L >= s) continue;
    QPDescriptor qp{alpha, s, t};
    if (materialize(qp) == expected) return {qp, make_rational(1, L), j};
  }
  throw ConstructionFailure("no epsilon = 1/L in [" + std::to_string(scan_lo) + ", " + std::to_string(scan_hi) +
                                "] realizes the AP (d=" + std::to_string(d) + ", block " + std::to_string(j) + ")",
                            scan_lo, scan_hi);
}

std::int64_t adversary_window(std::int64_t n) {
  if (n < 1) throw InvalidParameter("n must be positive");
  const auto target = static_cast<__int128>(n) * n;
  std::int64_t m = static_cast<std::int64_t>(std::cbrt(static_cast<double>(target) / 6.0));
  auto fits = [&](std::int64_t x) { return 6 * static_cast<__int128>(x) * x * x <= target; };
  while (m > 0 && !fits(m)) --m;
  while (fits(m + 1)) ++m;
  return m;
}

AdversaryResult adversary(const Coloring& c, std::int64_t n, unsigned threads) {
  if (n < 8) throw InvalidParameter("adversary needs n >= 8");
  if (n > c.n()) throw RangeError("n exceeds the coloring domain");
  AdversaryResult result;
  result.n = n;
  result.m = adversary_window(n);
  std::int64_t dmax = static_cast<std::int64_t>(std::sqrt(static_cast<double>(6 * result.m)));
  while (dmax * dmax > 6 * result.m) --dmax;
  while ((dmax + 1) * (dmax + 1) <= 6 * result.m) ++dmax;

  result.ap = roth_search(c, n - result.m, n, 2, dmax, threads);
  auto realization = realize_shifted_ap(n, result.m, result.ap);
  result.qp = realization.qp;
  result.epsilon = realization.epsilon;
  const std::int64_t realized = signed_sum(c, result.qp);
  if (realized != result.ap.signed_sum) {
    throw std::logic_error("realized quasi-progression sum " + std::to_string(realized) + " differs from AP sum " +
                           std::to_string(result.ap.signed_sum));
  }
  result.discrepancy = realized < 0 ? -realized : realized;
  result.bound = std::pow(static_cast<double>(n), 1.0 / 6.0) / 50.0;
  return result;
}

namespace {

nlohmann::json big_to_json(const BigInt& z) {
  if (auto v = to_int64(z)) return *v;
  return z.get_str();
}

}  // namespace

std::string to_json(const AdversaryResult& r) {
  nlohmann::ordered_json j;
  j["n"] = r.n;
  j["m"] = r.m;
  j["ap"] = {{"a", r.ap.a}, {"d", r.ap.d}, {"len", r.ap.len}, {"base", r.ap.base}, {"signed", r.ap.signed_sum}};
  j["alpha"] = {{"num", big_to_json(r.qp.alpha.get_num())}, {"den", big_to_json(r.qp.alpha.get_den())}};
  j["s"] = r.qp.s;
  j["t"] = r.qp.t;
  j["discrepancy"] = r.discrepancy;
  j["bound"] = r.bound;
  return j.dump(2) + "\n";
}

}  // namespace qdisc
