#include "qdisc/alpha_atlas.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <queue>
#include <thread>

#include "qdisc/errors.hpp"
#include "qdisc/io.hpp"

namespace qdisc {

AlphaInterval make_interval(const Rational& lo, const Rational& hi) {
  Rational rep = (lo + hi) / 2;
  rep.canonicalize();
  return {lo, hi, rep};
}

namespace {

struct Event {
  std::int64_t b;
  std::int64_t k;
};

bool value_less(const Event& x, const Event& y) {
  return static_cast<__int128>(x.b) * y.k < static_cast<__int128>(y.b) * x.k;
}

bool value_equal(const Event& x, const Event& y) {
  return static_cast<__int128>(x.b) * y.k == static_cast<__int128>(y.b) * x.k;
}

Rational to_rational(const Event& e) { return make_rational(e.b, e.k); }

void check_range(std::int64_t n, const Rational& lo, const Rational& hi) {
  if (lo < 1) throw InvalidParameter("alpha range needs lo >= 1, got " + to_string(lo));
  if (!(lo < hi)) throw InvalidParameter("alpha range needs lo < hi");
  if (n < 0) throw InvalidParameter("n must be >= 0");
  if (n >= (std::int64_t{1} << 40)) throw InvalidParameter("n too large for the breakpoint engine");
}

std::int64_t checked(const BigInt& z, const char* what) {
  auto v = to_int64(z);
  if (!v) throw RangeError(std::string(what) + " exceeds 64 bits");
  return *v;
}

// First b with b/k > lo, and the last b with b/k < hi (or <= hi when inclusive).
std::int64_t first_b_above(std::int64_t k, const Rational& lo) { return checked(floor_mul(k, lo), "breakpoint") + 1; }

std::int64_t last_b_below(std::int64_t k, const Rational& hi, bool inclusive) {
  BigInt prod = hi.get_num() * BigInt(static_cast<long>(k));
  BigInt q;
  if (inclusive) {
    mpz_fdiv_q(q.get_mpz_t(), prod.get_mpz_t(), hi.get_den_mpz_t());
  } else {
    mpz_cdiv_q(q.get_mpz_t(), prod.get_mpz_t(), hi.get_den_mpz_t());
    q -= 1;
  }
  return checked(q, "breakpoint");
}

std::vector<Event> sorted_unique(std::vector<Event> events) {
  for (auto& e : events) {
    auto g = std::gcd(e.b, e.k);
    e.b /= g;
    e.k /= g;
  }
  std::sort(events.begin(), events.end(), value_less);
  events.erase(std::unique(events.begin(), events.end(), value_equal), events.end());
  return events;
}

// Segment tree over term positions 1..size storing, per node, the sum of the
// weights and the extreme prefix sums with the first index attaining each.
class PrefixTree {
 public:
  struct Node {
    std::int64_t sum = 0;
    std::int64_t max_prefix = 0;
    std::int64_t min_prefix = 0;
    std::int64_t arg_max = 0;
    std::int64_t arg_min = 0;
  };

  explicit PrefixTree(const std::vector<std::int64_t>& weights) : size_(static_cast<std::int64_t>(weights.size())) {
    leaves_ = 1;
    while (leaves_ < std::max<std::int64_t>(size_, 1)) leaves_ *= 2;
    nodes_.assign(static_cast<std::size_t>(2 * leaves_), Node{});
    for (std::int64_t p = 0; p < leaves_; ++p) {
      std::int64_t w = p < size_ ? weights[p] : 0;
      nodes_[leaves_ + p] = leaf(p + 1, w);
    }
    for (std::int64_t i = leaves_ - 1; i >= 1; --i) nodes_[i] = combine(nodes_[2 * i], nodes_[2 * i + 1]);
  }

  void set(std::int64_t position, std::int64_t weight) {
    std::int64_t i = leaves_ + position - 1;
    nodes_[i] = leaf(position, weight);
    for (i /= 2; i >= 1; i /= 2) nodes_[i] = combine(nodes_[2 * i], nodes_[2 * i + 1]);
  }

  const Node& root() const { return nodes_[1]; }

 private:
  static Node leaf(std::int64_t position, std::int64_t w) { return {w, w, w, position, position}; }

  // Ties keep the left (earlier) index.
  static Node combine(const Node& l, const Node& r) {
    Node out;
    out.sum = l.sum + r.sum;
    if (l.max_prefix >= l.sum + r.max_prefix) {
      out.max_prefix = l.max_prefix;
      out.arg_max = l.arg_max;
    } else {
      out.max_prefix = l.sum + r.max_prefix;
      out.arg_max = r.arg_max;
    }
    if (l.min_prefix <= l.sum + r.min_prefix) {
      out.min_prefix = l.min_prefix;
      out.arg_min = l.arg_min;
    } else {
      out.min_prefix = l.sum + r.min_prefix;
      out.arg_min = r.arg_min;
    }
    return out;
  }

  std::int64_t size_;
  std::int64_t leaves_;
  std::vector<Node> nodes_;
};

// Mirrors witness_from_prefix_sums, reading the extremes off the tree root.
// Padding beyond the active terms carries weight zero, so first occurrences
// never land there.
DiscrepancyWitness witness_from_root(const PrefixTree::Node& root, std::int64_t active, Mode mode) {
  if (active <= 0) return {};
  if (mode == Mode::window) {
    std::int64_t hi = 0, hi_at = 0, lo = 0, lo_at = 0;
    if (root.max_prefix > 0) {
      hi = root.max_prefix;
      hi_at = root.arg_max;
    }
    if (root.min_prefix < 0) {
      lo = root.min_prefix;
      lo_at = root.arg_min;
    }
    std::int64_t value = hi - lo;
    if (value == 0) return {0, 1, 1, 0};
    std::int64_t u = std::min(hi_at, lo_at);
    std::int64_t v = std::max(hi_at, lo_at);
    std::int64_t signed_value = v == hi_at ? hi - lo : lo - hi;
    return {value, u + 1, v, signed_value};
  }
  std::int64_t up = root.max_prefix;
  std::int64_t down = -root.min_prefix;
  if (up > down) return {up, 1, root.arg_max, root.max_prefix};
  if (down > up) return {down, 1, root.arg_min, root.min_prefix};
  std::int64_t at = std::min(root.arg_max, root.arg_min);
  return {up, 1, at, at == root.arg_max ? root.max_prefix : root.min_prefix};
}

using IntervalSink = std::function<void(const Rational& lo, const Rational& hi, const DiscrepancyWitness& w)>;

// Sweeps [start, stop) where start is lo or an event value and stop is hi or an
// event value. Calls sink once per maximal constant interval, in order.
void sweep_range(const Coloring& c, std::int64_t n, const Rational& start, const Rational& stop, Mode mode,
                 const IntervalSink& sink) {
  const std::int64_t terms = term_count(start, n);
  std::vector<std::int64_t> current(static_cast<std::size_t>(terms));
  std::vector<std::int64_t> weights(static_cast<std::size_t>(terms));
  std::vector<std::int64_t> last_b(static_cast<std::size_t>(terms));
  for (std::int64_t k = 1; k <= terms; ++k) {
    current[k - 1] = checked(floor_mul(k, start), "term");
    weights[k - 1] = c[current[k - 1]];
    last_b[k - 1] = std::min(n + 1, last_b_below(k, stop, false));
  }
  PrefixTree tree(weights);
  std::int64_t active = terms;

  auto later = [](const Event& x, const Event& y) { return value_less(y, x); };
  std::priority_queue<Event, std::vector<Event>, decltype(later)> heap(later);
  for (std::int64_t k = 1; k <= terms; ++k) {
    std::int64_t b = current[k - 1] + 1;
    if (b <= last_b[k - 1]) heap.push({b, k});
  }

  Rational interval_lo = start;
  while (!heap.empty()) {
    const Event top = heap.top();
    Rational boundary = to_rational(top);
    sink(interval_lo, boundary, witness_from_root(tree.root(), active, mode));
    while (!heap.empty() && value_equal(heap.top(), top)) {
      Event e = heap.top();
      heap.pop();
      current[e.k - 1] = e.b;
      if (e.b <= n) {
        tree.set(e.k, c[e.b]);
      } else {
        tree.set(e.k, 0);
        --active;
      }
      if (e.b + 1 <= last_b[e.k - 1]) heap.push({e.b + 1, e.k});
    }
    interval_lo = std::move(boundary);
  }
  sink(interval_lo, stop, witness_from_root(tree.root(), active, mode));
}

// Smallest event value >= x inside (lo, hi), if any.
std::optional<Event> next_event_at_or_after(std::int64_t n, const Rational& lo, const Rational& hi,
                                            const Rational& x) {
  const std::int64_t terms = term_count(lo, n);
  std::optional<Event> best;
  for (std::int64_t k = 1; k <= terms; ++k) {
    std::int64_t b = std::max(checked(ceil_of(x * k), "split"), first_b_above(k, lo));
    if (b > n + 1) continue;
    Event e{b, k};
    if (!(to_rational(e) < hi)) continue;
    if (!best || value_less(e, *best)) best = e;
  }
  return best;
}

// Splits [lo, hi) at event values so that the per-interval output does not
// depend on the number of pieces.
std::vector<Rational> split_points(std::int64_t n, const Rational& lo, const Rational& hi, unsigned pieces) {
  std::vector<Rational> cuts{lo};
  for (unsigned i = 1; i < pieces; ++i) {
    Rational target = lo + (hi - lo) * Rational(i, pieces);
    target.canonicalize();
    auto e = next_event_at_or_after(n, lo, hi, target);
    if (!e) break;
    Rational cut = to_rational(*e);
    if (cut > cuts.back()) cuts.push_back(cut);
  }
  cuts.push_back(hi);
  return cuts;
}

struct RangeOutcome {
  std::vector<AtlasRow> rows;
  std::optional<AtlasRow> best;
};

bool better(const DiscrepancyWitness& candidate, const std::optional<AtlasRow>& incumbent) {
  return !incumbent || candidate.value > incumbent->witness.value;
}

template <typename Job>
void run_jobs(std::size_t count, unsigned threads, Job&& job) {
  threads = std::max(1U, threads);
  if (threads == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < std::min<std::size_t>(threads, count); ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += threads) job(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

std::vector<Rational> breakpoints(std::int64_t n, const Rational& lo, const Rational& hi) {
  check_range(n, lo, hi);
  const std::int64_t terms = term_count(lo, n);
  std::vector<Event> events;
  for (std::int64_t k = 1; k <= terms; ++k) {
    const std::int64_t first = first_b_above(k, lo);
    const std::int64_t last = last_b_below(k, hi, true);
    for (std::int64_t b = first; b <= last; ++b) events.push_back({b, k});
  }
  std::vector<Rational> out;
  for (const auto& e : sorted_unique(std::move(events))) out.push_back(to_rational(e));
  return out;
}

std::vector<Rational> effective_breakpoints(std::int64_t n, const Rational& lo, const Rational& hi) {
  std::vector<Rational> out;
  for (auto& b : breakpoints(n, lo, hi)) {
    if (b < hi && b.get_num() <= n + 1) out.push_back(std::move(b));
  }
  return out;
}

AtlasResult sweep(const Coloring& c, std::int64_t n, const Rational& lo, const Rational& hi, Mode mode,
                  const SweepOptions& options) {
  check_range(n, lo, hi);
  if (n > c.n()) throw RangeError("n exceeds the coloring domain");
  const unsigned pieces = std::max(1U, options.threads);
  const auto cuts = split_points(n, lo, hi, pieces);
  std::vector<RangeOutcome> outcomes(cuts.size() - 1);
  run_jobs(outcomes.size(), options.threads, [&](std::size_t i) {
    auto& out = outcomes[i];
    sweep_range(c, n, cuts[i], cuts[i + 1], mode, [&](const Rational& a, const Rational& b, const DiscrepancyWitness& w) {
      if (options.keep_table) out.rows.push_back({make_interval(a, b), w});
      if (better(w, out.best)) out.best = AtlasRow{make_interval(a, b), w};
    });
  });

  AtlasResult result;
  std::optional<AtlasRow> best;
  for (auto& out : outcomes) {
    if (out.best && better(out.best->witness, best)) best = out.best;
    for (auto& row : out.rows) result.table.push_back(std::move(row));
  }
  result.global = best->witness;
  result.arg_interval = best->interval;
  return result;
}

AtlasResult sweep_naive(const Coloring& c, std::int64_t n, const Rational& lo, const Rational& hi, Mode mode) {
  check_range(n, lo, hi);
  if (n > c.n()) throw RangeError("n exceeds the coloring domain");
  std::vector<Rational> edges{lo};
  for (auto& b : effective_breakpoints(n, lo, hi)) edges.push_back(std::move(b));
  edges.push_back(hi);
  AtlasResult result;
  std::optional<AtlasRow> best;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    AtlasRow row{make_interval(edges[i], edges[i + 1]), {}};
    row.witness = max_discrepancy(c, row.interval.rep, n, mode);
    if (better(row.witness, best)) best = row;
    result.table.push_back(std::move(row));
  }
  result.global = best->witness;
  result.arg_interval = best->interval;
  return result;
}

std::vector<AlphaInterval> balanced_intervals(const Coloring& c, std::int64_t n, std::int64_t M, const Rational& lo,
                                              const Rational& hi, unsigned threads) {
  if (M < 0) throw InvalidParameter("balance threshold M must be >= 0");
  check_range(n, lo, hi);
  if (n > c.n()) throw RangeError("n exceeds the coloring domain");
  const auto cuts = split_points(n, lo, hi, std::max(1U, threads));
  std::vector<std::vector<AlphaInterval>> parts(cuts.size() - 1);
  run_jobs(parts.size(), threads, [&](std::size_t i) {
    auto& out = parts[i];
    sweep_range(c, n, cuts[i], cuts[i + 1], Mode::prefix,
                [&](const Rational& a, const Rational& b, const DiscrepancyWitness& w) {
                  if (w.value > M) return;
                  if (!out.empty() && out.back().hi == a) {
                    out.back().hi = b;
                  } else {
                    out.push_back({a, b, {}});
                  }
                });
  });
  std::vector<AlphaInterval> merged;
  for (auto& part : parts) {
    for (auto& iv : part) {
      if (!merged.empty() && merged.back().hi == iv.lo) {
        merged.back().hi = iv.hi;
      } else {
        merged.push_back(std::move(iv));
      }
    }
  }
  for (auto& iv : merged) iv = make_interval(iv.lo, iv.hi);
  return merged;
}

Rational balanced_measure(const Coloring& c, std::int64_t n, std::int64_t M, const Rational& lo, const Rational& hi,
                          unsigned threads) {
  Rational total = 0;
  for (const auto& iv : balanced_intervals(c, n, M, lo, hi, threads)) total += iv.hi - iv.lo;
  total.canonicalize();
  return total;
}

Rational measure_within(const std::vector<AlphaInterval>& intervals, const Rational& lo, const Rational& hi) {
  Rational total = 0;
  auto it = std::lower_bound(intervals.begin(), intervals.end(), lo,
                             [](const AlphaInterval& iv, const Rational& x) { return iv.hi <= x; });
  for (; it != intervals.end() && it->lo < hi; ++it) {
    const Rational& a = it->lo > lo ? it->lo : lo;
    const Rational& b = it->hi < hi ? it->hi : hi;
    if (a < b) total += b - a;
  }
  total.canonicalize();
  return total;
}

std::string sweep_table_csv(const AtlasResult& result) {
  CsvWriter csv({"alpha_lo_num", "alpha_lo_den", "alpha_hi_num", "alpha_hi_den", "value", "s", "t"});
  for (const auto& row : result.table) {
    csv.add_row({to_string(row.interval.lo.get_num()), to_string(row.interval.lo.get_den()),
                 to_string(row.interval.hi.get_num()), to_string(row.interval.hi.get_den()),
                 std::to_string(row.witness.value), std::to_string(row.witness.s), std::to_string(row.witness.t)});
  }
  return csv.str();
}

std::vector<GrowthRow> growth_experiment(const GrowthConfig& config) {
  if (config.slope_base < 1) throw InvalidParameter("slope window must start at t0 >= 1");
  for (std::size_t i = 1; i < config.ns.size(); ++i) {
    if (config.ns[i] <= config.ns[i - 1]) throw InvalidParameter("n list must be strictly ascending");
  }
  const Rational lo = config.slope_base;
  const Rational hi = config.slope_base + 1;
  std::vector<GrowthRow> rows;
  for (std::int64_t n : config.ns) {
    if (n < 2) throw InvalidParameter("growth experiment needs n >= 2");
    auto c = generate(config.family, n);
    GrowthRow row;
    row.n = n;
    row.reference = std::pow(std::log(static_cast<double>(n)), 0.25);
    row.threshold = static_cast<std::int64_t>(std::floor(config.threshold_scale * row.reference));
    row.balanced_fraction = balanced_measure(c, n, row.threshold, lo, hi, config.threads);
    SweepOptions options{config.threads, false};
    row.global_max = sweep(c, n, lo, hi, Mode::window, options).global.value;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string growth_csv(const std::vector<GrowthRow>& rows) {
  CsvWriter csv({"n", "threshold", "balanced_fraction_num", "balanced_fraction_den", "balanced_fraction",
                 "global_max", "reference"});
  for (const auto& r : rows) {
    csv.add_row({std::to_string(r.n), std::to_string(r.threshold), to_string(r.balanced_fraction.get_num()),
                 to_string(r.balanced_fraction.get_den()), format_double(r.balanced_fraction.get_d()),
                 std::to_string(r.global_max), format_double(r.reference)});
  }
  return csv.str();
}

}  // namespace qdisc
