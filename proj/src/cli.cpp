#include "qdisc/cli.hpp"

#include <cstdlib>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "qdisc/alpha_atlas.hpp"
#include "qdisc/coloring.hpp"
#include "qdisc/equidist.hpp"
#include "qdisc/errors.hpp"
#include "qdisc/extremal.hpp"
#include "qdisc/gridlab.hpp"
#include "qdisc/io.hpp"
#include "qdisc/quasiprog.hpp"

namespace qdisc {

namespace {

// Raised when a computed result violates a checked invariant (exit code 1).
class InvariantFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::int64_t> parse_int_list(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      throw InvalidParameter("bad integer '" + item + "' in list");
    }
    if (used != item.size()) throw InvalidParameter("bad integer '" + item + "' in list");
    out.push_back(v);
  }
  if (out.empty()) throw InvalidParameter("empty integer list");
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidParameter(what);
}

std::uint64_t require_seed(const RunConfig& cfg, const std::string& command) {
  if (!cfg.seed) throw InvalidParameter(command + " is randomized and needs --seed");
  return *cfg.seed;
}

ColoringSource source_from(const RunConfig& cfg, const std::string& command) {
  const auto& k = cfg.kind;
  if (k == "base3") return ColoringSource::base3();
  if (k == "base3_star") return ColoringSource::base3_star();
  if (k == "legendre") return ColoringSource::legendre(cfg.p);
  if (k == "random") return ColoringSource::random(require_seed(cfg, command));
  if (k == "constant") return ColoringSource::constant(cfg.value);
  if (k == "alternating") return ColoringSource::alternating();
  throw InvalidParameter("unknown coloring kind '" + k + "'");
}

void emit(const RunConfig& cfg, const std::string& contents, std::ostream& out) {
  if (cfg.output.empty()) {
    out << contents;
  } else {
    write_file_atomic(cfg.output, contents);
  }
}

PointSet point_set_from(const RunConfig& cfg) {
  if (!cfg.bs.empty()) return PointSet(parse_int_list(cfg.bs));
  require(cfg.q >= 1, "equidist needs --bs or --q");
  return PointSet::range(cfg.q);
}

std::vector<Rational> alphas_from(const RunConfig& cfg) {
  require(!cfg.alphas.empty(), "equidist needs at least one --alpha");
  std::vector<Rational> out;
  for (const auto& a : cfg.alphas) out.push_back(parse_rational(a));
  return out;
}

int cmd_coloring_gen(const RunConfig& cfg, std::ostream& out) {
  require(!cfg.output.empty(), "coloring gen needs --out");
  auto c = generate(source_from(cfg, "coloring gen"), cfg.n);
  if (cfg.density) c = apply_density_mask(c, *cfg.density, require_seed(cfg, "density masking"));
  save_file(c, cfg.output);
  out << "wrote " << c.values().size() << " symbols (" << c.source().describe() << ")\n";
  return 0;
}

int cmd_coloring_stats(const RunConfig& cfg, std::ostream& out) {
  auto c = load_file(cfg.input);
  auto st = stats(c);
  nlohmann::ordered_json j;
  j["n"] = c.n();
  j["density"] = to_string(st.density);
  j["density_value"] = st.density.get_d();
  j["switch_count"] = st.switch_count;
  emit(cfg, j.dump(2) + "\n", out);
  return 0;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  require(!cfg.output.empty(), "sweep needs --out");
  auto c = load_file(cfg.input);
  auto lo = parse_rational(cfg.alpha_lo);
  auto hi = parse_rational(cfg.alpha_hi);
  auto result = sweep(c, cfg.n, lo, hi, parse_mode(cfg.mode), {cfg.threads, true});
  write_file_atomic(cfg.output, sweep_table_csv(result));
  out << "global_max=" << result.global.value << " alpha_lo=" << to_string(result.arg_interval.lo)
      << " alpha_hi=" << to_string(result.arg_interval.hi) << " rep=" << to_string(result.arg_interval.rep)
      << " s=" << result.global.s << " t=" << result.global.t << " intervals=" << result.table.size() << "\n";
  return 0;
}

int cmd_adversary(const RunConfig& cfg, std::ostream& out) {
  require(!cfg.output.empty(), "adversary needs --out");
  auto c = load_file(cfg.input);
  AdversaryResult result;
  try {
    result = adversary(c, cfg.n, cfg.threads);
  } catch (const ConstructionFailure& e) {
    throw InvariantFailure(std::string("shifted AP realization: ") + e.what());
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const InvalidParameter*>(&e) != nullptr) throw;
    throw InvariantFailure(std::string("discrepancy transfer: ") + e.what());
  }
  if (materialize(result.qp) != result.ap.elements()) throw InvariantFailure("materialized Q(alpha;s,t) != AP");
  if (static_cast<double>(result.discrepancy) < result.bound) throw InvariantFailure("discrepancy below n^(1/6)/50");
  write_file_atomic(cfg.output, to_json(result));
  out << "m=" << result.m << " d=" << result.ap.d << " len=" << result.ap.len
      << " alpha=" << to_string(result.qp.alpha) << " s=" << result.qp.s << " t=" << result.qp.t
      << " discrepancy=" << result.discrepancy << " bound=" << format_double(result.bound) << "\n";
  return 0;
}

int cmd_equidist(const RunConfig& cfg, const std::string& which, std::ostream& out) {
  auto ps = point_set_from(cfg);
  if (which == "count") {
    TargetInterval J{parse_rational(cfg.offset), parse_rational(cfg.length)};
    CsvWriter csv({"alpha", "hits", "q"});
    for (const auto& a : alphas_from(cfg)) {
      csv.add_row({to_string(a), std::to_string(count_hits(ps, a, J)), std::to_string(ps.size())});
    }
    emit(cfg, csv.str(), out);
  } else if (which == "delta") {
    CsvWriter csv({"alpha", "delta_num", "delta_den", "delta"});
    for (const auto& a : alphas_from(cfg)) {
      auto d = extreme_discrepancy(ps, a);
      csv.add_row({to_string(a), to_string(d.get_num()), to_string(d.get_den()), format_double(d.get_d())});
    }
    emit(cfg, csv.str(), out);
  } else if (which == "parseval") {
    emit(cfg, moments_csv(exp_sum_moments(ps, cfg.nmax, cfg.grid)), out);
  } else if (which == "leveque") {
    CsvWriter csv({"alpha", "lhs", "rhs_upper", "holds"});
    bool all = true;
    for (const auto& a : alphas_from(cfg)) {
      auto chk = leveque_check(ps, a, cfg.trunc);
      all = all && chk.holds;
      csv.add_row({to_string(a), format_double(chk.lhs), format_double(chk.rhs_upper), chk.holds ? "1" : "0"});
    }
    emit(cfg, csv.str(), out);
    if (!all) throw InvariantFailure("LeVeque inequality violated");
  } else if (which == "lemma2") {
    TargetInterval J{parse_rational(cfg.offset), parse_rational(cfg.length)};
    auto res = lemma2_experiment(ps, J, cfg.samples, require_seed(cfg, "equidist lemma2"), cfg.threads);
    CsvWriter csv({"q", "lambda", "samples", "successes", "fraction", "bound", "hypothesis_met"});
    csv.add_row({std::to_string(ps.size()), to_string(J.length), std::to_string(res.samples),
                 std::to_string(res.successes), format_double(res.fraction), format_double(res.bound),
                 res.hypothesis_met ? "1" : "0"});
    emit(cfg, csv.str(), out);
  } else {
    throw InvalidParameter("unknown equidist command '" + which + "'");
  }
  return 0;
}

int cmd_gridlab_report(const RunConfig& cfg, std::ostream& out) {
  require(!cfg.seeds.empty(), "gridlab report is randomized and needs --seeds");
  auto c = load_file(cfg.input);
  ReportConfig rc;
  rc.t_slope = cfg.t_slope;
  rc.u = cfg.u;
  rc.delta = cfg.delta;
  rc.rho = cfg.rho;
  rc.c2 = cfg.c2;
  rc.M = cfg.M;
  rc.seeds = cfg.seeds;
  rc.samples = cfg.samples;
  rc.threads = cfg.threads;
  auto report = main_lemma_report(c, rc);
  emit(cfg, to_json(report), out);
  if (!cfg.csv_output.empty()) write_file_atomic(cfg.csv_output, to_csv(report));
  return 0;
}

int cmd_growth(const RunConfig& cfg, std::ostream& out) {
  GrowthConfig gc;
  gc.family = source_from(cfg, "growth");
  gc.ns = parse_int_list(cfg.ns);
  gc.slope_base = parse_rational(cfg.t0);
  gc.threshold_scale = cfg.scale;
  gc.threads = cfg.threads;
  emit(cfg, growth_csv(growth_experiment(gc)), out);
  return 0;
}

unsigned default_threads() {
  if (const char* env = std::getenv("QDISC_THREADS")) {
    try {
      long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const auto& cmd = cfg.command;
    require(!cmd.empty(), "missing command");
    if (cmd[0] == "coloring" && cmd.size() == 2 && cmd[1] == "gen") return cmd_coloring_gen(cfg, out);
    if (cmd[0] == "coloring" && cmd.size() == 2 && cmd[1] == "stats") return cmd_coloring_stats(cfg, out);
    if (cmd[0] == "sweep") return cmd_sweep(cfg, out);
    if (cmd[0] == "adversary") return cmd_adversary(cfg, out);
    if (cmd[0] == "equidist" && cmd.size() == 2) return cmd_equidist(cfg, cmd[1], out);
    if (cmd[0] == "gridlab" && cmd.size() == 2 && cmd[1] == "report") return cmd_gridlab_report(cfg, out);
    if (cmd[0] == "growth") return cmd_growth(cfg, out);
    throw InvalidParameter("unknown command");
  } catch (const InvariantFailure& e) {
    err << "invariant failed: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  cfg.threads = default_threads();
  CLI::App app{"Quasi-progression discrepancy toolkit"};
  app.require_subcommand(1);

  auto add_threads = [&](CLI::App* sub) {
    sub->add_option("--threads", cfg.threads, "Worker threads (default: QDISC_THREADS or 1)")->check(CLI::PositiveNumber);
  };
  auto add_seed = [&](CLI::App* sub) { sub->add_option("--seed", cfg.seed, "Random seed"); };

  auto* coloring = app.add_subcommand("coloring", "Generate or inspect colorings");
  coloring->require_subcommand(1);
  auto* gen = coloring->add_subcommand("gen", "Generate a coloring of {0..n}");
  gen->add_option("--kind", cfg.kind, "base3|base3_star|legendre|random|constant|alternating")->required();
  gen->add_option("--n", cfg.n, "Upper end of the domain")->required();
  gen->add_option("--p", cfg.p, "Prime for legendre");
  gen->add_option("--value", cfg.value, "Value for constant");
  gen->add_option("--density", cfg.density, "Zero out entries to this density (needs --seed)");
  gen->add_option("--out", cfg.output, "Output file")->required();
  add_seed(gen);
  auto* cstats = coloring->add_subcommand("stats", "Density and switch count");
  cstats->add_option("--coloring", cfg.input)->required();
  cstats->add_option("--out", cfg.output);

  auto* sw = app.add_subcommand("sweep", "Exact sweep over all quasi-progressions with alpha in [alo, ahi)");
  sw->add_option("--coloring", cfg.input)->required();
  sw->add_option("--n", cfg.n)->required();
  sw->add_option("--alo", cfg.alpha_lo, "p/q")->required();
  sw->add_option("--ahi", cfg.alpha_hi, "p/q")->required();
  sw->add_option("--mode", cfg.mode, "window|prefix");
  sw->add_option("--out", cfg.output)->required();
  add_threads(sw);

  auto* adv = app.add_subcommand("adversary", "Shifted-AP quasi-progression construction");
  adv->add_option("--coloring", cfg.input)->required();
  adv->add_option("--n", cfg.n)->required();
  adv->add_option("--out", cfg.output)->required();
  add_threads(adv);

  auto* eq = app.add_subcommand("equidist", "Fractional-part experiments");
  eq->require_subcommand(1);
  for (const char* name : {"count", "delta", "parseval", "leveque", "lemma2"}) {
    auto* sub = eq->add_subcommand(name);
    sub->add_option("--bs", cfg.bs, "Comma-separated b_1 < ... < b_q");
    sub->add_option("--q", cfg.q, "Use b = 1..q");
    sub->add_option("--out", cfg.output);
    std::string n(name);
    if (n == "count" || n == "delta" || n == "leveque") sub->add_option("--alpha", cfg.alphas, "p/q (repeatable)");
    if (n == "count" || n == "lemma2") {
      sub->add_option("--offset", cfg.offset, "Interval offset p/q");
      sub->add_option("--length", cfg.length, "Interval length p/q");
    }
    if (n == "parseval") {
      sub->add_option("--nmax", cfg.nmax);
      sub->add_option("--grid", cfg.grid);
    }
    if (n == "leveque") sub->add_option("--trunc", cfg.trunc);
    if (n == "lemma2") {
      sub->add_option("--samples", cfg.samples);
      add_seed(sub);
      add_threads(sub);
    }
  }

  auto* gl = app.add_subcommand("gridlab", "Trapezoidal-grid laboratory");
  gl->require_subcommand(1);
  auto* rep = gl->add_subcommand("report", "Per-level inner-product and sector-count quantities");
  rep->add_option("--coloring", cfg.input)->required();
  rep->add_option("--t", cfg.t_slope);
  rep->add_option("--u", cfg.u);
  rep->add_option("--delta", cfg.delta);
  rep->add_option("--rho", cfg.rho);
  rep->add_option("--c2", cfg.c2);
  rep->add_option("--M", cfg.M);
  rep->add_option("--seeds", cfg.seeds, "Grid placement seeds")->delimiter(',');
  rep->add_option("--samples", cfg.samples);
  rep->add_option("--out", cfg.output);
  rep->add_option("--csv", cfg.csv_output);
  add_threads(rep);

  auto* gr = app.add_subcommand("growth", "Balanced measure and sweep maximum versus n");
  gr->add_option("--kind", cfg.kind)->required();
  gr->add_option("--p", cfg.p);
  gr->add_option("--value", cfg.value);
  gr->add_option("--ns", cfg.ns, "Comma-separated ascending n")->required();
  gr->add_option("--t0", cfg.t0, "Slope window start p/q");
  gr->add_option("--scale", cfg.scale, "M(n) = floor(scale * (ln n)^(1/4))");
  gr->add_option("--out", cfg.output);
  add_seed(gr);
  add_threads(gr);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  for (auto* sub : app.get_subcommands()) {
    cfg.command.push_back(sub->get_name());
    for (auto* inner : sub->get_subcommands()) cfg.command.push_back(inner->get_name());
  }
  return run(cfg, out, err);
}

}  // namespace qdisc
