#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qdisc {

// Everything a single CLI invocation needs, after parsing.
struct RunConfig {
  std::vector<std::string> command;  // e.g. {"coloring", "gen"}
  std::string input;   // --coloring
  std::string output;  // --out
  std::string csv_output;  // --csv (gridlab report mirror)

  std::int64_t n = 0;
  std::string alpha_lo = "1/1";
  std::string alpha_hi = "2/1";
  std::string mode = "window";
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;

  // coloring gen / growth
  std::string kind;
  std::int64_t p = 0;
  int value = 1;
  std::optional<double> density;

  // equidist
  std::string bs;
  std::int64_t q = 0;
  std::vector<std::string> alphas;
  std::string offset = "0";
  std::string length = "1/2";
  std::int64_t nmax = 8;
  std::int64_t grid = 100000;
  std::int64_t trunc = 50;
  std::int64_t samples = 10000;

  // gridlab / growth
  std::int64_t t_slope = 1;
  int u = 6;
  double delta = 0.5;
  double rho = 1.0;
  double c2 = 1.0;
  std::int64_t M = 2;
  std::vector<std::uint64_t> seeds;
  std::string ns;
  std::string t0 = "1/1";
  double scale = 1.0;
};

// Parses argv-style arguments (without the program name) and runs the command.
// Returns 0 on success, 1 when an invariant check fails, 2 on bad input.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace qdisc
