#include "qdisc/coloring.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "qdisc/errors.hpp"
#include "qdisc/io.hpp"

namespace qdisc {

std::string ColoringSource::describe() const {
  switch (kind) {
    case ColoringKind::base3: return "base3";
    case ColoringKind::base3_star: return "base3_star";
    case ColoringKind::legendre: return "legendre(" + std::to_string(p) + ")";
    case ColoringKind::random: return "random(" + std::to_string(seed) + ")";
    case ColoringKind::constant: return "constant(" + std::to_string(constant_value) + ")";
    case ColoringKind::alternating: return "alternating";
    case ColoringKind::file: return "file";
  }
  return "unknown";
}

Coloring::Coloring(std::vector<std::int8_t> values, ColoringSource source)
    : values_(std::move(values)), source_(source) {
  if (values_.empty()) throw InvalidParameter("coloring needs at least one point");
  for (auto v : values_) {
    if (v < -1 || v > 1) throw InvalidParameter("coloring value outside {-1,0,+1}");
  }
}

int Coloring::at(std::int64_t k) const {
  if (k < 0 || k > n()) {
    throw RangeError("index " + std::to_string(k) + " outside coloring domain [0," + std::to_string(n()) + "]");
  }
  return (*this)[k];
}

bool is_odd_prime(std::int64_t p) {
  if (p < 3 || p % 2 == 0) return false;
  for (std::int64_t f = 3; f * f <= p; f += 2) {
    if (p % f == 0) return false;
  }
  return true;
}

namespace {

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
  unsigned __int128 result = 1;
  unsigned __int128 b = base % mod;
  while (exp > 0) {
    if (exp & 1U) result = result * b % mod;
    b = b * b % mod;
    exp >>= 1U;
  }
  return static_cast<std::uint64_t>(result);
}

int base3_value(std::int64_t k) {
  if (k == 0) return 0;
  while (k % 3 == 0) k /= 3;
  return k % 3 == 1 ? 1 : -1;
}

}  // namespace

int legendre_symbol(std::int64_t k, std::int64_t p) {
  if (!is_odd_prime(p)) throw InvalidParameter("legendre symbol needs an odd prime, got " + std::to_string(p));
  auto r = static_cast<std::uint64_t>(((k % p) + p) % p);
  if (r == 0) return 0;
  auto e = pow_mod(r, static_cast<std::uint64_t>((p - 1) / 2), static_cast<std::uint64_t>(p));
  return e == 1 ? 1 : -1;
}

Coloring generate(const ColoringSource& source, std::int64_t n) {
  if (n < 0) throw InvalidParameter("coloring size n must be >= 0");
  std::vector<std::int8_t> values(static_cast<std::size_t>(n) + 1);
  switch (source.kind) {
    case ColoringKind::base3:
      for (std::int64_t k = 0; k <= n; ++k) values[k] = static_cast<std::int8_t>(base3_value(k));
      break;
    case ColoringKind::base3_star:
      for (std::int64_t k = 0; k <= n; ++k) values[k] = static_cast<std::int8_t>(k % 3 == 0 ? 0 : (k % 3 == 1 ? 1 : -1));
      break;
    case ColoringKind::legendre: {
      if (!is_odd_prime(source.p)) throw InvalidParameter("legendre coloring needs an odd prime p");
      // One period of residues, then tile.
      std::vector<std::int8_t> period(static_cast<std::size_t>(source.p));
      for (std::int64_t r = 0; r < source.p; ++r) period[r] = static_cast<std::int8_t>(legendre_symbol(r, source.p));
      for (std::int64_t k = 0; k <= n; ++k) values[k] = period[k % source.p];
      break;
    }
    case ColoringKind::random: {
      std::mt19937_64 rng(source.seed);
      for (auto& v : values) v = (rng() >> 63U) ? 1 : -1;
      break;
    }
    case ColoringKind::constant:
      if (source.constant_value < -1 || source.constant_value > 1) {
        throw InvalidParameter("constant coloring value must be -1, 0 or +1");
      }
      for (auto& v : values) v = static_cast<std::int8_t>(source.constant_value);
      break;
    case ColoringKind::alternating:
      for (std::int64_t k = 0; k <= n; ++k) values[k] = k % 2 == 0 ? 1 : -1;
      break;
    case ColoringKind::file:
      throw InvalidParameter("file colorings are loaded, not generated");
  }
  return Coloring(std::move(values), source);
}

Coloring apply_density_mask(const Coloring& c, double rho, std::uint64_t seed) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw InvalidParameter("density must lie in [0,1]");
  std::mt19937_64 rng(seed);
  std::vector<std::int8_t> values(c.values().begin(), c.values().end());
  for (auto& v : values) {
    // 53-bit uniform in [0,1); std distributions are not portable across libraries.
    double u = static_cast<double>(rng() >> 11U) * 0x1.0p-53;
    if (u >= rho) v = 0;
  }
  return Coloring(std::move(values), c.source());
}

ColoringStats stats(const Coloring& c) {
  std::int64_t nonzero = 0;
  std::int64_t switches = 0;
  auto vals = c.values();
  for (std::size_t k = 0; k < vals.size(); ++k) {
    if (vals[k] != 0) ++nonzero;
    if (k > 0 && vals[k] != vals[k - 1]) ++switches;
  }
  return {make_rational(nonzero, static_cast<long long>(vals.size())), switches};
}

std::vector<std::int64_t> switch_values(const Coloring& c, std::int64_t lo, std::int64_t hi) {
  if (lo < 1 || lo > hi || hi > c.n()) {
    throw RangeError("switch range [" + std::to_string(lo) + "," + std::to_string(hi) + "] outside [1," +
                     std::to_string(c.n()) + "]");
  }
  std::vector<std::int64_t> out;
  for (std::int64_t b = lo; b <= hi; ++b) {
    if (c[b] != c[b - 1]) out.push_back(b);
  }
  return out;
}

void save(const Coloring& c, std::ostream& out) {
  out << "n=" << c.n() << '\n';
  std::string body;
  body.reserve(c.values().size());
  for (auto v : c.values()) body.push_back(v > 0 ? '+' : (v < 0 ? '-' : '0'));
  out << body << '\n';
}

Coloring load(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ParseError(1, "missing header line");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (header.rfind("n=", 0) != 0) throw ParseError(1, "header must be 'n=<N>'");
  std::int64_t n = -1;
  const char* first = header.data() + 2;
  const char* last = header.data() + header.size();
  auto [ptr, ec] = std::from_chars(first, last, n);
  if (ec != std::errc() || ptr != last || first == last || n < 0) throw ParseError(1, "bad size in header '" + header + "'");

  std::string body;
  if (!std::getline(in, body)) throw ParseError(2, "missing values line");
  if (!body.empty() && body.back() == '\r') body.pop_back();
  if (static_cast<std::int64_t>(body.size()) != n + 1) {
    throw ParseError(2, "expected " + std::to_string(n + 1) + " symbols, found " + std::to_string(body.size()));
  }
  std::vector<std::int8_t> values(body.size());
  for (std::size_t k = 0; k < body.size(); ++k) {
    switch (body[k]) {
      case '+': values[k] = 1; break;
      case '-': values[k] = -1; break;
      case '0': values[k] = 0; break;
      default:
        throw ParseError(2, "illegal symbol '" + std::string(1, body[k]) + "' at column " + std::to_string(k + 1));
    }
  }
  std::string rest;
  std::size_t line = 3;
  while (std::getline(in, rest)) {
    if (!rest.empty() && rest != "\r") throw ParseError(line, "unexpected trailing content");
    ++line;
  }
  return Coloring(std::move(values), ColoringSource::file());
}

void save_file(const Coloring& c, const std::filesystem::path& path) {
  std::ostringstream out;
  save(c, out);
  write_file_atomic(path, out.str());
}

Coloring load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open coloring file " + path.string());
  return load(in);
}

}  // namespace qdisc
