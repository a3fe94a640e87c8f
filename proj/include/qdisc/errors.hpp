#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qdisc {

// Bad argument to an operation (non-prime p, alpha < 1, empty window, ...).
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An index fell outside the coloring's domain {0..n}.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// The shifted-AP realization found no epsilon = 1/L in its scan range.
class ConstructionFailure : public std::runtime_error {
 public:
  ConstructionFailure(const std::string& what, long long scan_lo, long long scan_hi)
      : std::runtime_error(what), scan_lo_(scan_lo), scan_hi_(scan_hi) {}

  long long scan_lo() const noexcept { return scan_lo_; }
  long long scan_hi() const noexcept { return scan_hi_; }

 private:
  long long scan_lo_;
  long long scan_hi_;
};

}  // namespace qdisc
