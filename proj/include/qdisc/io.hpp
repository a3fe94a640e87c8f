#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace qdisc {

// Writes to a sibling temp file and renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// Minimal RFC-4180 CSV builder: header row first, CRLF-free (LF line ends).
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void add_row(const std::vector<std::string>& cells);
  const std::string& str() const { return buffer_; }
  std::size_t columns() const { return columns_; }

 private:
  void append_row(const std::vector<std::string>& cells);

  std::string buffer_;
  std::size_t columns_;
};

std::string csv_escape(std::string_view cell);

// Formats a double with enough digits to round-trip.
std::string format_double(double x);

}  // namespace qdisc
