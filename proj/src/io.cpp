#include "qdisc/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "qdisc/errors.hpp"

namespace qdisc {

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidParameter("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw InvalidParameter("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw InvalidParameter("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

std::string csv_escape(std::string_view cell) {
  bool quote = cell.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!quote) return std::string(cell);
  std::string out = "\"";
  for (char ch : cell) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) { append_row(header); }

void CsvWriter::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw InvalidParameter("csv row width does not match header");
  append_row(cells);
}

void CsvWriter::append_row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) buffer_.push_back(',');
    buffer_ += csv_escape(cells[i]);
  }
  buffer_.push_back('\n');
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace qdisc
