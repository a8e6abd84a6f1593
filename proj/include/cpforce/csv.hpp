#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "cpforce/errors.hpp"

namespace cpforce {

/// Unwritable CSV destination; the CLI maps this to its own exit code.
class CsvWriteError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Full-precision decimal rendering (17 significant digits round-trips any
/// double bit-exactly).
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Writes a rectangular table: one leading '#' comment line carrying units
/// and the sign convention, a header line, then the rows. Newline-terminated.
inline void emit_csv(const std::string& path, const std::string& comment,
                     const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  for (const auto& r : rows)
    if (r.size() != header.size())
      throw std::invalid_argument("emit_csv: ragged row");
  std::ofstream out(path, std::ios::binary);  // binary: byte-stable newlines
  if (!out) throw CsvWriteError("emit_csv: cannot open " + path);
  out << "# " << comment << "\n";
  for (std::size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i)
      out << (i ? "," : "") << format_double(r[i]);
    out << "\n";
  }
  out.flush();
  if (!out) throw CsvWriteError("emit_csv: write failed for " + path);
}

}  // namespace cpforce
