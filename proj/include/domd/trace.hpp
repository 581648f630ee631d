#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "domd/algorithms.hpp"

namespace domd {

/// Fixed CSV column order of a trace file.
const std::vector<std::string>& trace_columns();

using HeaderEntries = std::vector<std::pair<std::string, std::string>>;

/// `# key = value` header lines, the column row, then one row per round.
/// Reals use 17 significant digits; absent values are empty fields.
void write_trace(std::ostream& out, const HeaderEntries& header, const std::vector<TraceRow>& rows);

struct TraceFile {
  HeaderEntries header;
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<double>>> rows;

  std::optional<std::string> header_value(const std::string& key) const;
  std::size_t column(const std::string& name) const;
};

TraceFile read_trace(std::istream& in);
TraceFile read_trace_file(const std::string& path);

/// "%.17g", or "" for NaN.
std::string format_real(double value);

}  // namespace domd
