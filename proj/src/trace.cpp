#include "domd/trace.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "domd/error.hpp"

namespace domd {

const std::vector<std::string>& trace_columns() {
  static const std::vector<std::string> columns = {
      "t",         "K_t",        "sigma2",           "global_loss_y",    "global_loss_x",
      "cum_regret_y", "cum_regret_x", "C_t",        "max_disagreement", "delta_norm",
      "delta_small_norm", "lemma1_slack", "xbar_to_opt"};
  return columns;
}

std::string format_real(double value) {
  if (std::isnan(value)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

std::string optional_field(const std::optional<double>& v) { return v ? format_real(*v) : ""; }

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> parse_field(std::string_view text, std::size_t line_no) {
  if (text.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw Error("bad trace field '" + std::string(text) + "' at line " + std::to_string(line_no));
  return v;
}

}  // namespace

void write_trace(std::ostream& out, const HeaderEntries& header, const std::vector<TraceRow>& rows) {
  for (const auto& [key, value] : header) out << "# " << key << " = " << value << '\n';
  const auto& columns = trace_columns();
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << '\n';
  for (const auto& row : rows) {
    const auto& r = row.round;
    out << r.t << ',' << r.k << ',' << format_real(r.sigma2) << ',' << format_real(r.global_loss_y) << ','
        << format_real(r.global_loss_x);
    if (row.diagnostics) {
      const auto& d = *row.diagnostics;
      out << ',' << format_real(d.cumulative_regret_y) << ',' << format_real(d.cumulative_regret_x) << ','
          << format_real(d.path_length_so_far) << ',' << format_real(d.max_disagreement) << ','
          << format_real(d.delta_norm) << ',' << format_real(d.delta_small_norm) << ','
          << optional_field(d.lemma1_slack) << ',' << format_real(d.xbar_to_opt);
    } else {
      out << ",,,,,,,,";
    }
    out << '\n';
  }
}

std::optional<std::string> TraceFile::header_value(const std::string& key) const {
  for (const auto& [k, v] : header)
    if (k == key) return v;
  return std::nullopt;
}

std::size_t TraceFile::column(const std::string& name) const {
  for (std::size_t c = 0; c < columns.size(); ++c)
    if (columns[c] == name) return c;
  throw Error("trace has no column '" + name + "'");
}

TraceFile read_trace(std::istream& in) {
  TraceFile trace;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (view.empty()) continue;
    if (view.front() == '#') {
      if (!trace.columns.empty()) throw Error("header line after column row at line " + std::to_string(line_no));
      view.remove_prefix(1);
      const auto eq = view.find('=');
      if (eq == std::string_view::npos) throw Error("malformed header at line " + std::to_string(line_no));
      trace.header.emplace_back(std::string(trim(view.substr(0, eq))), std::string(trim(view.substr(eq + 1))));
      continue;
    }
    const auto fields = split_commas(view);
    if (trace.columns.empty()) {
      for (auto f : fields) trace.columns.emplace_back(f);
      continue;
    }
    if (fields.size() != trace.columns.size())
      throw Error("expected " + std::to_string(trace.columns.size()) + " fields, got " +
                  std::to_string(fields.size()) + " at line " + std::to_string(line_no));
    std::vector<std::optional<double>> row;
    row.reserve(fields.size());
    for (auto f : fields) row.push_back(parse_field(f, line_no));
    trace.rows.push_back(std::move(row));
  }
  if (trace.columns.empty()) throw Error("trace has no column row");
  return trace;
}

TraceFile read_trace_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open trace '" + path + "'");
  return read_trace(in);
}

}  // namespace domd
