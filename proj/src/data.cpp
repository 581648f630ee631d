#include "domd/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "domd/error.hpp"
#include "domd/rng.hpp"

namespace domd {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string at_line(std::size_t line) { return " at line " + std::to_string(line); }

double parse_real(std::string_view token, std::size_t line) {
  double value = 0.0;
  // from_chars rejects a leading '+', which LIBSVM labels commonly carry
  std::string_view digits = token;
  if (digits.size() > 1 && digits.front() == '+' && digits[1] != '-') digits.remove_prefix(1);
  const auto* end = digits.data() + digits.size();
  auto [ptr, ec] = std::from_chars(digits.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value))
    throw Error("malformed number '" + std::string(token) + "'" + at_line(line));
  return value;
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

PartitionPolicy parse_partition_policy(std::string_view text) {
  if (text == "contiguous") return PartitionPolicy::contiguous;
  if (text == "round_robin") return PartitionPolicy::round_robin;
  throw Error("unknown partition policy '" + std::string(text) + "'");
}

std::string to_string(PartitionPolicy policy) {
  return policy == PartitionPolicy::contiguous ? "contiguous" : "round_robin";
}

Dataset parse_libsvm(std::string_view text) {
  Dataset data;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto newline = text.find('\n');
    std::string_view line = trim(text.substr(0, newline));
    text = newline == std::string_view::npos ? std::string_view{} : text.substr(newline + 1);
    ++line_no;
    if (line.empty()) continue;

    SparseExample example;
    bool first = true;
    while (!line.empty()) {
      const auto space = line.find_first_of(" \t");
      const std::string_view token = line.substr(0, space);
      line = space == std::string_view::npos ? std::string_view{} : trim(line.substr(space));
      if (first) {
        example.label = parse_real(token, line_no);
        first = false;
        continue;
      }
      const auto colon = token.find(':');
      if (colon == std::string_view::npos || colon == 0)
        throw Error("malformed token '" + std::string(token) + "'" + at_line(line_no));
      std::uint32_t index = 0;
      const std::string_view idx = token.substr(0, colon);
      auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), index);
      if (ec != std::errc() || ptr != idx.data() + idx.size() || index == 0)
        throw Error("malformed feature index '" + std::string(idx) + "'" + at_line(line_no));
      const double value = parse_real(token.substr(colon + 1), line_no);
      if (!example.features.empty() && index <= example.features.back().first)
        throw Error("indices not increasing" + at_line(line_no));
      example.features.emplace_back(index, value);
      data.dim = std::max<std::size_t>(data.dim, index);
    }
    data.examples.push_back(std::move(example));
  }
  return data;
}

Dataset load_libsvm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open dataset '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_libsvm(buffer.str());
}

std::string serialize_libsvm(const std::vector<SparseExample>& examples) {
  std::string out;
  for (const auto& ex : examples) {
    out += format_real(ex.label);
    for (const auto& [index, value] : ex.features) {
      out += ' ';
      out += std::to_string(index);
      out += ':';
      out += format_real(value);
    }
    out += '\n';
  }
  return out;
}

std::vector<Shard> partition(const std::vector<SparseExample>& examples, std::size_t n, PartitionPolicy policy,
                             std::uint64_t seed) {
  if (n < 1) throw Error("partition needs at least one node");
  if (examples.size() < n)
    throw Error("fewer examples (" + std::to_string(examples.size()) + ") than nodes (" + std::to_string(n) + ")");
  std::vector<Shard> shards(n);
  if (policy == PartitionPolicy::round_robin) {
    for (std::size_t k = 0; k < examples.size(); ++k) shards[k % n].push_back(examples[k]);
    return shards;
  }
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  RngStream rng = derive_stream(seed, 0);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
  const std::size_t base = examples.size() / n;
  const std::size_t extra = examples.size() % n;
  std::size_t cursor = 0;
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t size = base + (s < extra ? 1 : 0);
    for (std::size_t k = 0; k < size; ++k) shards[s].push_back(examples[order[cursor++]]);
  }
  return shards;
}

std::vector<std::size_t> batch_indices(std::size_t shard_size, std::int64_t t, std::size_t batch_size) {
  if (batch_size < 1) throw Error("batch size must be at least 1");
  if (shard_size == 0) throw Error("empty shard");
  if (t < 1) throw Error("round index must be >= 1");
  const auto start = static_cast<std::size_t>(
      (static_cast<unsigned long long>(t - 1) % shard_size) * (batch_size % shard_size) % shard_size);
  std::vector<std::size_t> indices(batch_size);
  for (std::size_t j = 0; j < batch_size; ++j) indices[j] = (start + j) % shard_size;
  return indices;
}

std::vector<SparseExample> batch(const Shard& shard, std::int64_t t, std::size_t batch_size) {
  std::vector<SparseExample> out;
  for (std::size_t k : batch_indices(shard.size(), t, batch_size)) out.push_back(shard[k]);
  return out;
}

void one_vs_rest(std::vector<SparseExample>& examples, double target) {
  for (auto& ex : examples) ex.label = ex.label == target ? 1.0 : -1.0;
}

void binary_labels(std::vector<SparseExample>& examples) {
  for (auto& ex : examples) {
    if (ex.label == 0.0 || ex.label == -1.0) ex.label = -1.0;
    else if (ex.label == 1.0) ex.label = 1.0;
    else
      throw Error("label " + format_real(ex.label) + " is not binary; set target_class for one-vs-rest");
  }
}

void max_abs_scale(std::vector<SparseExample>& examples, std::size_t dim) {
  std::vector<double> peak(dim + 1, 0.0);
  for (const auto& ex : examples)
    for (const auto& [index, value] : ex.features) peak[index] = std::max(peak[index], std::abs(value));
  for (auto& ex : examples)
    for (auto& [index, value] : ex.features)
      if (peak[index] > 0.0) value /= peak[index];
}

}  // namespace domd
