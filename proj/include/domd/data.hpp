#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace domd {

/// One LIBSVM row. Feature indices are 1-based and strictly increasing.
struct SparseExample {
  double label = 0.0;
  std::vector<std::pair<std::uint32_t, double>> features;

  bool operator==(const SparseExample&) const = default;
};

struct Dataset {
  std::vector<SparseExample> examples;
  std::size_t dim = 0;  // largest feature index seen
};

using Shard = std::vector<SparseExample>;

enum class PartitionPolicy { contiguous, round_robin };

PartitionPolicy parse_partition_policy(std::string_view text);
std::string to_string(PartitionPolicy policy);

/// Parses `label idx:val idx:val ...` lines. Blank lines are skipped; line
/// numbers in errors are 1-based.
Dataset parse_libsvm(std::string_view text);
Dataset load_libsvm(const std::string& path);

/// Canonical form: 17 significant digits, single spaces, one line per example.
std::string serialize_libsvm(const std::vector<SparseExample>& examples);

/// Splits into n shards whose sizes differ by at most one. Contiguous
/// splitting shuffles with the seed first; round_robin deals example k to
/// shard k mod n.
std::vector<Shard> partition(const std::vector<SparseExample>& examples, std::size_t n, PartitionPolicy policy,
                             std::uint64_t seed);

/// Positions ((t - 1) b + j) mod m for j < b.
std::vector<std::size_t> batch_indices(std::size_t shard_size, std::int64_t t, std::size_t batch_size);
std::vector<SparseExample> batch(const Shard& shard, std::int64_t t, std::size_t batch_size);

/// Relabels to +1 for `target` and -1 otherwise.
void one_vs_rest(std::vector<SparseExample>& examples, double target);

/// Maps {0, 1} or {-1, +1} labels to {-1, +1}; anything else is an error.
void binary_labels(std::vector<SparseExample>& examples);

/// Divides each feature by its largest absolute value over the dataset.
void max_abs_scale(std::vector<SparseExample>& examples, std::size_t dim);

}  // namespace domd
