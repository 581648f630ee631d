#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace domd {

/// Counter-based generator: output j of a stream is a pure function of
/// (key, j). Satisfies UniformRandomBitGenerator so it plugs into <random>.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream() = default;
  explicit RngStream(std::uint64_t key, std::uint64_t first_counter = 0) : key_(key), counter_(first_counter) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform();

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Stream k of a master seed.
RngStream derive_stream(std::uint64_t master_seed, std::uint64_t k);

/// n + 2 streams: 0..n-1 for nodes, n for topology, n + 1 for loss drift.
std::vector<RngStream> seed_streams(std::uint64_t master_seed, std::size_t n);

inline std::size_t topology_stream_index(std::size_t n) { return n; }
inline std::size_t drift_stream_index(std::size_t n) { return n + 1; }

}  // namespace domd
