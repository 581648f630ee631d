#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "domd/types.hpp"

namespace domd {

using Adjacency = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct WeightScheme {
  enum class Kind { metropolis, lazy_uniform };
  Kind kind = Kind::metropolis;
  double alpha = 0.0;  // lazy_uniform only; diagonal entries are at least alpha

  static WeightScheme metropolis() { return {}; }
  static WeightScheme lazy_uniform(double alpha) { return {Kind::lazy_uniform, alpha}; }
};

/// Symmetric-or-not doubly stochastic mixing matrix with its second singular
/// value computed once at construction. Immutable.
class WeightMatrix {
 public:
  /// Validates nonnegativity, unit row/column sums (1e-12) and sigma2 < 1.
  static WeightMatrix from_entries(Matrix entries);

  const Matrix& entries() const { return entries_; }
  double sigma2() const { return sigma2_; }
  std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  bool operator==(const WeightMatrix& other) const { return entries_ == other.entries_; }

 private:
  WeightMatrix(Matrix entries, double sigma2) : entries_(std::move(entries)), sigma2_(sigma2) {}

  Matrix entries_;
  double sigma2_ = 0.0;
};

struct TopologySpec {
  enum class Kind { complete, cycle, grid, random_geometric, random_pool };
  Kind kind = Kind::complete;
  int grid_degree = 4;
  double rgg_eps = 1.0;
  int pool_size = 1;

  /// Parses `complete|cycle|grid:<d>|rgg:<eps>|pool:<P>`.
  static TopologySpec parse(std::string_view text);
  std::string to_string() const;
};

/// Round-robin pool of mixing matrices: round t uses pool[(t - 1) mod P].
class TopologySchedule {
 public:
  explicit TopologySchedule(std::vector<WeightMatrix> pool);

  const WeightMatrix& at(std::int64_t t) const;
  const std::vector<WeightMatrix>& pool() const { return pool_; }
  std::size_t nodes() const { return pool_.front().size(); }

 private:
  std::vector<WeightMatrix> pool_;
};

bool is_connected(const Adjacency& adjacency);

WeightMatrix build_weight_matrix(const Adjacency& adjacency, const WeightScheme& scheme);

TopologySchedule generate_topology(const TopologySpec& spec, std::size_t n, std::uint64_t seed,
                                   const WeightScheme& scheme = WeightScheme::metropolis());

/// Second largest singular value; 0 for a 1x1 matrix.
double second_singular_value(const Matrix& w);

/// K_t = max(1, ceil(-2 log t / log sigma2)); sigma2 == 0 gives 1.
int consensus_rounds(std::int64_t t, double sigma2);

/// K successive applications of W, each output accumulated over j in index order.
NodeVectors consensus_average(const WeightMatrix& w, int k, const NodeVectors& values, int threads = 0);

/// max_i sum_j |(W^K)_ij - 1/n|.
double mixing_deviation(const WeightMatrix& w, int k);

}  // namespace domd
