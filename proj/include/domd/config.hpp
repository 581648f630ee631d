#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "domd/algorithms.hpp"
#include "domd/data.hpp"
#include "domd/losses.hpp"
#include "domd/topology.hpp"

namespace domd {

/// Flat `key = value` experiment description. Every key is validated when
/// parsed; unknown and duplicate keys are errors.
struct ExperimentConfig {
  // required
  Algorithm algorithm = Algorithm::madgc;
  TopologySpec topology;
  std::size_t nodes = 0;
  LossKind loss = LossKind::synthetic_quadratic;
  double eta = 0.0;
  std::int64_t T = 0;

  // topology
  std::optional<double> lazy_alpha;
  // geometry
  std::string mirror = "euclidean";
  std::string feasible = "ball:1";
  double entropy_eps = 1e-6;
  // synthetic losses
  double lambda = 1.0;
  Drift drift = Drift::random_walk(0.01);
  std::size_t dim = 2;
  double offset_scale = 0.25;
  // data losses
  std::size_t batch = 10;
  double reg_lambda = 0.0;
  std::string dataset;
  PartitionPolicy partition = PartitionPolicy::contiguous;
  std::optional<double> target_class;
  bool scale_features = false;
  // engine
  KPolicy k_policy;
  InitPolicy init = InitPolicy::center;
  bool diagnostics = true;
  // run
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::string run_name = "run";

  /// Canonical key/value pairs, in a fixed order, for the trace header.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig parse_config(const std::string& path);

}  // namespace domd
