#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "domd/geometry.hpp"
#include "domd/losses.hpp"
#include "domd/metrics.hpp"
#include "domd/topology.hpp"

namespace domd {

/// x: decision x_{i,t}; y: consensus estimate y_{i,t}; g: gradient estimate g_{i,t}.
struct LearnerState {
  Vector x;
  Vector y;
  Vector g;
};

enum class Algorithm { madgc, domd_single, centralized };

/// Accepts madgc, single|domd_single, central|centralized.
Algorithm parse_algorithm(std::string_view text);
std::string to_string(Algorithm algorithm);

/// How many consensus steps a DOMD-MADGC round runs.
struct KPolicy {
  enum class Kind { paper, fixed, single };
  Kind kind = Kind::paper;
  int k = 1;

  static KPolicy paper() { return {}; }
  static KPolicy fixed(int k);
  static KPolicy single() { return {Kind::single, 1}; }
  /// `paper|fixed:<k>|single`.
  static KPolicy parse(std::string_view text);
  std::string to_string() const;

  int rounds(std::int64_t t, double sigma2) const;
};

struct RoundTrace {
  std::int64_t t = 0;
  int k = 0;            // consensus steps this round (0 for centralized)
  double sigma2 = 0.0;  // NaN for centralized
  double global_loss_y = 0.0;  // (1/n) sum_i f_t(y_{i,t})
  double global_loss_x = 0.0;  // (1/n) sum_i f_t(x_{i,t})
};

/// One round of DOMD-MADGC. On entry states[i].x = x_{i,t}; on exit y and g
/// hold y_{i,t}, g_{i,t} and x holds x_{i,t+1}.
RoundTrace domd_madgc_round(std::vector<LearnerState>& states, const WeightMatrix& w, const LossStream& stream,
                            std::int64_t t, const MirrorMap& map, const FeasibleSet& set, double eta,
                            const KPolicy& policy, int threads = 0);

/// Single decision-consensus step followed by a purely local mirror step.
RoundTrace domd_single_round(std::vector<LearnerState>& states, const WeightMatrix& w, const LossStream& stream,
                             std::int64_t t, const MirrorMap& map, const FeasibleSet& set, double eta,
                             int threads = 0);

/// x <- MD((1/n) grad f_t(x), x).
RoundTrace centralized_omd_round(Vector& x, const LossStream& stream, std::int64_t t, const MirrorMap& map,
                                 const FeasibleSet& set, double eta);

enum class InitPolicy { center, random };

/// Everything a simulation needs, already materialized.
struct Problem {
  std::shared_ptr<const TopologySchedule> schedule;
  std::shared_ptr<const LossStream> stream;
  MirrorMap map = MirrorMap::euclidean();
  FeasibleSet set = FeasibleSet::ball(1, 1.0);
};

struct SimulationOptions {
  Algorithm algorithm = Algorithm::madgc;
  KPolicy k_policy;
  double eta = 0.1;
  std::int64_t horizon = 1;
  bool diagnostics = true;
  InitPolicy init = InitPolicy::center;
  std::uint64_t seed = 0;
  int threads = 0;
  /// Keep every round's node states (tests and offline checks).
  bool record_states = false;
};

struct TraceRow {
  RoundTrace round;
  std::optional<DiagnosticsRecord> diagnostics;
};

struct SimulationResult {
  std::vector<TraceRow> rows;
  LossConstants constants;
  double radius = 0.0;
  std::optional<double> rho;
  std::optional<double> initial_gap;
  std::optional<double> path_length;
  std::optional<double> bound;  // regret_bound with realized constants
  NodeVectors minimizers;
  // Filled when record_states is set: decisions[t-1][i] = x_{i,t}, and the
  // post-round states of round t.
  std::vector<NodeVectors> decisions;
  std::vector<std::vector<LearnerState>> after_round;
};

std::vector<LearnerState> initial_states(const FeasibleSet& set, std::size_t n, InitPolicy init, std::uint64_t seed);

SimulationResult simulate(const Problem& problem, const SimulationOptions& options);

}  // namespace domd
