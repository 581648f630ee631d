#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "domd/geometry.hpp"
#include "domd/losses.hpp"
#include "domd/types.hpp"

namespace domd {

struct LearnerState;

/// Per-round diagnostics. Norms are Euclidean throughout.
struct DiagnosticsRecord {
  std::int64_t t = 0;
  double cumulative_regret_x = 0.0;
  double cumulative_regret_y = 0.0;
  double path_length_so_far = 0.0;  // C_t
  double max_disagreement = 0.0;    // max_i ||y_{i,t} - xbar_t||
  double delta_norm = 0.0;          // ||Delta_t||
  double delta_small_norm = 0.0;    // ||delta_t||
  std::optional<double> lemma1_slack;
  double xbar_to_opt = 0.0;  // ||xbar_t - x*_t||

  double optimal_loss = 0.0;        // f_t(x*_t)
  double disagreement_bound = 0.0;  // sqrt(n) R sigma2^K_t
  // (eta / mu) (1/n) sum_j c ||y_{j,t} - xbar_t|| with c = lambda or c = beta.
  double delta_small_bound_lambda = 0.0;
  double delta_small_bound_beta = 0.0;
};

struct RegretSeries {
  std::vector<double> regret_x;  // cumulative, at the decisions x_{i,t}
  std::vector<double> regret_y;  // cumulative, at the consensus estimates y_{i,t}
};

/// node_losses_*[t - 1][i] = f_t(z_{i,t}) with f_t the global (summed) loss.
/// Reg_t = (1/n) sum_i sum_{s <= t} f_s(z_{i,s}) - sum_{s <= t} f_s(x*_s).
RegretSeries dynamic_regret(const std::vector<std::vector<double>>& node_losses_x,
                            const std::vector<std::vector<double>>& node_losses_y, const NodeVectors& minimizers,
                            const LossStream& stream);

/// C_T = sum_{t >= 2} ||x*_t - x*_{t-1}||.
double path_length(const NodeVectors& minimizers);

struct NetworkErrors {
  Vector xbar;       // exact average of x_{i,t}
  Vector xbar_next;  // exact average of x_{i,t+1}
  Vector gbar;       // (1/n) sum_i grad f_{i,t}(y_{i,t})
  double delta_norm = 0.0;
  double delta_small_norm = 0.0;
  double max_disagreement = 0.0;
  double mean_disagreement = 0.0;
};

/// Delta_t = xbar_{t+1} - MD(gbar_t, xbar_t) and
/// delta_t = MD(gbar_t, xbar_t) - MD((1/n) grad f_t(xbar_t), xbar_t).
/// `decisions` holds x_{i,t}; `after` holds y_{i,t} and x_{i,t+1}.
NetworkErrors network_errors(const NodeVectors& decisions, const std::vector<LearnerState>& after,
                             const LossStream& stream, std::int64_t t, const MirrorMap& map, const FeasibleSet& set,
                             double eta);

/// rho ||xbar_t - x*_t|| + ||Delta_t|| + ||delta_t|| - ||xbar_{t+1} - x*_t||.
double lemma1_slack(const Vector& xbar, const Vector& xbar_next, const Vector& opt, double rho, double delta_norm,
                    double delta_small_norm);

struct BoundInputs {
  double G = 0.0;
  double R = 0.0;
  double mu = 1.0;
  double mu_prime = 1.0;
  double eta = 0.0;
  double lambda = 0.0;
  std::size_t n = 1;
  double initial_gap = 0.0;  // ||xbar_1 - x*_1||
  double path_length = 0.0;  // C_T
};

/// G R sqrt(n) pi^2/6 + G gap/(1-rho)
///   + ((G R mu' + eta G^2 + eta lambda G R)/mu) sqrt(n) pi^2/(6(1-rho)) + G C_T/(1-rho).
double regret_bound(const BoundInputs& in);

/// Incremental per-round bookkeeping used by the experiment engine.
class DiagnosticsTracker {
 public:
  DiagnosticsTracker(const LossStream& stream, const MirrorMap& map, const FeasibleSet& set, double eta,
                     std::optional<double> rho);

  /// `decisions` are x_{i,t}; `after` the states after round t; loss_x and
  /// loss_y are the node-averaged global losses recorded by the round.
  DiagnosticsRecord observe(std::int64_t t, const NodeVectors& decisions, const std::vector<LearnerState>& after,
                            double loss_x, double loss_y, int k, double sigma2);

  const NodeVectors& minimizers() const { return minimizers_; }
  double path_length() const { return path_length_; }
  std::optional<double> initial_gap() const { return initial_gap_; }

 private:
  const LossStream& stream_;
  const MirrorMap& map_;
  const FeasibleSet& set_;
  double eta_;
  std::optional<double> rho_;
  NodeVectors minimizers_;
  double path_length_ = 0.0;
  double regret_x_ = 0.0;
  double regret_y_ = 0.0;
  std::optional<double> initial_gap_;
};

}  // namespace domd
