#include "domd/metrics.hpp"

#include <cmath>
#include <numbers>

#include "domd/algorithms.hpp"
#include "domd/error.hpp"

namespace domd {

namespace {

Vector average(const NodeVectors& vs) {
  Vector mean = Vector::Zero(vs.front().size());
  for (const auto& v : vs) mean += v;
  return mean / static_cast<double>(vs.size());
}

}  // namespace

RegretSeries dynamic_regret(const std::vector<std::vector<double>>& node_losses_x,
                            const std::vector<std::vector<double>>& node_losses_y, const NodeVectors& minimizers,
                            const LossStream& stream) {
  if (node_losses_x.size() != node_losses_y.size()) throw Error("regret series lengths differ");
  if (minimizers.size() < node_losses_x.size())
    throw Error("missing minimizer for round " + std::to_string(minimizers.size() + 1));
  RegretSeries out;
  double cum_x = 0.0;
  double cum_y = 0.0;
  for (std::size_t s = 0; s < node_losses_x.size(); ++s) {
    const auto t = static_cast<std::int64_t>(s + 1);
    const double optimal = global_loss(stream, t, minimizers[s]);
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (double v : node_losses_x[s]) mean_x += v;
    for (double v : node_losses_y[s]) mean_y += v;
    mean_x /= static_cast<double>(node_losses_x[s].size());
    mean_y /= static_cast<double>(node_losses_y[s].size());
    cum_x += mean_x - optimal;
    cum_y += mean_y - optimal;
    out.regret_x.push_back(cum_x);
    out.regret_y.push_back(cum_y);
  }
  return out;
}

double path_length(const NodeVectors& minimizers) {
  double total = 0.0;
  for (std::size_t t = 1; t < minimizers.size(); ++t) total += (minimizers[t] - minimizers[t - 1]).norm();
  return total;
}

NetworkErrors network_errors(const NodeVectors& decisions, const std::vector<LearnerState>& after,
                             const LossStream& stream, std::int64_t t, const MirrorMap& map, const FeasibleSet& set,
                             double eta) {
  if (decisions.empty() || decisions.size() != after.size()) throw Error("network_errors needs matching state lists");
  const std::size_t n = decisions.size();
  NetworkErrors out;
  out.xbar = average(decisions);
  NodeVectors next(n), local_grads(n);
  for (std::size_t i = 0; i < n; ++i) {
    next[i] = after[i].x;
    local_grads[i] = stream.grad(i, t, after[i].y);
  }
  out.xbar_next = average(next);
  out.gbar = average(local_grads);

  const Vector averaged_step = mirror_descent_step(map, set, eta, out.gbar, out.xbar);
  const Vector exact_gradient = global_gradient(stream, t, out.xbar) / static_cast<double>(n);
  const Vector exact_step = mirror_descent_step(map, set, eta, exact_gradient, out.xbar);
  out.delta_norm = (out.xbar_next - averaged_step).norm();
  out.delta_small_norm = (averaged_step - exact_step).norm();
  for (const auto& s : after) {
    const double gap = (s.y - out.xbar).norm();
    out.max_disagreement = std::max(out.max_disagreement, gap);
    out.mean_disagreement += gap;
  }
  out.mean_disagreement /= static_cast<double>(n);
  return out;
}

double lemma1_slack(const Vector& xbar, const Vector& xbar_next, const Vector& opt, double rho, double delta_norm,
                    double delta_small_norm) {
  return rho * (xbar - opt).norm() + delta_norm + delta_small_norm - (xbar_next - opt).norm();
}

double regret_bound(const BoundInputs& in) {
  const double rho = (in.mu_prime - in.eta * in.lambda) / in.mu;
  if (!(rho < 1.0)) throw Error("regret bound needs rho < 1 (rho = " + std::to_string(rho) + ")");
  if (rho < 0.0) throw Error("regret bound needs eta inside the step-size window (rho < 0)");
  const double root_n = std::sqrt(static_cast<double>(in.n));
  const double zeta2 = std::numbers::pi * std::numbers::pi / 6.0;
  const double network = in.G * in.R * root_n * zeta2;
  const double start = in.G * in.initial_gap / (1.0 - rho);
  const double consensus = (in.G * in.R * in.mu_prime + in.eta * in.G * in.G + in.eta * in.lambda * in.G * in.R) /
                           in.mu * root_n * zeta2 / (1.0 - rho);
  const double drift = in.G * in.path_length / (1.0 - rho);
  return network + start + consensus + drift;
}

DiagnosticsTracker::DiagnosticsTracker(const LossStream& stream, const MirrorMap& map, const FeasibleSet& set,
                                       double eta, std::optional<double> rho)
    : stream_(stream), map_(map), set_(set), eta_(eta), rho_(rho) {}

DiagnosticsRecord DiagnosticsTracker::observe(std::int64_t t, const NodeVectors& decisions,
                                              const std::vector<LearnerState>& after, double loss_x, double loss_y,
                                              int k, double sigma2) {
  std::optional<Vector> warm;
  if (!minimizers_.empty()) warm = minimizers_.back();
  Vector opt = global_minimizer(stream_, t, set_, warm);
  if (!minimizers_.empty()) path_length_ += (opt - minimizers_.back()).norm();

  DiagnosticsRecord rec;
  rec.t = t;
  rec.optimal_loss = global_loss(stream_, t, opt);
  regret_x_ += loss_x - rec.optimal_loss;
  regret_y_ += loss_y - rec.optimal_loss;
  rec.cumulative_regret_x = regret_x_;
  rec.cumulative_regret_y = regret_y_;
  rec.path_length_so_far = path_length_;

  const NetworkErrors errs = network_errors(decisions, after, stream_, t, map_, set_, eta_);
  rec.max_disagreement = errs.max_disagreement;
  rec.delta_norm = errs.delta_norm;
  rec.delta_small_norm = errs.delta_small_norm;
  rec.xbar_to_opt = (errs.xbar - opt).norm();
  if (rho_) rec.lemma1_slack = lemma1_slack(errs.xbar, errs.xbar_next, opt, *rho_, errs.delta_norm, errs.delta_small_norm);

  const double n = static_cast<double>(decisions.size());
  rec.disagreement_bound = k > 0 ? std::sqrt(n) * set_.radius() * std::pow(sigma2, k) : 0.0;
  const LossConstants c = stream_.constants();
  rec.delta_small_bound_lambda = eta_ / map_.mu() * c.lambda * errs.mean_disagreement;
  rec.delta_small_bound_beta = eta_ / map_.mu() * c.beta * errs.mean_disagreement;

  if (!initial_gap_) initial_gap_ = rec.xbar_to_opt;
  minimizers_.push_back(std::move(opt));
  return rec;
}

}  // namespace domd
