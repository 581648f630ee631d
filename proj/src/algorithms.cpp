#include "domd/algorithms.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <random>

#include "domd/error.hpp"
#include "domd/parallel.hpp"
#include "domd/rng.hpp"

namespace domd {

namespace {

// Random initial points draw from the node streams well past the counters the
// loss streams consume.
constexpr std::uint64_t kInitCounterOffset = 1ULL << 40;

void check_round_inputs(const std::vector<LearnerState>& states, const WeightMatrix& w, const LossStream& stream) {
  if (states.empty()) throw Error("no learner states");
  if (states.size() != w.size())
    throw Error("weight matrix has " + std::to_string(w.size()) + " nodes but there are " +
                std::to_string(states.size()) + " learners");
  if (stream.nodes() != states.size()) throw Error("loss stream node count does not match the learners");
}

double mean_global_loss(const LossStream& stream, std::int64_t t, const NodeVectors& points, int threads) {
  std::vector<double> per_node(points.size());
  parallel_for(points.size(), threads, [&](std::size_t i) { per_node[i] = global_loss(stream, t, points[i]); });
  double total = 0.0;
  for (double v : per_node) total += v;
  return total / static_cast<double>(points.size());
}

NodeVectors decisions_of(const std::vector<LearnerState>& states) {
  NodeVectors xs;
  xs.reserve(states.size());
  for (const auto& s : states) xs.push_back(s.x);
  return xs;
}

}  // namespace

Algorithm parse_algorithm(std::string_view text) {
  if (text == "madgc") return Algorithm::madgc;
  if (text == "single" || text == "domd_single") return Algorithm::domd_single;
  if (text == "central" || text == "centralized") return Algorithm::centralized;
  throw Error("unknown algorithm '" + std::string(text) + "'");
}

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::madgc: return "madgc";
    case Algorithm::domd_single: return "single";
    case Algorithm::centralized: return "central";
  }
  return "unknown";
}

KPolicy KPolicy::fixed(int k) {
  if (k < 1) throw Error("fixed consensus step count must be at least 1");
  return {Kind::fixed, k};
}

KPolicy KPolicy::parse(std::string_view text) {
  if (text == "paper") return paper();
  if (text == "single") return single();
  if (text.starts_with("fixed:")) {
    const std::string_view arg = text.substr(6);
    int k = 0;
    auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), k);
    if (ec != std::errc() || ptr != arg.data() + arg.size()) throw Error("invalid fixed K '" + std::string(arg) + "'");
    return fixed(k);
  }
  throw Error("unknown K policy '" + std::string(text) + "'");
}

std::string KPolicy::to_string() const {
  switch (kind) {
    case Kind::paper: return "paper";
    case Kind::fixed: return "fixed:" + std::to_string(k);
    case Kind::single: return "single";
  }
  return "unknown";
}

int KPolicy::rounds(std::int64_t t, double sigma2) const {
  switch (kind) {
    case Kind::paper: return consensus_rounds(t, sigma2);
    case Kind::fixed: return k;
    case Kind::single: return 1;
  }
  return 1;
}

RoundTrace domd_madgc_round(std::vector<LearnerState>& states, const WeightMatrix& w, const LossStream& stream,
                            std::int64_t t, const MirrorMap& map, const FeasibleSet& set, double eta,
                            const KPolicy& policy, int threads) {
  check_round_inputs(states, w, stream);
  const std::size_t n = states.size();
  RoundTrace trace;
  trace.t = t;
  trace.sigma2 = w.sigma2();
  trace.k = policy.rounds(t, w.sigma2());

  const NodeVectors decisions = decisions_of(states);
  trace.global_loss_x = mean_global_loss(stream, t, decisions, threads);

  const NodeVectors estimates = consensus_average(w, trace.k, decisions, threads);
  NodeVectors local_grads(n);
  parallel_for(n, threads, [&](std::size_t i) { local_grads[i] = stream.grad(i, t, estimates[i]); });
  const NodeVectors grads = consensus_average(w, trace.k, local_grads, threads);

  parallel_for(n, threads, [&](std::size_t i) {
    states[i].y = estimates[i];
    states[i].g = grads[i];
    states[i].x = mirror_descent_step(map, set, eta, grads[i], estimates[i]);
  });
  trace.global_loss_y = mean_global_loss(stream, t, estimates, threads);
  return trace;
}

RoundTrace domd_single_round(std::vector<LearnerState>& states, const WeightMatrix& w, const LossStream& stream,
                             std::int64_t t, const MirrorMap& map, const FeasibleSet& set, double eta,
                             int threads) {
  check_round_inputs(states, w, stream);
  const std::size_t n = states.size();
  RoundTrace trace;
  trace.t = t;
  trace.sigma2 = w.sigma2();
  trace.k = 1;

  const NodeVectors decisions = decisions_of(states);
  trace.global_loss_x = mean_global_loss(stream, t, decisions, threads);
  const NodeVectors estimates = consensus_average(w, 1, decisions, threads);
  parallel_for(n, threads, [&](std::size_t i) {
    states[i].y = estimates[i];
    states[i].g = stream.grad(i, t, estimates[i]);
    states[i].x = mirror_descent_step(map, set, eta, states[i].g, estimates[i]);
  });
  trace.global_loss_y = mean_global_loss(stream, t, estimates, threads);
  return trace;
}

RoundTrace centralized_omd_round(Vector& x, const LossStream& stream, std::int64_t t, const MirrorMap& map,
                                 const FeasibleSet& set, double eta) {
  RoundTrace trace;
  trace.t = t;
  trace.k = 0;
  trace.sigma2 = std::numeric_limits<double>::quiet_NaN();
  trace.global_loss_x = global_loss(stream, t, x);
  trace.global_loss_y = trace.global_loss_x;
  const Vector g = global_gradient(stream, t, x) / static_cast<double>(stream.nodes());
  x = mirror_descent_step(map, set, eta, g, x);
  return trace;
}

std::vector<LearnerState> initial_states(const FeasibleSet& set, std::size_t n, InitPolicy init, std::uint64_t seed) {
  const auto d = static_cast<Eigen::Index>(set.dim());
  std::vector<LearnerState> states(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vector x;
    if (init == InitPolicy::center) {
      x = set.center();
    } else {
      RngStream rng(derive_stream(seed, i).key(), kInitCounterOffset);
      x.resize(d);
      if (set.kind() == FeasibleSet::Kind::simplex) {
        std::exponential_distribution<double> expo(1.0);
        for (Eigen::Index k = 0; k < d; ++k) x(k) = expo(rng);
        x /= x.sum();
      } else {
        const double r = set.radius();
        for (Eigen::Index k = 0; k < d; ++k) x(k) = r * (2.0 * rng.uniform() - 1.0);
      }
      x = project(set, x);
    }
    states[i] = {x, x, Vector::Zero(d)};
  }
  return states;
}

SimulationResult simulate(const Problem& problem, const SimulationOptions& options) {
  if (!problem.schedule || !problem.stream) throw Error("problem needs a topology schedule and a loss stream");
  const TopologySchedule& schedule = *problem.schedule;
  const LossStream& stream = *problem.stream;
  const std::size_t n = schedule.nodes();
  if (stream.nodes() != n) throw Error("loss stream and topology disagree on the node count");
  if (stream.dim() != problem.set.dim()) throw Error("loss stream and feasible set disagree on the dimension");
  if (options.horizon < 1) throw Error("T must be at least 1");
  if (!(options.eta > 0.0)) throw Error("eta must be positive");
  check_geometry(problem.map, problem.set);

  SimulationResult result;
  result.constants = stream.constants();
  result.radius = problem.set.radius();
  try {
    result.rho = validate_step_size(options.eta, result.constants.lambda, problem.map);
  } catch (const Error&) {
    if (options.algorithm == Algorithm::madgc && options.diagnostics) throw;
  }

  std::vector<LearnerState> states = initial_states(problem.set, n, options.init, options.seed);
  std::optional<DiagnosticsTracker> tracker;
  if (options.diagnostics) tracker.emplace(stream, problem.map, problem.set, options.eta, result.rho);

  result.rows.reserve(static_cast<std::size_t>(options.horizon));
  for (std::int64_t t = 1; t <= options.horizon; ++t) {
    try {
      const NodeVectors decisions = decisions_of(states);
      RoundTrace trace;
      switch (options.algorithm) {
        case Algorithm::madgc:
          trace = domd_madgc_round(states, schedule.at(t), stream, t, problem.map, problem.set, options.eta,
                                   options.k_policy, options.threads);
          break;
        case Algorithm::domd_single:
          trace = domd_single_round(states, schedule.at(t), stream, t, problem.map, problem.set, options.eta,
                                    options.threads);
          break;
        case Algorithm::centralized: {
          Vector x = decisions.front();
          const Vector g = global_gradient(stream, t, x) / static_cast<double>(n);
          trace = centralized_omd_round(x, stream, t, problem.map, problem.set, options.eta);
          for (auto& s : states) s = {x, decisions.front(), g};
          break;
        }
      }
      TraceRow row{trace, std::nullopt};
      if (tracker)
        row.diagnostics = tracker->observe(t, decisions, states, trace.global_loss_x, trace.global_loss_y, trace.k,
                                           trace.sigma2);
      result.rows.push_back(std::move(row));
      if (options.record_states) {
        result.decisions.push_back(decisions);
        result.after_round.push_back(states);
      }
    } catch (const Error& e) {
      throw Error("round " + std::to_string(t) + ": " + e.what());
    }
  }

  if (tracker) {
    result.minimizers = tracker->minimizers();
    result.path_length = tracker->path_length();
    result.initial_gap = tracker->initial_gap();
    if (result.rho && *result.rho >= 0.0 && *result.rho < 1.0) {
      BoundInputs in;
      in.G = result.constants.G;
      in.R = result.radius;
      in.mu = problem.map.mu();
      in.mu_prime = problem.map.mu_prime();
      in.eta = options.eta;
      in.lambda = result.constants.lambda;
      in.n = n;
      in.initial_gap = result.initial_gap.value_or(0.0);
      in.path_length = *result.path_length;
      result.bound = regret_bound(in);
    }
  }
  return result;
}

}  // namespace domd
