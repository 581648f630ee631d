#include "domd/losses.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "domd/error.hpp"

namespace domd {

namespace {

double parse_real(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value))
    throw Error("invalid " + std::string(what) + " '" + std::string(text) + "'");
  return value;
}

// log(1 + exp(u)) without overflow.
double softplus(double u) { return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u)); }

double sigmoid(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

double sparse_dot(const SparseExample& ex, const Vector& x) {
  double s = 0.0;
  for (const auto& [index, value] : ex.features) s += value * x(static_cast<Eigen::Index>(index - 1));
  return s;
}

double sparse_norm(const SparseExample& ex) {
  double s = 0.0;
  for (const auto& [index, value] : ex.features) s += value * value;
  return std::sqrt(s);
}

std::size_t gcd(std::size_t a, std::size_t b) { return std::gcd(a, b); }

}  // namespace

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::synthetic_quadratic: return "quadratic";
    case LossKind::logistic: return "logistic";
    case LossKind::ridge: return "ridge";
  }
  return "unknown";
}

Drift Drift::parse(std::string_view text) {
  if (text.starts_with("walk:")) {
    const double s = parse_real(text.substr(5), "walk step");
    if (s < 0.0) throw Error("walk step must be nonnegative");
    return random_walk(s);
  }
  if (text.starts_with("sine:")) {
    const std::string_view rest = text.substr(5);
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) throw Error("sine drift needs the form sine:<a>:<p>");
    const double a = parse_real(rest.substr(0, colon), "sine amplitude");
    const double p = parse_real(rest.substr(colon + 1), "sine period");
    if (a < 0.0) throw Error("sine amplitude must be nonnegative");
    if (!(p > 0.0)) throw Error("sine period must be positive");
    return sinusoid(a, p);
  }
  throw Error("unknown drift '" + std::string(text) + "'");
}

std::string Drift::to_string() const {
  std::ostringstream out;
  out.precision(17);
  if (kind == Kind::random_walk) out << "walk:" << step;
  else out << "sine:" << amplitude << ":" << period;
  return out.str();
}

QuadraticStream::QuadraticStream(std::size_t n, std::size_t dim, double lambda, const Drift& drift,
                                 const FeasibleSet& set, std::int64_t horizon, std::uint64_t seed,
                                 double offset_scale)
    : lambda_(lambda) {
  if (n < 1 || dim < 1) throw Error("quadratic stream needs n >= 1 and d >= 1");
  if (!(lambda > 0.0)) throw Error("lambda must be positive");
  if (horizon < 1) throw Error("horizon must be at least 1");
  if (set.dim() != dim) throw Error("feasible set dimension does not match the stream");
  if (!(offset_scale >= 0.0 && offset_scale < 1.0)) throw Error("offset_scale must lie in [0, 1)");

  const auto d = static_cast<Eigen::Index>(dim);
  Vector box_lo(d), box_hi(d);
  switch (set.kind()) {
    case FeasibleSet::Kind::ball: {
      const double half = set.radius() / std::sqrt(static_cast<double>(dim));
      box_lo.setConstant(-half);
      box_hi.setConstant(half);
      break;
    }
    case FeasibleSet::Kind::box:
      box_lo.setConstant(set.lo());
      box_hi.setConstant(set.hi());
      break;
    case FeasibleSet::Kind::simplex:
      throw Error("synthetic quadratic stream needs a ball or box feasible set");
  }
  const double half_width = 0.5 * (box_hi - box_lo).minCoeff();

  std::vector<RngStream> streams = seed_streams(seed, n);
  offsets_.assign(n, Vector::Zero(d));
  for (std::size_t i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < d; ++k) offsets_[i](k) = 2.0 * streams[i].uniform() - 1.0;
  Vector mean = Vector::Zero(d);
  for (const auto& b : offsets_) mean += b;
  mean /= static_cast<double>(n);
  double peak = 0.0;
  for (auto& b : offsets_) {
    b -= mean;
    peak = std::max(peak, b.cwiseAbs().maxCoeff());
  }
  if (peak > 0.0)
    for (auto& b : offsets_) b *= offset_scale * half_width / peak;

  Vector offset_min = offsets_.front(), offset_max = offsets_.front();
  for (const auto& b : offsets_) {
    offset_min = offset_min.cwiseMin(b);
    offset_max = offset_max.cwiseMax(b);
  }
  const Vector centre_lo = box_lo - offset_min;
  const Vector centre_hi = box_hi - offset_max;
  auto clamp = [&](const Vector& c) { return Vector(c.cwiseMax(centre_lo).cwiseMin(centre_hi)); };

  RngStream& drift_rng = streams[drift_stream_index(n)];
  std::normal_distribution<double> normal(0.0, 1.0);
  auto unit_direction = [&] {
    Vector u(d);
    double norm = 0.0;
    while (norm == 0.0) {
      for (Eigen::Index k = 0; k < d; ++k) u(k) = normal(drift_rng);
      norm = u.norm();
    }
    return Vector(u / norm);
  };

  const Vector start = clamp(0.5 * (box_lo + box_hi));
  centres_.reserve(static_cast<std::size_t>(horizon));
  centres_.push_back(start);
  const Vector sine_direction = drift.kind == Drift::Kind::sinusoid ? unit_direction() : Vector::Zero(d);
  for (std::int64_t t = 2; t <= horizon; ++t) {
    Vector proposal;
    if (drift.kind == Drift::Kind::random_walk) {
      proposal = centres_.back() + drift.step * unit_direction();
    } else {
      const double phase = 2.0 * std::numbers::pi * static_cast<double>(t - 1) / drift.period;
      proposal = start + drift.amplitude * std::sin(phase) * sine_direction;
    }
    Vector clamped = clamp(proposal);
    if (clamped != proposal) clamped_.push_back(t);
    centres_.push_back(std::move(clamped));
  }

  double max_target = 0.0;
  for (const auto& c : centres_)
    for (const auto& b : offsets_) max_target = std::max(max_target, (c + b).norm());
  constants_ = {lambda, lambda, lambda * (set.radius() + max_target)};
}

const Vector& QuadraticStream::centre(std::int64_t t) const {
  if (t < 1 || t > horizon()) throw Error("round " + std::to_string(t) + " outside the stream horizon");
  return centres_[static_cast<std::size_t>(t - 1)];
}

Vector QuadraticStream::target(std::size_t node, std::int64_t t) const { return centre(t) + offsets_.at(node); }

double QuadraticStream::value(std::size_t node, std::int64_t t, const Vector& x) const {
  return 0.5 * lambda_ * (x - target(node, t)).squaredNorm();
}

Vector QuadraticStream::grad(std::size_t node, std::int64_t t, const Vector& x) const {
  return lambda_ * (x - target(node, t));
}

std::optional<Vector> QuadraticStream::closed_form_minimizer(std::int64_t t, const FeasibleSet& set) const {
  Vector mean = Vector::Zero(static_cast<Eigen::Index>(dim()));
  for (std::size_t i = 0; i < nodes(); ++i) mean += target(i, t);
  mean /= static_cast<double>(nodes());
  return project(set, mean);
}

DataStream::DataStream(LossKind kind, std::vector<Shard> shards, std::size_t dim, std::size_t batch_size,
                       double reg_lambda, double radius)
    : kind_(kind), shards_(std::move(shards)), dim_(dim), batch_size_(batch_size), reg_(reg_lambda) {
  if (kind_ == LossKind::synthetic_quadratic) throw Error("DataStream serves logistic or ridge losses");
  if (shards_.empty()) throw Error("data stream needs at least one shard");
  if (dim_ < 1) throw Error("data stream needs a positive dimension");
  if (batch_size_ < 1) throw Error("batch size must be at least 1");
  if (!(reg_ >= 0.0)) throw Error("reg_lambda must be nonnegative");
  double max_norm = 0.0;
  double max_label = 0.0;
  for (std::size_t i = 0; i < shards_.size(); ++i) {
    if (shards_[i].empty()) throw Error("empty shard at node " + std::to_string(i));
    for (const auto& ex : shards_[i]) {
      if (!ex.features.empty() && ex.features.back().first > dim_)
        throw Error("example feature index exceeds the stream dimension");
      if (kind_ == LossKind::logistic && ex.label != 1.0 && ex.label != -1.0)
        throw Error("logistic stream needs labels in {-1, +1}");
      max_norm = std::max(max_norm, sparse_norm(ex));
      max_label = std::max(max_label, std::abs(ex.label));
    }
  }

  if (kind_ == LossKind::logistic) {
    constants_ = {reg_, reg_ + 0.25 * max_norm * max_norm, max_norm + reg_ * radius};
    return;
  }

  // Ridge curvature: extreme eigenvalues of every distinct minibatch Gram.
  double min_eig = std::numeric_limits<double>::infinity();
  double max_eig = 0.0;
  const auto d = static_cast<Eigen::Index>(dim_);
  for (const auto& shard : shards_) {
    const std::size_t m = shard.size();
    const std::size_t distinct = m / gcd(batch_size_ % m == 0 ? m : batch_size_ % m, m);
    for (std::size_t k = 0; k < distinct; ++k) {
      Matrix gram = Matrix::Zero(d, d);
      for (std::size_t idx : batch_indices(m, static_cast<std::int64_t>(k) + 1, batch_size_)) {
        Vector dense = Vector::Zero(d);
        for (const auto& [index, value] : shard[idx].features) dense(index - 1) = value;
        gram.noalias() += dense * dense.transpose();
      }
      gram /= static_cast<double>(batch_size_);
      Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
      min_eig = std::min(min_eig, std::max(0.0, eig.eigenvalues().minCoeff()));
      max_eig = std::max(max_eig, eig.eigenvalues().maxCoeff());
    }
  }
  constants_ = {2.0 * min_eig + reg_, 2.0 * max_eig + reg_,
                2.0 * max_norm * (radius * max_norm + max_label) + reg_ * radius};
}

double DataStream::value(std::size_t node, std::int64_t t, const Vector& x) const {
  const Shard& shard = shards_.at(node);
  double total = 0.0;
  for (std::size_t idx : batch_indices(shard.size(), t, batch_size_)) {
    const SparseExample& ex = shard[idx];
    const double margin = sparse_dot(ex, x);
    if (kind_ == LossKind::logistic) total += softplus(-ex.label * margin);
    else total += (margin - ex.label) * (margin - ex.label);
  }
  return total / static_cast<double>(batch_size_) + 0.5 * reg_ * x.squaredNorm();
}

Vector DataStream::grad(std::size_t node, std::int64_t t, const Vector& x) const {
  const Shard& shard = shards_.at(node);
  Vector g = Vector::Zero(static_cast<Eigen::Index>(dim_));
  for (std::size_t idx : batch_indices(shard.size(), t, batch_size_)) {
    const SparseExample& ex = shard[idx];
    const double margin = sparse_dot(ex, x);
    const double coef = kind_ == LossKind::logistic ? -ex.label * sigmoid(-ex.label * margin)
                                                    : 2.0 * (margin - ex.label);
    for (const auto& [index, value] : ex.features) g(index - 1) += coef * value;
  }
  g /= static_cast<double>(batch_size_);
  g += reg_ * x;
  return g;
}

std::unique_ptr<QuadraticStream> synthetic_quadratic_stream(std::size_t n, std::size_t dim, double lambda,
                                                            const Drift& drift, const FeasibleSet& set,
                                                            std::int64_t horizon, std::uint64_t seed,
                                                            double offset_scale) {
  return std::make_unique<QuadraticStream>(n, dim, lambda, drift, set, horizon, seed, offset_scale);
}

std::unique_ptr<DataStream> logistic_stream(std::vector<Shard> shards, std::size_t dim, std::size_t batch_size,
                                            double reg_lambda, double radius) {
  return std::make_unique<DataStream>(LossKind::logistic, std::move(shards), dim, batch_size, reg_lambda, radius);
}

std::unique_ptr<DataStream> ridge_stream(std::vector<Shard> shards, std::size_t dim, std::size_t batch_size,
                                         double reg_lambda, double radius) {
  return std::make_unique<DataStream>(LossKind::ridge, std::move(shards), dim, batch_size, reg_lambda, radius);
}

double global_loss(const LossStream& stream, std::int64_t t, const Vector& x) {
  double total = 0.0;
  for (std::size_t i = 0; i < stream.nodes(); ++i) total += stream.value(i, t, x);
  return total;
}

Vector global_gradient(const LossStream& stream, std::int64_t t, const Vector& x) {
  Vector total = Vector::Zero(static_cast<Eigen::Index>(stream.dim()));
  for (std::size_t i = 0; i < stream.nodes(); ++i) total += stream.grad(i, t, x);
  return total;
}

Vector global_minimizer(const LossStream& stream, std::int64_t t, const FeasibleSet& set,
                        const std::optional<Vector>& warm_start, const MinimizerOptions& options) {
  if (!(options.tol > 0.0)) throw Error("minimizer tolerance must be positive");
  if (auto exact = stream.closed_form_minimizer(t, set)) return *exact;

  const double beta = stream.constants().beta;
  if (!(beta > 0.0)) throw Error("projected-gradient oracle needs beta > 0");
  const double step = 1.0 / (static_cast<double>(stream.nodes()) * beta);
  Vector x = project(set, warm_start ? *warm_start : set.center());
  double moved = 0.0;
  for (int it = 0; it < options.max_iterations; ++it) {
    Vector next = project(set, x - step * global_gradient(stream, t, x));
    moved = (next - x).norm();
    x = std::move(next);
    if (moved < options.tol) return x;
  }
  std::ostringstream msg;
  msg.precision(6);
  msg << "minimizer oracle did not converge at round " << t << " after " << options.max_iterations
      << " iterations (last move " << moved << ")";
  throw Error(msg.str());
}

}  // namespace domd
