#include "domd/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

#include "domd/error.hpp"

namespace domd {

namespace {

constexpr double kFeasibleTol = 1e-9;

double parse_real(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value))
    throw Error("invalid " + std::string(what) + " '" + std::string(text) + "'");
  return value;
}

// Projection of v onto {u >= 0, sum u = total} by the sort-and-threshold rule.
Vector project_scaled_simplex(const Vector& v, double total) {
  const auto d = v.size();
  std::vector<double> sorted(v.data(), v.data() + d);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double running = 0.0;
  double theta = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    running += sorted[static_cast<std::size_t>(j)];
    const double candidate = (running - total) / static_cast<double>(j + 1);
    if (sorted[static_cast<std::size_t>(j)] - candidate > 0.0) theta = candidate;
  }
  return (v.array() - theta).max(0.0).matrix();
}

// KL projection of a positive vector (given by its logarithm) onto the
// eps-interior simplex: x_i = max(eps, c w_i) with c fixing the sum.
Vector kl_project_simplex(const Vector& log_w, double eps) {
  const auto d = log_w.size();
  const Vector w = (log_w.array() - log_w.maxCoeff()).exp().matrix();
  std::vector<bool> clipped(static_cast<std::size_t>(d), false);
  double scale = 0.0;
  for (Eigen::Index pass = 0; pass <= d; ++pass) {
    double free_mass = 0.0;
    Eigen::Index clipped_count = 0;
    for (Eigen::Index i = 0; i < d; ++i) {
      if (clipped[static_cast<std::size_t>(i)]) ++clipped_count;
      else free_mass += w(i);
    }
    scale = (1.0 - static_cast<double>(clipped_count) * eps) / free_mass;
    bool changed = false;
    for (Eigen::Index i = 0; i < d; ++i) {
      if (!clipped[static_cast<std::size_t>(i)] && scale * w(i) < eps) {
        clipped[static_cast<std::size_t>(i)] = true;
        changed = true;
      }
    }
    if (!changed) break;
  }
  Vector x(d);
  for (Eigen::Index i = 0; i < d; ++i) x(i) = clipped[static_cast<std::size_t>(i)] ? eps : scale * w(i);
  return x;
}

}  // namespace

MirrorMap MirrorMap::euclidean() { return MirrorMap(Kind::euclidean, 1.0, 1.0, 0.0); }

MirrorMap MirrorMap::negative_entropy(double eps, std::size_t dim) {
  if (dim == 0) throw Error("entropy map needs a positive dimension");
  if (!(eps > 0.0 && eps <= 1.0 / static_cast<double>(dim)))
    throw Error("entropy_eps must lie in (0, 1/d]");
  return MirrorMap(Kind::negative_entropy, 1.0, 1.0 / eps, eps);
}

MirrorMap MirrorMap::parse(std::string_view text, double entropy_eps, std::size_t dim) {
  if (text == "euclidean") return euclidean();
  if (text == "entropy") return negative_entropy(entropy_eps, dim);
  throw Error("unknown mirror map '" + std::string(text) + "'");
}

std::string MirrorMap::name() const { return kind_ == Kind::euclidean ? "euclidean" : "entropy"; }

double MirrorMap::value(const Vector& x) const {
  if (kind_ == Kind::euclidean) return 0.5 * x.squaredNorm();
  if ((x.array() <= 0.0).any()) throw Error("entropy map needs strictly positive coordinates");
  return (x.array() * x.array().log()).sum();
}

Vector MirrorMap::gradient(const Vector& x) const {
  if (kind_ == Kind::euclidean) return x;
  if ((x.array() <= 0.0).any()) throw Error("entropy map needs strictly positive coordinates");
  return (1.0 + x.array().log()).matrix();
}

Vector MirrorMap::conjugate_gradient(const Vector& theta) const {
  if (kind_ == Kind::euclidean) return theta;
  return (theta.array() - 1.0).exp().matrix();
}

FeasibleSet FeasibleSet::ball(std::size_t dim, double radius) {
  if (dim == 0) throw Error("feasible set needs a positive dimension");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw Error("ball radius must be positive and finite");
  return FeasibleSet(Kind::ball, dim, 0.0, radius, 0.0);
}

FeasibleSet FeasibleSet::box(std::size_t dim, double lo, double hi) {
  if (dim == 0) throw Error("feasible set needs a positive dimension");
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) throw Error("box needs finite lo <= hi");
  return FeasibleSet(Kind::box, dim, lo, hi, 0.0);
}

FeasibleSet FeasibleSet::simplex(std::size_t dim, double eps) {
  if (dim == 0) throw Error("feasible set needs a positive dimension");
  if (!(eps >= 0.0 && eps <= 1.0 / static_cast<double>(dim))) throw Error("simplex eps must lie in [0, 1/d]");
  return FeasibleSet(Kind::simplex, dim, 0.0, 1.0, eps);
}

FeasibleSet FeasibleSet::parse(std::string_view text, std::size_t dim, double simplex_eps) {
  if (text == "simplex") return simplex(dim, simplex_eps);
  if (text.starts_with("ball:")) return ball(dim, parse_real(text.substr(5), "ball radius"));
  if (text.starts_with("box:")) {
    const std::string_view rest = text.substr(4);
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) throw Error("box needs the form box:<lo>:<hi>");
    return box(dim, parse_real(rest.substr(0, colon), "box lower bound"),
               parse_real(rest.substr(colon + 1), "box upper bound"));
  }
  throw Error("unknown feasible set '" + std::string(text) + "'");
}

std::string FeasibleSet::to_string() const {
  std::ostringstream out;
  out.precision(17);
  switch (kind_) {
    case Kind::ball: out << "ball:" << hi_; break;
    case Kind::box: out << "box:" << lo_ << ":" << hi_; break;
    case Kind::simplex: out << "simplex"; break;
  }
  return out.str();
}

double FeasibleSet::radius() const {
  const double d = static_cast<double>(dim_);
  switch (kind_) {
    case Kind::ball: return hi_;
    case Kind::box: return std::sqrt(d) * std::max(std::abs(lo_), std::abs(hi_));
    case Kind::simplex: {
      const double top = 1.0 - (d - 1.0) * eps_;
      return std::sqrt(top * top + (d - 1.0) * eps_ * eps_);
    }
  }
  return 0.0;
}

Vector FeasibleSet::center() const {
  const auto d = static_cast<Eigen::Index>(dim_);
  if (kind_ == Kind::simplex) return Vector::Constant(d, 1.0 / static_cast<double>(dim_));
  return project(*this, Vector::Zero(d));
}

double FeasibleSet::distance(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != dim_) throw Error("vector dimension does not match the feasible set");
  return (x - project(*this, x)).norm();
}

double bregman(const MirrorMap& map, const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw Error("bregman arguments differ in dimension");
  if (map.kind() == MirrorMap::Kind::euclidean) return 0.5 * (x - y).squaredNorm();
  if ((x.array() <= 0.0).any() || (y.array() <= 0.0).any())
    throw Error("entropy bregman divergence needs strictly positive coordinates");
  return (x.array() * (x.array() / y.array()).log() - x.array() + y.array()).sum();
}

Vector project(const FeasibleSet& set, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != set.dim()) throw Error("vector dimension does not match the feasible set");
  switch (set.kind()) {
    case FeasibleSet::Kind::ball: {
      const double norm = x.norm();
      if (norm <= set.radius()) return x;
      return (set.radius() / norm) * x;
    }
    case FeasibleSet::Kind::box:
      return x.cwiseMax(set.lo()).cwiseMin(set.hi());
    case FeasibleSet::Kind::simplex: {
      const double d = static_cast<double>(set.dim());
      const double slack = 4.0 * std::numeric_limits<double>::epsilon() * d;
      if ((x.array() >= set.eps()).all() && std::abs(x.sum() - 1.0) <= slack) return x;
      const double total = 1.0 - d * set.eps();
      if (total <= 0.0) return Vector::Constant(x.size(), set.eps());
      return (project_scaled_simplex((x.array() - set.eps()).matrix(), total).array() + set.eps()).matrix();
    }
  }
  return x;
}

void check_geometry(const MirrorMap& map, const FeasibleSet& set) {
  if (map.kind() == MirrorMap::Kind::negative_entropy) {
    if (set.kind() != FeasibleSet::Kind::simplex) throw Error("entropy mirror map requires the simplex feasible set");
    if (set.eps() != map.eps()) throw Error("entropy map and simplex must share the interior eps");
  }
}

Vector mirror_descent_step(const MirrorMap& map, const FeasibleSet& set, double eta, const Vector& g,
                           const Vector& y) {
  if (!(eta > 0.0)) throw Error("eta must be positive");
  if (g.size() != y.size()) throw Error("gradient and point differ in dimension");
  if (!g.allFinite()) throw Error("gradient has non-finite entries");
  check_geometry(map, set);
  if (!set.contains(y, kFeasibleTol)) throw Error("mirror step from an infeasible point");
  if (map.kind() == MirrorMap::Kind::euclidean) {
    return project(set, map.conjugate_gradient(map.gradient(y) - eta * g));
  }
  // grad r*(grad r(y) - eta g) = y exp(-eta g), kept in log space so the KL
  // projection sees no overflow.
  const Vector log_w = map.gradient(y).array() - 1.0 - eta * g.array();
  return kl_project_simplex(log_w, set.eps());
}

double validate_step_size(double eta, double lambda, const MirrorMap& map) {
  if (!(lambda > 0.0)) throw Error("step-size window needs lambda > 0 (got lambda = " + std::to_string(lambda) + ")");
  const double lo = (map.mu_prime() - map.mu()) / lambda;
  const double hi = map.mu_prime() / lambda;
  if (!(eta > lo && eta < hi)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "eta = " << eta << " outside the step-size window (" << lo << ", " << hi << ")";
    throw Error(msg.str());
  }
  return (map.mu_prime() - eta * lambda) / map.mu();
}

}  // namespace domd
