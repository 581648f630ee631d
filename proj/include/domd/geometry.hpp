#pragma once

#include <string>
#include <string_view>

#include "domd/types.hpp"

namespace domd {

/// Regularizer r defining the mirror-descent geometry.
///
/// euclidean:        r(x) = ||x||^2 / 2,   mu = mu' = 1.
/// negative_entropy: r(x) = sum x_i log x_i on the eps-interior simplex
///                   {x : x_i >= eps, sum x_i = 1}; mu = 1, mu' = 1 / eps.
class MirrorMap {
 public:
  enum class Kind { euclidean, negative_entropy };

  static MirrorMap euclidean();
  /// eps must lie in (0, 1/dim].
  static MirrorMap negative_entropy(double eps, std::size_t dim);
  /// `euclidean|entropy`.
  static MirrorMap parse(std::string_view text, double entropy_eps, std::size_t dim);

  Kind kind() const { return kind_; }
  double mu() const { return mu_; }
  double mu_prime() const { return mu_prime_; }
  double eps() const { return eps_; }
  std::string name() const;

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  /// Closed-form inverse of gradient(): identity or coordinate-wise exp(theta - 1).
  Vector conjugate_gradient(const Vector& theta) const;

 private:
  MirrorMap(Kind kind, double mu, double mu_prime, double eps)
      : kind_(kind), mu_(mu), mu_prime_(mu_prime), eps_(eps) {}

  Kind kind_;
  double mu_;
  double mu_prime_;
  double eps_;
};

/// Compact convex decision set.
class FeasibleSet {
 public:
  enum class Kind { ball, box, simplex };

  static FeasibleSet ball(std::size_t dim, double radius);
  static FeasibleSet box(std::size_t dim, double lo, double hi);
  /// eps-interior probability simplex, eps in [0, 1/dim].
  static FeasibleSet simplex(std::size_t dim, double eps);
  /// `ball:<R>|box:<lo>:<hi>|simplex`.
  static FeasibleSet parse(std::string_view text, std::size_t dim, double simplex_eps);

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double eps() const { return eps_; }
  std::string to_string() const;

  /// R = max_{x in set} ||x||.
  double radius() const;
  /// Ball/box: projection of the origin. Simplex: the uniform vector.
  Vector center() const;
  double distance(const Vector& x) const;
  bool contains(const Vector& x, double tol = 1e-9) const { return distance(x) <= tol; }

 private:
  FeasibleSet(Kind kind, std::size_t dim, double lo, double hi, double eps)
      : kind_(kind), dim_(dim), lo_(lo), hi_(hi), eps_(eps) {}

  Kind kind_;
  std::size_t dim_;
  double lo_;  // ball: unused; box: lower bound
  double hi_;  // ball: radius; box: upper bound
  double eps_;
};

/// D_r(x, y) = r(x) - r(y) - <grad r(y), x - y>.
double bregman(const MirrorMap& map, const Vector& x, const Vector& y);

/// Euclidean projection; returns x unchanged when x is already feasible.
Vector project(const FeasibleSet& set, const Vector& x);

/// argmin_{x in set} <x, g> + D_r(x, y) / eta, computed as the Bregman
/// projection of grad r*(grad r(y) - eta g) onto the set.
Vector mirror_descent_step(const MirrorMap& map, const FeasibleSet& set, double eta, const Vector& g,
                           const Vector& y);

/// Contraction factor rho = (mu' - eta lambda) / mu. Throws unless
/// (mu' - mu) / lambda < eta < mu' / lambda.
double validate_step_size(double eta, double lambda, const MirrorMap& map);

/// Ensures map and set are a supported pairing (entropy needs the simplex).
void check_geometry(const MirrorMap& map, const FeasibleSet& set);

}  // namespace domd
