#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "domd/data.hpp"
#include "domd/geometry.hpp"
#include "domd/rng.hpp"
#include "domd/types.hpp"

namespace domd {

enum class LossKind { synthetic_quadratic, logistic, ridge };

std::string to_string(LossKind kind);

/// Curvature and gradient constants of a stream: every f_{i,t} is
/// lambda-strongly convex, beta-smooth and has ||grad|| <= G on the set.
struct LossConstants {
  double lambda = 0.0;
  double beta = 0.0;
  double G = 0.0;
};

/// Per-node, per-round loss oracle f_{i,t}. Immutable after construction;
/// value() and grad() are pure and may be called from several threads.
class LossStream {
 public:
  virtual ~LossStream() = default;

  virtual LossKind kind() const = 0;
  virtual std::size_t nodes() const = 0;
  virtual std::size_t dim() const = 0;
  virtual LossConstants constants() const = 0;

  virtual double value(std::size_t node, std::int64_t t, const Vector& x) const = 0;
  virtual Vector grad(std::size_t node, std::int64_t t, const Vector& x) const = 0;

  /// Exact minimizer of f_t over the set when one is available in closed form.
  virtual std::optional<Vector> closed_form_minimizer(std::int64_t /*t*/, const FeasibleSet& /*set*/) const {
    return std::nullopt;
  }
};

struct Drift {
  enum class Kind { random_walk, sinusoid };
  Kind kind = Kind::random_walk;
  double step = 0.0;       // random_walk: displacement per round
  double amplitude = 0.0;  // sinusoid
  double period = 1.0;     // sinusoid, in rounds

  static Drift random_walk(double step) { return {Kind::random_walk, step, 0.0, 1.0}; }
  static Drift sinusoid(double amplitude, double period) { return {Kind::sinusoid, 0.0, amplitude, period}; }
  /// `walk:<s>|sine:<a>:<p>`.
  static Drift parse(std::string_view text);
  std::string to_string() const;
};

/// f_{i,t}(x) = (lambda / 2) ||x - a_{i,t}||^2 with a_{i,t} = c_t + b_i.
///
/// The offsets b_i have mean zero, so the global minimizer is the projection
/// of c_t. The centre c_t starts in the middle of the target box and drifts;
/// whenever a drift step would push a target outside the box the centre is
/// clamped and the round is recorded in clamped_rounds(). The target box is
/// the cube inscribed in a ball, or the box itself.
class QuadraticStream final : public LossStream {
 public:
  QuadraticStream(std::size_t n, std::size_t dim, double lambda, const Drift& drift, const FeasibleSet& set,
                  std::int64_t horizon, std::uint64_t seed, double offset_scale);

  LossKind kind() const override { return LossKind::synthetic_quadratic; }
  std::size_t nodes() const override { return offsets_.size(); }
  std::size_t dim() const override { return static_cast<std::size_t>(offsets_.front().size()); }
  LossConstants constants() const override { return constants_; }

  double value(std::size_t node, std::int64_t t, const Vector& x) const override;
  Vector grad(std::size_t node, std::int64_t t, const Vector& x) const override;
  std::optional<Vector> closed_form_minimizer(std::int64_t t, const FeasibleSet& set) const override;

  Vector target(std::size_t node, std::int64_t t) const;
  const Vector& centre(std::int64_t t) const;
  const std::vector<std::int64_t>& clamped_rounds() const { return clamped_; }
  std::int64_t horizon() const { return static_cast<std::int64_t>(centres_.size()); }

 private:
  double lambda_;
  NodeVectors offsets_;
  NodeVectors centres_;  // c_1 .. c_T
  std::vector<std::int64_t> clamped_;
  LossConstants constants_;
};

/// Mean loss over node i's round-t minibatch plus (reg / 2) ||x||^2, for
/// logistic log(1 + exp(-z x.w)) or squared (x.w - z)^2 example losses.
class DataStream final : public LossStream {
 public:
  DataStream(LossKind kind, std::vector<Shard> shards, std::size_t dim, std::size_t batch_size, double reg_lambda,
             double radius);

  LossKind kind() const override { return kind_; }
  std::size_t nodes() const override { return shards_.size(); }
  std::size_t dim() const override { return dim_; }
  LossConstants constants() const override { return constants_; }

  double value(std::size_t node, std::int64_t t, const Vector& x) const override;
  Vector grad(std::size_t node, std::int64_t t, const Vector& x) const override;

  std::size_t batch_size() const { return batch_size_; }
  double reg_lambda() const { return reg_; }

 private:
  LossKind kind_;
  std::vector<Shard> shards_;
  std::size_t dim_;
  std::size_t batch_size_;
  double reg_;
  LossConstants constants_;
};

std::unique_ptr<QuadraticStream> synthetic_quadratic_stream(std::size_t n, std::size_t dim, double lambda,
                                                            const Drift& drift, const FeasibleSet& set,
                                                            std::int64_t horizon, std::uint64_t seed,
                                                            double offset_scale = 0.25);

/// Labels must already be +-1. `radius` bounds ||x|| on the feasible set and
/// enters the gradient bound G.
std::unique_ptr<DataStream> logistic_stream(std::vector<Shard> shards, std::size_t dim, std::size_t batch_size,
                                            double reg_lambda, double radius);
std::unique_ptr<DataStream> ridge_stream(std::vector<Shard> shards, std::size_t dim, std::size_t batch_size,
                                         double reg_lambda, double radius);

/// f_t(x) = sum_i f_{i,t}(x), accumulated in node order.
double global_loss(const LossStream& stream, std::int64_t t, const Vector& x);
Vector global_gradient(const LossStream& stream, std::int64_t t, const Vector& x);

struct MinimizerOptions {
  double tol = 1e-10;
  int max_iterations = 100000;
};

/// argmin_{x in set} f_t(x): closed form when the stream has one, otherwise
/// projected gradient with step 1 / (n beta) from `warm_start` (or the set
/// centre) until successive iterates move less than tol.
Vector global_minimizer(const LossStream& stream, std::int64_t t, const FeasibleSet& set,
                        const std::optional<Vector>& warm_start = std::nullopt, const MinimizerOptions& options = {});

}  // namespace domd
