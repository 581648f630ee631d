#include <cmath>
#include <memory>
#include <numbers>

#include "doctest.h"
#include "domd/algorithms.hpp"
#include "domd/error.hpp"
#include "domd/metrics.hpp"
#include "domd/rng.hpp"

using namespace domd;

namespace {

class FixedQuadratics final : public LossStream {
 public:
  FixedQuadratics(NodeVectors centres, double lambda) : centres_(std::move(centres)), lambda_(lambda) {}
  LossKind kind() const override { return LossKind::synthetic_quadratic; }
  std::size_t nodes() const override { return centres_.size(); }
  std::size_t dim() const override { return static_cast<std::size_t>(centres_[0].size()); }
  LossConstants constants() const override { return {lambda_, lambda_, 10.0}; }
  double value(std::size_t i, std::int64_t, const Vector& x) const override {
    return 0.5 * lambda_ * (x - centres_[i]).squaredNorm();
  }
  Vector grad(std::size_t i, std::int64_t, const Vector& x) const override { return lambda_ * (x - centres_[i]); }

 private:
  NodeVectors centres_;
  double lambda_;
};

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("dynamic regret examples") {
    // f_t(x) = (x - 1)^2, play 0 twice
    const FixedQuadratics f({Vector::Constant(1, 1.0)}, 2.0);
    const NodeVectors mins(2, Vector::Constant(1, 1.0));
    const auto r = dynamic_regret({{1.0}, {1.0}}, {{1.0}, {1.0}}, mins, f);
    CHECK(r.regret_x.back() == doctest::Approx(2.0));
    CHECK(r.regret_y.back() == doctest::Approx(2.0));

    const FixedQuadratics g({v2(0, 0), v2(1, 1)}, 1.0);
    const NodeVectors opt(3, v2(0.5, 0.5));
    const double fopt = global_loss(g, 1, opt[0]);
    const auto zero = dynamic_regret({{fopt, fopt}, {fopt, fopt}, {fopt, fopt}},
                                     {{fopt, fopt}, {fopt, fopt}, {fopt, fopt}}, opt, g);
    for (double v : zero.regret_x) CHECK(v == 0.0);

    CHECK_THROWS_WITH_AS(dynamic_regret({{1.0}, {1.0}}, {{1.0}, {1.0}}, {Vector::Constant(1, 1.0)}, f),
                         doctest::Contains("missing minimizer for round 2"), Error);
  }

  TEST_CASE("dynamic regret matches brute-force re-summation") {
    RngStream rng = derive_stream(1, 0);
    const auto set = FeasibleSet::ball(3, 1);
    const auto s = synthetic_quadratic_stream(4, 3, 1.0, Drift::random_walk(0.05), set, 25, 2);
    std::vector<std::vector<double>> lx, ly;
    NodeVectors mins;
    std::vector<NodeVectors> plays;
    for (std::int64_t t = 1; t <= 25; ++t) {
      NodeVectors p;
      std::vector<double> a, b;
      for (int i = 0; i < 4; ++i) {
        Vector z(3);
        for (int c = 0; c < 3; ++c) z(c) = rng.uniform() - 0.5;
        p.push_back(z);
        a.push_back(global_loss(*s, t, z));
        b.push_back(global_loss(*s, t, 0.5 * z));
      }
      plays.push_back(p);
      lx.push_back(a);
      ly.push_back(b);
      mins.push_back(global_minimizer(*s, t, set));
    }
    const auto r = dynamic_regret(lx, ly, mins, *s);
    long double cum = 0;
    for (std::int64_t t = 1; t <= 25; ++t) {
      long double played = 0;
      for (int i = 0; i < 4; ++i)
        for (int node = 0; node < 4; ++node) played += s->value(node, t, plays[t - 1][i]);
      long double best = 0;
      for (int node = 0; node < 4; ++node) best += s->value(node, t, mins[t - 1]);
      cum += played / 4 - best;
      CHECK(std::abs(r.regret_x[t - 1] - static_cast<double>(cum)) <= 1e-10);
    }
  }

  TEST_CASE("path length examples") {
    CHECK(path_length(NodeVectors(5, v2(0.3, 0.1))) == 0.0);
    CHECK(path_length({v2(1, 0), v2(0, 1), v2(1, 0)}) == doctest::Approx(2 * std::sqrt(2.0)));
    CHECK(path_length({v2(1, 0)}) == 0.0);
    RngStream rng = derive_stream(2, 0);
    NodeVectors seq;
    for (int k = 0; k < 100; ++k) seq.push_back(v2(rng.uniform(), rng.uniform()));
    long double c = 0;
    for (std::size_t k = 1; k < seq.size(); ++k) {
      const long double dx = seq[k](0) - seq[k - 1](0), dy = seq[k](1) - seq[k - 1](1);
      c += std::sqrt(dx * dx + dy * dy);
    }
    CHECK(std::abs(path_length(seq) - static_cast<double>(c)) <= 1e-12);
  }

  TEST_CASE("network errors vanish at exact consensus") {
    const FixedQuadratics f(NodeVectors(3, v2(0.2, -0.1)), 1.0);
    const auto w = generate_topology(TopologySpec::parse("complete"), 3, 0).at(1);
    std::vector<LearnerState> s(3, {v2(0.5, 0.5), v2(0.5, 0.5), Vector::Zero(2)});
    const NodeVectors before = {s[0].x, s[1].x, s[2].x};
    domd_madgc_round(s, w, f, 1, MirrorMap::euclidean(), FeasibleSet::ball(2, 1), 0.5, KPolicy::paper());
    const auto e = network_errors(before, s, f, 1, MirrorMap::euclidean(), FeasibleSet::ball(2, 1), 0.5);
    CHECK(e.delta_norm <= 1e-15);
    CHECK(e.delta_small_norm <= 1e-15);
    CHECK(e.max_disagreement <= 1e-15);
  }

  TEST_CASE("network errors vanish for a single node") {
    const FixedQuadratics f({v2(0.7, 0.1)}, 1.0);
    const auto w = generate_topology(TopologySpec::parse("complete"), 1, 0).at(1);
    std::vector<LearnerState> s = {{v2(-0.2, 0.3), v2(-0.2, 0.3), Vector::Zero(2)}};
    for (std::int64_t t = 1; t <= 5; ++t) {
      const NodeVectors before = {s[0].x};
      domd_madgc_round(s, w, f, t, MirrorMap::euclidean(), FeasibleSet::ball(2, 1), 0.5, KPolicy::paper());
      const auto e = network_errors(before, s, f, t, MirrorMap::euclidean(), FeasibleSet::ball(2, 1), 0.5);
      CHECK(e.delta_norm == 0.0);
      CHECK(e.delta_small_norm == 0.0);
    }
  }

  TEST_CASE("network errors by hand on a 2-node instance") {
    // Lazy W, K = 1 and an active constraint on node 2. By hand:
    // xbar = 0.4, y = (0.2, 0.6), local grads (0.2, -1.4), g = (-0.2, -1.0),
    // x' = (0.3, clamp(1.1) = 0.8), xbar' = 0.55, gbar = -0.6,
    // MD(gbar, xbar) = 0.7 so Delta = -0.15; (1/n) grad f_t(0.4) = -0.6 so delta = 0.
    const FixedQuadratics f({Vector::Constant(1, 0.0), Vector::Constant(1, 2.0)}, 1.0);
    Matrix m(2, 2);
    m << 0.75, 0.25, 0.25, 0.75;
    const auto w = WeightMatrix::from_entries(m);
    const auto set = FeasibleSet::ball(1, 0.8);
    std::vector<LearnerState> s = {{Vector::Constant(1, 0.0), Vector::Constant(1, 0.0), Vector::Zero(1)},
                                   {Vector::Constant(1, 0.8), Vector::Constant(1, 0.8), Vector::Zero(1)}};
    const NodeVectors before = {s[0].x, s[1].x};
    domd_madgc_round(s, w, f, 1, MirrorMap::euclidean(), set, 0.5, KPolicy::single());
    CHECK(s[0].x(0) == doctest::Approx(0.3));
    CHECK(s[1].x(0) == doctest::Approx(0.8));
    const auto e = network_errors(before, s, f, 1, MirrorMap::euclidean(), set, 0.5);
    CHECK(e.delta_norm == doctest::Approx(0.15));
    CHECK(e.delta_small_norm == doctest::Approx(0.0));
    CHECK(e.max_disagreement == doctest::Approx(0.2));
    CHECK(e.mean_disagreement == doctest::Approx(0.2));
  }

  TEST_CASE("lemma1 slack examples") {
    const Vector xbar = v2(0.4, 0.0), opt = v2(0.1, 0.2);
    CHECK(lemma1_slack(xbar, opt, opt, 0.5, 0.01, 0.02) == doctest::Approx(0.5 * (xbar - opt).norm() + 0.03));
    CHECK(lemma1_slack(xbar, xbar, opt, 1.0, 0.0, 0.0) == doctest::Approx(0.0).epsilon(1e-15));
  }

  TEST_CASE("lemma1 slack is nonnegative for a single-node quadratic run") {
    Problem p;
    p.set = FeasibleSet::ball(2, 1);
    p.schedule = std::make_shared<TopologySchedule>(generate_topology(TopologySpec::parse("complete"), 1, 0));
    p.stream = synthetic_quadratic_stream(1, 2, 1.0, Drift::random_walk(0.02), p.set, 500, 4);
    SimulationOptions o;
    o.eta = 0.5;
    o.horizon = 500;
    o.init = InitPolicy::random;
    const auto r = simulate(p, o);
    // unconstrained single-node steps contract by exactly rho, so the slack is
    // zero up to rounding
    for (const auto& row : r.rows) CHECK(*row.diagnostics->lemma1_slack >= -1e-12);
  }

  TEST_CASE("regret bound examples") {
    BoundInputs in;
    in.G = 1;
    in.R = 1;
    in.mu = 1;
    in.mu_prime = 1;
    in.lambda = 1;
    in.eta = 0.5;
    in.n = 4;
    in.initial_gap = 1;
    in.path_length = 3;
    // independent evaluation
    const long double z = std::numbers::pi_v<long double> * std::numbers::pi_v<long double> / 6;
    const long double rho = 0.5L;
    const long double expected =
        2 * z + 1 / (1 - rho) + (1 + 0.5L + 0.5L) * 2 * z / (1 - rho) + 3 / (1 - rho);
    CHECK(regret_bound(in) == doctest::Approx(static_cast<double>(expected)).epsilon(1e-14));
    CHECK(regret_bound(in) == doctest::Approx(24.449).epsilon(1e-4));

    BoundInputs flat = in;
    flat.initial_gap = 0;
    flat.path_length = 0;
    CHECK(regret_bound(flat) == doctest::Approx(static_cast<double>(2 * z + 2 * 2 * z / (1 - rho))));

    BoundInputs twice = in;
    twice.path_length = 6;
    CHECK(regret_bound(twice) - regret_bound(in) == doctest::Approx(6.0));

    BoundInputs bad = in;
    bad.eta = 0.0;
    CHECK_THROWS_AS(regret_bound(bad), Error);
  }

  TEST_CASE("tracker path length is nondecreasing and regrets finite") {
    Problem p;
    p.set = FeasibleSet::ball(3, 1);
    p.schedule = std::make_shared<TopologySchedule>(generate_topology(TopologySpec::parse("cycle"), 6, 0));
    p.stream = synthetic_quadratic_stream(6, 3, 1.0, Drift::random_walk(0.03), p.set, 120, 4);
    SimulationOptions o;
    o.eta = 0.5;
    o.horizon = 120;
    const auto r = simulate(p, o);
    double prev = 0;
    for (const auto& row : r.rows) {
      CHECK(row.diagnostics->path_length_so_far >= prev);
      prev = row.diagnostics->path_length_so_far;
      CHECK(std::isfinite(row.diagnostics->cumulative_regret_x));
      CHECK(std::isfinite(row.diagnostics->cumulative_regret_y));
    }
    CHECK(*r.path_length == prev);
    CHECK(r.rows.back().diagnostics->cumulative_regret_y <= *r.bound);
  }
}
