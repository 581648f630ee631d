#include <cmath>

#include "doctest.h"
#include "domd/error.hpp"
#include "domd/geometry.hpp"
#include "domd/rng.hpp"
#include "oracles.hpp"

using namespace domd;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

std::vector<double> stdvec(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector random_vector(RngStream& rng, std::size_t d, double scale) {
  Vector v(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = scale * (2 * rng.uniform() - 1);
  return v;
}

Vector random_simplex_point(RngStream& rng, std::size_t d, double eps) {
  Vector w(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = -std::log(1 - rng.uniform());
  w /= w.sum();
  // shrink into the eps-interior
  return (1 - d * eps) * w + Vector::Constant(w.size(), eps);
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("mirror map constants") {
    const auto e = MirrorMap::euclidean();
    CHECK(e.mu() == 1.0);
    CHECK(e.mu_prime() == 1.0);
    const auto h = MirrorMap::negative_entropy(1e-3, 4);
    CHECK(h.mu() == 1.0);
    CHECK(h.mu_prime() == doctest::Approx(1000.0));
    CHECK_THROWS_AS(MirrorMap::negative_entropy(0.5, 4), Error);
    CHECK_THROWS_AS(MirrorMap::negative_entropy(0.0, 4), Error);
    CHECK(MirrorMap::parse("entropy", 1e-6, 3).kind() == MirrorMap::Kind::negative_entropy);
    CHECK_THROWS_AS(MirrorMap::parse("l1", 1e-6, 3), Error);
  }

  TEST_CASE("conjugate gradient inverts the gradient") {
    RngStream rng = derive_stream(1, 0);
    const auto h = MirrorMap::negative_entropy(1e-6, 3);
    for (int i = 0; i < 50; ++i) {
      const Vector x = random_simplex_point(rng, 3, 1e-6);
      CHECK((h.conjugate_gradient(h.gradient(x)) - x).norm() <= 1e-14);
      const Vector z = random_vector(rng, 3, 4);
      CHECK((MirrorMap::euclidean().conjugate_gradient(z) - z).norm() == 0.0);
    }
  }

  TEST_CASE("bregman examples") {
    CHECK(bregman(MirrorMap::euclidean(), vec({1, 0}), vec({0, 0})) == doctest::Approx(0.5));
    const auto h = MirrorMap::negative_entropy(1e-6, 2);
    const long double kl = 0.5L * std::log(0.5L / 0.9L) + 0.5L * std::log(0.5L / 0.1L);
    CHECK(bregman(h, vec({0.5, 0.5}), vec({0.9, 0.1})) == doctest::Approx(static_cast<double>(kl)).epsilon(1e-12));
    CHECK(std::abs(static_cast<double>(kl) - 0.510826) < 1e-6);
    CHECK(bregman(h, vec({0.3, 0.7}), vec({0.3, 0.7})) == doctest::Approx(0.0));
    CHECK_THROWS_AS(bregman(h, vec({0.0, 1.0}), vec({0.5, 0.5})), Error);
  }

  TEST_CASE("bregman is at least mu/2 |x - y|^2") {
    RngStream rng = derive_stream(2, 0);
    const auto h = MirrorMap::negative_entropy(1e-6, 4);
    for (int i = 0; i < 500; ++i) {
      const Vector x = random_simplex_point(rng, 4, 1e-6), y = random_simplex_point(rng, 4, 1e-6);
      CHECK(bregman(h, x, y) >= 0.5 * (x - y).squaredNorm() - 1e-12);
      const Vector a = random_vector(rng, 4, 3), b = random_vector(rng, 4, 3);
      CHECK(bregman(MirrorMap::euclidean(), a, b) >= 0.5 * (a - b).squaredNorm() - 1e-12);
    }
  }

  TEST_CASE("projection examples") {
    CHECK((project(FeasibleSet::ball(2, 1), vec({3, 4})) - vec({0.6, 0.8})).norm() <= 1e-15);
    const Vector s = vec({0.2, 0.3, 0.5});
    CHECK(project(FeasibleSet::simplex(3, 0), s) == s);
    CHECK(project(FeasibleSet::box(2, 0, 1), vec({-1, 2})) == vec({0, 1}));
  }

  TEST_CASE("projection is idempotent and nonexpansive") {
    RngStream rng = derive_stream(3, 0);
    const std::vector<FeasibleSet> sets = {FeasibleSet::ball(3, 1.5), FeasibleSet::box(3, -1, 0.5),
                                           FeasibleSet::simplex(3, 0), FeasibleSet::simplex(3, 1e-3)};
    for (const auto& set : sets) {
      for (int i = 0; i < 300; ++i) {
        const Vector x = random_vector(rng, 3, 3), y = random_vector(rng, 3, 3);
        const Vector px = project(set, x), py = project(set, y);
        CHECK(set.contains(px));
        CHECK((project(set, px) - px).norm() <= 1e-12);
        CHECK((px - py).norm() <= (x - y).norm() + 1e-12);
      }
    }
  }

  TEST_CASE("simplex projection matches a projected-gradient oracle") {
    RngStream rng = derive_stream(4, 0);
    const auto set = FeasibleSet::simplex(4, 0.01);
    for (int i = 0; i < 50; ++i) {
      const Vector x = random_vector(rng, 4, 2);
      // oracle: minimize |z - x|^2 / 2 over the eps-simplex by coordinate-pair
      // golden search is overkill; use the KKT characterization directly:
      // z_i = max(eps, x_i - tau) with sum z = 1, tau by bisection
      double lo = -10, hi = 10;
      for (int it = 0; it < 200; ++it) {
        const double tau = (lo + hi) / 2;
        double s = 0;
        for (int c = 0; c < 4; ++c) s += std::max(0.01, x(c) - tau);
        (s > 1 ? lo : hi) = tau;
      }
      const Vector p = project(set, x);
      for (int c = 0; c < 4; ++c) CHECK(p(c) == doctest::Approx(std::max(0.01, x(c) - lo)).epsilon(1e-10));
    }
  }

  TEST_CASE("radius matches the analytic max norm") {
    CHECK(FeasibleSet::ball(3, 2.5).radius() == 2.5);
    CHECK(FeasibleSet::box(4, -1, 3).radius() == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(FeasibleSet::simplex(3, 0).radius() == doctest::Approx(1.0));
    // vertex of the eps-simplex: (1 - 2 eps, eps, eps)
    const double eps = 0.01;
    CHECK(FeasibleSet::simplex(3, eps).radius() ==
          doctest::Approx(std::sqrt((1 - 2 * eps) * (1 - 2 * eps) + 2 * eps * eps)).epsilon(1e-15));
  }

  TEST_CASE("feasible set parsing") {
    CHECK(FeasibleSet::parse("ball:2", 3, 0).to_string() == "ball:2");
    CHECK(FeasibleSet::parse("box:-1:0.5", 3, 0).kind() == FeasibleSet::Kind::box);
    CHECK(FeasibleSet::parse("simplex", 3, 1e-6).kind() == FeasibleSet::Kind::simplex);
    CHECK_THROWS_AS(FeasibleSet::parse("ball:-1", 3, 0), Error);
    CHECK_THROWS_AS(FeasibleSet::parse("box:1:0", 3, 0), Error);
    CHECK_THROWS_AS(FeasibleSet::parse("cube", 3, 0), Error);
  }

  TEST_CASE("mirror step examples") {
    const auto e = MirrorMap::euclidean();
    CHECK((mirror_descent_step(e, FeasibleSet::ball(2, 10), 0.1, vec({1, 2}), vec({0, 0})) - vec({-0.1, -0.2})).norm() <=
          1e-15);

    const auto h = MirrorMap::negative_entropy(1e-6, 2);
    const auto simplex = FeasibleSet::simplex(2, 1e-6);
    const Vector g = vec({0, std::log(9.0)}), y = vec({0.5, 0.5});
    const Vector x = mirror_descent_step(h, simplex, 1.0, g, y);
    CHECK((x - vec({0.9, 0.1})).norm() <= 1e-12);
    const auto grid = oracle::entropy_step_search(stdvec(g), stdvec(y), 1.0, 1e-6);
    CHECK(std::abs(x(0) - grid[0]) <= 1e-4);

    const Vector z = vec({0.2, 0.8});
    CHECK((mirror_descent_step(h, simplex, 0.7, Vector::Zero(2), z) - z).norm() <= 1e-14);
    const Vector b = vec({0.3, -0.4});
    CHECK(mirror_descent_step(e, FeasibleSet::ball(2, 1), 0.7, Vector::Zero(2), b) == b);
  }

  TEST_CASE("mirror step errors") {
    const auto e = MirrorMap::euclidean();
    const auto ball = FeasibleSet::ball(2, 1);
    CHECK_THROWS_AS(mirror_descent_step(e, ball, 0.0, vec({1, 1}), vec({0, 0})), Error);
    CHECK_THROWS_AS(mirror_descent_step(e, ball, -1.0, vec({1, 1}), vec({0, 0})), Error);
    CHECK_THROWS_AS(mirror_descent_step(e, ball, 0.1, vec({1, 1}), vec({3, 0})), Error);
    CHECK_THROWS_AS(mirror_descent_step(e, ball, 0.1, vec({std::nan(""), 1}), vec({0, 0})), Error);
    CHECK_THROWS_AS(mirror_descent_step(MirrorMap::negative_entropy(1e-6, 2), ball, 0.1, vec({1, 1}), vec({0, 0})),
                    Error);
  }

  TEST_CASE("euclidean step equals project(y - eta g) and matches an inner solver") {
    RngStream rng = derive_stream(5, 0);
    const auto e = MirrorMap::euclidean();
    for (int i = 0; i < 200; ++i) {
      const std::size_t d = 2 + i % 4;
      const bool use_ball = i % 2 == 0;
      const auto set = use_ball ? FeasibleSet::ball(d, 1.0) : FeasibleSet::box(d, -0.5, 1.0);
      const Vector y = project(set, random_vector(rng, d, 1.5));
      const Vector g = random_vector(rng, d, 3);
      const double eta = 0.05 + 1.5 * rng.uniform();
      const Vector x = mirror_descent_step(e, set, eta, g, y);
      CHECK((x - project(set, y - eta * g)).norm() <= 1e-12);

      const auto gy = stdvec(g), yy = stdvec(y);
      auto f = [&](const std::vector<double>& z) {
        double v = 0;
        for (std::size_t c = 0; c < d; ++c) v += z[c] * gy[c] + (z[c] - yy[c]) * (z[c] - yy[c]) / (2 * eta);
        return v;
      };
      auto grad = [&](const std::vector<double>& z) {
        std::vector<double> out(d);
        for (std::size_t c = 0; c < d; ++c) out[c] = gy[c] + (z[c] - yy[c]) / eta;
        return out;
      };
      auto proj = [&](const std::vector<double>& z) {
        return use_ball ? oracle::ball_projection(z, 1.0) : oracle::box_projection(z, -0.5, 1.0);
      };
      const auto ref = oracle::projected_gradient(f, grad, proj, yy);
      for (std::size_t c = 0; c < d; ++c) CHECK(std::abs(x(c) - ref[c]) <= 1e-4);
    }
  }

  TEST_CASE("entropy step agrees with a direct search on the 2- and 3-simplex") {
    RngStream rng = derive_stream(6, 0);
    for (int i = 0; i < 100; ++i) {
      const std::size_t d = 2 + i % 2;
      const double eps = i % 3 == 0 ? 1e-6 : 1e-3;
      const auto h = MirrorMap::negative_entropy(eps, d);
      const auto set = FeasibleSet::simplex(d, eps);
      const Vector y = random_simplex_point(rng, d, eps);
      const Vector g = random_vector(rng, d, 4);
      const double eta = 0.1 + 2 * rng.uniform();
      const Vector x = mirror_descent_step(h, set, eta, g, y);
      CHECK(set.contains(x));
      const auto ref = oracle::entropy_step_search(stdvec(g), stdvec(y), eta, eps);
      for (std::size_t c = 0; c < d; ++c) CHECK(std::abs(x(c) - ref[c]) <= 1e-4);
    }
  }

  TEST_CASE("validate_step_size examples") {
    const auto e = MirrorMap::euclidean();
    CHECK(validate_step_size(0.5, 1, e) == doctest::Approx(0.5));
    CHECK(validate_step_size(0.4, 2, e) == doctest::Approx(0.2));
    CHECK_THROWS_WITH_AS(validate_step_size(1.2, 1, e), doctest::Contains("(0, 1)"), Error);
    CHECK_THROWS_AS(validate_step_size(0.0, 1, e), Error);
    CHECK_THROWS_AS(validate_step_size(0.5, 0, e), Error);
  }

  TEST_CASE("validate_step_size returns rho in (0, 1) exactly when it succeeds") {
    RngStream rng = derive_stream(7, 0);
    const auto h = MirrorMap::negative_entropy(0.1, 3);
    for (int i = 0; i < 1000; ++i) {
      const double eta = 15 * rng.uniform();
      const double lambda = 0.1 + 3 * rng.uniform();
      const auto& map = i % 2 ? h : MirrorMap::euclidean();
      const double lo = (map.mu_prime() - map.mu()) / lambda, hi = map.mu_prime() / lambda;
      if (eta > lo && eta < hi) {
        const double rho = validate_step_size(eta, lambda, map);
        CHECK(rho > 0.0);
        CHECK(rho < 1.0);
      } else {
        CHECK_THROWS_AS(validate_step_size(eta, lambda, map), Error);
      }
    }
  }
}
