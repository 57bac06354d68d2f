#include <doctest.h>

#include <cmath>
#include <vector>

#include "pinnet/dynamics.hpp"
#include "pinnet/rng.hpp"

using namespace pinnet;

TEST_CASE("saturating activation") {
  CHECK(activation(0.3) == 0.3);
  CHECK(activation(-0.9) == -0.9);
  CHECK(activation(2.0) == 1.0);
  CHECK(activation(-5.0) == -1.0);
  CHECK(activation(1.0) == 1.0);
}

TEST_CASE("three-cell field") {
  CnnParams p = default_cnn();
  REQUIRE(p.T.rows == 3);
  CHECK(p.T(0, 0) == 1.25);
  CHECK(p.T(0, 1) == -3.2);
  CHECK(p.T(1, 2) == -4.4);
  CHECK(p.T(2, 1) == 4.4);
  CHECK(p.D(1, 1) == 1.0);

  // All cells saturated at +1: dx = -x + T holds rowwise.
  std::vector<double> dx = cnn_rhs({2.0, 2.0, 2.0}, p);
  CHECK(dx[0] == doctest::Approx(-7.15).epsilon(1e-12));
  CHECK(dx[1] == doctest::Approx(-8.5).epsilon(1e-12));
  CHECK(dx[2] == doctest::Approx(0.2).epsilon(1e-12));

  // Interior point: the activation is the identity there.
  std::vector<double> x{0.1, -0.2, 0.3};
  std::vector<double> want(3, 0.0);
  for (int i = 0; i < 3; ++i) {
    want[i] = -x[i];
    for (int j = 0; j < 3; ++j) want[i] += p.T(i, j) * x[j];
  }
  std::vector<double> got = cnn_rhs(x, p);
  for (int i = 0; i < 3; ++i)
    CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-14));
}

TEST_CASE("dynamics spec wrapper") {
  DynamicsSpec spec = cnn_dynamics(default_cnn(), Matrix::identity(3),
                                   Matrix::identity(3), 1.0, 0.5, 4.68);
  CHECK(spec.n == 3);
  CHECK(spec.alpha == 1.0);
  CHECK(spec.beta == 0.5);
  CHECK(spec.Lf == 4.68);
  double x[3] = {2, 2, 2};
  double dx[3];
  spec.f(0.0, x, dx);
  CHECK(dx[0] == doctest::Approx(-7.15).epsilon(1e-12));
}

TEST_CASE("contraction falsifier") {
  Rng rng(11, 0);
  std::vector<double> lo(3, -2.0), hi(3, 2.0);

  // Weak offset: violations exist and the sampler finds them.
  DynamicsSpec weak = cnn_dynamics(default_cnn(), Matrix::identity(3),
                                   Matrix::identity(3), 1.0, 0.5, 0.0);
  QuadReport r = quad_falsifier(weak, 20000, lo, hi, rng);
  CHECK(r.samples == 20000);
  CHECK(r.violations > 0);
  CHECK(r.worst_margin > 0);

  // Offset above the global Lipschitz level: provably no violation anywhere,
  // so the sampler must find none.
  DynamicsSpec strong = cnn_dynamics(default_cnn(), Matrix::identity(3),
                                     Matrix::identity(3), 10.0, 0.5, 0.0);
  Rng rng2(11, 1);
  QuadReport r2 = quad_falsifier(strong, 20000, lo, hi, rng2);
  CHECK(r2.violations == 0);
  CHECK(r2.worst_margin <= 0);
}

TEST_CASE("field slope bound") {
  LipschitzReport rep = lipschitz_bound(default_cnn());
  CHECK(rep.safe_bound == doctest::Approx(8.009858155).epsilon(1e-6));
  for (double v : rep.pattern_norms) {
    CHECK(v > 0);
    CHECK(v <= rep.safe_bound + 1e-9);
  }
}
