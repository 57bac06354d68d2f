#include <doctest.h>

#include <cmath>
#include <vector>

#include "pinnet/certificates.hpp"
#include "pinnet/errors.hpp"
#include "pinnet/markov.hpp"

#include "demo_data.hpp"

using namespace pinnet;

namespace {

Matrix zero_generator(std::size_t n) { return Matrix(n, n); }

Matrix uniform_generator(double rate) {
  return assemble_generator(demo::embedded(),
                            std::vector<double>(5, rate))
      .Q;
}

FastConstants reference_constants() {
  FastConstants fc;
  fc.K1 = 8.0;
  fc.K2 = 8.5;
  fc.K3 = 7.0;
  fc.K4 = 2500.0;
  fc.lam_m = 1.0;
  fc.lam_M = 1.0;
  fc.rho = 2 * fc.K2 / fc.lam_m + 2 * fc.K1 / fc.lam_M;
  return fc;
}

}  // namespace

TEST_CASE("frozen-chain certificate on the demo family") {
  auto topo = demo::topology();
  auto w = identity_weights(5, 5);
  auto cert = theorem1_check(topo, w, zero_generator(5), demo::kAlpha,
                             demo::coupling(), Matrix::identity(3),
                             Matrix::identity(3));
  REQUIRE(cert.lmi_lambda_max.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(cert.lmi_lambda_max[i] ==
          doctest::Approx(demo::kFrozenLambdaMax[i]).epsilon(1e-9));
    CHECK(cert.lmi_lambda_max[i] <= -0.75 + 1e-9);
  }
  CHECK(cert.lmi_pass);
  CHECK(cert.rate_pass);  // zero rates are exempt
  CHECK(cert.pass);
}

TEST_CASE("switching-rate acceptance and rejection") {
  auto topo = demo::topology();
  auto w = identity_weights(5, 5);
  auto cp = demo::coupling();
  auto g = Matrix::identity(3);

  auto slow = theorem1_check(topo, w, uniform_generator(0.74), demo::kAlpha,
                             cp, g, g);
  CHECK(slow.lmi_pass);
  CHECK(slow.rate_pass);
  CHECK(slow.pass);

  auto fast = theorem1_check(topo, w, uniform_generator(10.0), demo::kAlpha,
                             cp, g, g);
  CHECK_FALSE(fast.pass);
  CHECK_FALSE(fast.rate_pass);

  // The rate route threshold sits at the smallest per-state bound.
  double thresh = fast.rate_bound[0];
  for (double b : fast.rate_bound) thresh = std::min(thresh, b);
  auto at = theorem1_check(topo, w, uniform_generator(0.999 * thresh),
                           demo::kAlpha, cp, g, g);
  CHECK(at.pass);
  auto above = theorem1_check(topo, w, uniform_generator(1.001 * thresh),
                              demo::kAlpha, cp, g, g);
  CHECK_FALSE(above.pass);
}

TEST_CASE("certificate input validation") {
  auto topo = demo::topology();
  auto g = Matrix::identity(3);

  LyapunovWeights bad;
  bad.P.assign(5, Matrix::identity(5));
  bad.P[2](0, 1) = 0.3;  // off-diagonal weight
  CHECK_THROWS_AS((void)theorem1_check(topo, bad, zero_generator(5), 1.0,
                                       demo::coupling(), g, g),
                  ValidationError);

  LyapunovWeights neg;
  neg.P.assign(5, Matrix::identity(5));
  neg.P[0](1, 1) = -1.0;
  CHECK_THROWS_AS((void)theorem1_check(topo, neg, zero_generator(5), 1.0,
                                       demo::coupling(), g, g),
                  ValidationError);

  CHECK_THROWS_AS(
      (void)theorem1_check(topo, identity_weights(5, 5), zero_generator(5),
                           1.0, {0.0, 1.0}, g, g),
      ValidationError);  // kappa must be positive
}

TEST_CASE("guaranteed decay rate") {
  LyapunovWeights eye = identity_weights(1, 2);
  CHECK(decay_rate(eye, 0.5, Matrix::identity(3)) == doctest::Approx(1.0));

  LyapunovWeights twos;
  twos.P.push_back(Matrix::diagonal({2, 2}));
  CHECK(decay_rate(twos, 0.5, Matrix::identity(3)) == doctest::Approx(1.0));

  auto demo_w = identity_weights(5, 5);
  CHECK(decay_rate(demo_w, demo::kBeta, Matrix::identity(3)) ==
        doctest::Approx(1.0));
}

TEST_CASE("weight construction from the coupling family") {
  // Symmetric coupling: the left null vector is uniform.
  Matrix ring(4, 4);
  for (int i = 0; i < 4; ++i) {
    ring(i, i) = -2;
    ring(i, (i + 1) % 4) = 1;
    ring(i, (i + 3) % 4) = 1;
  }
  auto sym_topo = make_switched_topology(
      {ring}, {Matrix::diagonal({1, 0, 0, 0})});
  auto w = theorem2_construct(sym_topo);
  REQUIRE(w.P.size() == 1);
  for (int i = 0; i < 4; ++i)
    CHECK(w.P[0](i, i) == doctest::Approx(0.25).epsilon(1e-12));

  // First demo state: weights equal its left null vector.
  auto one_state = make_switched_topology({demo::topology().L[0]},
                                          {demo::topology().C[0]});
  auto wd = theorem2_construct(one_state);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(wd.P[0](i, i) ==
          doctest::Approx(demo::kPerronL1[i]).epsilon(1e-9));

  // {P L}^s is negative semidefinite with a simple zero eigenvalue.
  auto pl = symmetric_part(wd.P[0] * demo::topology().L[0]);
  auto ev = sym_eigenvalues(pl);
  CHECK(ev.back() <= 1e-9);
  CHECK(ev[ev.size() - 2] < 0);

  // The full demo family contains a state without strong connectivity.
  CHECK_THROWS_AS((void)theorem2_construct(demo::topology()),
                  ConnectivityError);
}

TEST_CASE("admissible rate bound") {
  // Single node, full pinning: alpha I + kappa L - kappa eps C = -0.75.
  auto tiny = make_switched_topology({Matrix(1, 1)},
                                     {Matrix::diagonal({1.0})});
  auto b = theorem2_rate_bound(tiny, identity_weights(1, 1), 1.0,
                               {1.0, 1.75});
  REQUIRE(b.size() == 1);
  CHECK(b[0] == doctest::Approx(0.75).epsilon(1e-12));

  // Scaling every weight leaves the bound unchanged.
  LyapunovWeights scaled;
  scaled.P.push_back(Matrix::diagonal({7.0}));
  auto bs = theorem2_rate_bound(tiny, scaled, 1.0, {1.0, 1.75});
  CHECK(bs[0] == doctest::Approx(b[0]).epsilon(1e-12));

  // Demo family with identity weights: bounds match the negated frozen
  // eigenvalues, and running the chain just under the smallest bound passes
  // the full certificate.
  auto topo = demo::topology();
  auto bounds = theorem2_rate_bound(topo, identity_weights(5, 5), demo::kAlpha,
                                    demo::coupling());
  REQUIRE(bounds.size() == 5);
  double smallest = bounds[0];
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(bounds[i] ==
          doctest::Approx(-demo::kFrozenLambdaMax[i]).epsilon(1e-9));
    smallest = std::min(smallest, bounds[i]);
  }
  auto cert = theorem1_check(topo, identity_weights(5, 5),
                             uniform_generator(0.99 * smallest), demo::kAlpha,
                             demo::coupling(), Matrix::identity(3),
                             Matrix::identity(3));
  CHECK(cert.pass);

  // A positive-definite per-state form has no admissible rate.
  auto unpinned = make_switched_topology({Matrix(1, 1)},
                                         {Matrix::diagonal({0.0})});
  CHECK_THROWS_AS((void)theorem2_rate_bound(unpinned, identity_weights(1, 1),
                                            1.0, {1.0, 1.0}),
                  CertificateError);
}

TEST_CASE("family averages") {
  auto topo = demo::topology();

  // Degenerate distribution returns the selected state exactly.
  std::vector<double> point{0, 0, 1, 0, 0};
  auto [l3, c3] = average_matrices(point, topo);
  CHECK(l3 == topo.L[2]);
  CHECK(c3 == topo.C[2]);

  // Two-state mean.
  std::vector<double> half{0.5, 0.5, 0, 0, 0};
  auto [lm, cm] = average_matrices(half, topo);
  CHECK(lm(0, 3) ==
        doctest::Approx(0.5 * (topo.L[0](0, 3) + topo.L[1](0, 3))));
  CHECK(cm(2, 2) == 0.5);
  for (std::size_t i = 0; i < 5; ++i) {
    double row = 0;
    for (std::size_t j = 0; j < 5; ++j) row += lm(i, j);
    CHECK(row == 0.0);  // exact rebalance
  }

  std::vector<double> bad{0.5, 0.5, 0.5, -0.5, 0};
  CHECK_THROWS_AS((void)average_matrices(bad, topo), ValidationError);
}

TEST_CASE("fast-switching constants on a single state") {
  // One switch state: no deviation from the average, so K4 vanishes and the
  // averaged form equals the per-state form.
  auto one = make_switched_topology({demo::topology().L[0]},
                                    {demo::topology().C[0]});
  auto dyn = demo::dynamics();
  auto fc = fast_constants(one, {1.0}, Matrix::identity(5), dyn,
                           demo::coupling(), Matrix::identity(3),
                           Matrix::identity(3));
  CHECK(fc.K4 == 0.0);
  CHECK(fc.K1 == doctest::Approx(demo::kBeta));
  CHECK(fc.K3 ==
        doctest::Approx(demo::kFrozenLambdaMax[0]).epsilon(1e-9));
  auto [lbar, cbar] = average_matrices({1.0}, one);
  CHECK(averaged_form_lambda_max(lbar, cbar, Matrix::identity(5), demo::kAlpha,
                                 demo::coupling(), Matrix::identity(3),
                                 Matrix::identity(3)) ==
        doctest::Approx(fc.K3).epsilon(1e-12));
  CHECK(fc.rho == doctest::Approx(2 * fc.K2 + 2 * fc.K1).epsilon(1e-12));
}

TEST_CASE("window condition") {
  auto fc = reference_constants();
  CHECK(fc.rho == doctest::Approx(33.0));

  double at3 = delta_condition(fc, 3e-4);
  double at4 = delta_condition(fc, 4e-4);
  CHECK(at3 < 0);
  CHECK(at4 > 0);
  CHECK(at3 == doctest::Approx(-7.24e-5).epsilon(2e-3));
  CHECK(at4 == doctest::Approx(5.28e-6).epsilon(2e-3));

  // Degenerate deviation magnitude: the condition is negative for every
  // window, with no overflow at large widths.
  auto clean = fc;
  clean.K4 = 0.0;
  CHECK(delta_condition(clean, 10.0) < 0);
  CHECK(std::isfinite(delta_condition(clean, 1e6)));
}

TEST_CASE("window search") {
  auto fc = reference_constants();
  auto ds = feasible_delta(fc, 750);
  REQUIRE(ds.feasible);
  CHECK(ds.delta_star > 3.9e-4);
  CHECK(ds.delta_star < 4.0e-4);
  CHECK(delta_condition(fc, ds.delta_star * (1 - 1e-6)) < 0);
  CHECK(delta_condition(fc, ds.delta_star * (1 + 1e-6)) >= 0);
  CHECK(ds.q_min_required ==
        doctest::Approx(1.0 / (750 * ds.delta_star)).epsilon(1e-12));

  auto cert = fast_check(fc, 4e-4, 750);
  CHECK_FALSE(cert.pass);
  CHECK(cert.q_min_required ==
        doctest::Approx(1.0 / (750 * 4e-4)).epsilon(1e-12));
  auto ok = fast_check(fc, 3e-4, 750);
  CHECK(ok.pass);
  CHECK(ok.lhs < 0);

  auto flat = fc;
  flat.K3 = flat.K1;  // no contraction margin left
  auto none = feasible_delta(flat, 750);
  CHECK_FALSE(none.feasible);
  CHECK_FALSE(none.note.empty());
}
