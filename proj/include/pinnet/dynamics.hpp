#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "pinnet/matlin.hpp"
#include "pinnet/rng.hpp"

namespace pinnet {

// Saturating piecewise-linear activation (|s+1| − |s−1|)/2: identity on
// [−1, 1], clamped outside.
double activation(double s);

// Three-cell network with a double-scroll chaotic attractor: dx/dt = −Dx + Tg(x).
struct CnnParams {
  Matrix D;  // diagonal decay
  Matrix T;  // interconnection weights
};

CnnParams default_cnn();

void cnn_rhs(const CnnParams& params, const double* x, double* dx);
std::vector<double> cnn_rhs(const std::vector<double>& x,
                            const CnnParams& params);

// A node vector field together with the data its membership checks need.
// The field signature carries t for generality; the built-in fields are
// autonomous.
struct DynamicsSpec {
  std::size_t n = 0;
  std::function<void(double t, const double* x, double* dx)> f;
  Matrix Gamma;      // inner coupling
  Matrix G;          // quadratic-form weight, positive definite
  double alpha = 0;  // linear offset coefficient in the membership inequality
  double beta = 0;   // required contraction margin, > 0
  double Lf = 0;     // Lipschitz constant used by the fast-switching bound
};

DynamicsSpec cnn_dynamics(const CnnParams& params, const Matrix& gamma,
                          const Matrix& g, double alpha, double beta,
                          double lf);

// Sampling check of the contraction inequality
//   (ξ−ζ)ᵀG[f(ξ)−f(ζ)−αΓ(ξ−ζ)] ≤ −β(ξ−ζ)ᵀ(ξ−ζ)
// on random pairs in a box.  Finds counterexamples; never proves membership.
struct QuadReport {
  std::size_t samples = 0;
  std::size_t violations = 0;
  // Largest value of lhs/‖ξ−ζ‖² + β over the sample; positive means the
  // inequality failed at that pair.
  double worst_margin = 0;
};

QuadReport quad_falsifier(const DynamicsSpec& spec, std::size_t samples,
                          const std::vector<double>& box_lo,
                          const std::vector<double>& box_hi, Rng& rng);

// Lipschitz data for −Dx + Tg(x).  safe_bound = ‖D‖₂ + ‖T‖₂ is a provable
// global bound.  pattern_norms are ‖−D + T·diag(σ)‖₂ over the 8 activation
// slope patterns σ ∈ {0,1}³ (diagnostic only: the true constant of the
// piecewise field need not be attained at a fixed pattern).
struct LipschitzReport {
  double safe_bound = 0;
  std::array<double, 8> pattern_norms{};
};

LipschitzReport lipschitz_bound(const CnnParams& params);

}  // namespace pinnet
