#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "pinnet/dynamics.hpp"
#include "pinnet/markov.hpp"
#include "pinnet/matlin.hpp"
#include "pinnet/switchnet.hpp"

namespace pinnet {

// One positive diagonal weight matrix per switch state.
struct LyapunovWeights {
  std::vector<Matrix> P;
};

LyapunovWeights identity_weights(std::size_t states, std::size_t nodes);

// Slow-switching stability certificate.  Two routes are evaluated:
//   exact  M_i = {P_i[aI+kL(i)-keC(i)]}^s term in Kronecker form plus the
//          generator coupling sum, checked negative semidefinite per state;
//   rate   q_i against the admissible bound derived from the frozen form,
// which is the sufficient inequality the exact condition follows from.  With
// equal weights the generator term of the exact form cancels identically, so
// only the rate route can reject a too-fast chain; `pass` requires both.
// States with q_i = 0 never switch and are exempt from the rate route.
struct SlowCertificate {
  std::vector<double> lmi_lambda_max;  // per-state largest eigenvalue
  bool lmi_pass = false;
  std::vector<double> rate_bound;      // admissible switching rate per state
  std::vector<double> q;               // exit rates actually checked
  bool rate_pass = false;
  bool pass = false;
  double decay = 0;                    // guaranteed mean-square rate, if set
  double tol = 0;                      // semidefiniteness margin used
};

// q is the generator matrix; a zero matrix means a frozen (never switching)
// chain.  Off-diagonal entries must be nonnegative and rows must sum to zero.
// tol < 0 selects the default margin 1e-9*max(1, |M_i|_maxabs) per state.
SlowCertificate theorem1_check(const SwitchedTopology& topo,
                               const LyapunovWeights& weights, const Matrix& q,
                               double alpha, const CouplingParams& cp,
                               const Matrix& g, const Matrix& gamma,
                               double tol = -1);
SlowCertificate theorem1_check(const SwitchedTopology& topo,
                               const LyapunovWeights& weights,
                               const MarkovGenerator& gen, double alpha,
                               const CouplingParams& cp, const Matrix& g,
                               const Matrix& gamma, double tol = -1);

// Guaranteed exponential rate 2*beta*min_{j,i}(P_j)_ii / max_i lam_max(P_i x G).
double decay_rate(const LyapunovWeights& weights, double beta, const Matrix& g);

// Diagonal weights from the positive left null vectors of the coupling
// matrices.  Requires every L(i) strongly connected; verifies that each
// {P_i L(i)}^s is negative semidefinite with a simple zero eigenvalue.
LyapunovWeights theorem2_construct(const SwitchedTopology& topo);

// Per-state maximal admissible switching rate
//   -lam_max({P_i[aI+kL(i)-keC(i)]}^s) / max_j lam_max(P_j).
// Throws CertificateError when some per-state form is not negative definite.
std::vector<double> theorem2_rate_bound(const SwitchedTopology& topo,
                                        const LyapunovWeights& weights,
                                        double alpha,
                                        const CouplingParams& cp);

// Convex combinations of the coupling and pinning families, with the coupling
// row sums rebalanced to exact zeros and pinning weights clamped to [0,1].
std::pair<Matrix, Matrix> average_matrices(const std::vector<double>& pi,
                                           const SwitchedTopology& topo);

// Constants of the fast-switching certificate.
struct FastConstants {
  double K1 = 0;
  double K2 = 0;
  double K3 = 0;
  double K4 = 0;
  double rho = 0;
  double lam_m = 1;  // smallest eigenvalue of P x G
  double lam_M = 1;  // largest eigenvalue of P x G
};

// K1 = beta*min p_ii; K2 = max over states of the spectral radius of the
// symmetric per-state form; K3 = the same form built on the average matrices;
// K4 = mn[max_i |A(i)|(1+Lf^2) + max_{i,j} |A(i)((kL(j)-keC(j)) x Gamma)|]
// with |.| the entrywise max and A(i) the symmetric deviation-from-average
// form; rho = 2K2/lam_m + 2K1/lam_M.
FastConstants fast_constants(const SwitchedTopology& topo,
                             const std::vector<double>& pi, const Matrix& p,
                             const DynamicsSpec& dyn, const CouplingParams& cp,
                             const Matrix& g, const Matrix& gamma);

// lam_max of {P(aI + k*lbar - ke*cbar) x G*Gamma}^s; the K3 building block,
// usable on average matrices that do not come from an explicit family.
double averaged_form_lambda_max(const Matrix& lbar, const Matrix& cbar,
                                const Matrix& p, double alpha,
                                const CouplingParams& cp, const Matrix& g,
                                const Matrix& gamma);

// Left-hand side of the fast-switching window condition
//   -((K1-K3)lam_m/(rho*lam_M))(1-e^{-rho*D}) +
//    (K4*lam_M*D/(rho*lam_m))(e^{rho*D}-1);
// the certificate holds iff the value is negative.
double delta_condition(const FastConstants& fc, double delta);

struct FastSwitchCertificate {
  FastConstants constants;
  double delta = 0;
  std::size_t r_steps = 0;
  double lhs = 0;
  double q_min_required = 0;  // 1/(r*delta)
  bool pass = false;          // lhs < 0
};

FastSwitchCertificate fast_check(const FastConstants& fc, double delta,
                                 std::size_t r_steps);

struct DeltaSearch {
  bool feasible = false;
  double delta_star = 0;      // largest window with a negative condition
  double q_min_required = 0;  // 1/(r*delta_star)
  std::string note;
};

// Log-spaced scan over [1e-8, 1] then bisection to 1e-12 relative accuracy
// on the sign boundary.  Requires K1 > K3 for feasibility.
DeltaSearch feasible_delta(const FastConstants& fc, std::size_t r_steps);

}  // namespace pinnet
