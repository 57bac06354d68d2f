#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "pinnet/dynamics.hpp"
#include "pinnet/markov.hpp"
#include "pinnet/matlin.hpp"

namespace pinnet {

// Indexed family of coupling matrices and pinning matrices, one pair per
// switch state.
struct SwitchedTopology {
  std::vector<Matrix> L;  // Metzler zero-row-sum, m×m
  std::vector<Matrix> C;  // diagonal, entries in {0,1}

  std::size_t states() const { return L.size(); }
  std::size_t nodes() const { return L.empty() ? 0 : L.front().rows; }
};

// Validates family shapes and contents; throws ValidationError.
SwitchedTopology make_switched_topology(std::vector<Matrix> l,
                                        std::vector<Matrix> c);

struct CouplingParams {
  double kappa = 0;    // coupling strength, > 0
  double epsilon = 0;  // pinning feedback gain, > 0

  bool operator==(const CouplingParams&) const = default;
};

// Stacked node states x (m·n) plus the target s (n).
struct SystemState {
  std::vector<double> x;
  std::vector<double> s;
  double t = 0;
};

// Node i: f(xⁱ,t) + κ Σ_j l_ij Γ xʲ + κ ε c_i Γ (s − xⁱ); target: ds = f(s,t).
// Low-level form used by both the Markov-switched and the mobile simulators.
void coupled_rhs_into(const Matrix& l, const std::vector<double>& c_diag,
                      const DynamicsSpec& dyn, const CouplingParams& cp,
                      double t, const double* x, const double* s, double* dx,
                      double* ds);

// Derivative of (x, s) under the topology of switch state sigma.
std::pair<std::vector<double>, std::vector<double>> coupled_rhs(
    const SystemState& state, std::size_t sigma, const SwitchedTopology& topo,
    const DynamicsSpec& dyn, const CouplingParams& cp);

// Classical fourth-order Runge-Kutta update of y at time t by step h.
// Throws NumericError if the update produces a non-finite state.
std::vector<double> rk4_step(
    const std::function<void(double, const double*, double*)>& rhs, double t,
    const std::vector<double>& y, double h);

// Largest node deviation, measured componentwise: max_i max_k |xⁱ_k − s_k|.
double varsigma(const SystemState& state);

struct TrajectoryRecord {
  std::vector<double> t;
  std::vector<std::size_t> state;      // active switch state, 0-based
  std::vector<double> vs;              // ς at each sample
  std::vector<double> msq;             // mean over nodes of ‖xⁱ−s‖₂²
  std::vector<std::vector<double>> node_err;  // per-node max-abs, optional
  bool record_node_err = false;
  bool diverged = false;
  double h = 0;
};

struct SimulateOptions {
  std::size_t stride = 0;        // record every stride-th step; 0 = auto
  bool record_node_err = false;
  double divergence_guard = 1e12;
};

// Fixed-step integration with steps split at every switch time, so no step
// mixes two topologies.  The target trajectory is co-integrated with the same
// step sequence.  Stops early (flagged) when ‖x‖∞ exceeds the guard.
TrajectoryRecord simulate(const SwitchedTopology& topo, const DynamicsSpec& dyn,
                          const CouplingParams& cp, const SwitchPath& path,
                          const std::vector<double>& x0,
                          const std::vector<double>& s0, double h,
                          double horizon, const SimulateOptions& opts = {});

// CSV with header `t,sigma_state,varsigma[,err_node_1..err_node_m]`.
std::string trajectory_csv(const TrajectoryRecord& rec);

struct RateFit {
  double rate = 0;       // slope of ln(series) over the fit window
  bool valid = false;    // false when fewer than two usable samples
};

// Least-squares exponential-rate fit of a positive series over [t0, t1].
// Non-positive samples (fully converged error) are skipped.
RateFit fit_exponential_rate(const std::vector<double>& t,
                             const std::vector<double>& series, double t0,
                             double t1);

struct EnsembleMsq {
  std::vector<double> t;
  std::vector<double> msq;          // ensemble average over runs
  double fitted_rate = 0;           // fit on the ensemble average
  bool fit_valid = false;
  std::vector<double> per_run_rate; // fit per run, for dispersion estimates
  double rate_ci_low = 0;           // 95% normal-approximation interval
  double rate_ci_high = 0;
  std::size_t diverged_runs = 0;    // excluded from all fits
};

// Pointwise ensemble average of the per-node squared errors, with rate fits
// over [t0, t1].  All records must share the time grid.
EnsembleMsq mean_square_error(const std::vector<TrajectoryRecord>& runs,
                              double t0, double t1);

}  // namespace pinnet
