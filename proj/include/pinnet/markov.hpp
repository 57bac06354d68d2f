#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pinnet/matlin.hpp"
#include "pinnet/rng.hpp"

namespace pinnet {

// Jump-destination transition matrix of a continuous-time chain: square,
// row-stochastic, zero diagonal.
struct EmbeddedChain {
  Matrix P;

  std::size_t states() const { return P.rows; }
};

// Validates shape, diagonal and row sums; throws ValidationError.
EmbeddedChain make_embedded_chain(const Matrix& p);

// Rate matrix: off-diagonal q_ij ≥ 0, rows sum to zero, q_i = −q_ii > 0.
struct MarkovGenerator {
  Matrix Q;

  std::size_t states() const { return Q.rows; }
  // Per-state leave rates q_i.
  std::vector<double> rates() const;
  EmbeddedChain embedded() const;
};

// q_ij = q_i p_ij off diagonal, q_ii rebalanced to the exact negative row sum.
MarkovGenerator assemble_generator(const EmbeddedChain& p,
                                   const std::vector<double>& q);

// Validates an externally supplied rate matrix.
MarkovGenerator make_generator(const Matrix& q);

struct InvariantDistribution {
  std::vector<double> pi;      // stationary occupancy of the continuous chain
  std::vector<double> bar_pi;  // stationary vector of the embedded chain
  // True when the embedded chain is aperiodic as well as irreducible.  The
  // stationary vectors exist either way; k-step distributions converge only
  // in the primitive case.
  bool embedded_primitive = false;
};

// barπ from the null space of Pᵀ−I; π_j ∝ barπ_j/q_j.  Verifies πQ = 0 and
// throws ConnectivityError when the embedded chain is reducible.
InvariantDistribution invariant_distribution(const MarkovGenerator& gen);

struct SwitchPath {
  struct Entry {
    double entry_time;
    std::size_t state;  // 0-based in memory; CSV uses 1-based labels
  };
  std::vector<Entry> entries;
  double horizon = 0.0;
};

// Exponential sojourns with the per-state rates, destinations from the
// embedded chain.  Deterministic for a fixed generator state.
SwitchPath sample_path(const MarkovGenerator& gen, std::size_t initial_state,
                       double horizon, Rng& rng);

// Initial state drawn from `initial` first.
SwitchPath sample_path(const MarkovGenerator& gen,
                       const std::vector<double>& initial, double horizon,
                       Rng& rng);

// π0·P^k.
std::vector<double> kstep_distribution(const EmbeddedChain& p,
                                       const std::vector<double>& pi0,
                                       std::size_t k);

// CSV with header `entry_time,state`, states 1-based.
std::string switch_path_csv(const SwitchPath& path);
SwitchPath parse_switch_path_csv(const std::string& text, double horizon);

}  // namespace pinnet
