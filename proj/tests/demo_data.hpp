#pragma once

// Shared demo system used across the test suites: a five-state switched
// topology over five nodes, driven by a five-state chain, with the three-cell
// saturating node model.

#include <vector>

#include "pinnet/config.hpp"
#include "pinnet/dynamics.hpp"
#include "pinnet/markov.hpp"
#include "pinnet/matlin.hpp"
#include "pinnet/switchnet.hpp"

namespace demo {

inline pinnet::Matrix mat5(std::initializer_list<double> v) {
  pinnet::Matrix m(5, 5);
  std::size_t k = 0;
  for (double x : v) m.a[k++] = x;
  return m;
}

inline pinnet::SwitchedTopology topology() {
  std::vector<pinnet::Matrix> l;
  l.push_back(mat5({-3, 0, 1, 1, 1,
                    0, -2, 0, 1, 1,
                    1, 1, -3, 0, 1,
                    0, 0, 0, -1, 1,
                    1, 1, 0, 0, -2}));
  l.push_back(mat5({-2, 0, 0, 1, 1,
                    1, -2, 0, 0, 1,
                    0, 1, -2, 0, 1,
                    0, 1, 0, -2, 1,
                    0, 0, 0, 1, -1}));
  l.push_back(mat5({-3, 0, 1, 1, 1,
                    1, -1, 0, 0, 0,
                    1, 0, -2, 0, 1,
                    0, 0, 0, -1, 1,
                    1, 1, 1, 1, -4}));
  l.push_back(mat5({-2, 1, 0, 0, 1,
                    1, -2, 0, 0, 1,
                    0, 1, -3, 1, 1,
                    0, 1, 1, -2, 0,
                    1, 0, 0, 1, -2}));
  l.push_back(mat5({-2, 1, 1, 0, 0,
                    0, -3, 1, 1, 1,
                    1, 1, -4, 1, 1,
                    0, 1, 1, -3, 1,
                    0, 1, 1, 1, -3}));
  std::vector<pinnet::Matrix> c;
  c.push_back(pinnet::Matrix::diagonal({1, 1, 0, 0, 1}));
  c.push_back(pinnet::Matrix::diagonal({1, 1, 1, 1, 1}));
  c.push_back(pinnet::Matrix::diagonal({0, 0, 0, 1, 1}));
  c.push_back(pinnet::Matrix::diagonal({0, 1, 0, 1, 0}));
  c.push_back(pinnet::Matrix::diagonal({1, 1, 1, 0, 0}));
  return pinnet::make_switched_topology(std::move(l), std::move(c));
}

inline pinnet::EmbeddedChain embedded() {
  return pinnet::make_embedded_chain(mat5({0, 0.65, 0, 0.35, 0,
                                           0, 0, 0.7, 0, 0.3,
                                           0, 0.1, 0, 0.9, 0,
                                           0.4, 0.6, 0, 0, 0,
                                           0, 0.3, 0, 0.7, 0}));
}

inline pinnet::CouplingParams coupling() { return {10.0, 1.0}; }

inline pinnet::DynamicsSpec dynamics() {
  return pinnet::cnn_dynamics(pinnet::default_cnn(),
                              pinnet::Matrix::identity(3),
                              pinnet::Matrix::identity(3), 1.0, 0.5, 0.0);
}

constexpr double kAlpha = 1.0;
constexpr double kBeta = 0.5;

// Largest eigenvalues of {alpha I + kappa L(i) - kappa eps C(i)}^s per state.
inline const std::vector<double> kFrozenLambdaMax = {
    -2.101103242874, -5.864009612047, -2.052196988531, -1.223623940171,
    -3.511528683814};

// Positive left null vector of L(1), normalized to sum 1.
inline const std::vector<double> kPerronL1 = {0.125, 0.1875, 1.0 / 24.0,
                                              0.3125, 1.0 / 3.0};

// Stationary vector of the embedded chain.
inline const std::vector<double> kBarPi = {
    0.1160220994475138, 0.2969613259668508, 0.2078729281767956,
    0.2900552486187846, 0.0890883977900553};

}  // namespace demo
