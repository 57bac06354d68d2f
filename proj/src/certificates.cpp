#include "pinnet/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pinnet/errors.hpp"

namespace pinnet {

namespace {

void check_weights(const LyapunovWeights& weights, std::size_t states,
                   std::size_t nodes) {
  if (weights.P.size() != states) {
    std::ostringstream os;
    os << "expected " << states << " weight matrices, got " << weights.P.size();
    throw DimensionError(os.str());
  }
  for (std::size_t s = 0; s < weights.P.size(); ++s) {
    const Matrix& p = weights.P[s];
    if (!p.square() || p.rows != nodes)
      throw DimensionError("weight matrix dimension does not match the node count");
    for (std::size_t i = 0; i < p.rows; ++i) {
      for (std::size_t j = 0; j < p.cols; ++j) {
        if (i == j) {
          if (!(p(i, i) > 0) || !std::isfinite(p(i, i)))
            throw ValidationError("weight matrices must have positive diagonals");
        } else if (p(i, j) != 0) {
          throw ValidationError("weight matrices must be diagonal");
        }
      }
    }
  }
}

void check_coupling(const CouplingParams& cp) {
  if (!(cp.kappa > 0) || !std::isfinite(cp.kappa))
    throw ValidationError("coupling strength must be positive and finite");
  if (!(cp.epsilon >= 0) || !std::isfinite(cp.epsilon))
    throw ValidationError("pinning gain must be nonnegative and finite");
}

void check_gg(const Matrix& g, const Matrix& gamma) {
  if (!g.square() || !gamma.square() || g.rows != gamma.rows)
    throw DimensionError("G and Gamma must be square with equal dimension");
}

// alpha*I + kappa*L - kappa*epsilon*C
Matrix inner_form(const Matrix& l, const Matrix& c, double alpha,
                  const CouplingParams& cp) {
  return Matrix::identity(l.rows) * alpha + l * cp.kappa +
         c * (-cp.kappa * cp.epsilon);
}

double max_diag(const Matrix& p) {
  double v = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.rows; ++i) v = std::max(v, p(i, i));
  return v;
}

double min_diag(const Matrix& p) {
  double v = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.rows; ++i) v = std::min(v, p(i, i));
  return v;
}

}  // namespace

LyapunovWeights identity_weights(std::size_t states, std::size_t nodes) {
  LyapunovWeights w;
  w.P.assign(states, Matrix::identity(nodes));
  return w;
}

SlowCertificate theorem1_check(const SwitchedTopology& topo,
                               const LyapunovWeights& weights, const Matrix& q,
                               double alpha, const CouplingParams& cp,
                               const Matrix& g, const Matrix& gamma,
                               double tol) {
  const std::size_t nstates = topo.states();
  const std::size_t m = topo.nodes();
  check_weights(weights, nstates, m);
  check_coupling(cp);
  check_gg(g, gamma);
  if (!std::isfinite(alpha)) throw ValidationError("alpha must be finite");
  if (!q.square() || q.rows != nstates)
    throw DimensionError("generator dimension does not match the topology family");
  validate_metzler_zero_row_sum(q);

  const Matrix gg = g * gamma;
  std::vector<Matrix> pg;
  pg.reserve(nstates);
  double max_pg = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < nstates; ++j) {
    pg.push_back(kron(weights.P[j], g));
    max_pg = std::max(max_pg, sym_eig_extremes(pg.back()).second);
  }
  if (!(max_pg > 0))
    throw ValidationError("P x G must have a positive largest eigenvalue");

  SlowCertificate cert;
  cert.lmi_lambda_max.resize(nstates);
  cert.rate_bound.resize(nstates);
  cert.q.resize(nstates);
  cert.lmi_pass = true;
  cert.rate_pass = true;
  double tol_used = 0;
  for (std::size_t i = 0; i < nstates; ++i) {
    const Matrix s = weights.P[i] * inner_form(topo.L[i], topo.C[i], alpha, cp);
    const Matrix frozen = symmetric_part(kron(s, gg));
    Matrix mi = frozen;
    for (std::size_t j = 0; j < nstates; ++j) {
      const double qij = q(i, j);
      if (qij != 0) mi = mi + pg[j] * qij;
    }
    const double lam = sym_eig_extremes(mi).second;
    cert.lmi_lambda_max[i] = lam;
    const double tol_i = tol >= 0 ? tol : 1e-9 * std::max(1.0, max_abs(mi));
    tol_used = std::max(tol_used, tol_i);
    if (lam > tol_i) cert.lmi_pass = false;

    const double lam_frozen = sym_eig_extremes(frozen).second;
    const double bound = -lam_frozen / max_pg;
    cert.rate_bound[i] = bound;
    const double qi = -q(i, i);
    cert.q[i] = qi;
    if (qi > 0 && qi > bound + 1e-12 * std::max(1.0, std::abs(bound)))
      cert.rate_pass = false;
  }
  cert.tol = tol_used;
  cert.pass = cert.lmi_pass && cert.rate_pass;
  return cert;
}

SlowCertificate theorem1_check(const SwitchedTopology& topo,
                               const LyapunovWeights& weights,
                               const MarkovGenerator& gen, double alpha,
                               const CouplingParams& cp, const Matrix& g,
                               const Matrix& gamma, double tol) {
  return theorem1_check(topo, weights, gen.Q, alpha, cp, g, gamma, tol);
}

double decay_rate(const LyapunovWeights& weights, double beta,
                  const Matrix& g) {
  if (weights.P.empty()) throw ValidationError("weight family is empty");
  if (!(beta > 0) || !std::isfinite(beta))
    throw ValidationError("beta must be positive and finite");
  if (!g.square()) throw DimensionError("G must be square");
  double mind = std::numeric_limits<double>::infinity();
  double maxlam = -std::numeric_limits<double>::infinity();
  for (const Matrix& p : weights.P) {
    mind = std::min(mind, min_diag(p));
    maxlam = std::max(maxlam, sym_eig_extremes(kron(p, g)).second);
  }
  if (!(maxlam > 0))
    throw ValidationError("P x G must have a positive largest eigenvalue");
  return 2.0 * beta * mind / maxlam;
}

LyapunovWeights theorem2_construct(const SwitchedTopology& topo) {
  const std::size_t m = topo.nodes();
  LyapunovWeights w;
  w.P.reserve(topo.states());
  for (std::size_t i = 0; i < topo.states(); ++i) {
    const Matrix p = Matrix::diagonal(perron_left_vector(topo.L[i]));
    const Matrix pl = symmetric_part(p * topo.L[i]);
    const std::vector<double> eigs = sym_eigenvalues(pl);
    const double scale = std::max(1.0, max_abs(pl));
    if (eigs.back() > 1e-9 * scale) {
      std::ostringstream os;
      os << "weighted coupling form of state " << (i + 1)
         << " is not negative semidefinite";
      throw CertificateError(os.str());
    }
    if (m >= 2 && eigs[m - 2] >= -1e-12 * scale) {
      std::ostringstream os;
      os << "zero eigenvalue of the weighted coupling form of state " << (i + 1)
         << " is not simple";
      throw CertificateError(os.str());
    }
    w.P.push_back(p);
  }
  return w;
}

std::vector<double> theorem2_rate_bound(const SwitchedTopology& topo,
                                        const LyapunovWeights& weights,
                                        double alpha,
                                        const CouplingParams& cp) {
  check_weights(weights, topo.states(), topo.nodes());
  check_coupling(cp);
  if (!std::isfinite(alpha)) throw ValidationError("alpha must be finite");
  double denom = -std::numeric_limits<double>::infinity();
  for (const Matrix& p : weights.P) denom = std::max(denom, max_diag(p));
  std::vector<double> bounds;
  bounds.reserve(topo.states());
  for (std::size_t i = 0; i < topo.states(); ++i) {
    const Matrix s = symmetric_part(weights.P[i] *
                                    inner_form(topo.L[i], topo.C[i], alpha, cp));
    const double lam = sym_eig_extremes(s).second;
    if (!(lam < 0)) {
      std::ostringstream os;
      os << "per-state form of state " << (i + 1)
         << " is not negative definite; the rate bound does not apply";
      throw CertificateError(os.str());
    }
    bounds.push_back(-lam / denom);
  }
  return bounds;
}

std::pair<Matrix, Matrix> average_matrices(const std::vector<double>& pi,
                                           const SwitchedTopology& topo) {
  if (pi.size() != topo.states())
    throw DimensionError("distribution length does not match the topology family");
  double sum = 0;
  for (double v : pi) {
    if (!(v >= -1e-12) || !std::isfinite(v))
      throw ValidationError("distribution entries must be nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw ValidationError("distribution must sum to one");
  const std::size_t m = topo.nodes();
  Matrix lbar(m, m), cbar(m, m);
  for (std::size_t i = 0; i < topo.states(); ++i) {
    if (pi[i] == 0) continue;
    lbar = lbar + topo.L[i] * pi[i];
    cbar = cbar + topo.C[i] * pi[i];
  }
  for (std::size_t r = 0; r < m; ++r) {
    double off = 0;
    for (std::size_t c = 0; c < m; ++c)
      if (c != r) off += lbar(r, c);
    lbar(r, r) = -off;
    cbar(r, r) = std::min(1.0, std::max(0.0, cbar(r, r)));
  }
  return {lbar, cbar};
}

double averaged_form_lambda_max(const Matrix& lbar, const Matrix& cbar,
                                const Matrix& p, double alpha,
                                const CouplingParams& cp, const Matrix& g,
                                const Matrix& gamma) {
  check_coupling(cp);
  check_gg(g, gamma);
  const Matrix s = p * inner_form(lbar, cbar, alpha, cp);
  return sym_eig_extremes(symmetric_part(kron(s, g * gamma))).second;
}

FastConstants fast_constants(const SwitchedTopology& topo,
                             const std::vector<double>& pi, const Matrix& p,
                             const DynamicsSpec& dyn, const CouplingParams& cp,
                             const Matrix& g, const Matrix& gamma) {
  const std::size_t nstates = topo.states();
  const std::size_t m = topo.nodes();
  LyapunovWeights single;
  single.P.assign(1, p);
  check_weights(single, 1, m);
  check_coupling(cp);
  check_gg(g, gamma);
  if (g.rows != dyn.n)
    throw DimensionError("G dimension does not match the node dynamics");
  const auto [lbar, cbar] = average_matrices(pi, topo);
  const Matrix gg = g * gamma;

  FastConstants fc;
  fc.K1 = dyn.beta * min_diag(p);
  const auto [pm, pM] = sym_eig_extremes(kron(p, g));
  if (!(pm > 0))
    throw ValidationError("P x G must be positive definite");
  fc.lam_m = pm;
  fc.lam_M = pM;

  std::vector<Matrix> dev;
  dev.reserve(nstates);
  double k2 = 0;
  double max_dev = 0;
  for (std::size_t i = 0; i < nstates; ++i) {
    const Matrix s = p * inner_form(topo.L[i], topo.C[i], dyn.alpha, cp);
    const auto [lo, hi] = sym_eig_extremes(symmetric_part(kron(s, gg)));
    k2 = std::max(k2, std::max(std::abs(lo), std::abs(hi)));

    const Matrix diff = (topo.L[i] - lbar) * cp.kappa +
                        (cbar - topo.C[i]) * (cp.kappa * cp.epsilon);
    dev.push_back(symmetric_part(kron(p * diff, gg)));
    max_dev = std::max(max_dev, max_abs(dev.back()));
  }
  fc.K2 = k2;
  fc.K3 = sym_eig_extremes(
              symmetric_part(kron(p * inner_form(lbar, cbar, dyn.alpha, cp), gg)))
              .second;

  double max_mixed = 0;
  for (std::size_t j = 0; j < nstates; ++j) {
    const Matrix inject =
        kron(topo.L[j] * cp.kappa + topo.C[j] * (-cp.kappa * cp.epsilon), gamma);
    for (std::size_t i = 0; i < nstates; ++i)
      max_mixed = std::max(max_mixed, max_abs(dev[i] * inject));
  }
  fc.K4 = double(m) * double(dyn.n) *
          (max_dev * (1.0 + dyn.Lf * dyn.Lf) + max_mixed);
  fc.rho = 2.0 * fc.K2 / fc.lam_m + 2.0 * fc.K1 / fc.lam_M;
  return fc;
}

double delta_condition(const FastConstants& fc, double delta) {
  if (!(delta > 0) || !std::isfinite(delta))
    throw ValidationError("window width must be positive and finite");
  if (!(fc.rho > 0) || !std::isfinite(fc.rho))
    throw ValidationError("rho must be positive and finite");
  if (!(fc.lam_m > 0) || !(fc.lam_M > 0))
    throw ValidationError("P x G eigenvalue range must be positive");
  const double a = (fc.K1 - fc.K3) * fc.lam_m / (fc.rho * fc.lam_M);
  const double b = fc.K4 * fc.lam_M * delta / (fc.rho * fc.lam_m);
  const double term1 = a == 0 ? 0.0 : -a * (-std::expm1(-fc.rho * delta));
  const double term2 = b == 0 ? 0.0 : b * std::expm1(fc.rho * delta);
  return term1 + term2;
}

FastSwitchCertificate fast_check(const FastConstants& fc, double delta,
                                 std::size_t r_steps) {
  if (r_steps == 0)
    throw ValidationError("window partition count must be positive");
  FastSwitchCertificate cert;
  cert.constants = fc;
  cert.delta = delta;
  cert.r_steps = r_steps;
  cert.lhs = delta_condition(fc, delta);
  cert.q_min_required = 1.0 / (double(r_steps) * delta);
  cert.pass = cert.lhs < 0;
  return cert;
}

DeltaSearch feasible_delta(const FastConstants& fc, std::size_t r_steps) {
  if (r_steps == 0)
    throw ValidationError("window partition count must be positive");
  DeltaSearch out;
  if (!(fc.K1 - fc.K3 > 0)) {
    out.note = "infeasible: K1 <= K3, the condition is nonnegative for every window";
    return out;
  }
  const double lo_cap = 1e-8, hi_cap = 1.0;
  if (!(delta_condition(fc, lo_cap) < 0)) {
    out.note = "infeasible: no negative window at the smallest scanned width";
    return out;
  }
  const int npts = 400;
  double lo = lo_cap;
  double hi = -1;
  for (int k = 1; k < npts; ++k) {
    const double d =
        lo_cap * std::pow(hi_cap / lo_cap, double(k) / double(npts - 1));
    if (delta_condition(fc, d) < 0) {
      lo = d;
    } else {
      hi = d;
      break;
    }
  }
  if (hi < 0) {
    out.feasible = true;
    out.delta_star = hi_cap;
    out.q_min_required = 1.0 / (double(r_steps) * hi_cap);
    out.note = "search capped at the largest scanned window";
    return out;
  }
  while (hi - lo > 1e-12 * lo) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (delta_condition(fc, mid) < 0)
      lo = mid;
    else
      hi = mid;
  }
  out.feasible = true;
  out.delta_star = lo;
  out.q_min_required = 1.0 / (double(r_steps) * lo);
  return out;
}

}  // namespace pinnet
