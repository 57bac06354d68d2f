#include "pinnet/dynamics.hpp"

#include <cmath>
#include <limits>

#include "pinnet/errors.hpp"

namespace pinnet {

double activation(double s) {
  // Equals (|s+1| - |s-1|)/2, written as a clamp so the linear region is
  // exact.
  return s > 1.0 ? 1.0 : (s < -1.0 ? -1.0 : s);
}

CnnParams default_cnn() {
  CnnParams p;
  p.D = Matrix::identity(3);
  p.T = Matrix(3, 3);
  p.T(0, 0) = 1.25;
  p.T(0, 1) = -3.2;
  p.T(0, 2) = -3.2;
  p.T(1, 0) = -3.2;
  p.T(1, 1) = 1.1;
  p.T(1, 2) = -4.4;
  p.T(2, 0) = -3.2;
  p.T(2, 1) = 4.4;
  p.T(2, 2) = 1.0;
  return p;
}

void cnn_rhs(const CnnParams& params, const double* x, double* dx) {
  const std::size_t n = params.T.rows;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = -params.D(i, i) * x[i];
    for (std::size_t j = 0; j < n; ++j)
      acc += params.T(i, j) * activation(x[j]);
    dx[i] = acc;
  }
}

std::vector<double> cnn_rhs(const std::vector<double>& x,
                            const CnnParams& params) {
  if (x.size() != params.T.rows)
    throw DimensionError("cnn_rhs: state length mismatch");
  std::vector<double> dx(x.size());
  cnn_rhs(params, x.data(), dx.data());
  return dx;
}

DynamicsSpec cnn_dynamics(const CnnParams& params, const Matrix& gamma,
                          const Matrix& g, double alpha, double beta,
                          double lf) {
  if (!params.D.square() || !params.T.square() ||
      params.D.rows != params.T.rows)
    throw DimensionError("cnn_dynamics: D and T must be square, same size");
  DynamicsSpec spec;
  spec.n = params.T.rows;
  CnnParams copy = params;
  spec.f = [copy](double, const double* x, double* dx) {
    cnn_rhs(copy, x, dx);
  };
  spec.Gamma = gamma;
  spec.G = g;
  spec.alpha = alpha;
  spec.beta = beta;
  spec.Lf = lf;
  return spec;
}

QuadReport quad_falsifier(const DynamicsSpec& spec, std::size_t samples,
                          const std::vector<double>& box_lo,
                          const std::vector<double>& box_hi, Rng& rng) {
  const std::size_t n = spec.n;
  if (samples < 1) throw ValidationError("quad_falsifier: samples must be >= 1");
  if (box_lo.size() != n || box_hi.size() != n)
    throw DimensionError("quad_falsifier: box dimension mismatch");
  for (std::size_t i = 0; i < n; ++i)
    if (!(box_lo[i] < box_hi[i]) || !std::isfinite(box_lo[i]) ||
        !std::isfinite(box_hi[i]))
      throw ValidationError("quad_falsifier: box must be bounded, lo < hi");

  QuadReport report;
  report.samples = samples;
  report.worst_margin = -std::numeric_limits<double>::infinity();

  std::vector<double> xi(n), zeta(n), fxi(n), fzeta(n), e(n), w(n);
  for (std::size_t s = 0; s < samples; ++s) {
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        xi[i] = rng.uniform(box_lo[i], box_hi[i]);
        zeta[i] = rng.uniform(box_lo[i], box_hi[i]);
        double d = xi[i] - zeta[i];
        e[i] = d;
        norm2 += d * d;
      }
    } while (norm2 == 0.0);

    spec.f(0.0, xi.data(), fxi.data());
    spec.f(0.0, zeta.data(), fzeta.data());
    // w = f(ξ) − f(ζ) − αΓ(ξ−ζ)
    for (std::size_t i = 0; i < n; ++i) {
      double g = 0.0;
      for (std::size_t j = 0; j < n; ++j) g += spec.Gamma(i, j) * e[j];
      w[i] = fxi[i] - fzeta[i] - spec.alpha * g;
    }
    double lhs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double ge = 0.0;
      for (std::size_t j = 0; j < n; ++j) ge += spec.G(i, j) * w[j];
      lhs += e[i] * ge;
    }
    double margin = lhs / norm2 + spec.beta;
    if (margin > report.worst_margin) report.worst_margin = margin;
    if (margin > 1e-12) ++report.violations;
  }
  return report;
}

LipschitzReport lipschitz_bound(const CnnParams& params) {
  if (!params.D.square() || !params.T.square() ||
      params.D.rows != params.T.rows)
    throw DimensionError("lipschitz_bound: D and T must be square, same size");
  LipschitzReport report;
  report.safe_bound = spectral_norm(params.D) + spectral_norm(params.T);
  const std::size_t n = params.T.rows;
  std::size_t patterns = std::size_t{1} << n;
  for (std::size_t mask = 0; mask < patterns && mask < 8; ++mask) {
    Matrix m = -1.0 * params.D;
    for (std::size_t j = 0; j < n; ++j)
      if (mask & (std::size_t{1} << j))
        for (std::size_t i = 0; i < n; ++i) m(i, j) += params.T(i, j);
    report.pattern_norms[mask] = spectral_norm(m);
  }
  return report;
}

}  // namespace pinnet
