#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace pinnet {

// Dense row-major real matrix.  Everything in this toolkit is small (a few
// hundred rows at most), so no sparse storage and no blocking.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), a(r * c, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix diagonal(const std::vector<double>& d);

  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return a[i * cols + j];
  }

  bool square() const { return rows == cols; }
  std::vector<double> diag() const;
};

bool operator==(const Matrix& x, const Matrix& y);

Matrix operator+(const Matrix& x, const Matrix& y);
Matrix operator-(const Matrix& x, const Matrix& y);
Matrix operator*(const Matrix& x, const Matrix& y);
Matrix operator*(double c, const Matrix& x);
Matrix operator*(const Matrix& x, double c);

std::vector<double> operator*(const Matrix& x, const std::vector<double>& v);

Matrix transpose(const Matrix& x);

// (A + Aᵀ)/2.
Matrix symmetric_part(const Matrix& x);

Matrix kron(const Matrix& x, const Matrix& y);

// Largest |entry|.  This is the ∞-norm convention used throughout: an
// entrywise max, not the induced row-sum norm.
double max_abs(const Matrix& x);
double max_abs(const std::vector<double>& v);

bool all_finite(const Matrix& x);

// Eigenvalues of a symmetric matrix, ascending, via cyclic Jacobi rotations.
// The input is symmetrized first; asymmetry beyond 1e-9 relative is rejected.
std::vector<double> sym_eigenvalues(const Matrix& s);

// (λ_min, λ_max) of a symmetric matrix.
std::pair<double, double> sym_eig_extremes(const Matrix& s);

// Spectral norm sqrt(λ_max(AᵀA)).
double spectral_norm(const Matrix& x);

// Checks the Metzler zero-row-sum shape: square, off-diagonal ≥ 0, row sums
// zero to 1e-12 relative.  Throws ValidationError with the offending row.
void validate_metzler_zero_row_sum(const Matrix& l);

// True iff the directed graph with edge j→i whenever l_ij > 0 (i ≠ j) is one
// strongly connected component.
bool is_strongly_connected(const Matrix& l);

// Positive left null vector of an irreducible Metzler zero-row-sum matrix,
// normalized to sum 1.  Null space of Lᵀ by partial-pivot elimination, with a
// power-iteration fallback on I + Lᵀ/s if elimination yields a sign-mixed
// vector.  Throws ConnectivityError when L is not strongly connected.
std::vector<double> perron_left_vector(const Matrix& l);

}  // namespace pinnet
