#include "pinnet/matlin.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pinnet/errors.hpp"

namespace pinnet {

namespace {

void require_same_shape(const Matrix& x, const Matrix& y, const char* op) {
  if (x.rows != y.rows || x.cols != y.cols)
    throw DimensionError(std::string(op) + ": shape mismatch " +
                         std::to_string(x.rows) + "x" + std::to_string(x.cols) +
                         " vs " + std::to_string(y.rows) + "x" +
                         std::to_string(y.cols));
}

void require_square(const Matrix& x, const char* op) {
  if (!x.square())
    throw DimensionError(std::string(op) + ": matrix is " +
                         std::to_string(x.rows) + "x" + std::to_string(x.cols) +
                         ", expected square");
}

}  // namespace

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(const std::vector<double>& d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

std::vector<double> Matrix::diag() const {
  std::size_t n = std::min(rows, cols);
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = (*this)(i, i);
  return d;
}

bool operator==(const Matrix& x, const Matrix& y) {
  return x.rows == y.rows && x.cols == y.cols && x.a == y.a;
}

Matrix operator+(const Matrix& x, const Matrix& y) {
  require_same_shape(x, y, "add");
  Matrix r = x;
  for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] += y.a[i];
  return r;
}

Matrix operator-(const Matrix& x, const Matrix& y) {
  require_same_shape(x, y, "subtract");
  Matrix r = x;
  for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] -= y.a[i];
  return r;
}

Matrix operator*(const Matrix& x, const Matrix& y) {
  if (x.cols != y.rows)
    throw DimensionError("multiply: inner dimensions " +
                         std::to_string(x.cols) + " vs " +
                         std::to_string(y.rows));
  Matrix r(x.rows, y.cols);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t k = 0; k < x.cols; ++k) {
      double xik = x(i, k);
      if (xik == 0.0) continue;
      for (std::size_t j = 0; j < y.cols; ++j) r(i, j) += xik * y(k, j);
    }
  return r;
}

Matrix operator*(double c, const Matrix& x) {
  Matrix r = x;
  for (double& v : r.a) v *= c;
  return r;
}

Matrix operator*(const Matrix& x, double c) { return c * x; }

std::vector<double> operator*(const Matrix& x, const std::vector<double>& v) {
  if (x.cols != v.size())
    throw DimensionError("matvec: " + std::to_string(x.cols) + " vs " +
                         std::to_string(v.size()));
  std::vector<double> r(x.rows, 0.0);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < x.cols; ++j) r[i] += x(i, j) * v[j];
  return r;
}

Matrix transpose(const Matrix& x) {
  Matrix r(x.cols, x.rows);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < x.cols; ++j) r(j, i) = x(i, j);
  return r;
}

Matrix symmetric_part(const Matrix& x) {
  require_square(x, "symmetric_part");
  Matrix r(x.rows, x.cols);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < x.cols; ++j)
      r(i, j) = 0.5 * (x(i, j) + x(j, i));
  return r;
}

Matrix kron(const Matrix& x, const Matrix& y) {
  Matrix r(x.rows * y.rows, x.cols * y.cols);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < x.cols; ++j) {
      double xij = x(i, j);
      if (xij == 0.0) continue;
      for (std::size_t k = 0; k < y.rows; ++k)
        for (std::size_t l = 0; l < y.cols; ++l)
          r(i * y.rows + k, j * y.cols + l) = xij * y(k, l);
    }
  return r;
}

double max_abs(const Matrix& x) {
  double m = 0.0;
  for (double v : x.a) m = std::max(m, std::fabs(v));
  return m;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

bool all_finite(const Matrix& x) {
  for (double v : x.a)
    if (!std::isfinite(v)) return false;
  return true;
}

std::vector<double> sym_eigenvalues(const Matrix& s) {
  require_square(s, "sym_eigenvalues");
  if (!all_finite(s)) throw NumericError("sym_eigenvalues: non-finite entry");
  const std::size_t n = s.rows;
  double scale = max_abs(s);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::fabs(s(i, j) - s(j, i)) > 1e-9 * std::max(1.0, scale))
        throw ValidationError("sym_eigenvalues: input is not symmetric");

  Matrix w = symmetric_part(s);
  if (n == 1) return {w(0, 0)};

  // Cyclic Jacobi.  Small dense symmetric matrices only; converges in a
  // handful of sweeps.
  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += w(i, j) * w(i, j);
    if (std::sqrt(off) <= 1e-15 * std::max(1.0, scale)) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double apq = w(p, q);
        if (std::fabs(apq) <= 1e-18 * std::max(1.0, scale)) continue;
        double theta = (w(q, q) - w(p, p)) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double sn = t * c;
        double app = w(p, p), aqq = w(q, q);
        w(p, p) = app - t * apq;
        w(q, q) = aqq + t * apq;
        w(p, q) = 0.0;
        w(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          double akp = w(k, p), akq = w(k, q);
          w(k, p) = c * akp - sn * akq;
          w(p, k) = w(k, p);
          w(k, q) = sn * akp + c * akq;
          w(q, k) = w(k, q);
        }
      }
    }
  }

  std::vector<double> ev = w.diag();
  std::sort(ev.begin(), ev.end());
  return ev;
}

std::pair<double, double> sym_eig_extremes(const Matrix& s) {
  std::vector<double> ev = sym_eigenvalues(s);
  return {ev.front(), ev.back()};
}

double spectral_norm(const Matrix& x) {
  if (x.rows == 0 || x.cols == 0) return 0.0;
  Matrix g = transpose(x) * x;
  double lmax = sym_eig_extremes(g).second;
  return std::sqrt(std::max(0.0, lmax));
}

void validate_metzler_zero_row_sum(const Matrix& l) {
  require_square(l, "metzler");
  if (!all_finite(l)) throw ValidationError("metzler: non-finite entry");
  double scale = std::max(1.0, max_abs(l));
  for (std::size_t i = 0; i < l.rows; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < l.cols; ++j) {
      sum += l(i, j);
      if (i != j && l(i, j) < -1e-12 * scale)
        throw ValidationError("metzler: negative off-diagonal at row " +
                              std::to_string(i + 1) + ", column " +
                              std::to_string(j + 1));
    }
    if (std::fabs(sum) > 1e-12 * scale)
      throw ValidationError("metzler: row " + std::to_string(i + 1) +
                            " sums to " + std::to_string(sum) +
                            ", expected 0");
  }
}

namespace {

// Reachability over edges j→i for l_ij > 0; `reverse` flips the direction.
std::size_t reach_count(const Matrix& l, bool reverse) {
  const std::size_t n = l.rows;
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t v = 0; v < n; ++v) {
      if (v == u || seen[v]) continue;
      double w = reverse ? l(u, v) : l(v, u);
      if (w > 0.0) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count;
}

}  // namespace

bool is_strongly_connected(const Matrix& l) {
  require_square(l, "is_strongly_connected");
  if (l.rows == 0) return false;
  if (l.rows == 1) return true;
  return reach_count(l, false) == l.rows && reach_count(l, true) == l.rows;
}

namespace {

// One null vector of the square matrix `m` (assumed rank n−1), by Gaussian
// elimination with partial pivoting.
std::vector<double> null_vector(Matrix m) {
  const std::size_t n = m.rows;
  double scale = std::max(1.0, max_abs(m));
  std::vector<std::size_t> pivot_col_of_row(n, n);
  std::size_t row = 0;
  for (std::size_t col = 0; col < n && row < n; ++col) {
    std::size_t best = row;
    for (std::size_t r = row + 1; r < n; ++r)
      if (std::fabs(m(r, col)) > std::fabs(m(best, col))) best = r;
    if (std::fabs(m(best, col)) <= 1e-12 * scale) continue;
    if (best != row)
      for (std::size_t c = 0; c < n; ++c) std::swap(m(row, c), m(best, c));
    for (std::size_t r = row + 1; r < n; ++r) {
      double f = m(r, col) / m(row, col);
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) m(r, c) -= f * m(row, c);
    }
    pivot_col_of_row[row] = col;
    ++row;
  }

  std::vector<char> is_pivot(n, 0);
  for (std::size_t r = 0; r < row; ++r) is_pivot[pivot_col_of_row[r]] = 1;
  std::size_t free_col = n;
  for (std::size_t c = n; c-- > 0;)
    if (!is_pivot[c]) {
      free_col = c;
      break;
    }
  if (free_col == n)
    throw NumericError("null_vector: matrix has full numerical rank");

  std::vector<double> x(n, 0.0);
  x[free_col] = 1.0;
  for (std::size_t r = row; r-- > 0;) {
    std::size_t pc = pivot_col_of_row[r];
    double s = 0.0;
    for (std::size_t c = pc + 1; c < n; ++c) s += m(r, c) * x[c];
    x[pc] = -s / m(r, pc);
  }
  return x;
}

}  // namespace

std::vector<double> perron_left_vector(const Matrix& l) {
  validate_metzler_zero_row_sum(l);
  if (!is_strongly_connected(l))
    throw ConnectivityError(
        "perron_left_vector: coupling matrix is not strongly connected");
  const std::size_t n = l.rows;
  if (n == 1) return {1.0};

  std::vector<double> p = null_vector(transpose(l));

  double sum = 0.0;
  for (double v : p) sum += v;
  if (sum != 0.0)
    for (double& v : p) v /= sum;

  bool positive = true;
  for (double v : p)
    if (!(v > 1e-14)) positive = false;

  if (!positive) {
    // Power iteration on B = I + Lᵀ/s.  For a strongly connected Metzler
    // zero-row-sum matrix B is primitive, so the iteration converges to the
    // Perron vector.
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s = std::max(s, std::fabs(l(i, i)));
    s = 2.0 * std::max(s, 1.0);
    Matrix lt = transpose(l);
    std::vector<double> v(n, 1.0 / static_cast<double>(n));
    for (int it = 0; it < 200000; ++it) {
      std::vector<double> w(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        double acc = v[i];
        for (std::size_t j = 0; j < n; ++j) acc += lt(i, j) * v[j] / s;
        w[i] = acc;
      }
      double tot = 0.0;
      for (double x : w) tot += x;
      for (double& x : w) x /= tot;
      double diff = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        diff = std::max(diff, std::fabs(w[i] - v[i]));
      v = std::move(w);
      if (diff < 1e-15) break;
    }
    p = v;
  }

  for (double v : p)
    if (!(v > 0.0))
      throw NumericError("perron_left_vector: vector is not positive");

  double residual = max_abs(transpose(l) * p);
  if (residual > 1e-9 * std::max(1.0, max_abs(l)))
    throw NumericError("perron_left_vector: residual " +
                       std::to_string(residual) + " too large");
  return p;
}

}  // namespace pinnet
