#include "pinnet/switchnet.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pinnet/errors.hpp"

namespace pinnet {

SwitchedTopology make_switched_topology(std::vector<Matrix> l,
                                        std::vector<Matrix> c) {
  if (l.empty()) throw ValidationError("topology: empty coupling family");
  if (l.size() != c.size())
    throw ValidationError("topology: " + std::to_string(l.size()) +
                          " coupling matrices vs " + std::to_string(c.size()) +
                          " pinning matrices");
  const std::size_t m = l.front().rows;
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (l[i].rows != m || l[i].cols != m)
      throw ValidationError("topology: coupling matrix " +
                            std::to_string(i + 1) + " has wrong shape");
    validate_metzler_zero_row_sum(l[i]);
    if (c[i].rows != m || c[i].cols != m)
      throw ValidationError("topology: pinning matrix " +
                            std::to_string(i + 1) + " has wrong shape");
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t col = 0; col < m; ++col) {
        double v = c[i](r, col);
        if (r != col && v != 0.0)
          throw ValidationError("topology: pinning matrix " +
                                std::to_string(i + 1) + " is not diagonal");
        if (r == col && v != 0.0 && v != 1.0)
          throw ValidationError("topology: pinning matrix " +
                                std::to_string(i + 1) +
                                " has a diagonal entry outside {0,1}");
      }
  }
  return SwitchedTopology{std::move(l), std::move(c)};
}

void coupled_rhs_into(const Matrix& l, const std::vector<double>& c_diag,
                      const DynamicsSpec& dyn, const CouplingParams& cp,
                      double t, const double* x, const double* s, double* dx,
                      double* ds) {
  const std::size_t m = l.rows;
  const std::size_t n = dyn.n;

  for (std::size_t i = 0; i < m; ++i) dyn.f(t, x + i * n, dx + i * n);
  dyn.f(t, s, ds);

  // κ Σ_j l_ij Γ xʲ accumulated as Γ(Σ_j l_ij xʲ) per node.
  std::vector<double> acc(n);
  for (std::size_t i = 0; i < m; ++i) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      double lij = l(i, j);
      if (lij == 0.0) continue;
      const double* xj = x + j * n;
      for (std::size_t k = 0; k < n; ++k) acc[k] += lij * xj[k];
    }
    double ci = c_diag[i];
    if (ci != 0.0)
      for (std::size_t k = 0; k < n; ++k)
        acc[k] += cp.epsilon * ci * (s[k] - x[i * n + k]);
    double* dxi = dx + i * n;
    for (std::size_t k = 0; k < n; ++k) {
      double g = 0.0;
      for (std::size_t kk = 0; kk < n; ++kk) g += dyn.Gamma(k, kk) * acc[kk];
      dxi[k] += cp.kappa * g;
    }
  }
}

std::pair<std::vector<double>, std::vector<double>> coupled_rhs(
    const SystemState& state, std::size_t sigma, const SwitchedTopology& topo,
    const DynamicsSpec& dyn, const CouplingParams& cp) {
  const std::size_t m = topo.nodes();
  const std::size_t n = dyn.n;
  if (sigma >= topo.states())
    throw ValidationError("coupled_rhs: switch state out of range");
  if (state.x.size() != m * n || state.s.size() != n)
    throw DimensionError("coupled_rhs: state length " +
                         std::to_string(state.x.size()) + ", expected " +
                         std::to_string(m * n));
  std::vector<double> dx(m * n), ds(n);
  std::vector<double> c_diag = topo.C[sigma].diag();
  coupled_rhs_into(topo.L[sigma], c_diag, dyn, cp, state.t, state.x.data(),
                   state.s.data(), dx.data(), ds.data());
  return {std::move(dx), std::move(ds)};
}

std::vector<double> rk4_step(
    const std::function<void(double, const double*, double*)>& rhs, double t,
    const std::vector<double>& y, double h) {
  if (!(h > 0.0)) throw ValidationError("rk4_step: step must be positive");
  const std::size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n), out(n);
  rhs(t, y.data(), k1.data());
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
  rhs(t + 0.5 * h, tmp.data(), k2.data());
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
  rhs(t + 0.5 * h, tmp.data(), k3.data());
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
  rhs(t + h, tmp.data(), k4.data());
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (!std::isfinite(out[i]))
      throw NumericError("rk4_step: non-finite state at t=" +
                         std::to_string(t));
  }
  return out;
}

double varsigma(const SystemState& state) {
  const std::size_t n = state.s.size();
  const std::size_t m = n == 0 ? 0 : state.x.size() / n;
  double worst = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < n; ++k)
      worst = std::max(worst, std::fabs(state.x[i * n + k] - state.s[k]));
  return worst;
}

namespace {

struct StepperState {
  std::vector<double> y;  // x stacked, then s
  double t = 0;
};

double node_msq(const std::vector<double>& y, std::size_t m, std::size_t n) {
  double total = 0.0;
  const double* s = y.data() + m * n;
  for (std::size_t i = 0; i < m; ++i) {
    const double* xi = y.data() + i * n;
    for (std::size_t k = 0; k < n; ++k) {
      double d = xi[k] - s[k];
      total += d * d;
    }
  }
  return total / static_cast<double>(m);
}

double vs_of(const std::vector<double>& y, std::size_t m, std::size_t n) {
  double worst = 0.0;
  const double* s = y.data() + m * n;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < n; ++k)
      worst = std::max(worst, std::fabs(y[i * n + k] - s[k]));
  return worst;
}

}  // namespace

TrajectoryRecord simulate(const SwitchedTopology& topo, const DynamicsSpec& dyn,
                          const CouplingParams& cp, const SwitchPath& path,
                          const std::vector<double>& x0,
                          const std::vector<double>& s0, double h,
                          double horizon, const SimulateOptions& opts) {
  const std::size_t m = topo.nodes();
  const std::size_t n = dyn.n;
  if (!(h > 0.0)) throw ValidationError("simulate: step must be positive");
  if (!(horizon > 0.0))
    throw ValidationError("simulate: horizon must be positive");
  if (path.horizon < horizon)
    throw ValidationError("simulate: switch path horizon " +
                          std::to_string(path.horizon) +
                          " shorter than simulation horizon");
  if (path.entries.empty() || path.entries.front().entry_time != 0.0)
    throw ValidationError("simulate: switch path must start at time 0");
  if (x0.size() != m * n || s0.size() != n)
    throw DimensionError("simulate: initial state length mismatch");
  for (const auto& e : path.entries)
    if (e.state >= topo.states())
      throw ValidationError("simulate: switch path state out of range");

  const std::size_t total_steps =
      static_cast<std::size_t>(std::llround(horizon / h));
  std::size_t stride = opts.stride;
  if (stride == 0) stride = std::max<std::size_t>(1, total_steps / 100000);

  TrajectoryRecord rec;
  rec.h = h;
  rec.record_node_err = opts.record_node_err;

  StepperState st;
  st.y = x0;
  st.y.insert(st.y.end(), s0.begin(), s0.end());
  st.t = 0.0;

  std::size_t seg = 0;  // index into path.entries of the active state
  std::vector<double> c_diag = topo.C[path.entries[0].state].diag();

  auto record_sample = [&](double t, std::size_t state_idx) {
    rec.t.push_back(t);
    rec.state.push_back(state_idx);
    rec.vs.push_back(vs_of(st.y, m, n));
    rec.msq.push_back(node_msq(st.y, m, n));
    if (opts.record_node_err) {
      std::vector<double> errs(m, 0.0);
      const double* s = st.y.data() + m * n;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < n; ++k)
          errs[i] =
              std::max(errs[i], std::fabs(st.y[i * n + k] - s[k]));
      rec.node_err.push_back(std::move(errs));
    }
  };

  record_sample(0.0, path.entries[0].state);

  auto rhs_for = [&](std::size_t state_idx) {
    return [&, state_idx](double t, const double* y, double* dy) {
      coupled_rhs_into(topo.L[state_idx], c_diag, dyn, cp, t, y, y + m * n, dy,
                       dy + m * n);
    };
  };

  for (std::size_t k = 0; k < total_steps; ++k) {
    const double step_start = h * static_cast<double>(k);
    const double step_end = h * static_cast<double>(k + 1);
    double next_jump = (seg + 1 < path.entries.size())
                           ? path.entries[seg + 1].entry_time
                           : std::numeric_limits<double>::infinity();
    if (next_jump >= step_end) {
      // No switch strictly inside the step: advance by exactly h, so a
      // degenerate single-state path reproduces a plain fixed-step loop
      // bit for bit.
      st.y = rk4_step(rhs_for(path.entries[seg].state), step_start, st.y, h);
      st.t = step_end;
      while (seg + 1 < path.entries.size() &&
             path.entries[seg + 1].entry_time <= step_end) {
        ++seg;
        c_diag = topo.C[path.entries[seg].state].diag();
      }
    } else {
      // Split the step at every switch time inside it.
      st.t = step_start;
      while (st.t < step_end) {
        next_jump = (seg + 1 < path.entries.size())
                        ? path.entries[seg + 1].entry_time
                        : std::numeric_limits<double>::infinity();
        double target = std::min(step_end, next_jump);
        double sub = target - st.t;
        if (sub > 0.0)
          st.y = rk4_step(rhs_for(path.entries[seg].state), st.t, st.y, sub);
        st.t = target;
        if (target == next_jump) {
          ++seg;
          c_diag = topo.C[path.entries[seg].state].diag();
        }
      }
    }

    double xmax = 0.0;
    for (std::size_t i = 0; i < m * n; ++i)
      xmax = std::max(xmax, std::fabs(st.y[i]));
    if (xmax > opts.divergence_guard) {
      rec.diverged = true;
      record_sample(st.t, path.entries[seg].state);
      return rec;
    }

    if ((k + 1) % stride == 0 || k + 1 == total_steps)
      record_sample(st.t, path.entries[seg].state);
  }
  return rec;
}

std::string trajectory_csv(const TrajectoryRecord& rec) {
  std::ostringstream os;
  os.precision(17);
  os << "t,sigma_state,varsigma";
  std::size_t m = rec.node_err.empty() ? 0 : rec.node_err.front().size();
  for (std::size_t i = 0; i < m; ++i) os << ",err_node_" << i + 1;
  os << "\n";
  for (std::size_t k = 0; k < rec.t.size(); ++k) {
    os << rec.t[k] << "," << rec.state[k] + 1 << "," << rec.vs[k];
    if (m > 0)
      for (std::size_t i = 0; i < m; ++i) os << "," << rec.node_err[k][i];
    os << "\n";
  }
  return os.str();
}

RateFit fit_exponential_rate(const std::vector<double>& t,
                             const std::vector<double>& series, double t0,
                             double t1) {
  if (t.size() != series.size())
    throw DimensionError("fit_exponential_rate: grid length mismatch");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t0 || t[k] > t1) continue;
    if (!(series[k] > 0.0)) continue;  // converged-to-zero samples carry no slope
    double x = t[k], y = std::log(series[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  RateFit fit;
  if (count < 2) return fit;
  double denom = static_cast<double>(count) * sxx - sx * sx;
  if (denom == 0.0) return fit;
  fit.rate = (static_cast<double>(count) * sxy - sx * sy) / denom;
  fit.valid = true;
  return fit;
}

EnsembleMsq mean_square_error(const std::vector<TrajectoryRecord>& runs,
                              double t0, double t1) {
  if (runs.empty()) throw ValidationError("mean_square_error: no runs");
  EnsembleMsq out;

  const TrajectoryRecord* grid = nullptr;
  for (const auto& r : runs)
    if (!r.diverged) {
      grid = &r;
      break;
    }
  if (grid == nullptr) {
    out.diverged_runs = runs.size();
    return out;
  }
  out.t = grid->t;
  out.msq.assign(out.t.size(), 0.0);

  std::size_t used = 0;
  for (const auto& r : runs) {
    if (r.diverged) {
      ++out.diverged_runs;
      continue;
    }
    if (r.t.size() != out.t.size())
      throw ValidationError("mean_square_error: runs on different grids");
    for (std::size_t k = 0; k < out.t.size(); ++k) {
      if (r.t[k] != out.t[k])
        throw ValidationError("mean_square_error: runs on different grids");
      out.msq[k] += r.msq[k];
    }
    RateFit fit = fit_exponential_rate(r.t, r.msq, t0, t1);
    if (fit.valid) out.per_run_rate.push_back(fit.rate);
    ++used;
  }
  if (used == 0) return out;
  for (double& v : out.msq) v /= static_cast<double>(used);

  RateFit fit = fit_exponential_rate(out.t, out.msq, t0, t1);
  out.fitted_rate = fit.rate;
  out.fit_valid = fit.valid;

  if (out.per_run_rate.size() >= 2) {
    double mean = 0;
    for (double r : out.per_run_rate) mean += r;
    mean /= static_cast<double>(out.per_run_rate.size());
    double var = 0;
    for (double r : out.per_run_rate) var += (r - mean) * (r - mean);
    var /= static_cast<double>(out.per_run_rate.size() - 1);
    double se = std::sqrt(var / static_cast<double>(out.per_run_rate.size()));
    out.rate_ci_low = mean - 1.959963984540054 * se;
    out.rate_ci_high = mean + 1.959963984540054 * se;
  } else if (out.per_run_rate.size() == 1) {
    out.rate_ci_low = out.rate_ci_high = out.per_run_rate.front();
  }
  return out;
}

}  // namespace pinnet
