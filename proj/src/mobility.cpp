#include "pinnet/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pinnet/errors.hpp"

namespace pinnet {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << what << " must be finite";
    throw ValidationError(os.str());
  }
}

void advance_agent(const MobilityConfig& cfg, Agent& a, double dt, Rng& rng) {
  double budget = dt;
  int guard = 0;
  while (budget > 0 && ++guard <= 1000) {
    if (!a.moving) {
      if (a.wait > budget) {
        a.wait -= budget;
        return;
      }
      budget -= a.wait;
      a.wait = 0;
      a.tx = rng.uniform(0, cfg.arena_side);
      a.ty = rng.uniform(0, cfg.arena_side);
      a.speed = rng.uniform(cfg.v_min, cfg.v_max);
      a.moving = true;
    } else {
      const double dx = a.tx - a.x;
      const double dy = a.ty - a.y;
      const double dist = std::hypot(dx, dy);
      const double travel = dist / a.speed;
      if (travel > budget) {
        const double frac = a.speed * budget / dist;
        a.x += dx * frac;
        a.y += dy * frac;
        return;
      }
      a.x = a.tx;
      a.y = a.ty;
      budget -= travel;
      a.moving = false;
      a.wait = rng.uniform(cfg.w_min, cfg.w_max);
    }
  }
}

std::vector<std::array<double, 2>> positions_of(
    const std::vector<Agent>& agents) {
  std::vector<std::array<double, 2>> pos(agents.size());
  for (std::size_t i = 0; i < agents.size(); ++i)
    pos[i] = {agents[i].x, agents[i].y};
  return pos;
}

double link_fraction(const Matrix& l) {
  const std::size_t m = l.rows;
  if (m < 2) return 0;
  std::size_t links = 0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (i != j && l(i, j) > 0) ++links;
  return double(links) / double(m * (m - 1));
}

}  // namespace

void validate_mobility_config(const MobilityConfig& cfg) {
  require_finite(cfg.arena_side, "arena side");
  if (!(cfg.arena_side > 0))
    throw ValidationError("arena side must be positive");
  require_finite(cfg.r_link, "interaction radius");
  if (!(cfg.r_link > 0))
    throw ValidationError("interaction radius must be positive");
  require_finite(cfg.v_min, "minimum speed");
  require_finite(cfg.v_max, "maximum speed");
  if (!(cfg.v_min > 0) || !(cfg.v_min <= cfg.v_max))
    throw ValidationError("speed bounds must satisfy 0 < v_min <= v_max");
  require_finite(cfg.w_min, "minimum waiting time");
  require_finite(cfg.w_max, "maximum waiting time");
  if (!(cfg.w_min >= 0) || !(cfg.w_min <= cfg.w_max))
    throw ValidationError("waiting bounds must satisfy 0 <= w_min <= w_max");
  if (cfg.agents < 1) throw ValidationError("agent count must be at least 1");
  const Rect& r = cfg.control_region;
  require_finite(r.x0, "control region");
  require_finite(r.y0, "control region");
  require_finite(r.x1, "control region");
  require_finite(r.y1, "control region");
  if (!(r.x0 <= r.x1) || !(r.y0 <= r.y1))
    throw ValidationError("control region is empty");
  if (r.x0 < 0 || r.y0 < 0 || r.x1 > cfg.arena_side || r.y1 > cfg.arena_side)
    throw ValidationError("control region must lie inside the arena");
}

std::vector<Agent> init_agents(const MobilityConfig& cfg, Rng& rng) {
  validate_mobility_config(cfg);
  std::vector<Agent> agents(cfg.agents);
  for (Agent& a : agents) {
    a.x = rng.uniform(0, cfg.arena_side);
    a.y = rng.uniform(0, cfg.arena_side);
  }
  for (Agent& a : agents) a.wait = rng.uniform(cfg.w_min, cfg.w_max);
  return agents;
}

void rwp_step(const MobilityConfig& cfg, std::vector<Agent>& agents, double dt,
              Rng& rng) {
  if (!(dt > 0) || !std::isfinite(dt))
    throw ValidationError("time step must be positive and finite");
  for (Agent& a : agents) advance_agent(cfg, a, dt, rng);
}

Matrix proximity_topology(const std::vector<std::array<double, 2>>& positions,
                          double r_link) {
  if (!(r_link > 0) || !std::isfinite(r_link))
    throw ValidationError("interaction radius must be positive and finite");
  const std::size_t m = positions.size();
  Matrix l(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double d = std::hypot(positions[i][0] - positions[j][0],
                                  positions[i][1] - positions[j][1]);
      if (d <= r_link) {
        l(i, j) = 1;
        l(j, i) = 1;
      }
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    double row = 0;
    for (std::size_t j = 0; j < m; ++j)
      if (j != i) row += l(i, j);
    l(i, i) = -row;
  }
  return l;
}

Matrix proximity_topology(const std::vector<Agent>& agents, double r_link) {
  return proximity_topology(positions_of(agents), r_link);
}

Matrix spatial_pinning(const std::vector<std::array<double, 2>>& positions,
                       const Rect& region) {
  const std::size_t m = positions.size();
  Matrix c(m, m);
  for (std::size_t i = 0; i < m; ++i)
    if (region.contains(positions[i][0], positions[i][1])) c(i, i) = 1;
  return c;
}

std::vector<double> pinning_flags(const std::vector<Agent>& agents,
                                  const Rect& region) {
  std::vector<double> flags(agents.size(), 0.0);
  for (std::size_t i = 0; i < agents.size(); ++i)
    if (region.contains(agents[i].x, agents[i].y)) flags[i] = 1.0;
  return flags;
}

std::pair<Matrix, Matrix> rwp_average_matrices(const MobilityConfig& cfg) {
  validate_mobility_config(cfg);
  const std::size_t m = cfg.agents;
  const double w = cfg.arena_side;
  const double l = std::numbers::pi * cfg.r_link * cfg.r_link / (w * w);
  Matrix lbar(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) lbar(i, j) = l;
    lbar(i, i) = -l * double(m - 1);
  }
  const Rect& r = cfg.control_region;
  const double ratio = (r.x1 - r.x0) * (r.y1 - r.y0) / (w * w);
  return {lbar, Matrix::identity(m) * ratio};
}

EscapeBounds escape_bounds(const MobilityConfig& cfg, double p_meet,
                           double p_region, double d_arena, double d_region) {
  validate_mobility_config(cfg);
  if (!(p_meet > 0) || !(p_meet <= 1) || !(p_region > 0) || !(p_region <= 1))
    throw ValidationError("escape probabilities must lie in (0, 1]");
  if (!(d_arena >= 0) || !std::isfinite(d_arena) || !(d_region >= 0) ||
      !std::isfinite(d_region))
    throw ValidationError("diameters must be nonnegative and finite");
  EscapeBounds b;
  b.w_bound =
      d_arena / (p_meet * cfg.v_min) + (1 - p_meet) * cfg.w_max / p_meet;
  b.e_bound =
      d_region / (p_region * cfg.v_min) + (1 - p_region) * cfg.w_max / p_region;
  return b;
}

MobilityStats rwp_statistics(const MobilityConfig& cfg, double dt,
                             double horizon, std::size_t sample_stride,
                             Rng& rng, std::vector<PositionSample>* log) {
  validate_mobility_config(cfg);
  if (!(dt > 0) || !std::isfinite(dt))
    throw ValidationError("time step must be positive and finite");
  if (!(horizon > 0) || !std::isfinite(horizon))
    throw ValidationError("horizon must be positive and finite");
  if (sample_stride == 0) sample_stride = 1;
  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  if (steps < 1) throw ValidationError("horizon shorter than one step");

  std::vector<Agent> agents = init_agents(cfg, rng);
  MobilityStats st;
  double pin_acc = 0, link_acc = 0;
  for (std::size_t k = 0; k < steps; ++k) {
    rwp_step(cfg, agents, dt, rng);
    if (k % sample_stride != 0) continue;
    const std::vector<double> flags = pinning_flags(agents, cfg.control_region);
    double pinned = 0;
    for (double f : flags) pinned += f;
    pin_acc += pinned / double(cfg.agents);
    link_acc += link_fraction(proximity_topology(agents, cfg.r_link));
    ++st.samples;
    if (log) {
      PositionSample ps;
      ps.t = dt * double(k + 1);
      ps.pos = positions_of(agents);
      ps.pinned.assign(flags.size(), 0);
      for (std::size_t i = 0; i < flags.size(); ++i)
        ps.pinned[i] = flags[i] > 0 ? 1 : 0;
      log->push_back(std::move(ps));
    }
  }
  st.pin_fraction = pin_acc / double(st.samples);
  st.link_frequency = link_acc / double(st.samples);
  return st;
}

std::string positions_csv(const std::vector<PositionSample>& log) {
  std::ostringstream os;
  os.precision(17);
  os << "t,agent,x,y,pinned\n";
  for (const PositionSample& ps : log)
    for (std::size_t i = 0; i < ps.pos.size(); ++i)
      os << ps.t << ',' << (i + 1) << ',' << ps.pos[i][0] << ','
         << ps.pos[i][1] << ',' << ps.pinned[i] << '\n';
  return os.str();
}

MobileRun simulate_mobile(const MobilityConfig& cfg, const DynamicsSpec& dyn,
                          const CouplingParams& cp,
                          const std::vector<double>& x0,
                          const std::vector<double>& s0, double h,
                          double horizon, Rng& rng,
                          const MobileOptions& opts) {
  validate_mobility_config(cfg);
  const std::size_t m = cfg.agents;
  const std::size_t n = dyn.n;
  if (x0.size() != m * n)
    throw DimensionError("initial node block must have length agents*n");
  if (s0.size() != n)
    throw DimensionError("initial target state must have length n");
  if (!(h > 0) || !std::isfinite(h))
    throw ValidationError("step size must be positive and finite");
  if (!(horizon > 0) || !std::isfinite(horizon))
    throw ValidationError("horizon must be positive and finite");
  const auto steps = static_cast<std::size_t>(std::llround(horizon / h));
  if (steps < 1) throw ValidationError("horizon shorter than one step");
  std::size_t stride = opts.stride;
  if (stride == 0) stride = std::max<std::size_t>(1, steps / 100000);

  std::vector<Agent> agents = init_agents(cfg, rng);
  std::vector<double> y(m * n + n);
  std::copy(x0.begin(), x0.end(), y.begin());
  std::copy(s0.begin(), s0.end(), y.begin() + std::ptrdiff_t(m * n));

  MobileRun run;
  run.traj.h = h;
  auto record = [&](double t) {
    const double* x = y.data();
    const double* s = y.data() + m * n;
    double vs = 0, msq = 0;
    for (std::size_t i = 0; i < m; ++i) {
      double sq = 0;
      for (std::size_t k = 0; k < n; ++k) {
        const double e = x[i * n + k] - s[k];
        vs = std::max(vs, std::abs(e));
        sq += e * e;
      }
      msq += sq;
    }
    run.traj.t.push_back(t);
    run.traj.state.push_back(0);
    run.traj.vs.push_back(vs);
    run.traj.msq.push_back(msq / double(m));
  };
  record(0.0);

  double pin_acc = 0, link_acc = 0;
  std::size_t executed = 0;
  for (std::size_t k = 0; k < steps; ++k) {
    const Matrix l = proximity_topology(agents, cfg.r_link);
    const std::vector<double> flags = pinning_flags(agents, cfg.control_region);
    double pinned = 0;
    for (double f : flags) pinned += f;
    pin_acc += pinned / double(m);
    link_acc += link_fraction(l);

    const auto rhs = [&](double t, const double* yy, double* dyy) {
      coupled_rhs_into(l, flags, dyn, cp, t, yy, yy + m * n, dyy,
                       dyy + m * n);
    };
    y = rk4_step(rhs, h * double(k), y, h);
    rwp_step(cfg, agents, h, rng);
    ++executed;

    const double t_now = h * double(k + 1);
    if (opts.position_stride > 0 && (k % opts.position_stride == 0)) {
      PositionSample ps;
      ps.t = t_now;
      ps.pos = positions_of(agents);
      const std::vector<double> pf = pinning_flags(agents, cfg.control_region);
      ps.pinned.assign(pf.size(), 0);
      for (std::size_t i = 0; i < pf.size(); ++i)
        ps.pinned[i] = pf[i] > 0 ? 1 : 0;
      run.positions.push_back(std::move(ps));
    }
    if (max_abs(y) > opts.divergence_guard) {
      run.traj.diverged = true;
      record(t_now);
      break;
    }
    if ((k + 1) % stride == 0 || k + 1 == steps) record(t_now);
  }
  run.pin_fraction = pin_acc / double(executed);
  run.link_frequency = link_acc / double(executed);
  return run;
}

}  // namespace pinnet
