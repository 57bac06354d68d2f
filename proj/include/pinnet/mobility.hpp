#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "pinnet/dynamics.hpp"
#include "pinnet/matlin.hpp"
#include "pinnet/rng.hpp"
#include "pinnet/switchnet.hpp"

namespace pinnet {

// Closed axis-aligned rectangle.
struct Rect {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  bool contains(double x, double y) const {
    return x >= x0 && x <= x1 && y >= y0 && y <= y1;
  }

  bool operator==(const Rect&) const = default;
};

struct MobilityConfig {
  double arena_side = 100;  // square [0, W]^2
  Rect control_region{0, 0, 50, 50};
  double r_link = 10;   // interaction radius
  double v_min = 500;   // speed bounds
  double v_max = 500;
  double w_min = 0;     // waiting-time bounds
  double w_max = 0.33;
  std::size_t agents = 10;

  bool operator==(const MobilityConfig&) const = default;
};

void validate_mobility_config(const MobilityConfig& cfg);

struct Agent {
  double x = 0, y = 0;    // position
  bool moving = false;
  double tx = 0, ty = 0;  // waypoint
  double speed = 0;
  double wait = 0;        // remaining waiting time
};

// Uniform positions over the arena; all agents start waiting, with waits
// drawn uniformly from [w_min, w_max].
std::vector<Agent> init_agents(const MobilityConfig& cfg, Rng& rng);

// Advance every agent by dt.  Waiting agents count down and on expiry draw a
// waypoint uniform over the arena and a speed uniform in [v_min, v_max];
// moving agents travel toward the waypoint and snap onto it on overshoot,
// then wait for a fresh uniform time.  Leftover step budget rolls across
// phase changes, so arrivals inside a step are exact.
void rwp_step(const MobilityConfig& cfg, std::vector<Agent>& agents, double dt,
              Rng& rng);

// l_ij = 1 iff i != j and the Euclidean distance is at most r_link (closed);
// diagonal balances every row to zero.
Matrix proximity_topology(const std::vector<std::array<double, 2>>& positions,
                          double r_link);
Matrix proximity_topology(const std::vector<Agent>& agents, double r_link);

// c_ii = 1 iff agent i lies in the closed region.
Matrix spatial_pinning(const std::vector<std::array<double, 2>>& positions,
                       const Rect& region);
std::vector<double> pinning_flags(const std::vector<Agent>& agents,
                                  const Rect& region);

// Long-run averages of the mobile process under the uniform-density
// approximation: coupling l(11^T - mI) with l = pi r^2 / W^2, and pinning
// (region area / arena area) I.
std::pair<Matrix, Matrix> rwp_average_matrices(const MobilityConfig& cfg);

struct EscapeBounds {
  double w_bound = 0;  // expected meeting time of two agents
  double e_bound = 0;  // expected control-region entry time
};

// w = d/(p v_min) + (1-p) w_max / p with the meeting probability p_meet and
// arena diameter, and the same form with (p_region, d_region) for entry.
EscapeBounds escape_bounds(const MobilityConfig& cfg, double p_meet,
                           double p_region, double d_arena, double d_region);

struct PositionSample {
  double t = 0;
  std::vector<std::array<double, 2>> pos;
  std::vector<int> pinned;
};

struct MobilityStats {
  double pin_fraction = 0;    // time-average fraction of pinned agents
  double link_frequency = 0;  // time-average ordered-pair link frequency
  std::size_t samples = 0;
};

// Walks the mobility process alone, sampling occupancy statistics every
// sample_stride-th step; optionally logs positions at the same stride.
MobilityStats rwp_statistics(const MobilityConfig& cfg, double dt,
                             double horizon, std::size_t sample_stride,
                             Rng& rng,
                             std::vector<PositionSample>* log = nullptr);

// CSV with header `t,agent,x,y,pinned`, agents 1-based.
std::string positions_csv(const std::vector<PositionSample>& log);

struct MobileOptions {
  std::size_t stride = 0;           // deviation samples; 0 = auto
  std::size_t position_stride = 0;  // 0 = no position log
  double divergence_guard = 1e12;
};

struct MobileRun {
  TrajectoryRecord traj;  // state column is always 0 (no chain here)
  std::vector<PositionSample> positions;
  double pin_fraction = 0;    // averaged over every integration step
  double link_frequency = 0;
};

// Couples the node dynamics through the proximity graph with control injected
// at the currently pinned set, both rebuilt from agent positions every step.
MobileRun simulate_mobile(const MobilityConfig& cfg, const DynamicsSpec& dyn,
                          const CouplingParams& cp,
                          const std::vector<double>& x0,
                          const std::vector<double>& s0, double h,
                          double horizon, Rng& rng,
                          const MobileOptions& opts = {});

}  // namespace pinnet
