#pragma once

#include "fracvortex/green.hpp"
#include "fracvortex/trajectory.hpp"
#include "fracvortex/types.hpp"

#include <vector>

namespace fracvortex {

struct OdeState {
  double t = 0.0;
  VortexConfiguration vortices;
};

struct VortexVelocities {
  std::vector<Vec2> u;
  std::vector<Vec2> v;
};

/// Point-vortex velocities of one family: -(d_j / pi) J grad_{a_j} W_d(a).
std::vector<Vec2> family_velocities(const GreenFunction& green, const VortexFamily& vortices);

/// Velocities of both families. Each family only sees itself. Throws
/// ConfigurationError for an inadmissible state.
VortexVelocities vortex_rhs(const GreenFunction& green, const OdeState& state);

struct IntegrateOptions {
  double collision_threshold = 1e-3;
  double boundary_threshold = 1e-3;
  /// Stop when min_separation < speed_guard * dt * max speed.
  double speed_guard = 4.0;
  /// Record every n-th step (the initial and final states are always kept).
  int sample_stride = 1;
};

/// Classical fixed-step RK4 on the combined state. The trajectory metadata
/// carries per-family W at t = 0 (`W_u0`, `W_v0`) and the largest relative drift
/// max_t |W(t) - W(0)| / (1 + |W(0)|) over recorded samples (`W_u_drift`,
/// `W_v_drift`), plus `max_speed`.
Trajectory integrate(const GreenFunction& green, const OdeState& initial, double horizon, double dt,
                     const IntegrateOptions& options = {});

/// The trajectory's frames as ODE states (for restarting).
OdeState state_at(const Trajectory& trajectory, std::size_t frame);

}  // namespace fracvortex
