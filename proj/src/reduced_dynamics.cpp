#include "fracvortex/reduced_dynamics.hpp"

#include "fracvortex/errors.hpp"
#include "fracvortex/renormalized_energy.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace fracvortex {
namespace {

TrajectoryFrame make_frame(double t, const VortexConfiguration& cfg) {
  TrajectoryFrame f{t, {}};
  for (Component c : {Component::u, Component::v}) {
    const auto& fam = cfg.family(c);
    for (std::size_t j = 0; j < fam.size(); ++j) {
      f.points.push_back({c, static_cast<int>(j), fam[j].degree, fam[j].position});
    }
  }
  return f;
}

VortexConfiguration displaced(const VortexConfiguration& base, const VortexVelocities& k, double h) {
  VortexConfiguration out = base;
  for (std::size_t j = 0; j < out.u.size(); ++j) out.u[j].position += h * k.u[j];
  for (std::size_t j = 0; j < out.v.size(); ++j) out.v[j].position += h * k.v[j];
  return out;
}

bool finite(const VortexVelocities& k) {
  for (const auto& w : k.u) if (!w.allFinite()) return false;
  for (const auto& w : k.v) if (!w.allFinite()) return false;
  return true;
}

double max_speed(const VortexVelocities& k) {
  double s = 0.0;
  for (const auto& w : k.u) s = std::max(s, w.norm());
  for (const auto& w : k.v) s = std::max(s, w.norm());
  return s;
}

}  // namespace

std::vector<Vec2> family_velocities(const GreenFunction& green, const VortexFamily& vortices) {
  std::vector<Vec2> vel;
  vel.reserve(vortices.size());
  for (std::size_t j = 0; j < vortices.size(); ++j) {
    vel.push_back(-(vortices[j].degree / pi) * apply_j(grad_W(green, vortices, j)));
  }
  return vel;
}

VortexVelocities vortex_rhs(const GreenFunction& green, const OdeState& state) {
  const auto& cfg = state.vortices;
  if (!(min_separation(cfg.u, cfg.v, green.domain()) > 0.0)) {
    throw ConfigurationError(fmt::format("inadmissible vortex configuration at t = {}", state.t));
  }
  return {family_velocities(green, cfg.u), family_velocities(green, cfg.v)};
}

Trajectory integrate(const GreenFunction& green, const OdeState& initial, double horizon, double dt,
                     const IntegrateOptions& options) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(horizon >= 0.0)) throw std::invalid_argument("horizon must be non-negative");
  const Domain& domain = green.domain();
  vortex_rhs(green, initial);  // admissibility of the initial state

  Trajectory tr;
  const double w_u0 = initial.vortices.u.empty() ? 0.0 : renormalized_W(green, initial.vortices.u);
  const double w_v0 = initial.vortices.v.empty() ? 0.0 : renormalized_W(green, initial.vortices.v);
  double drift_u = 0.0;
  double drift_v = 0.0;
  double top_speed = 0.0;

  auto record = [&](double t, const VortexConfiguration& cfg) {
    tr.frames.push_back(make_frame(t, cfg));
    if (!cfg.u.empty()) drift_u = std::max(drift_u, std::abs(renormalized_W(green, cfg.u) - w_u0) / (1 + std::abs(w_u0)));
    if (!cfg.v.empty()) drift_v = std::max(drift_v, std::abs(renormalized_W(green, cfg.v) - w_v0) / (1 + std::abs(w_v0)));
  };

  const long steps = std::max(0L, static_cast<long>(std::ceil(horizon / dt - 1e-9)));
  VortexConfiguration cfg = initial.vortices;
  record(initial.t, cfg);
  const int stride = std::max(1, options.sample_stride);
  double t_now = initial.t;

  for (long n = 0; n < steps; ++n) {
    const double t = initial.t + n * dt;
    const double h = (n + 1 == steps) ? (initial.t + horizon) - t : dt;

    VortexVelocities k1;
    try {
      k1 = vortex_rhs(green, {t, cfg});
    } catch (const Error&) {
      tr.termination = Termination::collision;
      break;
    }
    if (!finite(k1)) {
      tr.termination = Termination::blowup;
      break;
    }
    const double speed = max_speed(k1);
    top_speed = std::max(top_speed, speed);

    double boundary_gap = std::numeric_limits<double>::infinity();
    for (Component c : {Component::u, Component::v}) {
      for (const auto& p : cfg.family(c)) boundary_gap = std::min(boundary_gap, domain.distance_to_boundary(p.position));
    }
    if (boundary_gap < options.boundary_threshold) {
      tr.termination = Termination::boundary;
      break;
    }
    const double sep = min_separation(cfg.u, cfg.v, domain);
    if (sep < options.collision_threshold || sep < options.speed_guard * h * speed) {
      tr.termination = limiting_term(cfg.u, cfg.v, domain) == SeparationLimit::boundary ? Termination::boundary
                                                                                        : Termination::collision;
      break;
    }

    VortexVelocities k2, k3, k4;
    try {
      k2 = vortex_rhs(green, {t + h / 2, displaced(cfg, k1, h / 2)});
      k3 = vortex_rhs(green, {t + h / 2, displaced(cfg, k2, h / 2)});
      k4 = vortex_rhs(green, {t + h, displaced(cfg, k3, h)});
    } catch (const Error&) {
      tr.termination = Termination::collision;
      break;
    }
    if (!finite(k2) || !finite(k3) || !finite(k4)) {
      tr.termination = Termination::blowup;
      break;
    }
    for (std::size_t j = 0; j < cfg.u.size(); ++j) {
      cfg.u[j].position += (h / 6) * (k1.u[j] + 2 * k2.u[j] + 2 * k3.u[j] + k4.u[j]);
    }
    for (std::size_t j = 0; j < cfg.v.size(); ++j) {
      cfg.v[j].position += (h / 6) * (k1.v[j] + 2 * k2.v[j] + 2 * k3.v[j] + k4.v[j]);
    }
    t_now = (n + 1 == steps) ? initial.t + horizon : initial.t + (n + 1) * dt;
    if ((n + 1) % stride == 0 || n + 1 == steps) {
      try {
        record(t_now, cfg);
      } catch (const Error&) {
        tr.frames.push_back(make_frame(t_now, cfg));
        tr.termination = Termination::collision;
        break;
      }
    }
  }
  if (tr.frames.back().t != t_now) tr.frames.push_back(make_frame(t_now, cfg));

  tr.metadata["W_u0"] = w_u0;
  tr.metadata["W_v0"] = w_v0;
  tr.metadata["W_u_drift"] = drift_u;
  tr.metadata["W_v_drift"] = drift_v;
  tr.metadata["max_speed"] = top_speed;
  return tr;
}

OdeState state_at(const Trajectory& trajectory, std::size_t frame) {
  const auto& f = trajectory.frames.at(frame);
  OdeState s;
  s.t = f.t;
  for (const auto& p : f.points) s.vortices.family(p.component).push_back({p.position, p.degree});
  return s;
}

}  // namespace fracvortex
