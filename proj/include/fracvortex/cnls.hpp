#pragma once

#include "fracvortex/cosine_transform.hpp"
#include "fracvortex/geometry.hpp"
#include "fracvortex/green.hpp"
#include "fracvortex/profile_gamma.hpp"
#include "fracvortex/types.hpp"

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace fracvortex {

/// Complex samples at the cell centers of a rectangle grid.
struct ComplexField {
  Grid grid;
  ComplexArray data;

  explicit ComplexField(const Grid& g) : grid(g), data(ComplexArray::Zero(g.nx(), g.ny())) {}
  ComplexField(const Grid& g, ComplexArray values);

  Complex& operator()(int i, int j) { return data(i, j); }
  Complex operator()(int i, int j) const { return data(i, j); }
  bool all_finite() const { return data.allFinite(); }
};

/// The two components of
///   i u_t - Delta u + (|u|^2 + g |v|^2 - 1) u / eps^2 = 0,
///   i v_t - Delta v + (g |u|^2 + |v|^2 - 1) v / eps^2 = 0,
/// with homogeneous Neumann walls.
struct SimState {
  double t = 0.0;
  ComplexField u;
  ComplexField v;
  double epsilon = 0.0;
  double g = 0.0;

  SimState(const Grid& grid, double eps, double coupling) : u(grid), v(grid), epsilon(eps), g(coupling) {}
  const Grid& grid() const { return u.grid; }
};

/// Checks eps >= 2h, matching grids and g in [0, 1).
void validate_state(const SimState& state);

struct InitialDataOptions {
  /// Minimum vortex-to-wall distance in units of eps.
  double boundary_clearance = 5.0;
  /// Minimum distance between any two vortices (either component) in units of eps.
  double vortex_clearance = 10.0;
  int threads = 1;
};

/// Well-prepared data: on each component a product of radial core profiles at
/// its own vortices (f1) and at the other component's vortices (f2), scaled so
/// the far field is 1/sqrt(1+g), times exp(i theta) with theta the canonical
/// harmonic-map phase of that component's family. theta vanishes at the
/// lower-left cell center.
SimState build_initial_data(const GreenFunction& green, const Grid& grid, const VortexConfiguration& vortices,
                            const RadialProfile& profile, double epsilon, const InitialDataOptions& options = {});

struct StepOptions {
  /// dt must not exceed dt_limit * eps^2.
  double dt_limit = 0.5;
  /// Test hook: skip the nonlinear phase rotation.
  bool nonlinear = true;
};

/// Strang splitting: exact nonlinear phase rotation for dt/2, exact kinetic
/// propagation of every cosine mode for dt, nonlinear again for dt/2. Both
/// substeps are unitary, so each component's mass is conserved to round-off.
class SplitStepSolver {
 public:
  explicit SplitStepSolver(const Grid& grid, StepOptions options = {});

  const Grid& grid() const { return grid_; }
  const StepOptions& options() const { return options_; }

  /// Advances in place by one step. Throws BlowupError (leaving the state at
  /// its last finite value) if non-finite samples appear.
  void step(SimState& state, double dt);
  void advance(SimState& state, double dt, long steps);

  /// The kinetic factor applied to cosine mode (k, l) over dt:
  /// exp(-i lambda dt) with lambda = -(pi k / Lx)^2 - (pi l / Ly)^2.
  Complex kinetic_factor(int k, int l, double dt) const;

 private:
  void nonlinear_half(SimState& state, double dt) const;
  void kinetic(SimState& state, double dt);

  Grid grid_;
  StepOptions options_;
  std::unique_ptr<CosineTransform2D> transform_;
  double cached_dt_ = -1.0;
  ComplexArray propagator_;
};

/// Largest dt for which every cosine mode turns by less than pi per step,
/// 1 / (pi ((nx/Lx)^2 + (ny/Ly)^2)). Above it the splitting amplifies round-off
/// in resonant modes at a rate of order 1/eps^2.
double split_step_stability_limit(const Grid& grid);

/// One step from a copy; the input is left untouched.
SimState step(const SimState& state, double dt, const StepOptions& options = {});

/// Per-component mass int |u|^2 (midpoint rule over cells).
double mass(const ComplexField& field);

/// x- and y-components of j(u) = Im(conj(u) grad u): centered differences,
/// second-order one-sided stencils in the first and last cells.
struct CurrentField {
  RealField x;
  RealField y;
};
CurrentField current(const ComplexField& field);

/// Signed vortex density (1/2) div(J j(u)) = (1/2)(d_x j_y - d_y j_x).
RealField jacobian(const ComplexField& field);

/// Integral of jacobian over cells whose centers lie within radius of center.
double jacobian_mass(const ComplexField& field, const Vec2& center, double radius);

/// Integral of
///   |grad u|^2/2 + |grad v|^2/2 + (|u|^2 - s^2)^2/(4 eps^2) + (|v|^2 - s^2)^2/(4 eps^2)
///   + g (|u|^2 - s^2)(|v|^2 - s^2)/(2 eps^2),   s^2 = 1/(1+g),
/// with finite-difference gradients as in current() and the midpoint rule.
double energy(const SimState& state);

/// The same energy with gradients taken spectrally in the cosine basis (the
/// quantity the kinetic substep conserves exactly).
double spectral_energy(const SimState& state);

/// Q = int (j(u) + j(v)).
Vec2 momentum(const SimState& state);

struct Diagnostics {
  double t = 0.0;
  double mass_u = 0.0;
  double mass_v = 0.0;
  double energy = 0.0;
  Vec2 momentum = Vec2::Zero();
};

Diagnostics diagnostics(const SimState& state);

/// CSV with header `t,mass_u,mass_v,energy,Qx,Qy`.
void write_diagnostics_csv(std::ostream& out, const std::vector<Diagnostics>& rows);
void write_diagnostics_csv(const std::string& path, const std::vector<Diagnostics>& rows);

}  // namespace fracvortex
