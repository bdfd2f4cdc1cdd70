#pragma once

#include "fracvortex/green.hpp"
#include "fracvortex/types.hpp"

#include <span>

namespace fracvortex {

// The canonical harmonic map H = exp(i theta) of one vortex family is carried
// by its stream function Phi, current j(H) = -J grad Phi and phase theta:
//
//   Phi(x) = sum_j d_j (log|x - a_j| + F(x, a_j)),
//
// so Delta Phi = 2 pi sum_j d_j delta_{a_j}, Phi = 0 on the boundary, and the
// current is divergence free with zero normal component.

double stream_function(const GreenFunction& green, const VortexFamily& vortices, const Vec2& x);

Vec2 stream_gradient(const GreenFunction& green, const VortexFamily& vortices, const Vec2& x);

/// j(H)(x) = -J grad Phi(x).
Vec2 canonical_current(const GreenFunction& green, const VortexFamily& vortices, const Vec2& x);

struct PhaseOptions {
  /// Segments passing closer than this to a vortex are rerouted.
  double detour_radius = 1e-6;
  /// Quadrature panel length for the smooth part of the line integral.
  double panel_length = 0.05;
};

/// Integral of j(H) along the polyline (not reduced modulo 2 pi). Around a
/// closed loop this is 2 pi times the enclosed degree.
double phase_along(const GreenFunction& green, const VortexFamily& vortices, std::span<const Vec2> path,
                   const PhaseOptions& options = {});

/// theta(x) with theta(reference) = 0, integrated along the straight segment
/// from reference to x (rerouted around vortices). Defined modulo 2 pi.
double phase(const GreenFunction& green, const VortexFamily& vortices, const Vec2& x, const Vec2& reference,
             const PhaseOptions& options = {});

struct AnnulusQuadrature {
  int radial_points = 48;      ///< Gauss points per radial panel in vortex patches
  int radial_panels = 4;
  int angular_points = 256;    ///< trapezoid nodes around each patch
  int background_panels = 48;  ///< per direction
  int background_order = 8;    ///< Gauss points per background panel and direction
};

/// Largest admissible excision radius: the balls B_rho(a_j) must be disjoint and
/// inside the domain.
double max_excision_radius(const Domain& domain, const VortexFamily& vortices);

/// Integral of |grad H|^2 = |j(H)|^2 over the domain with B_rho(a_j) removed.
/// Throws DomainError unless 0 < rho < max_excision_radius.
double annulus_energy(const GreenFunction& green, const VortexFamily& vortices, double rho,
                      const AnnulusQuadrature& quadrature = {});

/// annulus_energy(rho) - 2 M pi log(1/rho) - 2 W_d(a); vanishes like rho^2.
double annulus_energy_defect(const GreenFunction& green, const VortexFamily& vortices, double rho,
                             const AnnulusQuadrature& quadrature = {});

}  // namespace fracvortex
