#pragma once

#include "fracvortex/errors.hpp"

#include <Eigen/Dense>

#include <utility>

namespace fracvortex {

/// Radial moduli (f1, f2) of a single degree-one vortex of the first component
/// on [0, R]:
///
///   -f1'' - f1'/r + f1/r^2 + (f1^2 + g f2^2 - 1) f1 = 0,
///   -f2'' - f2'/r          + (f2^2 + g f1^2 - 1) f2 = 0,
///   f1(0) = 0,  f2'(0) = 0,  f1(R) = f2(R) = 1/sqrt(1+g).
struct RadialProfile {
  double g = 0.0;
  double R = 0.0;
  Eigen::VectorXd r;
  Eigen::VectorXd f1;
  Eigen::VectorXd f2;
  double residual = 0.0;  ///< max-norm of the discrete ODE residual
  int newton_iterations = 0;

  double background() const;  ///< 1/sqrt(1+g)
  /// Linear interpolation; beyond R both moduli equal the background.
  std::pair<double, double> at(double radius) const;
};

struct ProfileOptions {
  double tolerance = 1e-9;   ///< on the max-norm residual
  int max_iterations = 60;
  int max_rejections = 20;   ///< consecutive step halvings before giving up
  double tail_ratio = 40.0;  ///< tail spacing / spacing at r = 0
  /// Solve only for f1 with f2 frozen at 1 (requires g = 0).
  bool freeze_second = false;
};

class ProfileNonconvergence : public SolverError {
 public:
  ProfileNonconvergence(const std::string& what, double residual, RadialProfile last)
      : SolverError(what, residual), last_iterate_(std::move(last)) {}
  const RadialProfile& last_iterate() const { return last_iterate_; }

 private:
  RadialProfile last_iterate_;
};

/// Graded mesh on [0, R]: spacing h0 (1 + r) near the core, constant
/// tail_ratio * h0 beyond r = tail_ratio - 1, with h0 chosen to give `nodes`.
Eigen::VectorXd graded_mesh(double R, int nodes, double tail_ratio = 40.0);

/// Second-order finite differences on the graded mesh, solved by damped Newton
/// from f1 = min(r, 1)/sqrt(1+g), f2 = 1/sqrt(1+g).
RadialProfile solve_profile(double g, double R, int nodes, const ProfileOptions& options = {});

/// Discrete ODE residual of (f1, f2) on the profile's mesh.
Eigen::VectorXd profile_residual(const RadialProfile& profile);

struct TailFit {
  double alpha_hat = 0.0;
  double beta_hat = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  double residual = 0.0;  ///< rms misfit, in coefficient units
  bool warning = false;   ///< residual above 10% of a coefficient
};

/// Nodes violating 0 <= f1 <= 1/sqrt(1+g) <= f2 <= 1.
int bound_violations(const RadialProfile& profile);

/// Predicted r^-2 tail coefficients: alpha = sqrt(1+g) / (2 (1 - g^2)), beta = g alpha.
std::pair<double, double> tail_coefficients(double g);

/// Least-squares fit of (s - f1) and (f2 - s) against r^-2 on [lo, hi]
/// (default [R/2, 3R/4]).
TailFit tail_fit(const RadialProfile& profile, double lo = -1, double hi = -1);

/// Log-log slope of (s - f1) against r on [lo, hi].
double tail_exponent(const RadialProfile& profile, double lo, double hi);

/// max of r^3 |f1'(r)| over mesh intervals inside [lo, hi].
double derivative_decay(const RadialProfile& profile, double lo, double hi);

/// Integral of e_k + e_p over [r_lo, r_hi], where
///   e_k = r f1'^2 + r f2'^2 + f1^2 / r,
///   e_p = r/2 (f1^2 - s^2)^2 + g r (f1^2 - s^2)(f2^2 - s^2) + r/2 (f2^2 - s^2)^2,
/// by composite trapezoid on the mesh (slopes taken per interval).
double profile_energy(const RadialProfile& profile, double r_lo, double r_hi);

struct GammaResult {
  double gamma = 0.0;
  double core = 0.0;             ///< pi * energy on [0, sqrt(1+g)]
  double outer = 0.0;            ///< pi * (energy - 1/(r(1+g))) on [sqrt(1+g), R]
  double tail_correction = 0.0;  ///< analytic estimate on (R, infinity)
  double residual = 0.0;
  TailFit fit;
  RadialProfile profile;
};

/// Core-energy constant
///   gamma_g = pi int_0^{sqrt(1+g)} e_R dr + pi int_{sqrt(1+g)}^inf (e_R - 1/(r(1+g))) dr,
/// from the profile on [0, R] plus a tail estimate built from the fitted r^-2
/// coefficients.
GammaResult gamma_g(double g, double R, int nodes, const ProfileOptions& options = {});

/// Node count giving the default core spacing at outer radius R.
int default_profile_nodes(double R);

}  // namespace fracvortex
