#pragma once

#include "fracvortex/green.hpp"
#include "fracvortex/types.hpp"

#include <vector>

namespace fracvortex {

/// r(a, b) = 1/4 min{r_a, r_b, r_ab}: intra-family separations and boundary
/// distances per family, plus cross-family separations. Positive iff the
/// configuration is admissible; degenerate input yields 0 or a negative value.
double min_separation(const VortexFamily& a, const VortexFamily& b, const Domain& domain);

/// Which term attains min_separation.
enum class SeparationLimit { none, intra_family, boundary, cross_family };
SeparationLimit limiting_term(const VortexFamily& a, const VortexFamily& b, const Domain& domain);

/// W_d(a) = -pi (sum_{j != k} d_j d_k log|a_j - a_k| + sum_{j,k} d_j d_k F(a_j, a_k)).
/// The diagonal F(a_j, a_j) terms are included.
double renormalized_W(const GreenFunction& green, const VortexFamily& vortices);

/// Analytic gradient of renormalized_W with respect to a_j.
Vec2 grad_W(const GreenFunction& green, const VortexFamily& vortices, std::size_t j);

struct EnergyReport {
  double W = 0.0;
  std::vector<Vec2> gradient;
  double min_separation = 0.0;
};

/// W, all gradients and the one-family separation radius.
EnergyReport energy_report(const GreenFunction& green, const VortexFamily& vortices);

}  // namespace fracvortex
