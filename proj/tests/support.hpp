#pragma once

#include "fracvortex/types.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace fracvortex::testing {

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Uniform point in the disk of radius `radius` about the origin.
inline Vec2 random_in_disk(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    const Vec2 p(u(rng), u(rng));
    if (p.norm() < 1.0) return radius * p;
  }
}

inline double relative(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace fracvortex::testing
