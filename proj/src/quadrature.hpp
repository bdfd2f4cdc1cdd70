#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace fracvortex::detail {

/// Gauss-Legendre nodes and weights on [-1, 1].
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  std::vector<double> x(n), w(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

/// Composite Gauss-Legendre rule on [a, b] with `panels` equal panels.
struct PanelRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline PanelRule composite_gauss(double a, double b, int panels, int order) {
  const auto [x, w] = gauss_legendre(order);
  PanelRule rule;
  const double len = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * len;
    for (int k = 0; k < order; ++k) {
      rule.nodes.push_back(mid + 0.5 * len * x[k]);
      rule.weights.push_back(0.5 * len * w[k]);
    }
  }
  return rule;
}

}  // namespace fracvortex::detail
