#include "fracvortex/profile_gamma.hpp"

#include "fracvortex/types.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace fracvortex {
namespace {

constexpr double kDefaultCoreSpacing = 1e-3;

// Cumulative node density of the graded mesh, in units of h0.
struct MeshMap {
  double knee;   // end of the (1 + r) growth region
  double ratio;  // tail spacing / h0

  double forward(double r) const {
    if (r <= knee) return std::log1p(r);
    return std::log1p(knee) + (r - knee) / ratio;
  }
  double inverse(double phi) const {
    const double phi_knee = std::log1p(knee);
    if (phi <= phi_knee) return std::expm1(phi);
    return knee + (phi - phi_knee) * ratio;
  }
};

MeshMap mesh_map(double tail_ratio) {
  if (!(tail_ratio >= 1.0)) throw std::invalid_argument("tail_ratio must be >= 1");
  return {tail_ratio - 1.0, tail_ratio};
}

using Triplets = std::vector<Eigen::Triplet<double>>;

// Residual (interleaved f1, f2 per node) and optionally the Jacobian entries.
void assemble(const Eigen::VectorXd& r, const Eigen::VectorXd& f1, const Eigen::VectorXd& f2, double g,
              bool freeze_second, Eigen::VectorXd& res, Triplets* jac) {
  const Eigen::Index n = r.size();
  const double s = 1.0 / std::sqrt(1.0 + g);
  res.resize(2 * n);
  auto add = [&](Eigen::Index row, Eigen::Index col, double v) {
    if (jac) jac->emplace_back(static_cast<int>(row), static_cast<int>(col), v);
  };

  // r = 0: f1 Dirichlet, f2 ghost-node symmetric difference.
  res[0] = f1[0];
  add(0, 0, 1.0);
  if (freeze_second) {
    res[1] = f2[0] - 1.0;
    add(1, 1, 1.0);
  } else {
    const double h = r[1] - r[0];
    const double c = 4.0 / (h * h);
    res[1] = -c * (f2[1] - f2[0]) + (f2[0] * f2[0] + g * f1[0] * f1[0] - 1.0) * f2[0];
    add(1, 1, c + 3 * f2[0] * f2[0] + g * f1[0] * f1[0] - 1.0);
    add(1, 3, -c);
    add(1, 0, 2 * g * f1[0] * f2[0]);
  }

  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const double hm = r[i] - r[i - 1];
    const double hp = r[i + 1] - r[i];
    const double cm = 0.5 * (r[i] + r[i - 1]) / hm;
    const double cp = 0.5 * (r[i] + r[i + 1]) / hp;
    const double w = 0.5 * (hm + hp) * r[i];
    const double inv_r2 = 1.0 / (r[i] * r[i]);

    const Eigen::Index k1 = 2 * i;
    const Eigen::Index k2 = 2 * i + 1;
    res[k1] = -(cp * (f1[i + 1] - f1[i]) - cm * (f1[i] - f1[i - 1])) / w + inv_r2 * f1[i] +
              (f1[i] * f1[i] + g * f2[i] * f2[i] - 1.0) * f1[i];
    add(k1, k1 - 2, -cm / w);
    add(k1, k1 + 2, -cp / w);
    add(k1, k1, (cp + cm) / w + inv_r2 + 3 * f1[i] * f1[i] + g * f2[i] * f2[i] - 1.0);
    add(k1, k2, 2 * g * f1[i] * f2[i]);

    if (freeze_second) {
      res[k2] = f2[i] - 1.0;
      add(k2, k2, 1.0);
    } else {
      res[k2] = -(cp * (f2[i + 1] - f2[i]) - cm * (f2[i] - f2[i - 1])) / w +
                (f2[i] * f2[i] + g * f1[i] * f1[i] - 1.0) * f2[i];
      add(k2, k2 - 2, -cm / w);
      add(k2, k2 + 2, -cp / w);
      add(k2, k2, (cp + cm) / w + 3 * f2[i] * f2[i] + g * f1[i] * f1[i] - 1.0);
      add(k2, k1, 2 * g * f1[i] * f2[i]);
    }
  }

  const Eigen::Index last = n - 1;
  res[2 * last] = f1[last] - s;
  add(2 * last, 2 * last, 1.0);
  res[2 * last + 1] = f2[last] - (freeze_second ? 1.0 : s);
  add(2 * last + 1, 2 * last + 1, 1.0);
}

double lerp_at(const Eigen::VectorXd& r, const Eigen::VectorXd& f, double x) {
  if (x <= r[0]) return f[0];
  if (x >= r[r.size() - 1]) return f[f.size() - 1];
  const auto it = std::upper_bound(r.data(), r.data() + r.size(), x);
  const Eigen::Index i = (it - r.data()) - 1;
  const double t = (x - r[i]) / (r[i + 1] - r[i]);
  return (1 - t) * f[i] + t * f[i + 1];
}

// Nodes with r in [lo, hi].
std::pair<Eigen::Index, Eigen::Index> window_nodes(const Eigen::VectorXd& r, double lo, double hi) {
  const auto b = std::lower_bound(r.data(), r.data() + r.size(), lo) - r.data();
  const auto e = std::upper_bound(r.data(), r.data() + r.size(), hi) - r.data();
  return {b, e};
}

}  // namespace

double RadialProfile::background() const { return 1.0 / std::sqrt(1.0 + g); }

std::pair<double, double> RadialProfile::at(double radius) const {
  if (radius >= R) return {background(), background()};
  return {lerp_at(r, f1, radius), lerp_at(r, f2, radius)};
}

Eigen::VectorXd graded_mesh(double R, int nodes, double tail_ratio) {
  if (!(R > 0.0)) throw std::invalid_argument("outer radius must be positive");
  if (nodes < 3) throw std::invalid_argument("mesh needs at least 3 nodes");
  const MeshMap map = mesh_map(tail_ratio);
  const double total = map.forward(R);
  Eigen::VectorXd r(nodes);
  for (int i = 0; i < nodes; ++i) r[i] = map.inverse(total * i / (nodes - 1));
  r[0] = 0.0;
  r[nodes - 1] = R;
  return r;
}

int default_profile_nodes(double R) {
  const MeshMap map = mesh_map(40.0);
  return 1 + static_cast<int>(std::ceil(map.forward(R) / kDefaultCoreSpacing));
}

Eigen::VectorXd profile_residual(const RadialProfile& p) {
  Eigen::VectorXd res;
  assemble(p.r, p.f1, p.f2, p.g, false, res, nullptr);
  return res;
}

RadialProfile solve_profile(double g, double R, int nodes, const ProfileOptions& options) {
  if (!(g >= 0.0 && g < 1.0)) throw std::invalid_argument(fmt::format("coupling g = {} outside [0, 1)", g));
  if (!(R >= 50.0)) throw std::invalid_argument(fmt::format("outer radius R = {} below 50", R));
  if (nodes < 512) throw std::invalid_argument(fmt::format("mesh of {} nodes below 512", nodes));
  if (options.freeze_second && g != 0.0) throw std::invalid_argument("freeze_second requires g = 0");

  RadialProfile p;
  p.g = g;
  p.R = R;
  p.r = graded_mesh(R, nodes, options.tail_ratio);
  const double s = p.background();
  p.f1 = (p.r.array().min(1.0) * s).matrix();
  p.f2 = Eigen::VectorXd::Constant(nodes, options.freeze_second ? 1.0 : s);

  const Eigen::Index dim = 2 * static_cast<Eigen::Index>(nodes);
  Eigen::VectorXd res;
  Triplets trip;
  trip.reserve(10 * nodes);
  Eigen::SparseMatrix<double> jac(dim, dim);
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;

  assemble(p.r, p.f1, p.f2, g, options.freeze_second, res, nullptr);
  double norm = res.lpNorm<Eigen::Infinity>();

  for (int it = 0; it < options.max_iterations; ++it) {
    if (norm <= options.tolerance) {
      p.residual = norm;
      p.newton_iterations = it;
      return p;
    }
    trip.clear();
    assemble(p.r, p.f1, p.f2, g, options.freeze_second, res, &trip);
    jac.setFromTriplets(trip.begin(), trip.end());
    if (!analyzed) {
      lu.analyzePattern(jac);
      analyzed = true;
    }
    lu.factorize(jac);
    if (lu.info() != Eigen::Success) {
      p.residual = norm;
      throw ProfileNonconvergence("singular Newton matrix in radial profile solve", norm, p);
    }
    const Eigen::VectorXd step = lu.solve(-res);

    double lambda = 1.0;
    int rejections = 0;
    for (;;) {
      Eigen::VectorXd t1 = p.f1, t2 = p.f2;
      for (Eigen::Index i = 0; i < nodes; ++i) {
        t1[i] += lambda * step[2 * i];
        t2[i] += lambda * step[2 * i + 1];
      }
      Eigen::VectorXd trial;
      assemble(p.r, t1, t2, g, options.freeze_second, trial, nullptr);
      const double trial_norm = trial.lpNorm<Eigen::Infinity>();
      if (trial_norm < norm || trial_norm <= options.tolerance) {
        p.f1 = std::move(t1);
        p.f2 = std::move(t2);
        norm = trial_norm;
        break;
      }
      if (++rejections >= options.max_rejections) {
        p.residual = norm;
        p.newton_iterations = it;
        throw ProfileNonconvergence(
            fmt::format("radial profile Newton stagnated at residual {:.3e} after {} iterations", norm, it), norm, p);
      }
      lambda *= 0.5;
    }
  }
  p.residual = norm;
  p.newton_iterations = options.max_iterations;
  if (norm <= options.tolerance) return p;
  throw ProfileNonconvergence(
      fmt::format("radial profile Newton hit the iteration cap at residual {:.3e}", norm), norm, p);
}

std::pair<double, double> tail_coefficients(double g) {
  const double alpha = std::sqrt(1.0 + g) / (2.0 * (1.0 - g * g));
  return {alpha, g * alpha};
}

TailFit tail_fit(const RadialProfile& p, double lo, double hi) {
  TailFit fit;
  fit.window_lo = lo < 0 ? p.R / 2 : lo;
  fit.window_hi = hi < 0 ? 0.75 * p.R : hi;
  if (!(fit.window_lo >= p.R / 4 && fit.window_hi <= p.R && fit.window_lo < fit.window_hi)) {
    throw std::invalid_argument("tail fit window must lie inside [R/4, R]");
  }
  const auto [b, e] = window_nodes(p.r, fit.window_lo, fit.window_hi);
  if (e - b < 2) throw std::invalid_argument("tail fit window holds fewer than two nodes");

  const double s = p.background();
  double xx = 0, xy1 = 0, xy2 = 0;
  for (Eigen::Index i = b; i < e; ++i) {
    const double x = 1.0 / (p.r[i] * p.r[i]);
    xx += x * x;
    xy1 += x * (s - p.f1[i]);
    xy2 += x * (p.f2[i] - s);
  }
  fit.alpha_hat = xy1 / xx;
  fit.beta_hat = xy2 / xx;

  double m1 = 0, m2 = 0;
  for (Eigen::Index i = b; i < e; ++i) {
    const double x = 1.0 / (p.r[i] * p.r[i]);
    m1 += std::pow(s - p.f1[i] - fit.alpha_hat * x, 2);
    m2 += std::pow(p.f2[i] - s - fit.beta_hat * x, 2);
  }
  const double count = static_cast<double>(e - b);
  const double scale = std::sqrt(xx / count);
  const double res1 = std::sqrt(m1 / count) / scale;
  const double res2 = std::sqrt(m2 / count) / scale;
  fit.residual = std::max(res1, res2);
  fit.warning = res1 > 0.1 * std::abs(fit.alpha_hat) || (res2 > 1e-12 && res2 > 0.1 * std::abs(fit.beta_hat));
  return fit;
}

double tail_exponent(const RadialProfile& p, double lo, double hi) {
  const auto [b, e] = window_nodes(p.r, lo, hi);
  const double s = p.background();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double n = 0;
  for (Eigen::Index i = b; i < e; ++i) {
    const double gap = s - p.f1[i];
    if (!(gap > 0)) continue;
    const double x = std::log(p.r[i]);
    const double y = std::log(gap);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    n += 1;
  }
  if (n < 2) throw std::invalid_argument("tail exponent window holds fewer than two usable nodes");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double derivative_decay(const RadialProfile& p, double lo, double hi) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i + 1 < p.r.size(); ++i) {
    const double mid = 0.5 * (p.r[i] + p.r[i + 1]);
    if (mid < lo || mid > hi) continue;
    const double slope = (p.f1[i + 1] - p.f1[i]) / (p.r[i + 1] - p.r[i]);
    worst = std::max(worst, mid * mid * mid * std::abs(slope));
  }
  return worst;
}

double profile_energy(const RadialProfile& p, double r_lo, double r_hi) {
  if (!(r_lo >= 0.0 && r_hi <= p.R * (1 + 1e-14) && r_lo <= r_hi)) {
    throw std::invalid_argument("energy window must lie inside [0, R]");
  }
  const double s2 = 1.0 / (1.0 + p.g);
  const double g = p.g;
  auto pointwise = [&](double r, double a, double b) {
    const double centrifugal = r > 0.0 ? a * a / r : 0.0;
    const double da = a * a - s2;
    const double db = b * b - s2;
    return centrifugal + 0.5 * r * da * da + g * r * da * db + 0.5 * r * db * db;
  };

  double total = 0.0;
  const Eigen::Index n = p.r.size();
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double a = std::max(p.r[i], r_lo);
    const double b = std::min(p.r[i + 1], r_hi);
    if (!(b > a)) continue;
    const double h = p.r[i + 1] - p.r[i];
    const double slope1 = (p.f1[i + 1] - p.f1[i]) / h;
    const double slope2 = (p.f2[i + 1] - p.f2[i]) / h;
    const double ta = (a - p.r[i]) / h;
    const double tb = (b - p.r[i]) / h;
    const double f1a = p.f1[i] + ta * (p.f1[i + 1] - p.f1[i]);
    const double f1b = p.f1[i] + tb * (p.f1[i + 1] - p.f1[i]);
    const double f2a = p.f2[i] + ta * (p.f2[i + 1] - p.f2[i]);
    const double f2b = p.f2[i] + tb * (p.f2[i + 1] - p.f2[i]);
    total += (slope1 * slope1 + slope2 * slope2) * 0.5 * (b * b - a * a);
    total += 0.5 * (b - a) * (pointwise(a, f1a, f2a) + pointwise(b, f1b, f2b));
  }
  return total;
}

GammaResult gamma_g(double g, double R, int nodes, const ProfileOptions& options) {
  GammaResult out;
  out.profile = solve_profile(g, R, nodes, options);
  out.residual = out.profile.residual;
  const double split = std::sqrt(1.0 + g);
  out.core = pi * profile_energy(out.profile, 0.0, split);
  out.outer = pi * (profile_energy(out.profile, split, R) - std::log(R / split) / (1.0 + g));

  out.fit = tail_fit(out.profile);
  const double s = out.profile.background();
  const double a = out.fit.alpha_hat;
  const double b = out.fit.beta_hat;
  // e_R - 1/(r(1+g)) ~ c3 / r^3 beyond R; kinetic terms are O(r^-5).
  const double c3 = -2.0 * s * a + 2.0 * s * s * (a * a - 2.0 * g * a * b + b * b);
  out.tail_correction = pi * c3 / (2.0 * R * R);
  out.gamma = out.core + out.outer + out.tail_correction;
  return out;
}

}  // namespace fracvortex

namespace fracvortex {

int bound_violations(const RadialProfile& p) {
  const double s = p.background();
  int count = 0;
  for (Eigen::Index i = 0; i < p.r.size(); ++i) {
    if (p.f1[i] < 0.0 || p.f1[i] > s || p.f2[i] < s || p.f2[i] > 1.0) ++count;
  }
  return count;
}

}  // namespace fracvortex
