#include "fracvortex/harmonic_map.hpp"

#include "fracvortex/errors.hpp"
#include "fracvortex/renormalized_energy.hpp"

#include "quadrature.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace fracvortex {
namespace {

void require_off_vortex(const VortexFamily& vortices, const Vec2& x) {
  for (std::size_t j = 0; j < vortices.size(); ++j) {
    if ((x - vortices[j].position).norm() <= 1e-14) {
      throw SingularityError(fmt::format("point ({}, {}) sits on vortex {}", x.x(), x.y(), j));
    }
  }
}

// Smooth part of grad Phi: sum_j d_j grad_x F(x, a_j).
Vec2 boundary_gradient(const GreenFunction& green, const VortexFamily& vortices, const Vec2& x) {
  Vec2 g = Vec2::Zero();
  for (const auto& p : vortices) g += p.degree * green.grad_x(x, p.position);
  return g;
}

double point_segment_distance(const Vec2& a, const Vec2& p, const Vec2& q) {
  const Vec2 d = q - p;
  const double len2 = d.squaredNorm();
  const double t = len2 > 0 ? std::clamp((a - p).dot(d) / len2, 0.0, 1.0) : 0.0;
  return (p + t * d - a).norm();
}

double segment_increment(const GreenFunction& green, const VortexFamily& vortices, const Vec2& p, const Vec2& q,
                         const PhaseOptions& options, int depth) {
  for (const auto& v : vortices) {
    if (point_segment_distance(v.position, p, q) < options.detour_radius) {
      if (depth >= 8) throw PathError("could not route the phase path around a vortex");
      const Vec2 d = q - p;
      const Vec2 n = perp(d).normalized();
      const double offset = std::max(8 * options.detour_radius, 0.1 * d.norm());
      const Vec2 mid = 0.5 * (p + q);
      for (double side : {1.0, -1.0}) {
        const Vec2 w = mid + side * offset * n;
        if (!green.domain().contains(w)) continue;
        bool clear = true;
        for (const auto& u : vortices) clear = clear && (u.position - w).norm() > options.detour_radius;
        if (!clear) continue;
        return segment_increment(green, vortices, p, w, options, depth + 1) +
               segment_increment(green, vortices, w, q, options, depth + 1);
      }
      throw PathError("no admissible detour around a vortex");
    }
  }

  // winding part: exact angle swept by x - a_j along the segment
  double total = 0.0;
  for (const auto& v : vortices) {
    const Vec2 s = p - v.position;
    const Vec2 e = q - v.position;
    total += v.degree * std::atan2(cross<double>(s, e), s.dot(e));
  }

  // smooth part: integral of perp(grad F) . dl
  const Vec2 d = q - p;
  const double len = d.norm();
  if (len == 0.0) return total;
  const int panels = std::max(1, static_cast<int>(std::ceil(len / options.panel_length)));
  const auto rule = detail::composite_gauss(0.0, 1.0, panels, 8);
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const Vec2 x = p + rule.nodes[k] * d;
    total += rule.weights[k] * perp(boundary_gradient(green, vortices, x)).dot(d);
  }
  return total;
}

// C-infinity step: 1 for t <= 0, 0 for t >= 1.
double smooth_step_down(double t) {
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / (1.0 - t));
  const double b = std::exp(-1.0 / t);
  return a / (a + b);
}

struct Patch {
  Vec2 center;
  double inner;  // bump == 1 below
  double outer;  // bump == 0 above
  double bump(const Vec2& x) const {
    const double r = (x - center).norm();
    return smooth_step_down((r - inner) / (outer - inner));
  }
};

}  // namespace

double stream_function(const GreenFunction& green, const VortexFamily& vortices, const Vec2& x) {
  require_off_vortex(vortices, x);
  double phi = 0.0;
  for (const auto& p : vortices) phi += p.degree * (std::log((x - p.position).norm()) + green.F_field(x, p.position));
  return phi;
}

Vec2 stream_gradient(const GreenFunction& green, const VortexFamily& vortices, const Vec2& x) {
  require_off_vortex(vortices, x);
  Vec2 g = Vec2::Zero();
  for (const auto& p : vortices) {
    const Vec2 d = x - p.position;
    g += p.degree * (d / d.squaredNorm() + green.grad_x(x, p.position));
  }
  return g;
}

Vec2 canonical_current(const GreenFunction& green, const VortexFamily& vortices, const Vec2& x) {
  return perp(stream_gradient(green, vortices, x));
}

double phase_along(const GreenFunction& green, const VortexFamily& vortices, std::span<const Vec2> path,
                   const PhaseOptions& options) {
  for (const auto& x : path) require_off_vortex(vortices, x);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    total += segment_increment(green, vortices, path[k], path[k + 1], options, 0);
  }
  return total;
}

double phase(const GreenFunction& green, const VortexFamily& vortices, const Vec2& x, const Vec2& reference,
             const PhaseOptions& options) {
  const Vec2 path[2] = {reference, x};
  return phase_along(green, vortices, path, options);
}

double max_excision_radius(const Domain& domain, const VortexFamily& vortices) {
  double r = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < vortices.size(); ++j) {
    r = std::min(r, domain.distance_to_boundary(vortices[j].position));
    for (std::size_t k = j + 1; k < vortices.size(); ++k) {
      r = std::min(r, 0.5 * (vortices[j].position - vortices[k].position).norm());
    }
  }
  return r;
}

double annulus_energy(const GreenFunction& green, const VortexFamily& vortices, double rho,
                      const AnnulusQuadrature& quad) {
  const Domain& domain = green.domain();
  for (const auto& p : vortices) require_interior(domain, p.position, "vortex");
  if (!(rho > 0.0) || !(rho < max_excision_radius(domain, vortices))) {
    throw DomainError(fmt::format("excision radius {} outside (0, {})", rho, max_excision_radius(domain, vortices)));
  }

  auto density = [&](const Vec2& x) { return stream_gradient(green, vortices, x).squaredNorm(); };

  std::vector<Patch> patches;
  for (std::size_t j = 0; j < vortices.size(); ++j) {
    double reach = domain.distance_to_boundary(vortices[j].position);
    for (std::size_t k = 0; k < vortices.size(); ++k) {
      if (k != j) reach = std::min(reach, 0.5 * (vortices[j].position - vortices[k].position).norm());
    }
    const double outer = 0.98 * reach;
    patches.push_back({vortices[j].position, std::max(rho, 0.5 * outer), outer});
  }

  // Patch part: bump * density over rho < r < outer, in log-radius.
  const auto [gx, gw] = detail::gauss_legendre(quad.radial_points);
  double total = 0.0;
  for (const auto& patch : patches) {
    auto radial = [&](double lo, double hi, int panels) {
      const double s0 = std::log(lo), s1 = std::log(hi);
      const double len = (s1 - s0) / panels;
      double acc = 0.0;
      for (int pnl = 0; pnl < panels; ++pnl) {
        for (int k = 0; k < quad.radial_points; ++k) {
          const double s = s0 + (pnl + 0.5) * len + 0.5 * len * gx[k];
          const double r = std::exp(s);
          double ring = 0.0;
          for (int m = 0; m < quad.angular_points; ++m) {
            const double phi = 2 * pi * m / quad.angular_points;
            const Vec2 x = patch.center + r * Vec2(std::cos(phi), std::sin(phi));
            ring += density(x) * patch.bump(x);
          }
          acc += 0.5 * len * gw[k] * r * r * ring * (2 * pi / quad.angular_points);
        }
      }
      return acc;
    };
    if (patch.inner > rho) total += radial(rho, patch.inner, quad.radial_panels);
    total += radial(patch.inner, patch.outer, quad.radial_panels);
  }

  // Background part: (1 - sum bumps) * density over the whole domain.
  auto background_weight = [&](const Vec2& x) {
    double w = 1.0;
    for (const auto& patch : patches) {
      const double r = (x - patch.center).norm();
      if (r <= patch.inner) return 0.0;
      if (r < patch.outer) w -= patch.bump(x);
    }
    return w;
  };
  const int n = quad.background_panels;
  const int order = quad.background_order;
  if (domain.is_disk()) {
    const auto rr = detail::composite_gauss(0.0, domain.radius(), n, order);
    const auto ph = detail::composite_gauss(0.0, 2 * pi, 2 * n, order);
    for (std::size_t a = 0; a < rr.nodes.size(); ++a) {
      for (std::size_t b = 0; b < ph.nodes.size(); ++b) {
        const Vec2 x = domain.center() + rr.nodes[a] * Vec2(std::cos(ph.nodes[b]), std::sin(ph.nodes[b]));
        const double w = background_weight(x);
        if (w != 0.0) total += rr.weights[a] * ph.weights[b] * rr.nodes[a] * w * density(x);
      }
    }
  } else {
    const auto qx = detail::composite_gauss(domain.lower().x(), domain.upper().x(), n, order);
    const auto qy = detail::composite_gauss(domain.lower().y(), domain.upper().y(), n, order);
    for (std::size_t a = 0; a < qx.nodes.size(); ++a) {
      for (std::size_t b = 0; b < qy.nodes.size(); ++b) {
        const Vec2 x(qx.nodes[a], qy.nodes[b]);
        const double w = background_weight(x);
        if (w != 0.0) total += qx.weights[a] * qy.weights[b] * w * density(x);
      }
    }
  }
  return total;
}

double annulus_energy_defect(const GreenFunction& green, const VortexFamily& vortices, double rho,
                             const AnnulusQuadrature& quadrature) {
  const double m = static_cast<double>(vortices.size());
  return annulus_energy(green, vortices, rho, quadrature) - 2 * m * pi * std::log(1.0 / rho) -
         2 * renormalized_W(green, vortices);
}

}  // namespace fracvortex
