#include "fracvortex/renormalized_energy.hpp"

#include "fracvortex/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <limits>

namespace fracvortex {
namespace {

struct SeparationTerms {
  double intra = std::numeric_limits<double>::infinity();
  double boundary = std::numeric_limits<double>::infinity();
  double cross = std::numeric_limits<double>::infinity();
};

SeparationTerms separation_terms(const VortexFamily& a, const VortexFamily& b, const Domain& domain) {
  SeparationTerms t;
  for (const VortexFamily* fam : {&a, &b}) {
    for (std::size_t j = 0; j < fam->size(); ++j) {
      t.boundary = std::min(t.boundary, domain.distance_to_boundary((*fam)[j].position));
      for (std::size_t k = j + 1; k < fam->size(); ++k) {
        t.intra = std::min(t.intra, ((*fam)[j].position - (*fam)[k].position).norm());
      }
    }
  }
  for (const auto& p : a) {
    for (const auto& q : b) t.cross = std::min(t.cross, (p.position - q.position).norm());
  }
  return t;
}

void require_distinct(const VortexFamily& vortices) {
  for (std::size_t j = 0; j < vortices.size(); ++j) {
    for (std::size_t k = j + 1; k < vortices.size(); ++k) {
      if ((vortices[j].position - vortices[k].position).norm() == 0.0) {
        throw SingularityError(fmt::format("vortices {} and {} coincide", j, k));
      }
    }
  }
}

}  // namespace

double min_separation(const VortexFamily& a, const VortexFamily& b, const Domain& domain) {
  const SeparationTerms t = separation_terms(a, b, domain);
  const double m = std::min({t.intra, t.boundary, t.cross});
  return std::isfinite(m) ? 0.25 * m : std::numeric_limits<double>::infinity();
}

SeparationLimit limiting_term(const VortexFamily& a, const VortexFamily& b, const Domain& domain) {
  const SeparationTerms t = separation_terms(a, b, domain);
  const double m = std::min({t.intra, t.boundary, t.cross});
  if (!std::isfinite(m)) return SeparationLimit::none;
  if (m == t.boundary) return SeparationLimit::boundary;
  if (m == t.intra) return SeparationLimit::intra_family;
  return SeparationLimit::cross_family;
}

double renormalized_W(const GreenFunction& green, const VortexFamily& vortices) {
  require_distinct(vortices);
  double pair = 0.0;
  double boundary = 0.0;
  for (std::size_t j = 0; j < vortices.size(); ++j) {
    const auto& p = vortices[j];
    boundary += p.degree * p.degree * green.F(p.position, p.position);
    for (std::size_t k = j + 1; k < vortices.size(); ++k) {
      const auto& q = vortices[k];
      const double dd = p.degree * q.degree;
      pair += 2 * dd * std::log((p.position - q.position).norm());
      boundary += 2 * dd * green.F(p.position, q.position);
    }
  }
  return -pi * (pair + boundary);
}

Vec2 grad_W(const GreenFunction& green, const VortexFamily& vortices, std::size_t j) {
  if (j >= vortices.size()) throw std::out_of_range("vortex index out of range");
  require_distinct(vortices);
  const auto& p = vortices[j];
  Vec2 g = static_cast<double>(p.degree * p.degree) * green.grad_diagonal(p.position);
  for (std::size_t k = 0; k < vortices.size(); ++k) {
    if (k == j) continue;
    const auto& q = vortices[k];
    const Vec2 d = p.position - q.position;
    const double dd = p.degree * q.degree;
    g += 2 * dd * (d / d.squaredNorm() + green.grad_x(p.position, q.position));
  }
  return -pi * g;
}

EnergyReport energy_report(const GreenFunction& green, const VortexFamily& vortices) {
  EnergyReport r;
  r.W = renormalized_W(green, vortices);
  r.gradient.reserve(vortices.size());
  for (std::size_t j = 0; j < vortices.size(); ++j) r.gradient.push_back(grad_W(green, vortices, j));
  r.min_separation = min_separation(vortices, {}, green.domain());
  return r;
}

}  // namespace fracvortex
