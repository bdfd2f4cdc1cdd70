#include "fracvortex/geometry.hpp"

#include "fracvortex/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <stdexcept>

namespace fracvortex {

Domain Domain::disk(const Vec2& center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument(fmt::format("disk radius must be positive, got {}", radius));
  }
  Domain d;
  d.kind_ = DomainKind::disk;
  d.center_ = center;
  d.radius_ = radius;
  return d;
}

Domain Domain::rectangle(const Vec2& lower, double lx, double ly) {
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
    throw std::invalid_argument(fmt::format("rectangle sides must be positive, got {} x {}", lx, ly));
  }
  Domain d;
  d.kind_ = DomainKind::rectangle;
  d.lower_ = lower;
  d.lx_ = lx;
  d.ly_ = ly;
  d.center_ = lower + Vec2(lx / 2, ly / 2);
  return d;
}

double Domain::distance_to_boundary(const Vec2& x) const {
  if (kind_ == DomainKind::disk) return radius_ - (x - center_).norm();
  const Vec2 lo = x - lower_;
  const Vec2 hi = upper() - x;
  const double inside = std::min({lo.x(), lo.y(), hi.x(), hi.y()});
  if (inside >= 0.0) return inside;
  // outside: Euclidean distance to the box, negated
  const double dx = std::max({lo.x() < 0 ? -lo.x() : 0.0, hi.x() < 0 ? -hi.x() : 0.0});
  const double dy = std::max({lo.y() < 0 ? -lo.y() : 0.0, hi.y() < 0 ? -hi.y() : 0.0});
  return -std::hypot(dx, dy);
}

double Domain::area() const {
  return kind_ == DomainKind::disk ? pi * radius_ * radius_ : lx_ * ly_;
}

std::pair<Vec2, Vec2> Domain::project_to_boundary(const Vec2& x) const {
  if (kind_ == DomainKind::disk) {
    Vec2 d = x - center_;
    const double n = d.norm();
    const Vec2 normal = n > 0 ? Vec2(d / n) : Vec2(1.0, 0.0);
    return {center_ + radius_ * normal, normal};
  }
  const Vec2 lo = x - lower_;
  const Vec2 hi = upper() - x;
  const double dists[4] = {lo.x(), hi.x(), lo.y(), hi.y()};
  const int side = static_cast<int>(std::min_element(dists, dists + 4) - dists);
  Vec2 p = x.cwiseMax(lower_).cwiseMin(upper());
  Vec2 normal;
  switch (side) {
    case 0: p.x() = lower_.x(); normal = Vec2(-1, 0); break;
    case 1: p.x() = upper().x(); normal = Vec2(1, 0); break;
    case 2: p.y() = lower_.y(); normal = Vec2(0, -1); break;
    default: p.y() = upper().y(); normal = Vec2(0, 1); break;
  }
  return {p, normal};
}

std::string Domain::describe() const {
  if (kind_ == DomainKind::disk) {
    return fmt::format("disk(center=({}, {}), radius={})", center_.x(), center_.y(), radius_);
  }
  return fmt::format("rectangle(lower=({}, {}), lx={}, ly={})", lower_.x(), lower_.y(), lx_, ly_);
}

void require_interior(const Domain& domain, const Vec2& x, const char* what) {
  if (!(domain.distance_to_boundary(x) > 0.0)) {
    throw DomainError(fmt::format("{} ({}, {}) is not strictly inside {}", what, x.x(), x.y(), domain.describe()));
  }
}

Grid::Grid(const Domain& rectangle, int nx, int ny, NodeLayout layout)
    : domain_(rectangle), nx_(nx), ny_(ny), layout_(layout) {
  if (rectangle.kind() != DomainKind::rectangle) throw std::invalid_argument("grids live on rectangles");
  if (nx < 8 || ny < 8) throw std::invalid_argument(fmt::format("grid needs at least 8 cells per side, got {}x{}", nx, ny));
}

double interpolate_bilinear(const Grid& grid, const RealField& values, const Vec2& x) {
  const int px = grid.points_x();
  const int py = grid.points_y();
  Vec2 q = grid.index_coordinates(x);
  q.x() = std::clamp(q.x(), 0.0, static_cast<double>(px - 1));
  q.y() = std::clamp(q.y(), 0.0, static_cast<double>(py - 1));
  const int i = std::min(static_cast<int>(q.x()), px - 2);
  const int j = std::min(static_cast<int>(q.y()), py - 2);
  const double s = q.x() - i;
  const double t = q.y() - j;
  return (1 - s) * (1 - t) * values(i, j) + s * (1 - t) * values(i + 1, j) + (1 - s) * t * values(i, j + 1) +
         s * t * values(i + 1, j + 1);
}

}  // namespace fracvortex
