#include "fracvortex/green.hpp"

#include "fracvortex/errors.hpp"

#include <algorithm>
#include <cmath>

namespace fracvortex {

GreenFunction::GreenFunction(const Domain& disk) : domain_(disk), cache_(std::make_unique<Cache>()) {
  if (!disk.is_disk()) throw std::invalid_argument("rectangles need a Laplace grid");
}

GreenFunction::GreenFunction(const Domain& rectangle, int nx, int ny, std::size_t cache_capacity)
    : domain_(rectangle),
      grid_(Grid(rectangle, nx, ny, NodeLayout::vertex)),
      capacity_(std::max<std::size_t>(cache_capacity, 4)),
      cache_(std::make_unique<Cache>()) {}

GreenFunction::GreenFunction(const GreenFunction& other)
    : domain_(other.domain_), grid_(other.grid_), capacity_(other.capacity_), cache_(std::make_unique<Cache>()) {}

std::size_t GreenFunction::solves_performed() const {
  std::shared_lock lock(cache_->mutex);
  return cache_->solves;
}

Vec2 GreenFunction::source_position(const Key& key) const {
  const Grid& g = *grid_;
  return domain_.lower() + Vec2(key.first * g.hx() / 4, key.second * g.hy() / 4);
}

GreenFunction::FieldPtr GreenFunction::source_field(const Key& key) const {
  {
    std::shared_lock lock(cache_->mutex);
    auto it = cache_->entries.find(key);
    if (it != cache_->entries.end()) return it->second;
  }
  const Vec2 y = source_position(key);
  auto solved = std::make_shared<const RealField>(
      solve_laplace_dirichlet(*grid_, [&](const Vec2& s) { return -std::log((s - y).norm()); }).field);

  std::unique_lock lock(cache_->mutex);
  auto [it, inserted] = cache_->entries.emplace(key, solved);
  if (inserted) {
    ++cache_->solves;
    cache_->insertion_order.push_back(key);
    while (cache_->entries.size() > capacity_) {
      cache_->entries.erase(cache_->insertion_order.front());
      cache_->insertion_order.pop_front();
    }
  }
  return it->second;
}

template <typename Fn>
double GreenFunction::over_sources(const Vec2& y, Fn&& fn) const {
  const Grid& g = *grid_;
  const Vec2 k = (y - domain_.lower()).cwiseQuotient(Vec2(g.hx() / 4, g.hy() / 4));
  const std::int64_t kmax[2] = {4 * static_cast<std::int64_t>(g.nx()) - 2, 4 * static_cast<std::int64_t>(g.ny()) - 2};
  std::int64_t k0[2];
  double w[2];
  for (int d = 0; d < 2; ++d) {
    k0[d] = std::clamp(static_cast<std::int64_t>(std::floor(k[d])), std::int64_t{1}, kmax[d]);
    w[d] = std::clamp(k[d] - static_cast<double>(k0[d]), 0.0, 1.0);
  }
  double acc = 0.0;
  for (int b = 0; b < 2; ++b) {
    const double wy = b ? w[1] : 1 - w[1];
    if (wy == 0.0) continue;
    for (int a = 0; a < 2; ++a) {
      const double wx = a ? w[0] : 1 - w[0];
      if (wx == 0.0) continue;
      acc += wx * wy * fn(*source_field({k0[0] + a, k0[1] + b}));
    }
  }
  return acc;
}

double GreenFunction::F_field(const Vec2& x, const Vec2& y) const {
  require_interior(domain_, x, "field point");
  require_interior(domain_, y, "source point");
  if (domain_.is_disk()) return disk_boundary_F<double>(x, y, domain_.center(), domain_.radius());
  return over_sources(y, [&](const RealField& f) { return interpolate_bilinear(*grid_, f, x); });
}

double GreenFunction::F(const Vec2& x, const Vec2& y) const {
  if (domain_.is_disk()) {
    require_interior(domain_, x, "field point");
    require_interior(domain_, y, "source point");
    return disk_boundary_F<double>(x, y, domain_.center(), domain_.radius());
  }
  return 0.5 * (F_field(x, y) + F_field(y, x));
}

Vec2 GreenFunction::grad_x(const Vec2& x, const Vec2& y) const {
  require_interior(domain_, x, "field point");
  require_interior(domain_, y, "source point");
  if (domain_.is_disk()) return disk_boundary_F_grad_x<double>(x, y, domain_.center(), domain_.radius());

  const Grid& g = *grid_;
  const Vec2 lo = domain_.lower();
  const Vec2 hi = domain_.upper();
  Vec2 grad;
  for (int d = 0; d < 2; ++d) {
    const double h = d == 0 ? g.hx() : g.hy();
    Vec2 e = Vec2::Zero();
    e[d] = h;
    auto f = [&](const Vec2& p) {
      return over_sources(y, [&](const RealField& field) { return interpolate_bilinear(g, field, p); });
    };
    if (x[d] - h >= lo[d] && x[d] + h <= hi[d]) {
      grad[d] = (f(x + e) - f(x - e)) / (2 * h);
    } else if (x[d] + h > hi[d]) {
      grad[d] = (3 * f(x) - 4 * f(x - e) + f(x - 2 * e)) / (2 * h);
    } else {
      grad[d] = (-3 * f(x) + 4 * f(x + e) - f(x + 2 * e)) / (2 * h);
    }
  }
  return grad;
}

Vec2 GreenFunction::grad_diagonal(const Vec2& x) const { return 2.0 * grad_x(x, x); }

}  // namespace fracvortex
