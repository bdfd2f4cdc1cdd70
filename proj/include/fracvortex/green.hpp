#pragma once

#include "fracvortex/geometry.hpp"

#include <cstdint>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>

namespace fracvortex {

/// The boundary function F(x, y): harmonic in x, equal to -log|x - y| on the
/// boundary, so that log|x - y| + F(x, y) is the Dirichlet Green function up to
/// normalization.
///
/// Disks use the image-charge closed form. Rectangles solve one Dirichlet
/// problem per quantized source location (quantum h/4 per axis) on a vertex
/// grid and interpolate bilinearly in both the field point and the source.
/// Solved fields are kept in a bounded cache (oldest insertion evicted first)
/// that tolerates concurrent readers; eviction never changes results.
class GreenFunction {
 public:
  explicit GreenFunction(const Domain& disk);
  /// Rectangle with an nx-by-ny Laplace grid.
  GreenFunction(const Domain& rectangle, int nx, int ny, std::size_t cache_capacity = 512);

  GreenFunction(const GreenFunction& other);
  GreenFunction& operator=(const GreenFunction&) = delete;

  const Domain& domain() const { return domain_; }
  /// Laplace grid for rectangles; empty for disks.
  const std::optional<Grid>& laplace_grid() const { return grid_; }

  /// Symmetric F(x, y). Both points must lie strictly inside the domain.
  double F(const Vec2& x, const Vec2& y) const;
  /// F(., y) as a harmonic function of x (for rectangles this is the one-sided
  /// interpolant; F() averages it with its transpose).
  double F_field(const Vec2& x, const Vec2& y) const;
  /// Gradient of F in its first argument.
  Vec2 grad_x(const Vec2& x, const Vec2& y) const;
  /// Gradient of the diagonal x -> F(x, x), i.e. 2 grad_x F(x, y) at y = x.
  Vec2 grad_diagonal(const Vec2& x) const;

  std::size_t solves_performed() const;

 private:
  using Key = std::pair<std::int64_t, std::int64_t>;
  using FieldPtr = std::shared_ptr<const RealField>;

  FieldPtr source_field(const Key& key) const;
  Vec2 source_position(const Key& key) const;

  template <typename Fn>
  double over_sources(const Vec2& y, Fn&& fn) const;

  Domain domain_;
  std::optional<Grid> grid_;
  std::size_t capacity_ = 0;

  struct Cache {
    std::shared_mutex mutex;
    std::map<Key, FieldPtr> entries;
    std::list<Key> insertion_order;
    std::size_t solves = 0;
  };
  mutable std::unique_ptr<Cache> cache_;
};

/// F(x, y) for the given domain.
inline double boundary_green_F(const GreenFunction& green, const Vec2& x, const Vec2& y) {
  return green.F(x, y);
}

}  // namespace fracvortex
