#pragma once

#include "fracvortex/types.hpp"

#include <cmath>
#include <functional>
#include <string>

namespace fracvortex {

enum class DomainKind { disk, rectangle };

/// A disk or an axis-aligned rectangle.
class Domain {
 public:
  static Domain disk(const Vec2& center, double radius);
  static Domain rectangle(const Vec2& lower, double lx, double ly);
  /// The square [-half, half]^2.
  static Domain centered_square(double half_side) {
    return rectangle(Vec2(-half_side, -half_side), 2 * half_side, 2 * half_side);
  }

  DomainKind kind() const { return kind_; }
  bool is_disk() const { return kind_ == DomainKind::disk; }

  const Vec2& center() const { return center_; }
  double radius() const { return radius_; }

  const Vec2& lower() const { return lower_; }
  Vec2 upper() const { return lower_ + Vec2(lx_, ly_); }
  double lx() const { return lx_; }
  double ly() const { return ly_; }

  /// Signed Euclidean distance to the boundary; negative outside.
  double distance_to_boundary(const Vec2& x) const;
  bool contains(const Vec2& x) const { return distance_to_boundary(x) > 0.0; }
  double area() const;

  /// Nearest boundary point and the outward unit normal there.
  std::pair<Vec2, Vec2> project_to_boundary(const Vec2& x) const;

  std::string describe() const;

 private:
  DomainKind kind_ = DomainKind::disk;
  Vec2 center_ = Vec2::Zero();
  double radius_ = 1.0;
  Vec2 lower_ = Vec2::Zero();
  double lx_ = 0.0;
  double ly_ = 0.0;
};

inline double distance_to_boundary(const Domain& domain, const Vec2& x) {
  return domain.distance_to_boundary(x);
}

/// Throws DomainError unless x is strictly inside.
void require_interior(const Domain& domain, const Vec2& x, const char* what);

enum class NodeLayout { cell_centered, vertex };

/// Tensor grid over a rectangle. Cell-centered grids carry nx*ny samples at cell
/// midpoints; vertex grids carry (nx+1)*(ny+1) samples including the boundary.
class Grid {
 public:
  Grid(const Domain& rectangle, int nx, int ny, NodeLayout layout = NodeLayout::cell_centered);

  const Domain& domain() const { return domain_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  NodeLayout layout() const { return layout_; }
  double hx() const { return domain_.lx() / nx_; }
  double hy() const { return domain_.ly() / ny_; }
  double h() const { return std::max(hx(), hy()); }
  double cell_area() const { return hx() * hy(); }

  int points_x() const { return layout_ == NodeLayout::vertex ? nx_ + 1 : nx_; }
  int points_y() const { return layout_ == NodeLayout::vertex ? ny_ + 1 : ny_; }

  Vec2 node(int i, int j) const {
    const double off = layout_ == NodeLayout::cell_centered ? 0.5 : 0.0;
    return domain_.lower() + Vec2((i + off) * hx(), (j + off) * hy());
  }

  /// Continuous index coordinates of x (node (i, j) maps to (i, j)).
  Vec2 index_coordinates(const Vec2& x) const {
    const double off = layout_ == NodeLayout::cell_centered ? 0.5 : 0.0;
    const Vec2 d = x - domain_.lower();
    return {d.x() / hx() - off, d.y() / hy() - off};
  }

  Grid with_layout(NodeLayout layout) const { return Grid(domain_, nx_, ny_, layout); }

 private:
  Domain domain_;
  int nx_;
  int ny_;
  NodeLayout layout_;
};

/// Bilinear interpolation of node samples, clamped to the node hull.
double interpolate_bilinear(const Grid& grid, const RealField& values, const Vec2& x);

/// Closed-form boundary function of the disk of radius R centred at c:
///   F(x, y) = -1/2 log((|x'|^2 |y'|^2 - 2 R^2 x'.y' + R^4) / R^2),  x' = x - c, y' = y - c,
/// which is -log(|y'|/R |x' - R^2 y'/|y'|^2|) away from y' = 0 and -log R at y' = 0.
template <typename Scalar>
Scalar disk_boundary_F(const Vector2<Scalar>& x, const Vector2<Scalar>& y, const Vector2<Scalar>& center,
                       Scalar radius) {
  const Vector2<Scalar> xs = x - center;
  const Vector2<Scalar> ys = y - center;
  const Scalar r2 = radius * radius;
  const Scalar q = xs.squaredNorm() * ys.squaredNorm() - Scalar(2) * r2 * xs.dot(ys) + r2 * r2;
  using std::log;
  return Scalar(-0.5) * log(q / r2);
}

/// Gradient of disk_boundary_F in its first argument.
template <typename Scalar>
Vector2<Scalar> disk_boundary_F_grad_x(const Vector2<Scalar>& x, const Vector2<Scalar>& y,
                                       const Vector2<Scalar>& center, Scalar radius) {
  const Vector2<Scalar> xs = x - center;
  const Vector2<Scalar> ys = y - center;
  const Scalar r2 = radius * radius;
  const Scalar q = xs.squaredNorm() * ys.squaredNorm() - Scalar(2) * r2 * xs.dot(ys) + r2 * r2;
  return -(ys.squaredNorm() * xs - r2 * ys) / q;
}

struct LaplaceOptions {
  enum class Preconditioner { sine_transform, none };
  double tolerance = 1e-10;  ///< on the relative residual
  int max_iterations = 0;    ///< 0 selects 20 * (nx + ny)
  Preconditioner preconditioner = Preconditioner::sine_transform;
};

struct LaplaceResult {
  RealField field;  ///< vertex-grid samples, boundary included
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Solves the 5-point Dirichlet Laplace problem on a vertex grid. Boundary nodes
/// take boundary_data exactly; interior nodes come from a conjugate-gradient
/// iteration. Throws SolverError when the iteration budget runs out.
LaplaceResult solve_laplace_dirichlet(const Grid& grid, const std::function<double(const Vec2&)>& boundary_data,
                                      const LaplaceOptions& options = {});

/// Applies the 5-point Laplacian at interior nodes (boundary rows are zero).
RealField discrete_laplacian(const Grid& grid, const RealField& field);

}  // namespace fracvortex
