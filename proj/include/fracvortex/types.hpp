#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <string>
#include <vector>

namespace fracvortex {

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;

using Vec2 = Vector2<double>;
using Complex = std::complex<double>;

/// Real and complex sample arrays. The first index runs along x, the second
/// along y, so the storage order is x-fastest.
using RealField = Eigen::ArrayXXd;
using ComplexArray = Eigen::ArrayXXcd;

inline constexpr double pi = std::numbers::pi;

/// Applies the symplectic rotation J = [[0, 1], [-1, 0]].
template <typename Derived>
Vector2<typename Derived::Scalar> apply_j(const Eigen::MatrixBase<Derived>& w) {
  return {w.y(), -w.x()};
}

/// Perpendicular gradient (-w_y, w_x), i.e. -J w.
template <typename Derived>
Vector2<typename Derived::Scalar> perp(const Eigen::MatrixBase<Derived>& w) {
  return {-w.y(), w.x()};
}

template <typename Scalar>
Scalar cross(const Vector2<Scalar>& a, const Vector2<Scalar>& b) {
  return a.x() * b.y() - a.y() * b.x();
}

enum class Component { u, v };

inline const char* to_string(Component c) { return c == Component::u ? "u" : "v"; }

struct PointVortex {
  Vec2 position;
  int degree = 1;
};

/// One component's vortices (the "a" family for u, the "b" family for v).
using VortexFamily = std::vector<PointVortex>;

struct VortexConfiguration {
  VortexFamily u;
  VortexFamily v;

  const VortexFamily& family(Component c) const { return c == Component::u ? u : v; }
  VortexFamily& family(Component c) { return c == Component::u ? u : v; }
};

}  // namespace fracvortex
