#include "fracvortex/errors.hpp"
#include "fracvortex/geometry.hpp"

#include "fftw_plan.hpp"

#include <fmt/format.h>

#include <cmath>
#include <optional>

namespace fracvortex {
namespace {

// A = -Laplacian restricted to interior unknowns (homogeneous Dirichlet).
void apply_operator(const RealField& x, RealField& out, double ihx2, double ihy2) {
  const Eigen::Index mx = x.rows();
  const Eigen::Index my = x.cols();
  for (Eigen::Index j = 0; j < my; ++j) {
    for (Eigen::Index i = 0; i < mx; ++i) {
      const double c = x(i, j);
      const double w = i > 0 ? x(i - 1, j) : 0.0;
      const double e = i + 1 < mx ? x(i + 1, j) : 0.0;
      const double s = j > 0 ? x(i, j - 1) : 0.0;
      const double n = j + 1 < my ? x(i, j + 1) : 0.0;
      out(i, j) = (2 * c - w - e) * ihx2 + (2 * c - s - n) * ihy2;
    }
  }
}

// Exact inverse of A through the type-I sine transform.
class SineSolver {
 public:
  SineSolver(int mx, int my, double hx, double hy) : buffer_(mx, my), eig_(mx, my) {
    plan_ = detail::plan_r2r_2d(mx, my, buffer_.data(), FFTW_RODFT00);
    const double norm = 4.0 * (mx + 1) * (my + 1);
    for (int j = 0; j < my; ++j) {
      for (int i = 0; i < mx; ++i) {
        const double lx = (2 - 2 * std::cos(pi * (i + 1) / (mx + 1))) / (hx * hx);
        const double ly = (2 - 2 * std::cos(pi * (j + 1) / (my + 1))) / (hy * hy);
        eig_(i, j) = 1.0 / ((lx + ly) * norm);
      }
    }
  }

  void apply(const RealField& r, RealField& z) {
    buffer_ = r;
    fftw_execute_r2r(plan_.get(), buffer_.data(), buffer_.data());
    buffer_ *= eig_;
    fftw_execute_r2r(plan_.get(), buffer_.data(), buffer_.data());
    z = buffer_;
  }

 private:
  RealField buffer_;
  RealField eig_;
  detail::Plan plan_;
};

}  // namespace

RealField discrete_laplacian(const Grid& grid, const RealField& f) {
  const int px = grid.points_x();
  const int py = grid.points_y();
  RealField out = RealField::Zero(px, py);
  const double ihx2 = 1.0 / (grid.hx() * grid.hx());
  const double ihy2 = 1.0 / (grid.hy() * grid.hy());
  for (int j = 1; j + 1 < py; ++j) {
    for (int i = 1; i + 1 < px; ++i) {
      out(i, j) = (f(i + 1, j) - 2 * f(i, j) + f(i - 1, j)) * ihx2 + (f(i, j + 1) - 2 * f(i, j) + f(i, j - 1)) * ihy2;
    }
  }
  return out;
}

LaplaceResult solve_laplace_dirichlet(const Grid& grid, const std::function<double(const Vec2&)>& boundary_data,
                                      const LaplaceOptions& options) {
  if (grid.layout() != NodeLayout::vertex) throw std::invalid_argument("Dirichlet solves need a vertex grid");
  const int nx = grid.nx();
  const int ny = grid.ny();
  const double ihx2 = 1.0 / (grid.hx() * grid.hx());
  const double ihy2 = 1.0 / (grid.hy() * grid.hy());

  LaplaceResult result;
  result.field = RealField::Zero(nx + 1, ny + 1);
  RealField& u = result.field;
  for (int i = 0; i <= nx; ++i) {
    u(i, 0) = boundary_data(grid.node(i, 0));
    u(i, ny) = boundary_data(grid.node(i, ny));
  }
  for (int j = 1; j < ny; ++j) {
    u(0, j) = boundary_data(grid.node(0, j));
    u(nx, j) = boundary_data(grid.node(nx, j));
  }
  if (!u.isFinite().all()) throw std::invalid_argument("boundary data must be finite");

  const int mx = nx - 1;
  const int my = ny - 1;
  RealField b = RealField::Zero(mx, my);
  for (int j = 0; j < my; ++j) {
    b(0, j) += u(0, j + 1) * ihx2;
    b(mx - 1, j) += u(nx, j + 1) * ihx2;
  }
  for (int i = 0; i < mx; ++i) {
    b(i, 0) += u(i + 1, 0) * ihy2;
    b(i, my - 1) += u(i + 1, ny) * ihy2;
  }

  const double bnorm = std::sqrt((b * b).sum());
  const int max_it = options.max_iterations > 0 ? options.max_iterations : 20 * (nx + ny);
  RealField x = RealField::Zero(mx, my);
  if (bnorm > 0.0) {
    const bool precondition = options.preconditioner == LaplaceOptions::Preconditioner::sine_transform;
    std::optional<SineSolver> sine;
    if (precondition) sine.emplace(mx, my, grid.hx(), grid.hy());

    RealField r = b;
    RealField z(mx, my);
    RealField ap(mx, my);
    if (precondition) sine->apply(r, z); else z = r;
    RealField p = z;
    double rz = (r * z).sum();
    double rel = 1.0;
    int it = 0;
    while (it < max_it) {
      apply_operator(p, ap, ihx2, ihy2);
      const double alpha = rz / (p * ap).sum();
      x += alpha * p;
      r -= alpha * ap;
      ++it;
      rel = std::sqrt((r * r).sum()) / bnorm;
      if (rel <= options.tolerance) break;
      if (precondition) sine->apply(r, z); else z = r;
      const double rz_next = (r * z).sum();
      p = z + (rz_next / rz) * p;
      rz = rz_next;
    }
    // true residual, not the recursively updated one
    apply_operator(x, ap, ihx2, ihy2);
    rel = std::sqrt(((b - ap) * (b - ap)).sum()) / bnorm;
    result.iterations = it;
    result.relative_residual = rel;
    if (rel > options.tolerance) {
      throw SolverError(fmt::format("Laplace solve did not converge in {} iterations (relative residual {:.3e})",
                                    it, rel),
                        rel);
    }
  }
  u.block(1, 1, mx, my) = x;
  return result;
}

}  // namespace fracvortex
