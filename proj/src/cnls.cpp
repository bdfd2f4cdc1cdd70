#include "fracvortex/cnls.hpp"

#include "fracvortex/errors.hpp"
#include "fracvortex/harmonic_map.hpp"

#include "parallel.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <ostream>

namespace fracvortex {
namespace {

// d/dx of an x-fastest array: centered inside, second-order one-sided at the ends.
template <typename Array>
Array diff_x(const Array& a, double h) {
  const Eigen::Index n = a.rows();
  Array d(a.rows(), a.cols());
  const double c = 1.0 / (2.0 * h);
  d.row(0) = c * (-3.0 * a.row(0) + 4.0 * a.row(1) - a.row(2));
  d.middleRows(1, n - 2) = c * (a.bottomRows(n - 2) - a.topRows(n - 2));
  d.row(n - 1) = c * (3.0 * a.row(n - 1) - 4.0 * a.row(n - 2) + a.row(n - 3));
  return d;
}

template <typename Array>
Array diff_y(const Array& a, double h) {
  const Eigen::Index n = a.cols();
  Array d(a.rows(), a.cols());
  const double c = 1.0 / (2.0 * h);
  d.col(0) = c * (-3.0 * a.col(0) + 4.0 * a.col(1) - a.col(2));
  d.middleCols(1, n - 2) = c * (a.rightCols(n - 2) - a.leftCols(n - 2));
  d.col(n - 1) = c * (3.0 * a.col(n - 1) - 4.0 * a.col(n - 2) + a.col(n - 3));
  return d;
}

void require_cell_centered(const Grid& grid) {
  if (grid.layout() != NodeLayout::cell_centered) throw std::invalid_argument("PDE fields live on cell centers");
}

double potential_density(double au2, double av2, double s2, double g, double eps) {
  const double du = au2 - s2;
  const double dv = av2 - s2;
  return (0.25 * du * du + 0.25 * dv * dv + 0.5 * g * du * dv) / (eps * eps);
}

double potential_energy(const SimState& st) {
  const double s2 = 1.0 / (1.0 + st.g);
  const RealField au2 = st.u.data.abs2();
  const RealField av2 = st.v.data.abs2();
  double total = 0.0;
  for (Eigen::Index j = 0; j < au2.cols(); ++j) {
    for (Eigen::Index i = 0; i < au2.rows(); ++i) total += potential_density(au2(i, j), av2(i, j), s2, st.g, st.epsilon);
  }
  return total * st.grid().cell_area();
}

// Phase of the canonical map of one family on cell centers, accumulated along
// the bottom row and then up each column.
RealField phase_field(const GreenFunction& green, const VortexFamily& family, const Grid& grid, int threads) {
  RealField theta = RealField::Zero(grid.nx(), grid.ny());
  if (family.empty()) return theta;
  for (int i = 1; i < grid.nx(); ++i) {
    const Vec2 seg[2] = {grid.node(i - 1, 0), grid.node(i, 0)};
    theta(i, 0) = theta(i - 1, 0) + phase_along(green, family, seg);
  }
  detail::parallel_for(grid.nx(), threads, [&](int i) {
    for (int j = 1; j < grid.ny(); ++j) {
      const Vec2 seg[2] = {grid.node(i, j - 1), grid.node(i, j)};
      theta(i, j) = theta(i, j - 1) + phase_along(green, family, seg);
    }
  });
  return theta;
}

}  // namespace

ComplexField::ComplexField(const Grid& g, ComplexArray values) : grid(g), data(std::move(values)) {
  if (data.rows() != g.nx() || data.cols() != g.ny()) throw std::invalid_argument("field shape does not match its grid");
}

void validate_state(const SimState& st) {
  require_cell_centered(st.u.grid);
  if (st.u.data.rows() != st.v.data.rows() || st.u.data.cols() != st.v.data.cols()) {
    throw ConfigurationError("u and v must share a grid");
  }
  if (!(st.g >= 0.0 && st.g < 1.0)) throw ConfigurationError(fmt::format("coupling g = {} outside [0, 1)", st.g));
  if (!(st.epsilon >= 2.0 * st.grid().h() * (1 - 1e-12))) {
    throw ConfigurationError(
        fmt::format("epsilon = {} is below twice the grid spacing h = {}", st.epsilon, st.grid().h()));
  }
}

SimState build_initial_data(const GreenFunction& green, const Grid& grid, const VortexConfiguration& vortices,
                            const RadialProfile& profile, double epsilon, const InitialDataOptions& options) {
  require_cell_centered(grid);
  if ((green.domain().lower() - grid.domain().lower()).norm() > 1e-12 ||
      std::abs(green.domain().lx() - grid.domain().lx()) > 1e-12 ||
      std::abs(green.domain().ly() - grid.domain().ly()) > 1e-12) {
    throw std::invalid_argument("Green function and grid live on different domains");
  }
  SimState st(grid, epsilon, profile.g);
  validate_state(st);

  std::vector<std::pair<Component, PointVortex>> all;
  for (Component c : {Component::u, Component::v}) {
    for (const auto& p : vortices.family(c)) all.emplace_back(c, p);
  }
  for (std::size_t j = 0; j < all.size(); ++j) {
    const Vec2& a = all[j].second.position;
    const double gap = grid.domain().distance_to_boundary(a);
    if (gap < options.boundary_clearance * epsilon) {
      throw ConfigurationError(fmt::format("{}-vortex at ({}, {}) is {:.4g} from the wall, below {} eps",
                                           to_string(all[j].first), a.x(), a.y(), gap, options.boundary_clearance));
    }
    for (std::size_t k = 0; k < j; ++k) {
      const double d = (a - all[k].second.position).norm();
      if (d < options.vortex_clearance * epsilon) {
        throw ConfigurationError(fmt::format("vortices at ({}, {}) and ({}, {}) are {:.4g} apart, below {} eps", a.x(),
                                             a.y(), all[k].second.position.x(), all[k].second.position.y(), d,
                                             options.vortex_clearance));
      }
    }
  }

  const double s = profile.background();
  const RealField theta_u = phase_field(green, vortices.u, grid, options.threads);
  const RealField theta_v = phase_field(green, vortices.v, grid, options.threads);

  detail::parallel_for(grid.ny(), options.threads, [&](int j) {
    for (int i = 0; i < grid.nx(); ++i) {
      const Vec2 x = grid.node(i, j);
      double mu = s;
      double mv = s;
      for (const auto& p : vortices.u) {
        const auto [f1, f2] = profile.at((x - p.position).norm() / epsilon);
        mu *= f1 / s;
        mv *= f2 / s;
      }
      for (const auto& p : vortices.v) {
        const auto [f1, f2] = profile.at((x - p.position).norm() / epsilon);
        mv *= f1 / s;
        mu *= f2 / s;
      }
      st.u(i, j) = std::polar(mu, theta_u(i, j));
      st.v(i, j) = std::polar(mv, theta_v(i, j));
    }
  });
  return st;
}

SplitStepSolver::SplitStepSolver(const Grid& grid, StepOptions options)
    : grid_(grid), options_(options), transform_(std::make_unique<CosineTransform2D>(grid.nx(), grid.ny())) {
  require_cell_centered(grid);
}

Complex SplitStepSolver::kinetic_factor(int k, int l, double dt) const {
  const double kx = pi * k / grid_.domain().lx();
  const double ky = pi * l / grid_.domain().ly();
  const double lambda = -(kx * kx + ky * ky);
  return std::polar(1.0, -lambda * dt);
}

void SplitStepSolver::nonlinear_half(SimState& st, double dt) const {
  const double scale = 0.5 * dt / (st.epsilon * st.epsilon);
  const double g = st.g;
  for (Eigen::Index j = 0; j < st.u.data.cols(); ++j) {
    for (Eigen::Index i = 0; i < st.u.data.rows(); ++i) {
      const double au2 = std::norm(st.u.data(i, j));
      const double av2 = std::norm(st.v.data(i, j));
      st.u.data(i, j) *= std::polar(1.0, scale * (au2 + g * av2 - 1.0));
      st.v.data(i, j) *= std::polar(1.0, scale * (g * au2 + av2 - 1.0));
    }
  }
}

void SplitStepSolver::kinetic(SimState& st, double dt) {
  if (dt != cached_dt_) {
    propagator_.resize(grid_.nx(), grid_.ny());
    const double norm = 1.0 / transform_->normalization();
    for (int l = 0; l < grid_.ny(); ++l) {
      for (int k = 0; k < grid_.nx(); ++k) propagator_(k, l) = norm * kinetic_factor(k, l, dt);
    }
    cached_dt_ = dt;
  }
  for (ComplexField* f : {&st.u, &st.v}) {
    transform_->forward(f->data);
    f->data *= propagator_;
    transform_->inverse(f->data);
  }
}

void SplitStepSolver::step(SimState& st, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (dt > options_.dt_limit * st.epsilon * st.epsilon * (1 + 1e-12)) {
    throw ConfigurationError(fmt::format("dt = {} exceeds {} eps^2 = {}", dt, options_.dt_limit,
                                         options_.dt_limit * st.epsilon * st.epsilon));
  }
  if (st.u.data.rows() != grid_.nx() || st.u.data.cols() != grid_.ny()) {
    throw std::invalid_argument("state grid does not match the solver grid");
  }
  ComplexArray keep_u = st.u.data;
  ComplexArray keep_v = st.v.data;
  if (options_.nonlinear) nonlinear_half(st, dt);
  kinetic(st, dt);
  if (options_.nonlinear) nonlinear_half(st, dt);
  if (!st.u.all_finite() || !st.v.all_finite()) {
    st.u.data = std::move(keep_u);
    st.v.data = std::move(keep_v);
    throw BlowupError(fmt::format("non-finite field after the step from t = {}", st.t));
  }
  st.t += dt;
}

void SplitStepSolver::advance(SimState& st, double dt, long steps) {
  for (long n = 0; n < steps; ++n) step(st, dt);
}

double split_step_stability_limit(const Grid& grid) {
  const double kx = grid.nx() / grid.domain().lx();
  const double ky = grid.ny() / grid.domain().ly();
  return 1.0 / (pi * (kx * kx + ky * ky));
}

SimState step(const SimState& state, double dt, const StepOptions& options) {
  SimState next = state;
  SplitStepSolver(state.grid(), options).step(next, dt);
  return next;
}

double mass(const ComplexField& field) { return field.data.abs2().sum() * field.grid.cell_area(); }

CurrentField current(const ComplexField& field) {
  const ComplexArray dx = diff_x(field.data, field.grid.hx());
  const ComplexArray dy = diff_y(field.data, field.grid.hy());
  const ComplexArray ubar = field.data.conjugate();
  return {(ubar * dx).imag(), (ubar * dy).imag()};
}

RealField jacobian(const ComplexField& field) {
  const CurrentField j = current(field);
  return 0.5 * (diff_x(RealField(j.y), field.grid.hx()) - diff_y(RealField(j.x), field.grid.hy()));
}

double jacobian_mass(const ComplexField& field, const Vec2& center, double radius) {
  const RealField jac = jacobian(field);
  double total = 0.0;
  for (int j = 0; j < field.grid.ny(); ++j) {
    for (int i = 0; i < field.grid.nx(); ++i) {
      if ((field.grid.node(i, j) - center).norm() <= radius) total += jac(i, j);
    }
  }
  return total * field.grid.cell_area();
}

double energy(const SimState& st) {
  double kinetic = 0.0;
  for (const ComplexField* f : {&st.u, &st.v}) {
    kinetic += diff_x(f->data, f->grid.hx()).abs2().sum() + diff_y(f->data, f->grid.hy()).abs2().sum();
  }
  return 0.5 * kinetic * st.grid().cell_area() + potential_energy(st);
}

double spectral_energy(const SimState& st) {
  const Grid& grid = st.grid();
  CosineTransform2D transform(grid.nx(), grid.ny());
  const double lx = grid.domain().lx();
  const double ly = grid.domain().ly();
  double kinetic = 0.0;
  for (const ComplexField* f : {&st.u, &st.v}) {
    ComplexArray coeff = f->data;
    transform.forward(coeff);
    for (int l = 0; l < grid.ny(); ++l) {
      const double al = (l == 0 ? 1.0 : 2.0) / (2.0 * grid.ny());
      const double wl = l == 0 ? ly : 0.5 * ly;
      const double ky = pi * l / ly;
      for (int k = 0; k < grid.nx(); ++k) {
        const double ak = (k == 0 ? 1.0 : 2.0) / (2.0 * grid.nx());
        const double wk = k == 0 ? lx : 0.5 * lx;
        const double kx = pi * k / lx;
        kinetic += std::norm(coeff(k, l) * (ak * al)) * (kx * kx + ky * ky) * wk * wl;
      }
    }
  }
  return 0.5 * kinetic + potential_energy(st);
}

Vec2 momentum(const SimState& st) {
  const CurrentField ju = current(st.u);
  const CurrentField jv = current(st.v);
  return Vec2(ju.x.sum() + jv.x.sum(), ju.y.sum() + jv.y.sum()) * st.grid().cell_area();
}

Diagnostics diagnostics(const SimState& st) {
  return {st.t, mass(st.u), mass(st.v), energy(st), momentum(st)};
}

void write_diagnostics_csv(std::ostream& out, const std::vector<Diagnostics>& rows) {
  out << "t,mass_u,mass_v,energy,Qx,Qy\n";
  for (const auto& d : rows) {
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", d.t, d.mass_u, d.mass_v, d.energy,
                       d.momentum.x(), d.momentum.y());
  }
}

void write_diagnostics_csv(const std::string& path, const std::vector<Diagnostics>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open diagnostics file for writing", path);
  write_diagnostics_csv(out, rows);
  if (!out) throw IoError("failed writing diagnostics file", path);
}

}  // namespace fracvortex
