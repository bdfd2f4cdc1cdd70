#include "fracvortex/profile_gamma.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace fracvortex;

namespace {

double max_abs_diff_nested(const Eigen::VectorXd& coarse, const Eigen::VectorXd& fine) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < coarse.size(); ++i) worst = std::max(worst, std::abs(coarse[i] - fine[2 * i]));
  return worst;
}

RadialProfile constant_profile(double g, double f1, double f2) {
  RadialProfile p;
  p.g = g;
  p.R = 2.0;
  p.r = Eigen::VectorXd::LinSpaced(201, 0.0, 2.0);
  p.f1 = Eigen::VectorXd::Constant(201, f1);
  p.f2 = Eigen::VectorXd::Constant(201, f2);
  return p;
}

}  // namespace

TEST_CASE("graded mesh") {
  const Eigen::VectorXd m = graded_mesh(200.0, 1001);
  CHECK(m[0] == 0.0);
  CHECK(m[m.size() - 1] == doctest::Approx(200.0).epsilon(1e-14));
  for (Eigen::Index i = 1; i + 1 < m.size(); ++i) CHECK(m[i + 1] - m[i] >= m[i] - m[i - 1] - 1e-12);
  const Eigen::VectorXd fine = graded_mesh(200.0, 2001);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) worst = std::max(worst, std::abs(m[i] - fine[2 * i]));
  CHECK(worst <= 1e-12);
}

TEST_CASE("profile at g = 1/2") {
  const RadialProfile p = solve_profile(0.5, 200.0, default_profile_nodes(200.0));
  const double s = 1 / std::sqrt(1.5);
  CHECK(p.residual <= 1e-9);
  CHECK(p.f1[0] == 0.0);
  CHECK(p.f1[p.r.size() - 1] == doctest::Approx(s));
  CHECK(p.f2[p.r.size() - 1] == doctest::Approx(s));
  CHECK(bound_violations(p) == 0);
  // three-point one-sided slope at the origin
  const double h1 = p.r[1];
  const double h2 = p.r[2] - p.r[1];
  const double slope = ((h1 + h2) * (h1 + h2) * (p.f2[1] - p.f2[0]) - h1 * h1 * (p.f2[2] - p.f2[0])) / (h1 * (h1 + h2) * h2);
  CHECK(std::abs(slope) <= 1e-6);
  CHECK(p.f2[0] > s);
  auto [f1, f2] = p.at(1000.0);
  CHECK(f1 == doctest::Approx(s));
  CHECK(f2 == doctest::Approx(s));
}

TEST_CASE("bounds hold across couplings") {
  for (double g : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    const RadialProfile p = solve_profile(g, 200.0, default_profile_nodes(200.0));
    CHECK(p.residual <= 1e-9);
    CHECK(bound_violations(p) == 0);
  }
}

TEST_CASE("g = 0 decouples the second modulus") {
  const RadialProfile full = solve_profile(0.0, 100.0, default_profile_nodes(100.0));
  CHECK((full.f2.array() - 1.0).abs().maxCoeff() <= 1e-9);
  ProfileOptions frozen;
  frozen.freeze_second = true;
  const RadialProfile single = solve_profile(0.0, 100.0, default_profile_nodes(100.0), frozen);
  CHECK((full.f1 - single.f1).cwiseAbs().maxCoeff() <= 1e-9);
  const TailFit fit = tail_fit(single);
  CHECK(fit.alpha_hat == doctest::Approx(0.5).epsilon(0.02));
  CHECK(std::abs(fit.beta_hat) <= 1e-12);
  CHECK_THROWS(solve_profile(0.5, 100.0, 2000, frozen));
}

TEST_CASE("second-order convergence on nested meshes") {
  const int n = 2001;
  const RadialProfile a = solve_profile(0.5, 50.0, n);
  const RadialProfile b = solve_profile(0.5, 50.0, 2 * n - 1);
  const RadialProfile c = solve_profile(0.5, 50.0, 4 * n - 3);
  const double d1 = max_abs_diff_nested(a.f1, b.f1);
  const double d2 = max_abs_diff_nested(b.f1, c.f1);
  CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("tail asymptotics at g = 1/2") {
  const RadialProfile p = solve_profile(0.5, 200.0, default_profile_nodes(200.0));
  const auto [alpha, beta] = tail_coefficients(0.5);
  CHECK(alpha == doctest::Approx(std::sqrt(1.5) / 1.5).epsilon(1e-14));  // sqrt(1+g) / (2 (1 - g^2))
  CHECK(beta == doctest::Approx(0.5 * alpha).epsilon(1e-14));
  const TailFit fit = tail_fit(p);
  CHECK(fit.window_lo == 100.0);
  CHECK(fit.window_hi == 150.0);
  CHECK(fracvortex::testing::relative(fit.alpha_hat, alpha) <= 0.02);
  CHECK(fracvortex::testing::relative(fit.beta_hat, beta) <= 0.02);
  CHECK_FALSE(fit.warning);
  const TailFit other = tail_fit(p, 200.0 / 3, 400.0 / 3);
  CHECK(fracvortex::testing::relative(other.alpha_hat, fit.alpha_hat) <= 0.05);
  CHECK(fracvortex::testing::relative(other.beta_hat, fit.beta_hat) <= 0.05);
  CHECK(tail_exponent(p, 100.0, 150.0) == doctest::Approx(-2.0).epsilon(0.05));
  // f1' ~ 2 alpha / r^3
  CHECK(derivative_decay(p, 100.0, 150.0) == doctest::Approx(2 * alpha).epsilon(0.05));
  CHECK_THROWS(tail_fit(p, 20.0, 150.0));
}

TEST_CASE("profile energy on closed-form integrands") {
  CHECK(profile_energy(constant_profile(0.0, 0.0, 1.0), 1.0, 2.0) == doctest::Approx(0.75).epsilon(1e-12));
  const double g = 0.3;
  const double s = 1 / std::sqrt(1 + g);
  CHECK(profile_energy(constant_profile(g, s, s), 1.0, 2.0) == doctest::Approx(std::log(2.0) / (1 + g)).epsilon(2e-5));
  CHECK(profile_energy(constant_profile(g, s, s), 0.5, 0.5) == 0.0);
}

TEST_CASE("profile energy converges at second order") {
  std::vector<double> energies;
  std::vector<double> slopes;
  for (int n : {2001, 4001, 8001}) {
    const RadialProfile p = solve_profile(0.5, 50.0, n);
    energies.push_back(profile_energy(p, 0.0, 50.0));
    const double h1 = p.r[1];
    const double h2 = p.r[2] - p.r[1];
    slopes.push_back(((h1 + h2) * (h1 + h2) * (p.f2[1] - p.f2[0]) - h1 * h1 * (p.f2[2] - p.f2[0])) / (h1 * (h1 + h2) * h2));
  }
  CHECK((energies[0] - energies[1]) / (energies[1] - energies[2]) == doctest::Approx(4.0).epsilon(0.05));
  CHECK(std::abs(energies[1] - energies[2]) <= 1e-6);
  CHECK(slopes[0] / slopes[1] == doctest::Approx(4.0).epsilon(0.1));
  CHECK(std::abs(slopes[2]) <= 1e-8);
}

TEST_CASE("core-energy constant") {
  const GammaResult r200 = gamma_g(0.5, 200.0, default_profile_nodes(200.0));
  const GammaResult r400 = gamma_g(0.5, 400.0, default_profile_nodes(400.0));
  const GammaResult r800 = gamma_g(0.5, 800.0, default_profile_nodes(800.0));
  CHECK(r200.gamma == doctest::Approx(r200.core + r200.outer + r200.tail_correction));
  // uncorrected values approach the limit like R^-2
  const double d1 = (r200.core + r200.outer) - (r400.core + r400.outer);
  const double d2 = (r400.core + r400.outer) - (r800.core + r800.outer);
  CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.05));
  // the tail correction removes most of that drift
  CHECK(std::abs(r200.gamma - r800.gamma) <= 0.05 * std::abs(d1 + d2));
  CHECK(std::abs(r200.tail_correction) <= 1e-4);
}

TEST_CASE("core-energy constant at g = 0") {
  ProfileOptions frozen;
  frozen.freeze_second = true;
  const GammaResult single = gamma_g(0.0, 200.0, default_profile_nodes(200.0), frozen);
  const GammaResult coupled = gamma_g(0.0, 200.0, default_profile_nodes(200.0));
  CHECK(std::abs(single.gamma - coupled.gamma) <= 1e-9);
  // a single Gross-Pitaevskii vortex carries pi log(1.464 R / xi) per unit density
  CHECK(std::abs(single.gamma - pi * std::log(1.464)) <= 2e-3);
}

TEST_CASE("preconditions and nonconvergence") {
  CHECK_THROWS(solve_profile(1.0, 200.0, 2000));
  CHECK_THROWS(solve_profile(-0.1, 200.0, 2000));
  CHECK_THROWS(solve_profile(0.5, 40.0, 2000));
  CHECK_THROWS(solve_profile(0.5, 200.0, 400));
  ProfileOptions starved;
  starved.max_iterations = 1;
  try {
    solve_profile(0.5, 200.0, 4001, starved);
    FAIL("expected nonconvergence");
  } catch (const ProfileNonconvergence& e) {
    CHECK(e.residual() > 1e-9);
    CHECK(e.last_iterate().r.size() == 4001);
  }
}
