#include "fracvortex/errors.hpp"
#include "fracvortex/harmonic_map.hpp"
#include "fracvortex/renormalized_energy.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace fracvortex;
using fracvortex::testing::loglog_slope;

namespace {

const Domain unit_disk = Domain::disk(Vec2::Zero(), 1.0);

Vec2 on_circle(const Vec2& c, double r, double phi) { return c + r * Vec2(std::cos(phi), std::sin(phi)); }

double wrap(double a) { return std::remainder(a, 2 * pi); }

// Green's identity: with Phi = 0 on the outer boundary and harmonic in the
// perforated domain, int |grad Phi|^2 = -sum_j oint Phi d_r Phi over |x - a_j| = rho.
double perforated_dirichlet_energy(const GreenFunction& green, const VortexFamily& fam, double rho, int nodes) {
  double total = 0.0;
  for (const auto& p : fam) {
    double sum = 0.0;
    for (int k = 0; k < nodes; ++k) {
      const double phi = 2 * pi * k / nodes;
      const Vec2 x = on_circle(p.position, rho, phi);
      const Vec2 radial(std::cos(phi), std::sin(phi));
      sum += stream_function(green, fam, x) * stream_gradient(green, fam, x).dot(radial);
    }
    total -= sum * rho * 2 * pi / nodes;
  }
  return total;
}

}  // namespace

TEST_CASE("stream function examples") {
  const GreenFunction green(unit_disk);
  CHECK(stream_function(green, {{Vec2(0, 0), 1}}, Vec2(0.5, 0)) == doctest::Approx(std::log(0.5)).epsilon(1e-12));

  const VortexFamily dipole = {{Vec2(0.3, 0), 1}, {Vec2(-0.3, 0), -1}};
  for (double t : {-0.9, -0.2, 0.4, 0.75}) CHECK(std::abs(stream_function(green, dipole, Vec2(0, t))) <= 1e-14);

  const VortexFamily one = {{Vec2(0.5, 0), 1}};
  const double expected = std::log(0.4) + green.F(Vec2(0.9, 0), Vec2(0.5, 0));
  CHECK(stream_function(green, one, Vec2(0.9, 0)) == doctest::Approx(expected).epsilon(1e-12));
  for (int k = 0; k < 64; ++k) {
    CHECK(std::abs(stream_function(green, one, on_circle(Vec2::Zero(), 1 - 1e-9, 2 * pi * k / 64))) <= 1e-6);
  }
}

TEST_CASE("canonical current") {
  const GreenFunction green(unit_disk);
  const VortexFamily center = {{Vec2::Zero(), 1}};
  const Vec2 j = canonical_current(green, center, Vec2(0.5, 0));
  CHECK(j.x() == doctest::Approx(0.0));
  CHECK(j.y() == doctest::Approx(2.0));

  SUBCASE("zero normal current on the boundary") {
    const VortexFamily fam = {{Vec2(0.3, 0.2), 1}, {Vec2(-0.4, -0.1), -1}};
    for (int k = 0; k < 64; ++k) {
      const double phi = 2 * pi * k / 64;
      const Vec2 n(std::cos(phi), std::sin(phi));
      CHECK(std::abs(canonical_current(green, center, (1 - 1e-12) * n).dot(n)) <= 1e-8);
      CHECK(std::abs(canonical_current(green, fam, (1 - 1e-9) * n).dot(n)) <= 1e-6);
    }
  }

  SUBCASE("circulation is quantized") {
    const VortexFamily fam = {{Vec2(0.3, 0.2), 1}, {Vec2(-0.4, -0.1), -1}, {Vec2(0.1, -0.5), 1}};
    for (const auto& p : fam) {
      const int nodes = 1024;
      double circ = 0.0;
      for (int k = 0; k < nodes; ++k) {
        const double phi = 2 * pi * k / nodes;
        const Vec2 t(-std::sin(phi), std::cos(phi));
        circ += canonical_current(green, fam, on_circle(p.position, 0.1, phi)).dot(t);
      }
      circ *= 0.1 * 2 * pi / nodes;
      CHECK(std::abs(circ - 2 * pi * p.degree) <= 1e-6);
    }
  }

  SUBCASE("divergence vanishes at second order") {
    const VortexFamily fam = {{Vec2(0.3, 0.2), 1}, {Vec2(-0.4, -0.1), 1}};
    const Vec2 probes[] = {{0.0, 0.5}, {-0.3, -0.5}, {0.6, -0.2}};
    std::vector<double> hs = {1.0 / 32, 1.0 / 64, 1.0 / 128};
    std::vector<double> div;
    for (double h : hs) {
      double worst = 0.0;
      for (const Vec2& x : probes) {
        const double d = (canonical_current(green, fam, x + Vec2(h, 0)).x() - canonical_current(green, fam, x - Vec2(h, 0)).x() +
                          canonical_current(green, fam, x + Vec2(0, h)).y() - canonical_current(green, fam, x - Vec2(0, h)).y()) /
                         (2 * h);
        worst = std::max(worst, std::abs(d));
      }
      div.push_back(worst);
    }
    // exact cancellation can leave round-off only; then there is nothing to fit
    if (div.back() > 1e-9) CHECK(loglog_slope(hs, div) == doctest::Approx(2.0).epsilon(0.15));
  }

  CHECK_THROWS_AS(canonical_current(green, center, Vec2::Zero()), SingularityError);
}

TEST_CASE("phase reconstruction") {
  const GreenFunction green(unit_disk);
  const Vec2 ref(1 - 1e-9, 0);
  const VortexFamily plus = {{Vec2::Zero(), 1}};
  const VortexFamily minus = {{Vec2::Zero(), -1}};
  for (int k = 0; k < 8; ++k) {
    const Vec2 x = on_circle(Vec2::Zero(), 0.2 + 0.09 * k, 0.4 + 0.77 * k);
    const double angle = std::atan2(x.y(), x.x());
    CHECK(std::abs(wrap(phase(green, plus, x, ref) - angle)) <= 1e-6);
    CHECK(std::abs(wrap(phase(green, minus, x, ref) + angle)) <= 1e-6);
  }

  SUBCASE("loop around a same-sign pair") {
    const VortexFamily pair = {{Vec2(0.3, 0), 1}, {Vec2(-0.3, 0), 1}};
    std::vector<Vec2> loop;
    for (int k = 0; k <= 64; ++k) loop.push_back(on_circle(Vec2::Zero(), 0.8, 2 * pi * k / 64));
    CHECK(phase_along(green, pair, loop) == doctest::Approx(4 * pi).epsilon(1e-8));
  }

  SUBCASE("homotopic and non-homotopic paths") {
    const VortexFamily fam = {{Vec2(0.3, 0.2), 1}, {Vec2(-0.4, -0.1), -1}};
    const Vec2 p(-0.6, 0.5);
    const Vec2 q(0.6, 0.5);
    const std::vector<Vec2> direct = {p, q};
    const std::vector<Vec2> bent = {p, Vec2(0.0, 0.8), q};
    const std::vector<Vec2> below = {p, Vec2(-0.7, -0.6), Vec2(0.7, -0.6), q};  // passes under both
    const std::vector<Vec2> between = {p, Vec2(0.3, -0.05), q};                 // clockwise around the +1 only
    CHECK(std::abs(phase_along(green, fam, direct) - phase_along(green, fam, bent)) <= 1e-6);
    CHECK(std::abs(phase_along(green, fam, direct) - phase_along(green, fam, below)) <= 1e-6);
    CHECK(std::abs(phase_along(green, fam, direct) - phase_along(green, fam, between) + 2 * pi) <= 1e-6);
  }

  SUBCASE("paths through a vortex are rerouted") {
    const VortexFamily fam = {{Vec2(0.0, 0.0), 1}};
    const std::vector<Vec2> through = {Vec2(-0.5, 0.0), Vec2(0.5, 0.0)};
    const double d = phase_along(green, fam, through);
    CHECK(std::abs(std::abs(d) - pi) <= 1e-6);
  }
}

TEST_CASE("conjugation negates stream function, current and phase") {
  const GreenFunction green(unit_disk);
  VortexFamily fam = {{Vec2(0.3, 0.2), 1}, {Vec2(-0.4, -0.1), -1}, {Vec2(0.1, -0.5), 1}};
  VortexFamily flipped = fam;
  for (auto& p : flipped) p.degree = -p.degree;
  const Vec2 ref(0.9, 0.0);
  for (const Vec2& x : {Vec2(0.5, 0.5), Vec2(-0.6, 0.3), Vec2(0.0, -0.2)}) {
    CHECK(stream_function(green, flipped, x) == doctest::Approx(-stream_function(green, fam, x)).epsilon(1e-13));
    CHECK((canonical_current(green, flipped, x) + canonical_current(green, fam, x)).norm() <= 1e-12);
    CHECK(std::abs(wrap(phase(green, flipped, x, ref) + phase(green, fam, x, ref))) <= 1e-9);
  }
}

TEST_CASE("annulus energy") {
  const GreenFunction green(unit_disk);

  SUBCASE("centered vortex") {
    CHECK(annulus_energy(green, {{Vec2::Zero(), 1}}, 0.1) == doctest::Approx(2 * pi * std::log(10.0)).epsilon(1e-8));
    CHECK(renormalized_W(green, {{Vec2::Zero(), 1}}) == doctest::Approx(0.0));
  }

  SUBCASE("defect vanishes like rho^2") {
    const VortexFamily fam = {{Vec2(0.4, 0), 1}};
    std::vector<double> rhos = {0.2, 0.1, 0.05};
    std::vector<double> defects;
    for (double rho : rhos) defects.push_back(annulus_energy_defect(green, fam, rho));
    CHECK(loglog_slope(rhos, defects) == doctest::Approx(2.0).epsilon(0.15));
  }

  SUBCASE("dipole at rho = 0.05") {
    const VortexFamily fam = {{Vec2(0.3, 0), 1}, {Vec2(-0.3, 0), -1}};
    const double rho = 0.05;
    const double expansion = 4 * pi * std::log(1 / rho) + 2 * renormalized_W(green, fam);
    CHECK(fracvortex::testing::relative(annulus_energy(green, fam, rho), expansion) <= 0.01);
  }

  SUBCASE("matches Green's identity on the excised circles") {
    const VortexFamily fam = {{Vec2(0.35, 0.1), 1}, {Vec2(-0.2, -0.4), -1}, {Vec2(-0.3, 0.45), 1}};
    for (double rho : {0.1, 0.04}) {
      const double area = annulus_energy(green, fam, rho);
      const double boundary = perforated_dirichlet_energy(green, fam, rho, 2048);
      CHECK(fracvortex::testing::relative(area, boundary) <= 1e-7);
    }
  }

  SUBCASE("rectangle") {
    const GreenFunction rect(Domain::centered_square(1.0), 128, 128);
    const VortexFamily fam = {{Vec2(0.3, -0.2), 1}, {Vec2(-0.35, 0.3), 1}};
    const double area = annulus_energy(rect, fam, 0.08);
    const double boundary = perforated_dirichlet_energy(rect, fam, 0.08, 512);
    CHECK(fracvortex::testing::relative(area, boundary) <= 1e-3);
  }

  CHECK_THROWS_AS(annulus_energy(green, {{Vec2(0.5, 0), 1}}, 0.6), DomainError);
  CHECK(max_excision_radius(unit_disk, {{Vec2(0.3, 0), 1}, {Vec2(-0.3, 0), -1}}) == doctest::Approx(0.3));
}
