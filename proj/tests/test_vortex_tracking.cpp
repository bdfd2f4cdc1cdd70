#include "fracvortex/vortex_tracking.hpp"

#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace fracvortex;

namespace {

const Domain square = Domain::centered_square(1.0);

Complex winding(const Vec2& x, const Vec2& a, int degree, double core) {
  const Vec2 d = x - a;
  const Complex z(d.x(), degree > 0 ? d.y() : -d.y());
  return z / std::max(std::abs(z), core);
}

ComplexField field_with(const Grid& grid, const std::vector<PointVortex>& vortices, double core) {
  ComplexField f(grid);
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      Complex w = 1.0;
      for (const auto& p : vortices) w *= winding(grid.node(i, j), p.position, p.degree, core);
      f(i, j) = w;
    }
  }
  return f;
}

DetectedVortex at(double x, double y, int degree = 1, Component c = Component::u) {
  DetectedVortex d;
  d.position = Vec2(x, y);
  d.degree = degree;
  d.component = c;
  return d;
}

}  // namespace

TEST_CASE("canonical winding field") {
  const Grid grid(square, 128, 128);
  const ComplexField f = field_with(grid, {{Vec2::Zero(), 1}}, 1.0 / 32);
  const auto found = detect(f, 0.5);
  REQUIRE(found.size() == 1);
  CHECK(found[0].degree == 1);
  CHECK(found[0].component == Component::u);
  CHECK(found[0].position.norm() <= grid.h() / 4);

  ComplexField conj = f;
  conj.data = f.data.conjugate();
  const auto flipped = detect(conj, 0.5, Component::v);
  REQUIRE(flipped.size() == 1);
  CHECK(flipped[0].degree == -1);
  CHECK(flipped[0].component == Component::v);
  CHECK(flipped[0].position == found[0].position);
  CHECK(flipped[0].plaquette_i == found[0].plaquette_i);
}

TEST_CASE("two-vortex product field") {
  const Grid grid(square, 128, 128);
  const ComplexField f = field_with(grid, {{Vec2(-0.4, 0), 1}, {Vec2(0.4, 0), -1}}, 1.0 / 32);
  auto found = detect(f, 0.5);
  REQUIRE(found.size() == 2);
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.position.x() < b.position.x(); });
  CHECK((found[0].position - Vec2(-0.4, 0)).norm() <= grid.h() / 2);
  CHECK((found[1].position - Vec2(0.4, 0)).norm() <= grid.h() / 2);
  CHECK(found[0].degree == 1);
  CHECK(found[1].degree == -1);
}

TEST_CASE("random placements are recovered within half a cell") {
  const Grid grid(square, 128, 128);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  std::uniform_int_distribution<int> sign(0, 1);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Vec2 a(u(rng), u(rng));
    const int d = sign(rng) ? 1 : -1;
    const auto found = detect(field_with(grid, {{a, d}}, 0.1), 0.5);
    REQUIRE(found.size() == 1);
    CHECK(found[0].degree == d);
    worst = std::max(worst, (found[0].position - a).norm());
  }
  CHECK(worst <= grid.h() / 2);
}

TEST_CASE("smooth nonvanishing fields have no vortices") {
  const Grid grid(square, 64, 64);
  ComplexField f(grid);
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) f(i, j) = std::exp(Complex(0, 3 * grid.node(i, j).x())) * 0.1;
  }
  // every plaquette is below the floor, yet none winds
  CHECK(detect(f, 0.5).empty());
  CHECK(default_modulus_floor(0.5) == doctest::Approx(0.5 / std::sqrt(1.5)));
}

TEST_CASE("association") {
  const std::vector<DetectedVortex> prev = {at(0.0, 0.0), at(0.5, 0.2, -1), at(-0.3, 0.4, 1, Component::v)};

  SUBCASE("identical lists") {
    const Matching m = associate(prev, prev, 0.1);
    CHECK(m.pairs == std::vector<std::pair<int, int>>{{0, 0}, {1, 1}, {2, 2}});
    CHECK(m.unmatched_previous.empty());
    CHECK(m.unmatched_current.empty());
    CHECK(m.ambiguous_previous.empty());
  }

  SUBCASE("small uniform shift") {
    auto cur = prev;
    for (auto& d : cur) d.position += Vec2(0.03, 0.0);
    const Matching m = associate(prev, cur, 0.1);
    CHECK(m.pairs.size() == 3);
    for (auto [p, c] : m.pairs) CHECK(p == c);
  }

  SUBCASE("degree and component restrict candidates") {
    // a -1 vortex lands right next to where the +1 was
    const std::vector<DetectedVortex> cur = {at(0.01, 0.0, -1), at(0.02, 0.01, 1, Component::v)};
    const Matching m = associate({at(0.0, 0.0)}, cur, 0.1);
    CHECK(m.pairs.empty());
    CHECK(m.unmatched_previous == std::vector<int>{0});
    CHECK(m.unmatched_current.size() == 2);
  }

  SUBCASE("jumps beyond max_jump open and close tracks") {
    const Matching m = associate({at(0.0, 0.0)}, {at(0.2, 0.0)}, 0.1);
    CHECK(m.pairs.empty());
    CHECK(m.unmatched_previous == std::vector<int>{0});
    CHECK(m.unmatched_current == std::vector<int>{0});
  }

  SUBCASE("near-ties are flagged and resolved by index") {
    const Matching m = associate({at(0.0, 0.0)}, {at(0.052, 0.0), at(-0.050, 0.0)}, 0.1);
    REQUIRE(m.pairs.size() == 1);
    CHECK(m.pairs[0] == std::pair{0, 0});
    CHECK(m.ambiguous_previous == std::vector<int>{0});
    CHECK(m.unmatched_current == std::vector<int>{1});

    const Matching clear = associate({at(0.0, 0.0)}, {at(0.08, 0.0), at(-0.050, 0.0)}, 0.1);
    CHECK(clear.pairs[0] == std::pair{0, 1});
    CHECK(clear.ambiguous_previous.empty());
  }
}

TEST_CASE("tracker on a frozen state") {
  const Grid grid(square, 64, 64);
  SimState st(grid, 0.1, 0.0);
  st.u = field_with(grid, {{Vec2(0.3, 0.2), 1}, {Vec2(-0.4, -0.1), -1}}, 0.1);
  st.v = field_with(grid, {{Vec2(0.0, -0.5), 1}}, 0.1);
  Tracker tracker({0.05, 0.5});
  for (int k = 0; k < 10; ++k) {
    st.t = 0.01 * k;
    tracker.add_frame(st);
  }
  const Trajectory& t = tracker.trajectory();
  REQUIRE(t.frames.size() == 10);
  CHECK(t.events.size() == 3);
  for (const auto& e : t.events) CHECK(e.kind == "open");
  for (std::size_t f = 0; f < t.frames.size(); ++f) {
    CHECK(t.frames[f].points.size() == 3);
    CHECK(degree_sum(t.frames[f], Component::u) == 0);
    CHECK(degree_sum(t.frames[f], Component::v) == 1);
    for (const auto& p : t.frames[0].points) CHECK(t.find(f, p.component, p.index)->position == p.position);
  }
}

TEST_CASE("tracker follows a moving vortex and closes lost tracks") {
  const Grid grid(square, 64, 64);
  std::vector<SimState> frames;
  for (int k = 0; k < 6; ++k) {
    SimState st(grid, 0.1, 0.0);
    st.t = k;
    st.u = field_with(grid, {{Vec2(-0.5 + 0.04 * k, 0.1), 1}}, 0.1);
    // the v vortex leaves after frame 2
    st.v = k < 3 ? field_with(grid, {{Vec2(0.4, -0.3), -1}}, 0.1) : field_with(grid, {}, 0.1);
    frames.push_back(std::move(st));
  }
  const Trajectory t = track_run(frames, {0.1, 0.5});
  REQUIRE(t.frames.size() == 6);
  for (std::size_t f = 0; f < 6; ++f) {
    const TrackPoint* p = t.find(f, Component::u, 0);
    REQUIRE(p != nullptr);
    CHECK((p->position - Vec2(-0.5 + 0.04 * f, 0.1)).norm() <= grid.h() / 2);
  }
  CHECK(t.find(2, Component::v, 0) != nullptr);
  CHECK(t.find(3, Component::v, 0) == nullptr);
  const auto closes = std::count_if(t.events.begin(), t.events.end(), [](const TrackEvent& e) { return e.kind == "close"; });
  CHECK(closes == 1);
}
