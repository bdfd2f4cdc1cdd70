#include "fracvortex/vortex_tracking.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

namespace fracvortex {
namespace {

double increment(const Complex& from, const Complex& to) {
  const Complex q = to * std::conj(from);
  return std::atan2(q.imag(), q.real());
}

// Zero of the bilinear interpolant of (Re, Im) over the unit square with corner
// values z00, z10, z11, z01, by Newton from the center with Cramer's rule.
Vec2 bilinear_zero(const Complex& z00, const Complex& z10, const Complex& z11, const Complex& z01) {
  auto value = [&](double s, double t) {
    return (1 - s) * (1 - t) * z00 + s * (1 - t) * z10 + s * t * z11 + (1 - s) * t * z01;
  };
  double s = 0.5;
  double t = 0.5;
  for (int it = 0; it < 50; ++it) {
    const Complex f = value(s, t);
    const Complex fs = (1 - t) * (z10 - z00) + t * (z11 - z01);
    const Complex ft = (1 - s) * (z01 - z00) + s * (z11 - z10);
    const double det = fs.real() * ft.imag() - ft.real() * fs.imag();
    if (det == 0.0 || !std::isfinite(det)) break;
    const double ds = (f.real() * ft.imag() - ft.real() * f.imag()) / det;
    const double dt = (fs.real() * f.imag() - f.real() * fs.imag()) / det;
    s -= ds;
    t -= dt;
    if (std::abs(ds) + std::abs(dt) < 1e-14) break;
  }
  if (!std::isfinite(s) || !std::isfinite(t)) return {0.5, 0.5};
  return {std::clamp(s, 0.0, 1.0), std::clamp(t, 0.0, 1.0)};
}

}  // namespace

double default_modulus_floor(double g) { return 0.5 / std::sqrt(1.0 + g); }

std::vector<DetectedVortex> detect(const ComplexField& field, double modulus_floor, Component component) {
  const Grid& grid = field.grid;
  const ComplexArray& z = field.data;
  const RealField mod = z.abs();
  std::vector<DetectedVortex> found;
  for (int j = 0; j + 1 < grid.ny(); ++j) {
    for (int i = 0; i + 1 < grid.nx(); ++i) {
      if (mod(i, j) > modulus_floor && mod(i + 1, j) > modulus_floor && mod(i + 1, j + 1) > modulus_floor &&
          mod(i, j + 1) > modulus_floor) {
        continue;
      }
      const Complex c[4] = {z(i, j), z(i + 1, j), z(i + 1, j + 1), z(i, j + 1)};
      double w = 0.0;
      for (int k = 0; k < 4; ++k) w += increment(c[k], c[(k + 1) % 4]);
      const int d = static_cast<int>(std::lround(w / (2 * pi)));
      if (d == 0) continue;
      const Vec2 st = bilinear_zero(c[0], c[1], c[2], c[3]);
      const Vec2 origin = grid.node(i, j);
      found.push_back({origin + Vec2(st.x() * grid.hx(), st.y() * grid.hy()), d, component, i, j});
    }
  }
  return found;
}

Matching associate(const std::vector<DetectedVortex>& previous, const std::vector<DetectedVortex>& current,
                   double max_jump) {
  Matching m;
  const int np = static_cast<int>(previous.size());
  const int nc = static_cast<int>(current.size());

  // admissible (distance, previous, current) edges, found through max_jump buckets
  auto bucket = [&](const Vec2& x) {
    return std::pair<long, long>{static_cast<long>(std::floor(x.x() / max_jump)),
                                 static_cast<long>(std::floor(x.y() / max_jump))};
  };
  std::map<std::pair<long, long>, std::vector<int>> buckets;
  for (int c = 0; c < nc; ++c) buckets[bucket(current[c].position)].push_back(c);
  struct Edge {
    double d;
    int p;
    int c;
  };
  std::vector<Edge> edges;
  std::vector<std::vector<Edge>> by_previous(np);
  for (int p = 0; p < np; ++p) {
    const auto [bx, by] = bucket(previous[p].position);
    for (long dx = -1; dx <= 1; ++dx) {
      for (long dy = -1; dy <= 1; ++dy) {
        const auto it = buckets.find({bx + dx, by + dy});
        if (it == buckets.end()) continue;
        for (int c : it->second) {
          if (previous[p].component != current[c].component || previous[p].degree != current[c].degree) continue;
          const double d = (previous[p].position - current[c].position).norm();
          if (d <= max_jump) by_previous[p].push_back({d, p, c});
        }
      }
    }
    std::sort(by_previous[p].begin(), by_previous[p].end(), [](const Edge& a, const Edge& b) { return a.c < b.c; });
    edges.insert(edges.end(), by_previous[p].begin(), by_previous[p].end());
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.d, a.p, a.c) < std::tie(b.d, b.p, b.c);
  });

  std::vector<bool> taken(nc, false);
  std::vector<bool> served(np, false);
  for (const Edge& e : edges) {
    // the first free edge belongs to the previous vortex with the nearest free candidate
    if (served[e.p] || taken[e.c]) continue;
    int chosen = -1;
    int close = 0;
    for (const Edge& f : by_previous[e.p]) {
      if (taken[f.c] || f.d > 1.1 * e.d) continue;
      if (chosen < 0) chosen = f.c;
      ++close;
    }
    if (close > 1) m.ambiguous_previous.push_back(e.p);
    m.pairs.emplace_back(e.p, chosen);
    taken[chosen] = true;
    served[e.p] = true;
  }
  for (int p = 0; p < np; ++p) {
    if (!served[p]) m.unmatched_previous.push_back(p);
  }
  for (int c = 0; c < nc; ++c) {
    if (!taken[c]) m.unmatched_current.push_back(c);
  }
  std::sort(m.pairs.begin(), m.pairs.end());
  return m;
}

Tracker::Tracker(TrackOptions options) : options_(options) {}

void Tracker::add_frame(const SimState& state) {
  const double floor = options_.modulus_floor > 0 ? options_.modulus_floor : default_modulus_floor(state.g);
  std::vector<DetectedVortex> now = detect(state.u, floor, Component::u);
  for (auto& d : detect(state.v, floor, Component::v)) now.push_back(d);

  std::vector<int> ids(now.size(), -1);
  auto open = [&](std::size_t c) {
    const int comp = static_cast<int>(now[c].component);
    ids[c] = next_id_[comp]++;
    trajectory_.events.push_back({state.t, now[c].component, ids[c], "open"});
  };
  if (!started_) {
    for (std::size_t c = 0; c < now.size(); ++c) open(c);
    started_ = true;
  } else {
    const Matching m = associate(previous_, now, options_.max_jump);
    for (const auto& [p, c] : m.pairs) ids[c] = previous_ids_[p];
    for (int p : m.ambiguous_previous) {
      trajectory_.events.push_back({state.t, previous_[p].component, previous_ids_[p], "ambiguous"});
    }
    for (int p : m.unmatched_previous) {
      trajectory_.events.push_back({state.t, previous_[p].component, previous_ids_[p], "close"});
    }
    for (int c : m.unmatched_current) open(static_cast<std::size_t>(c));
  }

  TrajectoryFrame frame{state.t, {}};
  std::vector<std::size_t> order(now.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::pair(now[a].component, ids[a]) < std::pair(now[b].component, ids[b]);
  });
  for (std::size_t k : order) frame.points.push_back({now[k].component, ids[k], now[k].degree, now[k].position});
  trajectory_.frames.push_back(std::move(frame));
  previous_ = std::move(now);
  previous_ids_ = std::move(ids);
}

Trajectory track_run(const std::vector<SimState>& snapshots, const TrackOptions& options) {
  Tracker tracker(options);
  for (const auto& s : snapshots) tracker.add_frame(s);
  return tracker.trajectory();
}

int degree_sum(const TrajectoryFrame& frame, Component component) {
  int sum = 0;
  for (const auto& p : frame.points) {
    if (p.component == component) sum += p.degree;
  }
  return sum;
}

}  // namespace fracvortex
