#include "fracvortex/trajectory.hpp"

#include "fracvortex/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace fracvortex {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::collision: return "collision";
    case Termination::boundary: return "boundary";
    case Termination::blowup: return "blowup";
  }
  return "unknown";
}

std::size_t Trajectory::row_count() const {
  std::size_t n = 0;
  for (const auto& f : frames) n += f.points.size();
  return n;
}

const TrackPoint* Trajectory::find(std::size_t frame, Component c, int index) const {
  for (const auto& p : frames.at(frame).points) {
    if (p.component == c && p.index == index) return &p;
  }
  return nullptr;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  out << "t,component,index,degree,x,y\n";
  for (const auto& f : trajectory.frames) {
    for (const auto& p : f.points) {
      out << fmt::format("{:.17g},{},{},{},{:.17g},{:.17g}\n", f.t, to_string(p.component), p.index, p.degree,
                         p.position.x(), p.position.y());
    }
  }
}

void write_trajectory_csv(const std::string& path, const Trajectory& trajectory) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open trajectory file for writing", path);
  write_trajectory_csv(out, trajectory);
  if (!out) throw IoError("failed writing trajectory file", path);
}

Trajectory read_trajectory_csv(std::istream& in) {
  Trajectory tr;
  std::string line;
  if (!std::getline(in, line) || line != "t,component,index,degree,x,y") {
    throw std::runtime_error("trajectory CSV header mismatch");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell[6];
    for (auto& c : cell) std::getline(ss, c, ',');
    const double t = std::stod(cell[0]);
    TrackPoint p;
    p.component = cell[1] == "u" ? Component::u : Component::v;
    p.index = std::stoi(cell[2]);
    p.degree = std::stoi(cell[3]);
    p.position = Vec2(std::stod(cell[4]), std::stod(cell[5]));
    if (tr.frames.empty() || tr.frames.back().t != t) tr.frames.push_back({t, {}});
    tr.frames.back().points.push_back(p);
  }
  return tr;
}

double sup_deviation(const Trajectory& a, const Trajectory& b, Component c, int index_a, int index_b,
                     double time_tolerance) {
  double sup = 0.0;
  std::size_t jb = 0;
  bool any = false;
  for (std::size_t ia = 0; ia < a.frames.size(); ++ia) {
    const double t = a.frames[ia].t;
    while (jb < b.frames.size() && b.frames[jb].t < t - time_tolerance) ++jb;
    if (jb >= b.frames.size()) break;
    if (std::abs(b.frames[jb].t - t) > time_tolerance) continue;
    const TrackPoint* p = a.find(ia, c, index_a);
    const TrackPoint* q = b.find(jb, c, index_b);
    if (p == nullptr || q == nullptr) continue;
    sup = std::max(sup, (p->position - q->position).norm());
    any = true;
  }
  return any ? sup : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace fracvortex
