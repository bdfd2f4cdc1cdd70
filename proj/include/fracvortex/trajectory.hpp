#pragma once

#include "fracvortex/types.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace fracvortex {

struct TrackPoint {
  Component component = Component::u;
  int index = 0;  ///< vortex (or track) id within its component
  int degree = 1;
  Vec2 position = Vec2::Zero();
};

struct TrajectoryFrame {
  double t = 0.0;
  std::vector<TrackPoint> points;
};

enum class Termination { completed, collision, boundary, blowup };

const char* to_string(Termination t);

struct TrackEvent {
  double t = 0.0;
  Component component = Component::u;
  int index = 0;
  std::string kind;  ///< "open", "close", "ambiguous"
};

/// Time-stamped vortex positions from either the reduced ODE or the tracker.
struct Trajectory {
  std::vector<TrajectoryFrame> frames;
  Termination termination = Termination::completed;
  std::vector<TrackEvent> events;
  std::map<std::string, double> metadata;

  std::size_t row_count() const;
  /// Position of (component, index) in frame f, if present.
  const TrackPoint* find(std::size_t frame, Component c, int index) const;
};

/// CSV with header `t,component,index,degree,x,y`, one row per vortex per frame.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
void write_trajectory_csv(const std::string& path, const Trajectory& trajectory);
Trajectory read_trajectory_csv(std::istream& in);

/// sup over common frame times of |p(t) - q(t)| for one (component, index).
/// Frames are matched by time within `time_tolerance`.
double sup_deviation(const Trajectory& a, const Trajectory& b, Component c, int index_a, int index_b,
                     double time_tolerance = 1e-9);

}  // namespace fracvortex
