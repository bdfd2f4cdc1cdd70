#pragma once

#include "fracvortex/cnls.hpp"
#include "fracvortex/trajectory.hpp"

#include <vector>

namespace fracvortex {

struct DetectedVortex {
  Vec2 position = Vec2::Zero();
  int degree = 0;
  Component component = Component::u;
  int plaquette_i = 0;  ///< lower-left corner of the plaquette
  int plaquette_j = 0;
};

/// Plaquette winding: the principal-branch phase increments around each cell of
/// four neighbouring samples are summed, and a total of 2 pi d with d != 0 marks
/// a vortex. The position is the common zero of the bilinear interpolants of Re
/// and Im on that plaquette. Plaquettes whose four corner moduli all exceed
/// modulus_floor are skipped.
std::vector<DetectedVortex> detect(const ComplexField& field, double modulus_floor,
                                   Component component = Component::u);

/// Default floor 0.5 / sqrt(1+g).
double default_modulus_floor(double g);

struct Matching {
  std::vector<std::pair<int, int>> pairs;  ///< (previous index, current index)
  std::vector<int> unmatched_previous;
  std::vector<int> unmatched_current;
  std::vector<int> ambiguous_previous;     ///< previous indices whose match was ambiguous
};

/// Greedy nearest-neighbour matching restricted to equal component and degree and
/// to distances <= max_jump. Previous vortices are served in order of their
/// nearest admissible candidate; when several candidates lie within 10% of the
/// nearest distance the smallest current index wins and the match is flagged.
Matching associate(const std::vector<DetectedVortex>& previous, const std::vector<DetectedVortex>& current,
                   double max_jump);

struct TrackOptions {
  double max_jump = 0.1;
  double modulus_floor = -1.0;  ///< negative selects default_modulus_floor(g)
};

/// Incremental detect + associate over a sequence of states. Each track keeps a
/// per-component id; tracks open when an unmatched vortex appears and close when
/// one disappears.
class Tracker {
 public:
  explicit Tracker(TrackOptions options = {});

  void add_frame(const SimState& state);
  const Trajectory& trajectory() const { return trajectory_; }
  const std::vector<DetectedVortex>& last_detections() const { return previous_; }

 private:
  TrackOptions options_;
  Trajectory trajectory_;
  std::vector<DetectedVortex> previous_;
  std::vector<int> previous_ids_;
  int next_id_[2] = {0, 0};
  bool started_ = false;
};

Trajectory track_run(const std::vector<SimState>& snapshots, const TrackOptions& options = {});

/// Signed degree sum per component in one frame.
int degree_sum(const TrajectoryFrame& frame, Component component);

}  // namespace fracvortex
