#pragma once

#include "fracvortex/cnls.hpp"
#include "fracvortex/config.hpp"
#include "fracvortex/report.hpp"
#include "fracvortex/trajectory.hpp"

#include <functional>
#include <string>
#include <vector>

namespace fracvortex {

/// Exit code for an exception escaping an experiment: 2 for validation, 4 for
/// I/O, 3 for every numerical failure.
int exit_code_for(const std::exception& e);

/// Runs the configured experiment into config.output_dir and returns its report
/// (also written as report.json there). Never throws for experiment failures:
/// they are recorded in the report with the stage that failed.
/// `input_text` is the raw configuration text that is hashed into the report.
Report run_experiment(const RunConfig& config, const std::string& input_text);

struct PdeRun {
  Trajectory tracked;
  std::vector<std::string> snapshots;  ///< file names inside the snapshot directory
  std::vector<Diagnostics> diagnostics;
  double dt = 0.0;
  long steps = 0;
  int n = 0;  ///< cells per side actually used
};

struct PdeRunOptions {
  int nx = 0;
  int ny = 0;
  double epsilon = 0.0;
  double dt = 0.0;  ///< 0 selects default_pde_dt, shrunk to divide the frame interval
  double frame_interval = 0.0025;
  double horizon = 0.1;
  double max_jump = 0.05;
  double modulus_floor = -1.0;
  int threads = 1;
  /// Snapshot every n-th frame into snapshot_dir; 0 disables.
  int snapshot_stride = 0;
  std::string snapshot_dir;
  /// Called with a stage name as the run progresses.
  std::function<void(const std::string&)> on_stage;
};

/// Time step that divides `frame_interval` and does not exceed `dt_max`.
double frame_aligned_dt(double dt_max, double frame_interval);

/// Builds well-prepared data for `vortices`, advances the split-step scheme to the
/// horizon and tracks vortices at every frame. `out` is filled as the run goes, so
/// it holds the completed frames if an exception escapes.
void run_pde(double g, const VortexConfiguration& vortices, const GreenFunction& green, const RadialProfile& profile,
             const PdeRunOptions& options, PdeRun& out);

/// Reduced ODE sampled at the same frame times as the PDE.
Trajectory run_ode(const GreenFunction& green, const VortexConfiguration& vortices, double horizon, double ode_dt,
                   double frame_interval);

/// Maps each (component, index) of the reference configuration to the tracked id
/// nearest its initial position in the first tracked frame (-1 when absent).
std::vector<int> match_tracks(const Trajectory& tracked, const VortexConfiguration& vortices, Component c);

struct EpsilonComparison {
  double epsilon = 0.0;
  int n = 0;
  double dt = 0.0;
  std::vector<double> deviation_u;  ///< per u-vortex sup deviation, PDE vs ODE
  std::vector<double> deviation_v;
  double max_deviation = 0.0;
  double decoupling_delta = 0.0;    ///< sup change of the v tracks when the u family is removed
  double mass_drift = 0.0;          ///< max relative drift over both components
  double energy_drift = 0.0;
  int track_events = 0;
};

/// One epsilon of the compare experiment. `ode` is the reduced trajectory of the
/// full configuration sampled at the frame interval.
/// Artifacts are written into `artifact_dir` with names prefixed by `tag`.
EpsilonComparison compare_at_epsilon(const RunConfig& config, double epsilon, const GreenFunction& green,
                                     const RadialProfile& profile, const Trajectory& ode,
                                     const std::string& artifact_dir, const std::string& tag,
                                     std::vector<std::string>* artifacts = nullptr);

/// Radial profile used to build PDE initial data for coupling g.
RadialProfile initial_data_profile(const RunConfig& config);

}  // namespace fracvortex
