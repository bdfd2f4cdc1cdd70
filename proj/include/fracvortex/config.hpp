#pragma once

#include "fracvortex/errors.hpp"
#include "fracvortex/geometry.hpp"
#include "fracvortex/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fracvortex {

enum class Experiment { profile, gamma, reduced, simulate, compare, track };

const char* to_string(Experiment e);
std::optional<Experiment> parse_experiment(const std::string& name);

/// Parse or validation failure. `key` is the dotted key path (empty for pure
/// syntax errors) and `line` the 1-based source line (0 when the key was
/// absent).
class ConfigError : public ConfigurationError {
 public:
  ConfigError(const std::string& what, std::string key, int line)
      : ConfigurationError(what), key_(std::move(key)), line_(line) {}
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

struct RunConfig {
  Experiment experiment = Experiment::simulate;
  Domain domain = Domain::centered_square(1.0);
  int nx = 256;
  int ny = 256;
  double epsilon = 0.0;  ///< 0 when unset
  double g = -1.0;       ///< negative when unset
  double dt = 0.0;       ///< PDE step; 0 selects default_pde_dt
  double horizon = 0.1;
  VortexConfiguration vortices;
  int snapshot_stride = 0;  ///< tracking frames between snapshots; 0 writes none
  double frame_interval = 0.0025;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  int threads = 1;

  double profile_R = 200.0;
  int profile_nodes = 0;  ///< 0 selects default_profile_nodes(R)
  std::vector<double> gamma_radii = {200.0, 400.0, 800.0};

  double ode_dt = 1e-4;
  int green_grid = 256;

  std::vector<double> compare_epsilons = {1.0 / 16, 1.0 / 32};
  double cells_per_epsilon = 4.0;

  double max_jump = 0.05;
  double modulus_floor = -1.0;
  std::vector<std::string> track_inputs;

  std::string source = "<config>";
  std::map<std::string, int> source_lines;  ///< key -> line where it was set

  /// Effective settings as dotted key/value text, defaults included. The output
  /// directory and thread count are left out so reports do not depend on them.
  std::map<std::string, std::string> key_values() const;
};

/// PDE time step used when none is configured:
/// min(eps^2 / 4, 0.9 * split_step_stability_limit(grid)).
double default_pde_dt(double epsilon, const Domain& rectangle, int nx, int ny);

/// Parses `key = value` lines (`#` starts a comment). Keys are dotted, with
/// indexed vortex entries such as `vortices.u[0].x`. Unknown keys, duplicates and
/// malformed values raise ConfigError with the offending line.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

/// Checks the settings required by `experiment`; throws ConfigError naming the key.
void validate_config(const RunConfig& config, Experiment experiment);

/// Raw bytes of a file (for hashing and echoing).
std::string read_text_file(const std::string& path);

}  // namespace fracvortex
