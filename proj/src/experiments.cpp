#include "fracvortex/experiments.hpp"

#include "fracvortex/profile_gamma.hpp"
#include "fracvortex/reduced_dynamics.hpp"
#include "fracvortex/snapshot.hpp"
#include "fracvortex/vortex_tracking.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

namespace fracvortex {
namespace fs = std::filesystem;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void make_directory(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory", dir);
}

GreenFunction make_green(const RunConfig& cfg) {
  if (cfg.domain.is_disk()) return GreenFunction(cfg.domain);
  return GreenFunction(cfg.domain, cfg.green_grid, cfg.green_grid);
}

double relative_drift(const std::vector<Diagnostics>& rows, double Diagnostics::*field) {
  if (rows.empty()) return 0.0;
  const double ref = rows.front().*field;
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, std::abs(r.*field - ref));
  return worst / std::abs(ref);
}

bool covers(const Trajectory& t, Component c, int id) {
  for (std::size_t f = 0; f < t.frames.size(); ++f) {
    if (t.find(f, c, id) == nullptr) return false;
  }
  return !t.frames.empty();
}

// sup deviation, infinite when the tracked vortex is lost in some frame
double tracked_deviation(const Trajectory& tracked, int id, const Trajectory& reference, Component c, int index) {
  if (id < 0 || !covers(tracked, c, id)) return inf;
  const double d = sup_deviation(tracked, reference, c, id, index);
  return std::isnan(d) ? inf : d;
}

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json to_json_array(const std::vector<double>& xs) {
  Json a = Json::array();
  for (double x : xs) a.push_back(number_or_null(x));
  return a;
}

void write_csv_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing", path);
  body(out);
  if (!out) throw IoError("write failed", path);
}

void write_profile_csv(const std::string& path, const RadialProfile& p) {
  write_csv_file(path, [&](std::ostream& out) {
    out << "r,f1,f2\n";
    for (Eigen::Index i = 0; i < p.r.size(); ++i) out << fmt::format("{:.17g},{:.17g},{:.17g}\n", p.r[i], p.f1[i], p.f2[i]);
  });
}

struct Runner {
  const RunConfig& cfg;
  Report& report;
  std::string out;

  void stage(const std::string& s) { report.stage = s; }
  void artifact(const std::string& name) { report.artifacts.push_back(name); }

  ProfileOptions profile_options() const {
    ProfileOptions o;
    o.freeze_second = cfg.g == 0.0;
    return o;
  }

  int nodes_for(double R) const { return cfg.profile_nodes > 0 ? cfg.profile_nodes : default_profile_nodes(R); }

  void profile() {
    stage("profile");
    RadialProfile p;
    try {
      p = solve_profile(cfg.g, cfg.profile_R, nodes_for(cfg.profile_R), profile_options());
    } catch (const ProfileNonconvergence& e) {
      stage("write");
      write_profile_csv(join(out, "profile.csv"), e.last_iterate());
      artifact("profile.csv");
      stage("profile");
      throw;
    }
    stage("write");
    write_profile_csv(join(out, "profile.csv"), p);
    artifact("profile.csv");

    stage("analysis");
    Json& m = report.metrics;
    m["g"] = p.g;
    m["R"] = p.R;
    m["nodes"] = p.r.size();
    m["newton_iterations"] = p.newton_iterations;
    m["residual"] = p.residual;
    m["f1_max"] = p.f1.maxCoeff();
    m["f2_max"] = p.f2.maxCoeff();
    m["f2_at_origin"] = p.f2[0];
    m["bound_violations"] = bound_violations(p);
    const double lo = p.R / 2;
    const double hi = 3 * p.R / 4;
    m["derivative_decay"] = derivative_decay(p, lo, hi);
    m["tail_exponent"] = tail_exponent(p, lo, hi);
    if (!profile_options().freeze_second) {
      const TailFit fit = tail_fit(p, lo, hi);
      const auto [alpha, beta] = tail_coefficients(p.g);
      m["tail_alpha"] = fit.alpha_hat;
      m["tail_beta"] = fit.beta_hat;
      m["tail_alpha_predicted"] = alpha;
      m["tail_beta_predicted"] = beta;
      m["tail_alpha_relative_error"] = std::abs(fit.alpha_hat / alpha - 1);
      m["tail_beta_relative_error"] = std::abs(fit.beta_hat / beta - 1);
      m["tail_fit_residual"] = fit.residual;
      if (fit.warning) report.warnings.push_back(fmt::format("tail fit residual {:.3g} exceeds 10%", fit.residual));
    }
    if (bound_violations(p) > 0) {
      report.warnings.push_back(fmt::format("{} nodes violate the profile bounds", bound_violations(p)));
    }
  }

  void gamma() {
    Json rows = Json::array();
    std::vector<double> values;
    std::vector<double> uncorrected;
    std::vector<GammaResult> results;
    auto flush = [&] {
      write_csv_file(join(out, "gamma.csv"), [&](std::ostream& os) {
        os << "R,gamma,core,outer,tail_correction,residual\n";
        for (const auto& r : results) {
          os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.profile.R, r.gamma, r.core, r.outer,
                            r.tail_correction, r.residual);
        }
      });
    };
    for (double R : cfg.gamma_radii) {
      stage(fmt::format("gamma R={:g}", R));
      try {
        results.push_back(gamma_g(cfg.g, R, nodes_for(R), profile_options()));
      } catch (...) {
        if (!results.empty()) {
          flush();
          artifact("gamma.csv");
        }
        throw;
      }
      const GammaResult& r = results.back();
      values.push_back(r.gamma);
      uncorrected.push_back(r.core + r.outer);
      rows.push_back({{"R", R},
                      {"gamma", r.gamma},
                      {"core", r.core},
                      {"outer", r.outer},
                      {"tail_correction", r.tail_correction},
                      {"residual", r.residual},
                      {"nodes", r.profile.r.size()}});
    }
    stage("write");
    flush();
    artifact("gamma.csv");

    stage("analysis");
    Json& m = report.metrics;
    m["g"] = cfg.g;
    m["radii"] = rows;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    m["gamma_spread"] = *hi - *lo;
    m["gamma_last"] = values.back();
    // uncorrected error ~ c / R^2
    std::vector<double> rich;
    for (std::size_t k = 1; k < values.size(); ++k) {
      const double q = cfg.gamma_radii[k] / cfg.gamma_radii[k - 1];
      rich.push_back(uncorrected[k] + (uncorrected[k] - uncorrected[k - 1]) / (q * q - 1));
    }
    m["richardson"] = to_json_array(rich);
    if (rich.size() >= 1) {
      const auto [rl, rh] = std::minmax_element(rich.begin(), rich.end());
      m["richardson_spread"] = *rh - *rl;
      m["gamma_richardson_gap"] = std::abs(rich.back() - values.back());
    }
  }

  void reduced() {
    stage("green");
    const GreenFunction green = make_green(cfg);
    stage("ode");
    const Trajectory t = run_ode(green, cfg.vortices, cfg.horizon, cfg.ode_dt, cfg.frame_interval);
    stage("write");
    write_trajectory_csv(join(out, "trajectory.csv"), t);
    artifact("trajectory.csv");
    Json& m = report.metrics;
    m["termination"] = to_string(t.termination);
    m["frames"] = t.frames.size();
    m["final_t"] = t.frames.empty() ? 0.0 : t.frames.back().t;
    for (const auto& [k, v] : t.metadata) m[k] = number_or_null(v);
    if (t.termination != Termination::completed) {
      report.warnings.push_back(fmt::format("integration stopped early: {}", to_string(t.termination)));
    }
  }

  PdeRunOptions pde_options(double eps, int nx, int ny) const {
    PdeRunOptions o;
    o.nx = nx;
    o.ny = ny;
    o.epsilon = eps;
    o.dt = cfg.dt;
    o.frame_interval = cfg.frame_interval;
    o.horizon = cfg.horizon;
    o.max_jump = cfg.max_jump;
    o.modulus_floor = cfg.modulus_floor;
    o.threads = cfg.threads;
    return o;
  }

  void write_pde(const PdeRun& run, const std::string& prefix) {
    write_trajectory_csv(join(out, prefix + "trajectory.csv"), run.tracked);
    artifact(prefix + "trajectory.csv");
    write_diagnostics_csv(join(out, prefix + "diagnostics.csv"), run.diagnostics);
    artifact(prefix + "diagnostics.csv");
  }

  void simulate() {
    stage("profile");
    const RadialProfile profile = initial_data_profile(cfg);
    stage("green");
    const GreenFunction green = make_green(cfg);
    PdeRunOptions o = pde_options(cfg.epsilon, cfg.nx, cfg.ny);
    o.snapshot_stride = cfg.snapshot_stride;
    if (o.snapshot_stride > 0) {
      o.snapshot_dir = join(out, "snapshots");
      make_directory(o.snapshot_dir);
    }
    o.on_stage = [this](const std::string& s) { stage(s); };
    PdeRun run;
    try {
      run_pde(cfg.g, cfg.vortices, green, profile, o, run);
    } catch (...) {
      const std::string failed = report.stage;
      for (const auto& s : run.snapshots) artifact("snapshots/" + s);
      write_pde(run, "");
      report.stage = failed;
      throw;
    }
    for (const auto& s : run.snapshots) artifact("snapshots/" + s);
    stage("write");
    write_pde(run, "");

    Json& m = report.metrics;
    m["dt"] = run.dt;
    m["steps"] = run.steps;
    m["frames"] = run.tracked.frames.size();
    m["final_t"] = run.diagnostics.back().t;
    m["mass_u_drift"] = relative_drift(run.diagnostics, &Diagnostics::mass_u);
    m["mass_v_drift"] = relative_drift(run.diagnostics, &Diagnostics::mass_v);
    m["energy_drift"] = relative_drift(run.diagnostics, &Diagnostics::energy);
    m["track_events"] = run.tracked.events.size();
    const auto& first = run.tracked.frames.front();
    const auto& last = run.tracked.frames.back();
    m["degree_sum_u"] = {degree_sum(first, Component::u), degree_sum(last, Component::u)};
    m["degree_sum_v"] = {degree_sum(first, Component::v), degree_sum(last, Component::v)};
    if (cfg.dt > 0 && cfg.dt > split_step_stability_limit(Grid(cfg.domain, cfg.nx, cfg.ny))) {
      report.warnings.push_back("dt exceeds the split-step stability limit");
    }
  }

  void compare() {
    stage("green");
    const GreenFunction green = make_green(cfg);
    stage("ode");
    const Trajectory ode = run_ode(green, cfg.vortices, cfg.horizon, cfg.ode_dt, cfg.frame_interval);
    write_trajectory_csv(join(out, "ode_trajectory.csv"), ode);
    artifact("ode_trajectory.csv");
    if (ode.termination != Termination::completed) {
      report.warnings.push_back(fmt::format("reduced ODE stopped early: {}", to_string(ode.termination)));
    }
    stage("profile");
    const RadialProfile profile = initial_data_profile(cfg);

    Json runs = Json::array();
    std::vector<double> deviations;
    std::vector<double> deltas;
    for (std::size_t k = 0; k < cfg.compare_epsilons.size(); ++k) {
      const double eps = cfg.compare_epsilons[k];
      stage(fmt::format("pde eps={:g}", eps));
      const EpsilonComparison c =
          compare_at_epsilon(cfg, eps, green, profile, ode, out, fmt::format("eps{}_", k), &report.artifacts);
      deviations.push_back(c.max_deviation);
      deltas.push_back(c.decoupling_delta);
      runs.push_back({{"epsilon", eps},
                      {"n", c.n},
                      {"dt", c.dt},
                      {"deviation_u", to_json_array(c.deviation_u)},
                      {"deviation_v", to_json_array(c.deviation_v)},
                      {"max_deviation", number_or_null(c.max_deviation)},
                      {"decoupling_delta", number_or_null(c.decoupling_delta)},
                      {"mass_drift", c.mass_drift},
                      {"energy_drift", c.energy_drift},
                      {"track_events", c.track_events}});
      report.metrics["runs"] = runs;
    }
    stage("analysis");
    auto strictly_decreasing = [](const std::vector<double>& xs) {
      for (std::size_t k = 1; k < xs.size(); ++k) {
        if (!(xs[k] < xs[k - 1])) return false;
      }
      return true;
    };
    Json& m = report.metrics;
    m["ode_termination"] = to_string(ode.termination);
    m["deviation_decreases"] = strictly_decreasing(deviations);
    m["decoupling_decreases"] = strictly_decreasing(deltas);
    for (double d : deviations) {
      if (!std::isfinite(d)) report.warnings.push_back("a tracked vortex was lost; its deviation is unbounded");
    }
  }

  std::vector<std::string> expand_inputs() const {
    std::vector<std::string> files;
    for (const auto& in : cfg.track_inputs) {
      if (fs::is_directory(in)) {
        std::vector<std::string> found;
        for (const auto& entry : fs::directory_iterator(in)) {
          if (entry.is_regular_file() && entry.path().extension() == ".bin") found.push_back(entry.path().string());
        }
        std::sort(found.begin(), found.end());
        files.insert(files.end(), found.begin(), found.end());
      } else {
        files.push_back(in);
      }
    }
    return files;
  }

  void track() {
    stage("read");
    const std::vector<std::string> files = expand_inputs();
    if (files.empty()) throw ConfigError("track.inputs: no snapshot files found", "track.inputs", 0);
    Tracker tracker({cfg.max_jump, cfg.modulus_floor});
    for (const auto& f : files) {
      stage("read");
      const SimState s = read_snapshot(f, cfg.domain);
      stage("track");
      tracker.add_frame(s);
    }
    stage("write");
    const Trajectory& t = tracker.trajectory();
    write_trajectory_csv(join(out, "trajectory.csv"), t);
    artifact("trajectory.csv");
    Json& m = report.metrics;
    m["frames"] = t.frames.size();
    m["rows"] = t.row_count();
    int opened = 0;
    int closed = 0;
    int ambiguous = 0;
    for (const auto& e : t.events) {
      opened += e.kind == "open";
      closed += e.kind == "close";
      ambiguous += e.kind == "ambiguous";
    }
    m["tracks_opened"] = opened;
    m["tracks_closed"] = closed;
    m["ambiguous_matches"] = ambiguous;
    m["degree_sum_u"] = {degree_sum(t.frames.front(), Component::u), degree_sum(t.frames.back(), Component::u)};
    m["degree_sum_v"] = {degree_sum(t.frames.front(), Component::v), degree_sum(t.frames.back(), Component::v)};
    if (ambiguous > 0) report.warnings.push_back(fmt::format("{} ambiguous matches", ambiguous));
  }
};

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const IoError*>(&e) != nullptr) return 4;
  if (dynamic_cast<const ConfigurationError*>(&e) != nullptr) return 2;
  return 3;
}

double frame_aligned_dt(double dt_max, double frame_interval) {
  const double per_frame = std::ceil(frame_interval / dt_max * (1 - 1e-12));
  return frame_interval / std::max(1.0, per_frame);
}

RadialProfile initial_data_profile(const RunConfig& cfg) {
  ProfileOptions o;
  o.freeze_second = cfg.g == 0.0;
  const int nodes = cfg.profile_nodes > 0 ? cfg.profile_nodes : default_profile_nodes(cfg.profile_R);
  return solve_profile(cfg.g, cfg.profile_R, nodes, o);
}

void run_pde(double g, const VortexConfiguration& vortices, const GreenFunction& green, const RadialProfile& profile,
             const PdeRunOptions& o, PdeRun& out) {
  auto stage = [&](const std::string& s) {
    if (o.on_stage) o.on_stage(s);
  };
  const Grid grid(green.domain(), o.nx, o.ny);
  const double dt_max = o.dt > 0 ? o.dt : default_pde_dt(o.epsilon, green.domain(), o.nx, o.ny);
  out.dt = frame_aligned_dt(dt_max, o.frame_interval);
  out.n = std::max(o.nx, o.ny);
  const long per_frame = std::lround(o.frame_interval / out.dt);
  const long frames = std::lround(o.horizon / o.frame_interval);

  stage("initial_data");
  SimState state = build_initial_data(green, grid, vortices, profile, o.epsilon, {5.0, 10.0, o.threads});
  state.g = g;
  SplitStepSolver solver(grid);
  Tracker tracker({o.max_jump, o.modulus_floor});

  auto record = [&](long frame) {
    stage("track");
    tracker.add_frame(state);
    out.tracked = tracker.trajectory();
    out.diagnostics.push_back(diagnostics(state));
    if (o.snapshot_stride > 0 && frame % o.snapshot_stride == 0) {
      const std::string name = fmt::format("snap_{:05d}.bin", frame);
      write_snapshot(join(o.snapshot_dir, name), state);
      out.snapshots.push_back(name);
    }
  };
  record(0);
  for (long f = 1; f <= frames; ++f) {
    stage("step");
    solver.advance(state, out.dt, per_frame);
    out.steps += per_frame;
    state.t = f * o.frame_interval;  // no drift from summing dt
    record(f);
  }
}

Trajectory run_ode(const GreenFunction& green, const VortexConfiguration& vortices, double horizon, double ode_dt,
                   double frame_interval) {
  const double dt = frame_aligned_dt(ode_dt, frame_interval);
  IntegrateOptions io;
  io.sample_stride = static_cast<int>(std::lround(frame_interval / dt));
  return integrate(green, OdeState{0.0, vortices}, horizon, dt, io);
}

std::vector<int> match_tracks(const Trajectory& tracked, const VortexConfiguration& vortices, Component c) {
  const auto& family = vortices.family(c);
  std::vector<int> ids(family.size(), -1);
  if (tracked.frames.empty()) return ids;
  std::vector<bool> used(tracked.frames.front().points.size(), false);
  for (std::size_t j = 0; j < family.size(); ++j) {
    double best = inf;
    int best_k = -1;
    const auto& pts = tracked.frames.front().points;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (used[k] || pts[k].component != c || pts[k].degree != family[j].degree) continue;
      const double d = (pts[k].position - family[j].position).norm();
      if (d < best) {
        best = d;
        best_k = static_cast<int>(k);
      }
    }
    if (best_k >= 0) {
      used[best_k] = true;
      ids[j] = tracked.frames.front().points[best_k].index;
    }
  }
  return ids;
}

EpsilonComparison compare_at_epsilon(const RunConfig& cfg, double eps, const GreenFunction& green,
                                     const RadialProfile& profile, const Trajectory& ode,
                                     const std::string& artifact_dir, const std::string& tag,
                                     std::vector<std::string>* artifacts) {
  EpsilonComparison c;
  c.epsilon = eps;
  const Domain& dom = green.domain();
  const int nx = static_cast<int>(std::ceil(cfg.cells_per_epsilon * dom.lx() / eps - 1e-9));
  const int ny = static_cast<int>(std::ceil(cfg.cells_per_epsilon * dom.ly() / eps - 1e-9));
  PdeRunOptions o;
  o.nx = nx;
  o.ny = ny;
  o.epsilon = eps;
  o.dt = cfg.dt;
  o.frame_interval = cfg.frame_interval;
  o.horizon = cfg.horizon;
  o.max_jump = cfg.max_jump;
  o.modulus_floor = cfg.modulus_floor;
  o.threads = cfg.threads;

  auto save = [&](const PdeRun& run, const std::string& prefix) {
    if (artifact_dir.empty()) return;
    write_trajectory_csv(join(artifact_dir, prefix + "trajectory.csv"), run.tracked);
    write_diagnostics_csv(join(artifact_dir, prefix + "diagnostics.csv"), run.diagnostics);
    if (artifacts != nullptr) {
      artifacts->push_back(prefix + "trajectory.csv");
      artifacts->push_back(prefix + "diagnostics.csv");
    }
  };

  PdeRun full;
  try {
    run_pde(cfg.g, cfg.vortices, green, profile, o, full);
  } catch (...) {
    save(full, tag);
    throw;
  }
  save(full, tag);
  c.n = full.n;
  c.dt = full.dt;
  c.mass_drift = std::max(relative_drift(full.diagnostics, &Diagnostics::mass_u),
                          relative_drift(full.diagnostics, &Diagnostics::mass_v));
  c.energy_drift = relative_drift(full.diagnostics, &Diagnostics::energy);
  c.track_events = static_cast<int>(full.tracked.events.size());

  for (Component comp : {Component::u, Component::v}) {
    const std::vector<int> ids = match_tracks(full.tracked, cfg.vortices, comp);
    auto& dev = comp == Component::u ? c.deviation_u : c.deviation_v;
    for (std::size_t j = 0; j < ids.size(); ++j) {
      dev.push_back(tracked_deviation(full.tracked, ids[j], ode, comp, static_cast<int>(j)));
      c.max_deviation = std::max(c.max_deviation, dev.back());
    }
  }

  VortexConfiguration alone;
  alone.v = cfg.vortices.v;
  PdeRun lone;
  try {
    run_pde(cfg.g, alone, green, profile, o, lone);
  } catch (...) {
    save(lone, tag + "v_only_");
    throw;
  }
  save(lone, tag + "v_only_");
  const std::vector<int> with_u = match_tracks(full.tracked, cfg.vortices, Component::v);
  const std::vector<int> without_u = match_tracks(lone.tracked, alone, Component::v);
  c.decoupling_delta = alone.v.empty() ? std::numeric_limits<double>::quiet_NaN() : 0.0;
  for (std::size_t j = 0; j < with_u.size(); ++j) {
    double d = inf;
    if (with_u[j] >= 0 && without_u[j] >= 0 && covers(full.tracked, Component::v, with_u[j]) &&
        covers(lone.tracked, Component::v, without_u[j])) {
      d = sup_deviation(full.tracked, lone.tracked, Component::v, with_u[j], without_u[j]);
    }
    c.decoupling_delta = std::max(c.decoupling_delta, d);
  }
  return c;
}

Report run_experiment(const RunConfig& cfg, const std::string& input_text) {
  Report report;
  report.experiment = to_string(cfg.experiment);
  for (const auto& [k, v] : cfg.key_values()) report.config[k] = v;
  report.input_hash = git_blob_sha1(input_text);
  Runner runner{cfg, report, cfg.output_dir};
  try {
    runner.stage("validate");
    validate_config(cfg, cfg.experiment);
    runner.stage("output");
    make_directory(cfg.output_dir);
    switch (cfg.experiment) {
      case Experiment::profile: runner.profile(); break;
      case Experiment::gamma: runner.gamma(); break;
      case Experiment::reduced: runner.reduced(); break;
      case Experiment::simulate: runner.simulate(); break;
      case Experiment::compare: runner.compare(); break;
      case Experiment::track: runner.track(); break;
    }
    runner.stage("done");
  } catch (const std::exception& e) {
    report.fail(e.what(), exit_code_for(e));
  }
  report.artifacts.push_back("report.json");
  try {
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    write_report(join(cfg.output_dir, "report.json"), report);
  } catch (const IoError& e) {
    report.artifacts.pop_back();
    if (report.exit_code == 0) report.fail(e.what(), 4);
  }
  return report;
}

}  // namespace fracvortex
