#include "fracvortex/config.hpp"
#include "fracvortex/experiments.hpp"
#include "fracvortex/report.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>

using namespace fracvortex;

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
};

int run(Experiment kind, const Flags& flags) {
  std::string text;
  RunConfig cfg;
  try {
    text = read_text_file(flags.config);
    cfg = parse_config(text, flags.config);
  } catch (const std::exception& e) {
    Report report;
    report.experiment = to_string(kind);
    report.stage = "config";
    report.input_hash = git_blob_sha1(text);
    report.fail(e.what(), exit_code_for(e));
    std::cerr << "error: " << e.what() << '\n';
    const std::string dir = flags.out.value_or("out");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    try {
      report.artifacts.push_back("report.json");
      write_report((std::filesystem::path(dir) / "report.json").string(), report);
    } catch (const std::exception&) {
    }
    return report.exit_code;
  }
  cfg.experiment = kind;
  if (flags.out) cfg.output_dir = *flags.out;
  if (flags.threads) cfg.threads = *flags.threads;
  if (flags.seed) cfg.seed = *flags.seed;

  const Report report = run_experiment(cfg, text);
  if (report.exit_code != 0) {
    std::cerr << "error [" << report.stage << "]: " << report.error << '\n';
  } else {
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << (std::filesystem::path(cfg.output_dir) / "report.json").string() << '\n';
  }
  return report.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-component vortex dynamics experiments"};
  app.require_subcommand(1);
  Flags flags;
  std::optional<Experiment> chosen;

  const std::pair<Experiment, const char*> commands[] = {
      {Experiment::profile, "Solve the radial core profile"},
      {Experiment::gamma, "Core-energy constant over several radii"},
      {Experiment::reduced, "Integrate the point-vortex ODE"},
      {Experiment::simulate, "Run the coupled PDE with tracking"},
      {Experiment::compare, "PDE versus reduced ODE at several core sizes"},
      {Experiment::track, "Track vortices in saved snapshots"},
  };
  for (const auto& [kind, help] : commands) {
    CLI::App* sub = app.add_subcommand(to_string(kind), help);
    sub->add_option("--config", flags.config, "Key-value configuration file")->required();
    sub->add_option("--out", flags.out, "Output directory");
    sub->add_option("--threads", flags.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", flags.seed, "Seed echoed into the report");
    sub->callback([&chosen, kind = kind] { chosen = kind; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return run(*chosen, flags);
}
