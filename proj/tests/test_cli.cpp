#include "fracvortex/config.hpp"
#include "fracvortex/errors.hpp"
#include "fracvortex/experiments.hpp"
#include "fracvortex/report.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

using namespace fracvortex;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fracvortex_test_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string slurp(const fs::path& p) { return read_text_file(p.string()); }

ConfigError config_error(const std::string& text, Experiment e) {
  try {
    validate_config(parse_config(text, "t.cfg"), e);
  } catch (const ConfigError& err) {
    return err;
  }
  FAIL("expected a configuration error");
  return ConfigError("", "", 0);
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FRACVORTEX_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* small_simulate = R"(# tiny PDE run
domain.kind = rectangle
domain.lower.x = -1
domain.lower.y = -1
domain.lx = 2
domain.ly = 2
grid.nx = 32
grid.ny = 32
epsilon = 1/8
g = 0.5
horizon = 0.005
tracking.frame_interval = 0.0025
snapshot.stride = 1
ode.green_grid = 64
vortices.u[0].x = 0.1
vortices.u[0].y = 0.05
)";

}  // namespace

TEST_CASE("minimal config fills defaults") {
  const RunConfig c = parse_config("domain.kind = rectangle\nepsilon = 1/32\ng = 0.5\nvortices.u[0].x = 0\nvortices.u[0].y = 0\n");
  CHECK(c.nx == 256);
  CHECK(c.ny == 256);
  CHECK(c.epsilon == doctest::Approx(1.0 / 32));
  CHECK(c.dt == 0.0);
  CHECK(default_pde_dt(c.epsilon, c.domain, c.nx, c.ny) <= 0.25 * c.epsilon * c.epsilon);
  REQUIRE(c.vortices.u.size() == 1);
  CHECK(c.vortices.u[0].degree == 1);
  CHECK(c.domain.lx() == 2.0);
  CHECK(c.source_lines.at("g") == 3);
  CHECK_NOTHROW(validate_config(c, Experiment::simulate));
  const auto kv = c.key_values();
  CHECK(kv.at("grid.nx") == "256");
  CHECK(kv.count("output.dir") == 0);
  CHECK(kv.count("threads") == 0);
}

TEST_CASE("validation errors name the key and line") {
  SUBCASE("coupling outside (0,1)") {
    const ConfigError e = config_error("# c\ng = 1.2\nprofile.R = 200\n", Experiment::profile);
    CHECK(e.key() == "g");
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("(0,1)") != std::string::npos);
    CHECK(std::string(e.what()).find("t.cfg:2") != std::string::npos);
  }
  SUBCASE("coincident vortices") {
    const ConfigError e = config_error(
        "g = 0.5\nvortices.u[0].x = 0.2\nvortices.u[0].y = 0\nvortices.u[1].x = 0.2\nvortices.u[1].y = 0\n", Experiment::reduced);
    CHECK(std::string(e.what()).find("min_separation") != std::string::npos);
  }
  SUBCASE("unknown key") {
    const ConfigError e = config_error("g = 0.5\nepsilom = 0.1\n", Experiment::profile);
    CHECK(e.key() == "epsilom");
    CHECK(e.line() == 2);
  }
  SUBCASE("duplicate key") {
    const ConfigError e = config_error("g = 0.5\n\ng = 0.4\n", Experiment::profile);
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
  }
  SUBCASE("malformed values") {
    CHECK(config_error("g = half\n", Experiment::profile).key() == "g");
    CHECK(config_error("no equals sign\n", Experiment::profile).line() == 1);
    CHECK(config_error("g = 0.5\nvortices.u[0].x = 0\nvortices.u[0].degree = 2\n", Experiment::reduced).line() == 3);
  }
  SUBCASE("missing required settings") {
    CHECK(config_error("g = 0.5\ndomain.kind = rectangle\nvortices.u[0].x = 0\nvortices.u[0].y = 0\n", Experiment::simulate).key() == "epsilon");
    CHECK(config_error("g = 0.5\n", Experiment::reduced).key() == "vortices.u[0].x");
    CHECK(config_error("g = 0.5\ncompare.cells_per_epsilon = 3\nvortices.u[0].x = 0\nvortices.u[0].y = 0\n", Experiment::compare).key() ==
          "compare.cells_per_epsilon");
  }
  CHECK_NOTHROW(validate_config(parse_config("g = 0\n"), Experiment::profile));
}

TEST_CASE("report schema") {
  Report r;
  r.experiment = "profile";
  r.stage = "done";
  r.config["g"] = "0.5";
  r.input_hash = git_blob_sha1("g = 0.5\n");
  r.metrics["gamma"] = 0.5;
  r.artifacts = {"profile.csv", "report.json"};
  const Json doc = to_json(r);
  CHECK(validate_report(doc).empty());
  CHECK(doc["schema"] == report_schema);
  CHECK(doc["error"].is_null());

  Report failed = r;
  failed.fail("boom", 3);
  CHECK(validate_report(to_json(failed)).empty());
  CHECK(to_json(failed)["error"] == "boom");

  Json bad = doc;
  bad["status"] = "failed";
  CHECK_FALSE(validate_report(bad).empty());
  bad = doc;
  bad["input_hash"] = "ABC";
  CHECK_FALSE(validate_report(bad).empty());
  bad = doc;
  bad["config"]["g"] = 0.5;
  CHECK_FALSE(validate_report(bad).empty());
  bad = doc;
  bad["extra"] = 1;
  CHECK_FALSE(validate_report(bad).empty());
  bad = doc;
  bad.erase("metrics");
  CHECK_FALSE(validate_report(bad).empty());
}

TEST_CASE("input hash matches git blob ids") {
  CHECK(git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  CHECK(git_blob_sha1("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST_CASE("outputs do not depend on the thread count") {
  const fs::path one = scratch("threads1");
  const fs::path two = scratch("threads2");
  RunConfig cfg = parse_config(small_simulate);
  cfg.experiment = Experiment::simulate;
  cfg.output_dir = one.string();
  cfg.threads = 1;
  const Report a = run_experiment(cfg, small_simulate);
  cfg.output_dir = two.string();
  cfg.threads = 2;
  const Report b = run_experiment(cfg, small_simulate);
  REQUIRE(a.exit_code == 0);
  REQUIRE(b.exit_code == 0);
  CHECK(a.artifacts == b.artifacts);
  for (const auto& name : a.artifacts) {
    CAPTURE(name);
    CHECK(slurp(one / name) == slurp(two / name));
  }
  CHECK(validate_report(Json::parse(slurp(one / "report.json"))).empty());

  SUBCASE("snapshots feed the track experiment") {
    std::string track = "tracking.max_jump = 0.1\ng = 0.5\ntrack.inputs = ";
    bool first = true;
    for (const auto& name : a.artifacts) {
      if (name.rfind("snapshots/", 0) != 0) continue;
      track += (first ? "" : ",") + (one / name).string();
      first = false;
    }
    REQUIRE_FALSE(first);
    RunConfig t = parse_config(track + "\n");
    t.experiment = Experiment::track;
    t.output_dir = scratch("track").string();
    const Report r = run_experiment(t, track);
    CHECK(r.exit_code == 0);
    CHECK(r.metrics["degree_sum_u"] == Json::array({1, 1}));
  }
}

TEST_CASE("command line exit codes and failure reports") {
  const fs::path dir = scratch("cli");
  fs::create_directories(dir);
  const fs::path good = dir / "good.cfg";
  write_file(good, std::string(FRACVORTEX_CONFIGS) == "" ? "" : slurp(fs::path(FRACVORTEX_CONFIGS) / "profile.cfg"));
  CHECK(run_cli("profile --config " + good.string() + " --out " + (dir / "ok").string()) == 0);
  const Json ok = Json::parse(slurp(dir / "ok" / "report.json"));
  CHECK(ok["status"] == "ok");
  CHECK(ok["input_hash"] == git_blob_sha1(slurp(good)));

  const fs::path bad = dir / "bad.cfg";
  write_file(bad, "g = 1.2\n");
  CHECK(run_cli("profile --config " + bad.string() + " --out " + (dir / "bad").string()) == 2);
  const Json rejected = Json::parse(slurp(dir / "bad" / "report.json"));
  CHECK(rejected["status"] == "failed");
  CHECK(rejected["stage"] == "validate");
  CHECK(rejected["exit_code"] == 2);
  CHECK(validate_report(rejected).empty());

  write_file(dir / "typo.cfg", "g = 0.5\nprofile.R = 200\nprofle.nodes = 3\n");
  CHECK(run_cli("profile --config " + (dir / "typo.cfg").string() + " --out " + (dir / "typo").string()) == 2);
  CHECK(Json::parse(slurp(dir / "typo" / "report.json"))["stage"] == "config");

  CHECK(run_cli("profile --config " + (dir / "missing.cfg").string() + " --out " + (dir / "missing").string()) == 4);
  CHECK(Json::parse(slurp(dir / "missing" / "report.json"))["exit_code"] == 4);

  write_file(dir / "blocker", "");
  CHECK(run_cli("profile --config " + good.string() + " --out " + (dir / "blocker" / "sub").string()) == 4);

  CHECK(run_cli("profile") == 2);
  CHECK(run_cli("profile --config " + good.string() + " --threads 0") == 2);
  CHECK(run_cli("bogus --config " + good.string()) == 2);
  CHECK(run_cli("--help") == 0);
}

TEST_CASE("exceptions map to exit codes") {
  CHECK(exit_code_for(ConfigError("bad", "g", 1)) == 2);
  CHECK(exit_code_for(ConfigurationError("bad")) == 2);
  CHECK(exit_code_for(IoError("gone", "/nowhere")) == 4);
  CHECK(exit_code_for(SolverError("stalled", 1.0)) == 3);
  CHECK(exit_code_for(BlowupError("nan")) == 3);
  CHECK(exit_code_for(std::runtime_error("other")) == 3);
}

TEST_CASE("failures keep the stage and partial artifacts") {
  // the reduced ODE runs first; the vortices then sit too close for the core clearance
  std::string text = small_simulate;
  text += "vortices.v[0].x = 0.2\nvortices.v[0].y = 0.05\n";
  RunConfig cfg = parse_config(text);
  cfg.experiment = Experiment::compare;
  cfg.horizon = 0.005;
  cfg.compare_epsilons = {1.0 / 8};
  cfg.output_dir = scratch("partial").string();
  const Report r = run_experiment(cfg, text);
  CHECK(r.exit_code == 2);
  CHECK(r.stage.rfind("pde eps=", 0) == 0);
  CHECK(fs::exists(fs::path(cfg.output_dir) / "ode_trajectory.csv"));
  const Json doc = Json::parse(slurp(fs::path(cfg.output_dir) / "report.json"));
  CHECK(validate_report(doc).empty());
  CHECK(doc["artifacts"].front() == "ode_trajectory.csv");
  CHECK(doc["artifacts"].back() == "report.json");
  for (const auto& name : doc["artifacts"]) CHECK(fs::exists(fs::path(cfg.output_dir) / name.get<std::string>()));
}
