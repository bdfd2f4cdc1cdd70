#include "fracvortex/config.hpp"

#include "fracvortex/cnls.hpp"
#include "fracvortex/renormalized_energy.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <regex>
#include <sstream>

namespace fracvortex {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& source, int line, const std::string& key, const std::string& msg) {
  if (line > 0) throw ConfigError(fmt::format("{}:{}: {}: {}", source, line, key, msg), key, line);
  throw ConfigError(fmt::format("{}: {}: {}", source, key, msg), key, line);
}

struct Context {
  std::string source;
  std::string key;
  int line;
};

double number(const std::string& text, const Context& c) {
  auto one = [&](const std::string& part) {
    const std::string t = trim(part);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
      fail(c.source, c.line, c.key, fmt::format("'{}' is not a number", text));
    }
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string::npos) return one(text);
  const double den = one(text.substr(slash + 1));
  if (den == 0.0) fail(c.source, c.line, c.key, "division by zero");
  return one(text.substr(0, slash)) / den;
}

long integer(const std::string& text, const Context& c) {
  long v = 0;
  const std::string t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    fail(c.source, c.line, c.key, fmt::format("'{}' is not an integer", text));
  }
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> number_list(const std::string& text, const Context& c) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(number(item, c));
  if (out.empty()) fail(c.source, c.line, c.key, "empty list");
  return out;
}

std::string show(double v) { return fmt::format("{}", v); }

std::string show(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + show(v[i]);
  return s;
}

struct PendingDomain {
  std::string kind = "rectangle";
  std::map<std::string, double> values;
};

struct PendingVortex {
  std::optional<double> x, y;
  int degree = 1;
};

using Setter = std::function<void(RunConfig&, PendingDomain&, const std::string&, const Context&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    t["experiment"] = [](RunConfig& r, PendingDomain&, const std::string& v, const Context& c) {
      const auto e = parse_experiment(v);
      if (!e) fail(c.source, c.line, c.key, fmt::format("unknown experiment '{}'", v));
      r.experiment = *e;
    };
    t["domain.kind"] = [](RunConfig&, PendingDomain& d, const std::string& v, const Context& c) {
      if (v != "disk" && v != "rectangle") fail(c.source, c.line, c.key, "expected 'disk' or 'rectangle'");
      d.kind = v;
    };
    for (const char* k : {"domain.center.x", "domain.center.y", "domain.radius", "domain.lower.x", "domain.lower.y",
                          "domain.lx", "domain.ly"}) {
      t[k] = [](RunConfig&, PendingDomain& d, const std::string& v, const Context& c) {
        d.values[c.key] = number(v, c);
      };
    }
    auto real = [&t](const char* key, double RunConfig::*field) {
      t[key] = [field](RunConfig& r, PendingDomain&, const std::string& v, const Context& c) {
        r.*field = number(v, c);
      };
    };
    auto whole = [&t](const char* key, int RunConfig::*field) {
      t[key] = [field](RunConfig& r, PendingDomain&, const std::string& v, const Context& c) {
        r.*field = static_cast<int>(integer(v, c));
      };
    };
    auto list = [&t](const char* key, std::vector<double> RunConfig::*field) {
      t[key] = [field](RunConfig& r, PendingDomain&, const std::string& v, const Context& c) {
        r.*field = number_list(v, c);
      };
    };
    whole("grid.nx", &RunConfig::nx);
    whole("grid.ny", &RunConfig::ny);
    real("epsilon", &RunConfig::epsilon);
    real("g", &RunConfig::g);
    real("dt", &RunConfig::dt);
    real("horizon", &RunConfig::horizon);
    whole("snapshot.stride", &RunConfig::snapshot_stride);
    real("tracking.frame_interval", &RunConfig::frame_interval);
    real("tracking.max_jump", &RunConfig::max_jump);
    real("tracking.modulus_floor", &RunConfig::modulus_floor);
    whole("threads", &RunConfig::threads);
    real("profile.R", &RunConfig::profile_R);
    whole("profile.nodes", &RunConfig::profile_nodes);
    list("gamma.radii", &RunConfig::gamma_radii);
    real("ode.dt", &RunConfig::ode_dt);
    whole("ode.green_grid", &RunConfig::green_grid);
    list("compare.epsilons", &RunConfig::compare_epsilons);
    real("compare.cells_per_epsilon", &RunConfig::cells_per_epsilon);
    t["output.dir"] = [](RunConfig& r, PendingDomain&, const std::string& v, const Context&) { r.output_dir = v; };
    t["seed"] = [](RunConfig& r, PendingDomain&, const std::string& v, const Context& c) {
      const long s = integer(v, c);
      if (s < 0) fail(c.source, c.line, c.key, "must be non-negative");
      r.seed = static_cast<std::uint64_t>(s);
    };
    t["track.inputs"] = [](RunConfig& r, PendingDomain&, const std::string& v, const Context&) {
      r.track_inputs = split_list(v);
    };
    return t;
  }();
  return table;
}

int line_of(const RunConfig& r, const std::string& key) {
  const auto it = r.source_lines.find(key);
  return it == r.source_lines.end() ? 0 : it->second;
}

[[noreturn]] void invalid(const RunConfig& r, const std::string& key, const std::string& msg) {
  fail(r.source, line_of(r, key), key, msg);
}

}  // namespace

const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::profile: return "profile";
    case Experiment::gamma: return "gamma";
    case Experiment::reduced: return "reduced";
    case Experiment::simulate: return "simulate";
    case Experiment::compare: return "compare";
    case Experiment::track: return "track";
  }
  return "unknown";
}

std::optional<Experiment> parse_experiment(const std::string& name) {
  for (Experiment e : {Experiment::profile, Experiment::gamma, Experiment::reduced, Experiment::simulate,
                       Experiment::compare, Experiment::track}) {
    if (name == to_string(e)) return e;
  }
  return std::nullopt;
}

double default_pde_dt(double epsilon, const Domain& rectangle, int nx, int ny) {
  const Grid grid(rectangle, nx, ny);
  return std::min(0.25 * epsilon * epsilon, 0.9 * split_step_stability_limit(grid));
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  RunConfig r;
  r.source = source;
  PendingDomain domain;
  std::map<std::pair<Component, int>, PendingVortex> pending;
  static const std::regex vortex_key(R"(vortices\.(u|v)\[(\d+)\]\.(x|y|degree))");

  std::stringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("{}:{}: expected 'key = value'", source, line), "", line);
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) throw ConfigError(fmt::format("{}:{}: missing key", source, line), "", line);
    if (value.empty()) fail(source, line, key, "missing value");
    if (r.source_lines.count(key)) {
      fail(source, line, key, fmt::format("duplicate key (first set on line {})", r.source_lines[key]));
    }
    r.source_lines[key] = line;
    const Context ctx{source, key, line};

    std::smatch m;
    if (std::regex_match(key, m, vortex_key)) {
      const Component comp = m[1] == "u" ? Component::u : Component::v;
      auto& pv = pending[{comp, std::stoi(m[2])}];
      if (m[3] == "x") pv.x = number(value, ctx);
      else if (m[3] == "y") pv.y = number(value, ctx);
      else {
        const long d = integer(value, ctx);
        if (d != 1 && d != -1) fail(source, line, key, "degree must be +1 or -1");
        pv.degree = static_cast<int>(d);
      }
      continue;
    }
    const auto it = setters().find(key);
    if (it == setters().end()) fail(source, line, key, "unknown key");
    it->second(r, domain, value, ctx);
  }

  auto dv = [&](const char* k, double fallback) {
    const auto it = domain.values.find(k);
    return it == domain.values.end() ? fallback : it->second;
  };
  for (const auto& [k, v] : domain.values) {
    const bool disk_key = k.rfind("domain.center", 0) == 0 || k == "domain.radius";
    if (disk_key != (domain.kind == "disk")) {
      fail(source, r.source_lines[k], k, fmt::format("not a parameter of a {} domain", domain.kind));
    }
  }
  if (domain.kind == "disk") {
    const double radius = dv("domain.radius", 1.0);
    if (!(radius > 0)) invalid(r, "domain.radius", "must be positive");
    r.domain = Domain::disk(Vec2(dv("domain.center.x", 0.0), dv("domain.center.y", 0.0)), radius);
  } else {
    const double lx = dv("domain.lx", 2.0);
    const double ly = dv("domain.ly", 2.0);
    if (!(lx > 0)) invalid(r, "domain.lx", "must be positive");
    if (!(ly > 0)) invalid(r, "domain.ly", "must be positive");
    r.domain = Domain::rectangle(Vec2(dv("domain.lower.x", -1.0), dv("domain.lower.y", -1.0)), lx, ly);
  }

  for (Component comp : {Component::u, Component::v}) {
    int expected = 0;
    for (const auto& [id, pv] : pending) {
      if (id.first != comp) continue;
      const std::string base = fmt::format("vortices.{}[{}]", to_string(comp), id.second);
      if (id.second != expected) invalid(r, base + ".x", fmt::format("vortex indices must be contiguous from 0"));
      ++expected;
      if (!pv.x) invalid(r, base + ".x", "missing");
      if (!pv.y) invalid(r, base + ".y", "missing");
      r.vortices.family(comp).push_back({Vec2(*pv.x, *pv.y), pv.degree});
    }
  }
  return r;
}

RunConfig load_config(const std::string& path) { return parse_config(read_text_file(path), path); }

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file", path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void validate_config(const RunConfig& r, Experiment e) {
  const bool pde = e == Experiment::simulate || e == Experiment::compare;
  const bool needs_g = e != Experiment::reduced && e != Experiment::track;
  if (needs_g && r.g < 0.0 && !r.source_lines.count("g")) invalid(r, "g", "required");
  if (r.source_lines.count("g") || needs_g) {
    if (!(r.g == 0.0 || (r.g > 0.0 && r.g < 1.0))) {
      invalid(r, "g", fmt::format("value {} outside the open interval (0,1) (g = 0 selects the decoupled case)", r.g));
    }
  }
  if (r.nx < 8) invalid(r, "grid.nx", "must be at least 8");
  if (r.ny < 8) invalid(r, "grid.ny", "must be at least 8");
  if (r.threads < 1) invalid(r, "threads", "must be at least 1");
  if (!(r.horizon > 0)) invalid(r, "horizon", "must be positive");
  if (r.source_lines.count("dt") && !(r.dt > 0)) invalid(r, "dt", "must be positive");
  if (!(r.ode_dt > 0)) invalid(r, "ode.dt", "must be positive");
  if (!(r.frame_interval > 0)) invalid(r, "tracking.frame_interval", "must be positive");
  if (!(r.max_jump > 0)) invalid(r, "tracking.max_jump", "must be positive");
  if (r.snapshot_stride < 0) invalid(r, "snapshot.stride", "must be non-negative");
  if (r.green_grid < 8) invalid(r, "ode.green_grid", "must be at least 8");

  if (e == Experiment::profile || e == Experiment::gamma) {
    if (!(r.profile_R >= 50)) invalid(r, "profile.R", "must be at least 50");
    if (r.profile_nodes != 0 && r.profile_nodes < 512) invalid(r, "profile.nodes", "must be at least 512");
    for (double R : r.gamma_radii) {
      if (!(R >= 50)) invalid(r, "gamma.radii", fmt::format("radius {} below 50", R));
    }
  }
  if (e == Experiment::track && r.track_inputs.empty()) invalid(r, "track.inputs", "required");

  if (e == Experiment::reduced || pde) {
    if (r.vortices.u.empty() && r.vortices.v.empty()) invalid(r, "vortices.u[0].x", "at least one vortex is required");
    for (Component c : {Component::u, Component::v}) {
      const auto& fam = r.vortices.family(c);
      for (std::size_t j = 0; j < fam.size(); ++j) {
        if (!r.domain.contains(fam[j].position)) {
          invalid(r, fmt::format("vortices.{}[{}].x", to_string(c), j), "vortex lies outside the domain");
        }
      }
    }
    const double sep = min_separation(r.vortices.u, r.vortices.v, r.domain);
    if (!(sep > 0)) {
      invalid(r, "vortices", fmt::format("inadmissible configuration: min_separation = {} (coincident vortices)", sep));
    }
  }
  if (pde) {
    if (r.domain.is_disk()) invalid(r, "domain.kind", "PDE experiments need a rectangle");
    if (e == Experiment::simulate) {
      if (!(r.epsilon > 0)) invalid(r, "epsilon", r.source_lines.count("epsilon") ? "must be positive" : "required");
      const double h = std::max(r.domain.lx() / r.nx, r.domain.ly() / r.ny);
      if (r.epsilon < 2 * h * (1 - 1e-12)) {
        invalid(r, "epsilon", fmt::format("{} is below twice the grid spacing {}", r.epsilon, h));
      }
      if (r.source_lines.count("dt") && r.dt > 0.5 * r.epsilon * r.epsilon) invalid(r, "dt", "exceeds 0.5 eps^2");
    } else {
      for (double eps : r.compare_epsilons) {
        if (!(eps > 0)) invalid(r, "compare.epsilons", "entries must be positive");
      }
      if (!(r.cells_per_epsilon >= 4)) invalid(r, "compare.cells_per_epsilon", "must be at least 4 (8 cells across a core)");
    }
  }
}

std::map<std::string, std::string> RunConfig::key_values() const {
  std::map<std::string, std::string> kv;
  kv["experiment"] = to_string(experiment);
  if (domain.is_disk()) {
    kv["domain.kind"] = "disk";
    kv["domain.center.x"] = show(domain.center().x());
    kv["domain.center.y"] = show(domain.center().y());
    kv["domain.radius"] = show(domain.radius());
  } else {
    kv["domain.kind"] = "rectangle";
    kv["domain.lower.x"] = show(domain.lower().x());
    kv["domain.lower.y"] = show(domain.lower().y());
    kv["domain.lx"] = show(domain.lx());
    kv["domain.ly"] = show(domain.ly());
  }
  kv["grid.nx"] = std::to_string(nx);
  kv["grid.ny"] = std::to_string(ny);
  if (epsilon > 0) kv["epsilon"] = show(epsilon);
  if (g >= 0) kv["g"] = show(g);
  if (dt > 0) kv["dt"] = show(dt);
  kv["horizon"] = show(horizon);
  for (Component c : {Component::u, Component::v}) {
    const auto& fam = vortices.family(c);
    for (std::size_t j = 0; j < fam.size(); ++j) {
      const std::string base = fmt::format("vortices.{}[{}]", to_string(c), j);
      kv[base + ".x"] = show(fam[j].position.x());
      kv[base + ".y"] = show(fam[j].position.y());
      kv[base + ".degree"] = std::to_string(fam[j].degree);
    }
  }
  kv["snapshot.stride"] = std::to_string(snapshot_stride);
  kv["tracking.frame_interval"] = show(frame_interval);
  kv["tracking.max_jump"] = show(max_jump);
  kv["tracking.modulus_floor"] = show(modulus_floor);
  kv["seed"] = std::to_string(seed);
  kv["profile.R"] = show(profile_R);
  kv["profile.nodes"] = std::to_string(profile_nodes);
  kv["gamma.radii"] = show(gamma_radii);
  kv["ode.dt"] = show(ode_dt);
  kv["ode.green_grid"] = std::to_string(green_grid);
  kv["compare.epsilons"] = show(compare_epsilons);
  kv["compare.cells_per_epsilon"] = show(cells_per_epsilon);
  if (!track_inputs.empty()) {
    std::string s;
    for (std::size_t i = 0; i < track_inputs.size(); ++i) s += (i ? "," : "") + track_inputs[i];
    kv["track.inputs"] = s;
  }
  return kv;
}

}  // namespace fracvortex
