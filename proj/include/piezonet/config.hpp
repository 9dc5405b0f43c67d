#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "piezonet/beam_modal.hpp"
#include "piezonet/circuits.hpp"
#include "piezonet/errors.hpp"
#include "piezonet/reduction.hpp"
#include "piezonet/si_number.hpp"

namespace piezonet {

class ConfigError : public LineError {
 public:
  ConfigError(std::string section, std::size_t line, const std::string& what)
      : LineError(line, "[" + section + "] " + what), section_(std::move(section)) {}

  const std::string& section() const noexcept { return section_; }

 private:
  std::string section_;
};

/// Branch value in a scenario: an explicit number, the closed-form seed, the
/// reduced-model optimum, or (for netlist files) whatever the file says.
struct BranchSetting {
  enum class Kind { unset, value, seed, tuned };
  Kind kind = Kind::unset;
  double value = 0.0;
};

struct InitialCondition {
  enum class Kind { tip, mode, voltage };
  Kind kind = Kind::tip;
  std::size_t mode = 1;
  double amplitude = 1e-3;
};

struct ScenarioConfig {
  // [beam]
  BeamSpec beam;
  std::size_t modes = 5;
  // [patches]
  std::size_t patch_count = 5;
  double coverage = 0.9;
  double capacitance = 100e-9;
  double coupling = 1e-4;
  // [network]
  std::string topology = "single_shunt";
  std::string netlist_path;
  Termination termination = Termination::none;
  BranchSetting resistance;
  BranchSetting inductance;
  // [optimize]
  TuneOptions tune;
  std::size_t target_mode = 1;
  bool per_branch = false;
  bool residual_modes = true;
  // [simulate]
  std::optional<double> dt;
  std::optional<double> duration;
  InitialCondition initial;
  // [frf]
  std::optional<double> omega_min;
  std::optional<double> omega_max;
  std::size_t frf_points = 2000;
  bool frf_log = true;
  // [output]
  std::string output_dir = "out";

  std::filesystem::path base_dir;
  std::map<std::string, std::size_t> lines;  // "section.key" -> line

  std::size_t line_of(const std::string& key) const {
    const auto it = lines.find(key);
    return it == lines.end() ? 0 : it->second;
  }
};

inline const std::vector<std::string>& topology_names() {
  static const std::vector<std::string> names{"single_shunt", "multi_shunt", "transmission_line"};
  return names;
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(trim(item));
  return out;
}

}  // namespace detail

/// Builds the scenario's netlist; R and L are placeholders unless given as
/// numbers (the pipeline rescales them afterwards).
inline Netlist scenario_netlist(const ScenarioConfig& cfg, const std::string& topology) {
  const double r = cfg.resistance.kind == BranchSetting::Kind::value ? cfg.resistance.value : 1.0;
  const double l = cfg.inductance.kind == BranchSetting::Kind::value ? cfg.inductance.value : 1.0;
  if (topology == "single_shunt") return build_single_shunt(cfg.patch_count, r, l);
  if (topology == "multi_shunt") return build_multi_shunt(cfg.patch_count, r, l);
  if (topology == "transmission_line") {
    return build_transmission_line(cfg.patch_count, r, l, cfg.termination);
  }
  if (topology == "netlist") {
    std::filesystem::path p(cfg.netlist_path);
    if (p.is_relative() && !cfg.base_dir.empty()) p = cfg.base_dir / p;
    std::ifstream in(p);
    if (!in) throw ParameterError("cannot open netlist '" + p.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    Netlist net = parse_netlist(ss.str());
    net.validate(cfg.patch_count);
    return net;
  }
  throw ParameterError("unknown topology '" + topology + "'");
}

/// Parses the sectioned key = value dialect and fills defaults.
inline ScenarioConfig load_config(std::string_view text, const std::filesystem::path& base_dir = {}) {
  ScenarioConfig cfg;
  cfg.base_dir = base_dir;
  static const std::map<std::string, std::set<std::string>> known{
      {"beam", {"L", "EI", "rhoA", "zeta", "M"}},
      {"patches", {"N", "coverage", "Cp", "gamma"}},
      {"network", {"topology", "netlist", "R", "L", "termination"}},
      {"optimize",
       {"objective", "target_mode", "r_bounds", "l_bounds", "per_branch", "max_iterations",
        "participation", "hinf_points", "residual_modes"}},
      {"simulate", {"dt", "T", "initial"}},
      {"frf", {"omega_min", "omega_max", "points", "spacing"}},
      {"output", {"dir"}},
  };

  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::map<std::string, std::string> values;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = detail::trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(section, line_no, "malformed section header");
      section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
      if (known.count(section) == 0) throw ConfigError(section, line_no, "unknown section");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(section, line_no, "expected 'key = value'");
    if (section.empty()) throw ConfigError(section, line_no, "key outside any section");
    const std::string key = detail::trim(std::string_view(line).substr(0, eq));
    std::string value = detail::trim(std::string_view(line).substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (known.at(section).count(key) == 0) {
      throw ConfigError(section, line_no, "unknown key '" + key + "'");
    }
    const std::string full = section + "." + key;
    if (cfg.lines.count(full) != 0) throw ConfigError(section, line_no, "duplicate key '" + key + "'");
    cfg.lines[full] = line_no;
    values[full] = value;
  }

  auto where = [&](const std::string& full) {
    return std::make_pair(full.substr(0, full.find('.')), cfg.line_of(full));
  };
  auto fail = [&](const std::string& full, const std::string& what) -> ConfigError {
    const auto [sec, line] = where(full);
    return ConfigError(sec, line, full.substr(full.find('.') + 1) + ": " + what);
  };
  auto number = [&](const std::string& full, const std::string& v) {
    const auto x = parse_si_number(v);
    if (!x) throw fail(full, "malformed number '" + v + "'");
    return *x;
  };
  auto real = [&](const std::string& full) -> std::optional<double> {
    const auto it = values.find(full);
    if (it == values.end()) return std::nullopt;
    return number(full, it->second);
  };
  auto count = [&](const std::string& full) -> std::optional<std::size_t> {
    const auto it = values.find(full);
    if (it == values.end()) return std::nullopt;
    const std::string& v = it->second;
    if (v.empty() || v.size() > 9 || v.find_first_not_of("0123456789") != std::string::npos) {
      throw fail(full, "expected a non-negative integer, got '" + v + "'");
    }
    return static_cast<std::size_t>(std::stoul(v));
  };
  auto boolean = [&](const std::string& full) -> std::optional<bool> {
    const auto it = values.find(full);
    if (it == values.end()) return std::nullopt;
    if (it->second == "true" || it->second == "yes" || it->second == "1") return true;
    if (it->second == "false" || it->second == "no" || it->second == "0") return false;
    throw fail(full, "expected true or false");
  };
  auto pair = [&](const std::string& full, double& lo, double& hi) {
    const auto it = values.find(full);
    if (it == values.end()) return;
    const auto items = detail::split_list(it->second);
    if (items.size() != 2) throw fail(full, "expected 'low, high'");
    lo = number(full, items[0]);
    hi = number(full, items[1]);
    if (!(lo > 0.0 && hi > lo)) throw fail(full, "bounds must satisfy 0 < low < high");
  };
  auto branch = [&](const std::string& full) {
    BranchSetting s;
    const auto it = values.find(full);
    if (it == values.end()) return s;
    if (it->second == "seed") {
      s.kind = BranchSetting::Kind::seed;
    } else if (it->second == "tuned") {
      s.kind = BranchSetting::Kind::tuned;
    } else {
      s.kind = BranchSetting::Kind::value;
      s.value = number(full, it->second);
    }
    return s;
  };

  // [beam]
  if (auto v = real("beam.L")) cfg.beam.length = *v;
  if (auto v = real("beam.EI")) cfg.beam.bending_stiffness = *v;
  if (auto v = real("beam.rhoA")) cfg.beam.mass_per_length = *v;
  if (auto v = count("beam.M")) cfg.modes = *v;
  if (values.count("beam.zeta")) {
    cfg.beam.modal_damping.clear();
    for (const auto& item : detail::split_list(values["beam.zeta"])) {
      cfg.beam.modal_damping.push_back(number("beam.zeta", item));
    }
  }
  if (cfg.modes < 1 || cfg.modes > kMaxModes) {
    throw fail("beam.M", "mode count must lie in [1, " + std::to_string(kMaxModes) + "]");
  }
  try {
    cfg.beam.validate();
  } catch (const ParameterError& e) {
    throw ConfigError("beam", 0, e.what());
  }
  if (cfg.beam.modal_damping.size() > 1 && cfg.beam.modal_damping.size() != cfg.modes) {
    throw fail("beam.zeta", "needs one value or one per mode");
  }

  // [patches]
  if (auto v = count("patches.N")) cfg.patch_count = *v;
  if (auto v = real("patches.coverage")) cfg.coverage = *v;
  if (auto v = real("patches.Cp")) cfg.capacitance = *v;
  if (auto v = real("patches.gamma")) cfg.coupling = *v;
  if (cfg.patch_count < 1) throw fail("patches.N", "need at least one patch");
  if (!(cfg.coverage > 0.0 && cfg.coverage <= 1.0)) throw fail("patches.coverage", "must lie in (0, 1]");
  if (!(cfg.capacitance > 0.0)) throw fail("patches.Cp", "must be positive");

  // [network]
  if (values.count("network.topology")) cfg.topology = values["network.topology"];
  if (values.count("network.netlist")) {
    cfg.netlist_path = values["network.netlist"];
    if (!values.count("network.topology")) cfg.topology = "netlist";
  }
  if (values.count("network.termination")) {
    const std::string& t = values["network.termination"];
    if (t == "none") cfg.termination = Termination::none;
    else if (t == "both_ends") cfg.termination = Termination::both_ends;
    else throw fail("network.termination", "expected none or both_ends");
  }
  cfg.resistance = branch("network.R");
  cfg.inductance = branch("network.L");
  if (cfg.resistance.kind == BranchSetting::Kind::value && !(cfg.resistance.value >= 0.0)) {
    throw fail("network.R", "must be non-negative");
  }
  if (cfg.inductance.kind == BranchSetting::Kind::value && !(cfg.inductance.value > 0.0)) {
    throw fail("network.L", "must be positive");
  }
  const bool known_topology =
      cfg.topology == "netlist" ||
      std::find(topology_names().begin(), topology_names().end(), cfg.topology) != topology_names().end();
  if (!known_topology) throw fail("network.topology", "unknown topology '" + cfg.topology + "'");
  if (cfg.topology == "netlist" && cfg.netlist_path.empty()) {
    throw ConfigError("network", cfg.line_of("network.topology"),
                      "missing required key 'netlist' for topology = netlist");
  }

  // [optimize]
  if (values.count("optimize.objective")) {
    const std::string& o = values["optimize.objective"];
    if (o == "min-damping-ratio") cfg.tune.objective = Objective::min_damping_ratio;
    else if (o == "hinf") cfg.tune.objective = Objective::hinf;
    else throw fail("optimize.objective", "expected min-damping-ratio or hinf");
  }
  if (auto v = count("optimize.target_mode")) cfg.target_mode = *v;
  if (cfg.target_mode < 1 || cfg.target_mode > cfg.modes) {
    throw fail("optimize.target_mode", "must lie in 1..M");
  }
  pair("optimize.r_bounds", cfg.tune.bounds.r_lo, cfg.tune.bounds.r_hi);
  pair("optimize.l_bounds", cfg.tune.bounds.l_lo, cfg.tune.bounds.l_hi);
  if (auto v = boolean("optimize.per_branch")) cfg.per_branch = *v;
  if (auto v = boolean("optimize.residual_modes")) cfg.residual_modes = *v;
  if (auto v = count("optimize.max_iterations")) cfg.tune.max_iterations = *v;
  if (auto v = count("optimize.hinf_points")) cfg.tune.hinf_points = *v;
  if (cfg.tune.hinf_points < 2) throw fail("optimize.hinf_points", "need at least 2 points");
  if (auto v = real("optimize.participation")) cfg.tune.participation = *v;
  if (!(cfg.tune.participation > 0.0 && cfg.tune.participation <= 0.5)) {
    throw fail("optimize.participation", "must lie in (0, 0.5]");
  }

  // [simulate]
  if (values.count("simulate.dt") && values["simulate.dt"] != "auto") cfg.dt = real("simulate.dt");
  cfg.duration = real("simulate.T");
  if (cfg.dt && !(*cfg.dt > 0.0)) throw fail("simulate.dt", "must be positive");
  if (cfg.duration && !(*cfg.duration > 0.0)) throw fail("simulate.T", "must be positive");
  if (values.count("simulate.initial")) {
    std::istringstream ss(values["simulate.initial"]);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    const std::string full = "simulate.initial";
    if (tok.size() == 2 && tok[0] == "tip") {
      cfg.initial = {InitialCondition::Kind::tip, 1, number(full, tok[1])};
    } else if (tok.size() == 2 && tok[0] == "voltage") {
      cfg.initial = {InitialCondition::Kind::voltage, 1, number(full, tok[1])};
    } else if (tok.size() == 3 && tok[0] == "mode") {
      const auto k = parse_si_number(tok[1]);
      if (!k || *k < 1 || *k > static_cast<double>(cfg.modes) || *k != std::floor(*k)) {
        throw fail(full, "mode index must lie in 1..M");
      }
      cfg.initial = {InitialCondition::Kind::mode, static_cast<std::size_t>(*k), number(full, tok[2])};
    } else {
      throw fail(full, "expected 'tip <m>', 'mode <k> <amplitude>' or 'voltage <V>'");
    }
  }

  // [frf]
  cfg.omega_min = real("frf.omega_min");
  cfg.omega_max = real("frf.omega_max");
  if (auto v = count("frf.points")) cfg.frf_points = *v;
  if (cfg.frf_points < 2) throw fail("frf.points", "need at least 2 points");
  if (values.count("frf.spacing")) {
    const std::string& s = values["frf.spacing"];
    if (s == "log") cfg.frf_log = true;
    else if (s == "linear") cfg.frf_log = false;
    else throw fail("frf.spacing", "expected log or linear");
  }
  if ((cfg.omega_min && !(*cfg.omega_min > 0.0)) ||
      (cfg.omega_min && cfg.omega_max && !(*cfg.omega_max > *cfg.omega_min))) {
    throw fail("frf.omega_min", "grid must satisfy 0 < omega_min < omega_max");
  }

  // [output]
  if (values.count("output.dir")) cfg.output_dir = values["output.dir"];

  // Surface downstream builder preconditions at the config location.
  if (cfg.topology != "netlist") {
    try {
      scenario_netlist(cfg, cfg.topology);
    } catch (const ParameterError& e) {
      throw ConfigError("network", cfg.line_of("network.topology"),
                        "topology '" + cfg.topology + "': " + e.what());
    }
  }
  return cfg;
}

inline ScenarioConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_config(ss.str(), path.parent_path());
}

}  // namespace piezonet
