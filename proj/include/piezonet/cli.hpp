#pragma once

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "piezonet/beam_modal.hpp"
#include "piezonet/circuits.hpp"
#include "piezonet/config.hpp"
#include "piezonet/coupled.hpp"
#include "piezonet/errors.hpp"
#include "piezonet/reduction.hpp"
#include "piezonet/timesim.hpp"
#include "piezonet/transducers.hpp"

namespace piezonet {

/// %.9g, with fixed spellings for non-finite values so output is portable.
inline std::string fmt9(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw ParameterError("cannot write '" + path.string() + "'");
  }

  template <typename... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string cell(double v) { return fmt9(v); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  template <typename I, typename = std::enable_if_t<std::is_integral_v<I>>>
  static std::string cell(I v) { return std::to_string(v); }

  std::ofstream out_;
};

/// Everything the subcommands need for one topology.
struct Scenario {
  ModalBasis basis;
  PatchArray patches;
  Netlist netlist;
  CoupledSystem system;  // at the configured (or resolved) branch values
  std::string topology;
};

inline PatchArray scenario_patches(const ScenarioConfig& cfg) {
  return uniform_layout(cfg.beam, cfg.patch_count, cfg.coverage, cfg.capacitance, cfg.coupling);
}

inline ReductionOptions scenario_reduction(const ScenarioConfig& cfg) {
  ReductionOptions ro;
  ro.residual_modes = cfg.residual_modes;
  return ro;
}

inline TuneOptions scenario_tuning(const ScenarioConfig& cfg) { return cfg.tune; }

/// Builds the model and resolves `seed` / `tuned` branch settings.
inline Scenario build_scenario(const ScenarioConfig& cfg, const std::string& topology) {
  ModalBasis basis(cfg.beam, cfg.modes);
  PatchArray patches = scenario_patches(cfg);
  Netlist net = scenario_netlist(cfg, topology);
  CoupledSystem sys = assemble(basis, patches, net);

  using K = BranchSetting::Kind;
  const bool from_file = topology == "netlist";
  auto resolve = [&](const BranchSetting& s) {
    return s.kind == K::seed || s.kind == K::tuned || (s.kind == K::unset && !from_file);
  };
  const bool need_r = resolve(cfg.resistance), need_l = resolve(cfg.inductance);
  if (need_r || need_l || (from_file && (cfg.resistance.kind == K::value ||
                                         cfg.inductance.kind == K::value))) {
    const NetworkMatrices& nm = sys.network();
    double r = nm.resistance(0);
    double l = nm.inductance(0);
    if (cfg.resistance.kind == K::value) r = cfg.resistance.value;
    if (cfg.inductance.kind == K::value) l = cfg.inductance.value;
    if (need_r || need_l) {
      const ReducedModel rm = reduce(sys, cfg.target_mode, scenario_reduction(cfg));
      TuningPoint p = tuning_seed(rm);
      if (cfg.resistance.kind == K::tuned || cfg.inductance.kind == K::tuned) {
        const TuningResult tr = tune(rm, scenario_tuning(cfg));
        if (cfg.resistance.kind == K::tuned) p.resistance = tr.resistance;
        if (cfg.inductance.kind == K::tuned) p.inductance = tr.inductance;
      }
      if (need_r) r = p.resistance;
      if (need_l) l = p.inductance;
    }
    sys = sys.rescaled(r, l);
  }
  return {std::move(basis), std::move(patches), std::move(net), std::move(sys), topology};
}

struct CommandContext {
  ScenarioConfig config;
  std::string topology;
  std::filesystem::path out_dir;
  std::ostream& out;
  std::ostream& err;
};

inline std::filesystem::path output_file(const CommandContext& ctx, const std::string& name) {
  std::filesystem::create_directories(ctx.out_dir);
  return ctx.out_dir / name;
}

// ---------------------------------------------------------------------------
// Subcommands

inline void command_modes(CommandContext& ctx) {
  const ModalBasis basis(ctx.config.beam, ctx.config.modes);
  const double length = ctx.config.beam.length;
  CsvWriter csv(output_file(ctx, "modes.csv"));
  csv.row("mode", "betaL", "omega_rad_s", "freq_hz", "tip_shape", "tip_slope", "damping_ratio");
  for (std::size_t k = 0; k < basis.size(); ++k) {
    csv.row(k + 1, basis.wavenumbers()[k] * length, basis.omega(k),
            basis.omega(k) / (2.0 * std::numbers::pi), basis.eval(k, length), basis.eval(k, length, 1),
            basis.damping(k));
    ctx.out << "mode " << k + 1 << ": omega = " << fmt9(basis.omega(k)) << " rad/s\n";
  }
}

inline void write_spectrum(const std::filesystem::path& path, const EigenSolution& es) {
  CsvWriter csv(path);
  csv.row("re", "im", "freq_rad_s", "damping_ratio", "tag");
  for (const auto& e : es.entries) {
    csv.row(e.value.real(), e.value.imag(), e.frequency, e.damping_ratio, to_string(e.tag));
  }
}

inline void command_eig(CommandContext& ctx) {
  const Scenario sc = build_scenario(ctx.config, ctx.topology);
  const EigenSolution es = eigen(sc.system);
  write_spectrum(output_file(ctx, "eig.csv"), es);
  ctx.out << "topology " << sc.topology << ": " << es.entries.size() << " eigenvalues, "
          << es.count(ModeTag::mechanical) << " mechanical, " << es.count(ModeTag::electrical)
          << " electrical, " << es.count(ModeTag::zero) << " zero\n";
  ctx.out << "max Re(lambda) = " << fmt9(es.max_real_part()) << "\n";
}

inline std::vector<double> frf_grid(const ScenarioConfig& cfg, const ModalBasis& basis) {
  const double lo = cfg.omega_min.value_or(0.1 * basis.omega(0));
  const double hi = cfg.omega_max.value_or(1.2 * basis.omega(std::min<std::size_t>(2, basis.size() - 1)));
  if (!(lo > 0.0 && hi > lo)) throw ParameterError("frequency grid must satisfy 0 < omega_min < omega_max");
  return cfg.frf_log ? log_grid(lo, hi, cfg.frf_points) : linear_grid(lo, hi, cfg.frf_points);
}

inline void command_frf(CommandContext& ctx) {
  const Scenario sc = build_scenario(ctx.config, ctx.topology);
  const FrfTable table = frf(sc.system, frf_grid(ctx.config, sc.basis));
  CsvWriter csv(output_file(ctx, "frf.csv"));
  csv.row("omega_rad_s", "mag_m_per_N", "phase_rad");
  double peak = 0.0, at = 0.0;
  for (const auto& p : table) {
    if (p.infinite) {
      csv.row(p.omega, std::numeric_limits<double>::infinity(), std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    const double mag = std::abs(p.value);
    csv.row(p.omega, mag, std::arg(p.value));
    if (mag > peak) {
      peak = mag;
      at = p.omega;
    }
  }
  ctx.out << "topology " << sc.topology << ": " << table.size() << " points, peak |G| = " << fmt9(peak)
          << " m/N at " << fmt9(at) << " rad/s\n";
}

inline void write_starts(CsvWriter& csv, const std::string& stage, const TuningResult& tr) {
  for (std::size_t i = 0; i < tr.starts.size(); ++i) {
    const StartRecord& s = tr.starts[i];
    csv.row(stage, i + 1, s.start.resistance, s.start.inductance, s.end.resistance, s.end.inductance,
            s.objective, s.iterations, s.converged ? 1 : 0);
  }
}

inline void command_optimize(CommandContext& ctx) {
  const ScenarioConfig& cfg = ctx.config;
  const Scenario sc = build_scenario(cfg, ctx.topology);
  const TuneOptions opts = scenario_tuning(cfg);
  const ReducedModel rm = reduce(sc.system, cfg.target_mode, scenario_reduction(cfg));
  const TuningResult tr = tune(rm, opts);
  const ValidationReport rep = validate_reduction(sc.system, rm, tr, opts);
  const bool converged = tr.converged && rep.retuned.converged;

  {
    CsvWriter csv(output_file(ctx, "trace.csv"));
    csv.row("stage", "start", "R_start", "L_start", "R_end", "L_end", "objective", "iterations",
            "converged");
    write_starts(csv, "reduced", tr);
    write_starts(csv, "full", rep.retuned);
  }
  {
    CsvWriter csv(output_file(ctx, "tuning.csv"));
    csv.row("topology", "objective", "target_mode", "kappa", "R_seed", "L_seed", "R_opt", "L_opt",
            "reduced_objective", "full_objective", "R_full", "L_full", "retuned_objective", "pole_error",
            "retune_gap", "converged");
    const TuningPoint seed = tuning_seed(rm);
    csv.row(sc.topology, to_string(tr.kind), cfg.target_mode, rm.kappa, seed.resistance, seed.inductance,
            tr.resistance, tr.inductance, rep.reduced_objective, rep.full_objective,
            rep.retuned.resistance, rep.retuned.inductance, rep.retuned_objective, rep.pole_error,
            rep.retune_gap, converged ? 1 : 0);
  }
  {
    CsvWriter csv(output_file(ctx, "validation.csv"));
    csv.row("mode", "open_freq_rad_s", "coupled_freq_rad_s", "damping_ratio");
    for (const ModeRow& m : rep.modes) csv.row(m.mode, m.open_frequency, m.frequency, m.damping_ratio);
  }

  ctx.out << "topology " << sc.topology << ", objective " << to_string(tr.kind) << ", target mode "
          << cfg.target_mode << "\n"
          << "kappa = " << fmt9(rm.kappa) << "\n"
          << "R_opt = " << fmt9(tr.resistance) << " ohm, L_opt = " << fmt9(tr.inductance) << " H\n"
          << "reduced objective = " << fmt9(rep.reduced_objective)
          << ", full objective = " << fmt9(rep.full_objective)
          << ", full re-tuned = " << fmt9(rep.retuned_objective) << "\n"
          << "pole error = " << fmt9(rep.pole_error) << ", re-tune gap = " << fmt9(rep.retune_gap) << "\n";

  if (cfg.per_branch) {
    const PerBranchResult pb = tune_per_branch(sc.system, cfg.target_mode, rep.retuned, opts);
    CsvWriter csv(output_file(ctx, "per_branch.csv"));
    csv.row("branch", "R", "L");
    for (Eigen::Index b = 0; b < pb.resistance.size(); ++b) {
      csv.row(sc.system.network().branch_names[static_cast<std::size_t>(b)], pb.resistance(b),
              pb.inductance(b));
    }
    ctx.out << "per-branch objective = " << fmt9(pb.objective) << " (uniform " << fmt9(pb.start_objective)
            << ")\n";
    if (!pb.converged) ctx.out << "warning: per-branch optimization did not converge\n";
  }
  if (!converged) ctx.out << "warning: optimization did not converge\n";
}

inline Eigen::VectorXd initial_state(const ScenarioConfig& cfg, const CoupledSystem& sys) {
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(sys.size());
  const InitialCondition& ic = cfg.initial;
  switch (ic.kind) {
    case InitialCondition::Kind::tip:
      x0(0) = ic.amplitude / sys.basis().eval(0, sys.basis().beam().length);
      break;
    case InitialCondition::Kind::mode:
      x0(static_cast<Eigen::Index>(ic.mode - 1)) = ic.amplitude;
      break;
    case InitialCondition::Kind::voltage:
      x0.segment(2 * sys.modes(), sys.nodes()).setConstant(ic.amplitude);
      break;
  }
  return x0;
}

inline void command_simulate(CommandContext& ctx) {
  const ScenarioConfig& cfg = ctx.config;
  const Scenario sc = build_scenario(cfg, ctx.topology);
  const double period = 2.0 * std::numbers::pi / sc.basis.omega(0);
  const double dt = cfg.dt.value_or(std::min(period / 200.0, max_time_step(sc.system)));
  const double duration = cfg.duration.value_or(20.0 * period);
  const Trajectory traj = integrate(sc.system, initial_state(cfg, sc.system), dt, duration);
  const std::vector<double> tip = output_history(sc.system, traj);
  {
    CsvWriter csv(output_file(ctx, "trajectory.csv"));
    csv.row("t_s", "tip_m", "energy_J", "dissipation_W");
    for (std::size_t s = 0; s < traj.samples(); ++s) {
      const EnergyBalance eb = total_energy(sc.system, traj.states.col(static_cast<Eigen::Index>(s)));
      csv.row(traj.times[s], tip[s], eb.energy, eb.dissipation);
    }
  }
  ctx.out << "topology " << sc.topology << ": " << traj.samples() << " samples, dt = " << fmt9(dt)
          << " s\n";
  ctx.out << "energy_residual " << fmt9(energy_residual(sc.system, traj)) << "\n";
}

struct ComparisonRow {
  std::string topology;
  ReducedModel reduced;
  TuningResult tuning;
  ValidationReport validation;
  double hinf_peak = 0.0;
  double min_damping = 0.0;
};

inline ComparisonRow compare_topology(const ScenarioConfig& cfg, const std::string& topology) {
  ScenarioConfig c = cfg;
  c.resistance = {};
  c.inductance = {};
  const Scenario sc = build_scenario(c, topology);
  const TuneOptions opts = scenario_tuning(cfg);
  ComparisonRow row;
  row.topology = topology;
  row.reduced = reduce(sc.system, cfg.target_mode, scenario_reduction(cfg));
  row.tuning = tune(row.reduced, opts);
  row.validation = validate_reduction(sc.system, row.reduced, row.tuning, opts);

  TuneOptions other = opts;
  other.objective = Objective::hinf;
  row.hinf_peak = -make_objective(sc.system, cfg.target_mode, other)(row.tuning.resistance,
                                                                     row.tuning.inductance);
  other.objective = Objective::min_damping_ratio;
  row.min_damping = make_objective(sc.system, cfg.target_mode, other)(row.tuning.resistance,
                                                                      row.tuning.inductance);
  return row;
}

inline void command_compare(CommandContext& ctx) {
  std::vector<ComparisonRow> rows;
  for (const std::string& topology : topology_names()) rows.push_back(compare_topology(ctx.config, topology));
  CsvWriter csv(output_file(ctx, "compare.csv"));
  csv.row("topology", "kappa", "R_opt", "L_opt", "reduced_objective", "full_objective", "pole_error",
          "hinf_peak", "min_damping_ratio", "retune_gap", "converged");
  bool all_converged = true;
  for (const auto& r : rows) {
    const bool converged = r.tuning.converged && r.validation.retuned.converged;
    all_converged = all_converged && converged;
    csv.row(r.topology, r.reduced.kappa, r.tuning.resistance, r.tuning.inductance,
            r.validation.reduced_objective, r.validation.full_objective, r.validation.pole_error,
            r.hinf_peak, r.min_damping, r.validation.retune_gap, converged ? 1 : 0);
    ctx.out << r.topology << ": kappa " << fmt9(r.reduced.kappa) << ", min damping ratio "
            << fmt9(r.min_damping) << ", hinf peak " << fmt9(r.hinf_peak) << " m/N\n";
  }
  if (!all_converged) ctx.out << "warning: optimization did not converge for every topology\n";
}

// ---------------------------------------------------------------------------

/// Parses argv, runs one subcommand; 0 success, 1 invalid input, 2 numerical failure.
inline int run_command(int argc, const char* const* argv, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
  CLI::App app{"Piezoelectric shunt network analysis"};
  app.require_subcommand(1);
  std::string config_path, out_dir, topology, netlist;
  app.add_option("--config", config_path, "scenario file (defaults when omitted)");
  app.add_option("--out", out_dir, "output directory (overrides [output] dir)");
  app.add_option("--topology", topology, "single_shunt, multi_shunt, transmission_line or netlist");
  app.add_option("--netlist", netlist, "netlist file; implies --topology netlist");
  const std::vector<std::pair<std::string, std::string>> commands{
      {"modes", "cantilever modal table"},
      {"eig", "coupled eigenvalues"},
      {"frf", "tip force to tip displacement response"},
      {"optimize", "tune R and L on the reduced model and validate"},
      {"simulate", "free response by time integration"},
      {"compare", "tune and validate all three topologies"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    CommandContext ctx{config_path.empty() ? load_config("") : load_config_file(config_path), "", "", out,
                       err};
    ctx.topology = ctx.config.topology;
    if (!netlist.empty()) {
      ctx.config.netlist_path = std::filesystem::absolute(netlist).string();
      ctx.topology = "netlist";
    }
    if (!topology.empty()) ctx.topology = topology;
    if (ctx.topology == "netlist" && ctx.config.netlist_path.empty()) {
      throw ParameterError("topology netlist needs --netlist or [network] netlist");
    }
    ctx.out_dir = out_dir.empty() ? std::filesystem::path(ctx.config.output_dir) : std::filesystem::path(out_dir);

    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "modes") command_modes(ctx);
    else if (name == "eig") command_eig(ctx);
    else if (name == "frf") command_frf(ctx);
    else if (name == "optimize") command_optimize(ctx);
    else if (name == "simulate") command_simulate(ctx);
    else command_compare(ctx);
    return 0;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "numerical error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace piezonet
