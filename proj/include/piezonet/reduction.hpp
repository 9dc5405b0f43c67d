#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "piezonet/coupled.hpp"
#include "piezonet/errors.hpp"
#include "piezonet/simplex.hpp"

namespace piezonet {

// ---------------------------------------------------------------------------
// Electrical standing-wave modes

/// Generalized eigenpairs of B S^-1 B^T u = mu C u, u' C u = 1, mu ascending.
/// S is the inductance shape; a network scaled by L has frequencies sqrt(mu / L).
struct ElectricalModeSet {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd shapes;  // columns

  Eigen::Index size() const { return eigenvalues.size(); }
  double frequency(Eigen::Index j, double inductance_scale) const {
    return std::sqrt(std::max(eigenvalues(j), 0.0) / inductance_scale);
  }
};

inline ElectricalModeSet electrical_modes(const NetworkMatrices& nm,
                                          const Eigen::MatrixXd& capacitance) {
  if (capacitance.rows() != nm.node_count() || capacitance.cols() != nm.node_count()) {
    throw ParameterError("capacitance matrix must be square, one row per node");
  }
  if (Eigen::LLT<Eigen::MatrixXd>(capacitance).info() != Eigen::Success) {
    throw NumericalError("node capacitance matrix is not positive definite");
  }
  const Eigen::VectorXd shape = nm.inductance_shape();
  const Eigen::MatrixXd k =
      nm.incidence * shape.cwiseInverse().asDiagonal() * nm.incidence.transpose();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(k, capacitance);
  if (solver.info() != Eigen::Success) throw NumericalError("electrical eigenproblem failed");
  ElectricalModeSet out;
  out.eigenvalues = solver.eigenvalues().cwiseMax(0.0);
  out.shapes = solver.eigenvectors();
  return out;
}

inline ElectricalModeSet electrical_modes(const NetworkMatrices& nm,
                                          const Eigen::VectorXd& capacitance) {
  if (capacitance.size() != nm.node_count() || !(capacitance.array() > 0.0).all()) {
    throw ParameterError("node capacitances must be positive, one per node");
  }
  return electrical_modes(nm, Eigen::MatrixXd(capacitance.asDiagonal()));
}

// ---------------------------------------------------------------------------
// Two-DOF reduction

enum class ModeSelection { max_coupling, lowest_nonzero };

struct ReductionOptions {
  ModeSelection selection = ModeSelection::max_coupling;
  // Fold the non-target mechanical modes into the node capacitance at the
  // target frequency, C + sum_j theta_j theta_j' / (omega_j^2 - omega_k^2),
  // and the zero electrical modes into the beam stiffness.
  bool residual_modes = true;
};

/// Capacitance seen by the network near mechanical mode `k` (zero-based) once
/// every other retained mode is condensed out at omega_k.
inline Eigen::MatrixXd condensed_capacitance(const CoupledSystem& sys, std::size_t k) {
  Eigen::MatrixXd c = sys.node_capacitance().asDiagonal();
  const double wk = sys.basis().omega(k);
  for (std::size_t j = 0; j < sys.basis().size(); ++j) {
    if (j == k) continue;
    const double wj = sys.basis().omega(j);
    const Eigen::VectorXd t = sys.node_theta().row(static_cast<Eigen::Index>(j)).transpose();
    c.noalias() += t * t.transpose() / (wj * wj - wk * wk);
  }
  return c;
}

/// One mechanical mode coupled to one electrical network mode.
///
/// Energy coordinates (Omega eta, eta_dot, v, sqrt(L) i):
///
///     eta_ddot = -2 zeta omega eta_dot - omega^2 eta + alpha v + phi_f u
///     v_dot    = -alpha eta_dot - sqrt(mu) i
///     L i_dot  =  sqrt(mu) v - R i
struct ReducedModel {
  std::size_t target_mode = 1;  // one-based
  double omega = 0.0;
  double zeta = 0.0;
  double mu = 0.0;
  double alpha = 0.0;
  double kappa = 0.0;
  Eigen::VectorXd shape;  // selected C-normalized electrical mode
  double input_gain = 0.0;
  double output_gain = 0.0;
  bool exact = false;

  double electrical_frequency(double inductance) const { return std::sqrt(mu / inductance); }

  Eigen::Matrix4d energy_state_matrix(double resistance, double inductance) const {
    const double we = electrical_frequency(inductance);
    Eigen::Matrix4d a;
    a << 0.0, omega, 0.0, 0.0,
        -omega, -2.0 * zeta * omega, alpha, 0.0,
        0.0, -alpha, 0.0, -we,
        0.0, 0.0, we, -resistance / inductance;
    return a;
  }

  Eigen::Vector4d energy_scaling(double inductance) const {
    return {omega, 1.0, 1.0, std::sqrt(inductance)};
  }

  EigenSolution spectrum(double resistance, double inductance) const {
    return analyze_energy_matrix(energy_state_matrix(resistance, inductance), 1,
                                 energy_scaling(inductance));
  }

  std::optional<Complex> transfer(double resistance, double inductance, double w) const {
    const Eigen::Vector4d b{0.0, input_gain, 0.0, 0.0};
    const Eigen::RowVector4d c{output_gain / omega, 0.0, 0.0, 0.0};
    return transfer_value(energy_state_matrix(resistance, inductance), b, c, w);
  }
};

inline ReducedModel reduce(const CoupledSystem& sys, std::size_t target_mode,
                           const ReductionOptions& opts = {}) {
  if (target_mode < 1 || target_mode > static_cast<std::size_t>(sys.modes())) {
    throw ParameterError("target mode " + std::to_string(target_mode) + " outside 1.." +
                         std::to_string(sys.modes()));
  }
  const std::size_t k = target_mode - 1;
  const ElectricalModeSet em = electrical_modes(sys.network(), sys.node_capacitance());
  const Eigen::VectorXd row = sys.node_theta().row(static_cast<Eigen::Index>(k)).transpose();
  const double mu_max = em.eigenvalues.maxCoeff();
  const double zero_tol = 1e-12 * mu_max;
  const double group_tol = 1e-9 * mu_max;

  ReducedModel rm;
  rm.target_mode = target_mode;
  rm.omega = sys.basis().omega(k);
  rm.zeta = sys.basis().damping(k);
  rm.input_gain = sys.basis().eval(k, sys.force_position());
  rm.output_gain = sys.basis().eval(k, sys.output_position());
  rm.exact = sys.modes() == 1 && sys.nodes() == 1;

  bool found = false;
  double best_alpha = -1.0;
  double open_circuit_stiffness = 0.0;
  for (Eigen::Index j = 0; j < em.size();) {
    Eigen::Index end = j + 1;
    while (end < em.size() && em.eigenvalues(end) - em.eigenvalues(j) <= group_tol) ++end;
    const double mu = em.eigenvalues.segment(j, end - j).mean();
    if (mu <= zero_tol) {
      // Charge-conserving (floating) modes hold their charge at every
      // frequency and stiffen the beam mode like an open circuit.
      const Eigen::VectorXd proj = em.shapes.middleCols(j, end - j).transpose() * row;
      open_circuit_stiffness += proj.squaredNorm();
    } else {
      // Within a degenerate eigenspace the best unit-C-norm shape is the
      // projection of the coupling row onto that space.
      const Eigen::MatrixXd u = em.shapes.middleCols(j, end - j);
      const Eigen::VectorXd proj = u.transpose() * row;
      const double alpha = proj.norm();
      Eigen::VectorXd shape =
          alpha > 0.0 ? Eigen::VectorXd(u * proj / alpha) : Eigen::VectorXd(u.col(0));
      if (alpha > best_alpha + 1e-12 * std::abs(alpha)) {
        best_alpha = alpha;
        rm.mu = mu;
        rm.alpha = alpha;
        rm.shape = std::move(shape);
        found = true;
      }
      if (opts.selection == ModeSelection::lowest_nonzero) break;
    }
    j = end;
  }
  if (!found) throw NumericalError("every electrical mode is a zero mode; reduction impossible");
  if (opts.residual_modes) {
    // Ritz correction on the chosen shape. Re-solving the eigenproblem with
    // the condensed matrix instead would split degenerate groups (identical
    // shunts) and scatter the coupling over near-coincident modes.
    const double c = rm.shape.dot(condensed_capacitance(sys, k) * rm.shape);
    if (!(c > 0.0)) throw NumericalError("condensed capacitance is not positive on the selected mode");
    rm.mu /= c;
    rm.alpha /= std::sqrt(c);
    rm.shape /= std::sqrt(c);
    rm.omega = std::sqrt(rm.omega * rm.omega + open_circuit_stiffness);
  }
  rm.kappa = rm.alpha / rm.omega;
  return rm;
}

struct TuningPoint {
  double resistance = 0.0;
  double inductance = 0.0;
};

/// Frequency-matching starting point: omega_e = omega_m sqrt(1 + kappa^2),
/// electrical damping ratio kappa / sqrt(2).
inline TuningPoint closed_form_seed(const ReducedModel& rm) {
  if (!(rm.kappa > 0.0)) throw ParameterError("closed-form seed needs nonzero coupling");
  const double we = rm.omega * std::sqrt(1.0 + rm.kappa * rm.kappa);
  const double l = rm.mu / (we * we);
  const double r = std::numbers::sqrt2 * rm.kappa * we * l;
  return {r, l};
}

// Seed that also works without coupling: matched frequency, damping ratio 0.1.
inline TuningPoint tuning_seed(const ReducedModel& rm) {
  if (rm.kappa > 0.0) return closed_form_seed(rm);
  const double l = rm.mu / (rm.omega * rm.omega);
  return {0.2 * rm.omega * l, l};
}

// ---------------------------------------------------------------------------
// Objectives

enum class Objective { min_damping_ratio, hinf };

inline const char* to_string(Objective o) {
  return o == Objective::hinf ? "hinf" : "min-damping-ratio";
}

/// Multiplicative box around the seed: R in R0 * [r_lo, r_hi], L in L0 * [l_lo, l_hi].
struct TuningBounds {
  double r_lo = 1e-2, r_hi = 1e6;
  double l_lo = 1e-4, l_hi = 1e4;
};

struct TuneOptions {
  Objective objective = Objective::min_damping_ratio;
  TuningBounds bounds;
  std::size_t max_iterations = 500;
  double tolerance = 1e-6;
  // Eigenvalues count toward the damping objective when at least this share
  // of their energy sits in the target mechanical mode.
  double participation = 0.1;
  std::size_t hinf_points = 400;
};

/// Smallest damping ratio among eigenvalues participating in `mode` (zero-based).
inline double min_damping_ratio(const EigenSolution& es, Eigen::Index mode, double participation) {
  double out = std::numeric_limits<double>::infinity();
  double best_share = -1.0;
  double fallback = 0.0;
  for (const auto& e : es.entries) {
    if (e.tag == ModeTag::zero) continue;
    const double share = e.modal_fraction(mode);
    if (share >= participation) out = std::min(out, e.damping_ratio);
    if (share > best_share) {
      best_share = share;
      fallback = e.damping_ratio;
    }
  }
  return std::isfinite(out) ? out : fallback;
}

/// Peak magnitude of `g` over a log grid on [lo, hi], refined by golden
/// section around the best grid point.
template <typename Gain>
double peak_gain(Gain&& g, double lo, double hi, std::size_t points) {
  const std::vector<double> grid = log_grid(lo, hi, points);
  double best = -1.0;
  std::size_t at = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = g(grid[i]);
    if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
    if (v > best) {
      best = v;
      at = i;
    }
  }
  double a = grid[at == 0 ? 0 : at - 1];
  double b = grid[std::min(at + 1, grid.size() - 1)];
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = g(c), fd = g(d);
  for (int it = 0; it < 60 && (b - a) > 1e-12 * b; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = g(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = g(d);
    }
  }
  for (double v : {fc, fd}) {
    if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
    best = std::max(best, v);
  }
  return best;
}

// Frequency window for the H-infinity objective around zero-based `mode`,
// kept between the geometric means with the neighbouring modes.
inline std::pair<double, double> hinf_band(const ModalBasis& basis, std::size_t mode) {
  const double w = basis.omega(mode);
  double lo = 0.5 * w, hi = 1.5 * w;
  if (mode > 0) lo = std::max(lo, std::sqrt(w * basis.omega(mode - 1)));
  if (mode + 1 < basis.size()) hi = std::min(hi, std::sqrt(w * basis.omega(mode + 1)));
  return {lo, hi};
}

using ObjectiveFn = std::function<double(double resistance, double inductance)>;

inline ObjectiveFn make_objective(const ReducedModel& rm, const TuneOptions& opts) {
  if (opts.objective == Objective::min_damping_ratio) {
    return [rm, p = opts.participation](double r, double l) {
      return min_damping_ratio(rm.spectrum(r, l), 0, p);
    };
  }
  return [rm, n = opts.hinf_points](double r, double l) {
    auto gain = [&](double w) {
      const auto g = rm.transfer(r, l, w);
      return g ? std::abs(*g) : std::numeric_limits<double>::infinity();
    };
    return -peak_gain(gain, 0.5 * rm.omega, 1.5 * rm.omega, n);
  };
}

inline ObjectiveFn make_objective(const CoupledSystem& sys, std::size_t target_mode,
                                  const TuneOptions& opts) {
  const auto mode = static_cast<Eigen::Index>(target_mode - 1);
  if (opts.objective == Objective::min_damping_ratio) {
    return [sys, mode, p = opts.participation](double r, double l) {
      return min_damping_ratio(eigen(sys.rescaled(r, l)), mode, p);
    };
  }
  const auto [lo, hi] = hinf_band(sys.basis(), target_mode - 1);
  return [sys, lo = lo, hi = hi, n = opts.hinf_points](double r, double l) {
    const CoupledSystem s = sys.rescaled(r, l);
    const Eigen::MatrixXd a = s.energy_state_matrix();
    const Eigen::VectorXd d = s.energy_scaling();
    const Eigen::VectorXd b = d.cwiseProduct(s.input_vector());
    const Eigen::RowVectorXd c = s.output_vector().cwiseQuotient(d.transpose());
    auto gain = [&](double w) {
      const auto g = transfer_value(a, b, c, w);
      return g ? std::abs(*g) : std::numeric_limits<double>::infinity();
    };
    return -peak_gain(gain, lo, hi, n);
  };
}

// ---------------------------------------------------------------------------
// Multi-start simplex tuning

struct StartRecord {
  TuningPoint start;
  TuningPoint end;
  double objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

struct TuningResult {
  double resistance = 0.0;
  double inductance = 0.0;
  double objective = 0.0;  // maximized: min damping ratio, or -peak |G|
  Objective kind = Objective::min_damping_ratio;
  double seed_objective = 0.0;
  std::vector<StartRecord> starts;
  std::size_t iterations = 0;
  bool converged = false;
  bool improved = false;
};

/// Maximizes `fn` over (log R, log L) inside the bounds box around `seed`,
/// starting from the seed and from the 3x3 grid of seed * {1/10, 1, 10}.
inline TuningResult tune_objective(const ObjectiveFn& fn, TuningPoint seed, const TuneOptions& opts) {
  if (!(seed.resistance > 0.0 && seed.inductance > 0.0)) {
    throw ParameterError("tuning seed must have positive R and L");
  }
  const TuningBounds& bx = opts.bounds;
  if (!(bx.r_lo > 0.0 && bx.r_lo < bx.r_hi && bx.l_lo > 0.0 && bx.l_lo < bx.l_hi)) {
    throw ParameterError("tuning bounds must be positive, increasing factors");
  }
  const Eigen::Vector2d lo{std::log(seed.resistance * bx.r_lo), std::log(seed.inductance * bx.l_lo)};
  const Eigen::Vector2d hi{std::log(seed.resistance * bx.r_hi), std::log(seed.inductance * bx.l_hi)};
  auto to_point = [&](const Eigen::VectorXd& z) {
    const Eigen::Vector2d c = z.cwiseMax(lo).cwiseMin(hi);
    return TuningPoint{std::exp(c(0)), std::exp(c(1))};
  };
  auto negated = [&](const Eigen::VectorXd& z) {
    const TuningPoint p = to_point(z);
    return -fn(p.resistance, p.inductance);
  };

  std::vector<Eigen::Vector2d> starts{{std::log(seed.resistance), std::log(seed.inductance)}};
  for (double fr : {0.1, 1.0, 10.0}) {
    for (double fl : {0.1, 1.0, 10.0}) {
      if (fr == 1.0 && fl == 1.0) continue;
      starts.emplace_back(std::log(seed.resistance * fr), std::log(seed.inductance * fl));
    }
  }

  TuningResult out;
  out.kind = opts.objective;
  out.seed_objective = fn(seed.resistance, seed.inductance);
  out.objective = -std::numeric_limits<double>::infinity();
  SimplexOptions so;
  so.tolerance = opts.tolerance;
  so.max_iterations = opts.max_iterations;
  for (const Eigen::Vector2d& z0 : starts) {
    const Eigen::Vector2d start = z0.cwiseMax(lo).cwiseMin(hi);
    const SimplexResult sr = nelder_mead(negated, start, so);
    StartRecord rec;
    rec.start = to_point(start);
    rec.end = to_point(sr.point);
    rec.objective = -sr.value;
    rec.iterations = sr.iterations;
    rec.converged = sr.converged;
    out.iterations += sr.iterations;
    out.converged = out.converged || sr.converged;
    const bool better =
        rec.objective > out.objective ||
        (rec.objective == out.objective &&
         std::tie(rec.end.resistance, rec.end.inductance) < std::tie(out.resistance, out.inductance));
    if (better) {
      out.objective = rec.objective;
      out.resistance = rec.end.resistance;
      out.inductance = rec.end.inductance;
    }
    out.starts.push_back(rec);
  }
  out.improved = out.objective > out.seed_objective + 1e-9 * std::abs(out.seed_objective) + 1e-15;
  return out;
}

inline TuningResult tune(const ReducedModel& rm, const TuneOptions& opts = {}) {
  return tune_objective(make_objective(rm, opts), tuning_seed(rm), opts);
}

/// Tunes the uniform (R, L) scaling of the complete model; the seed comes
/// from the two-DOF reduction unless given.
inline TuningResult tune(const CoupledSystem& sys, std::size_t target_mode, const TuneOptions& opts = {},
                         std::optional<TuningPoint> seed = std::nullopt) {
  if (!seed) seed = tuning_seed(reduce(sys, target_mode));
  return tune_objective(make_objective(sys, target_mode, opts), *seed, opts);
}

struct PerBranchResult {
  Eigen::VectorXd resistance;
  Eigen::VectorXd inductance;
  double objective = 0.0;
  double start_objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Independent (R_i, L_i) per branch, 2B parameters in log space, started
/// from a uniform tuning and held inside the same multiplicative box.
inline PerBranchResult tune_per_branch(const CoupledSystem& sys, std::size_t target_mode,
                                       const TuningResult& uniform, const TuneOptions& opts = {}) {
  if (target_mode < 1 || target_mode > static_cast<std::size_t>(sys.modes())) {
    throw ParameterError("target mode outside the retained modes");
  }
  const Eigen::Index nb = sys.branches();
  const Eigen::VectorXd shape = sys.network().inductance_shape();
  Eigen::VectorXd z0(2 * nb), lo(2 * nb), hi(2 * nb);
  for (Eigen::Index b = 0; b < nb; ++b) {
    const double r = uniform.resistance * shape(b), l = uniform.inductance * shape(b);
    z0(b) = std::log(r);
    z0(nb + b) = std::log(l);
    lo(b) = std::log(r * opts.bounds.r_lo);
    hi(b) = std::log(r * opts.bounds.r_hi);
    lo(nb + b) = std::log(l * opts.bounds.l_lo);
    hi(nb + b) = std::log(l * opts.bounds.l_hi);
  }
  const auto mode = static_cast<Eigen::Index>(target_mode - 1);
  const auto [band_lo, band_hi] = hinf_band(sys.basis(), target_mode - 1);
  auto value = [&](const Eigen::VectorXd& z) {
    const Eigen::VectorXd c = z.cwiseMax(lo).cwiseMin(hi);
    const CoupledSystem s =
        sys.with_branch_values(c.head(nb).array().exp(), c.tail(nb).array().exp());
    if (opts.objective == Objective::min_damping_ratio) {
      return min_damping_ratio(eigen(s), mode, opts.participation);
    }
    const FrfTable t = frf(s, log_grid(band_lo, band_hi, opts.hinf_points));
    double peak = 0.0;
    for (const auto& pt : t) peak = std::max(peak, pt.infinite ? std::numeric_limits<double>::infinity() : std::abs(pt.value));
    return -peak;
  };
  SimplexOptions so;
  so.tolerance = opts.tolerance;
  so.max_iterations = opts.max_iterations * static_cast<std::size_t>(2 * nb);
  so.initial_step = 0.1;
  const SimplexResult sr = nelder_mead([&](const Eigen::VectorXd& z) { return -value(z); }, z0, so);
  PerBranchResult out;
  const Eigen::VectorXd c = sr.point.cwiseMax(lo).cwiseMin(hi);
  out.resistance = c.head(nb).array().exp();
  out.inductance = c.tail(nb).array().exp();
  out.objective = -sr.value;
  out.start_objective = value(z0);
  out.iterations = sr.iterations;
  out.converged = sr.converged;
  return out;
}

// ---------------------------------------------------------------------------
// Validation on the complete model

struct ModeRow {
  std::size_t mode = 0;           // one-based mechanical mode
  double open_frequency = 0.0;    // bare-beam omega_k
  double frequency = 0.0;         // coupled pole carrying most of the mode's energy
  double damping_ratio = 0.0;
};

struct ValidationReport {
  double pole_error = 0.0;          // max relative distance reduced pole -> nearest full pole
  double reduced_objective = 0.0;
  double full_objective = 0.0;
  double retuned_objective = 0.0;
  double retune_gap = 0.0;          // (retuned - full) / |retuned|
  TuningResult retuned;
  std::vector<ModeRow> modes;
};

/// Applies a reduced-model tuning to the complete model and measures how
/// well the reduction predicted it.
inline ValidationReport validate_reduction(const CoupledSystem& sys, const ReducedModel& rm,
                                           const TuningResult& tr, const TuneOptions& opts = {}) {
  ValidationReport rep;
  TuneOptions o = opts;
  o.objective = tr.kind;
  const CoupledSystem tuned = sys.rescaled(tr.resistance, tr.inductance);
  const EigenSolution full = eigen(tuned);
  const EigenSolution reduced = rm.spectrum(tr.resistance, tr.inductance);

  for (const auto& r : reduced.entries) {
    if (r.value.imag() <= 0.0) continue;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : full.entries) best = std::min(best, std::abs(f.value - r.value));
    rep.pole_error = std::max(rep.pole_error, best / std::abs(r.value));
  }

  rep.reduced_objective = make_objective(rm, o)(tr.resistance, tr.inductance);
  const ObjectiveFn full_fn = make_objective(sys, rm.target_mode, o);
  rep.full_objective = full_fn(tr.resistance, tr.inductance);
  rep.retuned = tune_objective(full_fn, {tr.resistance, tr.inductance}, o);
  rep.retuned_objective = std::max(rep.retuned.objective, rep.full_objective);
  rep.retune_gap = (rep.retuned_objective - rep.full_objective) /
                   std::max(std::abs(rep.retuned_objective), 1e-300);

  const std::size_t rows = std::min<std::size_t>(3, sys.basis().size());
  for (std::size_t k = 0; k < rows; ++k) {
    ModeRow row;
    row.mode = k + 1;
    row.open_frequency = sys.basis().omega(k);
    double best_share = -1.0;
    for (const auto& e : full.entries) {
      if (e.tag == ModeTag::zero || e.value.imag() < 0.0) continue;
      const double share = e.modal_fraction(static_cast<Eigen::Index>(k));
      if (share > best_share) {
        best_share = share;
        row.frequency = e.frequency;
        row.damping_ratio = e.damping_ratio;
      }
    }
    rep.modes.push_back(row);
  }
  return rep;
}

}  // namespace piezonet
