#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "piezonet/beam_modal.hpp"
#include "piezonet/circuits.hpp"
#include "piezonet/errors.hpp"
#include "piezonet/transducers.hpp"

namespace piezonet {

using Complex = std::complex<double>;

/// Modal beam + piezo patches + RL network.
///
/// State x = (eta, eta_dot, v, i) of size 2M + P + B:
///
///     eta_ddot = -2 zeta Omega eta_dot - Omega^2 eta + Theta_n v + phi(x_f) u
///     C v_dot  = -Theta_n^T eta_dot - B i
///     L i_dot  =  B^T v - R i
///
/// with Theta_n the coupling matrix summed per attached node. The energy
/// H = |eta_dot|^2/2 + |Omega eta|^2/2 + v'Cv/2 + i'Li/2 then obeys
/// dH/dt = eta_dot' phi u - P_diss.
class CoupledSystem {
 public:
  CoupledSystem(ModalBasis basis, PatchArray patches, NetworkMatrices network)
      : basis_(std::move(basis)), patches_(std::move(patches)), network_(std::move(network)) {
    patches_.validate(basis_.length());
    if (network_.patch_node.size() != patches_.size()) {
      throw ParameterError("network hosts " + std::to_string(network_.patch_node.size()) +
                           " patches but the array has " + std::to_string(patches_.size()));
    }
    theta_ = coupling_matrix(basis_, patches_);
    node_theta_ = Eigen::MatrixXd::Zero(theta_.rows(), network_.node_count());
    capacitance_ = Eigen::VectorXd::Zero(network_.node_count());
    for (std::size_t i = 0; i < patches_.size(); ++i) {
      const auto node = static_cast<Eigen::Index>(network_.patch_node[i]);
      node_theta_.col(node) += theta_.col(static_cast<Eigen::Index>(i));
      capacitance_(node) += patches_.patches[i].capacitance;
    }
    force_position_ = basis_.length();
    output_position_ = basis_.length();
  }

  const ModalBasis& basis() const { return basis_; }
  const PatchArray& patches() const { return patches_; }
  const NetworkMatrices& network() const { return network_; }
  const Eigen::MatrixXd& theta() const { return theta_; }
  const Eigen::MatrixXd& node_theta() const { return node_theta_; }
  const Eigen::VectorXd& node_capacitance() const { return capacitance_; }

  Eigen::Index modes() const { return static_cast<Eigen::Index>(basis_.size()); }
  Eigen::Index nodes() const { return network_.node_count(); }
  Eigen::Index branches() const { return network_.branch_count(); }
  Eigen::Index size() const { return 2 * modes() + nodes() + branches(); }

  double force_position() const { return force_position_; }
  double output_position() const { return output_position_; }

  CoupledSystem& set_force_position(double x) {
    basis_.eval(0, x);  // range check
    force_position_ = x;
    return *this;
  }
  CoupledSystem& set_output_position(double x) {
    basis_.eval(0, x);
    output_position_ = x;
    return *this;
  }

  /// Same system with uniform scaling R_b = r * shape, L_b = l * shape.
  CoupledSystem rescaled(double resistance, double inductance) const {
    CoupledSystem out = *this;
    out.network_ = network_.rescaled(resistance, inductance);
    return out;
  }

  /// Same system with explicit per-branch values.
  CoupledSystem with_branch_values(const Eigen::VectorXd& resistance,
                                   const Eigen::VectorXd& inductance) const {
    if (resistance.size() != branches() || inductance.size() != branches()) {
      throw ParameterError("per-branch value count does not match the network");
    }
    CoupledSystem out = *this;
    out.network_.resistance = resistance;
    out.network_.inductance = inductance;
    return out;
  }

  /// First-order matrix A in physical coordinates.
  Eigen::MatrixXd state_matrix() const {
    const Eigen::Index m = modes(), p = nodes(), b = branches();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(size(), size());
    for (Eigen::Index k = 0; k < m; ++k) {
      const double w = basis_.omega(static_cast<std::size_t>(k));
      const double z = basis_.damping(static_cast<std::size_t>(k));
      a(k, m + k) = 1.0;
      a(m + k, k) = -w * w;
      a(m + k, m + k) = -2.0 * z * w;
    }
    const Eigen::VectorXd c_inv = capacitance_.cwiseInverse();
    const Eigen::VectorXd l_inv = network_.inductance.cwiseInverse();
    a.block(m, 2 * m, m, p) = node_theta_;
    a.block(2 * m, m, p, m) = -(c_inv.asDiagonal() * node_theta_.transpose());
    a.block(2 * m, 2 * m + p, p, b) = -(c_inv.asDiagonal() * network_.incidence);
    a.block(2 * m + p, 2 * m, b, p) = l_inv.asDiagonal() * network_.incidence.transpose();
    a.block(2 * m + p, 2 * m + p, b, b) =
        (-network_.resistance.cwiseProduct(l_inv)).asDiagonal();
    return a;
  }

  /// Tip-force input map b: modal loads into the eta_dot rows.
  Eigen::VectorXd input_vector() const {
    Eigen::VectorXd in = Eigen::VectorXd::Zero(size());
    in.segment(modes(), modes()) = basis_.force_vector(force_position_);
    return in;
  }

  /// Output map c: displacement at the output position.
  Eigen::RowVectorXd output_vector() const {
    Eigen::RowVectorXd out = Eigen::RowVectorXd::Zero(size());
    out.segment(0, modes()) = basis_.force_vector(output_position_).transpose();
    return out;
  }

  /// Diagonal D with y = D x the energy coordinates, in which H = |y|^2 / 2.
  Eigen::VectorXd energy_scaling() const {
    const Eigen::Index m = modes(), p = nodes();
    Eigen::VectorXd d(size());
    for (Eigen::Index k = 0; k < m; ++k) {
      d(k) = basis_.omega(static_cast<std::size_t>(k));
      d(m + k) = 1.0;
    }
    d.segment(2 * m, p) = capacitance_.cwiseSqrt();
    d.segment(2 * m + p, branches()) = network_.inductance.cwiseSqrt();
    return d;
  }

  /// D A D^-1 built directly as (skew-symmetric) - (diagonal dissipation).
  Eigen::MatrixXd energy_state_matrix() const {
    const Eigen::Index m = modes(), p = nodes(), b = branches();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(size(), size());
    for (Eigen::Index k = 0; k < m; ++k) {
      const double w = basis_.omega(static_cast<std::size_t>(k));
      a(k, m + k) = w;
      a(m + k, k) = -w;
      a(m + k, m + k) = -2.0 * basis_.damping(static_cast<std::size_t>(k)) * w;
    }
    const Eigen::VectorXd c_isqrt = capacitance_.cwiseSqrt().cwiseInverse();
    const Eigen::VectorXd l_isqrt = network_.inductance.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd mech_elec = node_theta_ * c_isqrt.asDiagonal();
    const Eigen::MatrixXd node_branch =
        c_isqrt.asDiagonal() * network_.incidence * l_isqrt.asDiagonal();
    a.block(m, 2 * m, m, p) = mech_elec;
    a.block(2 * m, m, p, m) = -mech_elec.transpose();
    a.block(2 * m, 2 * m + p, p, b) = -node_branch;
    a.block(2 * m + p, 2 * m, b, p) = node_branch.transpose();
    a.block(2 * m + p, 2 * m + p, b, b) =
        (-network_.resistance.cwiseProduct(network_.inductance.cwiseInverse())).asDiagonal();
    return a;
  }

 private:
  ModalBasis basis_;
  PatchArray patches_;
  NetworkMatrices network_;
  Eigen::MatrixXd theta_;
  Eigen::MatrixXd node_theta_;
  Eigen::VectorXd capacitance_;
  double force_position_ = 0.0;
  double output_position_ = 0.0;
};

inline CoupledSystem assemble(const ModalBasis& basis, const PatchArray& patches,
                              const Netlist& net) {
  return {basis, patches, network_matrices(net, patches.size())};
}

inline Eigen::MatrixXd state_matrix(const CoupledSystem& sys) { return sys.state_matrix(); }

// ---------------------------------------------------------------------------
// Spectrum

enum class ModeTag { mechanical, electrical, zero };

inline const char* to_string(ModeTag tag) {
  switch (tag) {
    case ModeTag::mechanical: return "mechanical";
    case ModeTag::electrical: return "electrical";
    case ModeTag::zero: return "zero";
  }
  return "?";
}

struct SpectrumEntry {
  Complex value;
  double frequency = 0.0;      // |lambda|, rad/s
  double damping_ratio = 0.0;  // -Re(lambda) / |lambda|; 0 for zero modes
  ModeTag tag = ModeTag::electrical;
  double mechanical_fraction = 0.0;
  Eigen::VectorXd modal_fraction;  // energy share of each mechanical mode
};

struct EigenSolution {
  std::vector<SpectrumEntry> entries;
  Eigen::MatrixXcd vectors;  // columns match entries, physical coordinates
  double max_modulus = 0.0;

  std::size_t count(ModeTag tag) const {
    return static_cast<std::size_t>(std::count_if(
        entries.begin(), entries.end(), [tag](const SpectrumEntry& e) { return e.tag == tag; }));
  }

  std::vector<Complex> values() const {
    std::vector<Complex> out;
    for (const auto& e : entries) out.push_back(e.value);
    return out;
  }

  double max_real_part() const {
    double out = -std::numeric_limits<double>::infinity();
    for (const auto& e : entries) out = std::max(out, e.value.real());
    return out;
  }
};

inline constexpr double kZeroModeTolerance = 1e-9;
inline constexpr double kConjugateTolerance = 1e-8;

/// Eigen-analysis of a matrix in energy coordinates whose first 2M entries
/// are (Omega eta, eta_dot). `to_physical` rescales eigenvectors: x = y / D.
inline EigenSolution analyze_energy_matrix(const Eigen::MatrixXd& a, Eigen::Index mech_modes,
                                           const Eigen::VectorXd& scaling) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, true);
  if (solver.info() != Eigen::Success) {
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const auto& s = svd.singularValues();
    throw NumericalError("eigensolver failed; state matrix condition estimate " +
                         std::to_string(s(0) / s(s.size() - 1)));
  }
  const Eigen::VectorXcd lambda = solver.eigenvalues();
  const Eigen::MatrixXcd vecs = solver.eigenvectors();
  const Eigen::Index n = a.rows();

  double max_mod = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) max_mod = std::max(max_mod, std::abs(lambda(j)));
  const double pair_tol = kConjugateTolerance * std::max(max_mod, 1e-300);

  // Enforce exact conjugate closure: each eigenvalue in the upper half plane
  // is paired with the nearest unmatched one in the lower half plane.
  std::vector<Complex> values(lambda.data(), lambda.data() + n);
  std::vector<bool> matched(static_cast<std::size_t>(n), false);
  for (Eigen::Index j = 0; j < n; ++j) {
    auto& v = values[static_cast<std::size_t>(j)];
    if (std::abs(v.imag()) <= pair_tol) {
      v = {v.real(), 0.0};
      matched[static_cast<std::size_t>(j)] = true;
    }
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto sj = static_cast<std::size_t>(j);
    if (matched[sj] || values[sj].imag() < 0.0) continue;
    std::size_t best = sj;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (matched[i] || values[i].imag() >= 0.0) continue;
      const double d = std::abs(values[i] - std::conj(values[sj]));
      if (d < best_dist) {
        best_dist = d;
        best = i;
      }
    }
    if (best == sj || best_dist > pair_tol) {
      throw NumericalError("eigenvalues are not closed under conjugation");
    }
    const Complex avg = 0.5 * (values[sj] + std::conj(values[best]));
    values[sj] = avg;
    values[best] = std::conj(avg);
    matched[sj] = matched[best] = true;
  }
  if (std::find(matched.begin(), matched.end(), false) != matched.end()) {
    throw NumericalError("eigenvalues are not closed under conjugation");
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index l, Eigen::Index r) {
    const Complex a_ = values[static_cast<std::size_t>(l)];
    const Complex b_ = values[static_cast<std::size_t>(r)];
    if (std::abs(a_) != std::abs(b_)) return std::abs(a_) < std::abs(b_);
    if (a_.imag() != b_.imag()) return a_.imag() < b_.imag();
    return a_.real() < b_.real();
  });

  EigenSolution out;
  out.max_modulus = max_mod;
  out.vectors.resize(n, n);
  for (std::size_t slot = 0; slot < order.size(); ++slot) {
    const Eigen::Index j = order[slot];
    const Complex v = values[static_cast<std::size_t>(j)];
    const Eigen::VectorXcd y = vecs.col(j);
    SpectrumEntry e;
    e.value = v;
    e.frequency = std::abs(v);
    const double total = y.squaredNorm();
    e.modal_fraction.resize(mech_modes);
    for (Eigen::Index k = 0; k < mech_modes; ++k) {
      e.modal_fraction(k) = (std::norm(y(k)) + std::norm(y(mech_modes + k))) / total;
    }
    e.mechanical_fraction = e.modal_fraction.sum();
    if (e.frequency < kZeroModeTolerance * max_mod) {
      e.tag = ModeTag::zero;
      e.damping_ratio = 0.0;
    } else {
      e.tag = e.mechanical_fraction > 0.5 ? ModeTag::mechanical : ModeTag::electrical;
      e.damping_ratio = -v.real() / e.frequency;
    }
    out.vectors.col(static_cast<Eigen::Index>(slot)) = y.cwiseQuotient(scaling.cast<Complex>());
    out.entries.push_back(std::move(e));
  }
  return out;
}

inline EigenSolution eigen(const CoupledSystem& sys) {
  return analyze_energy_matrix(sys.energy_state_matrix(), sys.modes(), sys.energy_scaling());
}

// ---------------------------------------------------------------------------
// Frequency response

struct FrfPoint {
  double omega = 0.0;
  Complex value;
  bool infinite = false;
};

using FrfTable = std::vector<FrfPoint>;

/// c (j omega I - A)^-1 b, or nullopt when j omega sits on an eigenvalue.
inline std::optional<Complex> transfer_value(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                             const Eigen::RowVectorXd& c, double omega) {
  Eigen::MatrixXcd m = -a.cast<Complex>();
  m.diagonal().array() += Complex(0.0, omega);
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  if (!(lu.rcond() > 1e-14)) return std::nullopt;
  const Eigen::VectorXcd z = lu.solve(b.cast<Complex>());
  const Complex g = (c.cast<Complex>() * z)(0);
  if (!std::isfinite(g.real()) || !std::isfinite(g.imag())) return std::nullopt;
  return g;
}

/// Tip displacement per unit tip force at each grid frequency.
inline FrfTable frf(const CoupledSystem& sys, const std::vector<double>& omega_grid) {
  const Eigen::MatrixXd a = sys.energy_state_matrix();
  const Eigen::VectorXd d = sys.energy_scaling();
  const Eigen::VectorXd b = d.cwiseProduct(sys.input_vector());
  const Eigen::RowVectorXd c = sys.output_vector().cwiseQuotient(d.transpose());
  FrfTable out;
  out.reserve(omega_grid.size());
  for (double w : omega_grid) {
    if (!(w > 0.0)) throw ParameterError("frequency grid must be positive");
    FrfPoint pt{w, {}, false};
    if (const auto g = transfer_value(a, b, c, w)) {
      pt.value = *g;
    } else {
      pt.value = {std::numeric_limits<double>::infinity(), 0.0};
      pt.infinite = true;
    }
    out.push_back(pt);
  }
  return out;
}

inline std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi > lo) || count < 2) throw ParameterError("invalid frequency grid");
  std::vector<double> out(count);
  const double step = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = lo * std::exp(step * static_cast<double>(i));
  out.back() = hi;
  return out;
}

inline std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi > lo) || count < 2) throw ParameterError("invalid frequency grid");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Energy

struct EnergyBalance {
  double energy = 0.0;       // J
  double dissipation = 0.0;  // W
};

inline EnergyBalance total_energy(const CoupledSystem& sys, const Eigen::VectorXd& x) {
  if (x.size() != sys.size()) {
    throw ParameterError("state has " + std::to_string(x.size()) + " entries, system needs " +
                         std::to_string(sys.size()));
  }
  const Eigen::Index m = sys.modes(), p = sys.nodes(), b = sys.branches();
  EnergyBalance out;
  for (Eigen::Index k = 0; k < m; ++k) {
    const double w = sys.basis().omega(static_cast<std::size_t>(k));
    const double z = sys.basis().damping(static_cast<std::size_t>(k));
    const double eta = x(k), rate = x(m + k);
    out.energy += 0.5 * (rate * rate + w * w * eta * eta);
    out.dissipation += 2.0 * z * w * rate * rate;
  }
  const auto v = x.segment(2 * m, p);
  const auto i = x.segment(2 * m + p, b);
  out.energy += 0.5 * v.cwiseAbs2().dot(sys.node_capacitance());
  out.energy += 0.5 * i.cwiseAbs2().dot(sys.network().inductance);
  out.dissipation += i.cwiseAbs2().dot(sys.network().resistance);
  return out;
}

/// dH/dt along x_dot = A x, from the gradient of H.
inline double energy_rate(const CoupledSystem& sys, const Eigen::VectorXd& x) {
  const Eigen::Index m = sys.modes(), p = sys.nodes(), b = sys.branches();
  Eigen::VectorXd grad(sys.size());
  for (Eigen::Index k = 0; k < m; ++k) {
    const double w = sys.basis().omega(static_cast<std::size_t>(k));
    grad(k) = w * w * x(k);
    grad(m + k) = x(m + k);
  }
  grad.segment(2 * m, p) = sys.node_capacitance().cwiseProduct(x.segment(2 * m, p));
  grad.segment(2 * m + p, b) = sys.network().inductance.cwiseProduct(x.segment(2 * m + p, b));
  return grad.dot(sys.state_matrix() * x);
}

}  // namespace piezonet
