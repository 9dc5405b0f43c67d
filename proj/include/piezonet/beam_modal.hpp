#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "piezonet/errors.hpp"

namespace piezonet {

/// Clamped-free Euler-Bernoulli host beam.
struct BeamSpec {
  double length = 1.0;             // m
  double bending_stiffness = 1.0;  // EI, N m^2
  double mass_per_length = 1.0;    // rhoA, kg/m
  // Modal damping ratios. Empty means zero for every mode; a single entry is
  // shared by all modes; otherwise one entry per retained mode.
  std::vector<double> modal_damping;

  double damping(std::size_t mode) const {
    if (modal_damping.empty()) return 0.0;
    if (modal_damping.size() == 1) return modal_damping.front();
    return modal_damping.at(mode);
  }

  void validate() const {
    if (!(length > 0.0)) throw ParameterError("beam length must be positive");
    if (!(bending_stiffness > 0.0)) throw ParameterError("beam EI must be positive");
    if (!(mass_per_length > 0.0)) throw ParameterError("beam rhoA must be positive");
    for (double z : modal_damping) {
      if (!(z >= 0.0 && z < 1.0)) throw ParameterError("modal damping must lie in [0, 1)");
    }
  }
};

inline constexpr std::size_t kMaxModes = 12;

namespace detail {

// cos(x) + 1/cosh(x): the cantilever characteristic function divided by
// cosh(x). Same roots as 1 + cos(x)cosh(x) but O(1) slope at every root.
inline double scaled_characteristic(double x) { return std::cos(x) + 1.0 / std::cosh(x); }

inline double scaled_characteristic_slope(double x) {
  return -std::sin(x) - std::tanh(x) / std::cosh(x);
}

}  // namespace detail

/// First `count` roots of 1 + cos(x) cosh(x) = 0, ascending.
///
/// Root k lies in [(k-1)pi, k pi]; it is refined by safeguarded Newton on the
/// scaled characteristic function, starting from the asymptote (k - 1/2)pi.
inline std::vector<double> solve_wavenumbers(std::size_t count) {
  if (count < 1 || count > kMaxModes) {
    throw ParameterError("mode count must lie in [1, " + std::to_string(kMaxModes) + "], got " +
                         std::to_string(count));
  }
  constexpr double pi = std::numbers::pi;
  std::vector<double> roots;
  roots.reserve(count);
  for (std::size_t k = 1; k <= count; ++k) {
    double lo = (static_cast<double>(k) - 1.0) * pi;
    double hi = static_cast<double>(k) * pi;
    double f_lo = detail::scaled_characteristic(lo);
    double x = (static_cast<double>(k) - 0.5) * pi;
    for (int iter = 0; iter < 100; ++iter) {
      const double f = detail::scaled_characteristic(x);
      if (f == 0.0) break;
      if ((f > 0.0) == (f_lo > 0.0)) {
        lo = x;
        f_lo = f;
      } else {
        hi = x;
      }
      double next = x - f / detail::scaled_characteristic_slope(x);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      const bool done = std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * x;
      x = next;
      if (done) break;
    }
    if (std::abs(detail::scaled_characteristic(x)) > 1e-10) {
      throw NumericalError("wavenumber " + std::to_string(k) + " failed to converge");
    }
    roots.push_back(x);
  }
  return roots;
}

/// Retained cantilever modes with unit modal mass.
class ModalBasis {
 public:
  ModalBasis() = default;

  /// Builds the first `count` modes; normalization by composite Gauss-Legendre
  /// quadrature of rhoA phi^2, cross-checked at double the panel count.
  ModalBasis(BeamSpec beam, std::size_t count) : beam_(std::move(beam)) {
    beam_.validate();
    if (beam_.modal_damping.size() > 1 && beam_.modal_damping.size() != count) {
      throw ParameterError("modal damping list has " + std::to_string(beam_.modal_damping.size()) +
                           " entries for " + std::to_string(count) + " modes");
    }
    wavenumbers_ = solve_wavenumbers(count);
    const double scale = std::sqrt(beam_.bending_stiffness / beam_.mass_per_length) /
                         (beam_.length * beam_.length);
    omega_.resize(count);
    sigma_.resize(count);
    norm_.assign(count, 1.0);
    for (std::size_t k = 0; k < count; ++k) {
      const double bl = wavenumbers_[k];
      omega_[k] = bl * bl * scale;
      const double e = std::exp(-bl);
      sigma_[k] = (1.0 + e * e + 2.0 * std::cos(bl) * e) / (1.0 - e * e + 2.0 * std::sin(bl) * e);
    }
    for (std::size_t k = 0; k < count; ++k) {
      const double coarse = modal_mass_raw(k, kQuadraturePanels);
      const double fine = modal_mass_raw(k, 2 * kQuadraturePanels);
      if (!(std::abs(coarse - fine) <= 1e-10 * fine)) {
        throw NumericalError("modal mass quadrature did not converge for mode " +
                             std::to_string(k + 1));
      }
      norm_[k] = 1.0 / std::sqrt(fine);
    }
    const Eigen::MatrixXd gram = gram_matrix();
    const double residual =
        (gram - Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(count),
                                          static_cast<Eigen::Index>(count)))
            .cwiseAbs()
            .maxCoeff();
    if (residual > 1e-8) {
      throw NumericalError("modal normalization residual " + std::to_string(residual) +
                           " exceeds 1e-8");
    }
  }

  static constexpr std::size_t kQuadraturePanels = 512;

  const BeamSpec& beam() const { return beam_; }
  std::size_t size() const { return omega_.size(); }
  double length() const { return beam_.length; }

  const std::vector<double>& wavenumbers() const { return wavenumbers_; }
  const std::vector<double>& omega() const { return omega_; }
  const std::vector<double>& normalization() const { return norm_; }
  double omega(std::size_t mode) const { return omega_.at(mode); }
  double damping(std::size_t mode) const { return beam_.damping(mode); }

  /// Shape (order 0) or slope (order 1) of zero-based `mode` at `x`.
  double eval(std::size_t mode, double x, int order = 0) const {
    if (mode >= size()) {
      throw ParameterError("mode index " + std::to_string(mode + 1) + " outside 1.." +
                           std::to_string(size()));
    }
    if (!(x >= 0.0 && x <= beam_.length)) {
      throw ParameterError("position " + std::to_string(x) + " outside [0, L]");
    }
    if (order != 0 && order != 1) throw ParameterError("mode evaluation order must be 0 or 1");
    return norm_[mode] * unnormalized(mode, x, order);
  }

  /// phi_k(x_f) for every retained mode: the modal load of a unit point force.
  Eigen::VectorXd force_vector(double x) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(size()));
    for (std::size_t k = 0; k < size(); ++k) out(static_cast<Eigen::Index>(k)) = eval(k, x, 0);
    return out;
  }

  /// Integral of rhoA phi_j phi_k over the beam for every mode pair.
  Eigen::MatrixXd gram_matrix(std::size_t panels = kQuadraturePanels) const {
    const auto m = static_cast<Eigen::Index>(size());
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd phi(m);
    for_each_node(panels, [&](double x, double w) {
      for (Eigen::Index k = 0; k < m; ++k) {
        phi(k) = norm_[static_cast<std::size_t>(k)] * unnormalized(static_cast<std::size_t>(k), x, 0);
      }
      gram.noalias() += (w * beam_.mass_per_length) * phi * phi.transpose();
    });
    return gram;
  }

 private:
  // Clamped-free shape cosh z - cos z - sigma (sinh z - sin z), rewritten so
  // the growing exponentials cancel analytically instead of in floating point.
  double unnormalized(std::size_t k, double x, int order) const {
    const double bl = wavenumbers_[k];
    const double beta = bl / beam_.length;
    const double z = beta * x;
    const double s = sigma_[k];
    const double e = std::exp(-bl);
    const double denom = 1.0 - e * e + 2.0 * std::sin(bl) * e;
    // (1 - sigma) e^z, stable for large bl.
    const double grow = (std::sin(bl) - std::cos(bl) - e) * 2.0 * std::exp(z - bl) / denom;
    const double decay = (1.0 + s) * std::exp(-z);
    if (order == 0) {
      return 0.5 * (grow + decay) - std::cos(z) + s * std::sin(z);
    }
    return beta * (0.5 * (grow - decay) + std::sin(z) + s * std::cos(z));
  }

  double modal_mass_raw(std::size_t k, std::size_t panels) const {
    double sum = 0.0;
    for_each_node(panels, [&](double x, double w) {
      const double v = unnormalized(k, x, 0);
      sum += w * v * v;
    });
    return beam_.mass_per_length * sum;
  }

  // Composite 4-point Gauss-Legendre rule over equal panels on [0, L].
  template <typename Fn>
  void for_each_node(std::size_t panels, Fn&& fn) const {
    static constexpr std::array<double, 4> nodes = {-0.8611363115940526, -0.3399810435848563,
                                                    0.3399810435848563, 0.8611363115940526};
    static constexpr std::array<double, 4> weights = {0.3478548451374538, 0.6521451548625461,
                                                      0.6521451548625461, 0.3478548451374538};
    const double h = beam_.length / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
      const double mid = (static_cast<double>(p) + 0.5) * h;
      for (std::size_t q = 0; q < 4; ++q) fn(mid + 0.5 * h * nodes[q], 0.5 * h * weights[q]);
    }
  }

  BeamSpec beam_;
  std::vector<double> wavenumbers_;
  std::vector<double> omega_;
  std::vector<double> sigma_;
  std::vector<double> norm_;
};

inline ModalBasis modal_basis(const BeamSpec& beam, std::size_t count) { return {beam, count}; }

/// One-based convenience wrapper matching the modal table numbering.
inline double eval_mode(const ModalBasis& basis, std::size_t k, double x, int order) {
  if (k < 1) throw ParameterError("mode index is one-based");
  return basis.eval(k - 1, x, order);
}

inline Eigen::VectorXd modal_force_vector(const ModalBasis& basis, double x) {
  return basis.force_vector(x);
}

inline Eigen::VectorXd modal_force_vector(const ModalBasis& basis) {
  return basis.force_vector(basis.length());
}

}  // namespace piezonet
