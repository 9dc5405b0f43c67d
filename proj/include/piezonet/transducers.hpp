#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "piezonet/beam_modal.hpp"
#include "piezonet/errors.hpp"

namespace piezonet {

/// One surface-bonded piezoelectric patch spanning [start, end] on the beam.
struct Patch {
  double start = 0.0;        // m
  double end = 0.0;          // m
  double capacitance = 0.0;  // F
  double coupling = 0.0;     // C/rad, charge per unit relative end rotation
};

/// Ordered, non-overlapping patches. Index 0 is patch 1 in netlists.
struct PatchArray {
  std::vector<Patch> patches;

  std::size_t size() const { return patches.size(); }

  void validate(double beam_length) const {
    if (patches.empty()) throw ParameterError("patch array is empty");
    for (std::size_t i = 0; i < patches.size(); ++i) {
      const Patch& p = patches[i];
      const std::string id = "patch " + std::to_string(i + 1);
      if (!(p.start >= 0.0 && p.start < p.end && p.end <= beam_length)) {
        throw ParameterError(id + " must satisfy 0 <= a < b <= L");
      }
      if (!(p.capacitance > 0.0)) throw ParameterError(id + " capacitance must be positive");
      if (!std::isfinite(p.coupling)) throw ParameterError(id + " coupling must be finite");
      if (i > 0 && patches[i - 1].end > p.start) {
        throw ParameterError(id + " overlaps patch " + std::to_string(i));
      }
    }
  }
};

/// `count` identical patches, each centred in one of `count` equal cells.
/// `coverage` is the total patch length over the beam length.
inline PatchArray uniform_layout(const BeamSpec& beam, std::size_t count, double coverage,
                                 double capacitance, double coupling) {
  beam.validate();
  if (count < 1) throw ParameterError("patch count must be at least 1");
  if (!(coverage > 0.0 && coverage <= 1.0)) {
    throw ParameterError("coverage must lie in (0, 1], got " + std::to_string(coverage));
  }
  if (!(capacitance > 0.0)) throw ParameterError("patch capacitance must be positive");
  const double cell = beam.length / static_cast<double>(count);
  const double inset = 0.5 * (1.0 - coverage);
  PatchArray out;
  out.patches.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double a = (static_cast<double>(i) + inset) * cell;
    const double b = (static_cast<double>(i + 1) - inset) * cell;
    out.patches.push_back({a, std::min(b, beam.length), capacitance, coupling});
  }
  out.validate(beam.length);
  return out;
}

/// Theta(k, i) = gamma_i (phi'_k(b_i) - phi'_k(a_i)); M x N.
inline Eigen::MatrixXd coupling_matrix(const ModalBasis& basis, const PatchArray& patches) {
  patches.validate(basis.length());
  const auto m = static_cast<Eigen::Index>(basis.size());
  const auto n = static_cast<Eigen::Index>(patches.size());
  Eigen::MatrixXd theta(m, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Patch& p = patches.patches[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < m; ++k) {
      const auto mode = static_cast<std::size_t>(k);
      theta(k, i) = p.coupling * (basis.eval(mode, p.end, 1) - basis.eval(mode, p.start, 1));
    }
  }
  return theta;
}

inline Eigen::MatrixXd node_capacitances(const PatchArray& patches) {
  Eigen::VectorXd c(static_cast<Eigen::Index>(patches.size()));
  for (std::size_t i = 0; i < patches.size(); ++i) {
    c(static_cast<Eigen::Index>(i)) = patches.patches[i].capacitance;
  }
  return c.asDiagonal();
}

}  // namespace piezonet
