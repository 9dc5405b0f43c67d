#pragma once

// Shared test scenarios.

#include <string>

#include "piezonet/circuits.hpp"
#include "piezonet/coupled.hpp"
#include "piezonet/reduction.hpp"
#include "piezonet/transducers.hpp"

namespace testing_support {

using namespace piezonet;

inline Netlist topology_netlist(const std::string& name, std::size_t n, double r, double l,
                                Termination term = Termination::none) {
  if (name == "single_shunt") return build_single_shunt(n, r, l);
  if (name == "multi_shunt") return build_multi_shunt(n, r, l);
  return build_transmission_line(n, r, l, term);
}

inline const char* const kTopologies[] = {"single_shunt", "multi_shunt", "transmission_line"};

/// Unit beam, uniform patches with 90% coverage and 100 nF each.
inline CoupledSystem unit_system(const std::string& topology, std::size_t modes, std::size_t patches,
                                 double gamma, double r = 1e5, double l = 1e5,
                                 std::vector<double> zeta = {}) {
  BeamSpec beam;
  beam.modal_damping = std::move(zeta);
  const ModalBasis basis(beam, modes);
  const PatchArray pa = uniform_layout(beam, patches, 0.9, 100e-9, gamma);
  return assemble(basis, pa, topology_netlist(topology, patches, r, l));
}

/// Coupling coefficient that yields the requested kappa (plain Galerkin
/// kappa is linear in gamma).
inline double gamma_for_kappa(const std::string& topology, std::size_t modes, std::size_t patches,
                              double kappa) {
  ReductionOptions plain;
  plain.residual_modes = false;
  const double k1 = reduce(unit_system(topology, modes, patches, 1.0), 1, plain).kappa;
  return kappa / k1;
}

/// Single patch, single mode, single shunt with kappa = 0.1.
inline CoupledSystem benchmark_system(double r = 1e5, double l = 1e5) {
  static const double gamma = gamma_for_kappa("single_shunt", 1, 1, 0.1);
  return unit_system("single_shunt", 1, 1, gamma, r, l);
}

}  // namespace testing_support
