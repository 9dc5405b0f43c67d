#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "piezonet/coupled.hpp"
#include "support.hpp"

using namespace piezonet;
using testing_support::kTopologies;
using testing_support::unit_system;

namespace {

oracle::Assembly oracle_for(const CoupledSystem& sys, const Netlist& net) {
  const BeamSpec& b = sys.basis().beam();
  return oracle::assemble(b.length, b.bending_stiffness, b.mass_per_length, b.modal_damping,
                          sys.basis().size(), sys.patches(), net);
}

std::vector<Complex> library_values(const CoupledSystem& sys) { return eigen(sys).values(); }

}  // namespace

TEST(StateMatrix, MatchesDirectAssembly) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const char* topo : kTopologies) {
    BeamSpec beam;
    beam.length = 0.8;
    beam.bending_stiffness = 3.0;
    beam.mass_per_length = 0.5;
    beam.modal_damping = {0.01, 0.02, 0.005};
    const ModalBasis basis(beam, 3);
    const PatchArray pa = uniform_layout(beam, 4, 0.8, 50e-9, 3e-4);
    const Netlist net = testing_support::topology_netlist(topo, 4, 1e3 * (1 + u(rng)), 2.0 + u(rng));
    const CoupledSystem sys = assemble(basis, pa, net);
    const Eigen::MatrixXd ref = oracle_for(sys, net).a;
    const Eigen::MatrixXd a = sys.state_matrix();
    ASSERT_EQ(a.rows(), ref.rows());
    EXPECT_LT((a - ref).cwiseAbs().maxCoeff(), 1e-8 * ref.cwiseAbs().maxCoeff()) << topo;
  }
}

TEST(StateMatrix, EnergyCoordinatesAreSimilar) {
  const CoupledSystem sys = unit_system("transmission_line", 3, 4, 2e-4, 3e4, 1e5, {0.01});
  const Eigen::VectorXd d = sys.energy_scaling();
  const Eigen::MatrixXd back = d.cwiseInverse().asDiagonal() * sys.energy_state_matrix() * d.asDiagonal();
  EXPECT_LT((back - sys.state_matrix()).cwiseAbs().maxCoeff(), 1e-9 * sys.state_matrix().cwiseAbs().maxCoeff());
  // Energy form: skew part plus non-positive diagonal.
  const Eigen::MatrixXd a = sys.energy_state_matrix();
  const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
  EXPECT_LT((sym - Eigen::MatrixXd(sym.diagonal().asDiagonal())).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE(sym.diagonal().maxCoeff(), 0.0);
}

TEST(Eigen, CharacteristicPolynomialOracle) {
  // Random M=2, N=2 systems, eigenvalues through Faddeev-LeVerrier and
  // Durand-Kerner on an independently assembled matrix.
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    BeamSpec beam;
    beam.modal_damping = {0.02 * u(rng), 0.02 * u(rng)};
    const ModalBasis basis(beam, 2);
    PatchArray pa;
    pa.patches = {{0.05, 0.45, (0.5 + u(rng)) * 1e-7, (0.5 + u(rng)) * 2e-4},
                  {0.55, 0.95, (0.5 + u(rng)) * 1e-7, -(0.5 + u(rng)) * 2e-4}};
    const Netlist net = trial % 2 == 0
                            ? build_multi_shunt(2, std::vector<double>{1e4 * u(rng), 1e4 * u(rng)},
                                                std::vector<double>{2e5 * (0.5 + u(rng)), 5e4 * (0.5 + u(rng))})
                            : build_transmission_line(2, 1e4 * u(rng), 1e5 * (0.5 + u(rng)), Termination::both_ends);
    const CoupledSystem sys = assemble(basis, pa, net);
    const auto ref = oracle::eigenvalues(oracle_for(sys, net).a);
    const auto got = library_values(sys);
    ASSERT_EQ(got.size(), ref.size());
    EXPECT_LT(oracle::spectrum_distance(got, ref), 1e-6) << "trial " << trial;
    EXPECT_LT(oracle::spectrum_distance(ref, got), 1e-6) << "trial " << trial;
  }
}

TEST(Eigen, DecouplingReproducesBareSpectra) {
  for (const char* topo : kTopologies) {
    const CoupledSystem sys = unit_system(topo, 5, 5, 0.0, 2e3, 5e4, {0.01, 0.02, 0.0, 0.03, 0.01});
    const EigenSolution es = eigen(sys);
    std::vector<Complex> expect;
    for (std::size_t k = 0; k < 5; ++k) {
      const double w = sys.basis().omega(k), z = sys.basis().damping(k);
      const double wd = w * std::sqrt(1.0 - z * z);
      expect.emplace_back(-z * w, wd);
      expect.emplace_back(-z * w, -wd);
    }
    const std::size_t mech = expect.size();
    // Standalone network: 1 node per patch capacitance group.
    const Netlist net = testing_support::topology_netlist(topo, 5, 2e3, 5e4);
    oracle::Assembly as = oracle::assemble(1.0, 1.0, 1.0, {}, 1, sys.patches(), net);
    const Eigen::Index ne = as.a.rows() - 2;
    const Eigen::MatrixXd elec = as.a.bottomRightCorner(ne, ne);
    for (const auto& e : oracle::balanced_eigenvalues(elec)) expect.push_back(e);

    const auto got = es.values();
    ASSERT_EQ(got.size(), expect.size());
    const double scale = es.max_modulus;
    for (const auto& g : got) {
      double best = INFINITY;
      for (const auto& e : expect) best = std::min(best, std::abs(g - e));
      EXPECT_LT(best, 1e-10 * scale) << topo;
    }
    std::size_t mech_tags = es.count(ModeTag::mechanical);
    EXPECT_EQ(mech_tags, mech) << topo;
    for (const auto& e : es.entries) {
      if (e.tag == ModeTag::mechanical) EXPECT_NEAR(e.mechanical_fraction, 1.0, 1e-12);
      else EXPECT_NEAR(e.mechanical_fraction, 0.0, 1e-12);
    }
  }
}

TEST(Eigen, ConjugateClosureAndOrdering) {
  const CoupledSystem sys = unit_system("multi_shunt", 5, 5, 1e-4, 1e5, 1.5e5, {0.005});
  const EigenSolution es = eigen(sys);
  for (std::size_t i = 1; i < es.entries.size(); ++i) {
    EXPECT_LE(es.entries[i - 1].frequency, es.entries[i].frequency * (1 + 1e-12));
  }
  for (const auto& e : es.entries) {
    double best = INFINITY;
    for (const auto& f : es.entries) best = std::min(best, std::abs(std::conj(e.value) - f.value));
    EXPECT_LT(best, 1e-8 * es.max_modulus);
  }
}

TEST(Eigen, EigenvectorsSatisfyPhysicalEquation) {
  const CoupledSystem sys = unit_system("transmission_line", 4, 5, 1e-4, 5e4, 1e5, {0.01});
  const EigenSolution es = eigen(sys);
  const Eigen::MatrixXcd a = sys.state_matrix().cast<Complex>();
  for (std::size_t j = 0; j < es.entries.size(); ++j) {
    const Eigen::VectorXcd v = es.vectors.col(static_cast<Eigen::Index>(j));
    const double res = (a * v - es.entries[j].value * v).norm() / (a.norm() * v.norm());
    EXPECT_LT(res, 1e-10);
  }
}

TEST(Eigen, CouplingSignFlipLeavesSpectrum) {
  const CoupledSystem a = unit_system("single_shunt", 4, 5, 1.5e-4, 1e5, 1.6e5, {0.01});
  const CoupledSystem b = unit_system("single_shunt", 4, 5, -1.5e-4, 1e5, 1.6e5, {0.01});
  EXPECT_LT(oracle::spectrum_distance(library_values(a), library_values(b)), 1e-10);
}

TEST(Eigen, FloatingLineZeroMode) {
  const CoupledSystem open = unit_system("transmission_line", 5, 5, 1e-4, 1e4, 1e5);
  EXPECT_EQ(eigen(open).count(ModeTag::zero), 1u);
  BeamSpec beam;
  const CoupledSystem closed = assemble(ModalBasis(beam, 5), uniform_layout(beam, 5, 0.9, 1e-7, 1e-4),
                                        build_transmission_line(5, 1e4, 1e5, Termination::both_ends));
  EXPECT_EQ(eigen(closed).count(ModeTag::zero), 0u);
  for (const char* topo : {"single_shunt", "multi_shunt"}) {
    EXPECT_EQ(eigen(unit_system(topo, 5, 5, 1e-4, 1e4, 1e5)).count(ModeTag::zero), 0u) << topo;
  }
}

TEST(Eigen, PassivityRandomDraws) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const char* topo : kTopologies) {
    for (int trial = 0; trial < 20; ++trial) {
      const double r = trial == 0 ? 0.0 : std::pow(10.0, 2.0 + 5.0 * u(rng));
      const double l = std::pow(10.0, 3.0 + 4.0 * u(rng));
      const CoupledSystem sys = unit_system(topo, 5, 5, 1e-4, r, l, {0.002});
      const EigenSolution es = eigen(sys);
      EXPECT_LE(es.max_real_part(), 1e-9 * es.max_modulus) << topo << " R=" << r << " L=" << l;
    }
  }
}

TEST(Energy, IdentityOnRandomStates) {
  std::mt19937 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  for (const char* topo : kTopologies) {
    const Netlist net = testing_support::topology_netlist(topo, 5, 3e4, 1.2e5);
    BeamSpec beam;
    beam.modal_damping = {0.01};
    const CoupledSystem sys = assemble(ModalBasis(beam, 5), uniform_layout(beam, 5, 0.9, 1e-7, 1e-4), net);
    const oracle::Assembly as = oracle_for(sys, net);
    for (int s = 0; s < 50; ++s) {
      Eigen::VectorXd x(sys.size());
      for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = g(rng);
      const EnergyBalance eb = total_energy(sys, x);
      EXPECT_NEAR(eb.energy, oracle::hamiltonian(as, x), 1e-9 * eb.energy);
      EXPECT_NEAR(eb.dissipation, oracle::dissipation(as, x), 1e-9 * std::max(1.0, eb.dissipation));
      const double rate = energy_rate(sys, x);
      EXPECT_NEAR(rate, oracle::hamiltonian_rate(as, x), 1e-8 * std::max(1.0, std::abs(rate)));
      EXPECT_LE(std::abs(rate + eb.dissipation), 1e-8 * std::max(eb.energy, std::pow(sys.basis().omega(0), 2)));
    }
  }
}

TEST(Energy, LosslessIsConservative) {
  const CoupledSystem sys = unit_system("transmission_line", 3, 5, 2e-4, 0.0, 1e5);
  std::mt19937 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd x(sys.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = g(rng);
  EXPECT_EQ(total_energy(sys, x).dissipation, 0.0);
  EXPECT_NEAR(energy_rate(sys, x), 0.0, 1e-9 * total_energy(sys, x).energy);
}

TEST(Frf, StaticComplianceOfShortedShunt) {
  // At DC the inductor shorts the piezo, so the response is the bare beam's
  // modal compliance sum, itself within 0.5% of L^3 / 3EI for five modes.
  const CoupledSystem sys = unit_system("single_shunt", 5, 5, 1e-4, 1e5, 1.6e5);
  const double w0 = 1e-4 * sys.basis().omega(0);
  const Complex g = frf(sys, {w0, 2 * w0})[0].value;
  double series = 0.0;
  for (std::size_t k = 0; k < 5; ++k) series += std::pow(sys.basis().eval(k, 1.0) / sys.basis().omega(k), 2);
  EXPECT_NEAR(g.real(), series, 1e-3 * series);
  EXPECT_NEAR(g.real(), 1.0 / 3.0, 5e-3 / 3.0);
}

TEST(Frf, MatchesDirectSolve) {
  const Netlist net = build_transmission_line(5, 2e4, 1e5);
  BeamSpec beam;
  beam.modal_damping = {0.01};
  const CoupledSystem sys = assemble(ModalBasis(beam, 4), uniform_layout(beam, 5, 0.9, 1e-7, 1e-4), net);
  const oracle::Assembly as = oracle_for(sys, net);
  const Eigen::Index n = as.a.rows();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  Eigen::RowVectorXd c = Eigen::RowVectorXd::Zero(n);
  for (Eigen::Index k = 0; k < 4; ++k) {
    const oracle::Mode md(static_cast<std::size_t>(k + 1), 1.0L, 1.0L);
    b(4 + k) = static_cast<double>(md.value(1.0L));
    c(k) = static_cast<double>(md.value(1.0L));
  }
  for (double w : {0.7, 3.3, 10.0, 22.5, 70.0}) {
    Eigen::MatrixXcd m = -as.a.cast<Complex>();
    m.diagonal().array() += Complex(0.0, w);
    const Complex ref = (c.cast<Complex>() * m.fullPivLu().solve(b.cast<Complex>()))(0);
    const Complex got = frf(sys, {w, 2 * w})[0].value;
    EXPECT_LT(std::abs(got - ref), 1e-8 * std::abs(ref)) << w;
  }
}

TEST(Frf, UndampedResonanceIsInfinite) {
  const CoupledSystem sys = unit_system("single_shunt", 1, 1, 0.0, 1.0, 1.0);
  const FrfTable t = frf(sys, {sys.basis().omega(0), 1.0});
  EXPECT_TRUE(t[0].infinite);
  EXPECT_FALSE(t[1].infinite);
}

TEST(Frf, GridContract) {
  const auto g = log_grid(0.1, 10.0, 2000);
  EXPECT_EQ(g.size(), 2000u);
  EXPECT_DOUBLE_EQ(g.front(), 0.1);
  EXPECT_DOUBLE_EQ(g.back(), 10.0);
  EXPECT_THROW(log_grid(0.0, 1.0, 5), ParameterError);
  EXPECT_THROW(linear_grid(1.0, 1.0, 5), ParameterError);
}

TEST(Assembly, RejectsMismatchedNetlist) {
  BeamSpec beam;
  const ModalBasis basis(beam, 2);
  const PatchArray pa = uniform_layout(beam, 3, 0.9, 1e-7, 1e-4);
  EXPECT_THROW(assemble(basis, pa, build_single_shunt(2, 1.0, 1.0)), ParameterError);
}
