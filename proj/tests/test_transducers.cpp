#include <gtest/gtest.h>

#include "oracles.hpp"
#include "piezonet/transducers.hpp"

using namespace piezonet;

TEST(Layout, UniformCentredCells) {
  const PatchArray pa = uniform_layout(BeamSpec{}, 5, 0.9, 100e-9, 1e-4);
  ASSERT_EQ(pa.patches.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_NEAR(pa.patches[i].start, 0.2 * i + 0.01, 1e-15);
    EXPECT_NEAR(pa.patches[i].end, 0.2 * (i + 1) - 0.01, 1e-15);
    EXPECT_DOUBLE_EQ(pa.patches[i].capacitance, 100e-9);
  }
}

TEST(Layout, FullCoverageTouches) {
  const PatchArray pa = uniform_layout(BeamSpec{}, 4, 1.0, 1e-9, 1.0);
  EXPECT_DOUBLE_EQ(pa.patches.front().start, 0.0);
  EXPECT_DOUBLE_EQ(pa.patches.back().end, 1.0);
  EXPECT_NO_THROW(pa.validate(1.0));
}

TEST(Layout, RejectsBadInput) {
  EXPECT_THROW(uniform_layout(BeamSpec{}, 0, 0.9, 1e-9, 1.0), ParameterError);
  EXPECT_THROW(uniform_layout(BeamSpec{}, 3, 0.0, 1e-9, 1.0), ParameterError);
  EXPECT_THROW(uniform_layout(BeamSpec{}, 3, 1.2, 1e-9, 1.0), ParameterError);
  EXPECT_THROW(uniform_layout(BeamSpec{}, 3, 0.5, 0.0, 1.0), ParameterError);
}

TEST(Patches, ValidateCatchesOverlapAndRange) {
  PatchArray pa;
  pa.patches = {{0.1, 0.4, 1e-9, 1.0}, {0.3, 0.6, 1e-9, 1.0}};
  EXPECT_THROW(pa.validate(1.0), ParameterError);
  pa.patches = {{0.5, 1.2, 1e-9, 1.0}};
  EXPECT_THROW(pa.validate(1.0), ParameterError);
  pa.patches = {{0.5, 0.5, 1e-9, 1.0}};
  EXPECT_THROW(pa.validate(1.0), ParameterError);
}

TEST(Coupling, EndSlopeDifference) {
  BeamSpec b;
  b.length = 0.5;
  const ModalBasis basis(b, 4);
  PatchArray pa;
  pa.patches = {{0.05, 0.2, 1e-8, 2e-3}, {0.25, 0.45, 2e-8, -1e-3}};
  const Eigen::MatrixXd theta = coupling_matrix(basis, pa);
  ASSERT_EQ(theta.rows(), 4);
  ASSERT_EQ(theta.cols(), 2);
  for (std::size_t k = 0; k < 4; ++k) {
    const oracle::Mode md(k + 1, 0.5L, 1.0L);
    for (std::size_t i = 0; i < 2; ++i) {
      const auto& p = pa.patches[i];
      const double expect = p.coupling * static_cast<double>(md.slope(p.end) - md.slope(p.start));
      EXPECT_NEAR(theta(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)), expect,
                  1e-9 * std::max(1.0, std::abs(expect)));
    }
  }
}

TEST(Coupling, ZeroGammaGivesZeroMatrix) {
  const ModalBasis basis(BeamSpec{}, 3);
  const PatchArray pa = uniform_layout(BeamSpec{}, 5, 0.9, 1e-7, 0.0);
  EXPECT_EQ(coupling_matrix(basis, pa).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Coupling, FullCoverageSingleCellIsTipSlope) {
  // One patch over the whole beam sees phi'(L) - phi'(0) = phi'(L).
  const ModalBasis basis(BeamSpec{}, 5);
  const PatchArray pa = uniform_layout(BeamSpec{}, 1, 1.0, 1e-7, 1.0);
  const Eigen::MatrixXd theta = coupling_matrix(basis, pa);
  for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(theta(static_cast<Eigen::Index>(k), 0), basis.eval(k, 1.0, 1), 1e-12);
}

TEST(Capacitance, DiagonalOfPatchValues) {
  PatchArray pa;
  pa.patches = {{0.0, 0.1, 1e-9, 1.0}, {0.2, 0.3, 3e-9, 1.0}};
  const Eigen::MatrixXd c = node_capacitances(pa);
  EXPECT_DOUBLE_EQ(c(0, 0), 1e-9);
  EXPECT_DOUBLE_EQ(c(1, 1), 3e-9);
  EXPECT_DOUBLE_EQ(c(0, 1), 0.0);
}
