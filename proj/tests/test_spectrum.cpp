#include <gtest/gtest.h>

#include "revanneal/dynamics.hpp"
#include "revanneal/spectrum.hpp"

using namespace revanneal;

TEST(Spectrum, CostHamiltonianGroundEnergy) {
  const ModelParams params = ModelParams::from_fraction(3, 10, 0.8, 1.0);
  const HamiltonianTerms t = build_terms(build_basis(params), params);
  const EigenSystem sys = eigensystem(assemble(t, 1.0, 0.0, 1.0), 1, true);
  EXPECT_NEAR(sys.values[0], -10.0, 1e-12);
  EXPECT_NEAR(std::abs((*sys.vectors)(0, 0)), 1.0, 1e-12);
}

TEST(Spectrum, InitializationHamiltonianGroundState) {
  const ModelParams params = ModelParams::from_fraction(3, 10, 0.8, 1.0);
  const SectorBasis b = build_basis(params);
  const HamiltonianTerms t = build_terms(b, params);
  const EigenSystem sys = eigensystem(assemble(t, 0.0, 0.0, 1.0), 2, true);
  EXPECT_NEAR(sys.values[0], -10.0, 1e-12);
  EXPECT_NEAR(std::abs((*sys.vectors)(static_cast<Eigen::Index>(b.initial_index()), 0)), 1.0, 1e-12);
  EXPECT_NEAR(sys.values[1], -8.0, 1e-12);
}

TEST(Spectrum, TransverseGroundEnergyIsMinusN) {
  for (int n : {4, 7, 10}) {
    const SectorBasis b(n, n - n / 2, n / 2);
    const HamiltonianTerms t = build_terms(b, 3);
    const EigenSystem sys = eigensystem(assemble(t, 0.0, 1.0, 1.0), 1, true);
    EXPECT_NEAR(sys.values[0], -static_cast<double>(n), 1e-10);
    const StateVector g = transverse_ground_state(b);
    const Eigen::VectorXcd v = sys.vectors->col(0).cast<Complex>();
    EXPECT_NEAR(std::norm(v.dot(g.amplitudes)), 1.0, 1e-10);
  }
}

TEST(Spectrum, BandedSolverMatchesDense) {
  for (const auto& [n, n1] : {std::pair{20, 16}, std::pair{30, 30}, std::pair{25, 13}}) {
    const SectorBasis b(n, n1, n - n1);
    const HamiltonianTerms t = build_terms(b, 3);
    for (double s : {0.1, 0.5, 0.9}) {
      const SectorHamiltonian h(t, s, 0.6, 1.4);
      const Eigen::VectorXd banded = lowest_eigenvalues(h, 3);
      const EigenSystem dense = eigensystem(h.dense(), 3, false);
      EXPECT_LT((banded - dense.values).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(Spectrum, VariationalBound) {
  const SectorBasis b(12, 9, 3);
  const HamiltonianTerms t = build_terms(b, 3);
  const OperatorMatrix h = assemble(t, 0.4, 0.4, 1.0);
  const double e0 = eigensystem(h, 1, false).values[0];
  for (std::size_t k = 0; k < b.dimension(); ++k) {
    EXPECT_GE(h(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)), e0 - 1e-12);
  }
}

TEST(Spectrum, OccupationsSumToOneOverFullSpectrum) {
  const SectorBasis b(8, 6, 2);
  const HamiltonianTerms t = build_terms(b, 3);
  const OperatorMatrix h = assemble(t, 0.3, 0.7, 1.0);
  const StateVector psi = basis_state(b, b.initial_index());
  const auto occ = instantaneous_occupations(psi, h, b.dimension());
  double total = 0.0;
  for (double o : occ) total += o;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Spectrum, EigensystemRejectsBadK) {
  const OperatorMatrix h = OperatorMatrix::Identity(3, 3);
  EXPECT_THROW(eigensystem(h, 0, false), ConfigError);
  EXPECT_THROW(eigensystem(h, 4, false), ConfigError);
}

TEST(Spectrum, DistinctGapGroupsOnlyWhenAsked) {
  Eigen::VectorXd v(3);
  v << -1.0, -1.0 + 1e-14, 0.5;
  EXPECT_NEAR(distinct_gap(v, 1e-10, false), 1e-14, 1e-15);
  EXPECT_NEAR(distinct_gap(v, 1e-10, true), 1.5, 1e-12);
}

TEST(Spectrum, GapScanFindsInteriorMinimum) {
  const GapScan scan = gap_along_path(ModelParams{3, 20, 20, 1.0}, AnnealPath::qa());
  EXPECT_EQ(scan.samples.size(), 101u);
  EXPECT_GT(scan.s_at_min, 0.2);
  EXPECT_LT(scan.s_at_min, 0.6);
  for (const auto& sample : scan.samples) EXPECT_GE(sample.gap, scan.min_gap - 1e-12);
  EXPECT_TRUE(scan.resolved());
}

TEST(Spectrum, GapScanRejectsCoarseResolution) {
  EXPECT_THROW(gap_along_path(ModelParams{3, 10, 10, 1.0}, AnnealPath::qa(), GapScanOptions{0.02, 1e-13}),
               ConfigError);
}
