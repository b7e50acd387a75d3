#include <gtest/gtest.h>

#include "revanneal/dynamics.hpp"
#include "revanneal/ira.hpp"

using namespace revanneal;

TEST(Ira, SpinWeightsSumToOne) {
  for (int n = 1; n <= 30; ++n) {
    for (int k = 0; k <= n; ++k) {
      double total = 0.0;
      for (const auto& [two_s, w] : detail::spin_components(n, k)) {
        EXPECT_GE(w, 0.0);
        total += w;
      }
      EXPECT_NEAR(total, 1.0, 1e-12) << "n=" << n << " k=" << k;
    }
  }
  // two spins, one up: singlet and triplet with equal weight
  EXPECT_NEAR(detail::spin_weight(2, 1, 0), 0.5, 1e-15);
  EXPECT_NEAR(detail::spin_weight(2, 1, 2), 0.5, 1e-15);
}

TEST(Ira, CycleParamsAllowAnyPartition) {
  EXPECT_EQ(cycle_params(3, 10, 0.3).n_up, 3);
  EXPECT_EQ(cycle_params(3, 10, 0.0).n_up, 0);
  EXPECT_THROW(cycle_params(3, 10, 0.35), ConfigError);
  EXPECT_THROW(cycle_params(3, 10, 1.2), ConfigError);
  EXPECT_THROW((CycleSpec{10.0, 0.0, 1}.validate()), ConfigError);
}

TEST(Ira, NoQuantumFluctuationsAtSMinOne) {
  const ModelParams params = cycle_params(3, 12, 0.5);
  const SectorBasis b = cycle_basis(params);
  for (std::size_t i = 0; i < b.dimension(); i += 5) {
    const Eigen::VectorXd p = single_cycle(i, CycleSpec{10.0, 1.0, 1}, params);
    EXPECT_NEAR(p[static_cast<Eigen::Index>(i)], 1.0, 1e-12);
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
  }
}

TEST(Ira, TransitionMatrixIsColumnStochastic) {
  const ModelParams params = cycle_params(3, 16, 0.75);
  const TransitionMatrix tm = transition_matrix(CycleSpec{10.0, 0.4, 1}, params);
  EXPECT_GE(tm.entries.minCoeff(), -1e-12);
  for (Eigen::Index i = 0; i < tm.entries.cols(); ++i) EXPECT_NEAR(tm.entries.col(i).sum(), 1.0, 1e-8);
}

TEST(Ira, MarkovConsistency) {
  const ModelParams params = cycle_params(3, 12, 0.5);
  const TransitionMatrix tm = transition_matrix(CycleSpec{8.0, 0.4, 1}, params);
  Eigen::VectorXd pi0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(tm.dimension()));
  pi0[3] = 1.0;
  const Eigen::VectorXd two = iterate(tm, pi0, 2);
  EXPECT_LT((two - tm.entries * tm.entries * pi0).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((iterate(tm, pi0, 0) - pi0).norm(), 1e-15);
  EXPECT_THROW(iterate(tm, pi0, -1), ConfigError);
}

TEST(Ira, EnergyGroupsAndAggregation) {
  const ModelParams params = cycle_params(3, 10, 0.6);
  const SectorBasis b = cycle_basis(params);
  std::vector<double> energies;
  const auto groups = energy_groups(b, 3, &energies);
  // one level per total up-count
  ASSERT_EQ(groups.size(), 11u);
  EXPECT_NEAR(energies.front(), -10.0, 1e-12);
  EXPECT_EQ(groups.front(), std::vector<std::size_t>{0});
  std::size_t total = 0;
  for (const auto& g : groups) total += g.size();
  EXPECT_EQ(total, b.dimension());
  for (std::size_t i = 1; i < energies.size(); ++i) EXPECT_GT(energies[i], energies[i - 1]);

  const TransitionMatrix tm = transition_matrix(CycleSpec{6.0, 0.5, 1}, params);
  const Eigen::MatrixXd agg = energy_aggregate(tm);
  ASSERT_EQ(agg.rows(), 11);
  for (Eigen::Index j = 0; j < agg.cols(); ++j) EXPECT_NEAR(agg.col(j).sum(), 1.0, 1e-8);
  Eigen::VectorXd pi = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(b.dimension()), 1.0 / b.dimension());
  EXPECT_NEAR(energy_aggregate(tm, pi).sum(), 1.0, 1e-12);
  EXPECT_NEAR(ground_probability(tm, pi), 1.0 / b.dimension(), 1e-15);
}

TEST(Ira, BitstringCounts) {
  const SectorBasis b(6, 4, 2);
  EXPECT_NEAR(bitstring_count(b, 0), 1.0, 1e-12);
  EXPECT_NEAR(bitstring_count(b, b.index_of_counts(2, 1)), 12.0, 1e-9);
  double total = 0.0;
  for (std::size_t i = 0; i < b.dimension(); ++i) total += bitstring_count(b, i);
  EXPECT_NEAR(total, 64.0, 1e-9);
}

TEST(Ira, LevelDiagonalGrowsWithCycleTime) {
  // States sharing an h0 level mix even adiabatically, so the check is per
  // level. The levels with |E| < 1 sit at a narrow avoided crossing passed
  // twice per cycle and oscillate in tau; they are excluded.
  const ModelParams params = cycle_params(3, 10, 0.8);
  Eigen::VectorXd prev;
  TransitionMatrix last = transition_matrix(CycleSpec{30.0, 0.5, 1}, params);
  for (double tau : {30.0, 100.0, 300.0}) {
    if (tau > 30.0) last = transition_matrix(CycleSpec{tau, 0.5, 1}, params);
    const Eigen::VectorXd diag = energy_aggregate(last).diagonal();
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
      if (std::abs(last.group_energies[static_cast<std::size_t>(i)]) < 1.0) continue;
      if (prev.size()) EXPECT_GE(diag[i], prev[i] - 0.02) << "tau=" << tau << " level=" << i;
      if (tau == 300.0) EXPECT_GT(diag[i], 0.99) << "level=" << i;
    }
    prev = diag;
  }
  EXPECT_NEAR(energy_aggregate(last)(0, 0), 1.0, 1e-6);
}

TEST(Ira, MagnetizationDistribution) {
  const SectorBasis b(4, 2, 2);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(b.dimension()));
  p[0] = 0.25;
  p[static_cast<Eigen::Index>(b.index_of_counts(1, 1))] = 0.75;
  const auto dist = magnetization_distribution(b, p);
  ASSERT_EQ(dist.size(), 5u);
  EXPECT_DOUBLE_EQ(dist[0].first, -1.0);
  EXPECT_DOUBLE_EQ(dist[2].first, 0.0);
  EXPECT_DOUBLE_EQ(dist[2].second, 0.75);
  EXPECT_DOUBLE_EQ(dist[4].first, 1.0);
  EXPECT_DOUBLE_EQ(dist[4].second, 0.25);
  EXPECT_NEAR(mean_magnetization(b, p), 0.25, 1e-15);
}

TEST(Ira, SpectralTraceOccupationsComplete) {
  const ModelParams params = cycle_params(3, 8, 0.5);
  const SectorBasis b = cycle_basis(params);
  const auto trace = cycle_spectral_trace(b.index_of_counts(3, 2), CycleSpec{10.0, 0.3, 1}, params, b.dimension());
  ASSERT_EQ(trace.size(), 201u);
  for (const auto& smp : trace) {
    double total = 0.0;
    for (double o : smp.occupations) total += o;
    EXPECT_NEAR(total, 1.0, 1e-8);
    for (std::size_t j = 1; j < smp.energies.size(); ++j) EXPECT_GE(smp.energies[j], smp.energies[j - 1]);
  }
  EXPECT_THROW(cycle_spectral_trace(0, CycleSpec{10.0, 0.3, 1}, params, 2, 100), ConfigError);
}
