#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "full_hilbert.hpp"
#include "revanneal/dynamics.hpp"
#include "revanneal/ira.hpp"
#include "revanneal/sector.hpp"
#include "revanneal/spectrum.hpp"

using namespace revanneal;

namespace {

struct Partition {
  int n;
  int n1;
};

const std::vector<Partition> kPartitions = {{6, 4}, {6, 6}, {8, 6}, {8, 5}, {8, 8}};

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Oracle, TermsMatchProjectedPauliConstruction) {
  for (const auto& part : kPartitions) {
    const oracle::FullModel full{part.n, part.n1, 3, 1.0};
    const Eigen::MatrixXd v = full.symmetric_states();
    const SectorBasis basis(part.n, part.n1, part.n - part.n1);
    const HamiltonianTerms terms = build_terms(basis, 3);
    // s = 1 isolates h0, s = lambda = 0 isolates hinit, lambda = 1 with s = 0 isolates vtf.
    EXPECT_LT(max_abs(v.transpose() * full.dense(1.0, 0.0) * v - terms.dense_h0()), 1e-10);
    EXPECT_LT(max_abs(v.transpose() * full.dense(0.0, 0.0) * v - terms.dense_hinit()), 1e-10);
    EXPECT_LT(max_abs(v.transpose() * full.dense(0.0, 1.0) * v - terms.dense_vtf()), 1e-10);
  }
}

TEST(Oracle, LowestEigenvalueMatchesSymmetricSectorOfFullMatrix) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& part : {Partition{6, 4}, Partition{8, 6}}) {
    const SectorBasis basis(part.n, part.n1, part.n - part.n1);
    const HamiltonianTerms terms = build_terms(basis, 3);
    for (int trial = 0; trial < 10; ++trial) {
      const double s = unit(rng);
      const double lambda = unit(rng);
      const double gamma = 0.2 + 3.0 * unit(rng);
      const oracle::FullModel full{part.n, part.n1, 3, gamma};
      const Eigen::MatrixXd v = full.symmetric_states();
      const Eigen::MatrixXd projected = v.transpose() * full.dense(s, lambda) * v;
      const double expected = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(projected).eigenvalues()[0];
      const EigenSystem sys = eigensystem(assemble(terms, s, lambda, gamma), 1, false);
      EXPECT_NEAR(sys.values[0], expected, 1e-10) << "s=" << s << " lambda=" << lambda << " gamma=" << gamma;
    }
  }
}

TEST(Oracle, SectorSpectrumContainedInFullSpectrum) {
  for (const auto& part : kPartitions) {
    for (const auto& [s, lambda] : {std::pair{0.5, 0.5}, std::pair{0.3, 0.8}, std::pair{0.7, 0.2}}) {
      const double gamma = 1.3;
      const oracle::FullModel full{part.n, part.n1, 3, gamma};
      const Eigen::VectorXd all = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(full.dense(s, lambda)).eigenvalues();
      const SectorBasis basis(part.n, part.n1, part.n - part.n1);
      const EigenSystem sys =
          eigensystem(assemble(build_terms(basis, 3), s, lambda, gamma), basis.dimension(), false);
      std::vector<bool> used(static_cast<std::size_t>(all.size()), false);
      for (Eigen::Index k = 0; k < sys.values.size(); ++k) {
        bool found = false;
        for (Eigen::Index j = 0; j < all.size(); ++j) {
          if (!used[static_cast<std::size_t>(j)] && std::abs(all[j] - sys.values[k]) < 1e-10) {
            used[static_cast<std::size_t>(j)] = true;
            found = true;
            break;
          }
        }
        EXPECT_TRUE(found) << "eigenvalue " << sys.values[k] << " missing for N=" << part.n;
      }
    }
  }
}

namespace {

double sector_vs_full_overlap(const Partition& part, double gamma, const Schedule& schedule, bool qa) {
  const SectorBasis basis(part.n, part.n1, part.n - part.n1);
  const HamiltonianTerms terms = build_terms(basis, 3);
  const oracle::FullModel full{part.n, part.n1, 3, gamma};
  const Eigen::MatrixXd v = full.symmetric_states();

  StateVector psi0 = qa ? transverse_ground_state(basis) : basis_state(basis, basis.initial_index());
  std::vector<oracle::cd> phi(full.dim());
  for (std::size_t b = 0; b < full.dim(); ++b) {
    oracle::cd a = 0.0;
    for (Eigen::Index c = 0; c < v.cols(); ++c) a += v(static_cast<Eigen::Index>(b), c) * psi0.amplitudes[c];
    phi[b] = a;
  }
  const double tau = schedule.tau();
  phi = oracle::evolve(
      full, [&](double t) { const Controls c = schedule.at(t); return std::pair{c.s, c.lambda}; }, tau, phi);

  const EvolutionResult r = evolve(terms, gamma, schedule, psi0);
  oracle::cd overlap = 0.0;
  for (std::size_t b = 0; b < full.dim(); ++b) {
    oracle::cd a = 0.0;
    for (Eigen::Index c = 0; c < v.cols(); ++c) a += v(static_cast<Eigen::Index>(b), c) * r.final_state.amplitudes[c];
    overlap += std::conj(a) * phi[b];
  }
  return std::norm(overlap);
}

}  // namespace

TEST(Oracle, AraLinearEvolutionMatchesFullHilbert) {
  EXPECT_GE(sector_vs_full_overlap({6, 4}, 1.0, Schedule::ara_linear(20.0), false), 1.0 - 1e-8);
  EXPECT_GE(sector_vs_full_overlap({8, 6}, 2.0, Schedule::ara_linear(10.0), false), 1.0 - 1e-8);
}

TEST(Oracle, QaEvolutionMatchesFullHilbert) {
  EXPECT_GE(sector_vs_full_overlap({6, 6}, 1.0, Schedule::qa(20.0), true), 1.0 - 1e-8);
  EXPECT_GE(sector_vs_full_overlap({8, 8}, 1.0, Schedule::qa(10.0), true), 1.0 - 1e-8);
}

TEST(Oracle, IraCycleEvolutionMatchesFullHilbert) {
  EXPECT_GE(sector_vs_full_overlap({6, 4}, 1.0, Schedule::ira_quadratic(10.0, 0.3), false), 1.0 - 1e-8);
  EXPECT_GE(sector_vs_full_overlap({8, 6}, 1.0, Schedule::ira_quadratic(10.0, 0.5), false), 1.0 - 1e-8);
}

TEST(Oracle, IraCountDistributionExactForBitstrings) {
  for (const auto& part : {Partition{6, 4}, Partition{8, 5}}) {
    const ModelParams params = cycle_params(3, part.n, static_cast<double>(part.n1) / part.n);
    const SectorBasis basis = cycle_basis(params);
    const CycleSpec spec{8.0, 0.3, 1};
    const oracle::FullModel full{part.n, part.n1, 3, 1.0};
    for (std::size_t i = 0; i < basis.dimension(); ++i) {
      const int k1 = basis.up1(i);
      const int k2 = basis.up2(i);
      // lowest k1 bits of block 1 and lowest k2 bits of block 2 up
      std::uint32_t bits = (1u << k1) - 1u;
      bits |= ((1u << k2) - 1u) << part.n1;
      std::vector<oracle::cd> phi(full.dim(), 0.0);
      phi[bits] = 1.0;
      const Schedule sch = spec.schedule();
      phi = oracle::evolve(
          full, [&](double t) { const Controls c = sch.at(t); return std::pair{c.s, c.lambda}; }, spec.tau, phi);
      Eigen::VectorXd expected = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.dimension()));
      for (std::uint32_t b = 0; b < full.dim(); ++b) {
        expected[static_cast<Eigen::Index>(basis.index_of_counts(full.ups1(b), full.ups2(b)))] += std::norm(phi[b]);
      }
      const Eigen::VectorXd got = single_cycle(i, spec, params);
      EXPECT_LT((got - expected).cwiseAbs().maxCoeff(), 1e-8) << "N=" << part.n << " column " << i;
    }
  }
}
