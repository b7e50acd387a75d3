#include <gtest/gtest.h>

#include "revanneal/statics.hpp"

using namespace revanneal;

TEST(Statics, FreeEnergyAnchors) {
  for (double c : {0.5, 0.7, 1.0}) {
    const MeanFieldModel model{1.3, c, 3};
    EXPECT_NEAR(free_energy(1.0, 1.0, 0.4, model), -1.0, 1e-14);
    for (double m : {-0.5, 0.0, 0.3, 0.9}) EXPECT_NEAR(free_energy(m, 0.0, 0.0, model), -1.0, 1e-14);
  }
  const MeanFieldModel model{1.0, 0.8, 3};
  for (double m = 0.0; m <= 1.0; m += 0.125) {
    EXPECT_NEAR(free_energy(m, 1.0, 0.5, model), 2.0 * m * m * m - 3.0 * m * m, 1e-14);
  }
}

TEST(Statics, DerivativeMatchesFiniteDifference) {
  const double h = 1e-6;
  for (double gamma : {1.0, 2.0, 10.0}) {
    for (double c : {0.6, 0.8, 0.9}) {
      const MeanFieldModel model{gamma, c, 3};
      for (double s : {0.1, 0.4, 0.8}) {
        for (double lambda : {0.2, 0.5, 0.9}) {
          for (double m = 0.05; m < 1.0; m += 0.15) {
            const double fd =
                (free_energy(m + h, s, lambda, model) - free_energy(m - h, s, lambda, model)) / (2.0 * h);
            EXPECT_NEAR(free_energy_derivative(m, s, lambda, model), fd, 1e-6);
          }
        }
      }
    }
  }
}

TEST(Statics, ResidualAnchors) {
  const MeanFieldModel model{1.0, 0.8, 3};
  EXPECT_NEAR(self_consistency_residual(1.0, 1.0, 0.3, model), 0.0, 1e-15);
  EXPECT_NEAR(self_consistency_residual(2 * 0.8 - 1, 0.0, 0.0, model), 0.0, 1e-15);
  // both square roots vanish: s = 0, lambda = 1 has no z field and x field (1 - s) gamma
  EXPECT_TRUE(std::isfinite(self_consistency_residual(0.0, 0.5, 1.0, MeanFieldModel{1.0, 1.0, 3})));
}

TEST(Statics, SolveMAnchors) {
  EXPECT_LT(std::abs(solve_m(0.5, 0.5, MeanFieldModel{1.0, 0.9, 3}).residual), 1e-8);
  for (double c : {0.7, 0.9}) {
    const MeanFieldPoint pt = solve_m(1.0, 0.3, MeanFieldModel{1.0, c, 3});
    EXPECT_NEAR(pt.m_star, 1.0, 1e-9);
    EXPECT_NEAR(pt.f_star, -1.0, 1e-12);
  }
  const MeanFieldPoint pt = solve_m(0.5, 0.5, MeanFieldModel{1.0, 0.9, 3});
  EXPECT_GT(pt.m_star, 0.0);
  EXPECT_LT(pt.m_star, 1.0);
  EXPECT_LT(std::abs(pt.residual), 1e-8);
}

TEST(Statics, GlobalMinimumOverGrid) {
  const MeanFieldModel model{2.0, 0.8, 3};
  for (double s : {0.2, 0.45, 0.7}) {
    const MeanFieldPoint pt = solve_m(s, 0.6, model);
    for (int i = 0; i <= 1000; ++i) EXPECT_LE(pt.f_star, free_energy(i / 1000.0, s, 0.6, model) + 1e-12);
  }
}

TEST(Statics, StationarityAtInteriorMinimizers) {
  for (double gamma : {1.0, 2.0}) {
    for (double c : {0.7, 0.8, 0.9, 1.0}) {
      const MeanFieldModel model{gamma, c, 3};
      for (double s = 0.05; s < 1.0; s += 0.1) {
        for (double lambda = 0.1; lambda <= 1.0; lambda += 0.3) {
          const MeanFieldPoint pt = solve_m(s, lambda, model);
          if (pt.m_star > 1e-6 && pt.m_star < 1.0 - 1e-6) {
            EXPECT_LT(std::abs(pt.residual), 1e-8) << "s=" << s << " lambda=" << lambda << " c=" << c;
          }
        }
      }
    }
  }
}

TEST(Statics, DiagonalPathContinuousForFullyUpInitialState) {
  const PathJump j = max_adjacent_jump(MeanFieldModel{1.0, 1.0, 3}, 0.005, [](double s) { return s; });
  EXPECT_LT(j.max_jump, 0.05);
}

TEST(Statics, TransitionLinesPerParameters) {
  auto crosses_diagonal = [](const TransitionLine& line) {
    for (const auto& pt : line.points) {
      if (std::abs(pt.s - pt.lambda) < 0.01) return true;
    }
    return false;
  };
  const TransitionLine c7 = trace_transitions(MeanFieldModel{1.0, 0.7, 3}, 0.01);
  for (const auto& pt : c7.points) EXPECT_GE(pt.jump, 0.05);
  EXPECT_TRUE(crosses_diagonal(c7));
  EXPECT_FALSE(crosses_diagonal(trace_transitions(MeanFieldModel{2.0, 0.8, 3}, 0.01)));
  EXPECT_FALSE(crosses_diagonal(trace_transitions(MeanFieldModel{1.0, 0.9, 3}, 0.01)));
  // no field along x at lambda = 0: the classical switch from 2c - 1 to 1 is always first order
  const auto column = transitions_in_column(0.0, MeanFieldModel{1.0, 0.8, 3}, 0.01, 0.05);
  ASSERT_EQ(column.size(), 1u);
  EXPECT_NEAR(column.front().jump, 1.0 - (2 * 0.8 - 1.0), 1e-9);
}

TEST(Statics, QaCriticalPointOnLambdaOneAxis) {
  const double sc = qa_critical_point(1.0, 3);
  EXPECT_GT(sc, 0.3);
  EXPECT_LT(sc, 0.5);
}
