#pragma once

// Zero-temperature mean-field statics of the p-spin model with the
// initialization term: free energy per spin, self-consistency residual,
// global minimization in m, and first-order transition tracing.
//
// Only m in [0, 1] is searched. With 1/2 <= c <= 1 every self-consistent
// solution is non-negative, and for odd p the free-energy expression is
// unphysical for m < 0 (at s = 1 it would reach -(2p - 1) at m = -1).

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "revanneal/sector.hpp"

namespace revanneal {

struct MeanFieldModel {
  double gamma = 1.0;
  double c = 1.0;
  int p = 3;
};

struct MeanFieldPoint {
  double s = 0.0;
  double lambda = 0.0;
  double m_star = 0.0;
  double f_star = 0.0;
  double residual = 0.0;
};

namespace detail {

struct FieldTerms {
  double plus_z;   // s p m^{p-1} + (1-s)(1-lambda)
  double minus_z;  // s p m^{p-1} - (1-s)(1-lambda)
  double x;        // gamma (1-s) lambda
};

inline FieldTerms field_terms(double m, double s, double lambda, const MeanFieldModel& model) {
  const double cost = s * model.p * ipow(m, model.p - 1);
  const double init = (1.0 - s) * (1.0 - lambda);
  return {cost + init, cost - init, model.gamma * (1.0 - s) * lambda};
}

// z / sqrt(z^2 + x^2), with the 0/0 limit defined as sign(z).
inline double direction_cosine(double z, double x) {
  const double r = std::hypot(z, x);
  if (r == 0.0) return 0.0;
  return z / r;
}

}  // namespace detail

/// Free energy per spin at zero temperature.
inline double free_energy(double m, double s, double lambda, const MeanFieldModel& model) {
  const auto t = detail::field_terms(m, s, lambda, model);
  return s * (model.p - 1) * ipow(m, model.p) - model.c * std::hypot(t.plus_z, t.x) -
         (1.0 - model.c) * std::hypot(t.minus_z, t.x);
}

/// Analytic df/dm = s p (p-1) m^{p-2} (m - rhs(m)).
inline double free_energy_derivative(double m, double s, double lambda, const MeanFieldModel& model) {
  const auto t = detail::field_terms(m, s, lambda, model);
  const double dcost = s * model.p * (model.p - 1) * ipow(m, model.p - 2);
  const double rhs = model.c * detail::direction_cosine(t.plus_z, t.x) +
                     (1.0 - model.c) * detail::direction_cosine(t.minus_z, t.x);
  return dcost * (m - rhs);
}

/// m minus the right-hand side of the self-consistency equation.
inline double self_consistency_residual(double m, double s, double lambda, const MeanFieldModel& model) {
  const auto t = detail::field_terms(m, s, lambda, model);
  return m - model.c * detail::direction_cosine(t.plus_z, t.x) -
         (1.0 - model.c) * detail::direction_cosine(t.minus_z, t.x);
}

struct SolveOptions {
  double grid_step = 1e-3;
  double refine_tol = 1e-10;
  double tie_tol = 1e-12;
};

/// Global minimizer of the free energy over m in [0, 1]: dense grid followed
/// by golden-section refinement of the best bracket. At s = 0 the free energy
/// does not depend on m and the magnetization is the self-consistent value.
inline MeanFieldPoint solve_m(double s, double lambda, const MeanFieldModel& model, SolveOptions opt = {}) {
  MeanFieldPoint pt{s, lambda, 0.0, 0.0, 0.0};
  if (s == 0.0) {
    pt.m_star = 1.0 - self_consistency_residual(1.0, s, lambda, model);
    pt.f_star = free_energy(pt.m_star, s, lambda, model);
    pt.residual = self_consistency_residual(pt.m_star, s, lambda, model);
    return pt;
  }
  const auto n = static_cast<int>(std::llround(1.0 / opt.grid_step));
  int best = 0;
  double best_f = free_energy(0.0, s, lambda, model);
  for (int i = 1; i <= n; ++i) {
    const double m = static_cast<double>(i) / n;
    const double f = free_energy(m, s, lambda, model);
    // ties resolve toward larger m
    if (f <= best_f + opt.tie_tol) {
      best = i;
      best_f = std::min(f, best_f);
    }
  }
  double a = std::max(0.0, static_cast<double>(best - 1) / n);
  double b = std::min(1.0, static_cast<double>(best + 1) / n);
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - r * (b - a);
  double x2 = a + r * (b - a);
  double f1 = free_energy(x1, s, lambda, model);
  double f2 = free_energy(x2, s, lambda, model);
  while (b - a > opt.refine_tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = free_energy(x1, s, lambda, model);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = free_energy(x2, s, lambda, model);
    }
  }
  double m = 0.5 * (a + b);
  double f = free_energy(m, s, lambda, model);
  // Golden section on f resolves m only to ~sqrt(eps); polish the interior
  // stationary point as a root of the self-consistency residual.
  const double lo = std::max(0.0, static_cast<double>(best - 1) / n);
  const double hi = std::min(1.0, static_cast<double>(best + 1) / n);
  auto g = [&](double x) { return self_consistency_residual(x, s, lambda, model); };
  const double g_lo = g(lo);
  const double g_hi = g(hi);
  if (g_lo < 0.0 && g_hi > 0.0) {
    std::uintmax_t iters = 200;
    const auto root = boost::math::tools::toms748_solve(g, lo, hi, g_lo, g_hi,
                                                        boost::math::tools::eps_tolerance<double>(52), iters);
    const double mr = 0.5 * (root.first + root.second);
    const double fr = free_energy(mr, s, lambda, model);
    if (fr <= f + opt.tie_tol) {
      m = mr;
      f = fr;
    }
  }
  const double grid_m = static_cast<double>(best) / n;
  if (best_f < f || (best_f <= f + opt.tie_tol && (best == 0 || best == n))) {
    m = grid_m;
    f = best_f;
  }
  pt.m_star = m;
  pt.f_star = f;
  pt.residual = self_consistency_residual(m, s, lambda, model);
  return pt;
}

/// Largest |m_star| difference between adjacent samples along the diagonal
/// s = lambda, sampled at `step`. Returns {max jump, s at the left sample}.
struct PathJump {
  double max_jump = 0.0;
  double s_left = 0.0;
};

template <typename LambdaOfS>
PathJump max_adjacent_jump(const MeanFieldModel& model, double step, LambdaOfS&& lambda_of_s) {
  const auto n = static_cast<int>(std::llround(1.0 / step));
  PathJump out;
  double prev = solve_m(0.0, lambda_of_s(0.0), model).m_star;
  for (int i = 1; i <= n; ++i) {
    const double s = std::min(1.0, static_cast<double>(i) / n);
    const double m = solve_m(s, lambda_of_s(s), model).m_star;
    if (std::abs(m - prev) > out.max_jump) {
      out.max_jump = std::abs(m - prev);
      out.s_left = static_cast<double>(i - 1) / n;
    }
    prev = m;
  }
  return out;
}

struct TransitionPoint {
  double lambda;
  double s;
  double jump;
};

struct TransitionLine {
  double c = 0.0;
  double gamma = 0.0;
  std::vector<TransitionPoint> points;
};

/// Locates s where m_star jumps by more than `jump_threshold` between
/// adjacent grid points along each lambda column, refined by bisection in s.
/// Columns are processed independently; output is in (lambda, s) grid order.
inline std::vector<TransitionPoint> transitions_in_column(double lambda, const MeanFieldModel& model, double grid_step,
                                                         double jump_threshold, double bisect_tol = 1e-4) {
  std::vector<TransitionPoint> out;
  const auto n = static_cast<int>(std::llround(1.0 / grid_step));
  double prev_s = 0.0;
  double prev_m = solve_m(0.0, lambda, model).m_star;
  for (int i = 1; i <= n; ++i) {
    const double s = std::min(1.0, static_cast<double>(i) / n);
    const double m = solve_m(s, lambda, model).m_star;
    if (std::abs(m - prev_m) > jump_threshold) {
      double lo = prev_s;
      double hi = s;
      double m_lo = prev_m;
      double m_hi = m;
      while (hi - lo > bisect_tol) {
        const double mid = 0.5 * (lo + hi);
        const double mm = solve_m(mid, lambda, model).m_star;
        if (std::abs(mm - m_lo) < std::abs(mm - m_hi)) {
          lo = mid;
          m_lo = mm;
        } else {
          hi = mid;
          m_hi = mm;
        }
      }
      // a steep but continuous crossover collapses under bisection
      if (std::abs(m_hi - m_lo) >= jump_threshold) out.push_back({lambda, 0.5 * (lo + hi), std::abs(m_hi - m_lo)});
    }
    prev_s = s;
    prev_m = m;
  }
  return out;
}

inline TransitionLine trace_transitions(const MeanFieldModel& model, double grid_step, double jump_threshold = 0.05) {
  TransitionLine line{model.c, model.gamma, {}};
  const auto n = static_cast<int>(std::llround(1.0 / grid_step));
  for (int j = 0; j <= n; ++j) {
    const double lambda = std::min(1.0, static_cast<double>(j) / n);
    auto pts = transitions_in_column(lambda, model, grid_step, jump_threshold);
    line.points.insert(line.points.end(), pts.begin(), pts.end());
  }
  return line;
}

/// First s on the conventional QA axis (lambda = 1) where m_star jumps;
/// NaN if no jump is found.
inline double qa_critical_point(double gamma, int p, double grid_step = 0.005, double jump_threshold = 0.05) {
  const MeanFieldModel model{gamma, 1.0, p};
  const auto pts = transitions_in_column(1.0, model, grid_step, jump_threshold);
  return pts.empty() ? std::numeric_limits<double>::quiet_NaN() : pts.front().s;
}

}  // namespace revanneal
