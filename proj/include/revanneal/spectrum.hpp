#pragma once

// Instantaneous spectra of sector Hamiltonians: dense eigensystems, banded
// lowest-eigenvalue solves, minimum-gap scans along annealing paths and
// instantaneous occupation probabilities.

#include <Eigen/Dense>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "revanneal/errors.hpp"
#include "revanneal/sector.hpp"

namespace revanneal {

struct EigenSystem {
  double s = 0.0;
  double lambda = 0.0;
  Eigen::VectorXd values;                 // ascending
  std::optional<Eigen::MatrixXd> vectors;  // columns, same order as values
};

/// Lowest k eigenpairs of a dense symmetric matrix.
inline EigenSystem eigensystem(const OperatorMatrix& h, std::size_t k, bool with_vectors) {
  const auto dim = static_cast<std::size_t>(h.rows());
  if (k < 1 || k > dim) throw ConfigError("eigensystem: k must be in [1, dim]");
  Eigen::SelfAdjointEigenSolver<OperatorMatrix> solver(
      h, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalFailure("dense eigensolver did not converge");
  const auto kk = static_cast<Eigen::Index>(k);
  EigenSystem sys;
  sys.values = solver.eigenvalues().head(kk);
  if (with_vectors) {
    sys.vectors = solver.eigenvectors().leftCols(kk);
    const double scale = std::max(1.0, h.cwiseAbs().rowwise().sum().maxCoeff());
    for (Eigen::Index j = 0; j < kk; ++j) {
      const double residual = (h * sys.vectors->col(j) - sys.values[j] * sys.vectors->col(j)).norm();
      if (residual > 1e-9 * scale) {
        throw NumericalFailure("eigenpair residual " + std::to_string(residual) + " exceeds tolerance");
      }
    }
  }
  return sys;
}

/// Lowest k eigenvalues of the sector Hamiltonian at (s, lambda), by
/// reduction of its band form (LAPACK dsbevx).
inline Eigen::VectorXd lowest_eigenvalues(const SectorHamiltonian& h, std::size_t k) {
  const auto n = static_cast<lapack_int>(h.dimension());
  if (k < 1 || k > h.dimension()) throw ConfigError("lowest_eigenvalues: k must be in [1, dim]");
  const auto kd = static_cast<lapack_int>(h.terms().bandwidth());
  std::vector<double> ab = h.lower_band();
  std::vector<double> w(static_cast<std::size_t>(n));
  std::vector<lapack_int> ifail(static_cast<std::size_t>(n));
  lapack_int found = 0;
  double q_dummy = 0.0;
  double z_dummy = 0.0;
  const lapack_int info =
      LAPACKE_dsbevx(LAPACK_COL_MAJOR, 'N', 'I', 'L', n, kd, ab.data(), kd + 1, &q_dummy, 1, 0.0, 0.0, 1,
                     static_cast<lapack_int>(k), 0.0, &found, w.data(), &z_dummy, 1, ifail.data());
  if (info != 0 || found != static_cast<lapack_int>(k)) {
    throw NumericalFailure("banded eigensolver failed (info=" + std::to_string(info) + ")");
  }
  return Eigen::Map<Eigen::VectorXd>(w.data(), found);
}

/// An annealing path in the (s, lambda) plane, parameterized by s.
struct AnnealPath {
  std::string name;
  std::function<double(double)> lambda_of_s;

  /// Conventional QA, lambda = 1.
  static AnnealPath qa() {
    return {"qa", [](double) { return 1.0; }};
  }
  /// Reverse annealing along the diagonal s = lambda.
  static AnnealPath diagonal() {
    return {"ara", [](double s) { return s; }};
  }

  bool is_qa() const { return name == "qa"; }
};

struct GapSample {
  double s;
  double gap;
};

struct GapScan {
  std::string path;
  std::vector<GapSample> samples;
  double s_at_min = 0.0;
  double min_gap = 0.0;
  /// Gaps below this value are not resolvable in double precision.
  double resolution_floor = 0.0;
  bool resolved() const { return min_gap > resolution_floor; }
};

/// Gap between the ground level and the first distinct level. Levels closer
/// than `degeneracy_tol` are grouped only for even p, where the cost function
/// is symmetric under a global flip.
inline double distinct_gap(const Eigen::VectorXd& values, double degeneracy_tol, bool group) {
  for (Eigen::Index j = 1; j < values.size(); ++j) {
    const double d = values[j] - values[0];
    if (!group || d > degeneracy_tol) return d;
  }
  return std::numeric_limits<double>::infinity();
}

namespace detail {

inline double golden_minimize(const std::function<double(double)>& f, double a, double b, double tol,
                              double* best_value) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - r * (b - a);
  double x2 = a + r * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = f(x2);
    }
  }
  if (f1 < f2) {
    *best_value = f1;
    return x1;
  }
  *best_value = f2;
  return x2;
}

}  // namespace detail

struct GapScanOptions {
  double s_resolution = 0.01;
  /// Golden-section stopping width in s. The default is far below the 1e-5
  /// minimum so exponentially narrow avoided crossings are located.
  double refine_tol = 1e-13;
};

/// Samples the ground-to-first-excited gap along `path` and refines the
/// minimum by golden-section search. On the QA axis the problem is fully
/// permutation symmetric and the scan runs in the total-spin N/2 sector.
inline GapScan gap_along_path(const ModelParams& params, const AnnealPath& path, GapScanOptions options = {}) {
  params.validate();
  if (!(options.s_resolution > 0.0) || options.s_resolution > 1e-2 + 1e-15) {
    throw ConfigError("s_resolution must be in (0, 1e-2]");
  }
  const SectorBasis basis = path.is_qa() ? SectorBasis(params.n_spins, params.n_spins, 0)
                                         : build_basis(params);
  const HamiltonianTerms terms = build_terms(basis, params.p);
  const bool group = params.p % 2 == 0;
  const std::size_t k = std::min<std::size_t>(group ? 4 : 2, basis.dimension());
  const double energy_scale = params.n_spins * std::max(1.0, params.gamma);
  const double degeneracy_tol = 1e-10 * energy_scale;

  auto gap_at = [&](double s) {
    const SectorHamiltonian h(terms, s, path.lambda_of_s(s), params.gamma);
    return distinct_gap(lowest_eigenvalues(h, k), degeneracy_tol, group);
  };

  GapScan scan;
  scan.path = path.name;
  scan.resolution_floor = 256.0 * std::numeric_limits<double>::epsilon() * energy_scale;
  const auto steps = static_cast<std::size_t>(std::llround(1.0 / options.s_resolution));
  std::size_t best = 0;
  for (std::size_t i = 0; i <= steps; ++i) {
    const double s = std::min(1.0, static_cast<double>(i) / static_cast<double>(steps));
    scan.samples.push_back({s, gap_at(s)});
    if (scan.samples.back().gap < scan.samples[best].gap) best = i;
  }
  const double a = scan.samples[best == 0 ? 0 : best - 1].s;
  const double b = scan.samples[std::min(best + 1, steps)].s;
  double refined = 0.0;
  const double s_ref = detail::golden_minimize(gap_at, a, b, options.refine_tol, &refined);
  if (refined < scan.samples[best].gap) {
    scan.s_at_min = s_ref;
    scan.min_gap = refined;
  } else {
    scan.s_at_min = scan.samples[best].s;
    scan.min_gap = scan.samples[best].gap;
  }
  return scan;
}

/// |<E_j|psi>|^2 for the lowest k instantaneous eigenstates of h.
inline std::vector<double> instantaneous_occupations(const StateVector& psi, const OperatorMatrix& h, std::size_t k) {
  const EigenSystem sys = eigensystem(h, k, true);
  std::vector<double> occ(k);
  for (std::size_t j = 0; j < k; ++j) {
    const Eigen::VectorXcd v = sys.vectors->col(static_cast<Eigen::Index>(j)).cast<Complex>();
    occ[j] = std::norm(v.dot(psi.amplitudes));
  }
  return occ;
}

}  // namespace revanneal
