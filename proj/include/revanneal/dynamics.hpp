#pragma once

// Closed-system Schroedinger evolution over the sector basis, error
// probability and time-to-solution.
//
// Steps are products of exponentials exp(-i dt H) of the instantaneous
// Hamiltonian, applied by a Lanczos approximation of the action. The step
// size is adapted by step doubling. The state is never renormalized, so the
// norm drift is a direct unitarity monitor.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "revanneal/errors.hpp"
#include "revanneal/parallel.hpp"
#include "revanneal/schedule.hpp"
#include "revanneal/sector.hpp"
#include "revanneal/spectrum.hpp"

namespace revanneal {

/// Lanczos approximation of psi <- exp(-i dt H) psi.
class KrylovExponential {
 public:
  explicit KrylovExponential(double tol = 1e-12, int max_dim = 40) : tol_(tol), max_dim_(max_dim) {}

  void apply(const SectorHamiltonian& h, double dt, Amplitudes& psi) {
    const double nrm = psi.norm();
    if (nrm == 0.0 || dt == 0.0) return;
    const auto dim = static_cast<Eigen::Index>(h.dimension());
    const int max_m = static_cast<int>(std::min<Eigen::Index>(max_dim_, dim));
    if (basis_.rows() != dim || basis_.cols() < max_m + 1) basis_.resize(dim, max_m + 1);
    alpha_.assign(static_cast<std::size_t>(max_m), 0.0);
    beta_.assign(static_cast<std::size_t>(max_m), 0.0);
    basis_.col(0) = psi / nrm;
    const double scale = std::max(1.0, h.norm_bound());

    Eigen::VectorXcd y;
    int m = 0;
    bool converged = false;
    for (int j = 0; j < max_m; ++j) {
      cur_ = basis_.col(j);
      h.apply(cur_, work_);
      alpha_[j] = cur_.dot(work_).real();
      work_ -= alpha_[j] * cur_;
      if (j > 0) work_ -= beta_[j - 1] * basis_.col(j - 1);
      // one reorthogonalization pass against the two most recent vectors
      const Complex c0 = cur_.dot(work_);
      work_ -= c0 * cur_;
      if (j > 0) work_ -= basis_.col(j - 1).dot(work_) * basis_.col(j - 1);
      beta_[j] = work_.norm();
      m = j + 1;
      const bool invariant = beta_[j] <= 1e-13 * scale;
      if (invariant || m == max_m || m >= 3) {
        y = small_exponential(m, dt);
        const double err = beta_[j] * std::abs(y[m - 1]) * nrm;
        if (invariant || err < tol_) {
          converged = true;
          break;
        }
      }
      basis_.col(j + 1) = work_ / beta_[j];
    }
    if (!converged) {
      if (std::abs(dt) < 1e-300) throw NumericalFailure("Krylov exponential failed to converge");
      apply(h, 0.5 * dt, psi);
      apply(h, 0.5 * dt, psi);
      return;
    }
    psi = nrm * (basis_.leftCols(m) * y);
  }

 private:
  // exp(-i dt T_m) e_1 for the Lanczos tridiagonal T_m.
  Eigen::VectorXcd small_exponential(int m, double dt) const {
    Eigen::VectorXd diag(m);
    Eigen::VectorXd sub(std::max(m - 1, 0));
    for (int i = 0; i < m; ++i) diag[i] = alpha_[i];
    for (int i = 0; i + 1 < m; ++i) sub[i] = beta_[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    if (m == 1) {
      Eigen::VectorXcd out(1);
      out[0] = std::exp(Complex(0.0, -dt * diag[0]));
      return out;
    }
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const Eigen::MatrixXd& q = es.eigenvectors();
    Eigen::VectorXcd coeff(m);
    for (int k = 0; k < m; ++k) coeff[k] = std::exp(Complex(0.0, -dt * es.eigenvalues()[k])) * q(0, k);
    return q.cast<Complex>() * coeff;
  }

  double tol_;
  int max_dim_;
  Eigen::MatrixXcd basis_;
  Amplitudes cur_;
  Amplitudes work_;
  std::vector<double> alpha_;
  std::vector<double> beta_;
};

enum class Propagator {
  midpoint,  // exp(-i dt H(t + dt/2)), second order
  magnus4,   // commutator-free fourth-order Magnus, two exponentials
};

struct EvolveOptions {
  double tol = 1e-9;          // local error per unit time
  Propagator propagator = Propagator::magnus4;
  std::size_t samples = 0;    // evenly spaced sample intervals; 0 disables sampling
  bool ground_overlap = false;
  double krylov_tol = 1e-12;
  double norm_tol = 1e-8;
  double initial_step = 0.0;  // 0 picks a step from the Hamiltonian norm
  std::function<void(double, const Amplitudes&)> observer;  // called at each sample time
};

struct EvolutionSample {
  double t;
  double s;
  double lambda;
  double magnetization;
  double ground_overlap;  // NaN unless requested
};

struct EvolutionResult {
  StateVector final_state;
  std::vector<EvolutionSample> samples;
  double norm_drift = 0.0;
  std::size_t step_count = 0;
  std::size_t rejected_steps = 0;
};

namespace detail {

inline TermWeights combine(double a, const TermWeights& x, double b, const TermWeights& y) {
  return {a * x.cost + b * y.cost, a * x.init + b * y.init, a * x.transverse + b * y.transverse};
}

class Stepper {
 public:
  Stepper(const HamiltonianTerms& terms, double gamma, const Schedule& schedule, const EvolveOptions& opt)
      : terms_(terms), gamma_(gamma), schedule_(schedule), opt_(opt), krylov_(opt.krylov_tol) {}

  TermWeights weights_at(double t) const {
    const Controls c = schedule_.at(t);
    return term_weights(c.s, c.lambda, gamma_);
  }

  int order() const { return opt_.propagator == Propagator::magnus4 ? 4 : 2; }

  void step(Amplitudes& psi, double t, double dt) {
    if (opt_.propagator == Propagator::midpoint) {
      krylov_.apply(SectorHamiltonian(terms_, weights_at(t + 0.5 * dt)), dt, psi);
      return;
    }
    static const double r3 = std::sqrt(3.0);
    const double c1 = 0.5 - r3 / 6.0;
    const double c2 = 0.5 + r3 / 6.0;
    const double a1 = (3.0 - 2.0 * r3) / 12.0;
    const double a2 = (3.0 + 2.0 * r3) / 12.0;
    const TermWeights w1 = weights_at(t + c1 * dt);
    const TermWeights w2 = weights_at(t + c2 * dt);
    krylov_.apply(SectorHamiltonian(terms_, combine(a2, w1, a1, w2)), dt, psi);
    krylov_.apply(SectorHamiltonian(terms_, combine(a1, w1, a2, w2)), dt, psi);
  }

 private:
  const HamiltonianTerms& terms_;
  double gamma_;
  const Schedule& schedule_;
  const EvolveOptions& opt_;
  KrylovExponential krylov_;
};

}  // namespace detail

inline double ground_overlap_at(const HamiltonianTerms& terms, double s, double lambda, double gamma,
                                const StateVector& psi) {
  const EigenSystem sys = eigensystem(assemble(terms, s, lambda, gamma), 1, true);
  const Eigen::VectorXcd g = sys.vectors->col(0).cast<Complex>();
  return std::norm(g.dot(psi.amplitudes));
}

/// Integrates i d psi/dt = H(t) psi over [0, tau] of the schedule.
inline EvolutionResult evolve(const HamiltonianTerms& terms, double gamma, const Schedule& schedule,
                              const StateVector& psi0, const EvolveOptions& opt = {}) {
  if (psi0.dimension() != terms.dimension()) throw ConfigError("initial state dimension mismatch");
  if (std::abs(psi0.norm() - 1.0) > opt.norm_tol) throw ConfigError("initial state is not normalized");
  if (!(opt.tol > 0.0)) throw ConfigError("tol must be positive");

  const double tau = schedule.tau();
  detail::Stepper stepper(terms, gamma, schedule, opt);
  const double exponent = 1.0 / stepper.order();
  const double error_const = std::pow(2.0, stepper.order()) - 1.0;

  EvolutionResult result;
  Amplitudes psi = psi0.amplitudes;
  Amplitudes full;

  auto record = [&](double t) {
    const Controls c = schedule.at(t);
    const StateVector cur{psi};
    const double overlap = opt.ground_overlap ? ground_overlap_at(terms, c.s, c.lambda, gamma, cur)
                                              : std::numeric_limits<double>::quiet_NaN();
    result.samples.push_back({t, c.s, c.lambda, magnetization(terms.basis, cur), overlap});
    if (opt.observer) opt.observer(t, psi);
  };

  std::vector<double> stops;
  if (opt.samples > 0) {
    for (std::size_t k = 1; k <= opt.samples; ++k) stops.push_back(tau * static_cast<double>(k) / opt.samples);
    stops.back() = tau;
    record(0.0);
  } else {
    stops.push_back(tau);
  }

  double dt = opt.initial_step;
  if (!(dt > 0.0)) {
    const Controls c = schedule.at(0.0);
    const double nb = SectorHamiltonian(terms, c.s, c.lambda, gamma).norm_bound();
    dt = std::min(tau, 0.1 / std::max(1.0, nb));
  }
  const double min_dt = 1e-12 * tau;

  double t = 0.0;
  for (const double stop : stops) {
    while (t < stop) {
      double h = std::min(dt, stop - t);
      const bool clipped = h < dt;
      full = psi;
      stepper.step(full, t, h);
      Amplitudes half = psi;
      stepper.step(half, t, 0.5 * h);
      stepper.step(half, t + 0.5 * h, 0.5 * h);
      const double err = (half - full).norm() / error_const;
      const double allowed = opt.tol * h;
      if (err <= allowed || h <= min_dt) {
        psi.swap(half);
        t = (stop - t - h <= 1e-14 * tau) ? stop : t + h;
        ++result.step_count;
        result.norm_drift = std::max(result.norm_drift, std::abs(psi.norm() - 1.0));
        if (result.norm_drift > opt.norm_tol) {
          throw NumericalFailure("norm drift " + std::to_string(result.norm_drift) + " at t=" + std::to_string(t));
        }
        const double factor = err > 0.0 ? 0.9 * std::pow(allowed / err, exponent) : 2.0;
        if (!clipped) dt = h * std::clamp(factor, 0.2, 2.0);
      } else {
        ++result.rejected_steps;
        dt = h * std::clamp(0.9 * std::pow(allowed / err, exponent), 0.1, 0.9);
        if (dt < min_dt) {
          throw NumericalFailure("step size underflow at t=" + std::to_string(t));
        }
      }
    }
    if (opt.samples > 0) record(stop);
  }
  result.final_state = StateVector{psi};
  return result;
}

/// Ground state of the transverse term -2(S1x + S2x): both blocks polarized
/// along x, amplitude sqrt(C(2S, S - m)) / 2^S per block.
inline StateVector transverse_ground_state(const SectorBasis& basis) {
  auto block = [](int two_s) {
    Eigen::VectorXd a(two_s + 1);
    for (int i = 0; i <= two_s; ++i) {
      const double log_binom = std::lgamma(two_s + 1.0) - std::lgamma(i + 1.0) - std::lgamma(two_s - i + 1.0);
      a[i] = std::exp(0.5 * log_binom - 0.5 * two_s * std::log(2.0));
    }
    return a;
  };
  const Eigen::VectorXd a1 = block(basis.two_spin1());
  const Eigen::VectorXd a2 = block(basis.two_spin2());
  StateVector psi{Amplitudes(static_cast<Eigen::Index>(basis.dimension()))};
  for (std::size_t k = 0; k < basis.dimension(); ++k) {
    psi.amplitudes[static_cast<Eigen::Index>(k)] =
        a1[static_cast<Eigen::Index>(basis.offset1(k))] * a2[static_cast<Eigen::Index>(basis.offset2(k))];
  }
  psi.amplitudes /= psi.amplitudes.norm();
  return psi;
}

/// 1 - probability of the cost-function ground subspace (all up; all down
/// as well for even p).
inline double error_probability(const StateVector& final_state, const SectorBasis& basis, int p) {
  if (!basis.is_maximal()) throw ConfigError("error probability needs the maximal-spin sector");
  if (final_state.dimension() != basis.dimension()) throw ConfigError("state dimension mismatch");
  double success = std::norm(final_state.amplitudes[0]);
  const auto last = static_cast<Eigen::Index>(basis.dimension() - 1);
  if (p % 2 == 0 && last > 0) success += std::norm(final_state.amplitudes[last]);
  return std::clamp(1.0 - success / final_state.amplitudes.squaredNorm(), 0.0, 1.0);
}

inline double error_probability(const StateVector& final_state, const ModelParams& params) {
  return error_probability(final_state, build_basis(params), params.p);
}

/// Time to solution tau log(1 - p_d) / log(p_e), clamped to tau when a
/// single run already succeeds with probability p_d.
inline double tts(double tau, double p_e, double p_d = 0.99) {
  if (!(p_d > 0.0 && p_d < 1.0)) throw ConfigError("p_d must lie in (0, 1)");
  if (p_e < 0.0 || p_e > 1.0) throw ConfigError("p_e must lie in [0, 1]");
  if (p_e >= 1.0) return std::numeric_limits<double>::infinity();
  if (p_e <= 1.0 - p_d) return tau;
  return tau * std::log(1.0 - p_d) / std::log(p_e);
}

/// An annealing protocol whose error probability is a function of (N, tau).
struct AnnealProtocol {
  enum class Kind { qa, ara };
  Kind kind = Kind::ara;
  int p = 3;
  double gamma = 1.0;
  double c = 0.8;  // ignored for QA
  bool floor_block = false;  // N1 = floor(N c) instead of requiring N c integral

  std::string name() const {
    return kind == Kind::qa ? "qa" : "ara_c" + std::to_string(c).substr(0, 4) + "_g" + std::to_string(gamma).substr(0, 4);
  }

  /// Model parameters at size N. QA runs in the fully symmetric sector.
  ModelParams params(int n_spins) const {
    if (kind == Kind::qa) return ModelParams{p, n_spins, n_spins, gamma};
    if (floor_block) {
      ModelParams params{p, n_spins, static_cast<int>(std::floor(n_spins * c + 1e-9)), gamma};
      params.validate();
      return params;
    }
    return ModelParams::from_fraction(p, n_spins, c, gamma);
  }

  Schedule schedule(double tau) const {
    return kind == Kind::qa ? Schedule::qa(tau) : Schedule::ara_linear(tau);
  }

  StateVector initial_state(const SectorBasis& basis) const {
    if (kind == Kind::qa) return transverse_ground_state(basis);
    return basis_state(basis, basis.initial_index());
  }
};

struct ProtocolRun {
  double p_e;
  EvolutionResult evolution;
};

inline ProtocolRun run_protocol(const AnnealProtocol& protocol, const ModelParams& params, double tau,
                                const EvolveOptions& opt = {}) {
  const SectorBasis basis = build_basis(params);
  const HamiltonianTerms terms = build_terms(basis, params.p);
  EvolutionResult r = evolve(terms, params.gamma, protocol.schedule(tau), protocol.initial_state(basis), opt);
  const double pe = error_probability(r.final_state, basis, params.p);
  return {pe, std::move(r)};
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};

/// Least-squares line y = slope x + intercept.
inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("fit needs at least two points");
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / n);
  return fit;
}

/// Power-law (log y vs log N) and exponential (log y vs N) fits.
struct ScalingFits {
  LinearFit power;
  LinearFit exponential;
  bool prefers_power() const { return power.rms_residual < exponential.rms_residual; }
};

inline ScalingFits fit_scaling(const std::vector<double>& sizes, const std::vector<double>& values) {
  std::vector<double> log_n;
  std::vector<double> log_v;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    log_n.push_back(std::log(sizes[i]));
    log_v.push_back(std::log(values[i]));
  }
  return {fit_line(log_n, log_v), fit_line(sizes, log_v)};
}

struct TtsPoint {
  double tau;
  double p_e;
  double tts;
};

struct TtsScalingRow {
  int n_spins;
  double tau_opt;
  double tts_opt;
  bool boundary;  // minimum on the grid edge: the true optimum is unbounded
  std::vector<TtsPoint> curve;
};

struct TtsScaling {
  std::vector<TtsScalingRow> rows;
  ScalingFits fits;
};

/// TTS(tau) on the grid for one size, with golden-section refinement in
/// log tau around an interior grid minimum.
inline TtsScalingRow optimal_tts(const std::function<double(double)>& error_at_tau, int n_spins,
                                 const std::vector<double>& tau_grid, double p_d, int refine_evals = 8) {
  if (tau_grid.size() < 3) throw ConfigError("tau grid needs at least three points");
  TtsScalingRow row{n_spins, 0.0, std::numeric_limits<double>::infinity(), false, {}};
  std::size_t best = 0;
  for (std::size_t i = 0; i < tau_grid.size(); ++i) {
    const double pe = error_at_tau(tau_grid[i]);
    row.curve.push_back({tau_grid[i], pe, tts(tau_grid[i], pe, p_d)});
    if (row.curve[i].tts < row.curve[best].tts) best = i;
  }
  row.tau_opt = row.curve[best].tau;
  row.tts_opt = row.curve[best].tts;
  row.boundary = best == 0 || best + 1 == tau_grid.size();
  if (row.boundary || refine_evals <= 0) return row;

  double a = std::log(tau_grid[best - 1]);
  double b = std::log(tau_grid[best + 1]);
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  auto eval = [&](double log_tau) {
    const double tau = std::exp(log_tau);
    const double pe = error_at_tau(tau);
    const double value = tts(tau, pe, p_d);
    if (value < row.tts_opt) {
      row.tts_opt = value;
      row.tau_opt = tau;
    }
    return value;
  };
  double x1 = b - r * (b - a);
  double x2 = a + r * (b - a);
  double f1 = eval(x1);
  double f2 = eval(x2);
  for (int k = 2; k < refine_evals; ++k) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = eval(x2);
    }
  }
  return row;
}

inline std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  if (points < 2 || !(lo > 0.0) || !(hi > lo)) throw ConfigError("invalid log grid");
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) {
    g[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * static_cast<double>(i) / (points - 1));
  }
  return g;
}

inline void check_tau_grid(const std::vector<double>& tau_grid) {
  if (tau_grid.size() < 12) throw ConfigError("tau grid needs at least 12 points");
  if (!std::is_sorted(tau_grid.begin(), tau_grid.end()) || !(tau_grid.front() > 0.0)) {
    throw ConfigError("tau grid must be positive and increasing");
  }
  if (tau_grid.back() / tau_grid.front() < 100.0 * (1.0 - 1e-12)) {
    throw ConfigError("tau grid must span at least two decades");
  }
}

/// Optimal TTS per size; fits use every size with a finite optimum,
/// including boundary minima, which are lower bounds.
inline TtsScaling optimal_tts_scaling(const AnnealProtocol& protocol, const std::vector<int>& sizes,
                                      const std::vector<double>& tau_grid, double p_d = 0.99,
                                      const EvolveOptions& opt = {}, std::size_t workers = 1) {
  check_tau_grid(tau_grid);
  TtsScaling out;
  out.rows = parallel_map(sizes.size(), workers, [&](std::size_t i) {
    const ModelParams params = protocol.params(sizes[i]);
    auto pe = [&](double tau) { return run_protocol(protocol, params, tau, opt).p_e; };
    return optimal_tts(pe, sizes[i], tau_grid, p_d);
  });
  std::vector<double> ns;
  std::vector<double> best;
  for (const auto& row : out.rows) {
    if (!std::isfinite(row.tts_opt)) continue;
    ns.push_back(row.n_spins);
    best.push_back(row.tts_opt);
  }
  if (ns.size() >= 2) out.fits = fit_scaling(ns, best);
  return out;
}

}  // namespace revanneal
