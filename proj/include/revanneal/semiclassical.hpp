#pragma once

// Classical comparators: spin-vector dynamics (SVD) of the two block
// magnetizations on the semiclassical potential, the potential landscape,
// and spin-vector Monte Carlo (SVMC) with planar rotors.
//
// Block unit vectors use the angle convention
//   u = (z: sin(theta) cos(phi), y: sin(theta) sin(phi), x: cos(theta)).
// Internally vectors are stored in (x, y, z) order.

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "revanneal/errors.hpp"
#include "revanneal/parallel.hpp"
#include "revanneal/schedule.hpp"
#include "revanneal/sector.hpp"

namespace revanneal {

struct BlockAngles {
  double theta1 = 0.5 * std::numbers::pi;
  double phi1 = 0.0;
  double theta2 = -0.5 * std::numbers::pi;
  double phi2 = 0.0;
};

using Vec3 = std::array<double, 3>;  // (x, y, z)

inline Vec3 unit_vector(double theta, double phi) {
  return {std::cos(theta), std::sin(theta) * std::sin(phi), std::sin(theta) * std::cos(phi)};
}

/// Block weights n1 = N1/N and n2 = N2/N.
struct BlockWeights {
  double n1;
  double n2;
};

inline BlockWeights block_weights(const ModelParams& params) {
  return {static_cast<double>(params.block1()) / params.n_spins,
          static_cast<double>(params.block2()) / params.n_spins};
}

/// V_SC / N as a function of the two block vectors.
inline double potential_per_spin(const Vec3& u1, const Vec3& u2, double s, double lambda, double gamma, int p,
                                 BlockWeights w) {
  const TermWeights tw = term_weights(s, lambda, gamma);
  const double mz = w.n1 * u1[2] + w.n2 * u2[2];
  return -s * ipow(mz, p) - tw.init * (w.n1 * u1[2] - w.n2 * u2[2]) - tw.transverse * (w.n1 * u1[0] + w.n2 * u2[0]);
}

inline double v_sc(const BlockAngles& a, double s, double lambda, const ModelParams& params) {
  return params.n_spins * potential_per_spin(unit_vector(a.theta1, a.phi1), unit_vector(a.theta2, a.phi2), s,
                                             lambda, params.gamma, params.p, block_weights(params));
}

/// Gradient of V_SC with respect to (theta1, phi1, theta2, phi2).
inline std::array<double, 4> v_sc_gradient(const BlockAngles& a, double s, double lambda, const ModelParams& params) {
  const TermWeights tw = term_weights(s, lambda, params.gamma);
  const BlockWeights w = block_weights(params);
  const double n = params.n_spins;
  const double z1 = std::sin(a.theta1) * std::cos(a.phi1);
  const double z2 = std::sin(a.theta2) * std::cos(a.phi2);
  const double mz = w.n1 * z1 + w.n2 * z2;
  const double dmz = -s * params.p * ipow(mz, params.p - 1);
  // dV/dz_k and dV/dx_k per spin
  const double dz1 = w.n1 * (dmz - tw.init);
  const double dz2 = w.n2 * (dmz + tw.init);
  const double dx1 = -w.n1 * tw.transverse;
  const double dx2 = -w.n2 * tw.transverse;
  return {n * (dz1 * std::cos(a.theta1) * std::cos(a.phi1) - dx1 * std::sin(a.theta1)),
          n * (-dz1 * std::sin(a.theta1) * std::sin(a.phi1)),
          n * (dz2 * std::cos(a.theta2) * std::cos(a.phi2) - dx2 * std::sin(a.theta2)),
          n * (-dz2 * std::sin(a.theta2) * std::sin(a.phi2))};
}

/// Effective field h_k = -(1/n_k) grad_{u_k}(V_SC / N) in (x, y, z) order.
inline std::array<Vec3, 2> effective_fields(const Vec3& u1, const Vec3& u2, double s, double lambda, double gamma,
                                            int p, BlockWeights w) {
  const TermWeights tw = term_weights(s, lambda, gamma);
  const double mz = w.n1 * u1[2] + w.n2 * u2[2];
  const double cost = s * p * ipow(mz, p - 1);
  return {Vec3{tw.transverse, 0.0, cost + tw.init}, Vec3{tw.transverse, 0.0, cost - tw.init}};
}

/// Precession rate: du/dt = kPrecessionRate * u x h. A single spin in a
/// transverse field Gamma then precesses at angular frequency 2 Gamma.
inline constexpr double kPrecessionRate = 2.0;

struct SvdOptions {
  double tol = 1e-12;
  std::size_t samples = 401;
};

struct SvdSample {
  double t;
  double s;
  double lambda;
  double magnetization;
  double energy;
  double norm_error;
};

struct SvdResult {
  std::vector<SvdSample> samples;
  double final_magnetization = 0.0;
  double max_norm_error = 0.0;
};

inline SvdResult svd_evolve(const Schedule& schedule, const ModelParams& params, const BlockAngles& initial = {},
                            SvdOptions opt = {}) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 6>;
  params.validate();
  if (opt.samples < 2) throw ConfigError("svd samples must be >= 2");
  const BlockWeights w = block_weights(params);
  const Vec3 a = unit_vector(initial.theta1, initial.phi1);
  const Vec3 b = unit_vector(initial.theta2, initial.phi2);
  State x{a[0], a[1], a[2], b[0], b[1], b[2]};

  auto rhs = [&](const State& y, State& dy, double t) {
    const Controls c = schedule.at(t);
    const Vec3 u1{y[0], y[1], y[2]};
    const Vec3 u2{y[3], y[4], y[5]};
    const auto h = effective_fields(u1, u2, c.s, c.lambda, params.gamma, params.p, w);
    for (int k = 0; k < 2; ++k) {
      const double* u = y.data() + 3 * k;
      const Vec3& f = h[k];
      dy[3 * k + 0] = kPrecessionRate * (u[1] * f[2] - u[2] * f[1]);
      dy[3 * k + 1] = kPrecessionRate * (u[2] * f[0] - u[0] * f[2]);
      dy[3 * k + 2] = kPrecessionRate * (u[0] * f[1] - u[1] * f[0]);
    }
  };

  std::vector<double> times(opt.samples);
  for (std::size_t i = 0; i < opt.samples; ++i) {
    times[i] = schedule.tau() * static_cast<double>(i) / static_cast<double>(opt.samples - 1);
  }
  SvdResult out;
  auto observe = [&](const State& y, double t) {
    const Controls c = schedule.at(t);
    const Vec3 u1{y[0], y[1], y[2]};
    const Vec3 u2{y[3], y[4], y[5]};
    const double e1 = std::abs(std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]) - 1.0);
    const double e2 = std::abs(std::sqrt(y[3] * y[3] + y[4] * y[4] + y[5] * y[5]) - 1.0);
    const double err = std::max(e1, w.n2 > 0.0 ? e2 : 0.0);
    out.max_norm_error = std::max(out.max_norm_error, err);
    out.samples.push_back({t, c.s, c.lambda, w.n1 * y[2] + w.n2 * y[5],
                           params.n_spins * potential_per_spin(u1, u2, c.s, c.lambda, params.gamma, params.p, w),
                           err});
  };
  try {
    auto stepper = odeint::make_dense_output(opt.tol, opt.tol, odeint::runge_kutta_dopri5<State>());
    const double dt0 = std::min(1e-3, schedule.tau() / static_cast<double>(opt.samples));
    odeint::integrate_times(stepper, rhs, x, times.begin(), times.end(), dt0, observe,
                            odeint::max_step_checker(1000000));
  } catch (const std::exception& e) {
    throw NumericalFailure(std::string("svd integration failed: ") + e.what());
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw NumericalFailure("svd integration produced a non-finite state");
  }
  out.final_magnetization = out.samples.back().magnetization;
  return out;
}

/// Potential V_SC over (sin theta1, sin theta2) with phi1 = phi2 = 0 and
/// cos theta_k >= 0.
struct PotentialMinimum {
  double x1;
  double x2;
  double value;
};

struct PotentialLandscape {
  std::size_t resolution = 0;
  std::vector<double> axis;
  Eigen::MatrixXd values;  // values(i, j) at (axis[i], axis[j])
  std::vector<PotentialMinimum> minima;
};

inline PotentialLandscape potential_landscape(double s, double lambda, const ModelParams& params,
                                              std::size_t resolution = 201) {
  params.validate();
  if (resolution < 101) throw ConfigError("potential grid resolution must be >= 101");
  const BlockWeights w = block_weights(params);
  PotentialLandscape land;
  land.resolution = resolution;
  land.axis.resize(resolution);
  for (std::size_t i = 0; i < resolution; ++i) {
    land.axis[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(resolution - 1);
  }
  land.values.resize(static_cast<Eigen::Index>(resolution), static_cast<Eigen::Index>(resolution));
  for (std::size_t i = 0; i < resolution; ++i) {
    for (std::size_t j = 0; j < resolution; ++j) {
      const double x1 = land.axis[i];
      const double x2 = land.axis[j];
      const Vec3 u1{std::sqrt(std::max(0.0, 1.0 - x1 * x1)), 0.0, x1};
      const Vec3 u2{std::sqrt(std::max(0.0, 1.0 - x2 * x2)), 0.0, x2};
      land.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          params.n_spins * potential_per_spin(u1, u2, s, lambda, params.gamma, params.p, w);
    }
  }
  // Steepest descent on the 8-neighbour grid from every point; distinct
  // sinks are the local minima.
  const auto n = static_cast<Eigen::Index>(resolution);
  std::vector<char> is_sink(resolution * resolution, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = land.values(i, j);
      bool lowest = true;
      for (Eigen::Index di = -1; di <= 1 && lowest; ++di) {
        for (Eigen::Index dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const Eigen::Index a = i + di;
          const Eigen::Index b = j + dj;
          if (a < 0 || b < 0 || a >= n || b >= n) continue;
          if (land.values(a, b) <= v) {
            lowest = false;
            break;
          }
        }
      }
      if (lowest) {
        land.minima.push_back({land.axis[static_cast<std::size_t>(i)], land.axis[static_cast<std::size_t>(j)], v});
      }
    }
  }
  std::sort(land.minima.begin(), land.minima.end(),
            [](const PotentialMinimum& a, const PotentialMinimum& b) { return a.value < b.value; });
  return land;
}

enum class SvmcProposal { uniform, perturbation };

struct SvmcConfig {
  double beta = 1.0;
  int sweeps = 500;
  int runs = 100;
  std::uint64_t seed = 0;
  SvmcProposal proposal = SvmcProposal::uniform;
  double width = 0.3;  // perturbation half-width in radians

  void validate() const {
    if (!(beta > 0.0)) throw ConfigError("beta must be positive");
    if (sweeps < 1) throw ConfigError("sweeps must be >= 1");
    if (runs < 1) throw ConfigError("runs must be >= 1");
    if (proposal == SvmcProposal::perturbation && !(width > 0.0)) throw ConfigError("width must be positive");
  }
};

struct SvmcSweep {
  int sweep;
  double s;
  double mean_m;
  double std_m;
};

/// Per-run generator seeded from (seed, run index).
inline std::mt19937_64 run_generator(std::uint64_t seed, std::uint64_t run) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(run), static_cast<std::uint32_t>(run >> 32)};
  return std::mt19937_64(seq);
}

/// Planar rotor system with E = -s N (mean cos)^p - A sum eps_i cos - B sum sin.
class RotorSystem {
 public:
  explicit RotorSystem(const ModelParams& params) : params_(params), theta_(params.n_spins), eps_(params.n_spins) {
    for (int i = 0; i < params.n_spins; ++i) {
      eps_[i] = i < params.n_up ? 1.0 : -1.0;
      theta_[i] = i < params.n_up ? 0.0 : std::numbers::pi;
    }
    recompute();
  }

  double magnetization() const { return sum_cos_ / params_.n_spins; }
  const std::vector<double>& angles() const { return theta_; }

  double energy(double s, double lambda) const {
    const TermWeights tw = term_weights(s, lambda, params_.gamma);
    return -s * params_.n_spins * ipow(sum_cos_ / params_.n_spins, params_.p) - tw.init * sum_eps_cos_ -
           tw.transverse * sum_sin_;
  }

  double delta_energy(int i, double proposed, double s, double lambda) const {
    const TermWeights tw = term_weights(s, lambda, params_.gamma);
    const double dc = std::cos(proposed) - std::cos(theta_[i]);
    const double ds = std::sin(proposed) - std::sin(theta_[i]);
    const double n = params_.n_spins;
    return -s * n * (ipow((sum_cos_ + dc) / n, params_.p) - ipow(sum_cos_ / n, params_.p)) -
           tw.init * eps_[i] * dc - tw.transverse * ds;
  }

  void set(int i, double angle) {
    theta_[i] = angle;
    recompute();
  }

  void accept(int i, double angle) {
    const double dc = std::cos(angle) - std::cos(theta_[i]);
    sum_cos_ += dc;
    sum_eps_cos_ += eps_[i] * dc;
    sum_sin_ += std::sin(angle) - std::sin(theta_[i]);
    theta_[i] = angle;
  }

  void recompute() {
    sum_cos_ = sum_eps_cos_ = sum_sin_ = 0.0;
    for (std::size_t i = 0; i < theta_.size(); ++i) {
      sum_cos_ += std::cos(theta_[i]);
      sum_eps_cos_ += eps_[i] * std::cos(theta_[i]);
      sum_sin_ += std::sin(theta_[i]);
    }
  }

 private:
  ModelParams params_;
  std::vector<double> theta_;
  std::vector<double> eps_;
  double sum_cos_ = 0.0;
  double sum_eps_cos_ = 0.0;
  double sum_sin_ = 0.0;
};

inline double propose_angle(std::mt19937_64& rng, double current, const SvmcConfig& config) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (config.proposal == SvmcProposal::uniform) return std::numbers::pi * unit(rng);
  double x = current + config.width * (2.0 * unit(rng) - 1.0);
  // reflect into [0, pi]
  if (x < 0.0) x = -x;
  if (x > std::numbers::pi) x = 2.0 * std::numbers::pi - x;
  return std::clamp(x, 0.0, std::numbers::pi);
}

/// One Metropolis sweep over all spins in index order at fixed (s, lambda).
inline void metropolis_sweep(RotorSystem& sys, std::mt19937_64& rng, double s, double lambda,
                             const SvmcConfig& config) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = static_cast<int>(sys.angles().size());
  for (int i = 0; i < n; ++i) {
    const double proposed = propose_angle(rng, sys.angles()[i], config);
    const double de = sys.delta_energy(i, proposed, s, lambda);
    if (de <= 0.0 || unit(rng) < std::exp(-config.beta * de)) sys.accept(i, proposed);
  }
  sys.recompute();
}

/// Magnetization after each sweep of a single run; sweep k uses s = lambda = k / sweeps.
inline std::vector<double> svmc_single_run(const SvmcConfig& config, const ModelParams& params, std::uint64_t run) {
  auto rng = run_generator(config.seed, run);
  RotorSystem sys(params);
  std::vector<double> m(static_cast<std::size_t>(config.sweeps));
  for (int k = 1; k <= config.sweeps; ++k) {
    const double s = static_cast<double>(k) / config.sweeps;
    metropolis_sweep(sys, rng, s, s, config);
    m[static_cast<std::size_t>(k - 1)] = sys.magnetization();
  }
  return m;
}

inline std::vector<SvmcSweep> svmc_run(const SvmcConfig& config, const ModelParams& params, std::size_t workers = 1) {
  config.validate();
  params.validate();
  const auto runs = parallel_map(static_cast<std::size_t>(config.runs), workers, [&](std::size_t r) {
    return svmc_single_run(config, params, r);
  });
  std::vector<SvmcSweep> out;
  for (int k = 0; k < config.sweeps; ++k) {
    double sum = 0.0;
    for (const auto& run : runs) sum += run[static_cast<std::size_t>(k)];
    const double mean = sum / config.runs;
    double var = 0.0;
    for (const auto& run : runs) var += (run[static_cast<std::size_t>(k)] - mean) * (run[static_cast<std::size_t>(k)] - mean);
    const double sd = config.runs > 1 ? std::sqrt(var / (config.runs - 1)) : 0.0;
    out.push_back({k + 1, static_cast<double>(k + 1) / config.sweeps, mean, sd});
  }
  return out;
}

}  // namespace revanneal
