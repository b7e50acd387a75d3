#pragma once

// Iterated reverse annealing: single quadratic cycles at lambda = 1 started
// from computational basis states, the cycle-to-cycle transition matrix over
// per-block up-counts, and its iteration.
//
// A bitstring with k up spins out of n in a block is not a symmetric (Dicke)
// state. It splits over total block spins S >= |k - n/2| with weight
// d_S / C(n, k), where d_S = C(n, n/2 - S) - C(n, n/2 - S - 1) is the
// multiplicity of spin S. Each component evolves inside its own (S1, S2)
// sector and the count measurement does not mix components, so the count
// distribution is the weighted mixture of sector evolutions.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "revanneal/dynamics.hpp"
#include "revanneal/errors.hpp"
#include "revanneal/parallel.hpp"
#include "revanneal/schedule.hpp"
#include "revanneal/sector.hpp"
#include "revanneal/spectrum.hpp"

namespace revanneal {

/// Cycle model: any block partition 0 <= N1 <= N is allowed since the
/// cycle Hamiltonian has no initialization term.
inline ModelParams cycle_params(int p, int n_spins, double c, double gamma = 1.0) {
  if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("c must lie in [0, 1]");
  const double nc = n_spins * c;
  if (std::abs(nc - std::round(nc)) > 1e-9) throw ConfigError("N*c must be an integer");
  return ModelParams{p, n_spins, static_cast<int>(std::lround(nc)), gamma};
}

inline void validate_cycle_params(const ModelParams& params) {
  if (params.p < 3) throw ConfigError("p must be >= 3");
  if (params.n_spins < 2) throw ConfigError("N must be >= 2");
  if (params.n_up < 0 || params.n_up > params.n_spins) throw ConfigError("N1 must lie in [0, N]");
  if (!(params.gamma > 0.0)) throw ConfigError("gamma must be positive");
}

inline SectorBasis cycle_basis(const ModelParams& params) {
  validate_cycle_params(params);
  return SectorBasis(params.n_spins, params.n_up, params.n_spins - params.n_up);
}

struct CycleSpec {
  double tau = 10.0;
  double s_min = 0.5;
  int cycles = 1;

  void validate() const {
    if (!(tau > 0.0)) throw ConfigError("tau must be positive");
    if (!(s_min > 0.0) || s_min > 1.0) throw ConfigError("s_min must lie in (0, 1]");
    if (cycles < 0) throw ConfigError("cycles must be >= 0");
  }

  Schedule schedule() const { return Schedule::ira_quadratic(tau, s_min); }
  double total_time() const { return cycles * tau; }
};

namespace detail {

inline double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

/// Probability that a k-up bitstring of n spins has total spin two_s / 2.
inline double spin_weight(int n, int k, int two_s) {
  const int j = (n - two_s) / 2;
  // C(n, j) - C(n, j - 1) = C(n, j) (n - 2j + 1) / (n - j + 1)
  const double log_d = log_binomial(n, j) + std::log((n - 2.0 * j + 1.0) / (n - j + 1.0));
  return std::exp(log_d - log_binomial(n, k));
}

/// Allowed 2S values for k ups among n spins with their weights.
inline std::vector<std::pair<int, double>> spin_components(int n, int k) {
  std::vector<std::pair<int, double>> out;
  for (int two_s = std::abs(2 * k - n); two_s <= n; two_s += 2) out.emplace_back(two_s, spin_weight(n, k, two_s));
  return out;
}

}  // namespace detail

/// Measurement probabilities over the count basis after one cycle started
/// from a bitstring with the counts of basis state `initial`.
inline Eigen::VectorXd single_cycle(std::size_t initial, const CycleSpec& spec, const ModelParams& params,
                                    const EvolveOptions& opt = {}) {
  spec.validate();
  const SectorBasis basis = cycle_basis(params);
  if (initial >= basis.dimension()) throw ConfigError("initial state index out of range");
  const int n1 = basis.block1();
  const int n2 = basis.block2();
  const int k1 = basis.up1(initial);
  const int k2 = basis.up2(initial);
  const double m1 = basis.m1(initial);
  const double m2 = basis.m2(initial);
  const Schedule schedule = spec.schedule();

  Eigen::VectorXd probs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.dimension()));
  for (const auto& [ts1, w1] : detail::spin_components(n1, k1)) {
    for (const auto& [ts2, w2] : detail::spin_components(n2, k2)) {
      const SectorBasis sub(params.n_spins, n1, n2, ts1, ts2);
      const HamiltonianTerms terms = build_terms(sub, params.p);
      const StateVector psi0 = basis_state(sub, sub.index(m1, m2));
      const EvolutionResult r = evolve(terms, params.gamma, schedule, psi0, opt);
      for (std::size_t k = 0; k < sub.dimension(); ++k) {
        const double pk = std::norm(r.final_state.amplitudes[static_cast<Eigen::Index>(k)]);
        probs[static_cast<Eigen::Index>(basis.index(sub.m1(k), sub.m2(k)))] += w1 * w2 * pk;
      }
    }
  }
  return probs;
}

struct TransitionMatrix {
  SectorBasis basis;
  Eigen::MatrixXd entries;                      // (j, i): probability of j after a cycle from i
  std::vector<std::vector<std::size_t>> groups; // basis indices per h0 level, ascending energy
  std::vector<double> group_energies;

  std::size_t dimension() const { return basis.dimension(); }
};

/// Basis indices grouped by h0 energy within 1e-9 N, lowest level first.
inline std::vector<std::vector<std::size_t>> energy_groups(const SectorBasis& basis, int p,
                                                           std::vector<double>* energies = nullptr) {
  const HamiltonianTerms terms = build_terms(basis, p);
  std::vector<std::size_t> order(basis.dimension());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return terms.h0[static_cast<Eigen::Index>(a)] < terms.h0[static_cast<Eigen::Index>(b)];
  });
  const double tol = 1e-9 * basis.n_spins();
  std::vector<std::vector<std::size_t>> groups;
  std::vector<double> e;
  for (std::size_t idx : order) {
    const double h = terms.h0[static_cast<Eigen::Index>(idx)];
    if (groups.empty() || h - e.back() > tol) {
      groups.push_back({});
      e.push_back(h);
    }
    groups.back().push_back(idx);
  }
  for (auto& g : groups) std::sort(g.begin(), g.end());
  if (energies) *energies = e;
  return groups;
}

inline TransitionMatrix transition_matrix(const CycleSpec& spec, const ModelParams& params, std::size_t workers = 1,
                                          const EvolveOptions& opt = {}) {
  spec.validate();
  const SectorBasis basis = cycle_basis(params);
  TransitionMatrix tm{basis, Eigen::MatrixXd(basis.dimension(), basis.dimension()), {}, {}};
  const auto columns = parallel_map(basis.dimension(), workers,
                                    [&](std::size_t i) { return single_cycle(i, spec, params, opt); });
  for (std::size_t i = 0; i < columns.size(); ++i) tm.entries.col(static_cast<Eigen::Index>(i)) = columns[i];
  tm.groups = energy_groups(basis, params.p, &tm.group_energies);
  return tm;
}

/// P^r pi0 by repeated application.
inline Eigen::VectorXd iterate(const Eigen::MatrixXd& p, const Eigen::VectorXd& pi0, int r) {
  if (p.rows() != p.cols() || p.cols() != pi0.size()) throw ConfigError("dimension mismatch in iterate");
  if (r < 0) throw ConfigError("cycle count must be >= 0");
  Eigen::VectorXd pi = pi0;
  for (int k = 0; k < r; ++k) pi = p * pi;
  return pi;
}

inline Eigen::VectorXd iterate(const TransitionMatrix& tm, const Eigen::VectorXd& pi0, int r) {
  return iterate(tm.entries, pi0, r);
}

/// Probability of the cost-function ground level.
inline double ground_probability(const TransitionMatrix& tm, const Eigen::VectorXd& pi) {
  double sum = 0.0;
  for (std::size_t idx : tm.groups.front()) sum += pi[static_cast<Eigen::Index>(idx)];
  return sum;
}

/// Number of computational bitstrings with the counts of basis state i.
inline double bitstring_count(const SectorBasis& basis, std::size_t i) {
  return std::exp(detail::log_binomial(basis.block1(), basis.up1(i)) +
                  detail::log_binomial(basis.block2(), basis.up2(i)));
}

/// Sums a probability vector over each energy level.
inline Eigen::VectorXd energy_aggregate(const TransitionMatrix& tm, const Eigen::VectorXd& pi) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(tm.groups.size()));
  for (std::size_t g = 0; g < tm.groups.size(); ++g) {
    for (std::size_t idx : tm.groups[g]) out[static_cast<Eigen::Index>(g)] += pi[static_cast<Eigen::Index>(idx)];
  }
  return out;
}

/// Level-to-level matrix: rows summed over each target level, columns
/// averaged over the bitstrings of each source level.
inline Eigen::MatrixXd energy_aggregate(const TransitionMatrix& tm, const Eigen::MatrixXd& p) {
  const auto g = static_cast<Eigen::Index>(tm.groups.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(g, g);
  for (Eigen::Index src = 0; src < g; ++src) {
    const auto& members = tm.groups[static_cast<std::size_t>(src)];
    double total = 0.0;
    for (std::size_t i : members) total += bitstring_count(tm.basis, i);
    for (std::size_t i : members) {
      const double w = bitstring_count(tm.basis, i) / total;
      out.col(src) += w * energy_aggregate(tm, Eigen::VectorXd(p.col(static_cast<Eigen::Index>(i))));
    }
  }
  return out;
}

inline Eigen::MatrixXd energy_aggregate(const TransitionMatrix& tm) { return energy_aggregate(tm, tm.entries); }

/// Distribution of the magnetization 2 (m1 + m2) / N, ascending in m.
inline std::vector<std::pair<double, double>> magnetization_distribution(const SectorBasis& basis,
                                                                         const Eigen::VectorXd& probs) {
  std::map<long, double> bins;
  for (std::size_t i = 0; i < basis.dimension(); ++i) {
    const long key = std::lround(2.0 * (basis.m1(i) + basis.m2(i)));
    bins[key] += probs[static_cast<Eigen::Index>(i)];
  }
  std::vector<std::pair<double, double>> out;
  for (const auto& [key, pr] : bins) out.emplace_back(static_cast<double>(key) / basis.n_spins(), pr);
  return out;
}

inline double mean_magnetization(const SectorBasis& basis, const Eigen::VectorXd& probs) {
  double m = 0.0;
  for (std::size_t i = 0; i < basis.dimension(); ++i) m += basis.magnetization(i) * probs[static_cast<Eigen::Index>(i)];
  return m;
}

struct SpectralSample {
  double t;
  double s;
  std::vector<double> energies;
  std::vector<double> occupations;
};

/// Instantaneous spectrum and occupations of the k lowest levels along one
/// cycle, starting from the symmetric state at `initial`.
inline std::vector<SpectralSample> cycle_spectral_trace(std::size_t initial, const CycleSpec& spec,
                                                        const ModelParams& params, std::size_t k,
                                                        std::size_t samples = 200, EvolveOptions opt = {}) {
  spec.validate();
  const SectorBasis basis = cycle_basis(params);
  if (initial >= basis.dimension()) throw ConfigError("initial state index out of range");
  if (k < 1 || k > basis.dimension()) throw ConfigError("level count must lie in [1, dim]");
  if (samples < 200) throw ConfigError("spectral trace needs at least 200 samples");
  const HamiltonianTerms terms = build_terms(basis, params.p);
  const Schedule schedule = spec.schedule();
  std::vector<SpectralSample> out;
  opt.samples = samples;
  opt.observer = [&](double t, const Amplitudes& psi) {
    const Controls c = schedule.at(t);
    const EigenSystem sys = eigensystem(assemble(terms, c.s, c.lambda, params.gamma), k, true);
    SpectralSample smp{t, c.s, {}, {}};
    for (std::size_t j = 0; j < k; ++j) {
      smp.energies.push_back(sys.values[static_cast<Eigen::Index>(j)]);
      const Eigen::VectorXcd v = sys.vectors->col(static_cast<Eigen::Index>(j)).cast<Complex>();
      smp.occupations.push_back(std::norm(v.dot(psi)));
    }
    out.push_back(std::move(smp));
  };
  evolve(terms, params.gamma, schedule, basis_state(basis, initial), opt);
  return out;
}

}  // namespace revanneal
