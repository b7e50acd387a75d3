#pragma once

// Two-block permutation-symmetric spin sector of the transverse-field p-spin
// model with an initialization term.
//
// The N spins are split into block 1 (the N1 spins that start up) and block 2
// (the N2 = N - N1 spins that start down). States are labelled by the block
// magnetizations (m1, m2) and ordered m1 descending, then m2 descending, so
// index 0 is the all-up state.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "revanneal/errors.hpp"

namespace revanneal {

using Complex = std::complex<double>;
using Amplitudes = Eigen::VectorXcd;
using OperatorMatrix = Eigen::MatrixXd;

inline double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

struct ModelParams {
  int p = 3;
  int n_spins = 2;
  int n_up = 2;  // N1 = N c, the size of the block that starts up
  double gamma = 1.0;

  /// Builds parameters from a fraction c; N c must be an integer.
  static ModelParams from_fraction(int p, int n_spins, double c, double gamma) {
    const double nc = static_cast<double>(n_spins) * c;
    const double rounded = std::round(nc);
    if (std::abs(nc - rounded) > 1e-9) {
      throw ConfigError("N*c = " + std::to_string(nc) + " is not an integer (N=" +
                        std::to_string(n_spins) + ", c=" + std::to_string(c) + ")");
    }
    ModelParams params{p, n_spins, static_cast<int>(rounded), gamma};
    params.validate();
    return params;
  }

  double c() const { return static_cast<double>(n_up) / n_spins; }
  int block1() const { return n_up; }
  int block2() const { return n_spins - n_up; }

  void validate() const {
    if (p < 3) throw ConfigError("p must be >= 3, got " + std::to_string(p));
    if (n_spins < 2) throw ConfigError("N must be >= 2, got " + std::to_string(n_spins));
    if (n_up > n_spins || 2 * n_up < n_spins) {
      throw ConfigError("block partition requires N/2 <= N1 <= N, got N1=" + std::to_string(n_up) +
                        " for N=" + std::to_string(n_spins));
    }
    if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  }
};

class SectorBasis {
 public:
  /// Maximal-spin sector for blocks of n1 and n2 spins.
  SectorBasis(int n_spins, int n1, int n2) : SectorBasis(n_spins, n1, n2, n1, n2) {}

  /// Sector with block spins two_s1/2 and two_s2/2; the block sizes fix the
  /// parity of 2S and bound it from above.
  SectorBasis(int n_spins, int n1, int n2, int two_s1, int two_s2)
      : n_spins_(n_spins), n1_(n1), n2_(n2), two_s1_(two_s1), two_s2_(two_s2) {
    if (n1 < 0 || n2 < 0 || n1 + n2 != n_spins) throw ConfigError("block sizes must sum to N");
    if (two_s1 < 0 || two_s1 > n1 || (n1 - two_s1) % 2 != 0 || two_s2 < 0 || two_s2 > n2 ||
        (n2 - two_s2) % 2 != 0) {
      throw ConfigError("block spins incompatible with block sizes");
    }
  }

  int n_spins() const { return n_spins_; }
  int block1() const { return n1_; }
  int block2() const { return n2_; }
  double spin1() const { return 0.5 * two_s1_; }
  double spin2() const { return 0.5 * two_s2_; }
  int two_spin1() const { return two_s1_; }
  int two_spin2() const { return two_s2_; }
  std::size_t dim1() const { return static_cast<std::size_t>(two_s1_ + 1); }
  std::size_t dim2() const { return static_cast<std::size_t>(two_s2_ + 1); }
  std::size_t dimension() const { return dim1() * dim2(); }
  bool is_maximal() const { return two_s1_ == n1_ && two_s2_ == n2_; }

  std::size_t offset1(std::size_t index) const { return index / dim2(); }
  std::size_t offset2(std::size_t index) const { return index % dim2(); }
  std::size_t index_of_offsets(std::size_t i1, std::size_t i2) const { return i1 * dim2() + i2; }

  double m1(std::size_t index) const { return spin1() - static_cast<double>(offset1(index)); }
  double m2(std::size_t index) const { return spin2() - static_cast<double>(offset2(index)); }

  /// Number of up spins in each block for the state at `index`.
  int up1(std::size_t index) const { return static_cast<int>(std::lround(m1(index) + 0.5 * n1_)); }
  int up2(std::size_t index) const { return static_cast<int>(std::lround(m2(index) + 0.5 * n2_)); }

  /// 2 (m1 + m2) / N.
  double magnetization(std::size_t index) const { return 2.0 * (m1(index) + m2(index)) / n_spins_; }

  std::size_t index(double m1, double m2) const {
    const double i1 = spin1() - m1;
    const double i2 = spin2() - m2;
    const bool integral = std::abs(i1 - std::round(i1)) < 1e-9 && std::abs(i2 - std::round(i2)) < 1e-9;
    if (!integral || i1 < -1e-9 || i2 < -1e-9 || std::round(i1) > two_s1_ || std::round(i2) > two_s2_) {
      throw ConfigError("(m1, m2) = (" + std::to_string(m1) + ", " + std::to_string(m2) +
                        ") is not a state of the sector");
    }
    return index_of_offsets(static_cast<std::size_t>(std::lround(i1)), static_cast<std::size_t>(std::lround(i2)));
  }

  /// Index of the state with the given per-block up-counts.
  std::size_t index_of_counts(int up1, int up2) const { return index(up1 - 0.5 * n1_, up2 - 0.5 * n2_); }

  /// The fully polarized initial classical state (S1, -S2).
  std::size_t initial_index() const { return index_of_offsets(0, dim2() - 1); }

  bool operator==(const SectorBasis&) const = default;

 private:
  int n_spins_;
  int n1_;
  int n2_;
  int two_s1_;
  int two_s2_;
};

inline SectorBasis build_basis(const ModelParams& params) {
  params.validate();
  return SectorBasis(params.n_spins, params.block1(), params.block2());
}

/// Diagonal cost and initialization terms plus the transverse coupling, stored
/// in structured form. Dense matrices are produced on request.
struct HamiltonianTerms {
  SectorBasis basis;
  int p;
  Eigen::VectorXd h0;     // -N (2 (m1 + m2) / N)^p
  Eigen::VectorXd hinit;  // -2 (m1 - m2)
  Eigen::VectorXd hop1;   // <i1 + 1| V_TF |i1> within block 1
  Eigen::VectorXd hop2;   // <i2 + 1| V_TF |i2> within block 2

  std::size_t dimension() const { return basis.dimension(); }

  /// Half-bandwidth of the transverse coupling in the basis ordering.
  std::size_t bandwidth() const {
    if (basis.dim1() > 1) return basis.dim2();
    return basis.dim2() > 1 ? 1 : 0;
  }

  OperatorMatrix dense_h0() const { return h0.asDiagonal(); }
  OperatorMatrix dense_hinit() const { return hinit.asDiagonal(); }

  OperatorMatrix dense_vtf() const {
    const std::size_t d = dimension();
    OperatorMatrix v = OperatorMatrix::Zero(d, d);
    for_each_coupling([&](std::size_t a, std::size_t b, double w) {
      v(a, b) = w;
      v(b, a) = w;
    });
    return v;
  }

  /// Calls fn(row, col, value) once for each coupled pair with row < col.
  template <typename Fn>
  void for_each_coupling(Fn&& fn) const {
    const std::size_t d1 = basis.dim1();
    const std::size_t d2 = basis.dim2();
    for (std::size_t i1 = 0; i1 < d1; ++i1) {
      for (std::size_t i2 = 0; i2 < d2; ++i2) {
        const std::size_t a = i1 * d2 + i2;
        if (i2 + 1 < d2) fn(a, a + 1, hop2[static_cast<Eigen::Index>(i2)]);
        if (i1 + 1 < d1) fn(a, a + d2, hop1[static_cast<Eigen::Index>(i1)]);
      }
    }
  }

  /// out = V_TF in.
  template <typename In, typename Out>
  void apply_vtf(const In& in, Out& out) const {
    const std::size_t d1 = basis.dim1();
    const std::size_t d2 = basis.dim2();
    out.setZero();
    for (std::size_t i1 = 0; i1 < d1; ++i1) {
      const double w1 = i1 + 1 < d1 ? hop1[static_cast<Eigen::Index>(i1)] : 0.0;
      for (std::size_t i2 = 0; i2 < d2; ++i2) {
        const auto a = static_cast<Eigen::Index>(i1 * d2 + i2);
        if (i2 + 1 < d2) {
          const double w2 = hop2[static_cast<Eigen::Index>(i2)];
          out[a] += w2 * in[a + 1];
          out[a + 1] += w2 * in[a];
        }
        if (i1 + 1 < d1) {
          const auto b = a + static_cast<Eigen::Index>(d2);
          out[a] += w1 * in[b];
          out[b] += w1 * in[a];
        }
      }
    }
  }
};

namespace detail {

// <m-1| -2 S^x |m> = -sqrt(S(S+1) - m(m-1)) for m = S - i, i = 0 .. 2S-1.
// The transverse term is -sum_i sigma^x_i = -2 (S1^x + S2^x).
inline Eigen::VectorXd lowering_couplings(int two_s) {
  const double s = 0.5 * two_s;
  Eigen::VectorXd w(two_s > 0 ? two_s : 0);
  for (int i = 0; i < two_s; ++i) {
    const double m = s - i;
    w[i] = -std::sqrt(std::max(0.0, s * (s + 1.0) - m * (m - 1.0)));
  }
  return w;
}

}  // namespace detail

inline HamiltonianTerms build_terms(const SectorBasis& basis, int p) {
  if (p < 1) throw ConfigError("p must be positive");
  const std::size_t d = basis.dimension();
  const double n = basis.n_spins();
  HamiltonianTerms terms{basis, p, Eigen::VectorXd(d), Eigen::VectorXd(d),
                         detail::lowering_couplings(basis.two_spin1()),
                         detail::lowering_couplings(basis.two_spin2())};
  for (std::size_t k = 0; k < d; ++k) {
    const double m1 = basis.m1(k);
    const double m2 = basis.m2(k);
    terms.h0[static_cast<Eigen::Index>(k)] = -n * ipow(2.0 * (m1 + m2) / n, p);
    terms.hinit[static_cast<Eigen::Index>(k)] = -2.0 * (m1 - m2);
  }
  return terms;
}

inline HamiltonianTerms build_terms(const SectorBasis& basis, const ModelParams& params) {
  params.validate();
  if (basis.n_spins() != params.n_spins || basis.block1() != params.block1()) {
    throw ConfigError("basis does not match model parameters");
  }
  return build_terms(basis, params.p);
}

/// Prefactors of the three terms at control point (s, lambda).
struct TermWeights {
  double cost;       // s
  double init;       // (1 - s)(1 - lambda)
  double transverse; // gamma (1 - s) lambda
};

inline TermWeights term_weights(double s, double lambda, double gamma) {
  return {s, (1.0 - s) * (1.0 - lambda), gamma * (1.0 - s) * lambda};
}

/// H(s, lambda) = s h0 + (1-s)(1-lambda) hinit + gamma (1-s) lambda vtf, kept
/// as a diagonal plus a scaled coupling for fast application.
class SectorHamiltonian {
 public:
  SectorHamiltonian(const HamiltonianTerms& terms, double s, double lambda, double gamma)
      : SectorHamiltonian(terms, term_weights(s, lambda, gamma)) {}

  SectorHamiltonian(const HamiltonianTerms& terms, const TermWeights& w) : terms_(&terms) {
    diagonal_ = w.cost * terms.h0 + w.init * terms.hinit;
    transverse_ = w.transverse;
  }

  const HamiltonianTerms& terms() const { return *terms_; }
  const Eigen::VectorXd& diagonal() const { return diagonal_; }
  double transverse() const { return transverse_; }
  std::size_t dimension() const { return terms_->dimension(); }

  /// out = H in.
  void apply(const Amplitudes& in, Amplitudes& out) const {
    out.resize(in.size());
    if (transverse_ != 0.0) {
      terms_->apply_vtf(in, out);
      out *= transverse_;
      out += diagonal_.cwiseProduct(in);
    } else {
      out = diagonal_.cwiseProduct(in);
    }
  }

  OperatorMatrix dense() const {
    OperatorMatrix h = transverse_ * terms_->dense_vtf();
    h.diagonal() += diagonal_;
    return h;
  }

  /// Lower band storage, column major, leading dimension bandwidth()+1.
  std::vector<double> lower_band() const {
    const std::size_t kd = terms_->bandwidth();
    const std::size_t d = dimension();
    const std::size_t ld = kd + 1;
    std::vector<double> ab(ld * d, 0.0);
    for (std::size_t j = 0; j < d; ++j) ab[j * ld] = diagonal_[static_cast<Eigen::Index>(j)];
    terms_->for_each_coupling([&](std::size_t a, std::size_t b, double w) {
      ab[(b - a) + a * ld] = transverse_ * w;
    });
    return ab;
  }

  /// Gershgorin bound on the spectral radius.
  double norm_bound() const {
    Eigen::VectorXd row = diagonal_.cwiseAbs();
    terms_->for_each_coupling([&](std::size_t a, std::size_t b, double w) {
      row[static_cast<Eigen::Index>(a)] += std::abs(transverse_ * w);
      row[static_cast<Eigen::Index>(b)] += std::abs(transverse_ * w);
    });
    return row.size() ? row.maxCoeff() : 0.0;
  }

 private:
  const HamiltonianTerms* terms_;
  Eigen::VectorXd diagonal_;
  double transverse_ = 0.0;
};

inline OperatorMatrix assemble(const HamiltonianTerms& terms, double s, double lambda, double gamma) {
  return SectorHamiltonian(terms, s, lambda, gamma).dense();
}

struct StateVector {
  Amplitudes amplitudes;

  double norm() const { return amplitudes.norm(); }
  std::size_t dimension() const { return static_cast<std::size_t>(amplitudes.size()); }
};

inline StateVector basis_state(const SectorBasis& basis, std::size_t index) {
  if (index >= basis.dimension()) throw ConfigError("basis index out of range");
  StateVector psi{Amplitudes::Zero(static_cast<Eigen::Index>(basis.dimension()))};
  psi.amplitudes[static_cast<Eigen::Index>(index)] = 1.0;
  return psi;
}

inline StateVector classical_state(const SectorBasis& basis, double m1, double m2) {
  return basis_state(basis, basis.index(m1, m2));
}

/// <psi| 2 (S1z + S2z) / N |psi>.
inline double magnetization(const SectorBasis& basis, const StateVector& psi) {
  double m = 0.0;
  for (std::size_t k = 0; k < basis.dimension(); ++k) {
    m += std::norm(psi.amplitudes[static_cast<Eigen::Index>(k)]) * basis.magnetization(k);
  }
  return m;
}

/// Measurement probabilities |<k|psi>|^2 over the sector basis.
inline Eigen::VectorXd basis_probabilities(const StateVector& psi) {
  return psi.amplitudes.cwiseAbs2();
}

}  // namespace revanneal
