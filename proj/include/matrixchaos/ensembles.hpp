#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "matrixchaos/common.hpp"
#include "matrixchaos/errors.hpp"
#include "matrixchaos/hermitian_matrix.hpp"
#include "matrixchaos/rng.hpp"

namespace mxc {

// ---------------------------------------------------------------------------
// Adjacency matrices of d-regular graphs
// ---------------------------------------------------------------------------

struct RegularGraphSpec {
  int degree = 3;
  int vertices = 4;
  enum class Kind { complete, circulant, random } kind = Kind::complete;
  std::uint64_t seed = 0;
};

/// Transmission probability through a vertex of a d-regular adjacency
/// matrix: p_t = 4 / (E^2 + d^2); reflection takes the rest.
inline double regular_transmission(int degree, double energy) {
  return 4.0 / (energy * energy + degree * degree);
}

/// Closed-form Lyapunov exponent of H = A on a d-regular graph:
/// -p_r log p_r - (d-1) p_t log p_t. Identical for every edge and vertex.
inline double regular_lyapunov_closed_form(int degree, double energy) {
  if (degree < 2) throw PreconditionError("closed form needs degree >= 2");
  const double pt = regular_transmission(degree, energy);
  const double pr = 1.0 - (degree - 1) * pt;
  return -(xlogx(pr) + (degree - 1) * xlogx(pt));
}

/// Value at E = 0: 2(d-2)^2/d^2 log(d/(d-2)) + 8(d-1)/d^2 log(d/2).
inline double regular_lambda_at_zero(int degree) {
  const double d = degree;
  const double first = degree == 2 ? 0.0 : 2.0 * (d - 2.0) * (d - 2.0) / (d * d) * std::log(d / (d - 2.0));
  return first + 8.0 * (d - 1.0) / (d * d) * std::log(d / 2.0);
}

/// Location and value of the maximal exponent: log d at E = +-sqrt(d(4-d))
/// for d <= 4, the E = 0 value otherwise (strictly below log d).
struct RegularMax {
  double energy;
  double value;
};

inline RegularMax regular_lyapunov_max(int degree) {
  if (degree <= 4) return {std::sqrt(static_cast<double>(degree) * (4.0 - degree)), std::log(static_cast<double>(degree))};
  return {0.0, regular_lambda_at_zero(degree)};
}

/// Connected d-regular adjacency matrix (H = A).
inline HermitianMatrix build_regular(const RegularGraphSpec& spec) {
  const int d = spec.degree, v = spec.vertices;
  if (d < 2) throw InfeasibleSpec("degree must be at least 2");
  if (d >= v) throw InfeasibleSpec("degree must be smaller than the vertex count");
  if ((static_cast<long long>(d) * v) % 2 != 0)
    throw InfeasibleSpec("d*V must be even for a d-regular graph");

  ComplexMatrix a = ComplexMatrix::Zero(v, v);
  auto connect = [&](int x, int y) {
    a(x, y) = Complex(1.0, 0.0);
    a(y, x) = Complex(1.0, 0.0);
  };

  switch (spec.kind) {
    case RegularGraphSpec::Kind::complete: {
      if (v != d + 1) throw InfeasibleSpec("complete graph needs V = d + 1");
      for (int x = 0; x < v; ++x)
        for (int y = x + 1; y < v; ++y) connect(x, y);
      break;
    }
    case RegularGraphSpec::Kind::circulant: {
      const int half_offsets = d / 2;
      for (int j = 1; j <= half_offsets; ++j)
        for (int x = 0; x < v; ++x) connect(x, (x + j) % v);
      if (d % 2 == 1)
        for (int x = 0; x < v / 2; ++x) connect(x, x + v / 2);
      break;
    }
    case RegularGraphSpec::Kind::random: {
      // Pairing model with rejection of loops/multi-edges, retried until the
      // sampled graph is connected.
      CounterRng rng(spec.seed, 0x7265676d61ULL);
      const int attempts = 5000;
      for (int attempt = 0; attempt < attempts; ++attempt) {
        std::vector<int> stubs;
        stubs.reserve(static_cast<std::size_t>(v) * d);
        for (int x = 0; x < v; ++x)
          for (int k = 0; k < d; ++k) stubs.push_back(x);
        for (std::size_t i = stubs.size() - 1; i > 0; --i)
          std::swap(stubs[i], stubs[rng.uniform_index(i + 1)]);

        std::set<std::pair<int, int>> pairs;
        bool ok = true;
        for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
          const int x = std::min(stubs[i], stubs[i + 1]);
          const int y = std::max(stubs[i], stubs[i + 1]);
          if (x == y || !pairs.emplace(x, y).second) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        a.setZero();
        for (const auto& [x, y] : pairs) connect(x, y);
        try {
          return HermitianMatrix::from_dense(a);
        } catch (const DisconnectedError&) {
          continue;
        }
      }
      throw InfeasibleSpec("no connected d-regular realization found after retries");
    }
  }
  return HermitianMatrix::from_dense(a);
}

// ---------------------------------------------------------------------------
// Spin-graph Hamiltonian
// ---------------------------------------------------------------------------

struct SpinCoupling {
  int a;  // 1-based spin indices, a < b
  int b;
  double j;
};

struct SpinGraphSpec {
  int spins = 4;
  std::vector<SpinCoupling> couplings;
  double alpha = 1.0;
};

/// H = H_0/(1+alpha) + alpha H_I/(1+alpha) on V = 2^spins basis states,
/// with H_0 = sum_v sigma_z(v) and pair terms
/// J (sigma_x sigma_x + sigma_y sigma_y + sigma_x sigma_z + sigma_z sigma_x).
/// Basis: product sigma_z states, spin 1 on the most significant bit. The
/// result is real symmetric.
inline HermitianMatrix build_spin_hamiltonian(const SpinGraphSpec& spec) {
  if (spec.spins < 1) throw InfeasibleSpec("need at least one spin");
  if (spec.spins > 12)
    throw DimensionCap("dense construction capped at 12 spins (V = 4096)");
  if (!(spec.alpha >= 0.0)) throw InfeasibleSpec("alpha must be non-negative");
  const int n = spec.spins;
  const int v = 1 << n;

  std::set<std::pair<int, int>> seen;
  for (const auto& c : spec.couplings) {
    if (c.a < 1 || c.b < 1 || c.a > n || c.b > n || c.a == c.b)
      throw InfeasibleSpec("coupling indices must be distinct spins in [1, spins]");
    if (!seen.emplace(std::min(c.a, c.b), std::max(c.a, c.b)).second)
      throw InfeasibleSpec("duplicate coupling pair");
  }

  const double w0 = 1.0 / (1.0 + spec.alpha);
  const double wi = spec.alpha / (1.0 + spec.alpha);
  ComplexMatrix h = ComplexMatrix::Zero(v, v);

  auto spin_value = [n](int state, int spin) { return 1 - 2 * ((state >> (n - spin)) & 1); };
  auto flip = [n](int state, int spin) { return state ^ (1 << (n - spin)); };

  for (int s = 0; s < v; ++s) {
    double field = 0.0;
    for (int sp = 1; sp <= n; ++sp) field += spin_value(s, sp);
    h(s, s) += w0 * field;
  }

  for (const auto& c : spec.couplings) {
    const double j = wi * c.j;
    for (int s = 0; s < v; ++s) {
      const int sa = spin_value(s, c.a);
      const int sb = spin_value(s, c.b);
      const int both = flip(flip(s, c.a), c.b);
      h(both, s) += j * (1.0 - sa * sb);       // xx + yy (flip-flop)
      h(flip(s, c.a), s) += j * sb;            // sigma_x(a) sigma_z(b)
      h(flip(s, c.b), s) += j * sa;            // sigma_z(a) sigma_x(b)
    }
  }
  return HermitianMatrix::from_dense(h);
}

/// Inverse fourth-moment localization measure of a normalized vector,
/// between 1 (single site) and V (uniform).
inline double participation_ratio(const ComplexVector& phi) {
  const double norm = phi.norm();
  if (!(norm > 0.0)) throw ZeroVector("participation ratio of the zero vector");
  double fourth = 0.0;
  for (Eigen::Index i = 0; i < phi.size(); ++i) {
    const double p = std::norm(phi[i] / norm);
    fourth += p * p;
  }
  return 1.0 / fourth;
}

// ---------------------------------------------------------------------------
// Tridiagonal beta ensemble
// ---------------------------------------------------------------------------

struct GbetaESpec {
  int size = 50;
  double beta = 2.0;
  std::uint64_t seed = 0;
  enum class Mode { sample, mean_field } mode = Mode::sample;
};

/// One draw of the off-diagonal entry coupling sites n and n+1: b_n with
/// b_n^2 ~ Gamma(beta*n/2, 1), i.e. chi_{beta n} / sqrt(2).
inline double gbe_offdiagonal_sample(double beta, int n, std::mt19937_64& rng) {
  std::gamma_distribution<double> gamma(beta * n / 2.0, 1.0);
  return std::sqrt(gamma(rng));
}

/// Random tridiagonal matrix: standard normal diagonal, chi-distributed
/// off-diagonals growing like sqrt(beta*n/2).
inline HermitianMatrix gbe_sample(const GbetaESpec& spec) {
  if (spec.size < 2) throw InfeasibleSpec("tridiagonal ensemble needs V >= 2");
  if (!(spec.beta > 0.0)) throw InfeasibleSpec("beta must be positive");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix h = ComplexMatrix::Zero(spec.size, spec.size);
  for (int i = 0; i < spec.size; ++i) h(i, i) = normal(rng);
  for (int n = 1; n < spec.size; ++n) {
    const double b = gbe_offdiagonal_sample(spec.beta, n, rng);
    h(n - 1, n) = b;
    h(n, n - 1) = b;
  }
  return HermitianMatrix::from_dense(h);
}

/// Mean-field limit: zero diagonal and off-diagonals sqrt(beta*n/2).
inline HermitianMatrix gbe_mean_field(int size, double beta) {
  if (size < 2) throw InfeasibleSpec("tridiagonal ensemble needs V >= 2");
  if (!(beta > 0.0)) throw InfeasibleSpec("beta must be positive");
  ComplexMatrix h = ComplexMatrix::Zero(size, size);
  for (int n = 1; n < size; ++n) {
    const double b = std::sqrt(beta * n / 2.0);
    h(n - 1, n) = b;
    h(n, n - 1) = b;
  }
  return HermitianMatrix::from_dense(h);
}

/// Effective potential seen by the mean-field analogue particle of energy 2.
inline double effective_potential(double n, double beta, double energy) {
  if (!(n > 0.0) || !(beta > 0.0)) throw PreconditionError("n and beta must be positive");
  return std::sqrt(2.0 / (beta * n)) * energy;
}

/// Classical turning point n_t = E^2 / (2 beta); sites below it are
/// classically forbidden.
inline double turning_point(double energy, double beta) {
  if (!(beta > 0.0)) throw PreconditionError("beta must be positive");
  return energy * energy / (2.0 * beta);
}

}  // namespace mxc
