#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "matrixchaos/common.hpp"
#include "matrixchaos/errors.hpp"
#include "matrixchaos/quantum_map.hpp"
#include "matrixchaos/rng.hpp"

namespace mxc {

/// Stochastic counterpart of the unitary edge map: B(e', e) = |U(e', e)|^2
/// is the transition probability for the step e -> e'. Row and column sums
/// are 1 because U is unitary.
struct MarkovMap {
  double energy = 0.0;
  RealMatrix matrix;

  int dimension() const { return static_cast<int>(matrix.rows()); }
};

inline MarkovMap build_b(const QuantumMap& u) { return {u.energy, u.matrix.cwiseAbs2()}; }

/// Max deviation of any row or column sum from 1.
inline double bistochasticity_error(const MarkovMap& b) {
  const double row = (b.matrix.rowwise().sum().array() - 1.0).abs().maxCoeff();
  const double col = (b.matrix.colwise().sum().array() - 1.0).abs().maxCoeff();
  return std::max(row, col);
}

inline void validate_distribution(const RealVector& p, int dimension) {
  if (p.size() != dimension) throw PreconditionError("distribution length does not match edge count");
  if (p.minCoeff() < -1e-15) throw PreconditionError("distribution has negative entries");
  if (std::abs(p.sum() - 1.0) > 1e-12) throw PreconditionError("distribution does not sum to 1");
}

/// p(n) = B^n p0.
inline RealVector evolve(const MarkovMap& b, const RealVector& p0, int steps) {
  if (steps < 0) throw PreconditionError("step count must be non-negative");
  validate_distribution(p0, b.dimension());
  RealVector p = p0;
  for (int i = 0; i < steps; ++i) p = b.matrix * p;
  return p;
}

/// (B^n)_{ee}: probability to return to edge e after n steps.
inline double return_probability(const MarkovMap& b, int edge, int steps) {
  if (edge < 0 || edge >= b.dimension()) throw PreconditionError("edge index out of range");
  if (steps < 1) throw PreconditionError("step count must be positive");
  RealVector p = RealVector::Zero(b.dimension());
  p[edge] = 1.0;
  for (int i = 0; i < steps; ++i) p = b.matrix * p;
  return p[edge];
}

/// Spectral data of B. eigenvalues[0] is the Frobenius eigenvalue 1 (uniform
/// eigenvector); the rest are sorted by descending modulus. The spectral gap
/// is 1 - max_{k != 1} |nu_k|; `mixing` if the gap clears 1e-10 and
/// `minus_one_present` if some eigenvalue sits within 1e-8 of -1.
struct MarkovSpectrum {
  ComplexVector eigenvalues;
  ComplexMatrix right_vectors;  // columns aligned with eigenvalues; empty when !full
  double gap = 0.0;
  bool mixing = false;
  bool minus_one_present = false;
  bool full = false;
};

namespace detail {

inline MarkovSpectrum classify_spectrum(ComplexVector values, ComplexMatrix vectors, bool full) {
  const int d = static_cast<int>(values.size());
  int frobenius = 0;
  double best = std::abs(values[0] - Complex(1.0, 0.0));
  for (int k = 1; k < d; ++k) {
    const double dist = std::abs(values[k] - Complex(1.0, 0.0));
    if (dist < best) {
      best = dist;
      frobenius = k;
    }
  }
  if (best > 1e-12)
    throw EigensolveFailure("Frobenius eigenvalue 1 not found (closest is off by " +
                            std::to_string(best) + ")");

  std::vector<int> order;
  order.reserve(d);
  order.push_back(frobenius);
  for (int k = 0; k < d; ++k)
    if (k != frobenius) order.push_back(k);
  std::sort(order.begin() + 1, order.end(), [&](int a, int b) {
    const double ma = std::abs(values[a]), mb = std::abs(values[b]);
    if (ma != mb) return ma > mb;
    if (values[a].real() != values[b].real()) return values[a].real() > values[b].real();
    return values[a].imag() > values[b].imag();
  });

  MarkovSpectrum out;
  out.eigenvalues.resize(d);
  if (full) out.right_vectors.resize(vectors.rows(), d);
  for (int k = 0; k < d; ++k) {
    out.eigenvalues[k] = values[order[k]];
    if (full) out.right_vectors.col(k) = vectors.col(order[k]);
  }
  out.full = full;
  double sub = 0.0;
  for (int k = 1; k < d; ++k) sub = std::max(sub, std::abs(out.eigenvalues[k]));
  out.gap = 1.0 - sub;
  out.mixing = out.gap > 1e-10;
  for (int k = 0; k < d; ++k)
    if (std::abs(out.eigenvalues[k] + Complex(1.0, 0.0)) < 1e-8) out.minus_one_present = true;
  return out;
}

/// Leading part of the spectrum by subspace iteration, for matrices too
/// large for a dense solve. Good enough for the gap and the +-1 flags.
inline MarkovSpectrum power_spectrum(const RealMatrix& b, int want) {
  const int d = static_cast<int>(b.rows());
  const int k = std::min(want, d);
  CounterRng rng(0x6d61726b6f76ULL, 0);
  RealMatrix x(d, k);
  for (int c = 0; c < k; ++c)
    for (int r = 0; r < d; ++r) x(r, c) = rng.uniform() - 0.5;

  Eigen::HouseholderQR<RealMatrix> qr(x);
  RealMatrix q = qr.householderQ() * RealMatrix::Identity(d, k);
  ComplexVector ritz_prev = ComplexVector::Zero(k);
  for (int iter = 0; iter < 500; ++iter) {
    const RealMatrix y = b * q;
    Eigen::HouseholderQR<RealMatrix> step(y);
    q = step.householderQ() * RealMatrix::Identity(d, k);
    if (iter % 10 == 9 || iter == 499) {
      const RealMatrix t = q.transpose() * b * q;
      Eigen::EigenSolver<RealMatrix> es(t);
      if (es.info() != Eigen::Success) throw EigensolveFailure("subspace iteration projection failed");
      ComplexVector ritz = es.eigenvalues();
      std::sort(ritz.data(), ritz.data() + ritz.size(),
                [](Complex a, Complex b) { return std::abs(a) > std::abs(b); });
      if ((ritz - ritz_prev).cwiseAbs().maxCoeff() < 1e-12) {
        ritz_prev = ritz;
        break;
      }
      ritz_prev = ritz;
    }
  }
  return classify_spectrum(ritz_prev, ComplexMatrix(), false);
}

}  // namespace detail

/// Full eigendecomposition for dimensions up to dense_cutoff; above that a
/// subspace iteration estimates the leading eigenvalues only.
inline MarkovSpectrum spectrum_b(const MarkovMap& b, int dense_cutoff = 2048) {
  if (b.dimension() > dense_cutoff) return detail::power_spectrum(b.matrix, 8);
  Eigen::EigenSolver<RealMatrix> es(b.matrix);
  if (es.info() != Eigen::Success)
    throw EigensolveFailure("eigendecomposition of B did not converge (D=" +
                            std::to_string(b.dimension()) + ")");
  return detail::classify_spectrum(es.eigenvalues(), es.eigenvectors(), true);
}

/// Uniform edge distribution, the fixed point of any bi-stochastic map.
inline RealVector uniform_distribution(int dimension) {
  return RealVector::Constant(dimension, 1.0 / dimension);
}

}  // namespace mxc
