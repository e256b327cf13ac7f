#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "matrixchaos/common.hpp"
#include "matrixchaos/errors.hpp"
#include "matrixchaos/graph.hpp"
#include "matrixchaos/markov.hpp"
#include "matrixchaos/parallel.hpp"
#include "matrixchaos/rng.hpp"

namespace mxc {

/// Mean Lyapunov exponent of the edge Markov map, in nats per step:
/// -(1/D) sum_{e,e'} B_{e',e} log B_{e',e}, with 0 log 0 = 0.
inline double mean_lyapunov(const MarkovMap& b) {
  double s = 0.0;
  for (Eigen::Index c = 0; c < b.matrix.cols(); ++c)
    for (Eigen::Index r = 0; r < b.matrix.rows(); ++r) s += xlogx(b.matrix(r, c));
  return -s / static_cast<double>(b.dimension());
}

struct LocalLyapunov {
  RealVector per_edge;    // spread of trajectories leaving the terminus of e
  RealVector per_vertex;  // degree-weighted mean over edges ending at v
};

/// Per-edge exponent: Lambda_e = -sum_{e'} B_{e',e} log B_{e',e} (the column
/// entropy of B at e); per-vertex: mean of Lambda_e over edges with
/// terminus v. The edge average of Lambda_e reproduces mean_lyapunov.
inline LocalLyapunov local_lyapunov(const MarkovMap& b, const GraphStructure& g) {
  if (b.dimension() != g.edge_count())
    throw PreconditionError("local exponents require the unreduced edge map");
  LocalLyapunov out;
  out.per_edge = RealVector::Zero(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    double s = 0.0;
    for (Eigen::Index r = 0; r < b.matrix.rows(); ++r) s += xlogx(b.matrix(r, e));
    out.per_edge[e] = -s;
  }
  out.per_vertex = RealVector::Zero(g.vertex_count());
  for (int v = 0; v < g.vertex_count(); ++v) {
    double s = 0.0;
    for (int e : g.in_edges(v)) s += out.per_edge[e];
    out.per_vertex[v] = s / g.degree(v);
  }
  return out;
}

/// Entrywise power Q(beta) = B^beta with 0^beta = 0 (also for beta = 0, so
/// Q(0) is the support indicator).
inline RealMatrix q_matrix(const MarkovMap& b, double beta) {
  if (beta < 0.0) throw PreconditionError("beta must be non-negative");
  RealMatrix q(b.matrix.rows(), b.matrix.cols());
  for (Eigen::Index c = 0; c < b.matrix.cols(); ++c)
    for (Eigen::Index r = 0; r < b.matrix.rows(); ++r) {
      const double x = b.matrix(r, c);
      q(r, c) = x > 0.0 ? std::pow(x, beta) : 0.0;
    }
  return q;
}

namespace detail {

/// Eigenvalue of largest real part (the Perron root for these matrices).
inline double leading_eigenvalue(const RealMatrix& m) {
  Eigen::EigenSolver<RealMatrix> es(m, false);
  if (es.info() != Eigen::Success) throw EigensolveFailure("leading-eigenvalue solve failed");
  const auto& vals = es.eigenvalues();
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < vals.size(); ++k)
    if (vals[k].real() > vals[best].real()) best = k;
  const double mu = vals[best].real();
  if (!(mu > 0.0)) throw EigensolveFailure("leading eigenvalue is not positive");
  return mu;
}

}  // namespace detail

/// Leading eigenvalue mu(eps) of Q(1+eps) on the five-point stencil
/// {-2h, -h, 0, h, 2h}, with the Lyapunov exponent and its variance from
/// Richardson-refined central differences of log mu at eps = 0.
struct ThermoCurve {
  std::array<double, 5> eps;
  std::array<double, 5> mu;
  double lambda;
  double variance;
};

inline ThermoCurve thermo_lyapunov(const MarkovMap& b, double eps_step = 1e-3) {
  if (!(eps_step > 0.0) || eps_step > 1e-3)
    throw PreconditionError("eps_step must lie in (0, 1e-3]");
  const double h = eps_step;
  ThermoCurve out;
  out.eps = {-2.0 * h, -h, 0.0, h, 2.0 * h};
  std::array<double, 5> logmu;
  for (int i = 0; i < 5; ++i) {
    out.mu[i] = detail::leading_eigenvalue(q_matrix(b, 1.0 + out.eps[i]));
    logmu[i] = std::log(out.mu[i]);
  }
  const double d1_h = (logmu[3] - logmu[1]) / (2.0 * h);
  const double d1_2h = (logmu[4] - logmu[0]) / (4.0 * h);
  out.lambda = -(4.0 * d1_h - d1_2h) / 3.0;
  const double d2_h = (logmu[3] - 2.0 * logmu[2] + logmu[1]) / (h * h);
  const double d2_2h = (logmu[4] - 2.0 * logmu[2] + logmu[0]) / (4.0 * h * h);
  out.variance = (4.0 * d2_h - d2_2h) / 3.0;
  return out;
}

/// Asymptotic variance of the per-step log-probability, by the spectral
/// formula. `spectral` resolves the eigenvector overlaps with biorthogonal
/// left/right pairs, which reproduces the thermodynamic second derivative;
/// `literal` is the same sum read with unit-norm right eigenvectors on both
/// sides and is reported for comparison. `thermo` is cross-computed and the
/// two are flagged inconsistent when they differ by more than 1e-4 relative.
struct VarianceResult {
  double spectral;
  double thermo;
  double literal;
  double relative_gap;
  bool consistent;
};

inline VarianceResult variance_lyapunov(const MarkovMap& b, const MarkovSpectrum& spec,
                                        double eps_step = 1e-3) {
  if (!spec.full) throw PreconditionError("variance needs the full eigendecomposition of B");
  const int d = b.dimension();
  for (Eigen::Index k = 1; k < spec.eigenvalues.size(); ++k)
    if (std::abs(Complex(1.0, 0.0) - spec.eigenvalues[k]) < 1e-10)
      throw DegenerateSpectrum("eigenvalue 1 is degenerate; reduce bipartite input first");

  // G'_{e',e} = -B_{e',e} log B_{e',e}; its column sums are the per-edge
  // exponents, its row sums the entropy of arriving at e'.
  RealMatrix gp(d, d);
  double second_moment_term = 0.0;
  for (int c = 0; c < d; ++c)
    for (int r = 0; r < d; ++r) {
      const double x = b.matrix(r, c);
      gp(r, c) = -xlogx(x);
      if (x > 0.0) {
        const double lx = std::log(x);
        second_moment_term += x * lx * lx;
      }
    }
  second_moment_term /= static_cast<double>(d);

  const double lambda = mean_lyapunov(b);

  Eigen::FullPivLU<ComplexMatrix> lu(spec.right_vectors);
  if (!lu.isInvertible())
    throw EigensolveFailure("eigenvector matrix of B is numerically singular");
  const ComplexMatrix left = lu.inverse();  // rows biorthogonal to the columns of R

  const RealVector col_entropy = gp.colwise().sum();  // = per-edge exponents
  const RealVector row_entropy = gp.rowwise().sum();
  const ComplexVector g_right = spec.right_vectors.transpose() * col_entropy.cast<Complex>();
  const ComplexVector left_u = left * row_entropy.cast<Complex>();

  Complex correction(0.0, 0.0);
  for (int k = 1; k < d; ++k)
    correction += g_right[k] * left_u[k] / (Complex(1.0, 0.0) - spec.eigenvalues[k]);
  correction *= 2.0 / static_cast<double>(d);

  VarianceResult out;
  out.spectral = second_moment_term - lambda * lambda + correction.real();

  // Reading with unit-norm right eigenvectors and the uniform bra on both
  // sides of the squared overlap.
  Complex literal_sum(0.0, 0.0);
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
  for (int k = 1; k < d; ++k) {
    const ComplexVector rk = spec.right_vectors.col(k).normalized();
    const Complex overlap = -inv_sqrt_d * (row_entropy.cast<Complex>().transpose() * rk)(0);
    literal_sum += 2.0 * std::norm(overlap) / (Complex(1.0, 0.0) - spec.eigenvalues[k]);
  }
  out.literal = second_moment_term - lambda * lambda + literal_sum.real();

  out.thermo = thermo_lyapunov(b, eps_step).variance;
  const double scale = std::max({std::abs(out.thermo), std::abs(out.spectral), 1e-12});
  out.relative_gap = std::abs(out.spectral - out.thermo) / scale;
  out.consistent = out.relative_gap <= 1e-4;
  return out;
}

/// Monte Carlo estimate of the Lyapunov exponent from sampled trajectories.
/// Sample i uses the counter stream (seed, i), so results are bitwise
/// reproducible for a fixed seed regardless of the thread count.
struct McResult {
  double mean;
  double std_error;
  double variance;            // asymptotic rate: t * Var[per-trajectory mean]
  double variance_std_error;
  std::int64_t samples;
  int steps;
};

inline McResult mc_lyapunov(const MarkovMap& b, int steps, std::int64_t samples,
                            std::uint64_t seed, int threads = 1) {
  if (steps < 1) throw PreconditionError("trajectory length must be at least 1");
  if (samples < 1) throw PreconditionError("sample count must be at least 1");
  const int d = b.dimension();

  // Column-wise transition tables: cumulative probabilities and -log B.
  std::vector<int> col_start(d + 1, 0);
  std::vector<int> succ;
  std::vector<double> cum;
  std::vector<double> neg_log;
  for (int c = 0; c < d; ++c) {
    col_start[c] = static_cast<int>(succ.size());
    double total = 0.0;
    for (int r = 0; r < d; ++r) total += b.matrix(r, c) > 0.0 ? b.matrix(r, c) : 0.0;
    double acc = 0.0;
    for (int r = 0; r < d; ++r) {
      const double x = b.matrix(r, c);
      if (x <= 0.0) continue;
      acc += x / total;
      succ.push_back(r);
      cum.push_back(acc);
      neg_log.push_back(-std::log(x));
    }
    cum.back() = 1.0;  // guard against rounding at the top
  }
  col_start[d] = static_cast<int>(succ.size());

  std::vector<double> value(static_cast<std::size_t>(samples));
  parallel_for(static_cast<int>(samples), threads, [&](int i) {
    CounterRng rng(seed, static_cast<std::uint64_t>(i));
    int e = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(d)));
    double acc = 0.0;
    for (int s = 0; s < steps; ++s) {
      const double u = rng.uniform();
      const int lo = col_start[e], hi = col_start[e + 1];
      int a = lo, z = hi - 1;
      while (a < z) {
        const int mid = (a + z) / 2;
        if (cum[mid] < u)
          a = mid + 1;
        else
          z = mid;
      }
      acc += neg_log[a];
      e = succ[a];
    }
    value[static_cast<std::size_t>(i)] = acc / steps;
  });

  double mean = 0.0;
  for (double v : value) mean += v;
  mean /= static_cast<double>(samples);
  double var = 0.0;
  for (double v : value) var += (v - mean) * (v - mean);
  var = samples > 1 ? var / static_cast<double>(samples - 1) : 0.0;

  McResult out;
  out.mean = mean;
  out.std_error = std::sqrt(var / static_cast<double>(samples));
  out.variance = static_cast<double>(steps) * var;
  out.variance_std_error =
      samples > 1 ? out.variance * std::sqrt(2.0 / static_cast<double>(samples - 1)) : 0.0;
  out.samples = samples;
  out.steps = steps;
  return out;
}

/// Structural upper bounds: log d at the terminus per edge, log d_v per
/// vertex, and (1/D) sum_v d_v log d_v globally.
struct LyapunovBounds {
  RealVector per_edge;
  RealVector per_vertex;
  double global;
};

inline LyapunovBounds lyapunov_bounds(const GraphStructure& g) {
  LyapunovBounds out;
  out.per_edge = RealVector::Zero(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e)
    out.per_edge[e] = std::log(static_cast<double>(g.degree(g.terminus(e))));
  out.per_vertex = RealVector::Zero(g.vertex_count());
  double global = 0.0;
  for (int v = 0; v < g.vertex_count(); ++v) {
    out.per_vertex[v] = std::log(static_cast<double>(g.degree(v)));
    global += g.degree(v) * out.per_vertex[v];
  }
  out.global = global / g.edge_count();
  return out;
}

/// Decay table for energies outside the spectrum: Lambda(E) falls off like
/// log(E)/E^2, so the ratio column stays bounded.
struct DecayRow {
  double energy;
  double lambda;
  double ratio;  // lambda * E^2 / log |E|
};

inline std::vector<DecayRow> large_e_decay(const HermitianMatrix& h, const GraphStructure& g,
                                           const std::vector<double>& energies) {
  const auto [lo, hi] = spectral_hull(h);
  std::vector<DecayRow> rows;
  rows.reserve(energies.size());
  for (double e : energies) {
    if (e >= lo && e <= hi)
      throw PreconditionError("energy " + std::to_string(e) + " lies inside the spectral hull [" +
                              std::to_string(lo) + ", " + std::to_string(hi) + "]");
    if (std::abs(e) <= 1.0)
      throw PreconditionError("decay ratio needs |E| > 1");
    const double lambda = mean_lyapunov(build_b(assemble_u(h, g, e)));
    rows.push_back({e, lambda, lambda * e * e / std::log(std::abs(e))});
  }
  return rows;
}

}  // namespace mxc
