#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "matrixchaos/common.hpp"
#include "matrixchaos/errors.hpp"
#include "matrixchaos/graph.hpp"
#include "matrixchaos/hermitian_matrix.hpp"
#include "matrixchaos/parallel.hpp"

namespace mxc {

/// Scattering matrix of a single vertex: the d_v x d_v unitary relating the
/// amplitudes incoming at v to the outgoing ones, rows/columns indexed by
/// the neighbors of v in ascending order.
struct VertexScattering {
  int vertex;
  double energy;
  ComplexMatrix matrix;
};

namespace detail {

/// sqrt(h) * exp(i*chi) per neighbor of v, where chi is the reversal-odd
/// gauge phase of the entry H(v, neighbor).
inline ComplexVector scattering_weights(const GraphStructure& g, const PolarEntries& polar, int v) {
  const auto& nb = g.neighbors(v);
  ComplexVector rho(static_cast<Eigen::Index>(nb.size()));
  for (std::size_t k = 0; k < nb.size(); ++k) {
    const int e_in = g.edge_index(nb[k], v);  // edge carrying H(v, nb[k])
    rho[static_cast<Eigen::Index>(k)] = std::sqrt(polar.h(e_in)) * polar.gauge_factor(e_in);
  }
  return rho;
}

inline ComplexMatrix vertex_sigma_impl(const HermitianMatrix& h, const GraphStructure& g,
                                       const PolarEntries& polar, int v, Complex energy) {
  const ComplexVector rho = scattering_weights(g, polar, v);
  const double gamma_v = rho.squaredNorm();  // sum of |H_vw| over neighbors
  const Complex denom = Complex(h.diagonal(v), 0.0) - energy - Complex(0.0, gamma_v);
  const int d = static_cast<int>(rho.size());
  ComplexMatrix sigma = Complex(0.0, 1.0) * ComplexMatrix::Identity(d, d);
  sigma.noalias() -= (2.0 / denom) * (rho.conjugate() * rho.transpose());
  return sigma;
}

}  // namespace detail

/// Scattering matrix at vertex v and real energy E.
inline VertexScattering vertex_sigma(const HermitianMatrix& h, const GraphStructure& g, int v,
                                     double energy) {
  const PolarEntries polar(h, g);
  return {v, energy, detail::vertex_sigma_impl(h, g, polar, v, energy)};
}

/// Energy-dependent unitary map on directed edges. matrix(e', e) is the
/// amplitude for the step e -> e'; it is nonzero only when the origin of e'
/// is the terminus of e. For maps produced by bipartite_reduce the vertex
/// blocks are absent and edge_subset lists the retained edges.
struct QuantumMap {
  double energy = 0.0;
  ComplexMatrix matrix;
  std::vector<ComplexMatrix> vertex_blocks;
  std::vector<int> reversal;
  std::vector<int> edge_subset;
  bool reduced = false;

  int dimension() const { return static_cast<int>(matrix.rows()); }
};

namespace detail {

inline ComplexMatrix assemble_u_matrix(const HermitianMatrix& h, const GraphStructure& g,
                                       Complex energy,
                                       std::vector<ComplexMatrix>* blocks_out = nullptr) {
  const PolarEntries polar(h, g);
  const int d = g.edge_count();
  ComplexMatrix u = ComplexMatrix::Zero(d, d);
  if (blocks_out) blocks_out->resize(g.vertex_count());
  for (int v = 0; v < g.vertex_count(); ++v) {
    ComplexMatrix sigma = vertex_sigma_impl(h, g, polar, v, energy);
    const auto& in = g.in_edges(v);
    const auto& out = g.out_edges(v);
    for (std::size_t col = 0; col < in.size(); ++col)
      for (std::size_t row = 0; row < out.size(); ++row)
        u(out[row], in[col]) = sigma(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
    if (blocks_out) (*blocks_out)[v] = std::move(sigma);
  }
  return u;
}

}  // namespace detail

/// Assembles the unitary edge map U(E) at real energy E.
inline QuantumMap assemble_u(const HermitianMatrix& h, const GraphStructure& g, double energy) {
  QuantumMap map;
  map.energy = energy;
  map.matrix = detail::assemble_u_matrix(h, g, Complex(energy, 0.0), &map.vertex_blocks);
  map.reversal.resize(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) map.reversal[e] = g.reversal(e);
  return map;
}

/// Max-norm deviation of U from unitarity.
inline double unitarity_error(const QuantumMap& map) {
  const Eigen::Index d = map.matrix.rows();
  return (map.matrix.adjoint() * map.matrix - ComplexMatrix::Identity(d, d))
      .cwiseAbs()
      .maxCoeff();
}

/// Secular determinant and the closed-form identity it must satisfy:
/// det(I - U(E)) == 2^{D/2} det(H - E) / prod_v(H_vv - E - i*Gamma_v),
/// the characteristic determinant oriented like the denominator factors
/// (checked numerically for both parities of V). Real zeros of either side
/// are exactly the eigenvalues of H; the poles of the right side sit at
/// E = H_vv - i*Gamma_v, strictly below the real axis.
struct SecularValue {
  Complex energy;
  Complex zeta;          // det(I - U(E))
  Complex identity_rhs;  // right-hand side of the identity
  double log_abs_zeta;   // finite even when zeta under/overflows
};

namespace detail {

/// prod_v (H_vv - E - i*Gamma_v), factored against overflow.
inline ScaledComplex pole_product(const HermitianMatrix& h, Complex energy) {
  ScaledComplex prod;
  for (int v = 0; v < h.size(); ++v)
    prod.multiply(Complex(h.diagonal(v), 0.0) - energy - Complex(0.0, gershgorin_parameter(h, v)));
  return prod;
}

inline ScaledComplex secular_det(const HermitianMatrix& h, const GraphStructure& g, Complex energy) {
  const ComplexMatrix u = assemble_u_matrix(h, g, energy);
  const Eigen::Index d = u.rows();
  return scaled_determinant(ComplexMatrix::Identity(d, d) - u);
}

/// det(I - U(E)) * prod_v(H_vv - E - i*Gamma_v) / 2^{D/2}. By the secular
/// identity this equals det(E - H), which is real for real E, so its sign
/// changes bracket the odd-multiplicity eigenvalues.
struct NormalizedSecular {
  Complex mantissa;  // exponent-free; only the phase/sign is meaningful
  double log_abs;
  double log_abs_zeta;
};

inline NormalizedSecular normalized_secular(const HermitianMatrix& h, const GraphStructure& g,
                                            double energy,
                                            const std::vector<int>* bipartition_colors = nullptr);

}  // namespace detail

/// Both sides of the secular identity at (possibly complex) energy. For
/// complex energies this is a diagnostic; unitarity of U holds on the real
/// axis only.
inline SecularValue secular(const HermitianMatrix& h, const GraphStructure& g, Complex energy) {
  const ScaledComplex zeta = detail::secular_det(h, g, energy);
  ComplexMatrix shifted = h.matrix();
  shifted.diagonal().array() -= energy;
  const ScaledComplex char_det = scaled_determinant(shifted);
  const ScaledComplex poles = detail::pole_product(h, energy);

  ScaledComplex rhs;
  rhs.mantissa = char_det.mantissa / poles.mantissa;
  rhs.exponent2 = char_det.exponent2 - poles.exponent2 + g.edge_count() / 2;
  rhs.normalize();

  return {energy, zeta.value(), rhs.value(), zeta.log_abs()};
}

inline SecularValue secular(const HermitianMatrix& h, const GraphStructure& g, double energy) {
  return secular(h, g, Complex(energy, 0.0));
}

/// Poles of the secular function: E = H_vv - i*Gamma_v per vertex.
inline std::vector<Complex> secular_poles(const HermitianMatrix& h) {
  std::vector<Complex> poles;
  poles.reserve(h.size());
  for (int v = 0; v < h.size(); ++v)
    poles.emplace_back(h.diagonal(v), -gershgorin_parameter(h, v));
  return poles;
}

/// Splits the edge map of a bipartite graph into its two off-diagonal
/// blocks and returns the D/2-dimensional product map on the edge class
/// whose origins are colored 0. Its secular determinant has the same real
/// zeros as the full map, and the derived stochastic matrix loses the
/// eigenvalue -1.
inline QuantumMap bipartite_reduce(const QuantumMap& map, const GraphStructure& g,
                                   const std::vector<int>& colors) {
  if (map.reduced) throw PreconditionError("map is already reduced");
  if (static_cast<int>(colors.size()) != g.vertex_count())
    throw NotBipartiteError("bipartition size does not match vertex count");
  for (int e = 0; e < g.edge_count(); ++e)
    if (colors[g.origin(e)] == colors[g.terminus(e)])
      throw NotBipartiteError("edge (" + std::to_string(g.origin(e)) + " -> " +
                              std::to_string(g.terminus(e)) + ") connects vertices in the same part");

  std::vector<int> class0, class1;
  for (int e = 0; e < g.edge_count(); ++e)
    (colors[g.origin(e)] == 0 ? class0 : class1).push_back(e);
  const int half = static_cast<int>(class0.size());

  ComplexMatrix up(half, half), down(half, half);
  for (int r = 0; r < half; ++r)
    for (int c = 0; c < half; ++c) {
      up(r, c) = map.matrix(class0[r], class1[c]);
      down(r, c) = map.matrix(class1[r], class0[c]);
    }

  QuantumMap out;
  out.energy = map.energy;
  out.matrix = up * down;
  out.edge_subset = std::move(class0);
  out.reduced = true;
  return out;
}

inline QuantumMap bipartite_reduce(const QuantumMap& map, const GraphStructure& g) {
  const auto colors = g.bipartition();
  if (!colors) throw NotBipartiteError("graph contains an odd cycle");
  return bipartite_reduce(map, g, *colors);
}

namespace detail {

inline NormalizedSecular normalized_secular(const HermitianMatrix& h, const GraphStructure& g,
                                            double energy, const std::vector<int>* bipartition_colors) {
  ScaledComplex zeta;
  if (bipartition_colors) {
    const QuantumMap full = assemble_u(h, g, energy);
    const QuantumMap red = bipartite_reduce(full, g, *bipartition_colors);
    const Eigen::Index d = red.matrix.rows();
    zeta = scaled_determinant(ComplexMatrix::Identity(d, d) - red.matrix);
  } else {
    zeta = secular_det(h, g, Complex(energy, 0.0));
  }
  const ScaledComplex poles = pole_product(h, Complex(energy, 0.0));
  ScaledComplex norm = zeta.times(poles);
  norm.exponent2 -= g.edge_count() / 2;
  return {norm.mantissa, norm.log_abs(), zeta.log_abs()};
}

/// Smallest singular value of I - U(E), plus the count of singular values
/// below the multiplicity threshold.
inline std::pair<double, int> kernel_probe(const HermitianMatrix& h, const GraphStructure& g,
                                           double energy, const std::vector<int>* colors,
                                           double multiplicity_tol) {
  ComplexMatrix m;
  if (colors) {
    const QuantumMap red = bipartite_reduce(assemble_u(h, g, energy), g, *colors);
    m = ComplexMatrix::Identity(red.matrix.rows(), red.matrix.cols()) - red.matrix;
  } else {
    const ComplexMatrix u = assemble_u_matrix(h, g, Complex(energy, 0.0));
    m = ComplexMatrix::Identity(u.rows(), u.cols()) - u;
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  const auto& sv = svd.singularValues();
  int count = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] < multiplicity_tol) ++count;
  return {sv[sv.size() - 1], count};
}

}  // namespace detail

struct SpectrumRoot {
  double value;
  int multiplicity;
  double residual;  // smallest singular value of I - U at the root
};

struct SpectrumResult {
  std::vector<SpectrumRoot> roots;
  std::vector<std::string> warnings;
};

struct FindSpectrumOptions {
  double refine_tol = 1e-10;     // bisection window width on E
  double sv_accept = 1e-7;       // kernel threshold for minima-route roots
  double multiplicity_tol = 1e-8;
  bool bipartite_reduce = false;
  int threads = 1;
};

/// Locates the real zeros of det(I - U(E)) in [lo, hi] by a sign-change scan
/// of the phase-normalized determinant on a uniform grid, refined by
/// bisection; even-multiplicity zeros are recovered by minimizing the
/// smallest singular value of I - U near grid dips. Roots are returned in
/// ascending order with a multiplicity estimate from the kernel dimension.
inline SpectrumResult find_spectrum(const HermitianMatrix& h, const GraphStructure& g, double lo,
                                    double hi, double grid_step, FindSpectrumOptions opts = {}) {
  if (!(grid_step > 0.0)) throw PreconditionError("grid step must be positive");
  if (!(hi > lo)) throw PreconditionError("empty energy window");

  std::optional<std::vector<int>> colors;
  if (opts.bipartite_reduce) {
    colors = g.bipartition();
    if (!colors) throw NotBipartiteError("graph contains an odd cycle");
  }
  const std::vector<int>* colors_ptr = colors ? &*colors : nullptr;

  const int n = std::max(2, static_cast<int>(std::ceil((hi - lo) / grid_step)) + 1);
  const double step = (hi - lo) / (n - 1);
  std::vector<double> grid(n), log_abs(n), re_sign(n);
  parallel_for(n, opts.threads, [&](int i) {
    grid[i] = lo + step * i;
    const auto val = detail::normalized_secular(h, g, grid[i], colors_ptr);
    log_abs[i] = val.log_abs;
    re_sign[i] = val.mantissa.real();
  });

  SpectrumResult result;
  std::vector<std::pair<double, double>> brackets;

  auto sign_at = [&](double e) {
    return detail::normalized_secular(h, g, e, colors_ptr).mantissa.real();
  };

  for (int i = 0; i + 1 < n; ++i) {
    const double a = re_sign[i], b = re_sign[i + 1];
    if (a == 0.0) continue;  // handled as its own root below
    if ((a > 0.0) == (b > 0.0) || b == 0.0) continue;
    double left = grid[i], right = grid[i + 1], fl = a;
    while (right - left > opts.refine_tol) {
      const double mid = 0.5 * (left + right);
      const double fm = sign_at(mid);
      if (fm == 0.0) {
        left = right = mid;
        break;
      }
      if ((fm > 0.0) == (fl > 0.0)) {
        left = mid;
        fl = fm;
      } else {
        right = mid;
      }
    }
    const double root = 0.5 * (left + right);
    const auto [sv, count] = detail::kernel_probe(h, g, root, colors_ptr, opts.multiplicity_tol);
    result.roots.push_back({root, std::max(count, 1), sv});
    brackets.emplace_back(grid[i], grid[i + 1]);
  }

  // Exact zeros on grid nodes.
  for (int i = 0; i < n; ++i) {
    if (re_sign[i] == 0.0 && std::isfinite(log_abs[i]) == false) {
      const auto [sv, count] = detail::kernel_probe(h, g, grid[i], colors_ptr, opts.multiplicity_tol);
      result.roots.push_back({grid[i], std::max(count, 1), sv});
    }
  }

  // Even-multiplicity roots never flip the sign; look for dips of |det| and
  // polish them against the kernel of I - U.
  const double inv_golden = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 1; i + 1 < n; ++i) {
    // Dip of |det|, allowing ties so symmetric grids cannot hide a root
    // half-way between two equal samples.
    const bool dip = log_abs[i] <= log_abs[i - 1] && log_abs[i] <= log_abs[i + 1] &&
                     (log_abs[i] < log_abs[i - 1] || log_abs[i] < log_abs[i + 1]);
    if (!dip) continue;
    const double win_lo = grid[i - 1], win_hi = grid[i + 1];
    bool covered = false;
    for (const auto& [bl, bh] : brackets)
      if (bl <= win_hi && bh >= win_lo) covered = true;
    if (covered) continue;

    auto sv_at = [&](double e) {
      return detail::kernel_probe(h, g, e, colors_ptr, opts.multiplicity_tol).first;
    };
    double a = win_lo, b = win_hi;
    double x1 = b - inv_golden * (b - a), x2 = a + inv_golden * (b - a);
    double f1 = sv_at(x1), f2 = sv_at(x2);
    while (b - a > opts.refine_tol) {
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - inv_golden * (b - a);
        f1 = sv_at(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + inv_golden * (b - a);
        f2 = sv_at(x2);
      }
    }
    const double candidate = 0.5 * (a + b);
    const auto [sv, count] = detail::kernel_probe(h, g, candidate, colors_ptr, opts.multiplicity_tol);
    if (sv < opts.sv_accept) result.roots.push_back({candidate, std::max(count, 1), sv});
  }

  std::sort(result.roots.begin(), result.roots.end(),
            [](const SpectrumRoot& a, const SpectrumRoot& b) { return a.value < b.value; });

  // Collapse duplicates found by both routes.
  std::vector<SpectrumRoot> unique;
  for (const auto& r : result.roots) {
    if (!unique.empty() && std::abs(r.value - unique.back().value) <
                               10.0 * opts.refine_tol * (1.0 + std::abs(r.value))) {
      if (r.residual < unique.back().residual) unique.back() = r;
      continue;
    }
    unique.push_back(r);
  }
  result.roots = std::move(unique);

  for (std::size_t i = 0; i + 1 < result.roots.size(); ++i)
    if (result.roots[i + 1].value - result.roots[i].value < 2.0 * step)
      result.warnings.push_back("GridTooCoarse: roots " + std::to_string(result.roots[i].value) +
                                " and " + std::to_string(result.roots[i + 1].value) +
                                " are closer than twice the grid step");
  return result;
}

/// Fixed-point amplitudes a with U a ~= a, from the smallest singular pair
/// of I - U; residual is that singular value.
struct FixedPoint {
  ComplexVector amplitudes;
  double residual;
};

inline FixedPoint fixed_point_amplitudes(const QuantumMap& map) {
  const Eigen::Index d = map.matrix.rows();
  Eigen::JacobiSVD<ComplexMatrix> svd(ComplexMatrix::Identity(d, d) - map.matrix,
                                      Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  return {svd.matrixV().col(d - 1), sv[d - 1]};
}

/// Recovers the vertex wavefunction from edge amplitudes at a spectrum
/// point. Every edge incident to v yields its own candidate for phi_v; they
/// must agree to the given tolerance, the mean is returned, and the result
/// must satisfy the eigenvalue equation at the given energy.
inline ComplexVector reconstruct_wavefunction(const ComplexVector& amplitudes,
                                              const HermitianMatrix& h, const GraphStructure& g,
                                              double energy, double tol = 1e-8) {
  if (amplitudes.size() != g.edge_count())
    throw PreconditionError("amplitude vector length does not match edge count");
  const PolarEntries polar(h, g);
  const Complex plus = std::polar(1.0, std::numbers::pi / 4.0);
  const Complex minus = std::conj(plus);

  ComplexVector phi(g.vertex_count());
  std::vector<std::vector<Complex>> candidates(g.vertex_count());
  double scale = 1.0;
  for (int v = 0; v < g.vertex_count(); ++v) {
    for (int w : g.neighbors(v)) {
      const int e_in = g.edge_index(w, v);
      const int e_out = g.edge_index(v, w);
      const Complex value = polar.gauge_factor(e_in) / std::sqrt(polar.h(e_in)) *
                            (amplitudes[e_out] * plus + amplitudes[e_in] * minus);
      candidates[v].push_back(value);
      scale = std::max(scale, std::abs(value));
    }
  }
  for (int v = 0; v < g.vertex_count(); ++v) {
    Complex mean(0.0, 0.0);
    for (const Complex& c : candidates[v]) mean += c;
    mean /= static_cast<double>(candidates[v].size());
    for (const Complex& c : candidates[v])
      if (std::abs(c - mean) > tol * scale)
        throw InconsistentAmplitudes("wavefunction reconstructions at vertex " + std::to_string(v) +
                                     " disagree beyond tolerance");
    phi[v] = mean;
  }
  if (phi.norm() < 1e-12 * amplitudes.norm())
    throw InconsistentAmplitudes("reconstructed wavefunction collapsed to zero");
  const double residual = (h.matrix() * phi - energy * phi).norm() / phi.norm();
  if (residual > tol * (1.0 + std::abs(energy)))
    throw InconsistentAmplitudes("reconstruction does not satisfy the eigenvalue equation (residual " +
                                 std::to_string(residual) + ")");
  return phi;
}

}  // namespace mxc
