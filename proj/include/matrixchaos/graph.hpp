#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <optional>
#include <vector>

#include "matrixchaos/common.hpp"
#include "matrixchaos/errors.hpp"
#include "matrixchaos/hermitian_matrix.hpp"

namespace mxc {

/// Directed edge of the underlying graph. The edge written (origin -> terminus)
/// carries the amplitude moving from origin to terminus, i.e. it corresponds
/// to the matrix entry H(terminus, origin).
struct DirectedEdge {
  int origin;
  int terminus;
  friend bool operator==(const DirectedEdge&, const DirectedEdge&) = default;
};

/// Vertices, degrees and the canonical directed-edge list of a Hermitian
/// matrix. Edges are sorted by (origin, terminus); every matrix over edge
/// space in this library uses that order.
class GraphStructure {
 public:
  explicit GraphStructure(const HermitianMatrix& h) {
    const int v = h.size();
    vertex_count_ = v;
    degrees_.assign(v, 0);
    neighbors_.assign(v, {});
    for (int a = 0; a < v; ++a)
      for (int b = 0; b < v; ++b)
        if (h.is_edge(a, b)) neighbors_[a].push_back(b);
    for (int a = 0; a < v; ++a) degrees_[a] = static_cast<int>(neighbors_[a].size());

    edge_index_.assign(static_cast<std::size_t>(v) * v, -1);
    out_edges_.assign(v, {});
    in_edges_.assign(v, {});
    for (int origin = 0; origin < v; ++origin) {
      for (int terminus : neighbors_[origin]) {
        const int e = static_cast<int>(edges_.size());
        edges_.push_back({origin, terminus});
        edge_index_[static_cast<std::size_t>(origin) * v + terminus] = e;
        out_edges_[origin].push_back(e);
      }
    }
    for (int e = 0; e < edge_count(); ++e) in_edges_[edges_[e].terminus].push_back(e);

    reversal_.resize(edges_.size());
    for (int e = 0; e < edge_count(); ++e)
      reversal_[e] = edge_index(edges_[e].terminus, edges_[e].origin);
  }

  int vertex_count() const { return vertex_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int degree(int v) const { return degrees_[v]; }
  const std::vector<int>& degrees() const { return degrees_; }

  const DirectedEdge& edge(int e) const { return edges_[e]; }
  const std::vector<DirectedEdge>& edges() const { return edges_; }
  int origin(int e) const { return edges_[e].origin; }
  int terminus(int e) const { return edges_[e].terminus; }
  int reversal(int e) const { return reversal_[e]; }

  /// Index of the directed edge origin -> terminus, or -1 if absent.
  int edge_index(int origin, int terminus) const {
    return edge_index_[static_cast<std::size_t>(origin) * vertex_count_ + terminus];
  }

  /// Neighbors of v in ascending order; positions in this list index the
  /// rows/columns of the vertex scattering matrix at v.
  const std::vector<int>& neighbors(int v) const { return neighbors_[v]; }
  /// Position of w within neighbors(v); requires adjacency.
  int neighbor_slot(int v, int w) const {
    const auto& nb = neighbors_[v];
    return static_cast<int>(std::lower_bound(nb.begin(), nb.end(), w) - nb.begin());
  }

  /// Edges with origin v, ascending terminus (contiguous in canonical order).
  const std::vector<int>& out_edges(int v) const { return out_edges_[v]; }
  /// Edges with terminus v, ascending origin.
  const std::vector<int>& in_edges(int v) const { return in_edges_[v]; }

  /// 0/1 adjacency indicator.
  Eigen::MatrixXi adjacency() const {
    Eigen::MatrixXi a = Eigen::MatrixXi::Zero(vertex_count_, vertex_count_);
    for (const auto& e : edges_) a(e.terminus, e.origin) = 1;
    return a;
  }

  /// Two-coloring of the vertices if the graph is bipartite.
  std::optional<std::vector<int>> bipartition() const {
    std::vector<int> color(vertex_count_, -1);
    std::deque<int> queue;
    color[0] = 0;
    queue.push_back(0);
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      for (int w : neighbors_[v]) {
        if (color[w] == -1) {
          color[w] = 1 - color[v];
          queue.push_back(w);
        } else if (color[w] == color[v]) {
          return std::nullopt;
        }
      }
    }
    return color;
  }

 private:
  int vertex_count_ = 0;
  std::vector<int> degrees_;
  std::vector<DirectedEdge> edges_;
  std::vector<int> reversal_;
  std::vector<int> edge_index_;
  std::vector<std::vector<int>> neighbors_;
  std::vector<std::vector<int>> out_edges_;
  std::vector<std::vector<int>> in_edges_;
};

inline GraphStructure build_graph(const HermitianMatrix& h) { return GraphStructure(h); }

/// Polar data of the off-diagonal entries: H(terminus, origin) written as
/// h * exp(2i*gamma) per directed edge, with gamma in (-pi/2, pi/2].
///
/// gamma() reports the principal value on every directed edge, so both
/// directions of a negative real coupling report +pi/2. The scattering
/// construction needs phases that are antisymmetric under edge reversal;
/// gauge_phase() flips the sign on the direction with origin < terminus in
/// that boundary case and is the value used to build unitary maps.
class PolarEntries {
 public:
  PolarEntries(const HermitianMatrix& h, const GraphStructure& g) {
    const int d = g.edge_count();
    magnitude_.resize(d);
    gamma_.resize(d);
    gauge_.resize(d);
    constexpr double half_pi = std::numbers::pi / 2.0;
    for (int e = 0; e < d; ++e) {
      const Complex value = h(g.terminus(e), g.origin(e));
      magnitude_[e] = std::abs(value);
      double gm = 0.5 * std::atan2(value.imag(), value.real());
      if (gm <= -half_pi) gm = half_pi;  // arg == -pi maps to the closed end
      gamma_[e] = gm;
      gauge_[e] = (gm == half_pi && g.terminus(e) > g.origin(e)) ? -half_pi : gm;
    }
  }

  double h(int e) const { return magnitude_[e]; }
  double gamma(int e) const { return gamma_[e]; }
  double gauge_phase(int e) const { return gauge_[e]; }

  /// exp(i * gauge_phase) as a complex factor.
  Complex gauge_factor(int e) const { return std::polar(1.0, gauge_[e]); }

 private:
  std::vector<double> magnitude_;
  std::vector<double> gamma_;
  std::vector<double> gauge_;
};

inline PolarEntries polar_entries(const HermitianMatrix& h, const GraphStructure& g) {
  return PolarEntries(h, g);
}

/// Gershgorin parameters and the kinetic/potential split H = -L + W.
/// L has diagonal Gamma_v and off-diagonal -H_vw; it is positive
/// semidefinite because each Gershgorin circle has center Gamma_v and
/// radius Gamma_v. W is the diagonal H_vv + Gamma_v.
struct GershgorinData {
  RealVector gamma;
  ComplexMatrix laplacian;
  RealVector potential;
};

inline GershgorinData gershgorin(const HermitianMatrix& h) {
  const int v = h.size();
  GershgorinData out;
  out.gamma = RealVector::Zero(v);
  out.laplacian = ComplexMatrix::Zero(v, v);
  out.potential = RealVector::Zero(v);
  for (int a = 0; a < v; ++a) {
    double g = 0.0;
    for (int b = 0; b < v; ++b) {
      if (b == a) continue;
      g += std::abs(h(a, b));
      out.laplacian(a, b) = -h(a, b);
    }
    out.gamma[a] = g;
    out.laplacian(a, a) = g;
    out.potential[a] = h.diagonal(a) + g;
  }
  return out;
}

/// Gershgorin parameter of a single row.
inline double gershgorin_parameter(const HermitianMatrix& h, int v) {
  double g = 0.0;
  for (int b = 0; b < h.size(); ++b)
    if (b != v) g += std::abs(h(v, b));
  return g;
}

/// Interval [lo, hi] containing the whole spectrum (union of Gershgorin disks).
inline std::pair<double, double> spectral_hull(const HermitianMatrix& h) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int v = 0; v < h.size(); ++v) {
    const double g = gershgorin_parameter(h, v);
    lo = std::min(lo, h.diagonal(v) - g);
    hi = std::max(hi, h.diagonal(v) + g);
  }
  return {lo, hi};
}

}  // namespace mxc
