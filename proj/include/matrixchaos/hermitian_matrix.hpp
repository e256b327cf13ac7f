#pragma once

#include <numeric>
#include <utility>
#include <vector>

#include "matrixchaos/common.hpp"
#include "matrixchaos/errors.hpp"

namespace mxc {

struct MatrixOptions {
  /// Complete missing conjugate triplets instead of rejecting them.
  bool symmetrize = false;
  /// |H_vw| above this counts as an edge of the underlying graph.
  double zero_threshold = 1e-14;
  /// Maximum allowed asymmetry |H_vw - conj(H_wv)| on input.
  double hermiticity_tol = 1e-12;
};

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(int a, int b) { parent_[find(a)] = find(b); }

 private:
  std::vector<int> parent_;
};

}  // namespace detail

/// Validated V x V complex Hermitian matrix. After construction the stored
/// matrix is exactly Hermitian (real diagonal, H_wv == conj(H_vw)) and its
/// off-diagonal support forms a connected undirected graph.
class HermitianMatrix {
 public:
  static HermitianMatrix from_dense(const ComplexMatrix& input, MatrixOptions opts = {}) {
    if (input.rows() != input.cols() || input.rows() == 0)
      throw ParseError("matrix must be square and non-empty");
    const int v = static_cast<int>(input.rows());

    ComplexMatrix h = input;
    for (int r = 0; r < v; ++r) {
      if (std::abs(h(r, r).imag()) > opts.hermiticity_tol)
        throw HermiticityError("diagonal entry " + std::to_string(r) + " is not real");
      h(r, r) = Complex(h(r, r).real(), 0.0);
      for (int c = r + 1; c < v; ++c) {
        const Complex upper = h(r, c);
        const Complex lower = h(c, r);
        if (opts.symmetrize && upper != Complex(0, 0) && lower == Complex(0, 0)) {
          h(c, r) = std::conj(upper);
          continue;
        }
        if (opts.symmetrize && lower != Complex(0, 0) && upper == Complex(0, 0)) {
          h(r, c) = std::conj(lower);
          continue;
        }
        if (std::abs(upper - std::conj(lower)) > opts.hermiticity_tol)
          throw HermiticityError("entries (" + std::to_string(r) + "," + std::to_string(c) +
                                 ") and transpose differ beyond tolerance");
        const Complex sym = (upper + std::conj(lower)) / 2.0;
        h(r, c) = sym;
        h(c, r) = std::conj(sym);
      }
    }

    HermitianMatrix out;
    out.mat_ = std::move(h);
    out.zero_threshold_ = opts.zero_threshold;
    out.validate_graph();
    return out;
  }

  /// Triplet constructor used by the document loader. Duplicate (row, col)
  /// entries are rejected rather than summed.
  static HermitianMatrix from_triplets(int v,
                                       const std::vector<std::tuple<int, int, Complex>>& entries,
                                       MatrixOptions opts = {}) {
    if (v <= 0) throw ParseError("matrix size must be positive");
    ComplexMatrix h = ComplexMatrix::Zero(v, v);
    std::vector<char> seen(static_cast<std::size_t>(v) * v, 0);
    for (const auto& [r, c, val] : entries) {
      if (r < 0 || r >= v || c < 0 || c >= v)
        throw ParseError("entry index (" + std::to_string(r) + "," + std::to_string(c) +
                         ") out of range for size " + std::to_string(v));
      auto& flag = seen[static_cast<std::size_t>(r) * v + c];
      if (flag) throw ParseError("duplicate entry at (" + std::to_string(r) + "," + std::to_string(c) + ")");
      flag = 1;
      h(r, c) = val;
    }
    return from_dense(h, opts);
  }

  int size() const { return static_cast<int>(mat_.rows()); }
  const ComplexMatrix& matrix() const { return mat_; }
  Complex operator()(int v, int w) const { return mat_(v, w); }
  double diagonal(int v) const { return mat_(v, v).real(); }
  double zero_threshold() const { return zero_threshold_; }

  bool is_edge(int v, int w) const { return v != w && std::abs(mat_(v, w)) > zero_threshold_; }

  /// Off-diagonal nonzeros as (row, col, value), row-major order.
  std::vector<std::tuple<int, int, Complex>> off_diagonal_triplets() const {
    std::vector<std::tuple<int, int, Complex>> out;
    for (int r = 0; r < size(); ++r)
      for (int c = 0; c < size(); ++c)
        if (is_edge(r, c)) out.emplace_back(r, c, mat_(r, c));
    return out;
  }

 private:
  HermitianMatrix() = default;

  void validate_graph() const {
    const int v = size();
    detail::UnionFind uf(v);
    int edge_ends = 0;
    for (int r = 0; r < v; ++r) {
      for (int c = r + 1; c < v; ++c) {
        if (is_edge(r, c)) {
          uf.unite(r, c);
          edge_ends += 2;
        }
      }
    }
    if (edge_ends == 0) throw EmptyGraphError("matrix has no off-diagonal entries above the zero threshold");
    const int root = uf.find(0);
    for (int r = 1; r < v; ++r)
      if (uf.find(r) != root)
        throw DisconnectedError("matrix is block-diagonal: vertex " + std::to_string(r) +
                                " is not reachable from vertex 0");
  }

  ComplexMatrix mat_;
  double zero_threshold_ = 1e-14;
};

}  // namespace mxc
