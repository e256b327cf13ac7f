#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "matrixchaos/common.hpp"
#include "matrixchaos/errors.hpp"
#include "matrixchaos/graph.hpp"
#include "matrixchaos/markov.hpp"
#include "matrixchaos/quantum_map.hpp"

namespace mxc {

namespace detail {

inline ComplexMatrix matrix_power(const ComplexMatrix& m, int t) {
  ComplexMatrix out = ComplexMatrix::Identity(m.rows(), m.cols());
  for (int i = 0; i < t; ++i) out = m * out;
  return out;
}

}  // namespace detail

/// All edge itineraries of t steps from edge_from to edge_to, each stored
/// with its t+1 edges. Successor edges are those whose origin is the
/// terminus of the current edge.
struct TrajectorySet {
  int edge_from;
  int edge_to;
  int steps;
  std::vector<std::vector<int>> trajectories;

  std::int64_t count() const { return static_cast<std::int64_t>(trajectories.size()); }
};

/// Exhaustive depth-first enumeration, guarded by caps on the step count and
/// on the number of paths (counted up front from the connectivity
/// indicator, which also cross-checks the enumeration).
inline TrajectorySet enumerate_trajectories(const GraphStructure& g, int edge_from, int edge_to,
                                            int steps, int step_cap = 12,
                                            std::int64_t path_cap = 4000000) {
  const int d = g.edge_count();
  if (edge_from < 0 || edge_from >= d || edge_to < 0 || edge_to >= d)
    throw PreconditionError("edge index out of range");
  if (steps < 1) throw PreconditionError("trajectories need at least one step");
  if (steps > step_cap)
    throw EnumerationCap("requested " + std::to_string(steps) + " steps, cap is " +
                         std::to_string(step_cap));

  // Path count via the t-th power of the connectivity indicator.
  std::vector<double> ways(d, 0.0), next(d, 0.0);
  ways[edge_from] = 1.0;
  for (int s = 0; s < steps; ++s) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int e = 0; e < d; ++e) {
      if (ways[e] == 0.0) continue;
      for (int e2 : g.out_edges(g.terminus(e))) next[e2] += ways[e];
    }
    ways.swap(next);
  }
  const double expected = ways[edge_to];
  if (expected > static_cast<double>(path_cap))
    throw EnumerationCap("path count " + std::to_string(expected) + " exceeds cap " +
                         std::to_string(path_cap));

  TrajectorySet out{edge_from, edge_to, steps, {}};
  std::vector<int> stack;
  stack.reserve(steps + 1);
  stack.push_back(edge_from);
  // Iterative DFS over successor slots.
  std::vector<int> slot(steps + 1, 0);
  while (!stack.empty()) {
    const int depth = static_cast<int>(stack.size()) - 1;
    if (depth == steps) {
      if (stack.back() == edge_to) out.trajectories.push_back(stack);
      stack.pop_back();
      continue;
    }
    const auto& succ = g.out_edges(g.terminus(stack.back()));
    if (slot[depth] < static_cast<int>(succ.size())) {
      stack.push_back(succ[slot[depth]++]);
      slot[depth + 1] = 0;
    } else {
      slot[depth] = 0;
      stack.pop_back();
    }
  }

  if (static_cast<double>(out.count()) != expected)
    throw Error("trajectory enumeration disagrees with the indicator power");
  return out;
}

/// Both sides of the projector commutator identity at time t:
/// (1/D) tr([U^t A U^-t, B][U^t A U^-t, B]^dagger) with A, B projectors on
/// the edges a, b equals (2/D)(p - p^2) with p = |(U^t)_{ba}|^2.
struct OtocValue {
  int steps;
  int edge_a;
  int edge_b;
  double lhs;  // explicit commutator trace
  double rhs;  // matrix-element formula
  double transition_probability;
};

inline OtocValue otoc_norm(const QuantumMap& u, int steps, int edge_a, int edge_b) {
  const int d = u.dimension();
  if (edge_a < 0 || edge_a >= d || edge_b < 0 || edge_b >= d)
    throw PreconditionError("edge index out of range");
  if (steps < 1) throw PreconditionError("OTOC needs t >= 1");

  const ComplexMatrix ut = detail::matrix_power(u.matrix, steps);
  const double p = std::norm(ut(edge_b, edge_a));

  ComplexMatrix proj_a = ComplexMatrix::Zero(d, d);
  proj_a(edge_a, edge_a) = 1.0;
  ComplexMatrix proj_b = ComplexMatrix::Zero(d, d);
  proj_b(edge_b, edge_b) = 1.0;
  const ComplexMatrix a_t = ut * proj_a * ut.adjoint();
  const ComplexMatrix commutator = a_t * proj_b - proj_b * a_t;
  const double lhs = (commutator * commutator.adjoint()).trace().real() / d;
  const double rhs = 2.0 * (p - p * p) / d;
  return {steps, edge_a, edge_b, lhs, rhs, p};
}

/// Path-sum decomposition of the t-step transition: the coherent sum of
/// amplitude products over all connecting trajectories reproduces
/// (U^t)_{ba}; the incoherent sum of probability products is its classical
/// diagonal part.
struct TrajectorySums {
  Complex amplitude_sum;
  double probability_sum;
};

inline TrajectorySums trajectory_sums(const QuantumMap& u, const MarkovMap& b,
                                      const TrajectorySet& set) {
  Complex amp_total(0.0, 0.0);
  double prob_total = 0.0;
  for (const auto& traj : set.trajectories) {
    Complex amp(1.0, 0.0);
    double prob = 1.0;
    for (std::size_t i = 1; i < traj.size(); ++i) {
      amp *= u.matrix(traj[i], traj[i - 1]);
      prob *= b.matrix(traj[i], traj[i - 1]);
    }
    amp_total += amp;
    prob_total += prob;
  }
  return {amp_total, prob_total};
}

/// Arithmetic-mean bound data: lhs = |log |(U^t)_{ba}|^2| and
/// rhs = mean over trajectories of sum_i |log B| minus log of the
/// trajectory count. Reported side by side; trajectories stepping through a
/// zero probability are excluded and counted.
struct CoefBound {
  double lhs;
  double rhs;
  std::int64_t excluded;
};

inline CoefBound coef_bound(const MarkovMap& b, const TrajectorySet& set, const QuantumMap& u) {
  if (set.count() < 1) throw PreconditionError("need at least one trajectory");
  const ComplexMatrix ut = detail::matrix_power(u.matrix, set.steps);
  const double p = std::norm(ut(set.edge_to, set.edge_from));
  if (!(p > 0.0)) throw ZeroAmplitude("|U^t_{ba}|^2 vanishes; its log is undefined");

  double total = 0.0;
  std::int64_t excluded = 0;
  for (const auto& traj : set.trajectories) {
    double path = 0.0;
    bool valid = true;
    for (std::size_t i = 1; i < traj.size(); ++i) {
      const double step = b.matrix(traj[i], traj[i - 1]);
      if (!(step > 0.0)) {
        valid = false;
        break;
      }
      path += std::abs(std::log(step));
    }
    if (valid)
      total += path;
    else
      ++excluded;
  }
  const std::int64_t kept = set.count() - excluded;
  if (kept < 1) throw ZeroAmplitude("every trajectory crosses a zero-probability step");
  return {std::abs(std::log(p)), total / kept - std::log(static_cast<double>(kept)), excluded};
}

}  // namespace mxc
