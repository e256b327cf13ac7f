#include <catch2/catch_amalgamated.hpp>

#include "matrixchaos/markov.hpp"
#include "matrixchaos/rng.hpp"
#include "support/test_instances.hpp"

using namespace mxc;
using Catch::Approx;

namespace {

MarkovMap swap_map() {
  MarkovMap b;
  b.energy = 0.0;
  b.matrix = (RealMatrix(2, 2) << 0, 1, 1, 0).finished();
  return b;
}

HermitianMatrix k4() {
  ComplexMatrix m = ComplexMatrix::Constant(4, 4, Complex(1, 0));
  m.diagonal().setZero();
  return HermitianMatrix::from_dense(m);
}

HermitianMatrix chain(int v) {
  ComplexMatrix m = ComplexMatrix::Zero(v, v);
  for (int i = 0; i + 1 < v; ++i) {
    m(i, i + 1) = 1;
    m(i + 1, i) = 1;
  }
  return HermitianMatrix::from_dense(m);
}

}  // namespace

TEST_CASE("two-vertex map squares to the swap matrix") {
  const auto h = chain(2);
  const auto g = build_graph(h);
  const auto b = build_b(assemble_u(h, g, 0.0));
  REQUIRE((b.matrix - swap_map().matrix).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("regular graphs split each column into reflection and transmission") {
  const auto h = k4();
  const auto g = build_graph(h);
  for (double e : {0.0, 1.7}) {
    const auto b = build_b(assemble_u(h, g, e));
    const double pt = 4.0 / (e * e + 9.0);
    const double pr = 1.0 - 2.0 * pt;
    for (int col = 0; col < g.edge_count(); ++col) {
      REQUIRE(b.matrix(g.reversal(col), col) == Approx(pr).epsilon(1e-12));
      for (int row = 0; row < g.edge_count(); ++row) {
        if (row == g.reversal(col) || b.matrix(row, col) == 0.0) continue;
        REQUIRE(b.matrix(row, col) == Approx(pt).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("maps of random instances are uni-stochastic") {
  CounterRng erng(0xb15, 1);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto h = testing::random_hermitian(seed + 300, 4 + static_cast<int>(seed), 0.4);
    const auto g = build_graph(h);
    const auto b = build_b(assemble_u(h, g, testing::random_energy(erng, h)));
    REQUIRE(bistochasticity_error(b) < 1e-12);
    REQUIRE(b.matrix.minCoeff() >= 0.0);
    REQUIRE(b.matrix.maxCoeff() <= 1.0 + 1e-12);
    const RealVector uniform = uniform_distribution(b.dimension());
    REQUIRE(((b.matrix * uniform) - uniform).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("evolution preserves distributions") {
  SECTION("zero steps is the identity") {
    const auto b = swap_map();
    RealVector p(2);
    p << 0.25, 0.75;
    REQUIRE((evolve(b, p, 0) - p).cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("period-2 permutation") {
    const auto b = swap_map();
    RealVector p(2);
    p << 1.0, 0.0;
    const auto p2 = evolve(b, p, 2);
    REQUIRE(p2[0] == Approx(1.0));
    REQUIRE(p2[1] == Approx(0.0).margin(1e-15));
  }
  SECTION("mixing map relaxes to uniform") {
    const auto h = k4();
    const auto g = build_graph(h);
    const auto b = build_b(assemble_u(h, g, 0.0));
    RealVector p = RealVector::Zero(b.dimension());
    p[0] = 1.0;
    const auto relaxed = evolve(b, p, 50);
    REQUIRE(std::abs(relaxed.sum() - 1.0) < 1e-12);
    REQUIRE((relaxed - uniform_distribution(b.dimension())).cwiseAbs().maxCoeff() < 1e-6);
  }
  SECTION("invalid distributions are rejected") {
    const auto b = swap_map();
    RealVector bad(2);
    bad << 0.7, 0.7;
    REQUIRE_THROWS_AS(evolve(b, bad, 1), PreconditionError);
  }
}

TEST_CASE("spectrum of the swap map") {
  const auto spec = spectrum_b(swap_map());
  REQUIRE(spec.eigenvalues.size() == 2);
  REQUIRE(std::abs(spec.eigenvalues[0] - Complex(1, 0)) < 1e-12);
  REQUIRE(std::abs(spec.eigenvalues[1] + Complex(1, 0)) < 1e-12);
  REQUIRE(spec.minus_one_present);
  REQUIRE_FALSE(spec.mixing);
  REQUIRE(spec.gap == Approx(0.0).margin(1e-12));
}

TEST_CASE("bipartite chains carry eigenvalue -1 until reduced") {
  const auto h = chain(8);
  const auto g = build_graph(h);
  const auto u = assemble_u(h, g, 0.63);
  const auto spec = spectrum_b(build_b(u));
  REQUIRE(spec.minus_one_present);

  const auto reduced = bipartite_reduce(u, g);
  const auto spec_reduced = spectrum_b(build_b(reduced));
  REQUIRE_FALSE(spec_reduced.minus_one_present);
  for (Eigen::Index k = 0; k < spec_reduced.eigenvalues.size(); ++k)
    REQUIRE(std::abs(spec_reduced.eigenvalues[k] + Complex(1, 0)) > 1e-3);
}

TEST_CASE("spectral invariants on random instances") {
  CounterRng erng(0xb16, 2);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto h = testing::random_hermitian(seed + 40, 7, 0.45);
    const auto g = build_graph(h);
    const auto b = build_b(assemble_u(h, g, testing::random_energy(erng, h)));
    const auto spec = spectrum_b(b);
    REQUIRE(std::abs(spec.eigenvalues[0] - Complex(1, 0)) < 1e-12);
    for (Eigen::Index k = 0; k < spec.eigenvalues.size(); ++k) {
      REQUIRE(std::abs(spec.eigenvalues[k]) <= 1.0 + 1e-10);
      // complex eigenvalues appear in conjugate pairs
      if (std::abs(spec.eigenvalues[k].imag()) > 1e-10) {
        bool paired = false;
        for (Eigen::Index j = 0; j < spec.eigenvalues.size(); ++j)
          if (std::abs(spec.eigenvalues[j] - std::conj(spec.eigenvalues[k])) < 1e-9) paired = true;
        REQUIRE(paired);
      }
    }
  }
}

TEST_CASE("quantum and classical transition probabilities agree at one step") {
  const auto h = testing::random_hermitian(91, 6, 0.5);
  const auto g = build_graph(h);
  const auto u = assemble_u(h, g, 0.4);
  const auto b = build_b(u);
  for (int c = 0; c < g.edge_count(); ++c)
    for (int r = 0; r < g.edge_count(); ++r)
      REQUIRE(b.matrix(r, c) == std::norm(u.matrix(r, c)));
}

TEST_CASE("return probability") {
  SECTION("period-2 permutation alternates") {
    const auto b = swap_map();
    REQUIRE(return_probability(b, 0, 1) == 0.0);
    REQUIRE(return_probability(b, 0, 2) == 1.0);
    REQUIRE(return_probability(b, 0, 7) == 0.0);
  }
  SECTION("reflection probability of the complete graph at E=0") {
    const auto h = k4();
    const auto g = build_graph(h);
    const auto b = build_b(assemble_u(h, g, 0.0));
    // a directed edge cannot repeat immediately; the one-step weight 1/9
    // sits on the reversed edge, and the two-step return is its square
    REQUIRE(return_probability(b, 0, 1) == 0.0);
    REQUIRE(b.matrix(g.reversal(0), 0) == Approx(1.0 / 9.0).epsilon(1e-12));
    REQUIRE(return_probability(b, 0, 2) == Approx(1.0 / 81.0).epsilon(1e-12));
  }
  SECTION("mixing maps forget the start") {
    const auto h = k4();
    const auto g = build_graph(h);
    const auto b = build_b(assemble_u(h, g, 0.0));
    REQUIRE(return_probability(b, 3, 60) == Approx(1.0 / 12.0).margin(1e-6));
  }
}

TEST_CASE("subspace iteration reproduces the dense gap") {
  const auto h = k4();
  const auto g = build_graph(h);
  const auto b = build_b(assemble_u(h, g, 0.8));
  const auto dense = spectrum_b(b);
  const auto power = spectrum_b(b, /*dense_cutoff=*/4);  // forces the iterative path
  REQUIRE_FALSE(power.full);
  REQUIRE(power.gap == Approx(dense.gap).margin(1e-8));
  REQUIRE(power.minus_one_present == dense.minus_one_present);
}
