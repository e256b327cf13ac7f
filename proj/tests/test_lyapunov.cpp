#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "matrixchaos/ensembles.hpp"
#include "matrixchaos/lyapunov.hpp"
#include "support/test_instances.hpp"

using namespace mxc;
using Catch::Approx;

namespace {

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

MarkovMap k4_b(double e) {
  const auto h = k4();
  const auto g = build_graph(h);
  return build_b(assemble_u(h, g, e));
}

MarkovMap swap_map() {
  MarkovMap b;
  b.matrix = (RealMatrix(2, 2) << 0, 1, 1, 0).finished();
  return b;
}

// Frozen from the d-regular closed form at d=3, E=0:
// (1/9) ln 9 + (8/9) ln(9/4).
constexpr double kK4LambdaAtZero = 0.9649629230074277;

}  // namespace

TEST_CASE("mean exponent of a permutation map is exactly zero") {
  REQUIRE(mean_lyapunov(swap_map()) == 0.0);
}

TEST_CASE("mean exponent of the complete graph at E=0") {
  REQUIRE(mean_lyapunov(k4_b(0.0)) == Approx(kK4LambdaAtZero).epsilon(1e-12));
}

TEST_CASE("degree-3 map hits the log d bound at E = sqrt(3)") {
  REQUIRE(mean_lyapunov(k4_b(std::sqrt(3.0))) == Approx(std::log(3.0)).margin(1e-9));
}

TEST_CASE("local exponents") {
  SECTION("permutation map: all zero") {
    const auto h = chain(2);
    const auto g = build_graph(h);
    for (double e : {0.0, 1.0}) {
      const auto local = local_lyapunov(build_b(assemble_u(h, g, e)), g);
      REQUIRE(local.per_edge.cwiseAbs().maxCoeff() == 0.0);
      REQUIRE(local.per_vertex.cwiseAbs().maxCoeff() == 0.0);
    }
    // degree-1 scattering stays unimodular at every energy
    const auto generic = local_lyapunov(build_b(assemble_u(h, g, 0.7321)), g);
    REQUIRE(generic.per_edge.cwiseAbs().maxCoeff() < 1e-13);
  }
  SECTION("regular graphs: every edge carries the mean") {
    const auto h = k4();
    const auto g = build_graph(h);
    for (double e : {0.0, 1.3}) {
      const auto b = build_b(assemble_u(h, g, e));
      const auto local = local_lyapunov(b, g);
      const double mean = mean_lyapunov(b);
      for (int i = 0; i < local.per_edge.size(); ++i)
        REQUIRE(local.per_edge[i] == Approx(mean).epsilon(1e-12));
      for (int v = 0; v < local.per_vertex.size(); ++v)
        REQUIRE(local.per_vertex[v] == Approx(mean).epsilon(1e-12));
    }
  }
  SECTION("edge average reproduces the mean exponent") {
    for (std::uint64_t seed : {5u, 6u}) {
      const auto h = testing::random_hermitian(seed, 7, 0.4);
      const auto g = build_graph(h);
      const auto b = build_b(assemble_u(h, g, 0.9));
      const auto local = local_lyapunov(b, g);
      REQUIRE(local.per_edge.mean() == Approx(mean_lyapunov(b)).margin(1e-12));
    }
  }
}

TEST_CASE("entrywise powers of the map") {
  const auto b = k4_b(0.4);
  REQUIRE((q_matrix(b, 1.0) - b.matrix).cwiseAbs().maxCoeff() == 0.0);

  const RealMatrix support = q_matrix(b, 0.0);
  for (int c = 0; c < b.dimension(); ++c)
    for (int r = 0; r < b.dimension(); ++r)
      REQUIRE(support(r, c) == (b.matrix(r, c) > 0.0 ? 1.0 : 0.0));

  const auto perm = swap_map();
  REQUIRE((q_matrix(perm, 2.0) - perm.matrix).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("thermodynamic route") {
  SECTION("leading eigenvalue at eps=0 is the Frobenius eigenvalue") {
    const auto curve = thermo_lyapunov(k4_b(0.9));
    REQUIRE(curve.mu[2] == Approx(1.0).margin(1e-12));
  }
  SECTION("matches the closed-form sum on the complete graph") {
    const auto curve = thermo_lyapunov(k4_b(0.0));
    REQUIRE(curve.lambda == Approx(kK4LambdaAtZero).margin(1e-6));
  }
  SECTION("permutation maps have flat mu") {
    const auto curve = thermo_lyapunov(swap_map());
    for (double mu : curve.mu) REQUIRE(mu == Approx(1.0).margin(1e-12));
    REQUIRE(curve.lambda == Approx(0.0).margin(1e-10));
    REQUIRE(curve.variance == Approx(0.0).margin(1e-8));
  }
  SECTION("step size is validated") {
    REQUIRE_THROWS_AS(thermo_lyapunov(k4_b(0.0), 0.0), PreconditionError);
    REQUIRE_THROWS_AS(thermo_lyapunov(k4_b(0.0), 2e-3), PreconditionError);
  }
}

TEST_CASE("spectral variance route") {
  SECTION("permutation map has zero variance") {
    const auto b = swap_map();
    // swap map has eigenvalues {1, -1}: spectral route applies directly
    const auto var = variance_lyapunov(b, spectrum_b(b));
    REQUIRE(var.spectral == Approx(0.0).margin(1e-12));
    REQUIRE(var.thermo == Approx(0.0).margin(1e-8));
  }
  SECTION("two-vertex chain stays a permutation at every energy") {
    const auto h = chain(2);
    const auto g = build_graph(h);
    const auto b = build_b(assemble_u(h, g, 0.456));
    const auto var = variance_lyapunov(b, spectrum_b(b));
    REQUIRE(std::abs(var.spectral) < 1e-10);
  }
  SECTION("agrees with the thermodynamic second derivative") {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
      const auto h = testing::random_hermitian(seed + 600, 7, 0.45);
      const auto g = build_graph(h);
      const auto b = build_b(assemble_u(h, g, 0.8));
      const auto var = variance_lyapunov(b, spectrum_b(b));
      INFO("literal-form value " << var.literal << " vs spectral " << var.spectral);
      REQUIRE(var.consistent);
      REQUIRE(var.relative_gap < 1e-4);
      REQUIRE(var.thermo > -1e-8);  // variance is non-negative
    }
  }
  SECTION("complete graph at E=0: three-route cross-check") {
    const auto b = k4_b(0.0);
    const auto var = variance_lyapunov(b, spectrum_b(b));
    REQUIRE(var.spectral == Approx(var.thermo).margin(1e-6));
    const auto mc = mc_lyapunov(b, 400, 20000, 777);
    REQUIRE(std::abs(mc.variance - var.thermo) <
            3.0 * mc.variance_std_error + 1e-3 * std::abs(var.thermo) + 1e-6);
  }
  SECTION("degenerate Frobenius eigenvalue is rejected") {
    MarkovMap b;
    b.matrix = RealMatrix::Zero(4, 4);
    b.matrix(0, 1) = b.matrix(1, 0) = 1.0;  // two disjoint swaps: eigenvalue 1 twice
    b.matrix(2, 3) = b.matrix(3, 2) = 1.0;
    REQUIRE_THROWS_AS(variance_lyapunov(b, spectrum_b(b)), DegenerateSpectrum);
  }
}

TEST_CASE("monte carlo route") {
  SECTION("permutation map gives exactly zero") {
    const auto mc = mc_lyapunov(swap_map(), 100, 500, 1);
    REQUIRE(mc.mean == 0.0);
    REQUIRE(mc.std_error == 0.0);
    REQUIRE(mc.variance == 0.0);
  }
  SECTION("complete graph at E=0 within three standard errors") {
    const auto mc = mc_lyapunov(k4_b(0.0), 1000, 100000, 20260810);
    REQUIRE(std::abs(mc.mean - kK4LambdaAtZero) < 3.0 * mc.std_error);
    REQUIRE(mc.std_error < 1e-3);
  }
  SECTION("fixed seed reproduces bitwise, independent of threads") {
    const auto b = k4_b(0.7);
    const auto a1 = mc_lyapunov(b, 50, 4000, 99, 1);
    const auto a2 = mc_lyapunov(b, 50, 4000, 99, 1);
    const auto a4 = mc_lyapunov(b, 50, 4000, 99, 4);
    REQUIRE(a1.mean == a2.mean);
    REQUIRE(a1.variance == a2.variance);
    REQUIRE(a1.mean == a4.mean);
    REQUIRE(a1.std_error == a4.std_error);
    REQUIRE(a1.variance == a4.variance);
    const auto other = mc_lyapunov(b, 50, 4000, 100, 1);
    REQUIRE(a1.mean != other.mean);
  }
}

TEST_CASE("three-route agreement on random instances") {
  CounterRng erng(0x3107, 3);
  for (std::uint64_t seed : {21u, 22u}) {
    const auto h = testing::random_hermitian(seed + 700, 6, 0.5);
    const auto g = build_graph(h);
    const auto b = build_b(assemble_u(h, g, testing::random_energy(erng, h)));
    const double closed = mean_lyapunov(b);
    REQUIRE(thermo_lyapunov(b).lambda == Approx(closed).margin(1e-6));
    const auto mc = mc_lyapunov(b, 300, 20000, seed);
    REQUIRE(std::abs(mc.mean - closed) < 3.0 * mc.std_error);
  }
}

TEST_CASE("structural bounds") {
  SECTION("complete graph: all bounds are ln 3") {
    const auto g = build_graph(k4());
    const auto bounds = lyapunov_bounds(g);
    REQUIRE(bounds.global == Approx(std::log(3.0)));
    for (int e = 0; e < bounds.per_edge.size(); ++e)
      REQUIRE(bounds.per_edge[e] == Approx(std::log(3.0)));
  }
  SECTION("path graph V=3") {
    const auto g = build_graph(chain(3));
    REQUIRE(lyapunov_bounds(g).global == Approx(std::log(2.0) / 2.0));
  }
  SECTION("star graph V=5") {
    ComplexMatrix m = ComplexMatrix::Zero(5, 5);
    for (int leaf = 1; leaf < 5; ++leaf) {
      m(0, leaf) = 1;
      m(leaf, 0) = 1;
    }
    const auto g = build_graph(HermitianMatrix::from_dense(m));
    REQUIRE(lyapunov_bounds(g).global == Approx(std::log(2.0)));
  }
  SECTION("bounds hold on random instances") {
    CounterRng erng(0xb0d, 4);
    for (std::uint64_t seed : {31u, 32u, 33u}) {
      const auto h = testing::random_hermitian(seed + 800, 8, 0.4);
      const auto g = build_graph(h);
      const auto b = build_b(assemble_u(h, g, testing::random_energy(erng, h)));
      const auto local = local_lyapunov(b, g);
      const auto bounds = lyapunov_bounds(g);
      for (int e = 0; e < g.edge_count(); ++e)
        REQUIRE(local.per_edge[e] <= bounds.per_edge[e] + 1e-12);
      REQUIRE(mean_lyapunov(b) <= bounds.global + 1e-12);
      REQUIRE(mean_lyapunov(b) >= 0.0);
    }
  }
}

TEST_CASE("large-energy decay") {
  SECTION("complete graph ratio is bounded and non-increasing") {
    const auto h = k4();
    const auto g = build_graph(h);
    const auto rows = large_e_decay(h, g, {1e2, 1e3, 1e4});
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) {
      REQUIRE(row.lambda > 0.0);
      REQUIRE(row.ratio > 0.0);
    }
    REQUIRE(rows[1].ratio <= rows[0].ratio * 1.05);
    REQUIRE(rows[2].ratio <= rows[1].ratio * 1.05);
  }
  SECTION("energies inside the spectrum are rejected") {
    const auto h = k4();
    const auto g = build_graph(h);
    REQUIRE_THROWS_AS(large_e_decay(h, g, {1.5}), PreconditionError);
  }
  SECTION("two-vertex chain decays to zero ratio") {
    const auto h = chain(2);
    const auto g = build_graph(h);
    const auto rows = large_e_decay(h, g, {1e2, 1e3});
    for (const auto& row : rows) REQUIRE(std::abs(row.ratio) < 1e-6);
  }
}
