#include <catch2/catch_amalgamated.hpp>

#include "matrixchaos/matrix_io.hpp"
#include "support/test_instances.hpp"

using namespace mxc;

TEST_CASE("triplet documents load") {
  const auto h = load_matrix_string(R"({
    "v": 2,
    "entries": [[0, 1, 1.0, 0.0], [1, 0, 1.0, 0.0]]
  })");
  REQUIRE(h.size() == 2);
  REQUIRE(h(0, 1) == Complex(1, 0));
}

TEST_CASE("dense documents load") {
  const auto h = load_matrix_string(R"({
    "v": 2,
    "dense": [[0,0],[0,1],[0,-1],[0,0]]
  })");
  REQUIRE(h(0, 1) == Complex(0, 1));
  REQUIRE(h(1, 0) == Complex(0, -1));
}

TEST_CASE("schema violations are parse errors") {
  REQUIRE_THROWS_AS(load_matrix_string("not json"), ParseError);
  REQUIRE_THROWS_AS(load_matrix_string("[1,2,3]"), ParseError);
  REQUIRE_THROWS_AS(load_matrix_string(R"({"entries": []})"), ParseError);
  REQUIRE_THROWS_AS(load_matrix_string(R"({"v": 0, "entries": []})"), ParseError);
  REQUIRE_THROWS_AS(load_matrix_string(R"({"v": 2})"), ParseError);
  REQUIRE_THROWS_AS(load_matrix_string(R"({"v": 2, "entries": [[0,1,1,0]], "dense": []})"),
                    ParseError);
  REQUIRE_THROWS_AS(load_matrix_string(R"({"v": 2, "entries": [[0, 1, 1]]})"), ParseError);
  REQUIRE_THROWS_AS(load_matrix_string(R"({"v": 2, "dense": [[0,0]]})"), ParseError);
  REQUIRE_THROWS_AS(load_matrix_string(R"({"v": 2, "entries": [[0,1,1,0],[1,0,1,0]], "symmetrize": 3})"),
                    ParseError);
}

TEST_CASE("symmetrize flag completes missing conjugates") {
  const std::string doc = R"({"v": 2, "entries": [[0, 1, 0.0, 2.0]], "symmetrize": true})";
  const auto h = load_matrix_string(doc);
  REQUIRE(h(1, 0) == Complex(0, -2));
  REQUIRE_THROWS_AS(load_matrix_string(R"({"v": 2, "entries": [[0, 1, 0.0, 2.0]]})"),
                    HermiticityError);
}

TEST_CASE("zero threshold is honored") {
  const std::string doc =
      R"({"v": 3, "entries": [[0,1,1,0],[1,0,1,0],[1,2,1e-15,0],[2,1,1e-15,0]], "zero_threshold": 1e-16})";
  REQUIRE(load_matrix_string(doc).size() == 3);
  const std::string defaulted =
      R"({"v": 3, "entries": [[0,1,1,0],[1,0,1,0],[1,2,1e-15,0],[2,1,1e-15,0]]})";
  REQUIRE_THROWS_AS(load_matrix_string(defaulted), DisconnectedError);
}

TEST_CASE("documents round-trip exactly") {
  const auto h = testing::random_hermitian(17, 7, 0.5);
  const auto doc = matrix_document(h);
  const auto reloaded = load_matrix_document(doc);
  REQUIRE(reloaded.size() == h.size());
  REQUIRE((reloaded.matrix() - h.matrix()).cwiseAbs().maxCoeff() == 0.0);

  // serialized text reparses to the same matrix too
  const auto reparsed = load_matrix_string(doc.dump());
  REQUIRE((reparsed.matrix() - h.matrix()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("g17 formatting round-trips doubles") {
  for (double x : {0.1, 1.0 / 3.0, 0.9649629230074277, 1e-300, -2.5e17}) {
    REQUIRE(std::stod(format_g17(x)) == x);
  }
}
