#include <cmath>

#include <doctest.h>

#include "admm_tuner/graph.hpp"
#include "helpers.hpp"

using namespace admm_tuner;

TEST_CASE("edges are canonicalized") {
  const WeightedGraph g(4, {{2, 1, 0.5}, {0, 3, 2.0}, {1, 0, 1.0}});
  REQUIRE(g.num_edges() == 3);
  CHECK(g.edges()[0] == Edge{0, 1, 1.0});
  CHECK(g.edges()[1] == Edge{0, 3, 2.0});
  CHECK(g.edges()[2] == Edge{1, 2, 0.5});
  CHECK(g.weights() == Vector{1.0, 2.0, 0.5});
  const auto inc = g.incident_edges();
  CHECK(inc[0] == std::vector<std::size_t>{0, 1});
  CHECK(inc[1] == std::vector<std::size_t>{0, 2});
  CHECK(inc[3] == std::vector<std::size_t>{1});
}

TEST_CASE("invalid graphs are rejected") {
  CHECK_THROWS_CODE(WeightedGraph(3, {{1, 1, 1.0}}), ErrorCode::InvalidGraph);
  CHECK_THROWS_CODE(WeightedGraph(3, {{0, 3, 1.0}}), ErrorCode::InvalidGraph);
  CHECK_THROWS_CODE(WeightedGraph(3, {{0, 1, -1.0}}), ErrorCode::InvalidGraph);
  CHECK_THROWS_CODE(WeightedGraph(3, {{0, 1, NAN}}), ErrorCode::InvalidGraph);
  CHECK_THROWS_CODE(WeightedGraph(3, {{0, 1, 1.0}, {1, 0, 2.0}}), ErrorCode::InvalidGraph);
  const WeightedGraph g(3, {{0, 1, 1.0}});
  CHECK_THROWS_CODE(g.with_weights(Vector{1.0, 2.0}), ErrorCode::InvalidArgument);
}

TEST_CASE("graph matrices") {
  const WeightedGraph g(3, {{0, 1, 2.0}, {1, 2, 3.0}});
  const auto gm = build_matrices(g);
  CHECK(gm.a == Matrix{{0, 2, 0}, {2, 0, 3}, {0, 3, 0}});
  CHECK(gm.degrees() == Vector{2, 5, 3});
  CHECK(gm.b_out == Matrix{{1, 0, 0}, {0, 1, 0}});
  CHECK(gm.b_in == Matrix{{0, 1, 0}, {0, 0, 1}});
  // B^T W B is the weighted Laplacian D - A.
  const Matrix b = gm.b_out - gm.b_in;
  CHECK((b.transpose() * gm.w * b) == gm.d - gm.a);
}

TEST_CASE("connectivity") {
  CHECK(is_connected(WeightedGraph(3, {{0, 1, 1.0}, {1, 2, 1.0}})));
  CHECK_FALSE(is_connected(WeightedGraph(3, {{0, 1, 1.0}})));
  const WeightedGraph zero(3, {{0, 1, 1.0}, {1, 2, 0.0}});
  CHECK_FALSE(is_connected(zero));
  CHECK(is_connected(zero, false));
  CHECK(zero.positive_support().num_edges() == 1);
  CHECK(is_connected(WeightedGraph(1, {})));
}

TEST_CASE("erdos renyi sampling") {
  CHECK(erdos_renyi_probability(10, 0.2) == doctest::Approx(1.2 * std::log(10.0) / 10.0));
  const auto a = erdos_renyi(15, 0.8, 42);
  const auto b = erdos_renyi(15, 0.8, 42);
  CHECK(a == b);
  for (const auto& e : a.edges()) CHECK(e.w == 1.0);

  // Edge density matches p over many draws (binomial standard error ~ 0.003).
  const std::size_t n = 20;
  const double p = erdos_renyi_probability(n, 0.2);
  double total = 0.0;
  const int draws = 400;
  for (int s = 0; s < draws; ++s) total += static_cast<double>(erdos_renyi(n, 0.2, s).num_edges());
  const double density = total / (draws * n * (n - 1) / 2.0);
  CHECK(std::abs(density - p) < 0.015);

  const auto c = connected_erdos_renyi(12, 0.2, 5);
  CHECK(is_connected(c));
  CHECK_THROWS_CODE(erdos_renyi(1, 0.2, 1), ErrorCode::InvalidArgument);
  CHECK_THROWS_CODE(connected_erdos_renyi(60, -0.95, 1, 3), ErrorCode::ResampleExhausted);
}
