#include <cmath>
#include <numeric>
#include <random>

#include <doctest.h>

#include "admm_tuner/io.hpp"
#include "admm_tuner/qp.hpp"
#include "helpers.hpp"

using namespace admm_tuner;
using testing::max_abs_diff;

namespace {

Matrix example_hessian() {
  return Matrix{{4, 1, 0, 0, 0, 0, 1}, {1, 6, 0, 0, 0, 0, 2}, {0, 0, 5, 4, 0, 0, 3},
                {0, 0, 4, 8, 0, 0, 4}, {0, 0, 0, 0, 8, 7, 5}, {0, 0, 0, 0, 7, 9, 6},
                {1, 2, 3, 4, 5, 6, 8}};
}

ArrowheadQp example_qp() {
  const std::vector<std::size_t> sizes{2, 2, 2};
  return validate_arrowhead(example_hessian(), sizes, Vector(7, 1.0));
}

// Random arrowhead QP that is SPD overall: private blocks SPD, Qss large enough.
ArrowheadQp random_arrowhead(std::mt19937_64& rng, std::size_t blocks) {
  ArrowheadQp p;
  std::uniform_int_distribution<std::size_t> size(0, 3);
  std::normal_distribution<double> g;
  double schur = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    ArrowBlock blk;
    const std::size_t s = size(rng);
    blk.qii = testing::random_spd(rng, s);
    for (std::size_t i = 0; i < s; ++i) {
      blk.qis.push_back(g(rng));
      blk.q.push_back(g(rng));
    }
    if (s > 0) schur += dot(blk.qis, solve_spd(blk.qii, blk.qis));
    p.blocks.push_back(blk);
  }
  p.qss = schur + 0.1 + std::abs(g(rng));
  p.qs = g(rng);
  return p;
}

}  // namespace

TEST_CASE("reduction of the bundled example") {
  const ArrowheadQp qp = example_qp();
  const auto c = reduce_to_consensus(qp, make_alpha_split({0.5 / 3, 0.9 / 3, 1.6 / 3}));
  // Hand-computed: T = (18/23, 7/3, 93/23) by 2x2 inverses.
  const Vector t = schur_terms(qp);
  CHECK(t[0] == doctest::Approx(18.0 / 23.0).epsilon(1e-14));
  CHECK(t[1] == doctest::Approx(7.0 / 3.0).epsilon(1e-14));
  CHECK(t[2] == doctest::Approx(93.0 / 23.0).epsilon(1e-14));
  CHECK(max_abs_diff(c.qhat_quadratic, {0.550725, 0.066667, 0.223188}) < 1e-6);
  CHECK(max_abs_diff(c.qhat_linear, {-0.311594, -0.366667, -0.162319}) < 1e-6);
  // The dense solve gives a shared component of exactly 1.
  CHECK(shared_optimum(c) == doctest::Approx(1.0).epsilon(1e-13));
  const Vector dense = qp.dense_solution();
  CHECK(dense[6] == doctest::Approx(1.0).epsilon(1e-13));
  const auto eta = recover_private(c, shared_optimum(c));
  CHECK(eta[0][0] == doctest::Approx(dense[0]).epsilon(1e-12));
  CHECK(eta[2][1] == doctest::Approx(dense[5]).epsilon(1e-12));
}

TEST_CASE("arrowhead validation") {
  const std::vector<std::size_t> sizes{2, 2, 2};
  Matrix bad = example_hessian();
  bad(0, 2) = bad(2, 0) = 0.1;
  CHECK_THROWS_CODE(validate_arrowhead(bad, sizes), ErrorCode::NotArrowhead);
  Matrix asym = example_hessian();
  asym(0, 6) = 5.0;
  CHECK_THROWS_CODE(validate_arrowhead(asym, sizes), ErrorCode::NonSymmetric);
  Matrix indefinite = example_hessian();
  indefinite(0, 0) = 0.1;
  CHECK_THROWS_CODE(validate_arrowhead(indefinite, sizes), ErrorCode::BlockNotSpd);
  const std::vector<std::size_t> wrong{2, 2};
  CHECK_THROWS_CODE(validate_arrowhead(example_hessian(), wrong), ErrorCode::InvalidArgument);
  // Empty private blocks are fine.
  const std::vector<std::size_t> with_empty{2, 0, 4};
  Matrix h = example_hessian();
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j)
      if ((i < 2) != (j < 2)) h(i, j) = 0.0;
  CHECK(validate_arrowhead(h, with_empty).blocks[1].size() == 0);
}

TEST_CASE("alpha splits") {
  CHECK_THROWS_CODE(make_alpha_split({0.5, 0.6}), ErrorCode::InvalidArgument);
  CHECK_THROWS_CODE(make_alpha_split({1.5, -0.5}), ErrorCode::InvalidArgument);
  CHECK_THROWS_CODE(make_alpha_split({}), ErrorCode::InvalidArgument);
  CHECK_THROWS_CODE(reduce_to_consensus(example_qp(), make_alpha_split({0.9, 0.05, 0.05})),
                    ErrorCode::NonConvexPiece);
  CHECK_THROWS_CODE(reduce_to_consensus(example_qp(), make_alpha_split({0.5, 0.5})),
                    ErrorCode::InvalidArgument);
}

TEST_CASE("constructive allocation equalizes local curvature") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const ArrowheadQp p = random_arrowhead(rng, 2 + trial % 5);
    const AlphaSplit a = allocate_alphas(p);
    CHECK(std::accumulate(a.alphas.begin(), a.alphas.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    const auto c = reduce_to_consensus(p, a);
    for (double q : c.qhat_quadratic) {
      CHECK(q > 0.0);
      CHECK(q == doctest::Approx(c.qhat_quadratic[0]).epsilon(1e-10));
    }
    // Consensus optimum equals the shared component of the dense solution.
    const Vector dense = p.dense_solution();
    CHECK(shared_optimum(c) == doctest::Approx(dense.back()).epsilon(1e-9));
  }
}

TEST_CASE("allocation fails when the full Hessian is not positive definite") {
  ArrowheadQp p;
  p.blocks.push_back({Matrix{{1}}, {2}, {0}});
  p.blocks.push_back({Matrix{{1}}, {1}, {0}});
  p.qss = 4.0;  // Schur complement 4 - 4 - 1 < 0
  CHECK_THROWS_CODE(allocate_alphas(p), ErrorCode::NotPositiveDefinite);
}

TEST_CASE("bundled data file") {
  const auto pf = problem_from_json(read_json(std::string(ADMM_TUNER_DATA_DIR) + "/dqp_example.json"));
  CHECK(pf.qp.num_blocks() == 3);
  CHECK(pf.qp.assemble_hessian() == example_hessian());
  REQUIRE(pf.alphas);
  CHECK(std::accumulate(pf.alphas->begin(), pf.alphas->end(), 0.0) == doctest::Approx(1.0));
  REQUIRE(pf.graph);
  CHECK(pf.graph->num_edges() == 2);
}
