#pragma once

#include <cstdint>
#include <random>

#include <doctest.h>

#include "admm_tuner/error.hpp"
#include "admm_tuner/graph.hpp"
#include "admm_tuner/linalg.hpp"

#define CHECK_THROWS_CODE(expr, expected_code)                  \
  do {                                                          \
    bool thrown_ = false;                                       \
    try {                                                       \
      (void)(expr);                                             \
    } catch (const ::admm_tuner::Error& e_) {                   \
      thrown_ = true;                                           \
      CHECK(e_.code() == (expected_code));                      \
    }                                                           \
    CHECK_MESSAGE(thrown_, "expected admm_tuner::Error");       \
  } while (0)

namespace testing {

using admm_tuner::Matrix;
using admm_tuner::Vector;

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c) {
  std::normal_distribution<double> g;
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = g(rng);
  return m;
}

// B B^T + shift I.
inline Matrix random_spd(std::mt19937_64& rng, std::size_t n, double shift = 0.5) {
  const Matrix b = random_matrix(rng, n, n);
  Matrix s = admm_tuner::symmetrized(b * b.transpose());
  for (std::size_t i = 0; i < n; ++i) s(i, i) += shift;
  return s;
}

// Connected ER topology with weights drawn from [0.2, 2].
inline admm_tuner::WeightedGraph random_weighted_graph(std::mt19937_64& rng, std::size_t n) {
  const auto g = admm_tuner::connected_erdos_renyi(n, 0.5, rng());
  std::uniform_real_distribution<double> u(0.2, 2.0);
  Vector w(g.num_edges());
  for (double& x : w) x = u(rng);
  return g.with_weights(w);
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).max_abs(); }

inline double max_abs_diff(const Vector& a, const Vector& b) {
  REQUIRE(a.size() == b.size());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace testing
