#include <cmath>
#include <random>

#include <doctest.h>

#include "admm_tuner/linalg.hpp"
#include "helpers.hpp"

using namespace admm_tuner;
using testing::max_abs_diff;

TEST_CASE("matrix arithmetic") {
  const Matrix a{{1, 2}, {3, 4}};
  const Matrix b{{0, 1}, {1, 0}};
  CHECK(a * b == Matrix{{2, 1}, {4, 3}});
  CHECK(a.transpose() == Matrix{{1, 3}, {2, 4}});
  CHECK(a + b == Matrix{{1, 3}, {4, 4}});
  CHECK(a.trace() == 5.0);
  CHECK(a.norm_inf() == 7.0);
  const Vector x{1.0, -1.0};
  CHECK(a * std::span<const double>(x) == Vector{-1.0, -1.0});
  CHECK(axpy(2.0, x, Vector{1.0, 1.0}) == Vector{3.0, -1.0});
  CHECK(is_diagonal(Matrix::diagonal(Vector{1, 2, 3})));
  CHECK_FALSE(is_symmetric(a));
}

TEST_CASE("jacobi on a 2x2") {
  const auto eig = sym_eig(Matrix{{2, 1}, {1, 2}});
  CHECK(eig.values[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(eig.values[1] == doctest::Approx(3.0).epsilon(1e-14));
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(std::abs(eig.vectors(0, 1)) - s) < 1e-14);
}

TEST_CASE("jacobi reconstructs random symmetric matrices") {
  std::mt19937_64 rng(7);
  for (std::size_t n : {1u, 3u, 8u, 20u}) {
    const Matrix s = symmetrized(testing::random_matrix(rng, n, n));
    const auto eig = sym_eig(s);
    const Matrix& v = eig.vectors;
    CHECK(max_abs_diff(v.transpose() * v, Matrix::identity(n)) < 1e-12);
    const Matrix rebuilt = v * Matrix::diagonal(eig.values) * v.transpose();
    CHECK(max_abs_diff(rebuilt, s) < 1e-11);
    for (std::size_t i = 1; i < n; ++i) CHECK(eig.values[i - 1] <= eig.values[i]);
  }
}

TEST_CASE("jacobi rejects nonsymmetric input") {
  CHECK_THROWS_CODE(sym_eig(Matrix{{1, 2}, {0, 1}}), ErrorCode::NonSymmetric);
}

TEST_CASE("max eigenpair") {
  const auto top = max_eigenpair(Matrix{{1, 0, 0}, {0, 5, 0}, {0, 0, -2}});
  CHECK(top.value == doctest::Approx(5.0));
  CHECK(std::abs(top.vector[1]) == doctest::Approx(1.0));
}

TEST_CASE("pencil spectra of small graphs") {
  // path on three nodes: {-1, 0, 1}
  const Matrix a_path{{0, 1, 0}, {1, 0, 1}, {0, 1, 0}};
  const auto path = pencil_eigenvalues(a_path, Vector{1, 2, 1});
  CHECK(path[0] == doctest::Approx(-1.0));
  CHECK(std::abs(path[1]) < 1e-14);
  CHECK(path[2] == doctest::Approx(1.0));
  // triangle: {-1/2, -1/2, 1}
  const Matrix a_tri{{0, 1, 1}, {1, 0, 1}, {1, 1, 0}};
  const auto tri = pencil_eigenvalues(a_tri, Matrix::diagonal(Vector{2, 2, 2}));
  CHECK(tri[0] == doctest::Approx(-0.5));
  CHECK(tri[1] == doctest::Approx(-0.5));
  CHECK(tri[2] == doctest::Approx(1.0));
  CHECK_THROWS_CODE(pencil_eigenvalues(a_path, Vector{1, 0, 1}), ErrorCode::SingularD);
}

TEST_CASE("cholesky") {
  const Matrix s{{4, 2}, {2, 3}};
  const Cholesky c(s);
  CHECK(max_abs_diff(c.lower() * c.lower().transpose(), s) < 1e-15);
  const Vector x = c.solve(Vector{2, 1});
  CHECK(max_abs_diff(s * std::span<const double>(x), Vector{2, 1}) < 1e-15);
  CHECK_THROWS_CODE(Cholesky(Matrix{{1, 2}, {2, 1}}), ErrorCode::NotPositiveDefinite);

  std::mt19937_64 rng(3);
  const Matrix big = testing::random_spd(rng, 12);
  CHECK(max_abs_diff(big * inverse_spd(big), Matrix::identity(12)) < 1e-10);
}

TEST_CASE("ones complement basis") {
  for (std::size_t n : {2u, 3u, 10u}) {
    const Matrix p = ones_complement_basis(n);
    REQUIRE(p.rows() == n);
    REQUIRE(p.cols() == n - 1);
    CHECK(max_abs_diff(p.transpose() * p, Matrix::identity(n - 1)) < 1e-14);
    const Vector ones(n, 1.0);
    CHECK(norm_inf(p.transpose() * std::span<const double>(ones)) < 1e-14);
  }
}
