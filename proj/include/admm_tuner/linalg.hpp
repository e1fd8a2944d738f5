#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace admm_tuner {

using Vector = std::vector<double>;

// Thresholds shared by the dense kernels. Kept in one place so the numeric
// contracts of every module can be audited together.
struct Tolerances {
  double symmetry = 1e-12;        // |S_ij - S_ji| <= symmetry * max(1, |S_ij|)
  double jacobi_offdiag = 1e-12;  // off(S)_F <= jacobi_offdiag * ||S||_F
  int jacobi_max_sweeps = 100;
  double cholesky_pivot = 1e-14;  // pivot <= cholesky_pivot * trace(S) / n fails
  double identity = 1e-12;
};

inline constexpr Tolerances kTol{};

// Dense row-major real matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> data() const { return data_; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * cols_, cols_);
  }
  Vector column(std::size_t j) const;
  Vector diag() const;

  Matrix transpose() const;
  double norm_inf() const;  // max absolute row sum
  double norm_frobenius() const;
  double max_abs() const;
  double trace() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);

// Replaces S by (S + S^T) / 2; used after products that are symmetric in exact
// arithmetic.
Matrix symmetrized(const Matrix& s);
bool is_symmetric(const Matrix& s, double tol = kTol.symmetry);
bool is_diagonal(const Matrix& s);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);
Vector axpy(double alpha, std::span<const double> x, std::span<const double> y);  // alpha*x + y

struct EigenDecomposition {
  Vector values;   // ascending
  Matrix vectors;  // column i pairs with values[i]
};

// Cyclic Jacobi eigensolver for symmetric matrices.
// Throws NonSymmetric or NoConvergence.
EigenDecomposition sym_eig(const Matrix& s);

// Largest eigenvalue with its eigenvector.
struct TopEigenpair {
  double value;
  Vector vector;
};
TopEigenpair max_eigenpair(const Matrix& s);

// Generalized eigenvalues of the pencil (A, D) for positive diagonal D,
// ascending. Computed as the spectrum of D^{-1/2} A D^{-1/2}.
Vector pencil_eigenvalues(const Matrix& a, const Matrix& d);
Vector pencil_eigenvalues(const Matrix& a, std::span<const double> d);

// Cholesky factorization S = L L^T; factor once, solve many times.
class Cholesky {
 public:
  explicit Cholesky(const Matrix& s);

  Vector solve(std::span<const double> b) const;
  Matrix solve(const Matrix& b) const;
  const Matrix& lower() const { return l_; }
  std::size_t size() const { return l_.rows(); }

 private:
  Matrix l_;
};

Vector solve_spd(const Matrix& s, std::span<const double> b);
Matrix inverse_spd(const Matrix& s);

// n x (n-1) matrix whose orthonormal columns span the complement of the
// all-ones vector. Gram-Schmidt on e_i - e_{i+1}, so the column order is fixed.
Matrix ones_complement_basis(std::size_t n);

}  // namespace admm_tuner
