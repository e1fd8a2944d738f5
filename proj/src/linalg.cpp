#include "admm_tuner/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "admm_tuner/error.hpp"

namespace admm_tuner {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonSymmetric: return "NonSymmetric";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SingularD: return "SingularD";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::InvalidGraph: return "InvalidGraph";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::ResampleExhausted: return "ResampleExhausted";
    case ErrorCode::NotArrowhead: return "NotArrowhead";
    case ErrorCode::BlockNotSpd: return "BlockNotSpd";
    case ErrorCode::NonConvexPiece: return "NonConvexPiece";
    case ErrorCode::NonConvexLocal: return "NonConvexLocal";
    case ErrorCode::Stagnated: return "Stagnated";
    case ErrorCode::InfeasibleTopology: return "InfeasibleTopology";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      throw Error(ErrorCode::InvalidArgument, "ragged matrix initializer");
    }
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Vector Matrix::column(std::size_t j) const {
  Vector c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

Vector Matrix::diag() const {
  Vector d(std::min(rows_, cols_));
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = (*this)(i, i);
  return d;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::norm_inf() const {
  double best = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (double v : row(i)) s += std::abs(v);
    best = std::max(best, s);
  }
  return best;
}

double Matrix::norm_frobenius() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double Matrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw Error(ErrorCode::InvalidArgument, "matrix sum shape mismatch");
  }
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw Error(ErrorCode::InvalidArgument, "matrix difference shape mismatch");
  }
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double s) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorCode::InvalidArgument, "matrix product shape mismatch");
  }
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Vector operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) {
    throw Error(ErrorCode::InvalidArgument, "matrix-vector shape mismatch");
  }
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

Matrix symmetrized(const Matrix& s) {
  Matrix out = s;
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = i + 1; j < s.cols(); ++j) {
      const double avg = 0.5 * (s(i, j) + s(j, i));
      out(i, j) = avg;
      out(j, i) = avg;
    }
  return out;
}

bool is_symmetric(const Matrix& s, double tol) {
  if (!s.square()) return false;
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = i + 1; j < s.cols(); ++j) {
      const double scale = std::max(1.0, std::abs(s(i, j)));
      if (std::abs(s(i, j) - s(j, i)) > tol * scale) return false;
    }
  return true;
}

bool is_diagonal(const Matrix& s) {
  if (!s.square()) return false;
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = 0; j < s.cols(); ++j)
      if (i != j && s(i, j) != 0.0) return false;
  return true;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::InvalidArgument, "dot product length mismatch");
  }
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

Vector axpy(double alpha, std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::InvalidArgument, "axpy length mismatch");
  }
  Vector out(y.begin(), y.end());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] += alpha * x[i];
  return out;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

EigenDecomposition sym_eig(const Matrix& s) {
  if (!is_symmetric(s)) {
    throw Error(ErrorCode::NonSymmetric, "sym_eig requires a symmetric matrix");
  }
  const std::size_t n = s.rows();
  Matrix a = symmetrized(s);
  Matrix v = Matrix::identity(n);
  const double threshold = kTol.jacobi_offdiag * a.norm_frobenius();

  int sweep = 0;
  while (off_diagonal_norm(a) > threshold) {
    if (sweep++ >= kTol.jacobi_max_sweeps) {
      throw Error(ErrorCode::NoConvergence,
                  "Jacobi did not converge in " + std::to_string(kTol.jacobi_max_sweeps) +
                      " sweeps");
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  EigenDecomposition out{Vector(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

TopEigenpair max_eigenpair(const Matrix& s) {
  auto eig = sym_eig(s);
  const std::size_t last = eig.values.size() - 1;
  return {eig.values[last], eig.vectors.column(last)};
}

Vector pencil_eigenvalues(const Matrix& a, std::span<const double> d) {
  if (!a.square() || a.rows() != d.size()) {
    throw Error(ErrorCode::InvalidArgument, "pencil operands differ in size");
  }
  const std::size_t n = d.size();
  Vector inv_sqrt(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(d[i] > 0.0)) {
      throw Error(ErrorCode::SingularD,
                  "diagonal entry " + std::to_string(i) + " is not positive");
    }
    inv_sqrt[i] = 1.0 / std::sqrt(d[i]);
  }
  Matrix scaled(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scaled(i, j) = inv_sqrt[i] * a(i, j) * inv_sqrt[j];
  return sym_eig(scaled).values;
}

Vector pencil_eigenvalues(const Matrix& a, const Matrix& d) {
  if (!is_diagonal(d)) {
    throw Error(ErrorCode::InvalidArgument, "pencil requires a diagonal D");
  }
  return pencil_eigenvalues(a, d.diag());
}

Cholesky::Cholesky(const Matrix& s) : l_(s.rows(), s.cols()) {
  if (!is_symmetric(s)) {
    throw Error(ErrorCode::NonSymmetric, "Cholesky requires a symmetric matrix");
  }
  const std::size_t n = s.rows();
  const double pivot_floor = kTol.cholesky_pivot * s.trace() / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = s(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l_(j, k) * l_(j, k);
    if (!(diag > pivot_floor) || !(diag > 0.0)) {
      throw Error(ErrorCode::NotPositiveDefinite,
                  "Cholesky pivot " + std::to_string(j) + " is " + std::to_string(diag));
    }
    const double ljj = std::sqrt(diag);
    l_(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l_(i, k) * l_(j, k);
      l_(i, j) = v / ljj;
    }
  }
}

Vector Cholesky::solve(std::span<const double> b) const {
  const std::size_t n = size();
  if (b.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "Cholesky rhs length mismatch");
  }
  Vector y(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) y[i] -= l_(i, k) * y[k];
    y[i] /= l_(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) y[i] -= l_(k, i) * y[k];
    y[i] /= l_(i, i);
  }
  return y;
}

Matrix Cholesky::solve(const Matrix& b) const {
  Matrix x(b.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    const Vector col = solve(b.column(j));
    for (std::size_t i = 0; i < b.rows(); ++i) x(i, j) = col[i];
  }
  return x;
}

Vector solve_spd(const Matrix& s, std::span<const double> b) { return Cholesky(s).solve(b); }

Matrix inverse_spd(const Matrix& s) {
  return symmetrized(Cholesky(s).solve(Matrix::identity(s.rows())));
}

Matrix ones_complement_basis(std::size_t n) {
  if (n < 2) {
    throw Error(ErrorCode::InvalidArgument, "ones_complement_basis needs n >= 2");
  }
  Matrix p(n, n - 1);
  std::vector<Vector> basis;
  basis.reserve(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    Vector v(n, 0.0);
    v[i] = 1.0;
    v[i + 1] = -1.0;
    // Modified Gram-Schmidt, two passes for orthogonality at the 1e-15 level.
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) v = axpy(-dot(b, v), b, v);
    const double nrm = norm2(v);
    for (double& x : v) x /= nrm;
    basis.push_back(std::move(v));
  }
  for (std::size_t j = 0; j < basis.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) p(i, j) = basis[j][i];
  return p;
}

}  // namespace admm_tuner
