#include "admm_tuner/scaled_admm.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "admm_tuner/error.hpp"

namespace admm_tuner {

namespace {

constexpr double kProjectorTol = 1e-10;
constexpr double kDoubleRootTol = 1e-14;

void require_full_column_rank(const Matrix& m, const char* name) {
  try {
    Cholesky chol(symmetrized(m.transpose() * m));
  } catch (const Error&) {
    throw Error(ErrorCode::RankDeficient, std::string(name) + " lacks full column rank");
  }
}

Matrix range_projector(const Matrix& fbar) {
  const Matrix ft = fbar.transpose();
  return symmetrized(fbar * Cholesky(symmetrized(ft * fbar)).solve(ft));
}

}  // namespace

void validate(const EqualityQp& p) {
  const std::size_t n = p.q_mat.rows();
  if (!p.q_mat.square() || p.q.size() != n || p.e.cols() != n || p.f.rows() != p.e.rows()) {
    throw Error(ErrorCode::InvalidArgument, "equality QP has inconsistent dimensions");
  }
  Cholesky chol(p.q_mat);
  require_full_column_rank(p.e, "E");
  require_full_column_rank(p.f, "F");
}

Matrix build_scaling(const Matrix& e, const Matrix& q_mat, double kappa) {
  if (!(kappa > 0.0)) throw Error(ErrorCode::InvalidArgument, "kappa must be positive");
  if (e.cols() != q_mat.rows()) {
    throw Error(ErrorCode::InvalidArgument, "E and Q dimensions differ");
  }
  require_full_column_rank(e, "E");
  const Matrix r_q = Cholesky(q_mat).lower().transpose();  // R_Q^T R_Q = Q
  const Matrix et = e.transpose();
  const Matrix pinv = Cholesky(symmetrized(et * e)).solve(et);  // (E^T E)^{-1} E^T
  return std::sqrt(kappa) * (r_q * pinv);
}

ScaledProblem scale_problem(const EqualityQp& p, const Matrix& r, double rho, double kappa) {
  validate(p);
  if (!(rho > 0.0)) throw Error(ErrorCode::InvalidArgument, "rho must be positive");
  return ScaledProblem{p.q_mat, r * p.e, r * p.f, rho, kappa};
}

ScaledProblem consensus_problem(std::span<const double> q_diag, const WeightedGraph& g, double rho) {
  const std::size_t n = g.num_nodes();
  const std::size_t m = g.num_edges();
  if (q_diag.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "quadratic terms differ from node count");
  }
  if (!(rho > 0.0)) throw Error(ErrorCode::InvalidArgument, "rho must be positive");
  if (!is_connected(g)) throw Error(ErrorCode::Disconnected, "consensus graph is not connected");
  ScaledProblem sp{Matrix::diagonal(q_diag), Matrix(2 * m, n), Matrix(2 * m, m), rho, 0.0};
  for (std::size_t k = 0; k < m; ++k) {
    const auto& e = g.edges()[k];
    if (!(e.w > 0.0)) {
      throw Error(ErrorCode::RankDeficient, "edge " + std::to_string(k) + " has zero weight");
    }
    const double r = std::sqrt(e.w);
    sp.ebar(k, e.i) = r;      // R B_O
    sp.ebar(m + k, e.j) = r;  // R B_I
    sp.fbar(k, k) = -r;
    sp.fbar(m + k, k) = -r;
  }
  return sp;
}

Vector projected_initial_z(const ScaledProblem& sp, std::span<const double> x0) {
  const Matrix ft = sp.fbar.transpose();
  Vector rhs = ft * std::span<const double>(sp.ebar * x0);
  for (double& v : rhs) v = -v;
  return Cholesky(symmetrized(ft * sp.fbar)).solve(rhs);
}

AdmmEngine::AdmmEngine(ScaledProblem sp, Vector q)
    : sp_(std::move(sp)),
      q_(std::move(q)),
      x_system_(symmetrized(sp_.q_mat + sp_.rho * (sp_.ebar.transpose() * sp_.ebar))),
      z_system_(symmetrized(sp_.fbar.transpose() * sp_.fbar)) {
  if (q_.size() != sp_.num_primal()) {
    throw Error(ErrorCode::InvalidArgument, "linear term length differs from Q");
  }
}

AdmmTrace AdmmEngine::run(std::span<const double> x0, std::span<const double> z0,
                          std::span<const double> u0, const AdmmOptions& options) const {
  const std::size_t p = sp_.ebar.rows();
  if (x0.size() != sp_.num_primal() || z0.size() != sp_.num_aux() || u0.size() != p) {
    throw Error(ErrorCode::InvalidArgument, "initial state has the wrong dimensions");
  }
  const Matrix et = sp_.ebar.transpose();
  const Matrix ft = sp_.fbar.transpose();

  AdmmTrace trace;
  Vector x(x0.begin(), x0.end());
  Vector z(z0.begin(), z0.end());
  Vector u(u0.begin(), u0.end());
  trace.x.push_back(x);
  trace.z.push_back(z);
  trace.u.push_back(u);
  auto record_distance = [&](const Vector& xk) {
    if (!options.fixed_point) return 0.0;
    const double d = norm2(axpy(-1.0, *options.fixed_point, xk));
    trace.distances.push_back(d);
    return d;
  };
  if (record_distance(x) < options.stop_distance && options.fixed_point) return trace;

  for (int k = 0; k < options.iterations; ++k) {
    // x-update
    Vector fz_u = axpy(1.0, sp_.fbar * std::span<const double>(z), u);
    Vector rhs = et * std::span<const double>(fz_u);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = -q_[i] - sp_.rho * rhs[i];
    x = x_system_.solve(rhs);
    // z-update
    const Vector ex = sp_.ebar * std::span<const double>(x);
    Vector zrhs = ft * std::span<const double>(axpy(1.0, ex, u));
    for (double& v : zrhs) v = -v;
    z = z_system_.solve(zrhs);
    // dual update
    const Vector residual = axpy(1.0, ex, sp_.fbar * std::span<const double>(z));
    u = axpy(1.0, residual, u);

    trace.x.push_back(x);
    trace.z.push_back(z);
    trace.u.push_back(u);
    trace.residuals.push_back(norm2(residual));
    if (options.fixed_point && record_distance(x) < options.stop_distance) break;
  }
  return trace;
}

AdmmTrace admm_iterate(const ScaledProblem& sp, std::span<const double> q, std::span<const double> x0,
                       std::span<const double> z0, std::span<const double> u0,
                       const AdmmOptions& options) {
  return AdmmEngine(sp, Vector(q.begin(), q.end())).run(x0, z0, u0, options);
}

Matrix IterationMatrix::assembled() const {
  const std::size_t n = size();
  Matrix m(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      m(i, j) = m11(i, j);
      m(i, n + j) = m12(i, j);
    }
    m(n + i, i) = 1.0;
  }
  return m;
}

Vector IterationMatrix::advance(std::span<const double> x_k, std::span<const double> x_km1) const {
  return axpy(1.0, m11 * x_k, m12 * x_km1);
}

IterationMatrix iteration_matrix(const ScaledProblem& sp) {
  const std::size_t p = sp.ebar.rows();
  const Matrix et = sp.ebar.transpose();
  const Matrix pi_range = range_projector(sp.fbar);
  const Matrix pi_null = Matrix::identity(p) - pi_range;
  if ((pi_range * pi_null).max_abs() > kProjectorTol) {
    throw Error(ErrorCode::InvalidArgument, "projectors onto R(Fbar) and N(Fbar^T) are not complementary");
  }
  const Cholesky solver(symmetrized(sp.q_mat + sp.rho * (et * sp.ebar)));
  const Matrix m11 =
      sp.rho * solver.solve(et * (pi_range - pi_null) * sp.ebar) + Matrix::identity(sp.num_primal());
  const Matrix m12 = -sp.rho * solver.solve(et * pi_range * sp.ebar);
  return IterationMatrix{m11, m12};
}

IterationMatrix consensus_iteration_matrix(double rho, const GraphMatrices& gm,
                                           std::span<const double> q_diag) {
  const std::size_t n = gm.a.rows();
  if (q_diag.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "quadratic terms differ from node count");
  }
  Vector inv(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double denom = q_diag[i] + rho * gm.d(i, i);
    if (!(denom > 0.0)) throw Error(ErrorCode::NotPositiveDefinite, "Q + rho D is singular");
    inv[i] = 1.0 / denom;
  }
  IterationMatrix m{Matrix::identity(n), Matrix(n, n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      m.m11(i, j) += rho * inv[i] * gm.a(i, j);
      m.m12(i, j) = -0.5 * rho * inv[i] * (gm.d(i, j) + gm.a(i, j));
    }
  }
  return m;
}

Vector first_iterate(const ScaledProblem& sp, std::span<const double> q, std::span<const double> x0) {
  const Matrix et = sp.ebar.transpose();
  const Matrix pi_range = range_projector(sp.fbar);
  Vector rhs = (sp.rho * (et * pi_range * sp.ebar)) * x0;
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] -= q[i];
  return Cholesky(symmetrized(sp.q_mat + sp.rho * (et * sp.ebar))).solve(rhs);
}

std::vector<Vector> matrix_recursion(const IterationMatrix& m, std::span<const double> x0,
                                     std::span<const double> x1, int iterations) {
  std::vector<Vector> xs{Vector(x0.begin(), x0.end()), Vector(x1.begin(), x1.end())};
  for (int k = 1; k < iterations; ++k) {
    xs.push_back(m.advance(xs[xs.size() - 1], xs[xs.size() - 2]));
  }
  return xs;
}

double step_factor(double rho, double kappa) { return rho * kappa / (1.0 + rho * kappa); }

EigenvaluePair closed_form_eigenvalues(double lambda, double kappa, double rho) {
  const double f = step_factor(rho, kappa);
  const double b = 1.0 + f * lambda;
  // (1 + f l)^2 - 2 f (1 + l) rewritten as (1 - f)^2 - f^2 (1 - l^2).
  const double g = 1.0 / (1.0 + rho * kappa);
  double disc = g * g - f * f * (1.0 - lambda) * (1.0 + lambda);
  // Near the branch point the roots are only determined to ~sqrt(eps); snap
  // to the double root so |phi| is continuous with its complex-side value.
  if (std::abs(disc) <= kDoubleRootTol) disc = 0.0;
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    return {{0.5 * (b + s), 0.0}, {0.5 * (b - s), 0.0}};
  }
  const double s = std::sqrt(-disc);
  return {{0.5 * b, 0.5 * s}, {0.5 * b, -0.5 * s}};
}

std::vector<EigenvaluePair> closed_form_eigenvalues(std::span<const double> lambdas, double kappa,
                                                    double rho) {
  std::vector<EigenvaluePair> out;
  out.reserve(lambdas.size());
  for (double l : lambdas) out.push_back(closed_form_eigenvalues(l, kappa, rho));
  return out;
}

Vector distances_to(const std::vector<Vector>& xs, std::span<const double> fixed_point) {
  Vector d;
  d.reserve(xs.size());
  for (const auto& x : xs) d.push_back(norm2(axpy(-1.0, fixed_point, x)));
  return d;
}

double empirical_factor(std::span<const double> distances) {
  double peak = 1.0;
  for (double d : distances) peak = std::max(peak, d);
  const double floor = 1e3 * std::numeric_limits<double>::epsilon() * peak;
  std::size_t usable = 0;
  while (usable < distances.size() && distances[usable] >= floor) ++usable;
  if (usable < 20) {
    throw Error(ErrorCode::InvalidArgument,
                "need at least 20 distances above the numerical floor, have " + std::to_string(usable));
  }
  const std::size_t start = usable / 2;
  const double count = static_cast<double>(usable - start);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = start; k < usable; ++k) {
    const double x = static_cast<double>(k);
    const double y = std::log(distances[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  if (!(slope < 0.0)) {
    throw Error(ErrorCode::Stagnated, "distances do not decrease over the fitting window");
  }
  return std::exp(slope);
}

double empirical_factor(const AdmmTrace& trace, std::span<const double> fixed_point) {
  return empirical_factor(distances_to(trace.x, fixed_point));
}

}  // namespace admm_tuner
