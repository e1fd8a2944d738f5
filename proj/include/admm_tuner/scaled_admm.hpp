#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "admm_tuner/graph.hpp"
#include "admm_tuner/linalg.hpp"

namespace admm_tuner {

// minimize 1/2 x^T Q x + q^T x  subject to  E x + F z = 0.
struct EqualityQp {
  Matrix q_mat;
  Vector q;
  Matrix e;
  Matrix f;
};

// Throws RankDeficient if E or F lacks full column rank, NotPositiveDefinite if
// Q is not SPD.
void validate(const EqualityQp& p);

// R = sqrt(kappa) R_Q (E^T E)^{-1} E^T with R_Q the transposed Cholesky factor
// of Q. Then (RE)^T (RE) = kappa Q and R keeps the constraint set unchanged.
Matrix build_scaling(const Matrix& e, const Matrix& q_mat, double kappa);

// Problem data after scaling the constraints by R: Ebar = RE, Fbar = RF.
struct ScaledProblem {
  Matrix q_mat;
  Matrix ebar;
  Matrix fbar;
  double rho = 1.0;
  double kappa = 0.0;  // Ebar^T Ebar = kappa Q when positive; 0 when not known

  std::size_t num_primal() const { return q_mat.rows(); }
  std::size_t num_aux() const { return fbar.cols(); }
};

ScaledProblem scale_problem(const EqualityQp& p, const Matrix& r, double rho, double kappa = 0.0);

// Edge-variable consensus problem: Ebar = [R B_O; R B_I], Fbar = -[R; R] with
// R = diag(sqrt(w_e)). Requires strictly positive weights.
ScaledProblem consensus_problem(std::span<const double> q_diag, const WeightedGraph& g, double rho);

// z with Fbar z = -Pi_{R(Fbar)} Ebar x0, the initialization under which the
// iterates follow the two-step matrix recursion exactly.
Vector projected_initial_z(const ScaledProblem& sp, std::span<const double> x0);

struct AdmmOptions {
  int iterations = 200;
  double stop_distance = 1e-13;  // early exit once ||x - fixed_point|| drops below
  std::optional<Vector> fixed_point;
};

struct AdmmTrace {
  std::vector<Vector> x;  // x^0 .. x^K
  std::vector<Vector> z;
  std::vector<Vector> u;
  Vector residuals;  // ||Ebar x^k + Fbar z^k||, k >= 1
  Vector distances;  // ||x^k - fixed_point||, k >= 0 (empty without a fixed point)
};

// Scaled ADMM on a ScaledProblem. The x-update matrix Q + rho Ebar^T Ebar is
// factored once at construction.
class AdmmEngine {
 public:
  AdmmEngine(ScaledProblem sp, Vector q);

  AdmmTrace run(std::span<const double> x0, std::span<const double> z0,
                std::span<const double> u0, const AdmmOptions& options = {}) const;

  const ScaledProblem& problem() const { return sp_; }

 private:
  ScaledProblem sp_;
  Vector q_;
  Cholesky x_system_;
  Cholesky z_system_;
};

AdmmTrace admm_iterate(const ScaledProblem& sp, std::span<const double> q, std::span<const double> x0,
                       std::span<const double> z0, std::span<const double> u0,
                       const AdmmOptions& options = {});

// Linear map (x^{k+1}, x^k) = M (x^k, x^{k-1}) with M = [M11 M12; I 0].
struct IterationMatrix {
  Matrix m11;
  Matrix m12;

  std::size_t size() const { return m11.rows(); }
  Matrix assembled() const;
  Vector advance(std::span<const double> x_k, std::span<const double> x_km1) const;
};

// General form built from the projectors onto R(Fbar) and N(Fbar^T).
IterationMatrix iteration_matrix(const ScaledProblem& sp);

// Consensus form: M11 = rho (Q + rho D)^{-1} A + I,
//                 M12 = -(rho / 2) (Q + rho D)^{-1} (D + A).
IterationMatrix consensus_iteration_matrix(double rho, const GraphMatrices& gm,
                                           std::span<const double> q_diag);

// x^1 produced by the first ADMM step from x^0 with u^0 = 0 and the projected z^0.
Vector first_iterate(const ScaledProblem& sp, std::span<const double> q, std::span<const double> x0);

// x^0 .. x^K from the recursion seeded with (x^1, x^0).
std::vector<Vector> matrix_recursion(const IterationMatrix& m, std::span<const double> x0,
                                     std::span<const double> x1, int iterations);

// f(rho) = rho kappa / (1 + rho kappa).
double step_factor(double rho, double kappa);

// Roots of phi^2 - (1 + f lambda) phi + f (1 + lambda) / 2 = 0.
struct EigenvaluePair {
  std::complex<double> plus;
  std::complex<double> minus;

  double magnitude() const { return std::max(std::abs(plus), std::abs(minus)); }
  bool is_complex() const { return plus.imag() != 0.0; }
};

EigenvaluePair closed_form_eigenvalues(double lambda, double kappa, double rho);
std::vector<EigenvaluePair> closed_form_eigenvalues(std::span<const double> lambdas, double kappa,
                                                    double rho);

Vector distances_to(const std::vector<Vector>& xs, std::span<const double> fixed_point);

// Per-step contraction estimated as exp(slope) of a least-squares line through
// log-distances over the second half of the usable trace. The trace is cut at
// the first distance below 1e3 * machine epsilon * max(1, max distance);
// at least 20 usable entries are required. Throws Stagnated if the fitted
// slope is not negative.
double empirical_factor(std::span<const double> distances);
double empirical_factor(const AdmmTrace& trace, std::span<const double> fixed_point);

}  // namespace admm_tuner
