#pragma once

#include <span>
#include <vector>

#include "admm_tuner/graph.hpp"
#include "admm_tuner/linalg.hpp"
#include "admm_tuner/qp.hpp"

namespace admm_tuner {

// Generalized eigenvalues of (A, D) for a connected graph, ascending with the
// top value 1 (eigenvector all-ones).
struct SpectralSummary {
  Vector lambdas;
  double lambda_second = 0.0;  // lambda_{n-1}
  double kappa = 1.0;

  double lambda_min() const { return lambdas.front(); }
};

// Throws Disconnected for graphs that are not connected through positive
// weights; InvalidArgument if the computed spectrum leaves [-1, 1] or the
// top eigenvalue is not simple.
SpectralSummary spectral_summary(const GraphMatrices& gm, double kappa);

// kappa = 1^T D 1 / 1^T Q 1 for positive diagonals D and Q.
double kappa_for(std::span<const double> d, std::span<const double> q);

// Best step-size for a fixed pencil spectrum:
//   1 / (kappa sqrt(1 - l^2))  for l = lambda_{n-1} >= 0,   1 / kappa otherwise.
double optimal_rho(double lambda_second, double kappa);

// Convergence factor reached at optimal_rho:
//   (1 + l / (1 + sqrt(1 - l^2))) / 2  for l >= 0,   1/2 otherwise.
double predicted_factor(double lambda_second);

// |phi(rho, lambda)|, the larger root modulus of the closed-form quadratic.
double phi_magnitude(double rho, double kappa, double lambda);

// Second largest eigenvalue modulus of the iteration matrix:
// max over lambda_1..lambda_{n-1} of |phi(rho, lambda)|, and f(rho).
double second_largest_magnitude(double rho, double kappa, const SpectralSummary& s);

// Step-size minimizing |phi(., lambda)| for a single lambda in (-1, 1).
double rho_minimizing(double lambda, double kappa);

// Pencil eigenvalue attaining the inner maximum of |phi(rho, .)| over
// [lambda_1, lambda_{n-1}]. Always an endpoint: lambda_{n-1} unless
// lambda_{n-1} < 0 and rho kappa > 1, where lambda_1 wins if its modulus is
// strictly larger. Ties go to lambda_{n-1}.
double worst_lambda(double rho, double kappa, const SpectralSummary& s);

// lambda_max(P^T (A - lambda D) P) with P = ones_complement_basis(n).
double pencil_lmi_value(const Matrix& a, const Matrix& d, double lambda, const Matrix& p);
// lambda_max(A - D - 1 1^T); negative exactly when the graph is connected.
// For a disconnected graph the value is 0 up to rounding, so the predicate
// asks for a margin of 1e-10 * max(1, max D_ii).
double connectivity_lmi_value(const Matrix& a, const Matrix& d);
bool connectivity_lmi_holds(const Matrix& a, const Matrix& d);

struct WeightOptOptions {
  double eps = 0.0;  // D > eps I; 0 selects 1e-3 * n / m
  double tol = 1e-5;  // bisection interval width on lambda
  int steps = 500;    // subgradient steps per feasibility probe
  double step_scale = 1.0;  // c in the c / sqrt(t) step rule
};

struct BisectionProbe {
  double lambda;
  bool feasible;
  double certificate;  // best value of the feasibility function reached
};

struct WeightOptResult {
  Vector weights;             // canonical edge order, scaled so 1^T D 1 = n
  double lambda_second_star;  // lambda_{n-1} of (A, D) at the returned weights
  double lambda_bound;        // smallest feasible bisection probe
  double certificate;         // lambda_max(P^T (A - lambda_bound D) P) at the returned weights, < 0
  std::vector<BisectionProbe> history;
};

// Minimizes lambda subject to P^T (A - lambda D) P < 0, A - D - 1 1^T < 0,
// D > eps I over nonnegative edge weights on the given topology (its weights are
// ignored). Bisection over lambda; each probe minimizes the convex function
//   g(w) = max{ lmax(P^T (A - lambda D) P), lmax(A - D - 1 1^T), eps - min_i D_ii }
// by projected subgradient descent on 0 <= w <= n, warm-started from the last
// feasible weights (initially uniform). A probe is feasible once g < 0.
// Throws InfeasibleTopology if the topology cannot be connected.
WeightOptResult optimize_weights(const WeightedGraph& topology, const WeightOptOptions& options = {});

struct ScalingPlan {
  WeightedGraph graph;  // optimized weights on the input topology
  Vector degrees;       // diagonal of D
  double lambda_second = 0.0;
  double kappa = 0.0;
  double rho_star = 0.0;
  double phi_star = 0.0;
  Vector q_transformed;  // D / kappa, replaces the local curvatures
};

// Step-size and factor for fixed weights: kappa from the degrees, then the
// optimal step-size for the pencil spectrum.
ScalingPlan plan_for_weights(const ConsensusQp& c, const WeightedGraph& weighted);

// Optimize weights, compute kappa, then the step-size.
ScalingPlan optimal_scaling_pipeline(const ConsensusQp& c, const WeightedGraph& topology,
                                     const WeightOptOptions& options = {});

// Consensus problem with local curvatures replaced by plan.q_transformed and
// linear terms kept; has the same shared optimum.
ConsensusQp transformed_problem(const ConsensusQp& c, const ScalingPlan& plan);

}  // namespace admm_tuner
