#include "admm_tuner/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "admm_tuner/error.hpp"
#include "admm_tuner/scaled_admm.hpp"

namespace admm_tuner {

namespace {

constexpr double kTopEigenTol = 1e-9;
constexpr double kSpectrumSlack = 1e-10;
constexpr double kLmiMargin = 1e-10;

struct Probe {
  bool feasible;
  double value;
  Vector weights;
};

class FeasibilityProblem {
 public:
  FeasibilityProblem(const WeightedGraph& topology, double eps)
      : n_(topology.num_nodes()),
        edges_(topology.edges()),
        p_(ones_complement_basis(n_)),
        pt_(p_.transpose()),
        eps_(eps) {}

  std::size_t num_edges() const { return edges_.size(); }

  // Projected subgradient descent on g for a fixed lambda.
  Probe solve(double lambda, Vector w, const WeightOptOptions& options) const {
    const double cap = static_cast<double>(n_);
    double best = std::numeric_limits<double>::infinity();
    Vector best_w = w;
    Vector sub(edges_.size());
    for (int t = 1; t <= options.steps; ++t) {
      const Eval ev = evaluate(lambda, w, sub);
      if (ev.value < best) {
        best = ev.value;
        best_w = w;
      }
      if (ev.value < 0.0) return {true, ev.value, w};
      const double nrm = norm2(sub);
      if (nrm == 0.0) break;
      const double step = options.step_scale / std::sqrt(static_cast<double>(t)) / nrm;
      for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::clamp(w[k] - step * sub[k], 0.0, cap);
    }
    Vector unused(edges_.size());
    const Eval last = evaluate(lambda, w, unused);
    if (last.value < best) {
      best = last.value;
      best_w = w;
    }
    return {best < 0.0, best, best_w};
  }

  double pencil_term(double lambda, std::span<const double> w) const {
    auto [a, d] = matrices(w);
    return pencil_lmi_value(a, d, lambda, p_);
  }

 private:
  struct Eval {
    double value;
  };

  std::pair<Matrix, Matrix> matrices(std::span<const double> w) const {
    Matrix a(n_, n_), d(n_, n_);
    for (std::size_t k = 0; k < edges_.size(); ++k) {
      const auto& e = edges_[k];
      a(e.i, e.j) = w[k];
      a(e.j, e.i) = w[k];
      d(e.i, e.i) += w[k];
      d(e.j, e.j) += w[k];
    }
    return {std::move(a), std::move(d)};
  }

  // Value of g at w; writes a subgradient into `sub`.
  Eval evaluate(double lambda, std::span<const double> w, Vector& sub) const {
    auto [a, d] = matrices(w);

    const auto pencil = max_eigenpair(symmetrized(pt_ * (a - lambda * d) * p_));
    const Vector v = p_ * std::span<const double>(pencil.vector);

    Matrix conn = a - d;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) conn(i, j) -= 1.0;
    const auto connectivity = max_eigenpair(conn);

    std::size_t weakest = 0;
    for (std::size_t i = 1; i < n_; ++i)
      if (d(i, i) < d(weakest, weakest)) weakest = i;
    const double degree_term = eps_ - d(weakest, weakest);

    const double value = std::max({pencil.value, connectivity.value, degree_term});
    for (std::size_t k = 0; k < edges_.size(); ++k) {
      const auto& e = edges_[k];
      if (value == pencil.value) {
        sub[k] = 2.0 * v[e.i] * v[e.j] - lambda * (v[e.i] * v[e.i] + v[e.j] * v[e.j]);
      } else if (value == connectivity.value) {
        const auto& c = connectivity.vector;
        sub[k] = -(c[e.i] - c[e.j]) * (c[e.i] - c[e.j]);
      } else {
        sub[k] = (e.i == weakest || e.j == weakest) ? -1.0 : 0.0;
      }
    }
    return {value};
  }

  std::size_t n_;
  std::vector<Edge> edges_;
  Matrix p_;
  Matrix pt_;
  double eps_;
};

}  // namespace

SpectralSummary spectral_summary(const GraphMatrices& gm, double kappa) {
  const std::size_t n = gm.a.rows();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "spectral summary needs n >= 2");
  if (!(kappa > 0.0)) throw Error(ErrorCode::InvalidArgument, "kappa must be positive");
  SpectralSummary s;
  s.lambdas = pencil_eigenvalues(gm.a, gm.d);
  s.kappa = kappa;
  if (std::abs(s.lambdas.back() - 1.0) > kTopEigenTol || s.lambdas.front() < -1.0 - kSpectrumSlack) {
    throw Error(ErrorCode::InvalidArgument, "pencil spectrum outside [-1, 1]");
  }
  s.lambdas.back() = 1.0;
  for (double& l : s.lambdas) l = std::clamp(l, -1.0, 1.0);
  s.lambda_second = s.lambdas[n - 2];
  if (!(s.lambda_second < 1.0 - kTopEigenTol)) {
    throw Error(ErrorCode::Disconnected, "top pencil eigenvalue is not simple");
  }
  return s;
}

double kappa_for(std::span<const double> d, std::span<const double> q) {
  if (d.size() != q.size() || d.empty()) {
    throw Error(ErrorCode::InvalidArgument, "kappa_for needs equal-length nonempty diagonals");
  }
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!(d[i] > 0.0) || !(q[i] > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "kappa_for needs positive diagonals");
    }
  }
  return std::accumulate(d.begin(), d.end(), 0.0) / std::accumulate(q.begin(), q.end(), 0.0);
}

double optimal_rho(double lambda_second, double kappa) {
  if (!(lambda_second < 1.0)) throw Error(ErrorCode::InvalidArgument, "lambda_{n-1} must be < 1");
  if (lambda_second >= 0.0) return 1.0 / (kappa * std::sqrt(1.0 - lambda_second * lambda_second));
  return 1.0 / kappa;
}

double predicted_factor(double lambda_second) {
  if (!(lambda_second < 1.0)) throw Error(ErrorCode::InvalidArgument, "lambda_{n-1} must be < 1");
  if (lambda_second < 0.0) return 0.5;
  return 0.5 * (1.0 + lambda_second / (1.0 + std::sqrt(1.0 - lambda_second * lambda_second)));
}

double phi_magnitude(double rho, double kappa, double lambda) {
  return closed_form_eigenvalues(lambda, kappa, rho).magnitude();
}

double second_largest_magnitude(double rho, double kappa, const SpectralSummary& s) {
  double best = step_factor(rho, kappa);
  for (std::size_t i = 0; i + 1 < s.lambdas.size(); ++i) {
    best = std::max(best, phi_magnitude(rho, kappa, s.lambdas[i]));
  }
  return best;
}

double rho_minimizing(double lambda, double kappa) {
  return 1.0 / (kappa * std::sqrt(1.0 - lambda * lambda));
}

double worst_lambda(double rho, double kappa, const SpectralSummary& s) {
  if (s.lambda_second >= 0.0 || rho * kappa <= 1.0) return s.lambda_second;
  const double low = s.lambda_min();
  return phi_magnitude(rho, kappa, low) > phi_magnitude(rho, kappa, s.lambda_second) ? low : s.lambda_second;
}

double pencil_lmi_value(const Matrix& a, const Matrix& d, double lambda, const Matrix& p) {
  return max_eigenpair(symmetrized(p.transpose() * (a - lambda * d) * p)).value;
}

bool connectivity_lmi_holds(const Matrix& a, const Matrix& d) {
  return connectivity_lmi_value(a, d) < -kLmiMargin * std::max(1.0, d.max_abs());
}

double connectivity_lmi_value(const Matrix& a, const Matrix& d) {
  Matrix m = a - d;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) -= 1.0;
  return max_eigenpair(m).value;
}

WeightOptResult optimize_weights(const WeightedGraph& topology, const WeightOptOptions& options) {
  const std::size_t n = topology.num_nodes();
  const std::size_t m = topology.num_edges();
  if (n < 2 || m == 0) throw Error(ErrorCode::InfeasibleTopology, "topology has no edges");
  const WeightedGraph pattern = topology.with_weights(Vector(m, 1.0));
  if (!is_connected(pattern)) {
    throw Error(ErrorCode::InfeasibleTopology, "topology admits no connected weighting");
  }
  const double eps = options.eps > 0.0 ? options.eps : 1e-3 * static_cast<double>(n) / static_cast<double>(m);
  const FeasibilityProblem problem(pattern, eps);

  WeightOptResult result;
  Vector best(m, static_cast<double>(n) / (2.0 * static_cast<double>(m)));
  double hi = 1.0 - options.tol;
  {
    Probe top = problem.solve(hi, best, options);
    result.history.push_back({hi, top.feasible, top.value});
    if (!top.feasible) {
      throw Error(ErrorCode::InfeasibleTopology, "no weights certify lambda < 1");
    }
    best = std::move(top.weights);
  }
  double lo = -1.0 + 1e-9;
  while (hi - lo > options.tol) {
    const double mid = 0.5 * (lo + hi);
    Probe probe = problem.solve(mid, best, options);
    result.history.push_back({mid, probe.feasible, probe.value});
    if (probe.feasible) {
      hi = mid;
      best = std::move(probe.weights);
    } else {
      lo = mid;
    }
  }

  const double total = 2.0 * std::accumulate(best.begin(), best.end(), 0.0);
  for (double& w : best) w *= static_cast<double>(n) / total;
  const WeightedGraph weighted = pattern.with_weights(best);
  const GraphMatrices gm = build_matrices(weighted);
  result.weights = best;
  result.lambda_bound = hi;
  result.certificate = problem.pencil_term(hi, best);
  result.lambda_second_star = spectral_summary(gm, 1.0).lambda_second;
  return result;
}

ScalingPlan plan_for_weights(const ConsensusQp& c, const WeightedGraph& weighted) {
  if (c.num_nodes() != weighted.num_nodes()) {
    throw Error(ErrorCode::InvalidArgument, "problem and graph sizes differ");
  }
  if (!is_connected(weighted)) throw Error(ErrorCode::Disconnected, "graph is not connected");
  const GraphMatrices gm = build_matrices(weighted);
  ScalingPlan plan;
  plan.graph = weighted;
  plan.degrees = gm.degrees();
  plan.kappa = kappa_for(plan.degrees, c.qhat_quadratic);
  const SpectralSummary s = spectral_summary(gm, plan.kappa);
  plan.lambda_second = s.lambda_second;
  plan.rho_star = optimal_rho(s.lambda_second, plan.kappa);
  plan.phi_star = predicted_factor(s.lambda_second);
  plan.q_transformed = plan.degrees;
  for (double& v : plan.q_transformed) v /= plan.kappa;
  return plan;
}

ScalingPlan optimal_scaling_pipeline(const ConsensusQp& c, const WeightedGraph& topology,
                                     const WeightOptOptions& options) {
  const WeightOptResult opt = optimize_weights(topology, options);
  return plan_for_weights(c, topology.with_weights(opt.weights));
}

ConsensusQp transformed_problem(const ConsensusQp& c, const ScalingPlan& plan) {
  ConsensusQp out = make_consensus_qp(plan.q_transformed, c.qhat_linear);
  out.recovery = c.recovery;
  return out;
}

}  // namespace admm_tuner
