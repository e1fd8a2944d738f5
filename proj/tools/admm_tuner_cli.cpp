#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "admm_tuner/error.hpp"
#include "admm_tuner/experiments.hpp"

using namespace admm_tuner;

namespace {

void print_checks(const std::vector<Check>& checks) {
  for (const auto& c : checks) {
    std::printf("  %-28s %s  value=%.6g expected=%.6g tol=%.3g\n", c.name.c_str(),
                c.passed ? "ok  " : "FAIL", c.value, c.expected, c.tolerance);
  }
}

void print_vector(const char* label, const Vector& v) {
  std::printf("%-10s", label);
  for (double x : v) std::printf(" % .6f", x);
  std::printf("\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal edge weights and step-size for consensus ADMM"};

  std::string mode;
  std::optional<std::string> problem, graph;
  std::size_t n_min = 5, n_max = 20, n_step = 5;
  std::vector<double> epsilons{0.2, 0.8};
  int trials = 50;
  std::uint64_t seed = 1;
  std::optional<double> rho;
  std::optional<std::vector<double>> alphas;
  std::string out = "out";
  double lmi_eps = 0.0;

  app.add_option("--mode", mode, "dqp-example | consensus-mc | single-run")
      ->required()
      ->check(CLI::IsMember({"dqp-example", "consensus-mc", "single-run"}));
  app.add_option("--problem", problem, "problem JSON (blocks or dense arrowhead)");
  app.add_option("--graph", graph, "graph JSON {n, edges: [[i, j, w], ...]}");
  app.add_option("--n-min", n_min)->check(CLI::PositiveNumber);
  app.add_option("--n-max", n_max)->check(CLI::PositiveNumber);
  app.add_option("--n-step", n_step)->check(CLI::PositiveNumber);
  app.add_option("--epsilon", epsilons, "ER density offsets");
  app.add_option("--trials", trials)->check(CLI::PositiveNumber);
  app.add_option("--seed", seed);
  app.add_option("--rho", rho, "step-size override")->check(CLI::PositiveNumber);
  app.add_option("--alphas", alphas, "shared-curvature split override");
  app.add_option("--out", out, "output directory");
  app.add_option("--lmi-eps", lmi_eps, "minimum degree in the weight design (0: 1e-3 n/m)");
  CLI11_PARSE(app, argc, argv);

  WeightOptOptions wopt;
  wopt.eps = lmi_eps;
  const std::filesystem::path out_dir(out);

  try {
    if (mode == "dqp-example") {
      DqpConfig cfg;
      if (problem) cfg.problem = *problem;
      cfg.alphas = alphas;
      if (rho) cfg.baseline_rho = *rho;
      cfg.weight_options = wopt;
      cfg.out = out_dir;
      const DqpReport r = run_dqp_example(cfg);
      print_vector("alpha", r.alphas);
      print_vector("Qhat", r.consensus.qhat_quadratic);
      print_vector("qhat", r.consensus.qhat_linear);
      print_vector("weights", r.plan.graph.weights());
      std::printf("x*        % .6f\n", r.shared_optimum);
      std::printf("lambda*   % .6f\nkappa     % .6f\nrho*      % .6f\nphi*      % .6f\n",
                  r.plan.lambda_second, r.plan.kappa, r.plan.rho_star, r.plan.phi_star);
      std::printf("empirical optimal plan: recursion %.4f  protocol %.4f\n", r.empirical_recursion,
                  r.empirical_protocol);
      std::printf("unit weights rho=%.3g: closed form %.4f  empirical %.4f\n", r.baseline_rho,
                  r.baseline_closed_form, r.baseline_empirical);
      print_checks(r.checks);
      return all_passed(r.checks) ? 0 : 1;
    }
    if (mode == "consensus-mc") {
      McConfig cfg;
      cfg.n_min = n_min;
      cfg.n_max = n_max;
      cfg.n_step = n_step;
      cfg.epsilons = epsilons;
      cfg.trials = trials;
      cfg.seed = seed;
      cfg.weight_options = wopt;
      cfg.out = out_dir;
      const McReport r = run_consensus_mc(cfg);
      std::printf("%4s %6s %10s %10s %10s %5s\n", "n", "eps", "untuned", "unit", "weighted", "viol");
      for (const auto& c : r.cells) {
        std::printf("%4zu %6.2f %10.6f %10.6f %10.6f %5d\n", c.n, c.epsilon, c.mean_untuned, c.mean_unit,
                    c.mean_weighted, c.dominance_violations);
      }
      print_checks(r.checks);
      return all_passed(r.checks) ? 0 : 1;
    }
    SingleConfig cfg;
    if (!problem) throw Error(ErrorCode::InvalidArgument, "--problem is required for single-run");
    cfg.problem = *problem;
    if (graph) cfg.graph = std::filesystem::path(*graph);
    cfg.alphas = alphas;
    cfg.rho = rho;
    cfg.weight_options = wopt;
    cfg.out = out_dir;
    const SingleReport r = run_single(cfg);
    print_vector("Qhat", r.consensus.qhat_quadratic);
    print_vector("weights", r.plan.graph.weights());
    std::printf("lambda    % .6f\nkappa     % .6f\nrho       % .6f\npredicted % .6f\nempirical % .6f\n",
                r.plan.lambda_second, r.plan.kappa, r.rho, r.predicted, r.empirical);
    print_checks(r.checks);
    return all_passed(r.checks) ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    nlohmann::json summary = {{"mode", mode}, {"passed", false}, {"error", e.what()},
                              {"code", std::string(to_string(e.code()))}};
    try {
      write_json(out_dir / "report.json", summary);
    } catch (const Error&) {
    }
    return 2;
  }
}
