#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "admm_tuner/io.hpp"
#include "admm_tuner/qp.hpp"
#include "admm_tuner/scaled_admm.hpp"
#include "admm_tuner/simnet.hpp"
#include "admm_tuner/tuning.hpp"

namespace admm_tuner {

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
};

Check check_near(std::string name, double value, double expected, double tolerance);
Check check_at_most(std::string name, double value, double bound);
Json checks_to_json(const std::vector<Check>& checks);
bool all_passed(const std::vector<Check>& checks);

// Path of the bundled reduction example.
std::filesystem::path bundled_example_path();

// ---- bundled arrowhead example ----

struct DqpConfig {
  std::filesystem::path problem = bundled_example_path();
  std::optional<Vector> alphas;  // overrides the file; constructive split if neither is given
  double baseline_rho = 0.55;
  int iterations = 200;
  WeightOptOptions weight_options;
  std::optional<std::filesystem::path> out;  // writes report.json, plan.json, fig2.csv, trace.csv
};

struct DqpReport {
  Vector alphas;
  ConsensusQp consensus;
  double shared_optimum = 0.0;
  Vector dense_solution;
  double recovery_error = 0.0;  // ||recovered eta - dense solution||_inf

  WeightOptResult weights;
  ScalingPlan plan;
  double empirical_recursion = 0.0;  // matrix recursion on the transformed problem at rho*
  double empirical_protocol = 0.0;   // simnet max deviation on the same setup

  double baseline_rho = 0.0;
  double baseline_kappa = 0.0;
  double baseline_closed_form = 0.0;  // unit weights, curvatures replaced by D / kappa
  double baseline_empirical = 0.0;    // unit weights, original curvatures

  std::vector<Vector> fig2;  // rows: iter, optimal, baseline (normalized errors)
  std::vector<Vector> optimal_trace;
  Vector optimal_distances;
  std::vector<RoundLog> protocol_log;
  std::vector<Check> checks;

  Json to_json() const;
};

DqpReport run_dqp_example(const DqpConfig& cfg);

// ---- Monte Carlo over random graphs ----

struct McConfig {
  std::size_t n_min = 5;
  std::size_t n_max = 20;
  std::size_t n_step = 5;
  std::vector<double> epsilons{0.2, 0.8};
  int trials = 50;
  std::uint64_t seed = 1;
  int spot_checks = 5;  // empirical fits per (n, epsilon) cell
  unsigned threads = 0;  // 0: ADMM_TUNER_THREADS, else hardware concurrency
  WeightOptOptions weight_options;
  std::optional<std::filesystem::path> out;  // writes mc_summary.csv, mc_trials.csv, report.json
};

// Three tuning levels, all on the curvature-replaced problem Q = D / kappa:
// unit weights with rho = 1, unit weights with the optimal rho, and optimized
// weights with their optimal rho. Factors are analytic.
struct McTrial {
  std::size_t n = 0;
  double epsilon = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::size_t edges = 0;
  double lambda_unit = 0.0;
  double lambda_weighted = 0.0;
  double factor_untuned = 0.0;
  double factor_unit = 0.0;
  double factor_weighted = 0.0;
  std::optional<double> empirical_weighted;
};

struct McCell {
  std::size_t n = 0;
  double epsilon = 0.0;
  double mean_untuned = 0.0;
  double mean_unit = 0.0;
  double mean_weighted = 0.0;
  int dominance_violations = 0;  // trials with factor_weighted > factor_unit + 1e-9
};

struct McReport {
  std::vector<McTrial> trials;  // deterministic order: n, epsilon, trial
  std::vector<McCell> cells;
  double max_spot_gap = 0.0;
  std::vector<Check> checks;

  Json to_json() const;
};

// Seed of one trial, derived from the base seed and the cell coordinates.
std::uint64_t trial_seed(std::uint64_t base, std::size_t n, std::size_t eps_index, int trial);

McReport run_consensus_mc(const McConfig& cfg);
void write_mc_summary_csv(const std::filesystem::path& path, const McReport& r);

// ---- user supplied problem and graph ----

struct SingleConfig {
  std::filesystem::path problem;
  std::optional<std::filesystem::path> graph;  // else the problem file's embedded graph
  std::optional<Vector> alphas;
  std::optional<double> rho;  // replaces rho*
  int iterations = 500;
  WeightOptOptions weight_options;
  std::optional<std::filesystem::path> out;  // writes plan.json, trace.csv, rounds.csv, report.json
};

struct SingleReport {
  ConsensusQp consensus;
  ScalingPlan plan;
  double rho = 0.0;
  double predicted = 0.0;
  double empirical = 0.0;
  double shared_optimum = 0.0;
  double recovery_error = 0.0;
  AdmmTrace trace;
  std::vector<Check> checks;

  Json to_json() const;
};

SingleReport run_single(const SingleConfig& cfg);

}  // namespace admm_tuner
