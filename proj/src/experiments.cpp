#include "admm_tuner/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>

#include "admm_tuner/error.hpp"
#include "admm_tuner/scaled_admm.hpp"

namespace admm_tuner {

namespace {

constexpr double kEmpiricalSlack = 0.03;
constexpr double kDominanceSlack = 1e-9;
constexpr double kLowerBoundSlack = 1e-12;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

AlphaSplit choose_alphas(const ArrowheadQp& qp, const std::optional<Vector>& override_alphas,
                         const std::optional<Vector>& file_alphas) {
  if (override_alphas) return make_alpha_split(*override_alphas);
  if (file_alphas) return make_alpha_split(*file_alphas);
  return allocate_alphas(qp);
}

// Largest entry of |recovered eta - dense solution|; the shared variable sits last.
double recovery_error(const ArrowheadQp& qp, const ConsensusQp& c, double eta_s) {
  const Vector dense = qp.dense_solution();
  Vector eta;
  for (const auto& block : recover_private(c, eta_s)) eta.insert(eta.end(), block.begin(), block.end());
  eta.push_back(eta_s);
  return norm_inf(axpy(-1.0, dense, eta));
}

// Centralized recursion on the consensus problem from x0.
std::vector<Vector> consensus_recursion(const ConsensusQp& c, const WeightedGraph& g, double rho,
                                        std::span<const double> x0, int iterations) {
  const ScaledProblem sp = consensus_problem(c.qhat_quadratic, g, rho);
  const Vector x1 = first_iterate(sp, c.qhat_linear, x0);
  const IterationMatrix m = consensus_iteration_matrix(rho, build_matrices(g), c.qhat_quadratic);
  return matrix_recursion(m, x0, x1, iterations);
}

unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned n = requested;
  if (n == 0) {
    if (const char* env = std::getenv("ADMM_TUNER_THREADS")) n = static_cast<unsigned>(std::atoi(env));
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

}  // namespace

Check check_near(std::string name, double value, double expected, double tolerance) {
  return {std::move(name), std::abs(value - expected) <= tolerance, value, expected, tolerance};
}

Check check_at_most(std::string name, double value, double bound) {
  return {std::move(name), value <= bound, value, bound, 0.0};
}

Json checks_to_json(const std::vector<Check>& checks) {
  Json out = Json::array();
  for (const auto& c : checks) {
    out.push_back({{"name", c.name},
                   {"passed", c.passed},
                   {"value", c.value},
                   {"expected", c.expected},
                   {"tolerance", c.tolerance}});
  }
  return out;
}

bool all_passed(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::filesystem::path bundled_example_path() {
  return std::filesystem::path(ADMM_TUNER_DATA_DIR) / "dqp_example.json";
}

// ---------------------------------------------------------------------------

Json DqpReport::to_json() const {
  return {{"alphas", alphas},
          {"qhat", consensus.qhat_quadratic},
          {"qhat_linear", consensus.qhat_linear},
          {"shared_optimum", shared_optimum},
          {"dense_solution", dense_solution},
          {"recovery_error", recovery_error},
          {"plan", plan_to_json(plan)},
          {"lambda_bound", weights.lambda_bound},
          {"empirical_recursion", empirical_recursion},
          {"empirical_protocol", empirical_protocol},
          {"baseline",
           {{"rho", baseline_rho},
            {"kappa", baseline_kappa},
            {"closed_form", baseline_closed_form},
            {"empirical", baseline_empirical}}},
          {"checks", checks_to_json(checks)},
          {"passed", all_passed(checks)}};
}

DqpReport run_dqp_example(const DqpConfig& cfg) {
  const ProblemFile pf = problem_from_json(read_json(cfg.problem));
  if (!pf.graph) throw Error(ErrorCode::Io, "bundled example lacks a graph");
  DqpReport r;
  const AlphaSplit split = choose_alphas(pf.qp, cfg.alphas, pf.alphas);
  r.alphas = split.alphas;
  r.consensus = reduce_to_consensus(pf.qp, split);
  r.shared_optimum = shared_optimum(r.consensus);
  r.dense_solution = pf.qp.dense_solution();
  r.recovery_error = recovery_error(pf.qp, r.consensus, r.shared_optimum);

  const std::size_t n = r.consensus.num_nodes();
  const Vector target(n, r.shared_optimum);
  const Vector x0(n, 0.0);

  // Optimal plan: optimized weights, curvatures replaced by D / kappa, rho*.
  r.weights = optimize_weights(*pf.graph, cfg.weight_options);
  r.plan = plan_for_weights(r.consensus, pf.graph->with_weights(r.weights.weights));
  const ConsensusQp tuned = transformed_problem(r.consensus, r.plan);
  const WeightedGraph support = r.plan.graph.positive_support();
  r.optimal_trace = consensus_recursion(tuned, support, r.plan.rho_star, x0, cfg.iterations);
  r.optimal_distances = distances_to(r.optimal_trace, target);
  r.empirical_recursion = empirical_factor(r.optimal_distances);

  r.protocol_log = run_protocol(tuned, support, r.plan.rho_star, x0,
                                static_cast<std::size_t>(cfg.iterations));
  Vector dev;
  for (const auto& log : r.protocol_log) dev.push_back(log.max_deviation);
  r.empirical_protocol = empirical_factor(dev);

  // Baseline: unit weights at a fixed rho.
  const WeightedGraph unit = pf.graph->with_weights(Vector(pf.graph->num_edges(), 1.0));
  const GraphMatrices gm_unit = build_matrices(unit);
  r.baseline_rho = cfg.baseline_rho;
  r.baseline_kappa = kappa_for(gm_unit.degrees(), r.consensus.qhat_quadratic);
  r.baseline_closed_form = second_largest_magnitude(
      r.baseline_rho, r.baseline_kappa, spectral_summary(gm_unit, r.baseline_kappa));
  const auto baseline_trace = consensus_recursion(r.consensus, unit, r.baseline_rho, x0, cfg.iterations);
  const Vector baseline_dist = distances_to(baseline_trace, target);
  r.baseline_empirical = empirical_factor(baseline_dist);

  const std::size_t rows = std::min(r.optimal_distances.size(), baseline_dist.size());
  for (std::size_t k = 0; k < rows; ++k) {
    r.fig2.push_back({static_cast<double>(k), r.optimal_distances[k] / r.optimal_distances[0],
                      baseline_dist[k] / baseline_dist[0]});
  }

  r.checks.push_back(check_near("qhat_0", r.consensus.qhat_quadratic[0], 0.5507, 1e-3));
  r.checks.push_back(check_near("qhat_1", r.consensus.qhat_quadratic[1], 0.0667, 1e-3));
  r.checks.push_back(check_near("qhat_2", r.consensus.qhat_quadratic[2], 0.2232, 1e-3));
  r.checks.push_back(check_near("qhat_linear_0", r.consensus.qhat_linear[0], -0.3116, 1e-3));
  r.checks.push_back(check_near("qhat_linear_1", r.consensus.qhat_linear[1], -0.3667, 1e-3));
  r.checks.push_back(check_near("qhat_linear_2", r.consensus.qhat_linear[2], -0.1623, 1e-3));
  r.checks.push_back(check_near("recovery_error", r.recovery_error, 0.0, 1e-9));
  r.checks.push_back(check_near("lambda_star", r.plan.lambda_second, 0.0, 1e-5));
  r.checks.push_back(check_near("phi_star", r.plan.phi_star, 0.5, 1e-12));
  r.checks.push_back(check_near("empirical_recursion", r.empirical_recursion, r.plan.phi_star, kEmpiricalSlack));
  r.checks.push_back(check_near("empirical_protocol", r.empirical_protocol, r.plan.phi_star, kEmpiricalSlack));
  r.checks.push_back(check_near("baseline_factor", r.baseline_closed_form, 0.557, 1e-3));

  if (cfg.out) {
    write_json(*cfg.out / "report.json", r.to_json());
    write_json(*cfg.out / "plan.json", plan_to_json(r.plan));
    write_trace_csv(*cfg.out / "trace.csv", r.optimal_trace, r.optimal_distances);
    write_round_log_csv(*cfg.out / "rounds.csv", r.protocol_log);
    std::ofstream fig(*cfg.out / "fig2.csv");
    if (!fig) throw Error(ErrorCode::Io, "cannot write fig2.csv");
    fig << "iter,optimal,unit_weights\n";
    fig.precision(17);
    for (const auto& row : r.fig2) fig << row[0] << ',' << row[1] << ',' << row[2] << '\n';
  }
  return r;
}

// ---------------------------------------------------------------------------

std::uint64_t trial_seed(std::uint64_t base, std::size_t n, std::size_t eps_index, int trial) {
  std::uint64_t s = splitmix64(base);
  s = splitmix64(s ^ static_cast<std::uint64_t>(n));
  s = splitmix64(s ^ static_cast<std::uint64_t>(eps_index));
  return splitmix64(s ^ static_cast<std::uint64_t>(trial));
}

namespace {

McTrial run_trial(std::size_t n, double epsilon, std::size_t eps_index, int trial, bool spot,
                  const McConfig& cfg) {
  McTrial t;
  t.n = n;
  t.epsilon = epsilon;
  t.trial = trial;
  t.seed = trial_seed(cfg.seed, n, eps_index, trial);
  const WeightedGraph g = connected_erdos_renyi(n, epsilon, t.seed);
  t.edges = g.num_edges();
  const ConsensusQp c = make_consensus_qp(Vector(n, 1.0), Vector(n, 0.0));

  const ScalingPlan unit = plan_for_weights(c, g);
  const SpectralSummary s_unit = spectral_summary(build_matrices(g), unit.kappa);
  t.lambda_unit = unit.lambda_second;
  t.factor_untuned = second_largest_magnitude(1.0, unit.kappa, s_unit);
  t.factor_unit = second_largest_magnitude(unit.rho_star, unit.kappa, s_unit);

  const ScalingPlan tuned = optimal_scaling_pipeline(c, g, cfg.weight_options);
  const WeightedGraph support = tuned.graph.positive_support();
  const SpectralSummary s_tuned = spectral_summary(build_matrices(tuned.graph), tuned.kappa);
  t.lambda_weighted = tuned.lambda_second;
  t.factor_weighted = second_largest_magnitude(tuned.rho_star, tuned.kappa, s_tuned);

  if (spot) {
    std::mt19937_64 rng(t.seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Vector x0(n);
    for (double& v : x0) v = unif(rng);
    const ConsensusQp cq = transformed_problem(c, tuned);
    const auto xs = consensus_recursion(cq, support, tuned.rho_star, x0, 3000);
    t.empirical_weighted = empirical_factor(distances_to(xs, Vector(n, shared_optimum(cq))));
  }
  return t;
}

}  // namespace

Json McReport::to_json() const {
  Json cells_json = Json::array();
  for (const auto& c : cells) {
    cells_json.push_back({{"n", c.n},
                          {"epsilon", c.epsilon},
                          {"mean_untuned", c.mean_untuned},
                          {"mean_unit_weights", c.mean_unit},
                          {"mean_weighted", c.mean_weighted},
                          {"dominance_violations", c.dominance_violations}});
  }
  return {{"cells", cells_json},
          {"trials", trials.size()},
          {"max_spot_gap", max_spot_gap},
          {"checks", checks_to_json(checks)},
          {"passed", all_passed(checks)}};
}

McReport run_consensus_mc(const McConfig& cfg) {
  if (cfg.trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
  if (cfg.n_min < 2 || cfg.n_max < cfg.n_min || cfg.n_step == 0) {
    throw Error(ErrorCode::InvalidArgument, "invalid n range");
  }
  struct Job {
    std::size_t n;
    std::size_t eps_index;
    int trial;
  };
  std::vector<Job> jobs;
  for (std::size_t n = cfg.n_min; n <= cfg.n_max; n += cfg.n_step)
    for (std::size_t e = 0; e < cfg.epsilons.size(); ++e)
      for (int t = 0; t < cfg.trials; ++t) jobs.push_back({n, e, t});

  McReport r;
  r.trials.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      const Job& j = jobs[k];
      try {
        r.trials[k] = run_trial(j.n, cfg.epsilons[j.eps_index], j.eps_index, j.trial,
                                j.trial < cfg.spot_checks, cfg);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned workers = worker_count(cfg.threads, jobs.size());
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  bool dominance = true, lower_bound = true, monotone = true;
  double min_factor = 1.0;
  for (std::size_t start = 0; start < r.trials.size(); start += static_cast<std::size_t>(cfg.trials)) {
    McCell cell;
    cell.n = r.trials[start].n;
    cell.epsilon = r.trials[start].epsilon;
    for (int t = 0; t < cfg.trials; ++t) {
      const McTrial& tr = r.trials[start + static_cast<std::size_t>(t)];
      cell.mean_untuned += tr.factor_untuned;
      cell.mean_unit += tr.factor_unit;
      cell.mean_weighted += tr.factor_weighted;
      if (tr.factor_weighted > tr.factor_unit + kDominanceSlack) ++cell.dominance_violations;
      min_factor = std::min({min_factor, tr.factor_unit, tr.factor_weighted});
      if (tr.empirical_weighted) {
        r.max_spot_gap = std::max(r.max_spot_gap, std::abs(*tr.empirical_weighted - tr.factor_weighted));
      }
    }
    const double count = static_cast<double>(cfg.trials);
    cell.mean_untuned /= count;
    cell.mean_unit /= count;
    cell.mean_weighted /= count;
    dominance = dominance && cell.dominance_violations == 0;
    monotone = monotone && cell.mean_weighted <= cell.mean_unit && cell.mean_unit <= cell.mean_untuned;
    r.cells.push_back(cell);
  }
  lower_bound = min_factor >= 0.5 - kLowerBoundSlack;

  int violations = 0;
  for (const auto& c : r.cells) violations += c.dominance_violations;
  r.checks.push_back({"weighted_dominates_unit", dominance, static_cast<double>(violations), 0.0, 0.0});
  r.checks.push_back({"means_monotone_in_tuning", monotone, 0.0, 0.0, 0.0});
  r.checks.push_back({"factor_lower_bound", lower_bound, min_factor, 0.5, kLowerBoundSlack});
  r.checks.push_back(check_at_most("spot_check_gap", r.max_spot_gap, kEmpiricalSlack));

  if (cfg.out) {
    write_mc_summary_csv(*cfg.out / "mc_summary.csv", r);
    std::ofstream out(*cfg.out / "mc_trials.csv");
    if (!out) throw Error(ErrorCode::Io, "cannot write mc_trials.csv");
    out.precision(17);
    out << "n,epsilon,trial,seed,edges,lambda_unit,lambda_weighted,factor_untuned,factor_unit,"
           "factor_weighted,empirical_weighted\n";
    for (const auto& t : r.trials) {
      out << t.n << ',' << t.epsilon << ',' << t.trial << ',' << t.seed << ',' << t.edges << ','
          << t.lambda_unit << ',' << t.lambda_weighted << ',' << t.factor_untuned << ','
          << t.factor_unit << ',' << t.factor_weighted << ',';
      if (t.empirical_weighted) out << *t.empirical_weighted;
      out << '\n';
    }
    write_json(*cfg.out / "report.json", r.to_json());
  }
  return r;
}

void write_mc_summary_csv(const std::filesystem::path& path, const McReport& r) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.precision(17);
  out << "n,epsilon,mean_untuned,mean_unit_weights,mean_weighted,dominance_violations\n";
  for (const auto& c : r.cells) {
    out << c.n << ',' << c.epsilon << ',' << c.mean_untuned << ',' << c.mean_unit << ','
        << c.mean_weighted << ',' << c.dominance_violations << '\n';
  }
}

// ---------------------------------------------------------------------------

Json SingleReport::to_json() const {
  return {{"plan", plan_to_json(plan)},
          {"rho", rho},
          {"predicted", predicted},
          {"empirical", empirical},
          {"shared_optimum", shared_optimum},
          {"recovery_error", recovery_error},
          {"iterations", trace.x.empty() ? 0 : trace.x.size() - 1},
          {"checks", checks_to_json(checks)},
          {"passed", all_passed(checks)}};
}

SingleReport run_single(const SingleConfig& cfg) {
  const ProblemFile pf = problem_from_json(read_json(cfg.problem));
  std::optional<WeightedGraph> graph = pf.graph;
  if (cfg.graph) graph = graph_from_json(read_json(*cfg.graph));
  if (!graph) throw Error(ErrorCode::InvalidArgument, "no graph given and none embedded in the problem");
  if (graph->num_nodes() != pf.qp.num_blocks()) {
    throw Error(ErrorCode::InvalidArgument, "graph has " + std::to_string(graph->num_nodes()) +
                                                " nodes for " + std::to_string(pf.qp.num_blocks()) +
                                                " blocks");
  }
  if (!is_connected(*graph, false)) throw Error(ErrorCode::Disconnected, "graph is not connected");

  SingleReport r;
  r.consensus = reduce_to_consensus(pf.qp, choose_alphas(pf.qp, cfg.alphas, pf.alphas));
  r.shared_optimum = shared_optimum(r.consensus);
  r.recovery_error = recovery_error(pf.qp, r.consensus, r.shared_optimum);
  r.plan = optimal_scaling_pipeline(r.consensus, *graph, cfg.weight_options);
  r.rho = cfg.rho.value_or(r.plan.rho_star);
  const SpectralSummary s = spectral_summary(build_matrices(r.plan.graph), r.plan.kappa);
  r.predicted = second_largest_magnitude(r.rho, r.plan.kappa, s);

  const ConsensusQp tuned = transformed_problem(r.consensus, r.plan);
  const WeightedGraph support = r.plan.graph.positive_support();
  const ScaledProblem sp = consensus_problem(tuned.qhat_quadratic, support, r.rho);
  const std::size_t n = r.consensus.num_nodes();
  const Vector x0(n, 0.0);
  const Vector target(n, r.shared_optimum);
  AdmmOptions opt;
  opt.iterations = cfg.iterations;
  opt.fixed_point = target;
  opt.stop_distance = 0.0;
  r.trace = admm_iterate(sp, tuned.qhat_linear, x0, projected_initial_z(sp, x0),
                         Vector(sp.ebar.rows(), 0.0), opt);

  r.checks.push_back(check_near("recovery_error", r.recovery_error, 0.0, 1e-9));
  if (r.trace.distances.front() == 0.0) {
    r.empirical = 0.0;  // started at the optimum
  } else {
    r.empirical = empirical_factor(r.trace.distances);
    r.checks.push_back(check_near("empirical_vs_predicted", r.empirical, r.predicted, kEmpiricalSlack));
  }
  r.checks.push_back(check_near("final_distance", r.trace.distances.back(), 0.0, 1e-8));

  if (cfg.out) {
    write_json(*cfg.out / "plan.json", plan_to_json(r.plan));
    write_trace_csv(*cfg.out / "trace.csv", r.trace.x, r.trace.distances);
    write_json(*cfg.out / "report.json", r.to_json());
  }
  return r;
}

}  // namespace admm_tuner
