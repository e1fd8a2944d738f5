#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "admm_tuner/experiments.hpp"
#include "admm_tuner/io.hpp"
#include "helpers.hpp"

using namespace admm_tuner;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("admm_tuner_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("graph json round trip") {
  const WeightedGraph g(3, {{0, 1, 0.5}, {1, 2, 2.0}});
  CHECK(graph_from_json(graph_to_json(g)) == g);
  const auto unweighted = graph_from_json(Json::parse(R"({"n": 2, "edges": [[1, 0]]})"));
  CHECK(unweighted.edges()[0] == Edge{0, 1, 1.0});
  CHECK_THROWS_CODE(graph_from_json(Json::parse(R"({"n": 2})")), ErrorCode::Io);
  CHECK_THROWS_CODE(graph_from_json(Json::parse(R"({"n": 2, "edges": [[0]]})")), ErrorCode::Io);
  CHECK_THROWS_CODE(graph_from_json(Json::parse(R"({"n": 2, "edges": [[0, 0]]})")), ErrorCode::InvalidGraph);
}

TEST_CASE("problem json in block layout") {
  const auto pf = problem_from_json(Json::parse(R"({
    "blocks": [{"Q": [[2]], "Qis": [1], "q": [1]}, {"Q": [], "Qis": [], "q": []}],
    "Qss": 3, "qs": -1})"));
  CHECK(pf.qp.num_blocks() == 2);
  CHECK(pf.qp.blocks[1].size() == 0);
  CHECK(pf.qp.dimension() == 2);
  CHECK_FALSE(pf.alphas);
  CHECK_THROWS_CODE(problem_from_json(Json::parse(R"({"blocks": [{"Q": [[1, 2]], "Qis": [1]}], "Qss": 1})")),
                    ErrorCode::InvalidArgument);
  CHECK_THROWS_CODE(problem_from_json(Json::parse(R"({"blocks": [{"Q": [[1, 2], [3]], "Qis": [1, 1]}], "Qss": 1})")),
                    ErrorCode::Io);
  CHECK_THROWS_CODE(read_json("/nonexistent/file.json"), ErrorCode::Io);
}

TEST_CASE("csv exports") {
  const auto dir = scratch("csv");
  write_trace_csv(dir / "trace.csv", {{1.0, 2.0}, {0.5, 1.0}}, Vector{1.0, 0.5});
  CHECK(slurp(dir / "trace.csv") == "iter,x_0,x_1,dist_to_fixed_point\n0,1,2,1\n1,0.5,1,0.5\n");
  RoundLog log;
  log.round = 3;
  log.messages = 4;
  log.x = {0.25};
  log.max_deviation = 0.125;
  write_round_log_csv(dir / "rounds.csv", {log});
  CHECK(slurp(dir / "rounds.csv") == "round,messages,max_dev,x_0\n3,4,0.125,0.25\n");
}

TEST_CASE("plan json keys") {
  const auto c = make_consensus_qp({1.0, 1.0}, {0.0, 0.0});
  const auto plan = plan_for_weights(c, WeightedGraph(2, {{0, 1, 1.0}}));
  const Json j = plan_to_json(plan);
  for (const char* key : {"weights", "lambda2", "kappa", "rho", "phi"}) CHECK(j.contains(key));
  CHECK(j["phi"].get<double>() == 0.5);
}

TEST_CASE("bundled example end to end") {
  DqpConfig cfg;
  cfg.out = scratch("dqp");
  const auto r = run_dqp_example(cfg);
  CHECK(r.plan.phi_star == 0.5);
  CHECK(r.empirical_recursion == doctest::Approx(0.5).epsilon(0.06));
  CHECK(r.recovery_error < 1e-9);
  CHECK(std::filesystem::exists(*cfg.out / "fig2.csv"));
  CHECK(std::filesystem::exists(*cfg.out / "plan.json"));
  CHECK(r.fig2.front()[1] == 1.0);
}

TEST_CASE("monte carlo output is deterministic") {
  McConfig cfg;
  cfg.n_min = 5;
  cfg.n_max = 6;
  cfg.n_step = 1;
  cfg.trials = 3;
  cfg.spot_checks = 1;
  cfg.threads = 2;
  cfg.out = scratch("mc1");
  const auto a = run_consensus_mc(cfg);
  const std::string first = slurp(*cfg.out / "mc_summary.csv");
  cfg.threads = 1;
  cfg.out = scratch("mc2");
  run_consensus_mc(cfg);
  CHECK(slurp(*cfg.out / "mc_summary.csv") == first);
  CHECK(a.cells.size() == 4);
  CHECK(trial_seed(1, 5, 0, 0) != trial_seed(1, 5, 0, 1));
  for (const auto& t : a.trials) CHECK(t.factor_weighted >= 0.5 - 1e-12);
}

TEST_CASE("single run on a triangle and a pair") {
  const auto dir = scratch("single");
  std::filesystem::create_directories(dir);
  write_json(dir / "k3.json", Json::parse(R"({
    "blocks": [{"Q": [], "Qis": []}, {"Q": [], "Qis": []}, {"Q": [], "Qis": []}], "Qss": 3, "qs": -3,
    "graph": {"n": 3, "edges": [[0, 1], [1, 2], [0, 2]]}})"));
  SingleConfig cfg;
  cfg.problem = dir / "k3.json";
  cfg.out = dir / "k3";
  const auto r = run_single(cfg);
  CHECK(r.plan.phi_star == 0.5);
  CHECK(r.shared_optimum == doctest::Approx(1.0));
  CHECK(all_passed(r.checks));
  CHECK(std::filesystem::exists(dir / "k3" / "trace.csv"));

  write_json(dir / "pair.json", Json::parse(R"({
    "blocks": [{"Q": [[2]], "Qis": [1], "q": [1]}, {"Q": [[3]], "Qis": [0.5], "q": [-1]}], "Qss": 4, "qs": 1,
    "graph": {"n": 2, "edges": [[0, 1]]}})"));
  cfg.problem = dir / "pair.json";
  cfg.out = dir / "pair";
  const auto p = run_single(cfg);
  CHECK(p.plan.lambda_second == doctest::Approx(-1.0));
  CHECK(p.plan.rho_star == doctest::Approx(1.0 / p.plan.kappa));
  CHECK(p.plan.phi_star == 0.5);

  write_json(dir / "split.json", Json::parse(R"({"n": 3, "edges": [[0, 1]]})"));
  cfg.problem = dir / "k3.json";
  cfg.graph = dir / "split.json";
  CHECK_THROWS_CODE(run_single(cfg), ErrorCode::Disconnected);
}
