#include "admm_tuner/io.hpp"

#include <cstdio>
#include <fstream>
#include <string>

#include "admm_tuner/error.hpp"

namespace admm_tuner {

namespace {

Matrix matrix_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw Error(ErrorCode::Io, std::string(what) + " must be an array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = rows == 0 ? 0 : j[0].size();
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw Error(ErrorCode::Io, std::string(what) + " has ragged rows");
    }
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

Vector vector_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw Error(ErrorCode::Io, std::string(what) + " must be an array");
  return j.get<Vector>();
}

// Shortest round-trip representation.
std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  return out;
}

}  // namespace

WeightedGraph graph_from_json(const Json& j) {
  try {
    const auto n = j.at("n").get<std::size_t>();
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() < 2 || e.size() > 3) {
        throw Error(ErrorCode::Io, "edge entries must be [i, j] or [i, j, w]");
      }
      edges.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>(),
                       e.size() == 3 ? e[2].get<double>() : 1.0});
    }
    return WeightedGraph(n, std::move(edges));
  } catch (const Json::exception& ex) {
    throw Error(ErrorCode::Io, std::string("graph: ") + ex.what());
  }
}

Json graph_to_json(const WeightedGraph& g) {
  Json edges = Json::array();
  for (const auto& e : g.edges()) edges.push_back({e.i, e.j, e.w});
  return {{"n", g.num_nodes()}, {"edges", edges}};
}

ProblemFile problem_from_json(const Json& j) {
  try {
    ProblemFile pf;
    if (j.contains("Qbar")) {
      const Matrix hess = matrix_from_json(j.at("Qbar"), "Qbar");
      const auto sizes = j.at("block_sizes").get<std::vector<std::size_t>>();
      const Vector lin = j.contains("qbar") ? vector_from_json(j.at("qbar"), "qbar") : Vector{};
      pf.qp = validate_arrowhead(hess, sizes, lin);
    } else {
      for (const auto& b : j.at("blocks")) {
        ArrowBlock blk;
        blk.qii = matrix_from_json(b.at("Q"), "Q");
        blk.qis = vector_from_json(b.at("Qis"), "Qis");
        blk.q = b.contains("q") ? vector_from_json(b.at("q"), "q") : Vector(blk.qis.size(), 0.0);
        pf.qp.blocks.push_back(std::move(blk));
      }
      pf.qp.qss = j.at("Qss").get<double>();
      pf.qp.qs = j.value("qs", 0.0);
      validate_blocks(pf.qp);
    }
    if (j.contains("alphas")) pf.alphas = vector_from_json(j.at("alphas"), "alphas");
    if (j.contains("graph")) pf.graph = graph_from_json(j.at("graph"));
    return pf;
  } catch (const Json::exception& ex) {
    throw Error(ErrorCode::Io, std::string("problem: ") + ex.what());
  }
}

Json plan_to_json(const ScalingPlan& plan) {
  return {{"graph", graph_to_json(plan.graph)},
          {"weights", plan.graph.weights()},
          {"degrees", plan.degrees},
          {"lambda2", plan.lambda_second},
          {"kappa", plan.kappa},
          {"rho", plan.rho_star},
          {"phi", plan.phi_star},
          {"q_transformed", plan.q_transformed}};
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& ex) {
    throw Error(ErrorCode::Io, path.string() + ": " + ex.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<Vector>& xs,
                     std::span<const double> distances) {
  auto out = open_out(path);
  const std::size_t n = xs.empty() ? 0 : xs.front().size();
  out << "iter";
  for (std::size_t i = 0; i < n; ++i) out << ",x_" << i;
  out << ",dist_to_fixed_point\n";
  for (std::size_t k = 0; k < xs.size(); ++k) {
    out << k;
    for (double v : xs[k]) out << ',' << fmt(v);
    out << ',' << (k < distances.size() ? fmt(distances[k]) : std::string());
    out << '\n';
  }
}

void write_round_log_csv(const std::filesystem::path& path, const std::vector<RoundLog>& logs) {
  auto out = open_out(path);
  const std::size_t n = logs.empty() ? 0 : logs.front().x.size();
  out << "round,messages,max_dev";
  for (std::size_t i = 0; i < n; ++i) out << ",x_" << i;
  out << '\n';
  for (const auto& log : logs) {
    out << log.round << ',' << log.messages << ',' << fmt(log.max_deviation);
    for (double v : log.x) out << ',' << fmt(v);
    out << '\n';
  }
}

}  // namespace admm_tuner
