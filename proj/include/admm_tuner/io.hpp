#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "admm_tuner/graph.hpp"
#include "admm_tuner/qp.hpp"
#include "admm_tuner/simnet.hpp"
#include "admm_tuner/tuning.hpp"

namespace admm_tuner {

using Json = nlohmann::json;

// Graph files: {"n": 3, "edges": [[0, 1, 1.0], [1, 2, 1.0]]}. A missing weight
// means 1.
WeightedGraph graph_from_json(const Json& j);
Json graph_to_json(const WeightedGraph& g);

// Problem files take one of two layouts:
//   dense:  {"Qbar": [[...]], "qbar": [...], "block_sizes": [...]}
//   blocks: {"blocks": [{"Q": [[...]], "Qis": [...], "q": [...]}], "Qss": x, "qs": y}
// Both accept an optional "alphas" array and an optional embedded "graph".
struct ProblemFile {
  ArrowheadQp qp;
  std::optional<Vector> alphas;
  std::optional<WeightedGraph> graph;
};

ProblemFile problem_from_json(const Json& j);

Json plan_to_json(const ScalingPlan& plan);

// Throws Io on unreadable files or malformed JSON.
Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

// iter, x_0..x_{n-1}, dist_to_fixed_point
void write_trace_csv(const std::filesystem::path& path, const std::vector<Vector>& xs,
                     std::span<const double> distances);
// round, messages, max_dev, x_0..x_{n-1}
void write_round_log_csv(const std::filesystem::path& path, const std::vector<RoundLog>& logs);

}  // namespace admm_tuner
