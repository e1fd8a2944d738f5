#include "admm_tuner/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "admm_tuner/error.hpp"

namespace admm_tuner {

WeightedGraph::WeightedGraph(std::size_t n, std::vector<Edge> edges)
    : n_(n), edges_(std::move(edges)) {
  for (auto& e : edges_) {
    if (e.i == e.j) {
      throw Error(ErrorCode::InvalidGraph, "self-loop at node " + std::to_string(e.i));
    }
    if (e.i >= n_ || e.j >= n_) {
      throw Error(ErrorCode::InvalidGraph, "edge endpoint out of range");
    }
    if (!(e.w >= 0.0) || !std::isfinite(e.w)) {
      throw Error(ErrorCode::InvalidGraph, "edge weight must be finite and nonnegative");
    }
    if (e.i > e.j) std::swap(e.i, e.j);
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  for (std::size_t k = 1; k < edges_.size(); ++k) {
    if (edges_[k].i == edges_[k - 1].i && edges_[k].j == edges_[k - 1].j) {
      throw Error(ErrorCode::InvalidGraph, "duplicate edge (" + std::to_string(edges_[k].i) +
                                               ", " + std::to_string(edges_[k].j) + ")");
    }
  }
}

Vector WeightedGraph::weights() const {
  Vector w;
  w.reserve(edges_.size());
  for (const auto& e : edges_) w.push_back(e.w);
  return w;
}

WeightedGraph WeightedGraph::with_weights(std::span<const double> w) const {
  if (w.size() != edges_.size()) {
    throw Error(ErrorCode::InvalidArgument, "weight vector length differs from edge count");
  }
  auto edges = edges_;
  for (std::size_t k = 0; k < edges.size(); ++k) edges[k].w = w[k];
  return WeightedGraph(n_, std::move(edges));
}

WeightedGraph WeightedGraph::positive_support() const {
  std::vector<Edge> kept;
  std::copy_if(edges_.begin(), edges_.end(), std::back_inserter(kept),
               [](const Edge& e) { return e.w > 0.0; });
  return WeightedGraph(n_, std::move(kept));
}

std::vector<std::vector<std::size_t>> WeightedGraph::incident_edges() const {
  std::vector<std::vector<std::size_t>> inc(n_);
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    inc[edges_[k].i].push_back(k);
    inc[edges_[k].j].push_back(k);
  }
  return inc;
}

GraphMatrices build_matrices(const WeightedGraph& g) {
  const std::size_t n = g.num_nodes();
  const std::size_t m = g.num_edges();
  GraphMatrices out{Matrix(m, n), Matrix(m, n), Matrix(n, n), Matrix(n, n), Matrix(m, m)};
  for (std::size_t k = 0; k < m; ++k) {
    const auto& e = g.edges()[k];
    out.b_out(k, e.i) = 1.0;
    out.b_in(k, e.j) = 1.0;
    out.a(e.i, e.j) = e.w;
    out.a(e.j, e.i) = e.w;
    out.d(e.i, e.i) += e.w;
    out.d(e.j, e.j) += e.w;
    out.w(k, k) = e.w;
  }
  return out;
}

bool is_connected(const WeightedGraph& g, bool strict_positive) {
  const std::size_t n = g.num_nodes();
  if (n <= 1) return true;
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = n;
  for (const auto& e : g.edges()) {
    if (strict_positive && !(e.w > 0.0)) continue;
    const auto ri = find(e.i);
    const auto rj = find(e.j);
    if (ri != rj) {
      parent[ri] = rj;
      --components;
    }
  }
  return components == 1;
}

double erdos_renyi_probability(std::size_t n, double epsilon) {
  return (1.0 + epsilon) * std::log(static_cast<double>(n)) / static_cast<double>(n);
}

WeightedGraph erdos_renyi(std::size_t n, double epsilon, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "erdos_renyi needs n >= 2");
  const double p = erdos_renyi_probability(n, epsilon);
  std::mt19937_64 rng(seed);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      if (u < p) edges.push_back({i, j, 1.0});
    }
  }
  return WeightedGraph(n, std::move(edges));
}

WeightedGraph connected_erdos_renyi(std::size_t n, double epsilon, std::uint64_t seed,
                                    int max_attempts) {
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    auto g = erdos_renyi(n, epsilon, seed + static_cast<std::uint64_t>(attempt));
    if (is_connected(g)) return g;
  }
  throw Error(ErrorCode::ResampleExhausted,
              "no connected sample in " + std::to_string(max_attempts) + " attempts (n=" +
                  std::to_string(n) + ")");
}

}  // namespace admm_tuner
