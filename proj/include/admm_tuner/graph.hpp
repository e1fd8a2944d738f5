#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "admm_tuner/linalg.hpp"

namespace admm_tuner {

struct Edge {
  std::size_t i;  // tail, always the lower index
  std::size_t j;  // head
  double w;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Undirected graph with nonnegative edge weights. Edges are canonicalized on
// construction: endpoints ordered i < j, list sorted by (i, j).
class WeightedGraph {
 public:
  WeightedGraph() = default;
  // Throws InvalidGraph on self-loops, duplicate pairs, out-of-range indices or
  // negative weights.
  WeightedGraph(std::size_t n, std::vector<Edge> edges);

  std::size_t num_nodes() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }

  Vector weights() const;
  // Same topology, weights replaced (in canonical edge order).
  WeightedGraph with_weights(std::span<const double> w) const;
  // Drops zero-weight edges.
  WeightedGraph positive_support() const;
  // Adjacency lists: for every node, the indices of its incident edges in
  // canonical order.
  std::vector<std::vector<std::size_t>> incident_edges() const;

  friend bool operator==(const WeightedGraph&, const WeightedGraph&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
};

struct GraphMatrices {
  Matrix b_in;   // m x n, head indicator per edge
  Matrix b_out;  // m x n, tail indicator per edge
  Matrix a;      // weighted adjacency
  Matrix d;      // diagonal weighted degree
  Matrix w;      // m x m diagonal edge weights

  Vector degrees() const { return d.diag(); }
};

GraphMatrices build_matrices(const WeightedGraph& g);

// With strict_positive set, zero-weight edges do not connect their endpoints.
bool is_connected(const WeightedGraph& g, bool strict_positive = true);

// Unit-weight G(n, p) sample with p = (1 + epsilon) ln(n) / n.
//
// Pairs are visited in (i, j) lexicographic order; each consumes one draw
// from std::mt19937_64 seeded with `seed`, mapped to [0, 1) as
// (raw >> 11) * 2^-53. The engine is bit-exact across conforming standard
// libraries, so samples are replayable anywhere.
WeightedGraph erdos_renyi(std::size_t n, double epsilon, std::uint64_t seed);
double erdos_renyi_probability(std::size_t n, double epsilon);

// Draws with seeds seed, seed+1, ... until a connected sample appears.
// Throws ResampleExhausted after max_attempts.
WeightedGraph connected_erdos_renyi(std::size_t n, double epsilon, std::uint64_t seed,
                                    int max_attempts = 1000);

}  // namespace admm_tuner
