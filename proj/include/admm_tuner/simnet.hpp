#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "admm_tuner/graph.hpp"
#include "admm_tuner/qp.hpp"

namespace admm_tuner {

// Synchronous round-based simulation of edge-variable ADMM. Every node owns
// its local curvature/linear term, its copy x_i, and one dual per incident
// edge. Per round:
//   1. x_i <- (Qhat_i + rho d_i)^{-1} (-qhat_i + rho sum_e w_e (z_e - u_{e,i}))
//   2. x_i is sent to every neighbor (one message per edge endpoint)
//   3. each endpoint forms z_e = (x_i + x_j) / 2 from its own value and the
//      received one, then u_{e,i} += x_i - z_e
// Reads in step 3 see only messages published in step 2 of the same round.
// The duals of an edge sum to zero after every round, so the dual terms cancel
// out of the edge average. Rounds are strictly synchronous.

struct AgentState {
  std::size_t id = 0;
  double x = 0.0;
  double quadratic = 0.0;
  double linear = 0.0;
  double degree = 0.0;
  std::vector<std::size_t> edges;  // incident edge indices, canonical order
  std::vector<double> z;           // local copy of z_e per incident edge
  std::vector<double> duals;       // u_{e,id} per incident edge
};

struct Message {
  std::size_t round;
  std::size_t from;
  std::size_t to;
  double value;
};

struct RoundLog {
  std::size_t round = 0;
  std::size_t messages = 0;
  Vector x;
  double max_deviation = 0.0;  // max_i |x_i - shared optimum|
};

class Simulator {
 public:
  // Throws Disconnected unless g is connected through positive weights,
  // NonConvexLocal if a local curvature is not positive.
  Simulator(const ConsensusQp& c, const WeightedGraph& g, double rho, std::span<const double> x0);

  RoundLog step();
  std::vector<RoundLog> run(std::size_t rounds);

  const std::vector<AgentState>& agents() const { return agents_; }
  const std::vector<Message>& ledger() const { return ledger_; }
  const WeightedGraph& graph() const { return graph_; }
  RoundLog snapshot() const;

  // Largest |u_{e,i} + u_{e,j}| over all edges.
  double dual_imbalance() const;

 private:
  WeightedGraph graph_;
  double rho_;
  double optimum_;
  std::size_t round_ = 0;
  std::vector<AgentState> agents_;
  std::vector<Message> ledger_;
};

std::vector<RoundLog> run_protocol(const ConsensusQp& c, const WeightedGraph& g, double rho,
                                   std::span<const double> x0, std::size_t rounds);

// Per-round infinity-norm deviation between the protocol's x and a reference
// sequence (index k of `reference` pairs with round k). Throws LengthMismatch.
Vector equivalence_check(const std::vector<RoundLog>& protocol, const std::vector<Vector>& reference);

// True iff every message in the ledger travels along an edge of g.
bool messages_are_local(const std::vector<Message>& ledger, const WeightedGraph& g);

}  // namespace admm_tuner
