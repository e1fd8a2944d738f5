#include "admm_tuner/simnet.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "admm_tuner/error.hpp"

namespace admm_tuner {

Simulator::Simulator(const ConsensusQp& c, const WeightedGraph& g, double rho,
                     std::span<const double> x0)
    : graph_(g), rho_(rho) {
  const std::size_t n = g.num_nodes();
  if (c.num_nodes() != n || x0.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "problem, graph and x0 sizes differ");
  }
  if (!(rho > 0.0)) throw Error(ErrorCode::InvalidArgument, "rho must be positive");
  if (!is_connected(g)) throw Error(ErrorCode::Disconnected, "communication graph is not connected");
  for (const auto& e : g.edges()) {
    if (!(e.w > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "zero-weight edges must be dropped before simulation");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(c.qhat_quadratic[i] > 0.0)) {
      throw Error(ErrorCode::NonConvexLocal, "node " + std::to_string(i) + " has curvature " +
                                                 std::to_string(c.qhat_quadratic[i]));
    }
  }
  optimum_ = shared_optimum(c);

  const auto incident = g.incident_edges();
  agents_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& a = agents_[i];
    a.id = i;
    a.x = x0[i];
    a.quadratic = c.qhat_quadratic[i];
    a.linear = c.qhat_linear[i];
    a.edges = incident[i];
    a.duals.assign(a.edges.size(), 0.0);
    for (std::size_t k : a.edges) {
      const auto& e = g.edges()[k];
      a.degree += e.w;
      a.z.push_back(0.5 * (x0[e.i] + x0[e.j]));
    }
  }
}

RoundLog Simulator::snapshot() const {
  RoundLog log;
  log.round = round_;
  for (const auto& a : agents_) {
    log.x.push_back(a.x);
    log.max_deviation = std::max(log.max_deviation, std::abs(a.x - optimum_));
  }
  return log;
}

RoundLog Simulator::step() {
  ++round_;
  const auto& edges = graph_.edges();

  // Local primal updates from last round's state only.
  for (auto& a : agents_) {
    double acc = 0.0;
    for (std::size_t s = 0; s < a.edges.size(); ++s) {
      acc += edges[a.edges[s]].w * (a.z[s] - a.duals[s]);
    }
    a.x = (-a.linear + rho_ * acc) / (a.quadratic + rho_ * a.degree);
  }

  // Publish: one message per edge endpoint, into the outbox of this round.
  const std::size_t first = ledger_.size();
  for (const auto& a : agents_) {
    for (std::size_t k : a.edges) {
      const auto& e = edges[k];
      const std::size_t peer = e.i == a.id ? e.j : e.i;
      ledger_.push_back({round_, a.id, peer, a.x});
    }
  }
  // inbox[i][s]: value received over incident edge s of agent i.
  std::vector<std::vector<double>> inbox(agents_.size());
  for (auto& a : agents_) inbox[a.id].assign(a.edges.size(), 0.0);
  for (std::size_t mi = first; mi < ledger_.size(); ++mi) {
    const auto& msg = ledger_[mi];
    const auto& receiver = agents_[msg.to];
    for (std::size_t s = 0; s < receiver.edges.size(); ++s) {
      const auto& e = edges[receiver.edges[s]];
      if ((e.i == msg.from && e.j == msg.to) || (e.j == msg.from && e.i == msg.to)) {
        inbox[msg.to][s] = msg.value;
      }
    }
  }

  // Edge averages and dual ascent, computed redundantly at both endpoints.
  for (auto& a : agents_) {
    for (std::size_t s = 0; s < a.edges.size(); ++s) {
      a.z[s] = 0.5 * (a.x + inbox[a.id][s]);
      a.duals[s] += a.x - a.z[s];
    }
  }

  RoundLog log = snapshot();
  log.messages = ledger_.size() - first;
  return log;
}

std::vector<RoundLog> Simulator::run(std::size_t rounds) {
  std::vector<RoundLog> logs{snapshot()};
  for (std::size_t r = 0; r < rounds; ++r) logs.push_back(step());
  return logs;
}

double Simulator::dual_imbalance() const {
  std::vector<double> sums(graph_.num_edges(), 0.0);
  for (const auto& a : agents_)
    for (std::size_t s = 0; s < a.edges.size(); ++s) sums[a.edges[s]] += a.duals[s];
  double worst = 0.0;
  for (double v : sums) worst = std::max(worst, std::abs(v));
  return worst;
}

std::vector<RoundLog> run_protocol(const ConsensusQp& c, const WeightedGraph& g, double rho,
                                   std::span<const double> x0, std::size_t rounds) {
  Simulator sim(c, g, rho, x0);
  return sim.run(rounds);
}

Vector equivalence_check(const std::vector<RoundLog>& protocol, const std::vector<Vector>& reference) {
  if (protocol.size() != reference.size()) {
    throw Error(ErrorCode::LengthMismatch, "protocol has " + std::to_string(protocol.size()) +
                                               " rounds, reference has " +
                                               std::to_string(reference.size()));
  }
  Vector dev;
  dev.reserve(protocol.size());
  for (std::size_t k = 0; k < protocol.size(); ++k) {
    if (protocol[k].x.size() != reference[k].size()) {
      throw Error(ErrorCode::LengthMismatch, "state dimension differs at round " + std::to_string(k));
    }
    dev.push_back(norm_inf(axpy(-1.0, reference[k], protocol[k].x)));
  }
  return dev;
}

bool messages_are_local(const std::vector<Message>& ledger, const WeightedGraph& g) {
  std::set<std::pair<std::size_t, std::size_t>> links;
  for (const auto& e : g.edges()) {
    links.insert({e.i, e.j});
    links.insert({e.j, e.i});
  }
  return std::all_of(ledger.begin(), ledger.end(),
                     [&](const Message& m) { return links.contains({m.from, m.to}); });
}

}  // namespace admm_tuner
