#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "admm_tuner/linalg.hpp"

namespace admm_tuner {

// Sign convention used throughout: objectives are 1/2 x^T Q x + q^T x.

// One agent's private block of an arrowhead QP.
struct ArrowBlock {
  Matrix qii;  // private Hessian, SPD (may be 0 x 0)
  Vector qis;  // coupling column to the shared variable
  Vector q;    // private linear term

  std::size_t size() const { return qii.rows(); }
};

// Hessian with private blocks on the diagonal, coupled to one scalar shared
// variable through the last row/column.
struct ArrowheadQp {
  std::vector<ArrowBlock> blocks;
  double qss = 0.0;
  double qs = 0.0;

  std::size_t num_blocks() const { return blocks.size(); }
  std::size_t dimension() const;
  Matrix assemble_hessian() const;
  Vector assemble_linear() const;
  // Dense minimizer of the full problem, i.e. the solution of Qbar eta = -qbar.
  Vector dense_solution() const;
};

// Extracts the block structure; throws NotArrowhead naming the first offending
// block pair, BlockNotSpd if a private block fails Cholesky. `qbar` defaults to
// zero.
ArrowheadQp validate_arrowhead(const Matrix& qbar_hessian, std::span<const std::size_t> block_sizes,
                               std::span<const double> qbar = {});

// Validates an arrowhead QP given in block form (checks sizes and block SPD).
void validate_blocks(const ArrowheadQp& p);

struct AlphaSplit {
  Vector alphas;
};

// Throws InvalidArgument unless all entries are positive and sum to 1 within
// 1e-12.
AlphaSplit make_alpha_split(Vector alphas);

// T_i = Q_is^T Q_ii^{-1} Q_is for each block.
Vector schur_terms(const ArrowheadQp& p);

// Every local curvature equals (Q_ss - sum T_i) / N.
AlphaSplit allocate_alphas(const ArrowheadQp& p);

// Per-node scalar quadratics obtained after eliminating the private variables.
struct ConsensusQp {
  Vector qhat_quadratic;  // \hat Q_i > 0
  Vector qhat_linear;     // \hat q_i
  std::vector<ArrowBlock> recovery;

  std::size_t num_nodes() const { return qhat_quadratic.size(); }
};

// Builds a consensus problem directly from per-node scalars (no private
// variables to recover).
ConsensusQp make_consensus_qp(Vector quadratic, Vector linear);

ConsensusQp reduce_to_consensus(const ArrowheadQp& p, const AlphaSplit& a);

// eta_i = -Q_ii^{-1}(q_i + Q_is eta_s) for each block.
std::vector<Vector> recover_private(const ConsensusQp& c, double eta_s);

// Minimizer of sum_i 1/2 Qhat_i x^2 + qhat_i x over a common scalar x.
double shared_optimum(const ConsensusQp& c);
double shared_optimum(std::span<const double> quadratic, std::span<const double> linear);

}  // namespace admm_tuner
