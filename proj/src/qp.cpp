#include "admm_tuner/qp.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "admm_tuner/error.hpp"

namespace admm_tuner {

namespace {

constexpr double kStructureTol = 1e-12;
constexpr double kAlphaSumTol = 1e-12;

}  // namespace

std::size_t ArrowheadQp::dimension() const {
  std::size_t n = 1;
  for (const auto& b : blocks) n += b.size();
  return n;
}

Matrix ArrowheadQp::assemble_hessian() const {
  const std::size_t dim = dimension();
  Matrix h(dim, dim);
  std::size_t off = 0;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < b.size(); ++i) {
      for (std::size_t j = 0; j < b.size(); ++j) h(off + i, off + j) = b.qii(i, j);
      h(off + i, dim - 1) = b.qis[i];
      h(dim - 1, off + i) = b.qis[i];
    }
    off += b.size();
  }
  h(dim - 1, dim - 1) = qss;
  return h;
}

Vector ArrowheadQp::assemble_linear() const {
  Vector q;
  q.reserve(dimension());
  for (const auto& b : blocks) q.insert(q.end(), b.q.begin(), b.q.end());
  q.push_back(qs);
  return q;
}

Vector ArrowheadQp::dense_solution() const {
  Vector rhs = assemble_linear();
  for (double& v : rhs) v = -v;
  return solve_spd(assemble_hessian(), rhs);
}

void validate_blocks(const ArrowheadQp& p) {
  if (p.blocks.empty()) throw Error(ErrorCode::InvalidArgument, "arrowhead QP has no blocks");
  for (std::size_t k = 0; k < p.blocks.size(); ++k) {
    const auto& b = p.blocks[k];
    if (!b.qii.square() || b.qis.size() != b.size() || b.q.size() != b.size()) {
      throw Error(ErrorCode::InvalidArgument, "block " + std::to_string(k) + " has inconsistent sizes");
    }
    if (b.size() == 0) continue;
    try {
      Cholesky chol(b.qii);
    } catch (const Error&) {
      throw Error(ErrorCode::BlockNotSpd, "private block " + std::to_string(k) + " is not SPD");
    }
  }
}

ArrowheadQp validate_arrowhead(const Matrix& qbar_hessian, std::span<const std::size_t> block_sizes,
                               std::span<const double> qbar) {
  const std::size_t dim = std::accumulate(block_sizes.begin(), block_sizes.end(), std::size_t{1});
  if (qbar_hessian.rows() != dim || qbar_hessian.cols() != dim) {
    throw Error(ErrorCode::InvalidArgument, "block sizes do not add up to the matrix size");
  }
  if (!qbar.empty() && qbar.size() != dim) {
    throw Error(ErrorCode::InvalidArgument, "linear term length does not match the matrix");
  }
  if (!is_symmetric(qbar_hessian)) {
    throw Error(ErrorCode::NonSymmetric, "arrowhead Hessian is not symmetric");
  }

  std::vector<std::size_t> offsets;
  std::size_t off = 0;
  for (auto s : block_sizes) {
    offsets.push_back(off);
    off += s;
  }
  for (std::size_t a = 0; a < block_sizes.size(); ++a) {
    for (std::size_t b = 0; b < block_sizes.size(); ++b) {
      if (a == b) continue;
      for (std::size_t i = 0; i < block_sizes[a]; ++i)
        for (std::size_t j = 0; j < block_sizes[b]; ++j)
          if (std::abs(qbar_hessian(offsets[a] + i, offsets[b] + j)) > kStructureTol) {
            throw Error(ErrorCode::NotArrowhead,
                        "nonzero coupling between private blocks " + std::to_string(a) +
                            " and " + std::to_string(b));
          }
    }
  }

  ArrowheadQp p;
  const std::size_t s = dim - 1;
  for (std::size_t k = 0; k < block_sizes.size(); ++k) {
    const std::size_t nk = block_sizes[k];
    ArrowBlock blk{Matrix(nk, nk), Vector(nk), Vector(nk, 0.0)};
    for (std::size_t i = 0; i < nk; ++i) {
      for (std::size_t j = 0; j < nk; ++j) blk.qii(i, j) = qbar_hessian(offsets[k] + i, offsets[k] + j);
      blk.qis[i] = qbar_hessian(offsets[k] + i, s);
      if (!qbar.empty()) blk.q[i] = qbar[offsets[k] + i];
    }
    p.blocks.push_back(std::move(blk));
  }
  p.qss = qbar_hessian(s, s);
  p.qs = qbar.empty() ? 0.0 : qbar[s];
  validate_blocks(p);
  return p;
}

AlphaSplit make_alpha_split(Vector alphas) {
  if (alphas.empty()) throw Error(ErrorCode::InvalidArgument, "empty alpha split");
  double sum = 0.0;
  for (double a : alphas) {
    if (!(a > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha entries must be positive");
    sum += a;
  }
  if (std::abs(sum - 1.0) > kAlphaSumTol) {
    throw Error(ErrorCode::InvalidArgument, "alphas sum to " + std::to_string(sum) + ", not 1");
  }
  return AlphaSplit{std::move(alphas)};
}

Vector schur_terms(const ArrowheadQp& p) {
  Vector t;
  t.reserve(p.blocks.size());
  for (const auto& b : p.blocks) {
    if (b.size() == 0) {
      t.push_back(0.0);
      continue;
    }
    t.push_back(dot(b.qis, solve_spd(b.qii, b.qis)));
  }
  return t;
}

AlphaSplit allocate_alphas(const ArrowheadQp& p) {
  validate_blocks(p);
  const Vector t = schur_terms(p);
  const double n = static_cast<double>(t.size());
  const double slack = p.qss - std::accumulate(t.begin(), t.end(), 0.0);
  if (!(slack > 0.0)) {
    throw Error(ErrorCode::NotPositiveDefinite,
                "Schur complement of the shared variable is " + std::to_string(slack));
  }
  const double eps = slack / n;
  Vector alphas;
  for (double ti : t) alphas.push_back((ti + eps) / p.qss);
  // The sum is 1 up to rounding; renormalize to keep the split exact.
  const double sum = std::accumulate(alphas.begin(), alphas.end(), 0.0);
  for (double& a : alphas) a /= sum;
  return make_alpha_split(std::move(alphas));
}

ConsensusQp make_consensus_qp(Vector quadratic, Vector linear) {
  if (quadratic.size() != linear.size() || quadratic.empty()) {
    throw Error(ErrorCode::InvalidArgument, "consensus data must be nonempty and equal length");
  }
  for (std::size_t i = 0; i < quadratic.size(); ++i) {
    if (!(quadratic[i] > 0.0)) {
      throw Error(ErrorCode::NonConvexPiece,
                  "node " + std::to_string(i) + " has curvature " + std::to_string(quadratic[i]));
    }
  }
  ConsensusQp c;
  c.qhat_quadratic = std::move(quadratic);
  c.qhat_linear = std::move(linear);
  return c;
}

ConsensusQp reduce_to_consensus(const ArrowheadQp& p, const AlphaSplit& a) {
  validate_blocks(p);
  if (a.alphas.size() != p.blocks.size()) {
    throw Error(ErrorCode::InvalidArgument, "alpha split length differs from block count");
  }
  ConsensusQp c;
  for (std::size_t i = 0; i < p.blocks.size(); ++i) {
    const auto& b = p.blocks[i];
    double quad = p.qss * a.alphas[i];
    double lin = p.qs * a.alphas[i];
    if (b.size() > 0) {
      const Cholesky chol(b.qii);
      quad -= dot(b.qis, chol.solve(b.qis));
      lin -= dot(b.qis, chol.solve(b.q));
    }
    if (!(quad > 0.0)) {
      throw Error(ErrorCode::NonConvexPiece,
                  "node " + std::to_string(i) + " has curvature " + std::to_string(quad));
    }
    c.qhat_quadratic.push_back(quad);
    c.qhat_linear.push_back(lin);
    c.recovery.push_back(b);
  }
  return c;
}

std::vector<Vector> recover_private(const ConsensusQp& c, double eta_s) {
  std::vector<Vector> out;
  out.reserve(c.recovery.size());
  for (const auto& b : c.recovery) {
    if (b.size() == 0) {
      out.emplace_back();
      continue;
    }
    Vector rhs(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) rhs[i] = -(b.q[i] + b.qis[i] * eta_s);
    out.push_back(solve_spd(b.qii, rhs));
  }
  return out;
}

double shared_optimum(std::span<const double> quadratic, std::span<const double> linear) {
  if (quadratic.size() != linear.size() || quadratic.empty()) {
    throw Error(ErrorCode::InvalidArgument, "consensus data must be nonempty and equal length");
  }
  const double qsum = std::accumulate(quadratic.begin(), quadratic.end(), 0.0);
  const double lsum = std::accumulate(linear.begin(), linear.end(), 0.0);
  return -lsum / qsum;
}

double shared_optimum(const ConsensusQp& c) {
  return shared_optimum(c.qhat_quadratic, c.qhat_linear);
}

}  // namespace admm_tuner
