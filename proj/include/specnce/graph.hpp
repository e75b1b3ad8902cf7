#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "specnce/error.hpp"
#include "specnce/rng.hpp"

namespace specnce::graph {

constexpr double kRowSumTol = 1e-12;
constexpr double kSymmetricFlagTol = 1e-12;
constexpr double kSymmetricInputTol = 1e-9;

/// Row-stochastic similarity weights over n objects. Each row is the
/// neighbor-sampling distribution of one object; the diagonal is zero.
struct SimilarityGraph {
  Eigen::MatrixXd weights;
  bool symmetric = false;

  int n() const { return static_cast<int>(weights.rows()); }
};

using LaplacianMatrix = Eigen::MatrixXd;

inline double max_asymmetry(const Eigen::MatrixXd& m) {
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

/// Builds a SimilarityGraph from raw nonnegative weights.
///
/// The diagonal is silently zeroed and each row is renormalized to sum to
/// one (rows already within 1e-13 of one are left untouched, which makes
/// the construction idempotent on its own output). A row without any
/// positive off-diagonal entry denotes an isolated object and is rejected.
inline SimilarityGraph from_dense(Eigen::MatrixXd m, bool require_symmetric = false) {
  const Eigen::Index n = m.rows();
  require(m.cols() == n, ErrorCode::DimensionMismatch,
          "weight matrix must be square");
  require(n >= 2, ErrorCode::DimensionMismatch, "need at least two objects");
  if ((m.array() < 0.0).any())
    fail(ErrorCode::NegativeEntry, "weights must be nonnegative");
  if (require_symmetric) {
    double asym = max_asymmetry(m);
    require(asym <= kSymmetricInputTol, ErrorCode::AsymmetricInput,
            "input asymmetry " + std::to_string(asym) + " exceeds 1e-9");
  }
  m.diagonal().setZero();
  for (Eigen::Index i = 0; i < n; ++i) {
    double sum = m.row(i).sum();
    require(sum > 0.0, ErrorCode::ZeroRow,
            "row " + std::to_string(i) + " has no positive off-diagonal entry");
    if (std::abs(sum - 1.0) > 1e-13) m.row(i) /= sum;
  }
  bool symmetric = max_asymmetry(m) <= kSymmetricFlagTol;
  if (require_symmetric && !symmetric)
    fail(ErrorCode::AsymmetricInput,
         "row normalization broke symmetry (unequal row sums)");
  return SimilarityGraph{std::move(m), symmetric};
}

/// L(W): negated off-diagonal weights, diagonal set to the row sum.
inline LaplacianMatrix laplacian(const SimilarityGraph& g) {
  LaplacianMatrix l = -g.weights;
  l.diagonal() = g.weights.rowwise().sum();
  return l;
}

/// Planted-cluster similarity graph: expected block weights p_in within a
/// block and p_out across blocks, then row-normalized. With jitter > 0 the
/// raw weights get a symmetric multiplicative perturbation drawn from the
/// seeded stream; jitter = 0 ignores the seed entirely.
inline SimilarityGraph sbm_generate(const std::vector<int>& block_sizes, double p_in,
                                    double p_out, std::uint64_t seed,
                                    double jitter = 0.0) {
  require(p_out >= 0.0 && p_in > p_out && p_in <= 1.0, ErrorCode::InvalidProbability,
          "need 0 <= p_out < p_in <= 1");
  require(jitter >= 0.0 && jitter < 1.0, ErrorCode::InvalidProbability,
          "jitter must lie in [0, 1)");
  int n = std::accumulate(block_sizes.begin(), block_sizes.end(), 0);
  require(n >= 2, ErrorCode::DimensionMismatch, "need at least two objects");
  std::vector<int> block_of;
  block_of.reserve(n);
  for (std::size_t b = 0; b < block_sizes.size(); ++b) {
    require(block_sizes[b] >= 1, ErrorCode::InvalidOption, "empty block");
    block_of.insert(block_of.end(), block_sizes[b], static_cast<int>(b));
  }
  Eigen::MatrixXd raw(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      raw(i, j) = (i == j) ? 0.0 : (block_of[i] == block_of[j] ? p_in : p_out);
  if (jitter > 0.0) {
    Rng rng(seed, "sbm-jitter");
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        double factor = 1.0 + jitter * rng.uniform(-1.0, 1.0);
        raw(i, j) *= factor;
        raw(j, i) = raw(i, j);
      }
  }
  return from_dense(std::move(raw));
}

/// Ground-truth block labels matching sbm_generate's node order.
inline std::vector<int> sbm_labels(const std::vector<int>& block_sizes) {
  std::vector<int> labels;
  for (std::size_t b = 0; b < block_sizes.size(); ++b)
    labels.insert(labels.end(), block_sizes[b], static_cast<int>(b));
  return labels;
}

/// Similarity graph from a point cloud: Gaussian overlap weights
/// exp(-||x_i - x_j||^2 / (2 bandwidth^2)), zero diagonal, rows normalized.
/// The symmetric flag is always cleared; row normalization breaks symmetry
/// in general.
inline SimilarityGraph augmentation_graph(const Eigen::MatrixXd& points,
                                          double bandwidth) {
  require(std::isfinite(bandwidth) && bandwidth > 0.0, ErrorCode::InvalidBandwidth,
          "bandwidth must be positive");
  const Eigen::Index n = points.rows();
  require(n >= 2, ErrorCode::DimensionMismatch, "need at least two points");
  Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(n, n);
  const double inv = 1.0 / (2.0 * bandwidth * bandwidth);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double w = std::exp(-(points.row(i) - points.row(j)).squaredNorm() * inv);
      raw(i, j) = w;
      raw(j, i) = w;
    }
  SimilarityGraph g = from_dense(std::move(raw));
  g.symmetric = false;
  return g;
}

/// Random graph that is simultaneously symmetric and row-stochastic,
/// via symmetric diagonal scaling of a positive random matrix
/// (D^{-1/2} M D^{-1/2} iterated to a doubly stochastic limit).
inline SimilarityGraph random_symmetric_graph(int n, Rng& rng) {
  require(n >= 2, ErrorCode::DimensionMismatch, "need at least two objects");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double w = 0.05 + rng.uniform();
      m(i, j) = w;
      m(j, i) = w;
    }
  for (int iter = 0; iter < 500; ++iter) {
    Eigen::VectorXd s = m.rowwise().sum().cwiseSqrt().cwiseInverse();
    m = s.asDiagonal() * m * s.asDiagonal();
    if ((m.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-14) break;
  }
  SimilarityGraph g;
  g.weights = std::move(m);
  g.symmetric = true;
  return g;
}

}  // namespace specnce::graph
