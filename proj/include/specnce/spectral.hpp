#pragma once

#include <Eigen/Dense>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "specnce/eig.hpp"
#include "specnce/error.hpp"
#include "specnce/graph.hpp"
#include "specnce/rng.hpp"
#include "specnce/util.hpp"

namespace specnce::spectral {

constexpr double kNearZeroEig = 1e-9;

/// Eigenvector embedding of a graph Laplacian: the d smallest nontrivial
/// modes after dropping the constant (zero-eigenvalue) column.
struct SpectralEmbedding {
  Eigen::MatrixXd vectors;     // n x d, orthonormal columns
  Eigen::VectorXd eigenvalues; // the d kept eigenvalues, ascending
  int near_zero_count = 0;     // eigenvalues below 1e-9 in the full spectrum
  bool rank_deficient = false; // more components than the embedding can separate
};

inline SpectralEmbedding spectral_embedding(const graph::LaplacianMatrix& l, int d) {
  const int n = static_cast<int>(l.rows());
  require(d >= 1 && d <= n - 1, ErrorCode::InvalidOption,
          "need 1 <= d <= n-1");
  EigResult eig = eig_sym(l);
  int near_zero = static_cast<int>((eig.values.array() < kNearZeroEig).count());
  if (near_zero >= 1) {
    // The zero eigenspace of a disconnected Laplacian is degenerate and the
    // solver returns an arbitrary basis for it. Rotate the block so its
    // first column is exactly the constant mode; the remaining null vectors
    // are then orthogonal to constant and separate components by sign.
    Eigen::MatrixXd block(n, near_zero + 1);
    block.col(0) = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
    block.rightCols(near_zero) = eig.vectors.leftCols(near_zero);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(block);
    eig.vectors.leftCols(near_zero) =
        qr.householderQ() * Eigen::MatrixXd::Identity(n, near_zero);
  }
  SpectralEmbedding out;
  out.vectors = eig.vectors.middleCols(1, d);
  out.eigenvalues = eig.values.segment(1, d);
  out.near_zero_count = near_zero;
  out.rank_deficient = near_zero > d + 1;
  return out;
}

// ---- k-means ---------------------------------------------------------------

struct KMeansResult {
  std::vector<int> labels;
  Eigen::MatrixXd centroids;
  double inertia = 0.0;  // within-cluster sum of squared distances
};

namespace detail {

inline KMeansResult kmeans_single(const Eigen::MatrixXd& points, int k, Rng& rng) {
  const int n = static_cast<int>(points.rows());
  const int d = static_cast<int>(points.cols());

  // k-means++ seeding
  Eigen::MatrixXd centroids(k, d);
  centroids.row(0) = points.row(static_cast<Eigen::Index>(rng.below(n)));
  Eigen::VectorXd dist2(n);
  for (int c = 1; c < k; ++c) {
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int p = 0; p < c; ++p)
        best = std::min(best, (points.row(i) - centroids.row(p)).squaredNorm());
      dist2(i) = best;
    }
    if (dist2.sum() > 0.0) {
      centroids.row(c) =
          points.row(static_cast<Eigen::Index>(rng.discrete(dist2, n)));
    } else {
      centroids.row(c) = points.row(static_cast<Eigen::Index>(rng.below(n)));
    }
  }

  std::vector<int> labels(n, 0);
  for (int iter = 0; iter < 200; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (points.row(i) - centroids.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        double dd = (points.row(i) - centroids.row(c)).squaredNorm();
        if (dd < best_d) {
          best_d = dd;
          best = c;
        }
      }
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
    }
    std::vector<int> counts(k, 0);
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, d);
    for (int i = 0; i < n; ++i) {
      ++counts[labels[i]];
      sums.row(labels[i]) += points.row(i);
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centroids.row(c) = sums.row(c) / counts[c];
        continue;
      }
      // Empty cluster: hand it the point farthest from its own centroid.
      int farthest = 0;
      double far_d = -1.0;
      for (int i = 0; i < n; ++i) {
        if (counts[labels[i]] <= 1) continue;
        double dd = (points.row(i) - centroids.row(labels[i])).squaredNorm();
        if (dd > far_d) {
          far_d = dd;
          farthest = i;
        }
      }
      --counts[labels[farthest]];
      sums.row(labels[farthest]) -= points.row(farthest);
      labels[farthest] = c;
      counts[c] = 1;
      centroids.row(c) = points.row(farthest);
      changed = true;
    }
    if (!changed) break;
  }

  KMeansResult res;
  res.labels = std::move(labels);
  res.centroids = std::move(centroids);
  for (int i = 0; i < n; ++i)
    res.inertia += (points.row(i) - res.centroids.row(res.labels[i])).squaredNorm();
  return res;
}

}  // namespace detail

/// Seeded k-means with k-means++ initialization; keeps the best of
/// `restarts` runs by within-cluster sum of squares. Empty clusters are
/// resolved by reassigning the farthest point.
inline KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                           int restarts = 1) {
  const int n = static_cast<int>(points.rows());
  require(k >= 1 && k <= n, ErrorCode::InvalidOption, "need 1 <= k <= n");
  require(restarts >= 1, ErrorCode::InvalidOption, "need at least one restart");
  Rng rng(seed, "kmeans");
  KMeansResult best;
  for (int r = 0; r < restarts; ++r) {
    KMeansResult candidate = detail::kmeans_single(points, k, rng);
    if (r == 0 || candidate.inertia < best.inertia) best = std::move(candidate);
  }
  return best;
}

// ---- partition agreement ----------------------------------------------------

/// Adjusted Rand index between two labelings of the same objects.
/// 1 for identical partitions up to relabeling; 0 in expectation for
/// independent random partitions.
inline double ari(const std::vector<int>& a, const std::vector<int>& b) {
  require(a.size() == b.size(), ErrorCode::LengthMismatch,
          "label vectors differ in length");
  const std::size_t n = a.size();
  if (n == 0) return 1.0;
  std::map<std::pair<int, int>, double> contingency;
  std::map<int, double> count_a;
  std::map<int, double> count_b;
  for (std::size_t i = 0; i < n; ++i) {
    contingency[{a[i], b[i]}] += 1.0;
    count_a[a[i]] += 1.0;
    count_b[b[i]] += 1.0;
  }
  double sum_ij = 0.0;
  for (const auto& [key, c] : contingency) sum_ij += comb2(c);
  double sum_a = 0.0;
  for (const auto& [key, c] : count_a) sum_a += comb2(c);
  double sum_b = 0.0;
  for (const auto& [key, c] : count_b) sum_b += comb2(c);
  double total = comb2(static_cast<double>(n));
  double expected = sum_a * sum_b / total;
  double max_index = 0.5 * (sum_a + sum_b);
  double denom = max_index - expected;
  if (std::abs(denom) < 1e-12) {
    // Both partitions trivial (all singletons or one block each): agreement
    // is exact iff the contingency is a bijection.
    return contingency.size() == std::max(count_a.size(), count_b.size()) ? 1.0 : 0.0;
  }
  return (sum_ij - expected) / denom;
}

// ---- subspace comparison -----------------------------------------------------

/// Largest principal angle (radians) between the column spans of A and B.
/// Zero iff the spans coincide; pi/2 for orthogonal complements.
inline double subspace_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::DimensionMismatch,
          "subspace bases must have equal shape");
  const Eigen::Index n = a.rows();
  const Eigen::Index d = a.cols();
  require(d >= 1 && d <= n, ErrorCode::InvalidOption, "need 1 <= d <= n");
  auto orthonormalize = [&](const Eigen::MatrixXd& m) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    Eigen::MatrixXd r = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
    double scale = r.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < d; ++i)
      require(std::abs(r(i, i)) > 1e-12 * std::max(scale, 1e-300),
              ErrorCode::RankDeficient, "basis is rank deficient");
    return Eigen::MatrixXd(qr.householderQ() * Eigen::MatrixXd::Identity(n, d));
  };
  Eigen::MatrixXd qa = orthonormalize(a);
  Eigen::MatrixXd qb = orthonormalize(b);
  Eigen::MatrixXd cos_block = qa.transpose() * qb;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cos_block);
  double smin = std::clamp(svd.singularValues().minCoeff(), -1.0, 1.0);
  if (smin < std::numbers::sqrt2 / 2.0) return std::acos(smin);
  // Small angles: acos of a cosine near one floors at ~1e-8, so switch to
  // the sine form, whose singular values are sin(theta_i) directly.
  Eigen::MatrixXd sin_block = qb - qa * cos_block;
  Eigen::JacobiSVD<Eigen::MatrixXd> sin_svd(sin_block);
  double smax = std::clamp(sin_svd.singularValues().maxCoeff(), 0.0, 1.0);
  return std::asin(smax);
}

}  // namespace specnce::spectral
