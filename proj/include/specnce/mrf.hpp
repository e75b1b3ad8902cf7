#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "specnce/error.hpp"
#include "specnce/graph.hpp"
#include "specnce/kernels.hpp"
#include "specnce/rng.hpp"
#include "specnce/util.hpp"

namespace specnce::mrf {

// The subgraph family: binary directed graphs with exactly one outgoing
// edge per node and no self-loops. A nonnegative weight matrix induces a
// distribution over them, each subgraph weighted by the product of its
// chosen edges. Rows are independent multinomials, which every closed form
// below relies on; the enumeration routines exist to verify that reduction
// rather than assume it.

constexpr int kEnumerationCap = 8;  // (n-1)^n subgraphs; 8 -> 5,764,801

/// One outgoing edge per node: targets[i] = j(i), j(i) != i.
struct Subgraph {
  std::vector<int> targets;

  int n() const { return static_cast<int>(targets.size()); }

  Eigen::MatrixXd dense() const {
    const int m = n();
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) w(i, targets[i]) = 1.0;
    return w;
  }
};

/// Unit-out-degree indicator. Returns 1 iff the matrix lies in the
/// admissible subgraph set: binary, zero diagonal, every row summing to
/// exactly one. Rows with self-loops are outside the set and yield 0.
inline int omega(const Eigen::MatrixXd& w) {
  const Eigen::Index n = w.rows();
  require(w.cols() == n, ErrorCode::DimensionMismatch, "matrix must be square");
  for (Eigen::Index i = 0; i < n; ++i) {
    int row_sum = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      double v = w(i, j);
      require(v == 0.0 || v == 1.0, ErrorCode::NonBinaryEntry,
              "entry (" + std::to_string(i) + "," + std::to_string(j) + ") is not 0/1");
      if (v == 1.0) {
        if (i == j) return 0;
        ++row_sum;
      }
    }
    if (row_sum != 1) return 0;
  }
  return 1;
}

/// Draws one subgraph: each row i picks target j with probability
/// proportional to its row weight (rows are independent).
inline Subgraph sample_subgraph(const graph::SimilarityGraph& g, Rng& rng) {
  const int n = g.n();
  Subgraph w;
  w.targets.resize(n);
  for (int i = 0; i < n; ++i) {
    std::size_t j = rng.discrete(g.weights.row(i), static_cast<std::size_t>(n));
    w.targets[i] = static_cast<int>(j);
  }
  return w;
}

inline Subgraph sample_subgraph(const graph::SimilarityGraph& g, std::uint64_t seed) {
  Rng rng(seed, "mrf-sample");
  return sample_subgraph(g, rng);
}

namespace detail {

// Row target digit t in [0, n-1) maps to column t, skipping the diagonal.
inline int decode_target(int row, int digit) { return digit < row ? digit : digit + 1; }

}  // namespace detail

/// Visits all (n-1)^n admissible subgraphs in lexicographic order of their
/// per-row target digits (row 0 most significant). fn receives the target
/// vector, which is reused between calls.
template <class Fn>
inline void for_each_subgraph(int n, Fn&& fn) {
  require(n >= 2, ErrorCode::DimensionMismatch, "need at least two nodes");
  require(n <= kEnumerationCap, ErrorCode::TooLarge,
          "subgraph enumeration capped at n=8");
  std::vector<int> digit(n, 0);
  std::vector<int> targets(n);
  for (int i = 0; i < n; ++i) targets[i] = detail::decode_target(i, 0);
  for (;;) {
    fn(const_cast<const std::vector<int>&>(targets));
    int row = n - 1;
    while (row >= 0 && digit[row] == n - 2) {
      digit[row] = 0;
      targets[row] = detail::decode_target(row, 0);
      --row;
    }
    if (row < 0) break;
    ++digit[row];
    targets[row] = detail::decode_target(row, digit[row]);
  }
}

/// Exhaustive subgraph distribution under a nonnegative weight matrix.
/// Probabilities are stored in enumeration order; target vectors are
/// decoded on demand, so n = 8 stays within tens of megabytes.
struct EnumeratedDistribution {
  int n = 0;
  std::vector<double> probs;

  std::size_t count() const { return probs.size(); }

  Subgraph subgraph_at(std::size_t index) const {
    Subgraph w;
    w.targets.resize(n);
    std::size_t rem = index;
    for (int row = n - 1; row >= 0; --row) {
      int digit = static_cast<int>(rem % (n - 1));
      rem /= (n - 1);
      w.targets[row] = detail::decode_target(row, digit);
    }
    return w;
  }
};

inline EnumeratedDistribution enumerate_distribution(const Eigen::MatrixXd& weights) {
  const int n = static_cast<int>(weights.rows());
  require(weights.cols() == n, ErrorCode::DimensionMismatch, "matrix must be square");
  require(n <= kEnumerationCap, ErrorCode::TooLarge,
          "subgraph enumeration capped at n=8");
  if ((weights.array() < 0.0).any())
    fail(ErrorCode::NegativeEntry, "weights must be nonnegative");
  for (int i = 0; i < n; ++i) {
    double off = weights.row(i).sum() - weights(i, i);
    require(off > 0.0, ErrorCode::AllZeroRow,
            "row " + std::to_string(i) + " has no positive off-diagonal weight");
  }
  EnumeratedDistribution dist;
  dist.n = n;
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(n - 1);
  dist.probs.reserve(total);
  double norm = 0.0;
  for_each_subgraph(n, [&](const std::vector<int>& targets) {
    double p = 1.0;
    for (int i = 0; i < n; ++i) p *= weights(i, targets[i]);
    dist.probs.push_back(p);
    norm += p;
  });
  for (double& p : dist.probs) p /= norm;
  return dist;
}

/// log P(W; K) in the row-factorized form
/// sum_i [ log K(i, j(i)) - log sum_{k != i} K(i, k) ].
inline double log_prob(const Subgraph& w, const Eigen::MatrixXd& k) {
  const int n = w.n();
  require(k.rows() == n && k.cols() == n, ErrorCode::DimensionMismatch,
          "similarity matrix does not match subgraph size");
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double edge = k(i, w.targets[i]);
    require(edge > 0.0, ErrorCode::ZeroWeightEdge,
            "zero weight on edge " + std::to_string(i) + "->" +
                std::to_string(w.targets[i]));
    double denom = k.row(i).sum() - k(i, i);
    total += std::log(edge) - std::log(denom);
  }
  return total;
}

inline double log_prob(const Subgraph& w, const kernels::GramMatrix& k) {
  return log_prob(w, k.values);
}

inline double log_prob(const Subgraph& w, const graph::SimilarityGraph& g) {
  return log_prob(w, g.weights);
}

namespace detail {

// Pairwise log-kernel values with a -inf diagonal, so self terms drop out
// of softmax denominators naturally.
inline Eigen::MatrixXd log_gram(const kernels::KernelSpec& spec,
                                const Eigen::MatrixXd& z) {
  const Eigen::Index n = z.rows();
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    g(i, i) = kNegInf;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double v = kernels::log_eval_displacement(spec, z.row(i) - z.row(j));
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

inline double row_log_sum_exp(const Eigen::MatrixXd& g, Eigen::Index i) {
  double m = kNegInf;
  for (Eigen::Index k = 0; k < g.cols(); ++k) m = std::max(m, g(i, k));
  double s = 0.0;
  for (Eigen::Index k = 0; k < g.cols(); ++k)
    if (g(i, k) != kNegInf) s += std::exp(g(i, k) - m);
  return m + std::log(s);
}

}  // namespace detail

/// Cross-entropy between the subgraph distributions induced by pi and by
/// the kernel similarities of z:
///   sum_i sum_{j != i} pi_ij * ( -log( K_ij / sum_{k != i} K_ik ) ).
inline double cross_entropy(const graph::SimilarityGraph& pi,
                            const kernels::KernelSpec& spec,
                            const Eigen::MatrixXd& z) {
  const int n = pi.n();
  require(static_cast<int>(z.rows()) == n, ErrorCode::DimensionMismatch,
          "graph and embedding disagree on n");
  Eigen::MatrixXd g = detail::log_gram(spec, z);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double lse = detail::row_log_sum_exp(g, i);
    for (int j = 0; j < n; ++j) {
      if (j == i || pi.weights(i, j) == 0.0) continue;
      total += pi.weights(i, j) * (lse - g(i, j));
    }
  }
  return total;
}

/// log R(Z) = sum_i log sum_{j != i} k(Z_i - Z_j). The row-factorized form
/// of the partition sum over all admissible subgraphs; equality with the
/// enumerated sum is itself a tested property.
inline double log_partition(const kernels::KernelSpec& spec, const Eigen::MatrixXd& z) {
  const Eigen::Index n = z.rows();
  require(n >= 2, ErrorCode::DimensionMismatch, "need at least two rows");
  Eigen::MatrixXd g = detail::log_gram(spec, z);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) total += detail::row_log_sum_exp(g, i);
  return total;
}

struct AttractionRepulsion {
  double attraction;  // -sum_{i != j} pi_ij log k(Z_i - Z_j)
  double repulsion;   // log R(Z)
};

/// Splits the cross-entropy into its attraction and repulsion terms;
/// attraction + repulsion reproduces cross_entropy.
inline AttractionRepulsion attraction_repulsion(const graph::SimilarityGraph& pi,
                                                const kernels::KernelSpec& spec,
                                                const Eigen::MatrixXd& z) {
  const int n = pi.n();
  require(static_cast<int>(z.rows()) == n, ErrorCode::DimensionMismatch,
          "graph and embedding disagree on n");
  Eigen::MatrixXd g = detail::log_gram(spec, z);
  double attraction = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (j == i || pi.weights(i, j) == 0.0) continue;
      attraction -= pi.weights(i, j) * g(i, j);
    }
  double repulsion = 0.0;
  for (int i = 0; i < n; ++i) repulsion += detail::row_log_sum_exp(g, i);
  return {attraction, repulsion};
}

/// Entropy of the row distributions, sum_i H(pi_i); the Gibbs lower bound
/// on any cross-entropy against pi.
inline double row_entropy(const graph::SimilarityGraph& pi) {
  double h = 0.0;
  for (int i = 0; i < pi.n(); ++i)
    for (int j = 0; j < pi.n(); ++j) h -= xlogx(pi.weights(i, j));
  return h;
}

// ---- enumeration-based oracles -------------------------------------------
//
// Direct sums over the full subgraph set. Quadratic-cost closed forms above
// must agree with these; the verification suite and the unit tests hold
// both routes against each other.

/// Partition sum by full enumeration: log sum_W prod_i K(i, j_W(i)).
inline double enumeration_log_partition(const Eigen::MatrixXd& k) {
  const int n = static_cast<int>(k.rows());
  double total = 0.0;
  for_each_subgraph(n, [&](const std::vector<int>& targets) {
    double p = 1.0;
    for (int i = 0; i < n; ++i) p *= k(i, targets[i]);
    total += p;
  });
  return std::log(total);
}

/// Cross-entropy by full enumeration: -sum_W P(W; pi) log P(W; K).
/// Subgraphs with P(W; pi) = 0 contribute nothing and are skipped, which
/// keeps bipartite-supported weights (zero blocks in K) well-defined.
inline double enumeration_cross_entropy(const Eigen::MatrixXd& pi_weights,
                                        const Eigen::MatrixXd& k) {
  const int n = static_cast<int>(pi_weights.rows());
  require(k.rows() == n && k.cols() == n, ErrorCode::DimensionMismatch,
          "pi and K disagree on n");
  double log_r = enumeration_log_partition(k);
  double total = 0.0;
  for_each_subgraph(n, [&](const std::vector<int>& targets) {
    double p = 1.0;
    for (int i = 0; i < n; ++i) p *= pi_weights(i, targets[i]);
    if (p == 0.0) return;
    double log_q = -log_r;
    for (int i = 0; i < n; ++i) log_q += std::log(k(i, targets[i]));
    total -= p * log_q;
  });
  return total;
}

}  // namespace specnce::mrf
