#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "specnce/error.hpp"
#include "specnce/graph.hpp"
#include "specnce/kernels.hpp"
#include "specnce/losses.hpp"
#include "specnce/mrf.hpp"
#include "specnce/optimize.hpp"
#include "specnce/util.hpp"

namespace specnce::multimodal {

// Two modalities A and B share one index space: A objects occupy rows
// 0..n_a-1, B objects rows n_a..n_a+n_b-1.

/// Directed bipartite similarity graph built from undirected pairs. For a
/// freshly constructed graph every out-edge carries weight 1/out-degree of
/// its source (duplicate pairs count toward the out-degree); augmented
/// graphs keep only the row-stochastic bipartite structure.
struct PairGraph {
  int n_a = 0;
  int n_b = 0;
  std::vector<std::pair<int, int>> pairs;  // original (a, b) list, repeats allowed
  Eigen::MatrixXd weights;                 // (n_a+n_b)^2, bipartite support

  int n() const { return n_a + n_b; }
};

inline PairGraph pair_graph(const std::vector<std::pair<int, int>>& pairs, int n_a,
                            int n_b) {
  require(n_a >= 1 && n_b >= 1, ErrorCode::DimensionMismatch,
          "both modalities need at least one object");
  const int n = n_a + n_b;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  std::vector<int> out_degree(n, 0);
  for (const auto& [a, b] : pairs) {
    require(a >= 0 && a < n_a && b >= 0 && b < n_b, ErrorCode::DimensionMismatch,
            "pair index out of range");
    ++out_degree[a];
    ++out_degree[n_a + b];
  }
  for (int i = 0; i < n; ++i)
    require(out_degree[i] >= 1, ErrorCode::IsolatedNode,
            "object " + std::to_string(i) + " appears in no pair");
  for (const auto& [a, b] : pairs) {
    w(a, n_a + b) += 1.0 / out_degree[a];
    w(n_a + b, a) += 1.0 / out_degree[n_a + b];
  }
  return PairGraph{n_a, n_b, pairs, std::move(w)};
}

/// Expands every pair edge through the intra-modal augmentation
/// distributions: edge (a, b, p) spawns edges (a', b') with raw weight
/// p * pi_A(a, a') * pi_B(b, b'), where each node keeps `self_mass` of its
/// augmentation probability on itself and spreads the rest along its
/// similarity row. Rows are renormalized afterwards, so self_mass = 1
/// reproduces the input graph.
inline PairGraph augment_pair_graph(const PairGraph& pg,
                                    const graph::SimilarityGraph& pi_a,
                                    const graph::SimilarityGraph& pi_b,
                                    double self_mass_a = 0.0,
                                    double self_mass_b = 0.0) {
  require(pi_a.n() == pg.n_a, ErrorCode::DimensionMismatch,
          "pi_A does not match the A modality size");
  require(pi_b.n() == pg.n_b, ErrorCode::DimensionMismatch,
          "pi_B does not match the B modality size");
  require(self_mass_a >= 0.0 && self_mass_a <= 1.0 && self_mass_b >= 0.0 &&
              self_mass_b <= 1.0,
          ErrorCode::InvalidScaling, "self mass must lie in [0, 1]");
  const int n_a = pg.n_a;
  const int n_b = pg.n_b;
  const int n = pg.n();

  auto spread_a = [&](int node, int target) {
    double mass = node == target ? self_mass_a : 0.0;
    if (node != target) mass += (1.0 - self_mass_a) * pi_a.weights(node, target);
    return mass;
  };
  auto spread_b = [&](int node, int target) {
    double mass = node == target ? self_mass_b : 0.0;
    if (node != target) mass += (1.0 - self_mass_b) * pi_b.weights(node, target);
    return mass;
  };

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n_a; ++a) {
    for (int b = 0; b < n_b; ++b) {
      double p_ab = pg.weights(a, n_a + b);
      double p_ba = pg.weights(n_a + b, a);
      if (p_ab == 0.0 && p_ba == 0.0) continue;
      for (int aa = 0; aa < n_a; ++aa) {
        double ma = spread_a(a, aa);
        if (ma == 0.0) continue;
        for (int bb = 0; bb < n_b; ++bb) {
          double mb = spread_b(b, bb);
          if (mb == 0.0) continue;
          if (p_ab > 0.0) out(aa, n_a + bb) += p_ab * ma * mb;
          if (p_ba > 0.0) out(n_a + bb, aa) += p_ba * mb * ma;
        }
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    double sum = out.row(i).sum();
    require(sum > 0.0, ErrorCode::IsolatedNode,
            "augmentation leaves object " + std::to_string(i) + " without edges");
    if (std::abs(sum - 1.0) > 1e-13) out.row(i) /= sum;
  }
  return PairGraph{n_a, n_b, pg.pairs, std::move(out)};
}

struct ScalingFactors {
  double intra_a = 0.3;
  double intra_b = 0.3;
  double cross = 0.4;
};

/// The glued multi-modal similarity graph: intra-modal rows scaled by their
/// factor, cross-modal rows by `cross`, renormalized so every row remains a
/// distribution. Scalings need not sum to one per row class.
struct MultiModalGraph {
  int n_a = 0;
  int n_b = 0;
  Eigen::MatrixXd weights;  // row-stochastic
  ScalingFactors factors;

  int n() const { return n_a + n_b; }
};

inline MultiModalGraph glue(const graph::SimilarityGraph& pi_a,
                            const graph::SimilarityGraph& pi_b, const PairGraph& pg,
                            ScalingFactors f) {
  require(pi_a.n() == pg.n_a && pi_b.n() == pg.n_b, ErrorCode::DimensionMismatch,
          "intra-modal graphs do not match the pair graph");
  require(f.intra_a >= 0.0 && f.intra_b >= 0.0 && f.cross >= 0.0,
          ErrorCode::InvalidScaling, "scaling factors must be nonnegative");
  require(f.intra_a + f.cross > 0.0 && f.intra_b + f.cross > 0.0,
          ErrorCode::InvalidScaling, "every row class needs positive total mass");
  const int n_a = pg.n_a;
  const int n_b = pg.n_b;
  const int n = pg.n();
  Eigen::MatrixXd w = f.cross * pg.weights;
  w.topLeftCorner(n_a, n_a) += f.intra_a * pi_a.weights;
  w.bottomRightCorner(n_b, n_b) += f.intra_b * pi_b.weights;
  for (int i = 0; i < n; ++i) {
    double sum = w.row(i).sum();
    require(sum > 0.0, ErrorCode::ZeroRow,
            "glued row " + std::to_string(i) + " has no mass");
    if (std::abs(sum - 1.0) > 1e-13) w.row(i) /= sum;
  }
  return MultiModalGraph{n_a, n_b, std::move(w), f};
}

inline graph::SimilarityGraph as_similarity_graph(const MultiModalGraph& g) {
  graph::SimilarityGraph s;
  s.weights = g.weights;
  s.symmetric = graph::max_asymmetry(g.weights) <= graph::kSymmetricFlagTol;
  return s;
}

inline graph::SimilarityGraph as_similarity_graph(const PairGraph& g) {
  graph::SimilarityGraph s;
  s.weights = g.weights;
  s.symmetric = graph::max_asymmetry(g.weights) <= graph::kSymmetricFlagTol;
  return s;
}

// ---- CLIP-style losses ------------------------------------------------------

/// Symmetric batch contrastive loss over N aligned (image, text) pairs:
/// every image scores its paired text against all texts in the batch and
/// vice versa, cosine similarity / tau. Returns the sum of the 2N terms.
inline double clip_loss(const Eigen::MatrixXd& z_a, const Eigen::MatrixXd& z_b,
                        const std::vector<std::pair<int, int>>& pairs, double tau) {
  require(pairs.size() >= 2, ErrorCode::BatchTooSmall, "need at least two pairs");
  require(tau > 0.0, ErrorCode::InvalidOption, "tau must be positive");
  require(z_a.cols() == z_b.cols(), ErrorCode::DimensionMismatch,
          "modal embeddings differ in dimension");
  validate_embedding(z_a);
  validate_embedding(z_b);
  const std::size_t m = pairs.size();
  for (const auto& [a, b] : pairs)
    require(a >= 0 && a < z_a.rows() && b >= 0 && b < z_b.rows(),
            ErrorCode::DimensionMismatch, "pair index out of range");

  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> image_scores(m);
    std::vector<double> text_scores(m);
    for (std::size_t j = 0; j < m; ++j) {
      image_scores[j] = z_a.row(pairs[i].first).dot(z_b.row(pairs[j].second)) / tau;
      text_scores[j] = z_b.row(pairs[i].second).dot(z_a.row(pairs[j].first)) / tau;
    }
    total += log_sum_exp(image_scores) - image_scores[i];
    total += log_sum_exp(text_scores) - text_scores[i];
  }
  return total;
}

/// Gram matrix restricted to the bipartite layout: cross-modal entries get
/// the kernel value, intra-modal entries are zero.
inline Eigen::MatrixXd bipartite_gram(const kernels::KernelSpec& spec,
                                      const Eigen::MatrixXd& z, int n_a) {
  const int n = static_cast<int>(z.rows());
  require(n_a >= 1 && n_a < n, ErrorCode::DimensionMismatch,
          "n_a must split the rows into two nonempty groups");
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n_a; ++i)
    for (int j = n_a; j < n; ++j) {
      double v = kernels::eval(spec, z.row(i), z.row(j));
      k(i, j) = v;
      k(j, i) = v;
    }
  return k;
}

/// Pair-graph-weighted sum of directional contrastive losses: each object
/// scores its sampled partner against the whole opposite modality,
///   sum_i sum_j pi_AB(i,j) * ( -log( K(i,j) / sum_{k in opposite} K(i,k) ) ).
inline double weighted_bipartite_info_nce(const PairGraph& pg,
                                          const kernels::KernelSpec& spec,
                                          const Eigen::MatrixXd& z) {
  const int n = pg.n();
  require(static_cast<int>(z.rows()) == n, ErrorCode::DimensionMismatch,
          "embedding does not match the pair graph");
  const int n_a = pg.n_a;
  auto opposite_range = [&](int i) {
    return i < n_a ? std::pair<int, int>{n_a, n} : std::pair<int, int>{0, n_a};
  };
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    auto [lo, hi] = opposite_range(i);
    std::vector<double> scores;
    scores.reserve(hi - lo);
    for (int k = lo; k < hi; ++k)
      scores.push_back(kernels::log_eval_displacement(spec, z.row(i) - z.row(k)));
    double lse = log_sum_exp(scores);
    for (int j = lo; j < hi; ++j) {
      if (pg.weights(i, j) == 0.0) continue;
      total += pg.weights(i, j) *
               (lse - kernels::log_eval_displacement(spec, z.row(i) - z.row(j)));
    }
  }
  return total;
}

// ---- joint training ---------------------------------------------------------

enum class SamplingMode { ObjectUniform, EdgeUniform };

struct TrainOptions {
  optimize::OptimizerOptions optimizer;
  bool stochastic = false;
  SamplingMode sampling = SamplingMode::ObjectUniform;
};

/// Joint embedding of both modalities by minimizing the cross-entropy
/// objective on the glued graph. Full-batch mode delegates verbatim to
/// optimize::minimize; stochastic mode resamples neighbors each iteration.
inline optimize::MinimizeResult train_multimodal(const MultiModalGraph& g,
                                                 const kernels::KernelSpec& spec,
                                                 int d, const TrainOptions& topts) {
  graph::SimilarityGraph s = as_similarity_graph(g);
  if (!topts.stochastic) return optimize::minimize(s, spec, d, topts.optimizer);
  require(topts.sampling == SamplingMode::ObjectUniform, ErrorCode::InvalidOption,
          "edge-uniform sampling needs an explicit pair list");
  return optimize::minimize_stochastic(s, spec, d, topts.optimizer);
}

inline optimize::MinimizeResult train_multimodal(const PairGraph& g,
                                                 const kernels::KernelSpec& spec,
                                                 int d, const TrainOptions& topts) {
  graph::SimilarityGraph s = as_similarity_graph(g);
  if (!topts.stochastic) return optimize::minimize(s, spec, d, topts.optimizer);
  if (topts.sampling == SamplingMode::ObjectUniform)
    return optimize::minimize_stochastic(s, spec, d, topts.optimizer);

  // Edge-uniform sampling (the batch convention of pair-data training):
  // each iteration draws |pairs| edges uniformly from the pair list and
  // descends the contrastive loss of the sampled queries only.
  const auto& opts = topts.optimizer;
  optimize::validate(opts);
  require(!g.pairs.empty(), ErrorCode::InvalidOption,
          "edge-uniform sampling needs the original pair list");
  const int n = g.n();
  Rng init_rng(opts.seed, "optimize-init");
  Rng edge_rng(opts.seed, "edge-sample");
  Embedding z = random_embedding(n, d, init_rng);
  optimize::MinimizeResult result;
  graph::SimilarityGraph sampled;
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd touched = Eigen::VectorXd::Zero(n);
    for (std::size_t e = 0; e < g.pairs.size(); ++e) {
      const auto& [a, b] = g.pairs[edge_rng.below(g.pairs.size())];
      w(a, g.n_a + b) += 1.0;
      w(g.n_a + b, a) += 1.0;
      touched(a) = touched(g.n_a + b) = 1.0;
    }
    for (int i = 0; i < n; ++i) {
      double sum = w.row(i).sum();
      if (sum > 0.0) w.row(i) /= sum;
    }
    // Skip untouched rows by giving them zero weight rows; the gradient
    // then only flows through sampled queries and their candidate sets.
    sampled.weights = std::move(w);
    losses::LossAndGrad lg =
        losses::weighted_loss_and_gradient(sampled.weights, spec, z.rows);
    require(std::isfinite(lg.value), ErrorCode::Diverged, "objective is not finite");
    result.trace.push_back({iter, lg.value, lg.grad.norm()});
    z = project_sphere(z.rows - opts.step_size * lg.grad);
  }
  result.embedding = std::move(z);
  return result;
}

}  // namespace specnce::multimodal
