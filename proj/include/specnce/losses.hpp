#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "specnce/embedding.hpp"
#include "specnce/error.hpp"
#include "specnce/graph.hpp"
#include "specnce/kernels.hpp"
#include "specnce/mrf.hpp"
#include "specnce/util.hpp"

namespace specnce::losses {

// ---- pointwise contrastive losses ----------------------------------------

namespace detail {

inline void check_unit(const Eigen::VectorXd& v, const char* what) {
  require(std::abs(v.norm() - 1.0) <= kUnitNormTol, ErrorCode::NotNormalized,
          std::string(what) + " is not unit-norm");
}

}  // namespace detail

/// Softmax contrastive loss of a query against one positive and the full
/// candidate list (positive included):
///   -log( exp(q.p1 / tau) / sum_i exp(q.p_i / tau) )
/// All vectors must be unit-norm; dot product, cosine and negative squared
/// distance then agree up to constants that cancel in the ratio.
inline double info_nce(const Eigen::VectorXd& q, const Eigen::VectorXd& positive,
                       const Eigen::MatrixXd& candidates, double tau) {
  require(tau > 0.0, ErrorCode::InvalidOption, "tau must be positive");
  require(candidates.cols() == q.size() && positive.size() == q.size(),
          ErrorCode::DimensionMismatch, "candidate dimension mismatch");
  detail::check_unit(q, "query");
  detail::check_unit(positive, "positive");
  bool found = false;
  std::vector<double> scores(candidates.rows());
  for (Eigen::Index i = 0; i < candidates.rows(); ++i) {
    detail::check_unit(candidates.row(i), "candidate");
    scores[i] = q.dot(candidates.row(i)) / tau;
    if ((candidates.row(i).transpose() - positive).norm() <= 1e-12) found = true;
  }
  require(found, ErrorCode::PositiveMissing, "positive not among candidates");
  return log_sum_exp(scores) - q.dot(positive) / tau;
}

/// Kernel-ratio contrastive loss: -log( K(q, p1) / sum_i K(q, p_i) ).
/// With the Gaussian kernel on unit vectors this equals info_nce.
inline double kernel_info_nce(const Eigen::VectorXd& q, const Eigen::VectorXd& positive,
                              const Eigen::MatrixXd& candidates,
                              const kernels::KernelSpec& spec) {
  require(candidates.cols() == q.size() && positive.size() == q.size(),
          ErrorCode::DimensionMismatch, "candidate dimension mismatch");
  detail::check_unit(q, "query");
  detail::check_unit(positive, "positive");
  bool found = false;
  std::vector<double> scores(candidates.rows());
  for (Eigen::Index i = 0; i < candidates.rows(); ++i) {
    detail::check_unit(candidates.row(i), "candidate");
    scores[i] = kernels::log_eval_displacement(spec, q - candidates.row(i).transpose());
    if ((candidates.row(i).transpose() - positive).norm() <= 1e-12) found = true;
  }
  require(found, ErrorCode::PositiveMissing, "positive not among candidates");
  return log_sum_exp(scores) - kernels::log_eval_displacement(spec, q - positive);
}

// ---- batch losses ---------------------------------------------------------

/// Two row-aligned augmented views, N unit-norm rows each.
struct Batch {
  Eigen::MatrixXd z;
  Eigen::MatrixXd z2;

  int size() const { return static_cast<int>(z.rows()); }
  int dim() const { return static_cast<int>(z.cols()); }
};

inline Batch make_batch(Eigen::MatrixXd z, Eigen::MatrixXd z2) {
  require(z.rows() == z2.rows() && z.cols() == z2.cols(), ErrorCode::DimensionMismatch,
          "views must have equal shape");
  validate_embedding(z);
  validate_embedding(z2);
  return Batch{std::move(z), std::move(z2)};
}

namespace detail {

// Core pairwise loss over the 2N stacked rows with score -||r_i - r_j||^gamma / tau.
// No norm requirement; half-dimension slices of unit rows pass through here.
inline double core_loss_rows(const Eigen::MatrixXd& rows, int batch, double gamma,
                             double tau) {
  const int m = 2 * batch;
  Eigen::MatrixXd s(m, m);
  for (int i = 0; i < m; ++i) {
    s(i, i) = 0.0;
    for (int j = i + 1; j < m; ++j) {
      double d = (rows.row(i) - rows.row(j)).norm();
      double v = d == 0.0 ? 0.0 : std::pow(d, gamma);
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  auto pair_loss = [&](int i, int j) {
    std::vector<double> scores;
    scores.reserve(m - 1);
    for (int k = 0; k < m; ++k)
      if (k != i) scores.push_back(-s(i, k) / tau);
    return log_sum_exp(scores) + s(i, j) / tau;
  };
  double total = 0.0;
  for (int i = 0; i < batch; ++i)
    total += pair_loss(i, i + batch) + pair_loss(i + batch, i);
  return total / m;
}

inline double nt_xent_rows(const Eigen::MatrixXd& rows, int batch, double tau) {
  const int m = 2 * batch;
  auto pair_loss = [&](int i, int j) {
    std::vector<double> scores;
    scores.reserve(m - 1);
    for (int k = 0; k < m; ++k)
      if (k != i) scores.push_back(rows.row(i).dot(rows.row(k)) / tau);
    return log_sum_exp(scores) - rows.row(i).dot(rows.row(j)) / tau;
  };
  double total = 0.0;
  for (int i = 0; i < batch; ++i)
    total += pair_loss(i, i + batch) + pair_loss(i + batch, i);
  return total / m;
}

inline double kernel_rows(const Eigen::MatrixXd& rows, int batch,
                          const kernels::KernelSpec& spec) {
  const int m = 2 * batch;
  auto pair_loss = [&](int i, int j) {
    std::vector<double> scores;
    scores.reserve(m - 1);
    for (int k = 0; k < m; ++k)
      if (k != i)
        scores.push_back(
            kernels::log_eval_displacement(spec, rows.row(i) - rows.row(k)));
    return log_sum_exp(scores) -
           kernels::log_eval_displacement(spec, rows.row(i) - rows.row(j));
  };
  double total = 0.0;
  for (int i = 0; i < batch; ++i)
    total += pair_loss(i, i + batch) + pair_loss(i + batch, i);
  return total / m;
}

inline Eigen::MatrixXd stack_views(const Batch& b) {
  Eigen::MatrixXd rows(2 * b.size(), b.dim());
  rows.topRows(b.size()) = b.z;
  rows.bottomRows(b.size()) = b.z2;
  return rows;
}

}  // namespace detail

/// Core contrastive loss over the concatenated views, distance scores
/// s_ij = ||r_i - r_j||^gamma, softmax temperature tau, averaged over the
/// 2N aligned positive pairs.
inline double core_loss(const Batch& b, double gamma, double tau) {
  require(b.size() >= 2, ErrorCode::BatchTooSmall, "need batch size >= 2");
  require(gamma > 0.0 && tau > 0.0, ErrorCode::InvalidOption,
          "gamma and tau must be positive");
  return detail::core_loss_rows(detail::stack_views(b), b.size(), gamma, tau);
}

// ---- configured loss family ------------------------------------------------

struct LossConfig {
  enum class Variant { InfoNce, KernelInfoNce, Laplacian, Sum, ConcatSum, Gamma };

  Variant variant = Variant::InfoNce;
  double tau = 0.5;              // InfoNce, Laplacian, Gamma
  double gamma = 1.0;            // Gamma
  double lambda = 0.5;           // Sum, ConcatSum
  double tau1 = 0.5;
  double tau2 = 0.5;
  kernels::KernelSpec kernel = kernels::Gaussian{0.5};  // KernelInfoNce

  static LossConfig info_nce(double tau) { return {Variant::InfoNce, tau}; }
  static LossConfig kernel_info_nce(kernels::KernelSpec spec) {
    LossConfig c;
    c.variant = Variant::KernelInfoNce;
    c.kernel = std::move(spec);
    return c;
  }
  static LossConfig laplacian(double tau) { return {Variant::Laplacian, tau}; }
  static LossConfig sum(double lambda, double tau1, double tau2) {
    LossConfig c;
    c.variant = Variant::Sum;
    c.lambda = lambda;
    c.tau1 = tau1;
    c.tau2 = tau2;
    return c;
  }
  static LossConfig concat_sum(double lambda, double tau1, double tau2) {
    LossConfig c = sum(lambda, tau1, tau2);
    c.variant = Variant::ConcatSum;
    return c;
  }
  static LossConfig gamma_loss(double gamma, double tau) {
    LossConfig c;
    c.variant = Variant::Gamma;
    c.gamma = gamma;
    c.tau = tau;
    return c;
  }
};

inline void validate(const LossConfig& c) {
  using V = LossConfig::Variant;
  switch (c.variant) {
    case V::InfoNce:
    case V::Laplacian:
      require(c.tau > 0.0, ErrorCode::InvalidOption, "tau must be positive");
      break;
    case V::Gamma:
      require(c.tau > 0.0 && c.gamma > 0.0 && c.gamma <= 2.0, ErrorCode::InvalidOption,
              "need tau > 0 and gamma in (0, 2]");
      break;
    case V::Sum:
    case V::ConcatSum:
      require(c.lambda >= 0.0 && c.lambda <= 1.0, ErrorCode::InvalidOption,
              "lambda must lie in [0, 1]");
      require(c.tau1 > 0.0 && c.tau2 > 0.0, ErrorCode::InvalidOption,
              "temperatures must be positive");
      break;
    case V::KernelInfoNce:
      kernels::validate(c.kernel);
      break;
  }
}

/// Configured batch loss. Laplacian and Gamma are single core losses; Sum
/// mixes two core losses at the loss level; ConcatSum applies them to the
/// left/right half dimensions (left: gamma = 1 with tau1, right: gamma = 2
/// with tau2).
inline double batch_loss(const LossConfig& cfg, const Batch& b) {
  validate(cfg);
  require(b.size() >= 2, ErrorCode::BatchTooSmall, "need batch size >= 2");
  using V = LossConfig::Variant;
  Eigen::MatrixXd rows = detail::stack_views(b);
  switch (cfg.variant) {
    case V::InfoNce:
      return detail::nt_xent_rows(rows, b.size(), cfg.tau);
    case V::KernelInfoNce:
      if (kernels::needs_even_dimension(cfg.kernel))
        require(b.dim() % 2 == 0, ErrorCode::OddDimensionForConcat,
                "concat kernel needs an even dimension");
      return detail::kernel_rows(rows, b.size(), cfg.kernel);
    case V::Laplacian:
      return detail::core_loss_rows(rows, b.size(), 1.0, cfg.tau);
    case V::Gamma:
      return detail::core_loss_rows(rows, b.size(), cfg.gamma, cfg.tau);
    case V::Sum:
      return cfg.lambda * detail::core_loss_rows(rows, b.size(), 1.0, cfg.tau1) +
             (1.0 - cfg.lambda) * detail::core_loss_rows(rows, b.size(), 2.0, cfg.tau2);
    case V::ConcatSum: {
      require(b.dim() % 2 == 0, ErrorCode::OddDimensionForConcat,
              "concat loss needs an even dimension");
      const int h = b.dim() / 2;
      return cfg.lambda *
                 detail::core_loss_rows(rows.leftCols(h), b.size(), 1.0, cfg.tau1) +
             (1.0 - cfg.lambda) *
                 detail::core_loss_rows(rows.rightCols(h), b.size(), 2.0, cfg.tau2);
    }
  }
  fail(ErrorCode::InvalidOption, "unknown loss variant");
}

// ---- full-graph objective and analytic gradient ----------------------------

struct LossAndGrad {
  double value;
  Eigen::MatrixXd grad;
};

/// Cross-entropy against arbitrary nonnegative query weights with its
/// ambient gradient. Arranged as
///   -sum_{i!=j} w_ij g_ij + sum_i r_i LSE_{k!=i}(g_ik),  r_i = sum_j w_ij,
/// with g = log k; for row-stochastic weights this is the subgraph-MRF
/// cross-entropy. Rows with zero mass (unsampled queries in the stochastic
/// trainer) contribute nothing. The gradient couples each ordered pair
/// (i, j) through the coefficient (r_i softmax_ij - w_ij).
inline LossAndGrad weighted_loss_and_gradient(const Eigen::MatrixXd& weights,
                                              const kernels::KernelSpec& spec,
                                              const Eigen::MatrixXd& z) {
  const int n = static_cast<int>(weights.rows());
  require(static_cast<int>(z.rows()) == n, ErrorCode::DimensionMismatch,
          "graph and embedding disagree on n");
  const int d = static_cast<int>(z.cols());

  Eigen::MatrixXd logk(n, n);
  std::vector<std::vector<Eigen::VectorXd>> grads(n);
  for (int i = 0; i < n; ++i) grads[i].resize(n);
  for (int i = 0; i < n; ++i) {
    logk(i, i) = kNegInf;
    for (int j = i + 1; j < n; ++j) {
      auto lg = kernels::log_eval_grad(spec, z.row(i) - z.row(j));
      logk(i, j) = lg.log_value;
      logk(j, i) = lg.log_value;
      grads[i][j] = lg.grad;    // d log k / dx at x = z_i - z_j
      grads[j][i] = -lg.grad;   // displacement flips sign
    }
  }

  double value = 0.0;
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(n, d);
  for (int i = 0; i < n; ++i) {
    double row_mass = weights.row(i).sum() - weights(i, i);
    if (row_mass == 0.0) continue;
    double m = kNegInf;
    for (int k = 0; k < n; ++k) m = std::max(m, logk(i, k));
    double denom = 0.0;
    for (int k = 0; k < n; ++k)
      if (k != i) denom += std::exp(logk(i, k) - m);
    value += row_mass * (m + std::log(denom));
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double softmax = std::exp(logk(i, j) - m) / denom;
      double coeff = row_mass * softmax - weights(i, j);
      if (weights(i, j) != 0.0) value -= weights(i, j) * logk(i, j);
      grad.row(i) += coeff * grads[i][j].transpose();
      grad.row(j) -= coeff * grads[i][j].transpose();
    }
  }
  return {value, std::move(grad)};
}

/// Cross-entropy value and its ambient gradient in Z (before any sphere
/// projection). The value matches mrf::cross_entropy; the gradient matches
/// central finite differences.
inline LossAndGrad full_loss_and_gradient(const graph::SimilarityGraph& pi,
                                          const kernels::KernelSpec& spec,
                                          const Eigen::MatrixXd& z) {
  kernels::validate(spec);
  if (kernels::needs_even_dimension(spec))
    require(z.cols() % 2 == 0, ErrorCode::OddDimensionForConcat,
            "concat kernel needs an even dimension");
  return weighted_loss_and_gradient(pi.weights, spec, z);
}

/// Full-graph analogue of the configured batch losses. Single-kernel
/// variants reduce to cross-entropy with the matching kernel; Sum mixes two
/// cross-entropies; ConcatSum applies them to the half-dimension slices.
inline LossAndGrad full_objective_and_gradient(const graph::SimilarityGraph& pi,
                                               const LossConfig& cfg,
                                               const Eigen::MatrixXd& z) {
  validate(cfg);
  using V = LossConfig::Variant;
  switch (cfg.variant) {
    case V::InfoNce:
      return weighted_loss_and_gradient(pi.weights, kernels::Gaussian{cfg.tau}, z);
    case V::KernelInfoNce:
      return full_loss_and_gradient(pi, cfg.kernel, z);
    case V::Laplacian:
      return weighted_loss_and_gradient(pi.weights,
                                             kernels::Exponential{1.0, cfg.tau}, z);
    case V::Gamma:
      return weighted_loss_and_gradient(
          pi.weights, kernels::Exponential{cfg.gamma, cfg.tau}, z);
    case V::Sum: {
      auto a = weighted_loss_and_gradient(pi.weights,
                                               kernels::Exponential{1.0, cfg.tau1}, z);
      auto b = weighted_loss_and_gradient(pi.weights,
                                               kernels::Exponential{2.0, cfg.tau2}, z);
      return {cfg.lambda * a.value + (1.0 - cfg.lambda) * b.value,
              cfg.lambda * a.grad + (1.0 - cfg.lambda) * b.grad};
    }
    case V::ConcatSum: {
      require(z.cols() % 2 == 0, ErrorCode::OddDimensionForConcat,
              "concat objective needs an even dimension");
      const int h = static_cast<int>(z.cols()) / 2;
      auto a = weighted_loss_and_gradient(
          pi.weights, kernels::Exponential{1.0, cfg.tau1}, z.leftCols(h));
      auto b = weighted_loss_and_gradient(
          pi.weights, kernels::Exponential{2.0, cfg.tau2}, z.rightCols(h));
      Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(z.rows(), z.cols());
      grad.leftCols(h) = cfg.lambda * a.grad;
      grad.rightCols(h) = (1.0 - cfg.lambda) * b.grad;
      return {cfg.lambda * a.value + (1.0 - cfg.lambda) * b.value, std::move(grad)};
    }
  }
  fail(ErrorCode::InvalidOption, "unknown loss variant");
}

inline double full_objective(const graph::SimilarityGraph& pi, const LossConfig& cfg,
                             const Eigen::MatrixXd& z) {
  return full_objective_and_gradient(pi, cfg, z).value;
}

/// pi-weighted sum of per-row kernel contrastive losses,
///   sum_i sum_{j != i} pi_ij * ( -log( K_ij / sum_{k != i} K_ik ) ),
/// each row's candidate set being every other object. Agrees with the
/// subgraph-MRF cross-entropy.
inline double weighted_info_nce_sum(const graph::SimilarityGraph& pi,
                                    const kernels::KernelSpec& spec,
                                    const Eigen::MatrixXd& z) {
  const int n = pi.n();
  require(static_cast<int>(z.rows()) == n, ErrorCode::DimensionMismatch,
          "graph and embedding disagree on n");
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    std::vector<double> scores;
    scores.reserve(n - 1);
    for (int k = 0; k < n; ++k)
      if (k != i)
        scores.push_back(kernels::log_eval_displacement(spec, z.row(i) - z.row(k)));
    double lse = log_sum_exp(scores);
    for (int j = 0; j < n; ++j) {
      if (j == i || pi.weights(i, j) == 0.0) continue;
      total += pi.weights(i, j) *
               (lse - kernels::log_eval_displacement(spec, z.row(i) - z.row(j)));
    }
  }
  return total;
}

}  // namespace specnce::losses
