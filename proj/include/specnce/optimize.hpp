#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "specnce/embedding.hpp"
#include "specnce/error.hpp"
#include "specnce/graph.hpp"
#include "specnce/losses.hpp"
#include "specnce/rng.hpp"

namespace specnce::optimize {

struct OptimizerOptions {
  enum class Schedule { Constant, Cosine };

  double step_size = 1.0;
  int max_iters = 500;
  double grad_tol = 1e-7;   // on the Frobenius norm of the tangential gradient
  std::uint64_t seed = 0;
  Schedule schedule = Schedule::Constant;
  int max_halvings = 40;
};

inline void validate(const OptimizerOptions& o) {
  require(std::isfinite(o.step_size) && o.step_size > 0.0, ErrorCode::InvalidOption,
          "step_size must be positive");
  require(o.max_iters >= 1, ErrorCode::InvalidOption, "max_iters must be >= 1");
  require(o.grad_tol >= 0.0, ErrorCode::InvalidOption, "grad_tol must be >= 0");
}

struct TracePoint {
  int iter;
  double loss;
  double grad_norm;
};

struct MinimizeResult {
  Embedding embedding;
  std::vector<TracePoint> trace;
  bool converged = false;
};

namespace detail {

// Component of the gradient tangent to the product of unit spheres.
inline Eigen::MatrixXd tangential(const Eigen::MatrixXd& z, const Eigen::MatrixXd& g) {
  Eigen::MatrixXd t = g;
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    t.row(i) -= g.row(i).dot(z.row(i)) * z.row(i);
  return t;
}

using Objective = std::function<losses::LossAndGrad(const Eigen::MatrixXd&)>;
using Value = std::function<double(const Eigen::MatrixXd&)>;

// Projected gradient descent with a halving line search that only accepts
// non-increasing steps. Single-threaded and fully deterministic for a fixed
// seed; the trace records the loss after every accepted step.
inline MinimizeResult descend(const Objective& objective, const Value& value,
                              int n, int d, const OptimizerOptions& opts) {
  validate(opts);
  Rng rng(opts.seed, "optimize-init");
  Embedding z = random_embedding(n, d, rng);

  MinimizeResult result;
  for (int iter = 0;; ++iter) {
    losses::LossAndGrad lg = objective(z.rows);
    require(std::isfinite(lg.value), ErrorCode::Diverged,
            "objective is not finite; reduce the step size");
    double gnorm = tangential(z.rows, lg.grad).norm();
    result.trace.push_back({iter, lg.value, gnorm});
    if (gnorm <= opts.grad_tol) {
      result.converged = true;
      break;
    }
    if (iter >= opts.max_iters) break;

    double eta = opts.step_size;
    if (opts.schedule == OptimizerOptions::Schedule::Cosine)
      eta *= 0.5 * (1.0 + std::cos(std::numbers::pi * iter / opts.max_iters));

    bool accepted = false;
    for (int h = 0; h <= opts.max_halvings; ++h) {
      Eigen::MatrixXd candidate = z.rows - eta * lg.grad;
      bool valid = true;
      for (Eigen::Index i = 0; i < candidate.rows() && valid; ++i)
        if (candidate.row(i).norm() <= 1e-300) valid = false;
      if (valid) {
        Embedding next = project_sphere(candidate);
        if (next.rows == z.rows) break;  // projection absorbed the step
        double next_value = value(next.rows);
        if (std::isfinite(next_value) && next_value <= lg.value) {
          z = std::move(next);
          accepted = true;
          break;
        }
      }
      eta *= 0.5;
    }
    if (!accepted) {
      // No descent direction left at machine precision.
      result.converged = true;
      break;
    }
  }
  result.embedding = std::move(z);
  return result;
}

}  // namespace detail

/// Minimizes the kernel cross-entropy against pi over unit-sphere rows.
inline MinimizeResult minimize(const graph::SimilarityGraph& pi,
                               const kernels::KernelSpec& spec, int d,
                               const OptimizerOptions& opts) {
  require(d >= 1, ErrorCode::InvalidOption, "need d >= 1");
  auto objective = [&](const Eigen::MatrixXd& z) {
    return losses::full_loss_and_gradient(pi, spec, z);
  };
  auto value = [&](const Eigen::MatrixXd& z) {
    return losses::full_loss_and_gradient(pi, spec, z).value;
  };
  return detail::descend(objective, value, pi.n(), d, opts);
}

/// Minimizes one of the configured loss-family objectives.
inline MinimizeResult minimize(const graph::SimilarityGraph& pi,
                               const losses::LossConfig& cfg, int d,
                               const OptimizerOptions& opts) {
  require(d >= 1, ErrorCode::InvalidOption, "need d >= 1");
  auto objective = [&](const Eigen::MatrixXd& z) {
    return losses::full_objective_and_gradient(pi, cfg, z);
  };
  auto value = [&](const Eigen::MatrixXd& z) {
    return losses::full_objective_and_gradient(pi, cfg, z).value;
  };
  return detail::descend(objective, value, pi.n(), d, opts);
}

/// Stochastic variant mirroring minibatch practice: each iteration samples
/// one neighbor per object from pi and descends the contrastive loss of the
/// sampled pairs at a fixed (scheduled) step. Excluded from exactness
/// guarantees; the trace is not monotone.
inline MinimizeResult minimize_stochastic(const graph::SimilarityGraph& pi,
                                          const kernels::KernelSpec& spec, int d,
                                          const OptimizerOptions& opts) {
  validate(opts);
  require(d >= 1, ErrorCode::InvalidOption, "need d >= 1");
  const int n = pi.n();
  Rng init_rng(opts.seed, "optimize-init");
  Rng sample_rng(opts.seed, "optimize-sample");
  Embedding z = random_embedding(n, d, init_rng);

  MinimizeResult result;
  graph::SimilarityGraph sampled;
  sampled.weights = Eigen::MatrixXd::Zero(n, n);
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    mrf::Subgraph w = mrf::sample_subgraph(pi, sample_rng);
    sampled.weights.setZero();
    for (int i = 0; i < n; ++i) sampled.weights(i, w.targets[i]) = 1.0;
    losses::LossAndGrad lg = losses::full_loss_and_gradient(sampled, spec, z.rows);
    require(std::isfinite(lg.value), ErrorCode::Diverged, "objective is not finite");
    double gnorm = detail::tangential(z.rows, lg.grad).norm();
    result.trace.push_back({iter, lg.value, gnorm});
    double eta = opts.step_size;
    if (opts.schedule == OptimizerOptions::Schedule::Cosine)
      eta *= 0.5 * (1.0 + std::cos(std::numbers::pi * iter / opts.max_iters));
    z = project_sphere(z.rows - eta * lg.grad);
  }
  result.embedding = std::move(z);
  return result;
}

/// Central-difference gradient of the cross-entropy in the ambient
/// (pre-projection) coordinates; the independent check for the analytic
/// gradient.
inline Eigen::MatrixXd finite_diff_gradient(const graph::SimilarityGraph& pi,
                                            const kernels::KernelSpec& spec,
                                            const Eigen::MatrixXd& z, double h) {
  require(h > 0.0, ErrorCode::InvalidOption, "h must be positive");
  Eigen::MatrixXd grad(z.rows(), z.cols());
  Eigen::MatrixXd probe = z;
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
      probe(i, j) = z(i, j) + h;
      double up = mrf::cross_entropy(pi, spec, probe);
      probe(i, j) = z(i, j) - h;
      double down = mrf::cross_entropy(pi, spec, probe);
      probe(i, j) = z(i, j);
      grad(i, j) = (up - down) / (2.0 * h);
    }
  return grad;
}

inline Eigen::MatrixXd finite_diff_gradient(const graph::SimilarityGraph& pi,
                                            const losses::LossConfig& cfg,
                                            const Eigen::MatrixXd& z, double h) {
  require(h > 0.0, ErrorCode::InvalidOption, "h must be positive");
  Eigen::MatrixXd grad(z.rows(), z.cols());
  Eigen::MatrixXd probe = z;
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
      probe(i, j) = z(i, j) + h;
      double up = losses::full_objective(pi, cfg, probe);
      probe(i, j) = z(i, j) - h;
      double down = losses::full_objective(pi, cfg, probe);
      probe(i, j) = z(i, j);
      grad(i, j) = (up - down) / (2.0 * h);
    }
  return grad;
}

}  // namespace specnce::optimize
