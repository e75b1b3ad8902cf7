#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "specnce/error.hpp"
#include "specnce/rng.hpp"
#include "specnce/util.hpp"

namespace specnce::maxent {

// The entropy-regularized ranking program over the probability simplex:
//   maximize  -E(alpha),  E(alpha) = psi_1 - sum_i alpha_i psi_i
//                                    + tau sum_i alpha_i log alpha_i
// whose maximizer is the softmax of psi / tau and whose optimal value is
// the temperature-scaled softmax log-loss of the designated entry psi_1.
// The closed form and an independent projected-ascent solver are both
// provided and held against each other.

constexpr double kSimplexTol = 1e-12;

inline void validate_simplex(const Eigen::VectorXd& alpha) {
  require(alpha.size() >= 1, ErrorCode::DimensionMismatch, "empty simplex point");
  require((alpha.array() >= 0.0).all(), ErrorCode::NegativeEntry,
          "simplex entries must be nonnegative");
  require(std::abs(alpha.sum() - 1.0) <= kSimplexTol, ErrorCode::NotNormalized,
          "simplex entries must sum to one");
}

/// E(alpha) with the 0 log 0 = 0 convention.
inline double energy(const Eigen::VectorXd& alpha, const Eigen::VectorXd& psi,
                     double tau) {
  require(tau > 0.0, ErrorCode::InvalidOption, "tau must be positive");
  require(alpha.size() == psi.size(), ErrorCode::DimensionMismatch,
          "alpha and psi differ in length");
  validate_simplex(alpha);
  double linear = 0.0;
  double entropy_term = 0.0;
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    linear += alpha(i) * psi(i);
    entropy_term += xlogx(alpha(i));
  }
  return psi(0) - linear + tau * entropy_term;
}

/// Closed-form maximizer: softmax(psi / tau), log-sum-exp stabilized.
inline Eigen::VectorXd solve_p2_closed(const Eigen::VectorXd& psi, double tau) {
  require(tau > 0.0, ErrorCode::InvalidOption, "tau must be positive");
  require(psi.size() >= 1, ErrorCode::DimensionMismatch, "empty similarity vector");
  Eigen::VectorXd scaled = psi / tau;
  double m = scaled.maxCoeff();
  Eigen::VectorXd alpha = (scaled.array() - m).exp();
  return alpha / alpha.sum();
}

/// Optimal value -E(alpha*) = -tau * log softmax_1(psi / tau).
inline double dual_value(const Eigen::VectorXd& psi, double tau) {
  require(tau > 0.0, ErrorCode::InvalidOption, "tau must be positive");
  require(psi.size() >= 1, ErrorCode::DimensionMismatch, "empty similarity vector");
  Eigen::VectorXd scaled = psi / tau;
  double m = scaled.maxCoeff();
  double lse = m + std::log((scaled.array() - m).exp().sum());
  return -psi(0) + tau * lse;
}

/// Euclidean projection onto the probability simplex (sort and threshold).
inline Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumulative = 0.0;
  double theta = 0.0;
  int support = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    cumulative += u[i];
    double candidate = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (u[i] - candidate > 0.0) {
      theta = candidate;
      support = static_cast<int>(i + 1);
    }
  }
  (void)support;
  Eigen::VectorXd out = (v.array() - theta).max(0.0);
  return out / out.sum();  // guard against rounding in the threshold
}

/// Uniform-ish random simplex point (normalized exponentials).
inline Eigen::VectorXd random_simplex_point(int n, Rng& rng) {
  Eigen::VectorXd alpha(n);
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    alpha(i) = -std::log(u);
  }
  return alpha / alpha.sum();
}

/// Projected gradient ascent on -E over the simplex; the independent
/// numeric oracle for the closed form. Backtracks on the objective, stops
/// when the prox-gradient displacement falls below machine-level tolerance.
inline Eigen::VectorXd solve_p2_numeric(const Eigen::VectorXd& psi, double tau,
                                        int iters = 20000, std::uint64_t seed = 0) {
  require(tau > 0.0, ErrorCode::InvalidOption, "tau must be positive");
  require(iters >= 1, ErrorCode::InvalidOption, "need at least one iteration");
  const Eigen::Index n = psi.size();
  require(n >= 1, ErrorCode::DimensionMismatch, "empty similarity vector");
  if (n == 1) return Eigen::VectorXd::Ones(1);

  Rng rng(seed, "maxent-init");
  Eigen::VectorXd alpha = random_simplex_point(static_cast<int>(n), rng);

  auto neg_energy = [&](const Eigen::VectorXd& a) {
    double linear = 0.0;
    double entropy_term = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      linear += a(i) * psi(i);
      entropy_term += xlogx(a(i));
    }
    return linear - tau * entropy_term - psi(0);
  };
  auto gradient = [&](const Eigen::VectorXd& a) {
    Eigen::VectorXd g(n);
    for (Eigen::Index i = 0; i < n; ++i)
      g(i) = psi(i) - tau * (std::log(std::max(a(i), 1e-300)) + 1.0);
    return g;
  };

  double f = neg_energy(alpha);
  bool converged = false;
  for (int iter = 0; iter < iters; ++iter) {
    Eigen::VectorXd g = gradient(alpha);
    // At the constrained maximum the gradient is constant across the
    // support, and the simplex projection absorbs constant shifts, so the
    // unit-step prox residual vanishes there.
    if ((project_simplex(alpha + g) - alpha).cwiseAbs().maxCoeff() <= 1e-13) {
      converged = true;
      break;
    }
    double eta = 1.0 / tau;
    bool accepted = false;
    for (int h = 0; h < 80; ++h) {
      Eigen::VectorXd candidate = project_simplex(alpha + eta * g);
      double fc = neg_energy(candidate);
      if (fc > f) {
        alpha = std::move(candidate);
        f = fc;
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) {  // no strict ascent left at machine precision
      converged = true;
      break;
    }
  }
  require(converged, ErrorCode::NoConvergence,
          "projected ascent did not converge within the iteration budget");
  return alpha;
}

/// Exponentiated-gradient (mirror) ascent: a second, structurally different
/// iterative solver used to cross-check the projected-ascent oracle.
/// The multiplicative update keeps iterates strictly interior.
inline Eigen::VectorXd solve_p2_mirror(const Eigen::VectorXd& psi, double tau,
                                       int iters = 200) {
  require(tau > 0.0, ErrorCode::InvalidOption, "tau must be positive");
  const Eigen::Index n = psi.size();
  require(n >= 1, ErrorCode::DimensionMismatch, "empty similarity vector");
  Eigen::VectorXd log_alpha =
      Eigen::VectorXd::Constant(n, -std::log(static_cast<double>(n)));
  const double eta = 0.5 / tau;
  for (int iter = 0; iter < iters; ++iter) {
    // alpha <- alpha * exp(eta * (psi - tau (log alpha + 1))), renormalized;
    // in log space the update stays overflow-safe.
    Eigen::VectorXd next = log_alpha + eta * (psi - tau * (log_alpha.array() + 1.0).matrix());
    double m = next.maxCoeff();
    double lse = m + std::log((next.array() - m).exp().sum());
    log_alpha = next.array() - lse;
  }
  return log_alpha.array().exp();
}

}  // namespace specnce::maxent
