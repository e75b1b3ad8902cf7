#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <variant>

#include "specnce/eig.hpp"
#include "specnce/embedding.hpp"
#include "specnce/error.hpp"
#include "specnce/util.hpp"

namespace specnce::kernels {

/// exp(-||u - v||^2 / (2 tau))
struct Gaussian {
  double tau = 1.0;
};

/// exp(-||u - v||^gamma / sigma); gamma = 1 is the Laplacian kernel and
/// Exponential(2, 2 tau) coincides with Gaussian(tau).
struct Exponential {
  double gamma = 1.0;
  double sigma = 1.0;
};

/// exp(-||u - v||^2 / tau2) + exp(-||u - v|| / tau1). Unit mixture
/// coefficients; weighted mixing lives at the loss level.
struct SimpleSum {
  double tau1 = 1.0;
  double tau2 = 1.0;
};

/// Splits inputs at the midpoint: exp(-||uL - vL||^2 / tau2) +
/// exp(-||uR - vR|| / tau1). Requires even dimension.
struct ConcatSum {
  double tau1 = 1.0;
  double tau2 = 1.0;
};

using KernelSpec = std::variant<Gaussian, Exponential, SimpleSum, ConcatSum>;

inline void validate(const KernelSpec& spec) {
  std::visit(
      [](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          require(k.tau > 0.0, ErrorCode::InvalidKernelParameter, "tau must be positive");
        } else if constexpr (std::is_same_v<T, Exponential>) {
          require(k.sigma > 0.0, ErrorCode::InvalidKernelParameter, "sigma must be positive");
          require(k.gamma > 0.0 && k.gamma <= 2.0, ErrorCode::InvalidKernelParameter,
                  "gamma must lie in (0, 2]");
        } else {
          require(k.tau1 > 0.0 && k.tau2 > 0.0, ErrorCode::InvalidKernelParameter,
                  "tau1 and tau2 must be positive");
        }
      },
      spec);
}

inline bool needs_even_dimension(const KernelSpec& spec) {
  return std::holds_alternative<ConcatSum>(spec);
}

/// Kernel value at zero displacement (the Gram diagonal): 1 for the
/// exponential family, 2 for the two-term sums.
inline double value_at_zero(const KernelSpec& spec) {
  return (std::holds_alternative<SimpleSum>(spec) ||
          std::holds_alternative<ConcatSum>(spec))
             ? 2.0
             : 1.0;
}

namespace detail {

inline void check_pair(const KernelSpec& spec, Eigen::Index du, Eigen::Index dv) {
  require(du == dv, ErrorCode::DimensionMismatch, "u and v differ in dimension");
  if (needs_even_dimension(spec))
    require(du % 2 == 0, ErrorCode::OddDimensionForConcat,
            "concat kernels need an even dimension");
}

}  // namespace detail

/// log k(x) for displacement x. Stable for every variant: the exponential
/// family is evaluated directly in log space, the sums via two-term
/// log-add-exp.
inline double log_eval_displacement(const KernelSpec& spec, const Eigen::VectorXd& x) {
  validate(spec);
  return std::visit(
      [&](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          return -x.squaredNorm() / (2.0 * k.tau);
        } else if constexpr (std::is_same_v<T, Exponential>) {
          double d = x.norm();
          return d == 0.0 ? 0.0 : -std::pow(d, k.gamma) / k.sigma;
        } else if constexpr (std::is_same_v<T, SimpleSum>) {
          return log_add_exp(-x.squaredNorm() / k.tau2, -x.norm() / k.tau1);
        } else {
          const Eigen::Index h = x.size() / 2;
          require(x.size() % 2 == 0, ErrorCode::OddDimensionForConcat,
                  "concat kernels need an even dimension");
          return log_add_exp(-x.head(h).squaredNorm() / k.tau2,
                             -x.tail(h).norm() / k.tau1);
        }
      },
      spec);
}

inline double eval(const KernelSpec& spec, const Eigen::VectorXd& u,
                   const Eigen::VectorXd& v) {
  detail::check_pair(spec, u.size(), v.size());
  return std::exp(log_eval_displacement(spec, u - v));
}

inline double log_eval(const KernelSpec& spec, const Eigen::VectorXd& u,
                       const Eigen::VectorXd& v) {
  detail::check_pair(spec, u.size(), v.size());
  return log_eval_displacement(spec, u - v);
}

struct LogKernelGrad {
  double log_value;
  Eigen::VectorXd grad;  // d(log k)/dx at displacement x
};

/// log k(x) together with its gradient in x. At x = 0 the non-smooth
/// variants (gamma < 2, the ||.|| terms of the sums) use gradient zero,
/// the symmetric subgradient choice.
inline LogKernelGrad log_eval_grad(const KernelSpec& spec, const Eigen::VectorXd& x) {
  validate(spec);
  return std::visit(
      [&](const auto& k) -> LogKernelGrad {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          return {-x.squaredNorm() / (2.0 * k.tau), -x / k.tau};
        } else if constexpr (std::is_same_v<T, Exponential>) {
          double d = x.norm();
          if (d == 0.0) return {0.0, Eigen::VectorXd::Zero(x.size())};
          double logv = -std::pow(d, k.gamma) / k.sigma;
          Eigen::VectorXd g = -(k.gamma / k.sigma) * std::pow(d, k.gamma - 2.0) * x;
          return {logv, std::move(g)};
        } else if constexpr (std::is_same_v<T, SimpleSum>) {
          double d = x.norm();
          double a = -x.squaredNorm() / k.tau2;
          double b = -d / k.tau1;
          double m = std::max(a, b);
          double wa = std::exp(a - m);
          double wb = std::exp(b - m);
          Eigen::VectorXd ga = (-2.0 / k.tau2) * x;
          Eigen::VectorXd gb = d == 0.0 ? Eigen::VectorXd::Zero(x.size()).eval()
                                        : (-(1.0 / (k.tau1 * d)) * x).eval();
          return {m + std::log(wa + wb), (wa * ga + wb * gb) / (wa + wb)};
        } else {
          require(x.size() % 2 == 0, ErrorCode::OddDimensionForConcat,
                  "concat kernels need an even dimension");
          const Eigen::Index h = x.size() / 2;
          Eigen::VectorXd xl = x.head(h);
          Eigen::VectorXd xr = x.tail(h);
          double dr = xr.norm();
          double a = -xl.squaredNorm() / k.tau2;
          double b = -dr / k.tau1;
          double m = std::max(a, b);
          double wa = std::exp(a - m);
          double wb = std::exp(b - m);
          Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
          g.head(h) = wa * (-2.0 / k.tau2) * xl;
          if (dr > 0.0) g.tail(h) = wb * (-(1.0 / (k.tau1 * dr))) * xr;
          g /= (wa + wb);
          return {m + std::log(wa + wb), std::move(g)};
        }
      },
      spec);
}

/// Pairwise kernel values of the given row vectors.
struct GramMatrix {
  Eigen::MatrixXd values;
  KernelSpec spec;

  int n() const { return static_cast<int>(values.rows()); }
};

inline GramMatrix gram(const KernelSpec& spec, const Eigen::MatrixXd& rows) {
  validate(spec);
  if (needs_even_dimension(spec))
    require(rows.cols() % 2 == 0, ErrorCode::OddDimensionForConcat,
            "concat kernels need an even dimension");
  const Eigen::Index n = rows.rows();
  const double diag = value_at_zero(spec);
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = diag;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double v = std::exp(log_eval_displacement(spec, rows.row(i) - rows.row(j)));
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return GramMatrix{std::move(k), spec};
}

inline GramMatrix gram(const KernelSpec& spec, const Embedding& z) {
  return gram(spec, z.rows);
}

/// Smallest eigenvalue of the Gram matrix at the given points; the
/// numerical strict-positive-definiteness probe.
inline double min_gram_eigenvalue(const KernelSpec& spec, const Eigen::MatrixXd& points) {
  require(points.rows() <= 200, ErrorCode::TooLarge,
          "positive-definiteness probe capped at n=200");
  GramMatrix g = gram(spec, points);
  return spectral::eig_sym(g.values).values(0);
}

}  // namespace specnce::kernels
