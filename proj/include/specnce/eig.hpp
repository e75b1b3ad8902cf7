#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "specnce/error.hpp"

namespace specnce::spectral {

struct EigResult {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns, vectors.col(k) pairs with values(k)
};

namespace detail {

inline double off_diagonal_norm(const Eigen::MatrixXd& a) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = i + 1; j < a.cols(); ++j) s += 2.0 * a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace detail

/// Dense symmetric eigensolver, cyclic Jacobi rotations.
///
/// Convergence target: off-diagonal Frobenius norm below 1e-12 relative to
/// the input norm, capped at 100 sweeps. Quadratic convergence makes the
/// cap generous at the matrix sizes handled here.
inline EigResult eig_sym(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  require(m.cols() == n, ErrorCode::DimensionMismatch, "matrix must be square");
  require(n >= 1, ErrorCode::DimensionMismatch, "empty matrix");
  require(n <= 5000, ErrorCode::TooLarge, "dense eigensolve capped at n=5000");

  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  require(asym <= 1e-9 * scale, ErrorCode::NotSymmetric,
          "asymmetry " + std::to_string(asym) + " above tolerance");

  Eigen::MatrixXd a = 0.5 * (m + m.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double frob = a.norm();
  const double target = 1e-12 * std::max(frob, 1e-300);

  bool converged = detail::off_diagonal_norm(a) <= target;
  for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        double apq = a(p, q);
        if (apq == 0.0) continue;
        double app = a(p, p);
        double aqq = a(q, q);
        double theta = 0.5 * (aqq - app) / apq;
        double t;
        if (std::abs(theta) > 1e154) {
          t = 0.5 / theta;  // avoids overflow in theta^2
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          double akp = a(k, p);
          double akq = a(k, q);
          a(k, p) = a(p, k) = c * akp - s * akq;
          a(k, q) = a(q, k) = s * akp + c * akq;
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          double vkp = v(k, p);
          double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
    converged = detail::off_diagonal_norm(a) <= target;
  }
  require(converged, ErrorCode::NoConvergence, "Jacobi sweep cap reached");

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });
  EigResult out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[k], order[k]);
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

}  // namespace specnce::spectral
