#pragma once

#include <Eigen/Dense>
#include <string>

#include "specnce/error.hpp"
#include "specnce/rng.hpp"

namespace specnce {

constexpr double kUnitNormTol = 1e-9;

/// n points on the unit sphere, one per row.
struct Embedding {
  Eigen::MatrixXd rows;

  int n() const { return static_cast<int>(rows.rows()); }
  int dim() const { return static_cast<int>(rows.cols()); }
  const Eigen::MatrixXd& matrix() const { return rows; }
};

inline void validate_embedding(const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double norm = m.row(i).norm();
    require(std::abs(norm - 1.0) <= kUnitNormTol, ErrorCode::NotNormalized,
            "row " + std::to_string(i) + " has norm " + std::to_string(norm));
  }
}

/// Row-wise radial projection onto the unit sphere.
inline Embedding project_sphere(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd out = m;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    double norm = out.row(i).norm();
    require(norm > 0.0, ErrorCode::ZeroRow,
            "cannot project zero row " + std::to_string(i));
    out.row(i) /= norm;
  }
  return Embedding{std::move(out)};
}

/// Seeded spherical initialization: standard normal rows, projected.
inline Embedding random_embedding(int n, int d, Rng& rng) {
  Eigen::MatrixXd m(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = rng.normal();
  return project_sphere(m);
}

}  // namespace specnce
