#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

namespace specnce {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(sum_i exp(v[i])) with max subtraction. Entries may be -inf.
inline double log_sum_exp(const std::vector<double>& v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

/// log(exp(a) + exp(b)) for two terms.
inline double log_add_exp(double a, double b) {
  double m = std::max(a, b);
  if (m == kNegInf) return kNegInf;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

/// x choose 2 in floating point; exact for the partition sizes used here.
inline double comb2(double x) { return 0.5 * x * (x - 1.0); }

/// x * log(x) with the entropy convention 0 * log 0 = 0.
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

inline bool approx_equal(double a, double b, double tol) {
  return std::abs(a - b) <= tol;
}

}  // namespace specnce
