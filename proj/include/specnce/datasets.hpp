#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "specnce/graph.hpp"
#include "specnce/rng.hpp"

namespace specnce::datasets {

struct Blobs {
  Eigen::MatrixXd points;   // n x 2
  std::vector<int> labels;  // blob index per point
};

/// Isotropic Gaussian blobs with centers spread on a circle.
inline Blobs make_blobs(int n_blobs, int per_blob, double separation, double stddev,
                        Rng& rng) {
  Blobs out;
  out.points.resize(n_blobs * per_blob, 2);
  out.labels.reserve(n_blobs * per_blob);
  for (int b = 0; b < n_blobs; ++b) {
    double angle = 2.0 * std::numbers::pi * b / n_blobs;
    double cx = separation * std::cos(angle);
    double cy = separation * std::sin(angle);
    for (int i = 0; i < per_blob; ++i) {
      int row = b * per_blob + i;
      out.points(row, 0) = cx + stddev * rng.normal();
      out.points(row, 1) = cy + stddev * rng.normal();
      out.labels.push_back(b);
    }
  }
  return out;
}

/// Dense bipartite pairs within each concept: images [c*ipc, (c+1)*ipc) of
/// concept c pair with every text [c*tpc, (c+1)*tpc), no cross-concept pairs.
inline std::vector<std::pair<int, int>> two_concept_pairs(int concepts,
                                                          int images_per_concept,
                                                          int texts_per_concept) {
  std::vector<std::pair<int, int>> pairs;
  for (int c = 0; c < concepts; ++c)
    for (int i = 0; i < images_per_concept; ++i)
      for (int t = 0; t < texts_per_concept; ++t)
        pairs.emplace_back(c * images_per_concept + i, c * texts_per_concept + t);
  return pairs;
}

/// Concept label of every object in the joint (images then texts) order.
inline std::vector<int> concept_labels(int concepts, int images_per_concept,
                                       int texts_per_concept) {
  std::vector<int> labels;
  for (int c = 0; c < concepts; ++c)
    labels.insert(labels.end(), images_per_concept, c);
  for (int c = 0; c < concepts; ++c)
    labels.insert(labels.end(), texts_per_concept, c);
  return labels;
}

/// Complete graph with uniform off-diagonal weights 1/(n-1); symmetric.
inline graph::SimilarityGraph uniform_graph(int n) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Ones(n, n);
  w.diagonal().setZero();
  return graph::from_dense(std::move(w));
}

}  // namespace specnce::datasets
