#include <catch2/catch_amalgamated.hpp>

#include "specnce/eig.hpp"
#include "specnce/graph.hpp"
#include "specnce/rng.hpp"

using namespace specnce;
using Catch::Approx;

namespace {

Eigen::MatrixXd mat2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

TEST_CASE("from_dense keeps already stochastic rows", "[graph]") {
  graph::SimilarityGraph g = graph::from_dense(mat2(0, 1, 1, 0));
  CHECK(g.weights(0, 1) == 1.0);
  CHECK(g.weights(1, 0) == 1.0);
  CHECK(g.weights(0, 0) == 0.0);
  CHECK(g.symmetric);
}

TEST_CASE("from_dense renormalizes rows", "[graph]") {
  graph::SimilarityGraph g = graph::from_dense(mat2(0, 2, 2, 0));
  CHECK(g.weights(0, 1) == Approx(1.0));
  CHECK(g.weights(1, 0) == Approx(1.0));
}

TEST_CASE("from_dense rejects degenerate input", "[graph]") {
  CHECK_THROWS_MATCHES(graph::from_dense(mat2(0, 0, 1, 0)), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == ErrorCode::ZeroRow;
                       }));
  CHECK_THROWS_MATCHES(graph::from_dense(mat2(0, -1, 1, 0)), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == ErrorCode::NegativeEntry;
                       }));
  Eigen::MatrixXd asym(3, 3);
  asym << 0, 1, 2, 2, 0, 1, 1, 1, 0;
  CHECK_THROWS_MATCHES(graph::from_dense(asym, true), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == ErrorCode::AsymmetricInput;
                       }));
}

TEST_CASE("from_dense zeroes the diagonal silently", "[graph]") {
  graph::SimilarityGraph g = graph::from_dense(mat2(5, 1, 1, 5));
  CHECK(g.weights(0, 0) == 0.0);
  CHECK(g.weights(0, 1) == 1.0);
}

TEST_CASE("from_dense is idempotent on its own output", "[graph]") {
  Rng rng(7, "graph-idempotent");
  Eigen::MatrixXd raw(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) raw(i, j) = rng.uniform(0.1, 2.0);
  graph::SimilarityGraph once = graph::from_dense(raw);
  graph::SimilarityGraph twice = graph::from_dense(once.weights);
  CHECK(once.weights == twice.weights);  // bitwise
}

TEST_CASE("laplacian of the two-node graph", "[graph]") {
  graph::SimilarityGraph g = graph::from_dense(mat2(0, 1, 1, 0));
  graph::LaplacianMatrix l = graph::laplacian(g);
  CHECK(l(0, 0) == Approx(1.0));
  CHECK(l(0, 1) == Approx(-1.0));
  CHECK(l(1, 0) == Approx(-1.0));
  CHECK(l(1, 1) == Approx(1.0));
}

TEST_CASE("laplacian of the uniform three-node graph", "[graph]") {
  Eigen::MatrixXd w = Eigen::MatrixXd::Ones(3, 3);
  w.diagonal().setZero();
  graph::LaplacianMatrix l = graph::laplacian(graph::from_dense(w));
  for (int i = 0; i < 3; ++i) {
    CHECK(l(i, i) == Approx(1.0));
    for (int j = 0; j < 3; ++j)
      if (i != j) CHECK(l(i, j) == Approx(-0.5));
  }
}

TEST_CASE("laplacian rows sum to zero", "[graph]") {
  Rng rng(11, "graph-lap");
  graph::SimilarityGraph g = graph::random_symmetric_graph(5, rng);
  graph::LaplacianMatrix l = graph::laplacian(g);
  CHECK(l.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("symmetric laplacian is positive semidefinite", "[graph]") {
  Rng rng(13, "graph-psd");
  graph::SimilarityGraph g = graph::random_symmetric_graph(6, rng);
  spectral::EigResult eig = spectral::eig_sym(graph::laplacian(g));
  CHECK(eig.values(0) >= -1e-9);
  // Row-stochastic symmetric weights keep the spectrum inside [0, 2].
  CHECK(eig.values(eig.values.size() - 1) <= 2.0 + 1e-9);
}

TEST_CASE("trace identity for the quadratic form", "[graph]") {
  Rng rng(17, "graph-trace");
  for (int t = 0; t < 10; ++t) {
    int n = 4 + t % 3;
    graph::SimilarityGraph g = graph::random_symmetric_graph(n, rng);
    Eigen::MatrixXd z(n, 3);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < 3; ++j) z(i, j) = rng.normal();
    double lhs = (z.transpose() * graph::laplacian(g) * z).trace();
    double rhs = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        rhs += 0.5 * g.weights(i, j) * (z.row(i) - z.row(j)).squaredNorm();
    CHECK(lhs == Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("sbm two disconnected cliques", "[graph]") {
  graph::SimilarityGraph g = graph::sbm_generate({2, 2}, 1.0, 0.0, 0);
  CHECK(g.weights(0, 1) == Approx(1.0));
  CHECK(g.weights(2, 3) == Approx(1.0));
  CHECK(g.weights(0, 2) == 0.0);
  CHECK(g.symmetric);
}

TEST_CASE("sbm single block is the uniform graph", "[graph]") {
  graph::SimilarityGraph g = graph::sbm_generate({3}, 1.0, 0.0, 0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(g.weights(i, j) == Approx(i == j ? 0.0 : 0.5));
}

TEST_CASE("sbm three-block instance has exactly three small eigenvalues", "[graph]") {
  // Eigen-solve oracle on the generated instance.
  graph::SimilarityGraph g = graph::sbm_generate({30, 30, 30}, 0.9, 0.02, 1);
  spectral::EigResult eig = spectral::eig_sym(graph::laplacian(g));
  int below = 0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i)
    if (eig.values(i) < 0.1) ++below;
  CHECK(below == 3);
}

TEST_CASE("sbm rejects invalid probabilities", "[graph]") {
  CHECK_THROWS_MATCHES(graph::sbm_generate({2, 2}, 0.1, 0.5, 0), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == ErrorCode::InvalidProbability;
                       }));
  CHECK_THROWS_AS(graph::sbm_generate({2, 2}, 1.2, 0.0, 0), Error);
}

TEST_CASE("sbm jitter is deterministic per seed", "[graph]") {
  graph::SimilarityGraph a = graph::sbm_generate({4, 4}, 0.8, 0.1, 5, 0.2);
  graph::SimilarityGraph b = graph::sbm_generate({4, 4}, 0.8, 0.1, 5, 0.2);
  graph::SimilarityGraph c = graph::sbm_generate({4, 4}, 0.8, 0.1, 6, 0.2);
  CHECK(a.weights == b.weights);
  CHECK(a.weights != c.weights);
}

TEST_CASE("augmentation graph on two identical points", "[graph]") {
  Eigen::MatrixXd pts(2, 2);
  pts << 1.0, 2.0, 1.0, 2.0;
  graph::SimilarityGraph g = graph::augmentation_graph(pts, 0.5);
  CHECK(g.weights(0, 1) == Approx(1.0));
  CHECK(g.weights(1, 0) == Approx(1.0));
}

TEST_CASE("augmentation graph on collinear equidistant points", "[graph]") {
  Eigen::MatrixXd pts(3, 1);
  pts << 0.0, 1.0, 2.0;
  graph::SimilarityGraph g = graph::augmentation_graph(pts, 0.7);
  CHECK(g.weights(1, 0) == Approx(0.5));
  CHECK(g.weights(1, 2) == Approx(0.5));
  CHECK(g.weights(1, 1) == 0.0);
}

TEST_CASE("augmentation graph rows are stochastic", "[graph]") {
  Rng rng(23, "graph-aug");
  Eigen::MatrixXd pts(10, 2);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 2; ++j) pts(i, j) = rng.normal();
  graph::SimilarityGraph g = graph::augmentation_graph(pts, 0.5);
  CHECK((g.weights.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
  CHECK_FALSE(g.symmetric);  // cleared by construction
}

TEST_CASE("augmentation graph rejects a bad bandwidth", "[graph]") {
  Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(3, 2);
  CHECK_THROWS_MATCHES(graph::augmentation_graph(pts, 0.0), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == ErrorCode::InvalidBandwidth;
                       }));
}
