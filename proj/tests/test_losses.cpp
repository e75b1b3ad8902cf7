#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "specnce/datasets.hpp"
#include "specnce/embedding.hpp"
#include "specnce/losses.hpp"
#include "specnce/mrf.hpp"
#include "specnce/optimize.hpp"

using namespace specnce;
using Catch::Approx;

namespace {

// Naive double-loop core loss, the independent oracle for the batched
// implementation: plain exp/sum arithmetic, no stabilization.
double naive_core_loss(const Eigen::MatrixXd& z1, const Eigen::MatrixXd& z2,
                       double gamma, double tau) {
  const int n = static_cast<int>(z1.rows());
  Eigen::MatrixXd rows(2 * n, z1.cols());
  rows << z1, z2;
  auto s = [&](int i, int j) {
    return std::pow((rows.row(i) - rows.row(j)).norm(), gamma);
  };
  auto l = [&](int i, int j) {
    double denom = 0.0;
    for (int k = 0; k < 2 * n; ++k)
      if (k != i) denom += std::exp(-s(i, k) / tau);
    return -std::log(std::exp(-s(i, j) / tau) / denom);
  };
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += l(i, i + n) + l(i + n, i);
  return total / (2 * n);
}

Eigen::MatrixXd tetrahedron() {
  Eigen::MatrixXd v(4, 3);
  v << 1, 1, 1, 1, -1, -1, -1, 1, -1, -1, -1, 1;
  return v / std::sqrt(3.0);
}

Eigen::MatrixXd random_orthogonal(int d, Rng& rng) {
  Eigen::MatrixXd m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  return qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
}

}  // namespace

TEST_CASE("info_nce closed cases", "[losses]") {
  Eigen::VectorXd q(2);
  q << 1, 0;

  // Single candidate: the softmax is a point mass.
  Eigen::MatrixXd only(1, 2);
  only << 1, 0;
  CHECK(losses::info_nce(q, q, only, 1.0) == Approx(0.0).margin(1e-15));

  // All candidates equally similar: log N.
  Eigen::MatrixXd equal(4, 2);
  equal << 0, 1, 0, -1, 0, 1, 0, -1;
  Eigen::VectorXd pos(2);
  pos << 0, 1;
  CHECK(losses::info_nce(q, pos, equal, 0.7) == Approx(std::log(4.0)).epsilon(1e-12));

  // q = p1 with one negative at similarity zero, tau = 1:
  // -log(e / (e + 1)), frozen from an independent scripted evaluation.
  Eigen::MatrixXd two(2, 2);
  two << 1, 0, 0, 1;
  CHECK(losses::info_nce(q, q, two, 1.0) ==
        Approx(0.3132616875182228).epsilon(1e-14));
}

TEST_CASE("info_nce validates normalization and membership", "[losses]") {
  Eigen::VectorXd q(2);
  q << 2, 0;
  Eigen::MatrixXd c(1, 2);
  c << 1, 0;
  CHECK_THROWS_MATCHES(losses::info_nce(q, c.row(0), c, 1.0), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == ErrorCode::NotNormalized;
                       }));
  Eigen::VectorXd unit(2);
  unit << 1, 0;
  Eigen::VectorXd other(2);
  other << 0, 1;
  CHECK_THROWS_MATCHES(losses::info_nce(unit, other, c, 1.0), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == ErrorCode::PositiveMissing;
                       }));
}

TEST_CASE("kernel_info_nce reduces to info_nce for the Gaussian kernel", "[losses]") {
  Rng rng(3, "losses-knce");
  for (int t = 0; t < 20; ++t) {
    Embedding z = random_embedding(5, 3, rng);
    double tau = rng.uniform(0.3, 1.5);
    Eigen::MatrixXd candidates = z.rows.bottomRows(4);
    Eigen::VectorXd q = z.rows.row(0);
    Eigen::VectorXd pos = z.rows.row(1);
    double a = losses::info_nce(q, pos, candidates, tau);
    double b = losses::kernel_info_nce(q, pos, candidates, kernels::Gaussian{tau});
    CHECK(a == Approx(b).margin(1e-12));
  }
}

TEST_CASE("kernel_info_nce hand case for the Laplacian kernel", "[losses]") {
  // Three candidates along one axis; independent naive evaluation inline.
  Eigen::VectorXd q(2);
  q << 1, 0;
  Eigen::MatrixXd candidates(3, 2);
  candidates << 1, 0, 0, 1, -1, 0;
  double sigma = 0.9;
  auto k = [&](const Eigen::VectorXd& v) {
    return std::exp(-(q - v).norm() / sigma);
  };
  double expected =
      -std::log(k(candidates.row(0)) /
                (k(candidates.row(0)) + k(candidates.row(1)) + k(candidates.row(2))));
  double got = losses::kernel_info_nce(q, candidates.row(0), candidates,
                                       kernels::Exponential{1.0, sigma});
  CHECK(got == Approx(expected).margin(1e-12));

  Eigen::MatrixXd single(1, 2);
  single << 1, 0;
  CHECK(losses::kernel_info_nce(q, q, single, kernels::Exponential{1.0, sigma}) ==
        Approx(0.0).margin(1e-15));
}

TEST_CASE("core loss equals InfoNCE at gamma 2 with doubled temperature", "[losses]") {
  Rng rng(5, "losses-core");
  Embedding z1 = random_embedding(4, 3, rng);
  Embedding z2 = random_embedding(4, 3, rng);
  losses::Batch batch = losses::make_batch(z1.rows, z2.rows);
  double tau = 0.6;
  double core = losses::core_loss(batch, 2.0, 2.0 * tau);
  double nt = losses::batch_loss(losses::LossConfig::info_nce(tau), batch);
  CHECK(core == Approx(nt).margin(1e-12));
}

TEST_CASE("core loss on mutually equidistant rows is log 3", "[losses]") {
  Eigen::MatrixXd v = tetrahedron();
  losses::Batch batch = losses::make_batch(v.topRows(2), v.bottomRows(2));
  CHECK(losses::core_loss(batch, 2.0, 0.8) ==
        Approx(1.0986122886681098).epsilon(1e-12));
}

TEST_CASE("core loss matches the naive oracle", "[losses]") {
  Rng rng(7, "losses-naive");
  Embedding z1 = random_embedding(4, 4, rng);
  Embedding z2 = random_embedding(4, 4, rng);
  losses::Batch batch = losses::make_batch(z1.rows, z2.rows);
  for (double gamma : {0.5, 1.0, 2.0}) {
    CHECK(losses::core_loss(batch, gamma, 0.7) ==
          Approx(naive_core_loss(z1.rows, z2.rows, gamma, 0.7)).margin(1e-12));
  }
}

TEST_CASE("core loss rejects tiny batches", "[losses]") {
  Eigen::MatrixXd one(1, 2);
  one << 1, 0;
  losses::Batch batch{one, one};
  CHECK_THROWS_MATCHES(losses::core_loss(batch, 1.0, 0.5), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == ErrorCode::BatchTooSmall;
                       }));
}

TEST_CASE("batch_loss lambda endpoints", "[losses]") {
  Rng rng(11, "losses-endpoints");
  Embedding z1 = random_embedding(4, 4, rng);
  Embedding z2 = random_embedding(4, 4, rng);
  losses::Batch batch = losses::make_batch(z1.rows, z2.rows);
  double tau1 = 0.6, tau2 = 0.9;
  CHECK(losses::batch_loss(losses::LossConfig::sum(1.0, tau1, tau2), batch) ==
        Approx(losses::batch_loss(losses::LossConfig::laplacian(tau1), batch))
            .margin(1e-12));
  CHECK(losses::batch_loss(losses::LossConfig::sum(0.0, tau1, tau2), batch) ==
        Approx(losses::batch_loss(losses::LossConfig::gamma_loss(2.0, tau2), batch))
            .margin(1e-12));
}

TEST_CASE("concat batch loss splits the dimensions", "[losses]") {
  Rng rng(13, "losses-concat");
  // Left and right halves identical: both half losses coincide.
  Eigen::MatrixXd half1(3, 2), half2(3, 2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) {
      half1(i, j) = rng.normal();
      half2(i, j) = rng.normal();
    }
  Eigen::MatrixXd z1(3, 4), z2(3, 4);
  z1 << half1, half1;
  z2 << half2, half2;
  for (int i = 0; i < 3; ++i) {
    z1.row(i) /= z1.row(i).norm();
    z2.row(i) /= z2.row(i).norm();
  }
  losses::Batch batch = losses::make_batch(z1, z2);
  double lambda = 0.3, tau1 = 0.6, tau2 = 0.9;
  double got = losses::batch_loss(losses::LossConfig::concat_sum(lambda, tau1, tau2),
                                  batch);
  double left = naive_core_loss(z1.leftCols(2), z2.leftCols(2), 1.0, tau1);
  double right = naive_core_loss(z1.rightCols(2), z2.rightCols(2), 2.0, tau2);
  CHECK(got == Approx(lambda * left + (1.0 - lambda) * right).margin(1e-12));

  Eigen::MatrixXd odd1 = random_embedding(3, 3, rng).rows;
  Eigen::MatrixXd odd2 = random_embedding(3, 3, rng).rows;
  losses::Batch odd_batch = losses::make_batch(odd1, odd2);
  CHECK_THROWS_MATCHES(
      losses::batch_loss(losses::LossConfig::concat_sum(0.5, 1.0, 1.0), odd_batch),
      Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
        return e.code() == ErrorCode::OddDimensionForConcat;
      }));
}

TEST_CASE("full loss equals the cross entropy on random instances", "[losses]") {
  Rng rng(17, "losses-full");
  for (int t = 0; t < 20; ++t) {
    int n = 3 + t % 4;
    graph::SimilarityGraph pi = graph::random_symmetric_graph(n, rng);
    Embedding z = random_embedding(n, 4, rng);
    kernels::KernelSpec spec;
    switch (t % 4) {
      case 0: spec = kernels::Gaussian{0.7}; break;
      case 1: spec = kernels::Exponential{1.0, 0.9}; break;
      case 2: spec = kernels::SimpleSum{0.8, 1.1}; break;
      default: spec = kernels::ConcatSum{0.8, 1.1}; break;
    }
    losses::LossAndGrad lg = losses::full_loss_and_gradient(pi, spec, z.rows);
    CHECK(lg.value == Approx(mrf::cross_entropy(pi, spec, z.rows)).margin(1e-12));
  }
}

TEST_CASE("analytic gradient matches central differences", "[losses]") {
  Rng rng(19, "losses-grad");
  graph::SimilarityGraph pi = graph::random_symmetric_graph(6, rng);
  Embedding z = random_embedding(6, 3, rng);
  losses::LossAndGrad lg =
      losses::full_loss_and_gradient(pi, kernels::Gaussian{0.7}, z.rows);
  Eigen::MatrixXd fd =
      optimize::finite_diff_gradient(pi, kernels::Gaussian{0.7}, z.rows, 1e-5);
  double worst = 0.0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 3; ++j)
      if (std::abs(lg.grad(i, j)) > 1e-8)
        worst = std::max(worst,
                         std::abs(lg.grad(i, j) - fd(i, j)) / std::abs(lg.grad(i, j)));
  CHECK(worst <= 1e-5);
}

TEST_CASE("gradient inherits the symmetry of the configuration", "[losses]") {
  // Uniform graph, rows at the vertices of a regular simplex: all row
  // gradients must share one norm.
  graph::SimilarityGraph pi = datasets::uniform_graph(4);
  losses::LossAndGrad lg =
      losses::full_loss_and_gradient(pi, kernels::Gaussian{0.5}, tetrahedron());
  double base = lg.grad.row(0).norm();
  for (int i = 1; i < 4; ++i) CHECK(lg.grad.row(i).norm() == Approx(base).margin(1e-9));
}

TEST_CASE("weighted per-row InfoNCE sum equals the cross entropy", "[losses]") {
  Rng rng(23, "losses-thm1");
  for (int t = 0; t < 10; ++t) {
    int n = 3 + t % 4;
    graph::SimilarityGraph pi = graph::random_symmetric_graph(n, rng);
    Embedding z = random_embedding(n, 3, rng);
    double tau = rng.uniform(0.3, 1.5);
    kernels::KernelSpec spec = kernels::Gaussian{tau};
    double lhs = losses::weighted_info_nce_sum(pi, spec, z.rows);
    CHECK(lhs == Approx(mrf::cross_entropy(pi, spec, z.rows)).margin(1e-9));
  }
}

TEST_CASE("losses are invariant under rigid motions", "[losses]") {
  Rng rng(29, "losses-rigid");
  graph::SimilarityGraph pi = graph::random_symmetric_graph(5, rng);
  Embedding z = random_embedding(5, 3, rng);
  Eigen::MatrixXd rot = random_orthogonal(3, rng);
  Eigen::MatrixXd zr = z.rows * rot;
  kernels::KernelSpec spec = kernels::Gaussian{0.7};
  CHECK(mrf::cross_entropy(pi, spec, zr) ==
        Approx(mrf::cross_entropy(pi, spec, z.rows)).margin(1e-9));

  losses::Batch b1 = losses::make_batch(z.rows.topRows(2), z.rows.bottomRows(2));
  losses::Batch b2 = losses::make_batch(zr.topRows(2), zr.bottomRows(2));
  CHECK(losses::core_loss(b1, 1.0, 0.6) ==
        Approx(losses::core_loss(b2, 1.0, 0.6)).margin(1e-9));
}

TEST_CASE("losses are equivariant under object permutations", "[losses]") {
  Rng rng(31, "losses-perm");
  const int n = 5;
  graph::SimilarityGraph pi = graph::random_symmetric_graph(n, rng);
  Embedding z = random_embedding(n, 3, rng);
  std::vector<int> perm = {3, 1, 4, 0, 2};
  Eigen::MatrixXd pw(n, n);
  Eigen::MatrixXd pz(n, 3);
  for (int i = 0; i < n; ++i) {
    pz.row(i) = z.rows.row(perm[i]);
    for (int j = 0; j < n; ++j) pw(i, j) = pi.weights(perm[i], perm[j]);
  }
  graph::SimilarityGraph ppi;
  ppi.weights = pw;
  ppi.symmetric = pi.symmetric;
  kernels::KernelSpec spec = kernels::Gaussian{0.7};
  CHECK(mrf::cross_entropy(ppi, spec, pz) ==
        Approx(mrf::cross_entropy(pi, spec, z.rows)).margin(1e-12));
}

TEST_CASE("losses are positive away from the degenerate cases", "[losses]") {
  Rng rng(37, "losses-positive");
  graph::SimilarityGraph pi = graph::random_symmetric_graph(5, rng);
  Embedding z = random_embedding(5, 3, rng);
  CHECK(mrf::cross_entropy(pi, kernels::Gaussian{0.7}, z.rows) > 0.0);
  losses::Batch b = losses::make_batch(z.rows.topRows(2), z.rows.bottomRows(2));
  CHECK(losses::core_loss(b, 1.0, 0.5) > 0.0);
}

TEST_CASE("configured objectives expose correct gradients", "[losses]") {
  Rng rng(41, "losses-objgrad");
  graph::SimilarityGraph pi = graph::random_symmetric_graph(5, rng);
  Embedding z = random_embedding(5, 4, rng);
  for (const losses::LossConfig& cfg :
       {losses::LossConfig::laplacian(0.6), losses::LossConfig::sum(0.4, 0.6, 0.9),
        losses::LossConfig::concat_sum(0.4, 0.6, 0.9),
        losses::LossConfig::gamma_loss(0.5, 0.7)}) {
    losses::LossAndGrad lg = losses::full_objective_and_gradient(pi, cfg, z.rows);
    Eigen::MatrixXd fd = optimize::finite_diff_gradient(pi, cfg, z.rows, 1e-5);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 4; ++j)
        if (std::abs(lg.grad(i, j)) > 1e-8)
          CHECK(std::abs(lg.grad(i, j) - fd(i, j)) / std::abs(lg.grad(i, j)) <= 1e-5);
  }
}
