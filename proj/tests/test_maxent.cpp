#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "specnce/losses.hpp"
#include "specnce/maxent.hpp"
#include "specnce/rng.hpp"

using namespace specnce;
using Catch::Approx;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST_CASE("energy closed cases", "[maxent]") {
  // alpha = e1: the entropy term vanishes and the linear terms cancel.
  CHECK(maxent::energy(vec({1, 0, 0}), vec({2.5, -1, 0.3}), 0.7) ==
        Approx(0.0).margin(1e-15));

  // Uniform alpha with constant psi: E = -tau log n.
  int n = 4;
  Eigen::VectorXd uniform = Eigen::VectorXd::Constant(n, 1.0 / n);
  Eigen::VectorXd psi = Eigen::VectorXd::Constant(n, 3.1);
  CHECK(maxent::energy(uniform, psi, 0.9) ==
        Approx(-0.9 * std::log(double(n))).epsilon(1e-12));
}

TEST_CASE("energy matches a direct evaluation", "[maxent]") {
  Rng rng(3, "maxent-energy");
  for (int t = 0; t < 20; ++t) {
    int n = 2 + t % 5;
    Eigen::VectorXd alpha = maxent::random_simplex_point(n, rng);
    Eigen::VectorXd psi(n);
    for (int i = 0; i < n; ++i) psi(i) = rng.normal();
    double tau = rng.uniform(0.2, 2.0);
    double direct = psi(0);
    for (int i = 0; i < n; ++i) {
      direct -= alpha(i) * psi(i);
      if (alpha(i) > 0) direct += tau * alpha(i) * std::log(alpha(i));
    }
    CHECK(maxent::energy(alpha, psi, tau) == Approx(direct).margin(1e-12));
  }
}

TEST_CASE("closed-form solution basics", "[maxent]") {
  Eigen::VectorXd equal = Eigen::VectorXd::Constant(5, 2.0);
  Eigen::VectorXd alpha = maxent::solve_p2_closed(equal, 1.3);
  for (int i = 0; i < 5; ++i) CHECK(alpha(i) == Approx(0.2).epsilon(1e-12));

  // Frozen logistic values for psi = (1, 0), tau = 1.
  Eigen::VectorXd two = maxent::solve_p2_closed(vec({1, 0}), 1.0);
  CHECK(two(0) == Approx(0.7310585786300049).epsilon(1e-12));
  CHECK(two(1) == Approx(0.2689414213699951).epsilon(1e-12));

  // tau -> 0: all mass on the argmax.
  Eigen::VectorXd cold = maxent::solve_p2_closed(vec({0.2, 1.0, 0.1}), 1e-3);
  CHECK(cold(1) >= 0.999);
}

TEST_CASE("closed-form solution is shift invariant", "[maxent]") {
  Rng rng(5, "maxent-shift");
  for (int t = 0; t < 20; ++t) {
    int n = 2 + t % 6;
    Eigen::VectorXd psi(n);
    for (int i = 0; i < n; ++i) psi(i) = rng.normal();
    double tau = rng.uniform(0.2, 2.0);
    Eigen::VectorXd base = maxent::solve_p2_closed(psi, tau);
    Eigen::VectorXd shifted =
        maxent::solve_p2_closed(psi.array() + 17.5, tau);
    CHECK((base - shifted).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("dual value closed cases", "[maxent]") {
  Eigen::VectorXd equal = Eigen::VectorXd::Constant(6, -0.4);
  CHECK(maxent::dual_value(equal, 0.8) == Approx(0.8 * std::log(6.0)).epsilon(1e-12));
  CHECK(maxent::dual_value(vec({3.7}), 1.1) == Approx(0.0).margin(1e-15));
}

TEST_CASE("dual value equals minus the optimal energy", "[maxent]") {
  Rng rng(7, "maxent-dual");
  for (int t = 0; t < 30; ++t) {
    int n = 2 + t % 6;
    Eigen::VectorXd psi(n);
    for (int i = 0; i < n; ++i) psi(i) = rng.uniform(-4.0, 4.0);
    double tau = rng.uniform(0.3, 2.0);
    Eigen::VectorXd alpha = maxent::solve_p2_closed(psi, tau);
    CHECK(std::abs(maxent::dual_value(psi, tau) + maxent::energy(alpha, psi, tau)) <=
          1e-9);
  }
}

TEST_CASE("numeric solver agrees with the closed form", "[maxent]") {
  Rng rng(11, "maxent-numeric");
  for (int t = 0; t < 20; ++t) {
    int n = 2 + t % 6;
    double tau = rng.uniform(0.3, 2.0);
    Eigen::VectorXd psi(n);
    for (int i = 0; i < n; ++i) psi(i) = tau * rng.uniform(-6.0, 6.0);
    Eigen::VectorXd closed = maxent::solve_p2_closed(psi, tau);
    Eigen::VectorXd numeric = maxent::solve_p2_numeric(psi, tau, 20000, 100 + t);
    CHECK((closed - numeric).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("numeric solver closed cases", "[maxent]") {
  Eigen::VectorXd equal = Eigen::VectorXd::Constant(4, 1.5);
  Eigen::VectorXd alpha = maxent::solve_p2_numeric(equal, 1.0, 20000, 3);
  for (int i = 0; i < 4; ++i) CHECK(alpha(i) == Approx(0.25).margin(1e-7));

  Eigen::VectorXd two = maxent::solve_p2_numeric(vec({1, 0}), 1.0, 20000, 5);
  CHECK(two(0) == Approx(0.7310585786300049).margin(1e-6));
  CHECK(two(1) == Approx(0.2689414213699951).margin(1e-6));

  // Extreme inputs must not overflow; nearly all mass lands on entry 1.
  Eigen::VectorXd extreme = maxent::solve_p2_numeric(vec({100, 0}), 1.0, 20000, 7);
  CHECK(extreme(0) >= 1.0 - 1e-9);
  CHECK(std::isfinite(extreme(1)));
}

TEST_CASE("mirror ascent cross-checks the projected ascent oracle", "[maxent]") {
  Rng rng(13, "maxent-mirror");
  for (int t = 0; t < 10; ++t) {
    int n = 2 + t % 5;
    double tau = rng.uniform(0.3, 2.0);
    Eigen::VectorXd psi(n);
    for (int i = 0; i < n; ++i) psi(i) = tau * rng.uniform(-5.0, 5.0);
    Eigen::VectorXd pga = maxent::solve_p2_numeric(psi, tau, 20000, 200 + t);
    Eigen::VectorXd mirror = maxent::solve_p2_mirror(psi, tau, 300);
    CHECK((pga - mirror).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("no random simplex point beats the closed-form maximizer", "[maxent]") {
  Rng rng(17, "maxent-concave");
  for (int t = 0; t < 10; ++t) {
    int n = 2 + t % 6;
    double tau = rng.uniform(0.3, 2.0);
    Eigen::VectorXd psi(n);
    for (int i = 0; i < n; ++i) psi(i) = rng.uniform(-3.0, 3.0);
    double star = -maxent::energy(maxent::solve_p2_closed(psi, tau), psi, tau);
    for (int r = 0; r < 1000; ++r) {
      Eigen::VectorXd alpha = maxent::random_simplex_point(n, rng);
      CHECK(-maxent::energy(alpha, psi, tau) <= star + 1e-12);
    }
  }
}

TEST_CASE("the linear constraint of the primal stays within the entropy cap",
          "[maxent]") {
  Rng rng(19, "maxent-bound");
  for (int t = 0; t < 20; ++t) {
    int n = 2 + t % 8;
    double tau = rng.uniform(0.3, 2.0);
    Eigen::VectorXd psi(n);
    for (int i = 0; i < n; ++i) psi(i) = rng.uniform(-4.0, 4.0);
    Eigen::VectorXd alpha = maxent::solve_p2_closed(psi, tau);
    CHECK(psi(0) - alpha.dot(psi) <= tau * std::log(double(n)) + 1e-9);
  }
}

TEST_CASE("dual value recovers the kernel contrastive loss", "[maxent]") {
  // With psi_i = tau log K(q, p_i), the optimal value is tau times the
  // kernel ratio loss.
  Rng rng(23, "maxent-loss");
  for (int t = 0; t < 10; ++t) {
    Embedding z = random_embedding(5, 3, rng);
    double tau = rng.uniform(0.3, 1.5);
    kernels::KernelSpec spec = kernels::Gaussian{0.8};
    Eigen::VectorXd q = z.rows.row(0);
    Eigen::MatrixXd candidates = z.rows.bottomRows(4);
    Eigen::VectorXd psi(4);
    for (int i = 0; i < 4; ++i)
      psi(i) = tau * kernels::log_eval(spec, q, candidates.row(i));
    double loss = losses::kernel_info_nce(q, candidates.row(0), candidates, spec);
    CHECK(std::abs(maxent::dual_value(psi, tau) - tau * loss) <= 1e-9);
  }
}

TEST_CASE("solver guards", "[maxent]") {
  CHECK_THROWS_MATCHES(maxent::solve_p2_closed(vec({1.0}), 0.0), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == ErrorCode::InvalidOption;
                       }));
  CHECK(maxent::solve_p2_numeric(vec({2.0}), 1.0, 5, 0)(0) == Approx(1.0));
  Eigen::VectorXd bad(2);
  bad << 0.7, 0.7;
  CHECK_THROWS_MATCHES(maxent::energy(bad, vec({1, 0}), 1.0), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == ErrorCode::NotNormalized;
                       }));
}
