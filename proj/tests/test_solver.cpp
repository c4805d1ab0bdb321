#include <doctest.h>

#include <cmath>
#include <random>

#include "lslasso/random.hpp"
#include "lslasso/solver.hpp"

using namespace lslasso;

namespace {

Eigen::MatrixXd uniform_matrix(int n, int p, std::uint64_t seed) {
  CounterRng rng(seed, 0, Stream::Design);
  Eigen::MatrixXd m(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) m(i, j) = 2 * rng.uniform01() - 1;
  return m;
}

Eigen::VectorXd bernoulli_responses(const Eigen::VectorXd& eta, std::uint64_t seed) {
  CounterRng rng(seed, 0, Stream::Noise);
  Eigen::VectorXd y(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) y[i] = rng.uniform01() < 1 / (1 + std::exp(-eta[i])) ? 1 : 0;
  return y;
}

double logistic_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double pen,
                          const Eigen::VectorXd& v) {
  const Eigen::VectorXd t = x * v;
  double s = 0;
  for (Eigen::Index i = 0; i < t.size(); ++i) s += std::log1p(std::exp(t[i])) - y[i] * t[i];
  return s + pen * v.lpNorm<1>();
}

}  // namespace

TEST_CASE("zero solution at zero residual") {
  auto pb = LassoProblem::with_scalar_penalty(DesignMatrix(Eigen::MatrixXd::Identity(2, 2)),
                                              Eigen::Vector2d::Zero(),
                                              LossFamily::gaussian_square(Link::Identity, 1.0, {-2, 2}),
                                              ParamDomain::uniform_box(2, -1, 1), 1.0, 1.0);
  const auto f = fit(pb);
  CHECK(f.theta_hat.cwiseAbs().maxCoeff() == 0.0);
  CHECK(f.converged);
}

TEST_CASE("soft threshold closed form") {
  auto pb = LassoProblem::with_scalar_penalty(DesignMatrix(Eigen::MatrixXd::Ones(1, 1)),
                                              Eigen::VectorXd::Constant(1, 2.0),
                                              LossFamily::gaussian_square(Link::Identity, 1.0, {-11, 11}),
                                              ParamDomain::uniform_box(1, -10, 10), 0.5, 1.0);
  const auto f = fit(pb);
  CHECK(std::abs(f.theta_hat[0] - 1.5) <= 1e-10);
  CHECK(f.kkt_residual <= 1e-8);

  Eigen::Vector3d y(2, -0.3, -3);
  auto clipped = LassoProblem::with_scalar_penalty(
      DesignMatrix(Eigen::MatrixXd::Identity(3, 3)), y,
      LossFamily::gaussian_square(Link::Identity, 1.0, {-5, 5}), ParamDomain::uniform_box(3, -2, 2), 0.5, 1.0);
  const auto g = fit(clipped);
  CHECK((g.theta_hat - Eigen::Vector3d(1.5, 0, -2)).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(g.kkt_residual <= 1e-8);

  Eigen::Vector3d z(1.0, -0.2, 0.05);
  CHECK((prox_step(clipped, z, 0.5) - Eigen::Vector3d(0.75, 0, 0)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((prox_step(clipped, Eigen::Vector3d(9, -9, 0), 1.0) - Eigen::Vector3d(2, -2, 0)).norm() == 0.0);
}

TEST_CASE("logistic p = 2 matches grid brute force") {
  const Eigen::MatrixXd x = uniform_matrix(20, 2, 31);
  const Eigen::VectorXd y = bernoulli_responses(x * Eigen::Vector2d(0.8, -0.5), 31);
  const double lambda = 0.3;
  auto pb = LassoProblem::with_scalar_penalty(DesignMatrix(x), y, LossFamily::logistic({-3, 3}),
                                              ParamDomain::uniform_box(2, -1, 1), lambda, 1.0);
  const auto f = fit(pb);
  double best = 1e300;
  for (int a = 0; a <= 400; ++a) {
    for (int b = 0; b <= 400; ++b) {
      const Eigen::Vector2d v(-1 + a * 0.005, -1 + b * 0.005);
      best = std::min(best, logistic_objective(x, y, lambda, v));
    }
  }
  CHECK(std::abs(f.objective - best) <= 1e-3);
  CHECK(f.objective <= best + 1e-12);
  CHECK(f.objective == doctest::Approx(logistic_objective(x, y, lambda, f.theta_hat)).epsilon(1e-12));
  CHECK(f.kkt_residual <= 1e-8);
  CHECK(f.converged);
}

TEST_CASE("KKT residual on convex instances") {
  const Eigen::MatrixXd x = uniform_matrix(60, 6, 77);
  const Eigen::VectorXd theta = (Eigen::VectorXd(6) << 0.6, -0.4, 0, 0, 0.2, 0).finished();
  const Eigen::VectorXd eta = x * theta;

  SUBCASE("logistic") {
    auto pb = LassoProblem::with_scalar_penalty(DesignMatrix(x), bernoulli_responses(eta, 5),
                                                LossFamily::logistic({-7, 7}),
                                                ParamDomain::uniform_box(6, -1, 1), 1.5, 1.0);
    const auto f = fit(pb);
    CHECK(f.kkt_residual <= 1e-8);
    CHECK(f.converged);
  }
  SUBCASE("poisson") {
    CounterRng rng(6, 0, Stream::Noise);
    Eigen::VectorXd y(60);
    for (int i = 0; i < 60; ++i) {
      std::poisson_distribution<int> pd(std::exp(eta[i]));
      y[i] = pd(rng);
    }
    auto pb = LassoProblem::with_scalar_penalty(DesignMatrix(x), y, LossFamily::poisson_log({-7, 7}),
                                                ParamDomain::uniform_box(6, -1, 1), 2.0, 1.0);
    const auto f = fit(pb);
    CHECK(f.kkt_residual <= 1e-8);
  }
  SUBCASE("gaussian identity with active box") {
    Eigen::VectorXd y = 5 * eta;
    auto pb = LassoProblem::with_scalar_penalty(DesignMatrix(x), y,
                                                LossFamily::gaussian_square(Link::Identity, 1.0, {-7, 7}),
                                                ParamDomain::uniform_box(6, -1, 1), 0.5, 1.0);
    const auto f = fit(pb);
    CHECK(f.kkt_residual <= 1e-8);
    CHECK(f.theta_hat.cwiseAbs().maxCoeff() == 1.0);
  }
  SUBCASE("per-coordinate penalties") {
    Eigen::VectorXd pen(6);
    pen << 0.1, 0.2, 5, 5, 0.3, 5;
    LassoProblem pb(DesignMatrix(x), bernoulli_responses(eta, 8), LossFamily::logistic({-7, 7}),
                    ParamDomain::uniform_box(6, -1, 1), pen);
    const auto f = fit(pb);
    CHECK(f.kkt_residual <= 1e-8);
    // subgradient conditions checked directly
    Eigen::VectorXd grad;
    pb.smooth_value(f.theta_hat, &grad);
    for (int j = 0; j < 6; ++j) {
      const double v = f.theta_hat[j];
      if (v == 0) {
        CHECK(std::abs(grad[j]) <= pen[j] + 1e-6);
      } else if (std::abs(v) < 1) {
        CHECK(std::abs(grad[j] + pen[j] * (v > 0 ? 1 : -1)) <= 1e-6);
      }
    }
  }
}

TEST_CASE("smooth value gradient matches finite differences") {
  const Eigen::MatrixXd x = uniform_matrix(15, 3, 12);
  auto pb = LassoProblem::with_scalar_penalty(DesignMatrix(x), bernoulli_responses(x.col(0), 2),
                                              LossFamily::logistic({-4, 4}), ParamDomain::uniform_box(3, -1, 1),
                                              0.1, 1.0);
  const Eigen::Vector3d v(0.2, -0.3, 0.5);
  Eigen::VectorXd g;
  pb.smooth_value(v, &g);
  for (int j = 0; j < 3; ++j) {
    Eigen::Vector3d e = Eigen::Vector3d::Zero();
    e[j] = 1e-6;
    const double fd = (pb.smooth_value(v + e) - pb.smooth_value(v - e)) / 2e-6;
    CHECK(g[j] == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("nonconvex link uses multistarts") {
  const Eigen::MatrixXd x = uniform_matrix(40, 3, 90);
  Eigen::VectorXd y(40);
  CounterRng rng(3, 0, Stream::Noise);
  for (int i = 0; i < 40; ++i) y[i] = sigmoid(2 * x(i, 0) - x(i, 2)) + 0.1 * (rng.uniform01() - 0.5);
  auto pb = LassoProblem::with_scalar_penalty(DesignMatrix(x), y,
                                              LossFamily::gaussian_square(Link::Sigmoid, 1.0, {-7, 7}),
                                              ParamDomain::uniform_box(3, -2, 2), 0.05, 1.0);
  SolverOptions one;
  one.restarts = 1;
  SolverOptions many;
  many.restarts = 16;
  const auto a = fit(pb, one);
  const auto b = fit(pb, many);
  CHECK(b.restarts_used == 16);
  CHECK(a.restarts_used == 1);
  CHECK(b.objective <= a.objective + 1e-12);
  const auto c = fit(pb, many);
  CHECK(c.theta_hat == b.theta_hat);
  CHECK(pb.domain().contains(b.theta_hat));
}

TEST_CASE("problem validation") {
  const DesignMatrix x(Eigen::MatrixXd::Identity(2, 2));
  const auto lg = LossFamily::logistic({-2, 2});
  const auto box = ParamDomain::uniform_box(2, -1, 1);
  CHECK_THROWS(LassoProblem::with_scalar_penalty(x, Eigen::Vector2d(0, 2), lg, box, 1, 1));
  CHECK_THROWS(LassoProblem::with_scalar_penalty(x, Eigen::Vector3d(0, 1, 0), lg, box, 1, 1));
  CHECK_THROWS(LassoProblem::with_scalar_penalty(x, Eigen::Vector2d(0, 1), lg, box, 0, 1));
  CHECK_THROWS_WITH(LassoProblem::with_scalar_penalty(x, Eigen::Vector2d(0, 1), LossFamily::logistic({-1, 1}),
                                                      box, 1, 1),
                    doctest::Contains("infeasible"));
  auto pb = LassoProblem::with_scalar_penalty(x, Eigen::Vector2d(0, 1), lg, box, 1, 1);
  SolverOptions bad;
  bad.max_iter = 0;
  CHECK_THROWS(fit(pb, bad));
  SolverOptions shortrun;
  shortrun.max_iter = 1;
  shortrun.kkt_tol = 1e-12;
  Eigen::MatrixXd grouped = Eigen::MatrixXd::Zero(6, 2);
  grouped.block(0, 0, 3, 1).setOnes();
  grouped.block(3, 1, 3, 1).setOnes();
  Eigen::VectorXd yg(6);
  yg << 0, 1, 1, 1, 0, 0;
  auto interior = LassoProblem::with_scalar_penalty(DesignMatrix(grouped), yg, lg, box, 1e-3, 1);
  CHECK_FALSE(fit(interior, shortrun).converged);
}

TEST_CASE("theory helpers") {
  CHECK(lambda_from_theory(3, 1, 1) == 2.0);
  CHECK(lambda_from_theory(3, 0, 1) == 0.0);
  CHECK(lambda_from_theory(1e6, 2.0, 1.5) == doctest::Approx(3.0).epsilon(1e-5));
  CHECK_THROWS(lambda_from_theory(1, 1, 1));

  CHECK(error_bound_rhs(1, 1, 100, 3, 1, 1, 1) == doctest::Approx(3 * std::sqrt(11.0) / 100).epsilon(1e-14));
  CHECK(error_bound_rhs(1, 0, 100, 3, 1, 1, 1) == 0.0);
  CHECK(error_bound_rhs(2, 2, 400, 3, 1, 1, 1) ==
        doctest::Approx(error_bound_rhs(2, 2, 100, 3, 1, 1, 1) / 4).epsilon(1e-14));
  CHECK_THROWS(error_bound_rhs(1, 1, 100, 3, 1, 1, 0));
  CHECK_THROWS(error_bound_rhs(1, 1, 100, 3, 1, 0, 1));
  CHECK_THROWS(error_bound_rhs(1, 1, 100, 0.5, 1, 1, 1));

  CHECK(c_gamma_from_family(LossFamily::gaussian_square(Link::Identity, 3.0, {-1, 1})) == 0.5);
  const double c = c_gamma_from_family(LossFamily::logistic({-1, 1}));
  const double inf = sigmoid_deriv(1.0, 1) / 2;
  CHECK(c <= inf);
  CHECK(c >= 0.95 * inf);
}
