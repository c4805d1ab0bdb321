#include <doctest.h>

#include <cmath>

#include "lslasso/bounds.hpp"
#include "lslasso/random.hpp"

using namespace lslasso;

namespace {

double softplus_ref(double t) { return std::log1p(std::exp(t)); }

}  // namespace

TEST_CASE("phi and psi") {
  auto a = phi_psi(1.0, 0.25, 6.0, 1);
  CHECK(a.phi == 0.75);
  CHECK(a.psi == 0.125);
  for (int m : {0, 1, 2, 3}) {
    auto z = phi_psi(1.0, 0.0, 6.0, m);
    CHECK(z.phi == 0.0);
    CHECK(z.psi == 0.0);
  }
  auto b = phi_psi(1.3133, 0.7311, 6.0, 0);
  CHECK(b.phi == doctest::Approx(2.6266).epsilon(1e-12));
  CHECK(b.psi == 0.7311);
  auto c = phi_psi(1.0, 3.0, 100.0, 2);
  CHECK(c.phi == 1.0);
  CHECK(c.psi == 1.5);
  CHECK(phi_psi(1.0, 6.0, 1.0, 3).psi == 1.0);
  CHECK_THROWS(phi_psi(-1.0, 1.0, 1.0, 1));
  CHECK_THROWS(phi_psi(1.0, 1.0, 1.0, -1));
}

TEST_CASE("bounded constants") {
  const DesignMatrix ones(Eigen::MatrixXd::Ones(4, 3));
  auto c = bounded_constants(ones, Eigen::Vector3d::Ones(), 1.0, 0.25, 6.0, 1);
  CHECK(c.psi == 0.125);
  CHECK(c.phi == 0.75);
  CHECK(c.A == doctest::Approx(12.0).epsilon(1e-15));
  CHECK(c.B == doctest::Approx(1.5).epsilon(1e-15));
  REQUIRE(c.C.has_value());
  CHECK(*c.C == 6.0);
  auto z = bounded_constants(ones, Eigen::Vector3d::Ones(), 1.0, 0.0, 6.0, 1);
  CHECK(z.A == 0.0);
  CHECK(z.B == 0.0);
  CHECK(*z.C == 0.0);
  auto m0 = bounded_constants(DesignMatrix(Eigen::MatrixXd::Ones(4, 1)), Eigen::VectorXd::Ones(1),
                              1.0, 1.0, 1.0, 0);
  CHECK(m0.B == doctest::Approx(2.0 * m0.phi).epsilon(1e-15));
  CHECK_THROWS(bounded_constants(ones, Eigen::Vector3d(1, 0, 1), 1.0, 0.25, 6.0, 1));
}

TEST_CASE("bounded constants are scale invariant") {
  CounterRng rng(4, 0, Stream::Design);
  Eigen::MatrixXd m(12, 5);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 5; ++j) m(i, j) = 2 * rng.uniform01() - 1;
  const DesignMatrix x(m);
  const Eigen::VectorXd d = column_scales(x);
  Eigen::VectorXd s(5);
  s << 0.1, 2, 3, 10, 0.7;
  const DesignMatrix xs(m * s.asDiagonal());
  for (int mm : {0, 1, 2}) {
    auto a = bounded_constants(x, d, 1.0, 0.5, 3.0, mm);
    auto b = bounded_constants(xs, column_scales(xs), 1.0, 0.5, 3.0, mm);
    CHECK(a.A == doctest::Approx(b.A).epsilon(1e-13));
    CHECK(a.B == doctest::Approx(b.B).epsilon(1e-13));
  }
}

TEST_CASE("bounded thresholds") {
  LslConstants c;
  c.A = 12;
  c.B = 1.5;
  c.C = 6.0;
  CHECK(bounded_threshold(c, 3, 0.05) == doctest::Approx(51.57467189711721).epsilon(1e-13));
  CHECK(bounded_threshold(c, 3, 0.01) > bounded_threshold(c, 3, 0.1));
  LslConstants z;
  z.C = 0.0;
  CHECK(bounded_threshold(z, 10, 0.3) == 0.0);
  CHECK_THROWS(bounded_threshold(c, 3, 0.0));
  CHECK_THROWS(bounded_threshold(c, 3, 1.0));

  CHECK(xi1_threshold_bounded(1.0, 100, 8, 0.05) == doctest::Approx(33.96563261826216).epsilon(1e-13));
  CHECK(xi1_threshold_bounded(0.0, 100, 8, 0.05) == 0.0);
  CHECK(xi1_threshold_bounded(1.0, 400, 8, 0.05) ==
        doctest::Approx(2 * xi1_threshold_bounded(1.0, 100, 8, 0.05)).epsilon(1e-14));

  CHECK(coefficient_bound_m1(c, 1.0, 100, 3, 0.05, 0.05) == doctest::Approx(82.51814210581244).epsilon(1e-13));
  CHECK(coefficient_bound_m1(z, 0.0, 100, 3, 0.05, 0.05) == 0.0);
  CHECK(coefficient_bound_m1(c, 1.0, 100, 3, 0.04, 0.05) > coefficient_bound_m1(c, 1.0, 100, 3, 0.05, 0.05));
  CHECK(coefficient_bound_m1(c, 1.0, 100, 3, 0.05, 0.04) > coefficient_bound_m1(c, 1.0, 100, 3, 0.05, 0.05));
  CHECK_THROWS(coefficient_bound_m1(c, 1.0, 100, 3, 0.5, 0.5));
}

TEST_CASE("gaussian constants") {
  CounterRng rng(8, 0, Stream::Design);
  Eigen::MatrixXd m(4, 2);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2; ++j) m(i, j) = 2 * rng.uniform01() - 1;
  const DesignMatrix x(m);
  const Eigen::VectorXd d = column_scales(x);
  const double s0 = 1.5;

  auto eq = gaussian_constants(x, d, s0, Eigen::VectorXd::Constant(4, s0 * s0), 1, 0.5, 2, 1);
  for (int j = 0; j < 2; ++j) CHECK(eq.w[j] == doctest::Approx(m.col(j).norm()).epsilon(1e-14));
  CHECK_FALSE(eq.C.has_value());

  auto zero = gaussian_constants(x, d, s0, Eigen::VectorXd::Zero(4), 1, 0.5, 2, 1);
  CHECK(zero.w.isZero());
  CHECK(zero.lambda_weights == d);

  Eigen::Vector4d var(0.1, 2.0, 0.5, 2.25);
  auto mixed = gaussian_constants(x, d, s0, var, 1, 0.5, 2, 1);
  for (int j = 0; j < 2; ++j) {
    double acc = 0;
    for (int i = 0; i < 4; ++i) acc += var[i] * m(i, j) * m(i, j);
    const double w = std::sqrt(acc) / s0;
    CHECK(mixed.w[j] == doctest::Approx(w).epsilon(1e-14));
    CHECK(mixed.w[j] < m.col(j).norm());
    CHECK(mixed.lambda_weights[j] == std::max(w, d[j]));
  }
  CHECK_THROWS(gaussian_constants(x, d, s0, Eigen::Vector4d(0, 0, 0, 2.3), 1, 0.5, 2, 1));
  CHECK_THROWS(gaussian_constants(x, d, s0, Eigen::Vector3d(0, 0, 0), 1, 0.5, 2, 1));
}

TEST_CASE("gaussian thresholds") {
  LslConstants c;
  c.regime = Regime::Gaussian;
  c.sigma0 = 1;
  c.A = 2;
  c.B = 1;
  CHECK(gaussian_threshold(c, 4, 0.05) == doctest::Approx(5.844468147803362).epsilon(1e-13));
  LslConstants c2 = c;
  c2.sigma0 = 2;
  CHECK(gaussian_threshold(c2, 4, 0.05) == doctest::Approx(2 * gaussian_threshold(c, 4, 0.05)).epsilon(1e-15));
  LslConstants z = c;
  z.A = z.B = 0;
  CHECK(gaussian_threshold(z, 4, 0.05) == 0.0);
  LslConstants b;
  b.C = 1.0;
  CHECK_THROWS(gaussian_threshold(b, 4, 0.05));

  CHECK(xi1_threshold_gaussian(8, 0.05) == doctest::Approx(3.1859610214922047).epsilon(1e-13));
  CHECK(xi1_threshold_gaussian(1, 1.0 / std::exp(1.0)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(xi1_threshold_gaussian(9, 0.05) > xi1_threshold_gaussian(8, 0.05));
  CHECK_THROWS(xi1_threshold_gaussian(8, 1.0));

  const double expect = 2 * std::sqrt(std::log(8.0)) + std::sqrt(2 * std::log(80.0)) + 3 * std::sqrt(2 * std::log(40.0));
  CHECK(gaussian_coefficient_bound_m1(c, 3.0, 4, 0.05, 0.1) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("taylor remainder") {
  const auto lg = LossFamily::logistic({-1, 1});
  CHECK(taylor_remainder(lg, 0.3, 0.0, 1.0, 1) == 0.0);
  const auto lin = LossFamily::gaussian_square(Link::Identity, 1.0, {-2, 2});
  CHECK(std::abs(taylor_remainder(lin, 0.1, 0.7, 0.0, 1)) < 1e-15);
  auto g = [](double t) { return softplus_ref(t) - t; };
  const double oracle = (g(0.5) - g(0.0) - 0.5 * (0.5 - 1.0)) / 0.5;
  CHECK(oracle == doctest::Approx(0.0618596072403228).epsilon(1e-12));
  CHECK(taylor_remainder(lg, 0.0, 0.5, 1.0, 1) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK_THROWS(taylor_remainder(lg, 0.0, 0.5, 1.0, 3));
}

TEST_CASE("remainder envelope and Lipschitz on a coarse grid") {
  const auto lg = LossFamily::logistic({-1, 1});
  const double R = 2.0;
  for (int m : {0, 1, 2}) {
    const auto b = derivative_bounds(lg, m);
    const auto pp = phi_psi(b.F_m, b.F_mplus1, R, m);
    double fact = 1;
    for (int k = 2; k <= m; ++k) fact *= k;
    for (double y : {0.0, 1.0}) {
      for (int ic = 0; ic <= 40; ++ic) {
        const double c = -1 + ic * 0.05;
        double prev = 0;
        bool has_prev = false;
        double prev_t = 0;
        for (int it = 0; it <= 40; ++it) {
          const double t = -1 - c + it * 0.05;
          if (c + t < -1 - 1e-12 || c + t > 1 + 1e-12) continue;
          const double r = taylor_remainder(lg, c, t, y, m);
          const double env = std::min(2 * b.F_m / fact, b.F_mplus1 * std::abs(t) / (fact * (m + 1)));
          CHECK(std::abs(r) <= env + 1e-10);
          CHECK(std::abs(r) <= pp.phi + 1e-10);
          if (has_prev) CHECK(std::abs(r - prev) <= pp.psi * std::abs(t - prev_t) + 1e-10);
          prev = r;
          prev_t = t;
          has_prev = true;
        }
      }
    }
  }
}
