#include "lslasso/bounds.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lslasso {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

void check_probability(double q, const char* name) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in (0, 1)");
  }
}

void check_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(name) + " must be finite and >= 0");
  }
}

// max_j sum_i |U_ij|^power with U = X diag(d)^-1; power 0 counts rows.
double max_column_power_sum(const DesignMatrix& x, const Eigen::VectorXd& d, int power) {
  if (d.size() != x.cols()) throw std::invalid_argument("scale vector length != design columns");
  if ((d.array() <= 0.0).any()) throw std::invalid_argument("column scales must be positive");
  if (power == 0) return static_cast<double>(x.rows());
  const Eigen::ArrayXXd u = (x.values().array().rowwise() / d.transpose().array()).abs();
  return u.pow(power).colwise().sum().maxCoeff();
}

double log_pm_over_q(long p, int m, double q) { return m * std::log(double(p)) - std::log(q); }

double link_or_loss(const LossFamily& fam, double t, double y, int k) {
  if (fam.kind() == FamilyKind::GaussianSquare) return link_deriv(fam.link(), t, k);
  return loss_deriv(fam, t, y, k);
}

}  // namespace

PhiPsi phi_psi(double F_m, double F_mplus1, double R, int m) {
  check_nonnegative(F_m, "F_m");
  check_nonnegative(F_mplus1, "F_mplus1");
  check_nonnegative(R, "R");
  if (m < 0) throw std::invalid_argument("m must be >= 0");
  PhiPsi out;
  out.phi = std::min(2.0 * F_m / factorial(m), F_mplus1 * R / factorial(m + 1));
  switch (m) {
    case 0:
      out.psi = F_mplus1;
      break;
    case 1:
      out.psi = F_mplus1 / 2.0;
      break;
    default:
      out.psi = F_mplus1 / factorial(m);
      break;
  }
  return out;
}

LslConstants bounded_constants(const DesignMatrix& x, const Eigen::VectorXd& d, double F_m,
                               double F_mplus1, double R, int m) {
  const PhiPsi pp = phi_psi(F_m, F_mplus1, R, m);
  LslConstants c;
  c.m = m;
  c.regime = Regime::Bounded;
  c.phi = pp.phi;
  c.psi = pp.psi;
  c.A = 8.0 * pp.psi * R * std::sqrt(max_column_power_sum(x, d, 2));
  c.B = pp.phi * std::sqrt(max_column_power_sum(x, d, 2 * m));
  c.C = 8.0 * pp.phi;
  return c;
}

double bounded_threshold(const LslConstants& c, long p, double q) {
  check_probability(q, "q");
  if (c.regime != Regime::Bounded || !c.C) {
    throw std::invalid_argument("bounded_threshold needs bounded-regime constants");
  }
  const double l = log_pm_over_q(p, c.m, q);
  return c.A * std::sqrt(2.0 * std::log(2.0 * p)) + c.B * std::sqrt(2.0 * l) + *c.C * l;
}

double xi1_threshold_bounded(double F1, long N, long p, double q) {
  check_probability(q, "q");
  return F1 * std::sqrt(2.0 * N * std::log(2.0 * p / q));
}

double coefficient_bound_m1(const LslConstants& c, double F1, long N, long p, double q,
                            double qprime) {
  check_probability(q, "q");
  check_probability(qprime, "q'");
  if (q + qprime >= 1.0) throw std::invalid_argument("q + q' must be < 1");
  if (c.regime != Regime::Bounded || !c.C || c.m != 1) {
    throw std::invalid_argument("coefficient_bound_m1 needs bounded-regime constants with m = 1");
  }
  const double l = std::log(double(p) / q);
  return c.A * std::sqrt(2.0 * std::log(2.0 * p)) + c.B * std::sqrt(2.0 * l) + *c.C * l +
         xi1_threshold_bounded(F1, N, p, qprime);
}

LslConstants gaussian_constants(const DesignMatrix& x, const Eigen::VectorXd& d, double sigma0,
                                const Eigen::VectorXd& variances, double F_m, double F_mplus1,
                                double R, int m) {
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) {
    throw std::invalid_argument("sigma0 must be positive");
  }
  if (variances.size() != x.rows()) throw std::invalid_argument("need one variance per row");
  const double s2 = sigma0 * sigma0;
  for (Eigen::Index i = 0; i < variances.size(); ++i) {
    if (!(variances[i] >= 0.0) || variances[i] > s2) {
      throw std::invalid_argument("variance of row " + std::to_string(i) +
                                  " outside [0, sigma0^2]");
    }
  }
  const PhiPsi pp = phi_psi(F_m, F_mplus1, R, m);
  LslConstants c;
  c.m = m;
  c.regime = Regime::Gaussian;
  c.phi = pp.phi;
  c.psi = pp.psi;
  c.A = 8.0 * pp.psi * R * std::sqrt(max_column_power_sum(x, d, 2));
  c.B = pp.phi * std::sqrt(max_column_power_sum(x, d, 2 * m));
  c.sigma0 = sigma0;
  const Eigen::MatrixXd& v = x.values();
  c.w = ((v.array().square().colwise() * variances.array()).colwise().sum() / s2)
            .sqrt()
            .transpose()
            .matrix();
  c.lambda_weights = c.w.cwiseMax(d);
  return c;
}

double gaussian_threshold(const LslConstants& c, long p, double q) {
  check_probability(q, "q");
  if (c.regime != Regime::Gaussian) {
    throw std::invalid_argument("gaussian_threshold needs Gaussian-regime constants");
  }
  return c.sigma0 * (c.A * std::sqrt(std::log(2.0 * p)) +
                     c.B * std::sqrt(2.0 * log_pm_over_q(p, c.m, q)));
}

double xi1_threshold_gaussian(long p, double q) {
  check_probability(q, "q");
  return std::sqrt(2.0 * std::log(double(p) / q));
}

double gaussian_coefficient_bound_m1(const LslConstants& c, double F1, long p, double q,
                                     double qprime) {
  check_probability(q, "q");
  check_probability(qprime, "q'");
  if (q + qprime >= 1.0) throw std::invalid_argument("q + q' must be < 1");
  if (c.regime != Regime::Gaussian || c.m != 1) {
    throw std::invalid_argument("needs Gaussian-regime constants with m = 1");
  }
  return c.sigma0 * (c.A * std::sqrt(std::log(2.0 * p)) +
                     c.B * std::sqrt(2.0 * std::log(double(p) / q)) +
                     F1 * std::sqrt(2.0 * std::log(double(p) / qprime)));
}

double taylor_remainder(const LossFamily& family, double c, double t, double y, int m) {
  if (m < 0 || m > 2) throw std::invalid_argument("taylor_remainder: m must be in {0, 1, 2}");
  if (t == 0.0) return 0.0;
  double poly = 0.0;
  double tk = 1.0;
  for (int k = 0; k <= m; ++k) {
    poly += link_or_loss(family, c, y, k) * tk / factorial(k);
    tk *= t;
  }
  return (link_or_loss(family, c + t, y, 0) - poly) / std::pow(t, m);
}

}  // namespace lslasso
