#pragma once

#include <Eigen/Dense>

#include <optional>

#include "lslasso/design.hpp"
#include "lslasso/losses.hpp"

namespace lslasso {

enum class Regime { Bounded, Gaussian };

struct PhiPsi {
  double phi = 0.0;  // uniform bound of the normalized Taylor remainder
  double psi = 0.0;  // its Lipschitz constant
};

/// phi = min(2 F_m / m!, F_{m+1} R / (m+1)!);
/// psi = F_1 (m = 0), F_2 / 2 (m = 1), F_{m+1} / m! (m >= 2).
PhiPsi phi_psi(double F_m, double F_mplus1, double R, int m);

/// Tail-threshold constants of the remainder process xi(v).
struct LslConstants {
  int m = 1;
  Regime regime = Regime::Bounded;
  double phi = 0.0;
  double psi = 0.0;
  double A = 0.0;
  double B = 0.0;
  std::optional<double> C;  // Bounded regime only: C = 8 phi
  double sigma0 = 0.0;      // Gaussian regime only
  Eigen::VectorXd w;               // Gaussian: w_j^2 = sigma0^-2 sum_i var_i X_ij^2
  Eigen::VectorXd lambda_weights;  // Gaussian: max(w_j, d_j)
};

/// Fixed-design constants for losses with bounded, Lipschitz m-th derivative.
/// With U = X diag(d)^-1:  A = 8 psi R sqrt(max_j sum_i U_ij^2),
/// B = phi sqrt(max_j sum_i U_ij^(2m)) (x^0 = 1), C = 8 phi.
LslConstants bounded_constants(const DesignMatrix& x, const Eigen::VectorXd& d, double F_m,
                               double F_mplus1, double R, int m);

/// A sqrt(2 ln 2p) + B sqrt(2 ln(p^m/q)) + C ln(p^m/q).
double bounded_threshold(const LslConstants& c, long p, double q);

/// F_1 sqrt(2 N ln(2p/q)).
double xi1_threshold_bounded(double F1, long N, long p, double q);

/// M(q, q') = A sqrt(2 ln 2p) + B sqrt(2 ln(p/q)) + C ln(p/q) + F_1 sqrt(2 N ln(2p/q')).
double coefficient_bound_m1(const LslConstants& c, double F1, long N, long p, double q,
                            double qprime);

/// Gaussian-noise regime constants. F_m, F_mplus1 bound the link f.
/// Throws if any variance exceeds sigma0^2.
LslConstants gaussian_constants(const DesignMatrix& x, const Eigen::VectorXd& d, double sigma0,
                                const Eigen::VectorXd& variances, double F_m, double F_mplus1,
                                double R, int m);

/// sigma0 (A sqrt(ln 2p) + B sqrt(2 ln(p^m/q))).
double gaussian_threshold(const LslConstants& c, long p, double q);

/// sqrt(2 ln(p/q)).
double xi1_threshold_gaussian(long p, double q);

/// sigma0 [A sqrt(ln 2p) + B sqrt(2 ln(p/q)) + F_1 sqrt(2 ln(p/q'))].
double gaussian_coefficient_bound_m1(const LslConstants& c, double F1, long p, double q,
                                     double qprime);

/// phi(t) = t^-m [g(c + t) - sum_{k<=m} g^(k)(c) t^k / k!], phi(0) = 0.
/// g is the link f for GaussianSquare families, gamma(., y) otherwise.
double taylor_remainder(const LossFamily& family, double c, double t, double y, int m);

}  // namespace lslasso
