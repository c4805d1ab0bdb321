#pragma once

#include <Eigen/Dense>

#include <cstdint>

#include "lslasso/design.hpp"
#include "lslasso/losses.hpp"

namespace lslasso {

/// min_{v in box} sum_i gamma(x_i'v, y_i) + sum_j penalty_j |v_j|.
class LassoProblem {
 public:
  /// Validates sizes, responses, positive penalties and feasibility of the box.
  LassoProblem(DesignMatrix x, Eigen::VectorXd y, LossFamily family, ParamDomain domain,
               Eigen::VectorXd penalty);

  /// Equal-scale form: penalty lambda * d on every coordinate.
  static LassoProblem with_scalar_penalty(DesignMatrix x, Eigen::VectorXd y, LossFamily family,
                                          ParamDomain domain, double lambda, double d);

  const DesignMatrix& x() const { return x_; }
  const Eigen::VectorXd& y() const { return y_; }
  const LossFamily& family() const { return family_; }
  const ParamDomain& domain() const { return domain_; }
  const Eigen::VectorXd& penalty() const { return penalty_; }

  double smooth_value(const Eigen::VectorXd& v, Eigen::VectorXd* grad = nullptr) const;
  double objective(const Eigen::VectorXd& v) const;

 private:
  DesignMatrix x_;
  Eigen::VectorXd y_;
  LossFamily family_;
  ParamDomain domain_;
  Eigen::VectorXd penalty_;
};

struct SolverOptions {
  int max_iter = 10000;
  double kkt_tol = 1e-8;
  double sufficient_decrease = 1e-4;
  int restarts = 16;  // used for nonconvex families only
  std::uint64_t seed = 0;
};

struct LassoFit {
  Eigen::VectorXd theta_hat;
  double objective = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
  int restarts_used = 0;
  bool converged = false;
};

/// Projected proximal gradient with backtracking. Convex families start from
/// the projection of 0; nonconvex ones keep the best of `restarts` starts.
LassoFit fit(const LassoProblem& problem, const SolverOptions& opts = {});

/// Soft-threshold by step * penalty, then clamp to the box.
Eigen::VectorXd prox_step(const LassoProblem& problem, const Eigen::VectorXd& z, double step);

/// || v - prox(v - step * grad f(v)) || with step = 1 / Lipschitz estimate.
double kkt_residual(const LassoProblem& problem, const Eigen::VectorXd& v);

/// Inverse of the step used by the solver and kkt_residual:
/// sup |gamma''| times a power-iteration estimate of ||X||_2^2.
double gradient_lipschitz_estimate(const LassoProblem& problem);

/// lambda = (K + 1) M_q d / (K - 1).
double lambda_from_theory(double K, double M_q, double d);

/// M_q sqrt(s0) / N * 2 sqrt(2 + K^2) K d / (C_gamma kappa^2 (K - 1)).
double error_bound_rhs(double M_q, long s0, long N, double K, double d, double C_gamma,
                       double kappa);

/// C_gamma with E gamma(s, Y) - E gamma(t, Y) >= C_gamma (s - t)^2 under the
/// model at t. Equals the KL curvature constant for likelihood losses; for
/// the Gaussian square loss it is exactly 1/2.
double c_gamma_from_family(const LossFamily& family);

}  // namespace lslasso
