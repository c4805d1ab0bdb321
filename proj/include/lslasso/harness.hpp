#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lslasso/bounds.hpp"
#include "lslasso/design.hpp"
#include "lslasso/losses.hpp"
#include "lslasso/restricted_eigenvalue.hpp"
#include "lslasso/solver.hpp"

namespace lslasso {

enum class DesignKind { Rademacher, UniformBox, FromFile };

std::string to_string(DesignKind kind);

/// A well-specified simulation: fixed design, responses drawn per trial from
/// the family's model at X theta_star.
struct SimSpec {
  long N = 100;
  long p = 8;
  long s0 = 2;
  DesignKind design = DesignKind::Rademacher;
  std::optional<DesignMatrix> design_values;  // FromFile
  Eigen::VectorXd theta_star;
  LossFamily family = LossFamily::logistic({-1.0, 1.0});
  /// Gaussian residual variances per row; empty means sigma0^2 for every row.
  Eigen::VectorXd variances;
  ParamDomain domain = ParamDomain::uniform_box(8, -0.5, 0.5);
  std::uint64_t seed = 0;
  long trials = 100;
};

/// First s0 coordinates alternate +magnitude, -magnitude; the rest are zero.
Eigen::VectorXd alternating_theta(long p, long s0, double magnitude);

/// Index range of the box padded by `pad`; a convenient family interval.
Interval padded_index_range(const DesignMatrix& x, const ParamDomain& dom, double pad = 1e-3);

/// Fixed design of the spec, a function of the seed only.
DesignMatrix make_design(const SimSpec& spec);

/// Throws std::invalid_argument when the spec is inconsistent with its design.
void validate_spec(const SimSpec& spec, const DesignMatrix& x);

struct Dataset {
  DesignMatrix x;
  Eigen::VectorXd y;
  Eigen::VectorXd index;  // X theta_star
};

Eigen::VectorXd row_variances(const SimSpec& spec);

Dataset simulate(const SimSpec& spec, const DesignMatrix& x, std::uint64_t trial);
Dataset simulate(const SimSpec& spec, std::uint64_t trial);

struct SearchBudget {
  long random = 4096;
  long local = 200;
};

struct EmpiricalProcessSample {
  double sup_ratio = 0.0;  // max |R(v) - R(theta)| / sum_j w_j |v_j - theta_j|
  double sup_xi = 0.0;     // same with the linear term removed
  double xi1_value = 0.0;  // max_j |linear coefficient_j| / w_j
  Eigen::VectorXd argmax_v;
  long evaluations = 0;
};

/// Maximizes the centered-loss ratio over box vertices (p <= 12), the 2p
/// axis endpoints through theta, `budget.random` uniform points and
/// `budget.local` coordinate hill-climbing steps from the best anchor.
/// Each search set contains every smaller budget's set.
EmpiricalProcessSample empirical_lsl_ratio(const Dataset& data, const Eigen::VectorXd& theta,
                                           const LossFamily& family, const ParamDomain& dom,
                                           const Eigen::VectorXd& weights,
                                           const SearchBudget& budget, std::uint64_t seed,
                                           std::uint64_t trial);

/// max_j |sum_i <gamma'(x_i'theta, y_i)> X_ij / d_j|.
double xi1_bounded(const Dataset& data, const Eigen::VectorXd& theta, const LossFamily& family,
                   const Eigen::VectorXd& d);

/// max_j |W_j|, W_j = (sigma0 F_1 w_j)^-1 sum_i eps_i f'(x_i'theta) X_ij; columns with
/// w_j = 0 are skipped.
double xi1_gaussian(const Dataset& data, const Eigen::VectorXd& theta, const LossFamily& family,
                    const Eigen::VectorXd& w, double F1);

struct TrialRecord {
  long trial = 0;
  double statistic = 0.0;
  double threshold = 0.0;
  bool violated = false;
};

struct McReport {
  std::string check;
  long trials = 0;
  long violations = 0;
  double violation_rate = 0.0;
  double nominal_q = 0.0;
  double binomial_slack = 0.0;
  bool pass = false;
  std::vector<TrialRecord> records;
  /// Named scalar diagnostics (constants, medians); kept in insertion order.
  std::vector<std::pair<std::string, double>> details;

  double detail(const std::string& key) const;
};

/// Fills violations, rate, slack = 3 sqrt(q (1 - q) / trials) and pass.
void finalize(McReport& report);

/// Same records compared against threshold * scale.
McReport rescore(const McReport& report, double scale);

struct HarnessOptions {
  SearchBudget budget;
  int threads = 1;
  double threshold_scale = 1.0;
};

/// LSL ratio with weights d_j against M(q, q').
McReport verify_tail_bounded(const SimSpec& spec, double q, double qprime,
                             const HarnessOptions& opts = {});

/// Noise process sum_i eps_i [f(x_i'v) - f(x_i'theta)] with weights lambda_j
/// against sigma0 [A sqrt(ln 2p) + B sqrt(2 ln(p/q)) + F_1 sqrt(2 ln(p/q'))].
McReport verify_tail_gaussian(const SimSpec& spec, double q, double qprime,
                              const HarnessOptions& opts = {});

McReport verify_xi1(const SimSpec& spec, double q, Regime regime, const HarnessOptions& opts = {});

struct MassartReport {
  long trials = 0;
  double mean = 0.0;
  double standard_error = 0.0;
  double bound = 0.0;  // 2 sqrt(ln 2p) max_j ||V_j||
  bool pass = false;
  std::vector<TrialRecord> records;
};

/// omega ~ N(0, I_n) per trial; statistic max_j |omega'V_j|.
MassartReport verify_massart(const Eigen::MatrixXd& columns, long trials, std::uint64_t seed,
                             int threads = 1);

/// M_q behind the theoretical penalty: M(q1, q2) for bounded families, the
/// Gaussian M scaled by max_j lambda_j / max_j d_j for GaussianSquare.
double theoretical_M_q(const LossFamily& family, const DesignMatrix& x, const ParamDomain& dom,
                       const Eigen::VectorXd& variances, double q1, double q2);

struct L2Setup {
  double d = 0.0;
  double kappa = 0.0;
  double c_gamma = 0.0;
  double M_q = 0.0;
  double lambda = 0.0;
  double rhs = 0.0;
  Regime regime = Regime::Bounded;
};

/// Constants of the error bound for a spec: kappa(2 s0, K), C_gamma, M_q, lambda, rhs.
/// Bounded families use M(q1, q2); Gaussian ones the Gaussian M scaled by max_j lambda_j / d.
L2Setup l2_setup(const SimSpec& spec, const DesignMatrix& x, double q1, double q2, double K,
                 const ReOptions& re_opts);

McReport verify_l2_bound(const SimSpec& spec, double q1, double q2, double K,
                         const HarnessOptions& opts = {}, const SolverOptions& solver = {},
                         const ReOptions& re_opts = {});

struct ScalingRow {
  long N = 0;
  double median_error = 0.0;
  double rhs = 0.0;
  double lambda = 0.0;
};

struct ScalingReport {
  std::vector<ScalingRow> rows;
  std::vector<double> ratios;  // median(N_k) / median(N_{k+1})
  bool decreasing = false;
  bool pass = false;
};

/// Medians of ||theta_hat - theta*||_2 at each N; pass when strictly decreasing
/// and every consecutive ratio lies in [ratio_lo, ratio_hi].
ScalingReport scaling_study(const SimSpec& base, const std::vector<long>& Ns, double q1, double q2,
                            double K, const HarnessOptions& opts = {},
                            const SolverOptions& solver = {}, const ReOptions& re_opts = {},
                            double ratio_lo = 1.3, double ratio_hi = 3.0);

double median(std::vector<double> v);

}  // namespace lslasso
