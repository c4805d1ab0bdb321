#pragma once

#include <string>
#include <vector>

namespace lslasso {

enum class FamilyKind { Logistic, GaussianSquare, PoissonLog };
enum class Link { Identity, Sigmoid, Tanh };

/// Closed interval [lo, hi] of linear-index values t = x'v.
struct Interval {
  double lo = -1.0;
  double hi = 1.0;
};

/// A per-observation loss gamma(t, y) of a generalized linear model.
///
///   Logistic        gamma = log(1 + e^t) - y t,      y in {0, 1}
///   GaussianSquare  gamma = (y - f(t))^2 / 2,         f in {identity, sigmoid, tanh}
///   PoissonLog      gamma = e^t - y t,                y in {0, 1, 2, ...}
///
/// The interval is the range of t on which regularity constants are taken;
/// it must be finite so that every derivative used below is bounded.
class LossFamily {
 public:
  static LossFamily logistic(Interval iv);
  static LossFamily gaussian_square(Link link, double sigma0, Interval iv);
  static LossFamily poisson_log(Interval iv);

  FamilyKind kind() const { return kind_; }
  Link link() const { return link_; }
  double sigma0() const { return sigma0_; }
  Interval interval() const { return interval_; }

  LossFamily with_interval(Interval iv) const;

  /// True when gamma is (a multiple of) a negative log-likelihood, i.e. the
  /// KL distance and Fisher information are defined.
  bool has_likelihood() const;
  /// True when gamma(., y) is convex in t for every admissible y.
  bool is_convex() const;

  /// Finite set of responses over which y-dependent suprema are taken.
  std::vector<double> response_test_set() const;

  std::string name() const;

 private:
  LossFamily(FamilyKind kind, Link link, double sigma0, Interval iv);

  FamilyKind kind_;
  Link link_;
  double sigma0_;
  Interval interval_;
};

struct DerivBounds {
  int m = 0;
  double F_m = 0.0;
  double F_mplus1 = 0.0;
};

// Scalar helpers shared across modules.
double sigmoid(double t);
double softplus(double t);
/// k-th derivative of the logistic sigmoid, k in 0..4.
double sigmoid_deriv(double t, int k);
/// k-th derivative of the link function, k in 0..4.
double link_deriv(Link link, double t, int k);

/// Throws std::domain_error when y is not an admissible response.
void validate_response(const LossFamily& family, double y);

double loss_value(const LossFamily& family, double t, double y);
/// Exact k-th partial derivative of gamma in t, k in 0..3.
double loss_deriv(const LossFamily& family, double t, double y, int order);

/// Bounds on |d^m gamma / dt^m| and on its Lipschitz constant over the family
/// interval and the admissible response set. m in {0, 1, 2}.
DerivBounds derivative_bounds(const LossFamily& family, int m);

/// Bounds on |f^(m)| and Lip(f^(m)) for the link f of a GaussianSquare
/// family (the regularity assumption of the Gaussian-noise regime).
DerivBounds link_bounds(const LossFamily& family, int m);

/// The constants governing the Taylor remainder of the function whose
/// expansion is studied: the link for GaussianSquare, gamma otherwise.
DerivBounds remainder_bounds(const LossFamily& family, int m);

/// Kullback-Leibler distance D(t, s) = E_{Y~f(.|t)}[l(s, Y) - l(t, Y)].
/// For GaussianSquare the likelihood is N(t, sigma0^2).
double kl_distance(const LossFamily& family, double t, double s);

struct CurvatureOptions {
  int grid_points = 2001;
  double safety = 0.95;
};

/// Largest C with D(t, s) >= C (t - s)^2 on the interval, estimated as the
/// grid minimum of D(t, s)/(t - s)^2 times a safety factor.
double curvature_constant(const LossFamily& family, const CurvatureOptions& opts = {});

double fisher_information(const LossFamily& family, double t);

/// E gamma(t, Y) when Y is drawn from the model at linear index `truth`
/// (noise_variance is the Gaussian residual variance, ignored otherwise).
double expected_loss(const LossFamily& family, double t, double truth, double noise_variance);

/// E d/dt gamma(t, Y) under the same model.
double expected_loss_deriv(const LossFamily& family, double t, double truth);

/// Centered increment <gamma(t_v, y)> - <gamma(t_theta, y)> where <W> = W - E W
/// under the model at `truth`. Algebraically simplified per family.
double centered_increment(const LossFamily& family, double t_v, double t_theta, double y,
                          double truth);

}  // namespace lslasso
