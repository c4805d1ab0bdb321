#include "lslasso/losses.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <stdexcept>

namespace lslasso {

namespace {

constexpr double kGridSafety = 1.05;
constexpr int kGridPoints = 2001;
// Below this |s - t| the KL distance is evaluated through its integral form.
constexpr double kSmallGap = 1e-2;

// Critical points of sigma^(k), i.e. zeros of sigma^(k+1).
const double kSigmaCrit2 = std::log(2.0 + std::sqrt(3.0));
const double kSigmaCrit3 = std::log((12.0 + std::sqrt(96.0)) / (12.0 - std::sqrt(96.0)));

// 8-point Gauss-Legendre rule mapped to [0, 1].
constexpr std::array<double, 8> kGlNodes = {
    0.019855071751231856, 0.10166676129318664, 0.2372337950418355, 0.4082826787521751,
    0.5917173212478249,   0.7627662049581645,  0.8983332387068134, 0.9801449282487681};
constexpr std::array<double, 8> kGlWeights = {
    0.05061426814518813, 0.11119051722668724, 0.15685332293894363, 0.18134189168918100,
    0.18134189168918100, 0.15685332293894363, 0.11119051722668724, 0.05061426814518813};

void check_interval(Interval iv) {
  if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi)) {
    throw std::invalid_argument("loss interval must be finite with lo < hi");
  }
}

template <typename Fn>
double sup_abs_at(Interval iv, Fn&& fn, std::initializer_list<double> critical) {
  double best = std::max(std::abs(fn(iv.lo)), std::abs(fn(iv.hi)));
  for (double c : critical) {
    if (c > iv.lo && c < iv.hi) best = std::max(best, std::abs(fn(c)));
  }
  return best;
}

template <typename Fn>
double sup_abs_grid(Interval iv, const std::vector<double>& ys, Fn&& fn) {
  double best = 0.0;
  const double h = (iv.hi - iv.lo) / (kGridPoints - 1);
  for (int i = 0; i < kGridPoints; ++i) {
    const double t = i + 1 == kGridPoints ? iv.hi : iv.lo + h * i;
    for (double y : ys) best = std::max(best, std::abs(fn(t, y)));
  }
  return kGridSafety * best;
}

// sup over the interval of |sigma^(k)(scale * t)| * factor.
double sigmoid_family_sup(Interval iv, int k, double scale) {
  auto fn = [&](double t) { return sigmoid_deriv(scale * t, k); };
  switch (k) {
    case 0:
      return sup_abs_at(iv, fn, {});
    case 1:
      return sup_abs_at(iv, fn, {0.0});
    case 2:
      return sup_abs_at(iv, fn, {-kSigmaCrit2 / scale, kSigmaCrit2 / scale});
    case 3:
      return sup_abs_at(iv, fn, {-kSigmaCrit3 / scale, 0.0, kSigmaCrit3 / scale});
    default:
      throw std::invalid_argument("sigmoid derivative order out of range");
  }
}

double link_sup(Link link, Interval iv, int k) {
  switch (link) {
    case Link::Identity:
      if (k == 0) return std::max(std::abs(iv.lo), std::abs(iv.hi));
      return k == 1 ? 1.0 : 0.0;
    case Link::Sigmoid:
      return sigmoid_family_sup(iv, k, 1.0);
    case Link::Tanh:
      if (k == 0) return std::max(std::abs(std::tanh(iv.lo)), std::abs(std::tanh(iv.hi)));
      return std::ldexp(sigmoid_family_sup(iv, k, 2.0), k + 1);
  }
  return 0.0;
}

// sup over interval x response set of |d^k gamma / dt^k|.
double loss_sup(const LossFamily& fam, int k) {
  const Interval iv = fam.interval();
  switch (fam.kind()) {
    case FamilyKind::Logistic:
      if (k == 0) return std::max(softplus(iv.hi), softplus(-iv.lo));
      if (k == 1) return std::max(sigmoid(iv.hi), sigmoid(-iv.lo));
      return sigmoid_family_sup(iv, k - 1, 1.0);
    case FamilyKind::GaussianSquare:
      if (fam.link() == Link::Identity) {
        if (k >= 2) return k == 2 ? 1.0 : 0.0;
        double best = 0.0;
        for (double y : fam.response_test_set()) {
          for (double t : {iv.lo, iv.hi}) {
            const double r = std::abs(t - y);
            best = std::max(best, k == 0 ? 0.5 * r * r : r);
          }
        }
        return best;
      }
      [[fallthrough]];
    case FamilyKind::PoissonLog:
      return sup_abs_grid(iv, fam.response_test_set(),
                          [&](double t, double y) { return loss_deriv(fam, t, y, k); });
  }
  return 0.0;
}

// Second derivative of the log-partition function: the integrand of the
// Bregman form of the KL distance.
double log_partition_curvature(const LossFamily& fam, double x) {
  switch (fam.kind()) {
    case FamilyKind::Logistic:
      return sigmoid_deriv(x, 1);
    case FamilyKind::PoissonLog:
      return std::exp(x);
    case FamilyKind::GaussianSquare:
      return 1.0 / (fam.sigma0() * fam.sigma0());
  }
  return 0.0;
}

void require_likelihood(const LossFamily& fam) {
  if (!fam.has_likelihood()) {
    throw std::invalid_argument("family " + fam.name() + " has no likelihood interpretation");
  }
}

// D(t, s) / (s - t)^2 = int_0^1 (1 - r) A''(t + r (s - t)) dr.
double kl_ratio_integral(const LossFamily& fam, double t, double s) {
  const double h = s - t;
  double acc = 0.0;
  for (std::size_t k = 0; k < kGlNodes.size(); ++k) {
    const double r = kGlNodes[k];
    acc += kGlWeights[k] * (1.0 - r) * log_partition_curvature(fam, t + r * h);
  }
  return acc;
}

double kl_ratio(const LossFamily& fam, double t, double s) {
  const double h = s - t;
  if (std::abs(h) < kSmallGap) return kl_ratio_integral(fam, t, s);
  return kl_distance(fam, t, s) / (h * h);
}

}  // namespace

LossFamily::LossFamily(FamilyKind kind, Link link, double sigma0, Interval iv)
    : kind_(kind), link_(link), sigma0_(sigma0), interval_(iv) {
  check_interval(iv);
  if (!std::isfinite(sigma0) || sigma0 <= 0.0) {
    throw std::invalid_argument("sigma0 must be positive and finite");
  }
}

LossFamily LossFamily::logistic(Interval iv) {
  return LossFamily(FamilyKind::Logistic, Link::Identity, 1.0, iv);
}

LossFamily LossFamily::gaussian_square(Link link, double sigma0, Interval iv) {
  return LossFamily(FamilyKind::GaussianSquare, link, sigma0, iv);
}

LossFamily LossFamily::poisson_log(Interval iv) {
  return LossFamily(FamilyKind::PoissonLog, Link::Identity, 1.0, iv);
}

LossFamily LossFamily::with_interval(Interval iv) const {
  return LossFamily(kind_, link_, sigma0_, iv);
}

bool LossFamily::has_likelihood() const {
  return kind_ != FamilyKind::GaussianSquare || link_ == Link::Identity;
}

bool LossFamily::is_convex() const { return has_likelihood(); }

std::vector<double> LossFamily::response_test_set() const {
  switch (kind_) {
    case FamilyKind::Logistic:
      return {0.0, 1.0};
    case FamilyKind::PoissonLog:
      return {0.0, 1.0, 2.0, 5.0, 10.0};
    case FamilyKind::GaussianSquare: {
      std::vector<double> ys;
      for (double end : {interval_.lo, interval_.hi}) {
        const double f = link_deriv(link_, end, 0);
        for (double k : {-3.0, -1.0, 0.0, 1.0, 3.0}) ys.push_back(f + k * sigma0_);
      }
      return ys;
    }
  }
  return {};
}

std::string LossFamily::name() const {
  switch (kind_) {
    case FamilyKind::Logistic:
      return "logistic";
    case FamilyKind::PoissonLog:
      return "poisson";
    case FamilyKind::GaussianSquare:
      switch (link_) {
        case Link::Identity:
          return "gaussian-identity";
        case Link::Sigmoid:
          return "gaussian-sigmoid";
        case Link::Tanh:
          return "gaussian-tanh";
      }
  }
  return "unknown";
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

double sigmoid_deriv(double t, int k) {
  const double s = sigmoid(t);
  const double s1 = s * sigmoid(-t);
  switch (k) {
    case 0:
      return s;
    case 1:
      return s1;
    case 2:
      return s1 * (1.0 - 2.0 * s);
    case 3:
      return s1 * (1.0 - 6.0 * s + 6.0 * s * s);
    case 4:
      return s1 * (1.0 - 2.0 * s) * (1.0 - 12.0 * s + 12.0 * s * s);
    default:
      throw std::invalid_argument("sigmoid derivative order must be in 0..4");
  }
}

double link_deriv(Link link, double t, int k) {
  if (k < 0 || k > 4) throw std::invalid_argument("link derivative order must be in 0..4");
  switch (link) {
    case Link::Identity:
      return k == 0 ? t : (k == 1 ? 1.0 : 0.0);
    case Link::Sigmoid:
      return sigmoid_deriv(t, k);
    case Link::Tanh:
      // tanh(t) = 2 sigma(2t) - 1
      if (k == 0) return std::tanh(t);
      return std::ldexp(sigmoid_deriv(2.0 * t, k), k + 1);
  }
  return 0.0;
}

void validate_response(const LossFamily& family, double y) {
  if (!std::isfinite(y)) throw std::domain_error("response must be finite");
  switch (family.kind()) {
    case FamilyKind::Logistic:
      if (y != 0.0 && y != 1.0) throw std::domain_error("logistic response must be 0 or 1");
      break;
    case FamilyKind::PoissonLog:
      if (y < 0.0 || std::floor(y) != y) {
        throw std::domain_error("poisson response must be a nonnegative integer");
      }
      break;
    case FamilyKind::GaussianSquare:
      break;
  }
}

double loss_value(const LossFamily& family, double t, double y) {
  return loss_deriv(family, t, y, 0);
}

double loss_deriv(const LossFamily& family, double t, double y, int order) {
  if (order < 0 || order > 3) throw std::invalid_argument("derivative order must be in 0..3");
  validate_response(family, y);
  switch (family.kind()) {
    case FamilyKind::Logistic:
      if (order == 0) return softplus(t) - y * t;
      if (order == 1) return sigmoid(t) - y;
      return sigmoid_deriv(t, order - 1);
    case FamilyKind::PoissonLog: {
      const double e = std::exp(t);
      if (order == 0) return e - y * t;
      if (order == 1) return e - y;
      return e;
    }
    case FamilyKind::GaussianSquare: {
      const Link link = family.link();
      const double r = link_deriv(link, t, 0) - y;
      if (order == 0) return 0.5 * r * r;
      const double f1 = link_deriv(link, t, 1);
      if (order == 1) return r * f1;
      const double f2 = link_deriv(link, t, 2);
      if (order == 2) return f1 * f1 + r * f2;
      return 3.0 * f1 * f2 + r * link_deriv(link, t, 3);
    }
  }
  return 0.0;
}

DerivBounds derivative_bounds(const LossFamily& family, int m) {
  if (m < 0 || m > 2) throw std::invalid_argument("derivative_bounds: m must be in {0, 1, 2}");
  return {m, loss_sup(family, m), loss_sup(family, m + 1)};
}

DerivBounds link_bounds(const LossFamily& family, int m) {
  if (family.kind() != FamilyKind::GaussianSquare) {
    throw std::invalid_argument("link_bounds requires a GaussianSquare family");
  }
  if (m < 0 || m > 2) throw std::invalid_argument("link_bounds: m must be in {0, 1, 2}");
  const Interval iv = family.interval();
  return {m, link_sup(family.link(), iv, m), link_sup(family.link(), iv, m + 1)};
}

DerivBounds remainder_bounds(const LossFamily& family, int m) {
  return family.kind() == FamilyKind::GaussianSquare ? link_bounds(family, m)
                                                      : derivative_bounds(family, m);
}

double kl_distance(const LossFamily& family, double t, double s) {
  require_likelihood(family);
  const double h = s - t;
  if (h == 0.0) return 0.0;
  if (std::abs(h) < kSmallGap) return h * h * kl_ratio_integral(family, t, s);
  switch (family.kind()) {
    case FamilyKind::Logistic:
      return softplus(s) - softplus(t) - sigmoid(t) * h;
    case FamilyKind::PoissonLog:
      return std::exp(t) * (std::expm1(h) - h);
    case FamilyKind::GaussianSquare: {
      const double s0 = family.sigma0();
      return h * h / (2.0 * s0 * s0);
    }
  }
  return 0.0;
}

double curvature_constant(const LossFamily& family, const CurvatureOptions& opts) {
  require_likelihood(family);
  if (opts.grid_points < 2) throw std::invalid_argument("curvature grid needs >= 2 points");
  const Interval iv = family.interval();
  const int n = opts.grid_points;
  const double step = (iv.hi - iv.lo) / (n - 1);
  auto node = [&](int i) { return i + 1 == n ? iv.hi : iv.lo + step * i; };

  double best = std::numeric_limits<double>::infinity();
#pragma omp parallel for reduction(min : best) schedule(static)
  for (int i = 0; i < n; ++i) {
    const double t = node(i);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      best = std::min(best, kl_ratio(family, t, node(j)));
    }
  }
  const double c = best * opts.safety;
  if (!(c >= 1e-12)) {
    throw std::runtime_error("curvature constant below 1e-12 for family " + family.name());
  }
  return c;
}

double fisher_information(const LossFamily& family, double t) {
  require_likelihood(family);
  switch (family.kind()) {
    case FamilyKind::Logistic:
      return sigmoid_deriv(t, 1);
    case FamilyKind::PoissonLog:
      return std::exp(t);
    case FamilyKind::GaussianSquare:
      return 1.0 / (family.sigma0() * family.sigma0());
  }
  return 0.0;
}

double expected_loss(const LossFamily& family, double t, double truth, double noise_variance) {
  switch (family.kind()) {
    case FamilyKind::Logistic:
      return softplus(t) - sigmoid(truth) * t;
    case FamilyKind::PoissonLog:
      return std::exp(t) - std::exp(truth) * t;
    case FamilyKind::GaussianSquare: {
      const double r = link_deriv(family.link(), truth, 0) - link_deriv(family.link(), t, 0);
      return 0.5 * (r * r + noise_variance);
    }
  }
  return 0.0;
}

double expected_loss_deriv(const LossFamily& family, double t, double truth) {
  switch (family.kind()) {
    case FamilyKind::Logistic:
      return sigmoid(t) - sigmoid(truth);
    case FamilyKind::PoissonLog:
      return std::exp(t) - std::exp(truth);
    case FamilyKind::GaussianSquare: {
      const Link link = family.link();
      return (link_deriv(link, t, 0) - link_deriv(link, truth, 0)) * link_deriv(link, t, 1);
    }
  }
  return 0.0;
}

double centered_increment(const LossFamily& family, double t_v, double t_theta, double y,
                          double truth) {
  switch (family.kind()) {
    case FamilyKind::Logistic:
      return (sigmoid(truth) - y) * (t_v - t_theta);
    case FamilyKind::PoissonLog:
      return (std::exp(truth) - y) * (t_v - t_theta);
    case FamilyKind::GaussianSquare: {
      const Link link = family.link();
      const double eps = y - link_deriv(link, truth, 0);
      return -eps * (link_deriv(link, t_v, 0) - link_deriv(link, t_theta, 0));
    }
  }
  return 0.0;
}

}  // namespace lslasso
