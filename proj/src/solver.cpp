#include "lslasso/solver.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "lslasso/random.hpp"

namespace lslasso {

namespace {

constexpr int kPowerIterations = 200;
constexpr double kTieTolerance = 1e-12;

double spectral_norm_squared(const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd g = x.transpose() * x;
  Eigen::VectorXd u = Eigen::VectorXd::Ones(g.rows()).normalized();
  double est = 0.0;
  for (int k = 0; k < kPowerIterations; ++k) {
    Eigen::VectorXd w = g * u;
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    const double next = u.dot(w);
    u = w / nw;
    if (std::abs(next - est) <= 1e-12 * next) {
      est = next;
      break;
    }
    est = next;
  }
  return est;
}

struct Run {
  Eigen::VectorXd v;
  double objective = 0.0;
  int iterations = 0;
};

Run descend(const LassoProblem& pb, Eigen::VectorXd v, double base_step,
            const SolverOptions& opts) {
  Eigen::VectorXd grad;
  double smooth = pb.smooth_value(v, &grad);
  double value = smooth + pb.penalty().dot(v.cwiseAbs());
  if (!std::isfinite(value)) throw std::runtime_error("non-finite objective at starting point");

  double step = base_step;
  const double max_step = 1e6 * base_step;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    const Eigen::VectorXd fixed = prox_step(pb, v - base_step * grad, base_step);
    if ((v - fixed).norm() <= opts.kkt_tol) break;

    step = std::min(2.0 * step, max_step);
    bool accepted = false;
    Eigen::VectorXd next, next_grad;
    double next_value = 0.0;
    while (step >= 1e-30 * base_step) {
      next = prox_step(pb, v - step * grad, step);
      const double next_smooth = pb.smooth_value(next, &next_grad);
      next_value = next_smooth + pb.penalty().dot(next.cwiseAbs());
      if (!std::isfinite(next_value)) throw std::runtime_error("non-finite objective encountered");
      const double moved = (next - v).squaredNorm();
      if (next_value <= value - opts.sufficient_decrease / step * moved) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    v = std::move(next);
    grad = std::move(next_grad);
    value = next_value;
  }
  return {std::move(v), value, it};
}

// Halton points with a seeded Cranley-Patterson rotation, mapped into the box.
std::vector<Eigen::VectorXd> multistart_points(const ParamDomain& dom, int count,
                                               std::uint64_t seed) {
  static constexpr std::array<int, 32> kPrimes = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31,
                                                  37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79,
                                                  83, 89, 97, 101, 103, 107, 109, 113, 127, 131};
  const Eigen::Index p = dom.dim();
  CounterRng rng(seed, 0, Stream::Solver);
  Eigen::VectorXd shift(p);
  for (Eigen::Index j = 0; j < p; ++j) shift[j] = rng.uniform01();

  std::vector<Eigen::VectorXd> pts;
  pts.push_back(dom.project(Eigen::VectorXd::Zero(p)));
  for (int k = 1; static_cast<int>(pts.size()) < count; ++k) {
    Eigen::VectorXd u(p);
    for (Eigen::Index j = 0; j < p; ++j) {
      const int base = j < static_cast<Eigen::Index>(kPrimes.size()) ? kPrimes[j] : 2 + 2 * j + 1;
      double f = 1.0, r = 0.0;
      for (int i = k; i > 0; i /= base) {
        f /= base;
        r += f * (i % base);
      }
      u[j] = std::fmod(r + shift[j], 1.0);
    }
    pts.push_back(dom.lower().array() + u.array() * (dom.upper() - dom.lower()).array());
  }
  return pts;
}

bool better(const Run& a, const Run& b) {
  if (a.objective < b.objective - kTieTolerance) return true;
  if (a.objective > b.objective + kTieTolerance) return false;
  const double la = a.v.lpNorm<1>(), lb = b.v.lpNorm<1>();
  if (la != lb) return la < lb;
  for (Eigen::Index j = 0; j < a.v.size(); ++j) {
    if (a.v[j] != b.v[j]) return a.v[j] < b.v[j];
  }
  return false;
}

}  // namespace

LassoProblem::LassoProblem(DesignMatrix x, Eigen::VectorXd y, LossFamily family,
                           ParamDomain domain, Eigen::VectorXd penalty)
    : x_(std::move(x)),
      y_(std::move(y)),
      family_(family),
      domain_(std::move(domain)),
      penalty_(std::move(penalty)) {
  if (y_.size() != x_.rows()) throw std::invalid_argument("response length != design rows");
  if (domain_.dim() != x_.cols() || penalty_.size() != x_.cols()) {
    throw std::invalid_argument("domain / penalty dimension != design columns");
  }
  if (!(penalty_.array() > 0.0).all() || !penalty_.allFinite()) {
    throw std::invalid_argument("penalty weights must be positive and finite");
  }
  for (Eigen::Index i = 0; i < y_.size(); ++i) validate_response(family_, y_[i]);
  const Feasibility f = check_feasibility(x_, domain_, family_.interval());
  if (!f.ok) throw std::invalid_argument("infeasible problem: " + f.diagnostic);
}

LassoProblem LassoProblem::with_scalar_penalty(DesignMatrix x, Eigen::VectorXd y,
                                               LossFamily family, ParamDomain domain,
                                               double lambda, double d) {
  const Eigen::Index p = x.cols();
  return LassoProblem(std::move(x), std::move(y), family, std::move(domain),
                      Eigen::VectorXd::Constant(p, lambda * d));
}

double LassoProblem::smooth_value(const Eigen::VectorXd& v, Eigen::VectorXd* grad) const {
  const Eigen::VectorXd t = x_.values() * v;
  double sum = 0.0;
  Eigen::VectorXd g1(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    sum += loss_deriv(family_, t[i], y_[i], 0);
    if (grad) g1[i] = loss_deriv(family_, t[i], y_[i], 1);
  }
  if (grad) *grad = x_.values().transpose() * g1;
  return sum;
}

double LassoProblem::objective(const Eigen::VectorXd& v) const {
  return smooth_value(v) + penalty_.dot(v.cwiseAbs());
}

Eigen::VectorXd prox_step(const LassoProblem& problem, const Eigen::VectorXd& z, double step) {
  const Eigen::ArrayXd thr = step * problem.penalty().array();
  const Eigen::ArrayXd shrunk = z.array().sign() * (z.array().abs() - thr).max(0.0);
  return problem.domain().project(shrunk.matrix());
}

double gradient_lipschitz_estimate(const LassoProblem& problem) {
  const double curvature = derivative_bounds(problem.family(), 1).F_mplus1;
  const double l = curvature * spectral_norm_squared(problem.x().values());
  return l > 0.0 ? l : 1.0;
}

double kkt_residual(const LassoProblem& problem, const Eigen::VectorXd& v) {
  const double step = 1.0 / gradient_lipschitz_estimate(problem);
  Eigen::VectorXd grad;
  problem.smooth_value(v, &grad);
  return (v - prox_step(problem, v - step * grad, step)).norm();
}

LassoFit fit(const LassoProblem& problem, const SolverOptions& opts) {
  if (opts.max_iter < 1 || opts.restarts < 1) {
    throw std::invalid_argument("max_iter and restarts must be >= 1");
  }
  const double base_step = 1.0 / gradient_lipschitz_estimate(problem);
  const int starts = problem.family().is_convex() ? 1 : opts.restarts;
  const auto points = multistart_points(problem.domain(), starts, opts.seed);

  Run best;
  bool have = false;
  for (const auto& start : points) {
    Run r = descend(problem, start, base_step, opts);
    if (!have || better(r, best)) {
      best = std::move(r);
      have = true;
    }
  }

  LassoFit out;
  out.theta_hat = best.v;
  out.objective = best.objective;
  out.iterations = best.iterations;
  out.restarts_used = starts;
  out.kkt_residual = kkt_residual(problem, best.v);
  out.converged = out.kkt_residual <= opts.kkt_tol;
  return out;
}

double lambda_from_theory(double K, double M_q, double d) {
  if (!(K > 1.0)) throw std::invalid_argument("K must be > 1");
  if (!(M_q >= 0.0) || !(d > 0.0)) throw std::invalid_argument("need M_q >= 0 and d > 0");
  return (K + 1.0) * M_q * d / (K - 1.0);
}

double error_bound_rhs(double M_q, long s0, long N, double K, double d, double C_gamma,
                       double kappa) {
  if (!(K > 1.0)) throw std::invalid_argument("K must be > 1");
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be > 0");
  if (!(C_gamma > 0.0)) throw std::invalid_argument("C_gamma must be > 0");
  if (s0 < 0 || N < 1) throw std::invalid_argument("need s0 >= 0 and N >= 1");
  return M_q * std::sqrt(double(s0)) / double(N) * 2.0 * std::sqrt(2.0 + K * K) * K * d /
         (C_gamma * kappa * kappa * (K - 1.0));
}

double c_gamma_from_family(const LossFamily& family) {
  if (family.kind() == FamilyKind::GaussianSquare && family.link() == Link::Identity) {
    return 0.5;
  }
  return curvature_constant(family);
}

}  // namespace lslasso
