#include "lslasso/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "lslasso/parallel.hpp"
#include "lslasso/random.hpp"

namespace lslasso {

namespace {

constexpr int kMaxVertexDim = 12;

class RatioEvaluator {
 public:
  RatioEvaluator(const Dataset& data, const Eigen::VectorXd& theta, const LossFamily& family,
                 const Eigen::VectorXd& weights)
      : data_(data), theta_(theta), family_(family), weights_(weights) {
    t_theta_ = data.x.values() * theta;
    Eigen::VectorXd centered(data.y.size());
    for (Eigen::Index i = 0; i < data.y.size(); ++i) {
      centered[i] = loss_deriv(family, t_theta_[i], data.y[i], 1) -
                    expected_loss_deriv(family, t_theta_[i], data.index[i]);
    }
    linear_ = data.x.values().transpose() * centered;
  }

  const Eigen::VectorXd& linear() const { return linear_; }

  // false when v = theta (ratio undefined)
  bool eval(const Eigen::VectorXd& v, double& ratio, double& xi) const {
    const Eigen::VectorXd u = v - theta_;
    const double den = weights_.dot(u.cwiseAbs());
    if (!(den > 0.0)) return false;
    const Eigen::VectorXd t = data_.x.values() * v;
    double delta = 0.0;
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      delta += centered_increment(family_, t[i], t_theta_[i], data_.y[i], data_.index[i]);
    }
    ratio = std::abs(delta) / den;
    xi = std::abs(delta - linear_.dot(u)) / den;
    return true;
  }

 private:
  const Dataset& data_;
  const Eigen::VectorXd& theta_;
  const LossFamily& family_;
  const Eigen::VectorXd& weights_;
  Eigen::VectorXd t_theta_;
  Eigen::VectorXd linear_;
};

void require_gaussian(const LossFamily& family) {
  if (family.kind() != FamilyKind::GaussianSquare) {
    throw std::invalid_argument("Gaussian regime needs a GaussianSquare family");
  }
}

struct Prepared {
  DesignMatrix x;
  Eigen::VectorXd d;
  double R = 0.0;
};

Prepared prepare(const SimSpec& spec) {
  DesignMatrix x = make_design(spec);
  validate_spec(spec, x);
  Eigen::VectorXd d = column_scales(x);
  const double R = weighted_l1_diameter(spec.domain, d).weighted;
  return {std::move(x), std::move(d), R};
}

template <typename Fn>
McReport run_trials(const std::string& name, const SimSpec& spec, double nominal, int threads,
                    Fn&& per_trial) {
  McReport rep;
  rep.check = name;
  rep.nominal_q = nominal;
  rep.records = map_indices<TrialRecord>(static_cast<int>(spec.trials), threads,
                                         [&](int t) { return per_trial(t); });
  finalize(rep);
  return rep;
}

void add_statistic_summary(McReport& rep) {
  std::vector<double> s;
  s.reserve(rep.records.size());
  for (const auto& r : rep.records) s.push_back(r.statistic);
  rep.details.emplace_back("median_statistic", median(s));
  rep.details.emplace_back("max_statistic", *std::max_element(s.begin(), s.end()));
}

}  // namespace

std::string to_string(DesignKind kind) {
  switch (kind) {
    case DesignKind::Rademacher:
      return "rademacher";
    case DesignKind::UniformBox:
      return "uniform";
    case DesignKind::FromFile:
      return "file";
  }
  return "";
}

Eigen::VectorXd alternating_theta(long p, long s0, double magnitude) {
  if (s0 < 0 || s0 > p) throw std::invalid_argument("need 0 <= s0 <= p");
  Eigen::VectorXd th = Eigen::VectorXd::Zero(p);
  for (long j = 0; j < s0; ++j) th[j] = (j % 2 == 0) ? magnitude : -magnitude;
  return th;
}

Interval padded_index_range(const DesignMatrix& x, const ParamDomain& dom, double pad) {
  const Interval r = index_range(x, dom);
  return {r.lo - pad, r.hi + pad};
}

DesignMatrix make_design(const SimSpec& spec) {
  if (spec.design == DesignKind::FromFile) {
    if (!spec.design_values) throw std::invalid_argument("FromFile design without values");
    return *spec.design_values;
  }
  if (spec.N < 1 || spec.p < 1) throw std::invalid_argument("need N >= 1 and p >= 1");
  CounterRng rng(spec.seed, 0, Stream::Design);
  Eigen::MatrixXd m(spec.N, spec.p);
  for (long i = 0; i < spec.N; ++i) {
    for (long j = 0; j < spec.p; ++j) {
      if (spec.design == DesignKind::Rademacher) {
        m(i, j) = (rng() & 1u) ? 1.0 : -1.0;
      } else {
        m(i, j) = 2.0 * rng.uniform01() - 1.0;
      }
    }
  }
  return DesignMatrix(std::move(m));
}

void validate_spec(const SimSpec& spec, const DesignMatrix& x) {
  if (x.rows() != spec.N || x.cols() != spec.p) {
    throw std::invalid_argument("design shape does not match N, p");
  }
  if (spec.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (spec.s0 < 0 || spec.s0 > spec.p) throw std::invalid_argument("need 0 <= s0 <= p");
  if (spec.theta_star.size() != spec.p || spec.domain.dim() != spec.p) {
    throw std::invalid_argument("theta_star / domain dimension != p");
  }
  if (!spec.domain.contains(spec.theta_star)) {
    throw std::invalid_argument("infeasible theta_star: outside the box");
  }
  const long nnz = (spec.theta_star.array() != 0.0).count();
  if (nnz != spec.s0) {
    throw std::invalid_argument("theta_star has " + std::to_string(nnz) + " nonzeros, s0 = " +
                                std::to_string(spec.s0));
  }
  if (spec.variances.size() != 0) {
    if (spec.variances.size() != spec.N) throw std::invalid_argument("variances length != N");
    if (!spec.variances.allFinite() || (spec.variances.array() < 0.0).any()) {
      throw std::invalid_argument("variances must be finite and >= 0");
    }
  }
  const Feasibility f = check_feasibility(x, spec.domain, spec.family.interval());
  if (!f.ok) throw std::invalid_argument("infeasible theta_star / box: " + f.diagnostic);
}

Eigen::VectorXd row_variances(const SimSpec& spec) {
  if (spec.variances.size() != 0) return spec.variances;
  const double s = spec.family.sigma0();
  return Eigen::VectorXd::Constant(spec.N, s * s);
}

Dataset simulate(const SimSpec& spec, const DesignMatrix& x, std::uint64_t trial) {
  Dataset ds{x, Eigen::VectorXd(x.rows()), x.values() * spec.theta_star};
  CounterRng rng(spec.seed, trial, Stream::Noise);
  const LossFamily& fam = spec.family;
  switch (fam.kind()) {
    case FamilyKind::Logistic:
      for (Eigen::Index i = 0; i < ds.y.size(); ++i) {
        ds.y[i] = rng.uniform01() < sigmoid(ds.index[i]) ? 1.0 : 0.0;
      }
      break;
    case FamilyKind::PoissonLog:
      for (Eigen::Index i = 0; i < ds.y.size(); ++i) {
        std::poisson_distribution<long> pois(std::exp(ds.index[i]));
        ds.y[i] = static_cast<double>(pois(rng));
      }
      break;
    case FamilyKind::GaussianSquare: {
      const Eigen::VectorXd var = row_variances(spec);
      std::normal_distribution<double> normal;
      for (Eigen::Index i = 0; i < ds.y.size(); ++i) {
        ds.y[i] = link_deriv(fam.link(), ds.index[i], 0) + std::sqrt(var[i]) * normal(rng);
      }
      break;
    }
  }
  return ds;
}

Dataset simulate(const SimSpec& spec, std::uint64_t trial) {
  const DesignMatrix x = make_design(spec);
  validate_spec(spec, x);
  return simulate(spec, x, trial);
}

EmpiricalProcessSample empirical_lsl_ratio(const Dataset& data, const Eigen::VectorXd& theta,
                                           const LossFamily& family, const ParamDomain& dom,
                                           const Eigen::VectorXd& weights,
                                           const SearchBudget& budget, std::uint64_t seed,
                                           std::uint64_t trial) {
  const Eigen::Index p = dom.dim();
  if (theta.size() != p || weights.size() != p || data.x.cols() != p) {
    throw std::invalid_argument("dimension mismatch in empirical_lsl_ratio");
  }
  if (!(weights.array() > 0.0).all()) throw std::invalid_argument("weights must be > 0");
  if (!dom.contains(theta)) throw std::invalid_argument("theta outside the box");
  if (budget.random < 0 || budget.local < 0) throw std::invalid_argument("negative budget");

  const RatioEvaluator ev(data, theta, family, weights);
  EmpiricalProcessSample out;
  out.argmax_v = theta;
  out.xi1_value = (ev.linear().array().abs() / weights.array()).maxCoeff();

  double ratio = 0.0, xi = 0.0;
  auto probe = [&](const Eigen::VectorXd& v) -> double {
    if (!ev.eval(v, ratio, xi)) return -1.0;
    ++out.evaluations;
    if (ratio > out.sup_ratio) {
      out.sup_ratio = ratio;
      out.argmax_v = v;
    }
    out.sup_xi = std::max(out.sup_xi, xi);
    return ratio;
  };

  // anchors
  double anchor_best = -1.0;
  Eigen::VectorXd anchor = theta;
  auto probe_anchor = [&](const Eigen::VectorXd& v) {
    const double r = probe(v);
    if (r > anchor_best) {
      anchor_best = r;
      anchor = v;
    }
  };
  if (p <= kMaxVertexDim) {
    Eigen::VectorXd v(p);
    for (long mask = 0; mask < (1L << p); ++mask) {
      for (Eigen::Index j = 0; j < p; ++j) v[j] = (mask >> j) & 1 ? dom.upper()[j] : dom.lower()[j];
      probe_anchor(v);
    }
  }
  for (Eigen::Index j = 0; j < p; ++j) {
    Eigen::VectorXd v = theta;
    v[j] = dom.lower()[j];
    probe_anchor(v);
    v[j] = dom.upper()[j];
    probe_anchor(v);
  }

  CounterRng rng(seed, trial, Stream::Search);
  const Eigen::VectorXd width = dom.upper() - dom.lower();
  Eigen::VectorXd v(p);
  for (long k = 0; k < budget.random; ++k) {
    for (Eigen::Index j = 0; j < p; ++j) v[j] = dom.lower()[j] + rng.uniform01() * width[j];
    probe(v);
  }

  if (anchor_best >= 0.0) {
    Eigen::VectorXd cur = anchor;
    double cur_r = anchor_best;
    Eigen::VectorXd delta = width / 4.0;
    bool improved = false;
    for (long step = 0; step < budget.local; ++step) {
      const Eigen::Index j = step % p;
      const double cands[3] = {std::min(cur[j] + delta[j], dom.upper()[j]),
                               std::max(cur[j] - delta[j], dom.lower()[j]), theta[j]};
      double best_r = cur_r, best_c = cur[j];
      for (double c : cands) {
        if (c == cur[j]) continue;
        Eigen::VectorXd w = cur;
        w[j] = c;
        const double r = probe(w);
        if (r > best_r) {
          best_r = r;
          best_c = c;
        }
      }
      if (best_r > cur_r) {
        cur[j] = best_c;
        cur_r = best_r;
        improved = true;
      }
      if (j == p - 1) {
        if (!improved) delta /= 2.0;
        improved = false;
      }
    }
  }
  return out;
}

double xi1_bounded(const Dataset& data, const Eigen::VectorXd& theta, const LossFamily& family,
                   const Eigen::VectorXd& d) {
  const RatioEvaluator ev(data, theta, family, d);
  return (ev.linear().array().abs() / d.array()).maxCoeff();
}

double xi1_gaussian(const Dataset& data, const Eigen::VectorXd& theta, const LossFamily& family,
                    const Eigen::VectorXd& w, double F1) {
  require_gaussian(family);
  const Eigen::VectorXd t = data.x.values() * theta;
  Eigen::VectorXd a(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    const double eps = data.y[i] - link_deriv(family.link(), data.index[i], 0);
    a[i] = eps * link_deriv(family.link(), t[i], 1);
  }
  const Eigen::VectorXd s = data.x.values().transpose() * a;
  const double scale = family.sigma0() * F1;
  double best = 0.0;
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    if (w[j] > 0.0 && scale > 0.0) best = std::max(best, std::abs(s[j]) / (scale * w[j]));
  }
  return best;
}

double McReport::detail(const std::string& key) const {
  for (const auto& [k, v] : details) {
    if (k == key) return v;
  }
  throw std::out_of_range("no report detail named " + key);
}

void finalize(McReport& report) {
  report.trials = static_cast<long>(report.records.size());
  report.violations = 0;
  for (const auto& r : report.records) report.violations += r.violated ? 1 : 0;
  const double n = std::max<double>(1.0, report.trials);
  const double q = report.nominal_q;
  report.violation_rate = report.violations / n;
  report.binomial_slack = 3.0 * std::sqrt(q * (1.0 - q) / n);
  report.pass = report.violation_rate <= q + report.binomial_slack;
}

McReport rescore(const McReport& report, double scale) {
  McReport out = report;
  for (auto& r : out.records) {
    r.threshold *= scale;
    r.violated = r.statistic > r.threshold;
  }
  finalize(out);
  return out;
}

McReport verify_tail_bounded(const SimSpec& spec, double q, double qprime,
                             const HarnessOptions& opts) {
  const Prepared pr = prepare(spec);
  const DerivBounds db = derivative_bounds(spec.family, 1);
  const LslConstants c = bounded_constants(pr.x, pr.d, db.F_m, db.F_mplus1, pr.R, 1);
  const double M = coefficient_bound_m1(c, db.F_m, spec.N, spec.p, q, qprime);
  const double thr = M * opts.threshold_scale;

  McReport rep = run_trials("tail_bounded", spec, q + qprime, opts.threads, [&](int t) {
    const Dataset ds = simulate(spec, pr.x, t);
    const auto s = empirical_lsl_ratio(ds, spec.theta_star, spec.family, spec.domain, pr.d,
                                       opts.budget, spec.seed, t);
    return TrialRecord{t, s.sup_ratio, thr, s.sup_ratio > thr};
  });
  rep.details = {{"F1", db.F_m}, {"F2", db.F_mplus1}, {"R", pr.R},   {"phi", c.phi},
                 {"psi", c.psi}, {"A", c.A},          {"B", c.B},    {"C", c.C.value_or(0.0)},
                 {"M", M},       {"threshold", thr}};
  add_statistic_summary(rep);
  return rep;
}

McReport verify_tail_gaussian(const SimSpec& spec, double q, double qprime,
                              const HarnessOptions& opts) {
  require_gaussian(spec.family);
  const Prepared pr = prepare(spec);
  const DerivBounds lb = link_bounds(spec.family, 1);
  const LslConstants c = gaussian_constants(pr.x, pr.d, spec.family.sigma0(), row_variances(spec),
                                            lb.F_m, lb.F_mplus1, pr.R, 1);
  const double M = gaussian_coefficient_bound_m1(c, lb.F_m, spec.p, q, qprime);
  const double thr = M * opts.threshold_scale;

  McReport rep = run_trials("tail_gaussian", spec, q + qprime, opts.threads, [&](int t) {
    const Dataset ds = simulate(spec, pr.x, t);
    const auto s = empirical_lsl_ratio(ds, spec.theta_star, spec.family, spec.domain,
                                       c.lambda_weights, opts.budget, spec.seed, t);
    return TrialRecord{t, s.sup_ratio, thr, s.sup_ratio > thr};
  });
  rep.details = {{"F1", lb.F_m},   {"F2", lb.F_mplus1},
                 {"R", pr.R},      {"sigma0", spec.family.sigma0()},
                 {"phi", c.phi},   {"psi", c.psi},
                 {"A", c.A},       {"B", c.B},
                 {"M", M},         {"threshold", thr},
                 {"max_lambda_weight", c.lambda_weights.maxCoeff()}};
  add_statistic_summary(rep);
  return rep;
}

McReport verify_xi1(const SimSpec& spec, double q, Regime regime, const HarnessOptions& opts) {
  const Prepared pr = prepare(spec);
  if (regime == Regime::Bounded) {
    const double F1 = derivative_bounds(spec.family, 1).F_m;
    const double thr = xi1_threshold_bounded(F1, spec.N, spec.p, q) * opts.threshold_scale;
    McReport rep = run_trials("xi1_bounded", spec, q, opts.threads, [&](int t) {
      const Dataset ds = simulate(spec, pr.x, t);
      const double s = xi1_bounded(ds, spec.theta_star, spec.family, pr.d);
      return TrialRecord{t, s, thr, s > thr};
    });
    rep.details = {{"F1", F1}, {"threshold", thr}};
    add_statistic_summary(rep);
    return rep;
  }
  require_gaussian(spec.family);
  const DerivBounds lb = link_bounds(spec.family, 1);
  const LslConstants c = gaussian_constants(pr.x, pr.d, spec.family.sigma0(), row_variances(spec),
                                            lb.F_m, lb.F_mplus1, pr.R, 1);
  const double thr = xi1_threshold_gaussian(spec.p, q) * opts.threshold_scale;
  McReport rep = run_trials("xi1_gaussian", spec, q, opts.threads, [&](int t) {
    const Dataset ds = simulate(spec, pr.x, t);
    const double s = xi1_gaussian(ds, spec.theta_star, spec.family, c.w, lb.F_m);
    return TrialRecord{t, s, thr, s > thr};
  });
  const long excluded = (c.w.array() == 0.0).count();
  rep.details = {{"F1", lb.F_m}, {"threshold", thr}, {"excluded_columns", double(excluded)}};
  add_statistic_summary(rep);
  return rep;
}

MassartReport verify_massart(const Eigen::MatrixXd& columns, long trials, std::uint64_t seed,
                             int threads) {
  if (trials < 2) throw std::invalid_argument("need at least 2 trials");
  if (columns.rows() < 1 || columns.cols() < 1) throw std::invalid_argument("empty columns");
  const double p = double(columns.cols());
  MassartReport rep;
  rep.trials = trials;
  rep.bound = 2.0 * std::sqrt(std::log(2.0 * p)) * columns.colwise().norm().maxCoeff();
  rep.records = map_indices<TrialRecord>(static_cast<int>(trials), threads, [&](int t) {
    CounterRng rng(seed, t, Stream::Noise);
    std::normal_distribution<double> normal;
    Eigen::VectorXd w(columns.rows());
    for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = normal(rng);
    const double s = (columns.transpose() * w).cwiseAbs().maxCoeff();
    return TrialRecord{t, s, rep.bound, s > rep.bound};
  });
  double sum = 0.0, sq = 0.0;
  for (const auto& r : rep.records) sum += r.statistic;
  rep.mean = sum / trials;
  for (const auto& r : rep.records) sq += (r.statistic - rep.mean) * (r.statistic - rep.mean);
  rep.standard_error = std::sqrt(sq / (trials - 1) / trials);
  rep.pass = rep.mean <= rep.bound + 3.0 * rep.standard_error;
  return rep;
}

double theoretical_M_q(const LossFamily& family, const DesignMatrix& x, const ParamDomain& dom,
                       const Eigen::VectorXd& variances, double q1, double q2) {
  const Eigen::VectorXd dv = column_scales(x);
  const double R = weighted_l1_diameter(dom, dv).weighted;
  const long N = x.rows(), p = x.cols();
  if (family.kind() == FamilyKind::GaussianSquare) {
    const DerivBounds lb = link_bounds(family, 1);
    const LslConstants c =
        gaussian_constants(x, dv, family.sigma0(), variances, lb.F_m, lb.F_mplus1, R, 1);
    return gaussian_coefficient_bound_m1(c, lb.F_m, p, q1, q2) * c.lambda_weights.maxCoeff() /
           dv.maxCoeff();
  }
  const DerivBounds db = derivative_bounds(family, 1);
  const LslConstants c = bounded_constants(x, dv, db.F_m, db.F_mplus1, R, 1);
  return coefficient_bound_m1(c, db.F_m, N, p, q1, q2);
}

L2Setup l2_setup(const SimSpec& spec, const DesignMatrix& x, double q1, double q2, double K,
                 const ReOptions& re_opts) {
  if (!spec.family.is_convex()) throw std::invalid_argument("error bound needs a convex family");
  const Eigen::VectorXd dv = column_scales(x);
  L2Setup s;
  s.d = dv.maxCoeff();
  const ReCondition re = re_condition_holds(x, static_cast<int>(spec.s0), K, re_opts);
  s.kappa = re.result.kappa;
  if (!re.holds) {
    throw std::runtime_error("restricted eigenvalue condition fails: kappa(" +
                             std::to_string(2 * spec.s0) + ", K) = " + std::to_string(s.kappa));
  }
  s.c_gamma = c_gamma_from_family(spec.family);
  s.regime = spec.family.kind() == FamilyKind::GaussianSquare ? Regime::Gaussian : Regime::Bounded;
  s.M_q = theoretical_M_q(spec.family, x, spec.domain, row_variances(spec), q1, q2);
  s.lambda = lambda_from_theory(K, s.M_q, s.d);
  s.rhs = error_bound_rhs(s.M_q, spec.s0, spec.N, K, s.d, s.c_gamma, s.kappa);
  return s;
}

McReport verify_l2_bound(const SimSpec& spec, double q1, double q2, double K,
                         const HarnessOptions& opts, const SolverOptions& solver,
                         const ReOptions& re_opts) {
  const Prepared pr = prepare(spec);
  const L2Setup s = l2_setup(spec, pr.x, q1, q2, K, re_opts);
  const double thr = s.rhs * opts.threshold_scale;

  std::vector<double> kkt(spec.trials, 0.0);
  McReport rep = run_trials("l2_error", spec, q1 + q2, opts.threads, [&](int t) {
    const Dataset ds = simulate(spec, pr.x, t);
    const auto problem = LassoProblem::with_scalar_penalty(ds.x, ds.y, spec.family, spec.domain,
                                                           s.lambda, s.d);
    const LassoFit f = fit(problem, solver);
    kkt[t] = f.kkt_residual;
    const double err = (f.theta_hat - spec.theta_star).norm();
    return TrialRecord{t, err, thr, err > thr};
  });
  rep.details = {{"kappa", s.kappa},  {"c_gamma", s.c_gamma},  {"d", s.d},
                 {"M_q", s.M_q},      {"lambda", s.lambda},    {"rhs", s.rhs},
                 {"threshold", thr},  {"max_kkt_residual", *std::max_element(kkt.begin(), kkt.end())}};
  add_statistic_summary(rep);
  return rep;
}

ScalingReport scaling_study(const SimSpec& base, const std::vector<long>& Ns, double q1, double q2,
                            double K, const HarnessOptions& opts, const SolverOptions& solver,
                            const ReOptions& re_opts, double ratio_lo, double ratio_hi) {
  if (Ns.size() < 2) throw std::invalid_argument("scaling study needs at least two N values");
  if (base.design == DesignKind::FromFile) {
    throw std::invalid_argument("scaling study needs a generated design");
  }
  ScalingReport out;
  for (long n : Ns) {
    SimSpec spec = base;
    spec.N = n;
    if (spec.variances.size() != 0) throw std::invalid_argument("scaling study uses sigma0^2 noise");
    const McReport rep = verify_l2_bound(spec, q1, q2, K, opts, solver, re_opts);
    out.rows.push_back({n, rep.detail("median_statistic"), rep.detail("rhs"), rep.detail("lambda")});
  }
  out.decreasing = true;
  out.pass = true;
  for (size_t k = 0; k + 1 < out.rows.size(); ++k) {
    const double r = out.rows[k].median_error / out.rows[k + 1].median_error;
    out.ratios.push_back(r);
    if (!(out.rows[k + 1].median_error < out.rows[k].median_error)) out.decreasing = false;
    if (!(r >= ratio_lo && r <= ratio_hi)) out.pass = false;
  }
  out.pass = out.pass && out.decreasing;
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty sample");
  const size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + n / 2, v.end());
  const double hi = v[n / 2];
  if (n % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + n / 2);
  return 0.5 * (lo + hi);
}

}  // namespace lslasso
