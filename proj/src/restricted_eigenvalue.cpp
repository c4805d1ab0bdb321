#include "lslasso/restricted_eigenvalue.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "lslasso/parallel.hpp"
#include "lslasso/random.hpp"

namespace lslasso {

namespace {

long binomial(long n, long k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long r = 1;
  for (long i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > 1'000'000'000L) return r;
  }
  return r;
}

std::vector<std::vector<int>> all_supports(int p, int s) {
  std::vector<std::vector<int>> out;
  std::vector<int> j(s);
  std::iota(j.begin(), j.end(), 0);
  while (true) {
    out.push_back(j);
    int k = s - 1;
    while (k >= 0 && j[k] == p - s + k) --k;
    if (k < 0) break;
    ++j[k];
    for (int i = k + 1; i < s; ++i) j[i] = j[i - 1] + 1;
  }
  return out;
}

std::vector<std::vector<int>> random_supports(int p, int s, int count, std::uint64_t seed) {
  CounterRng rng(seed, 0, Stream::Search);
  std::set<std::vector<int>> seen;
  std::vector<std::vector<int>> out;
  std::vector<int> idx(p);
  for (int draw = 0; draw < count; ++draw) {
    std::iota(idx.begin(), idx.end(), 0);
    for (int k = 0; k < s; ++k) {
      std::uniform_int_distribution<int> pick(k, p - 1);
      std::swap(idx[k], idx[pick(rng)]);
    }
    std::vector<int> j(idx.begin(), idx.begin() + s);
    std::sort(j.begin(), j.end());
    if (seen.insert(j).second) out.push_back(std::move(j));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::uint32_t support_key(const std::vector<int>& j) {
  std::uint32_t h = 2166136261u;
  for (int v : j) {
    h ^= static_cast<std::uint32_t>(v);
    h *= 16777619u;
  }
  return h;
}

struct Split {
  std::vector<int> in, out;
};

Split split(int p, const std::vector<int>& support) {
  Split sp;
  sp.in = support;
  std::vector<char> mark(p, 0);
  for (int j : support) mark[j] = 1;
  for (int j = 0; j < p; ++j) {
    if (!mark[j]) sp.out.push_back(j);
  }
  return sp;
}

// Puts v on the feasible set: ||v_J||_2 = 1 and v_{J^c} in the K-cone.
bool make_feasible(Eigen::VectorXd& v, const Split& sp, double K) {
  double nj = 0.0;
  for (int j : sp.in) nj += v[j] * v[j];
  nj = std::sqrt(nj);
  if (!(nj > 0.0)) return false;
  double l1 = 0.0;
  for (int j : sp.in) {
    v[j] /= nj;
    l1 += std::abs(v[j]);
  }
  if (sp.out.empty()) return true;
  Eigen::VectorXd b(sp.out.size());
  for (size_t k = 0; k < sp.out.size(); ++k) b[k] = v[sp.out[k]];
  b = project_l1_ball(b, K * l1);
  for (size_t k = 0; k < sp.out.size(); ++k) v[sp.out[k]] = b[k];
  return true;
}

struct SupportResult {
  double value = std::numeric_limits<double>::infinity();  // v'Gv at ||v_J|| = 1
  Eigen::VectorXd v;
};

SupportResult solve_support(const Eigen::MatrixXd& G, double lmax, const Eigen::VectorXd& bottom,
                            const std::vector<int>& support, double K, const ReOptions& opts) {
  const int p = static_cast<int>(G.rows());
  const Split sp = split(p, support);
  const double step = 1.0 / (2.0 * lmax);

  std::vector<Eigen::VectorXd> starts;
  starts.push_back(bottom);
  {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(p);
    const int s = static_cast<int>(sp.in.size());
    Eigen::MatrixXd gj(s, s);
    for (int a = 0; a < s; ++a)
      for (int b = 0; b < s; ++b) gj(a, b) = G(sp.in[a], sp.in[b]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gj);
    for (int a = 0; a < s; ++a) v[sp.in[a]] = es.eigenvectors()(a, 0);
    starts.push_back(v);
  }
  CounterRng rng(opts.seed, support_key(support), Stream::Search);
  std::normal_distribution<double> normal;
  for (int k = 0; k < opts.inits; ++k) {
    Eigen::VectorXd v(p);
    for (int j = 0; j < p; ++j) v[j] = normal(rng);
    starts.push_back(v);
  }

  SupportResult best;
  for (auto& v : starts) {
    if (!make_feasible(v, sp, K)) {
      for (int j : sp.in) v[j] = 1.0;
      make_feasible(v, sp, K);
    }
    double val = std::max(0.0, v.dot(G * v));
    if (val < best.value) best = {val, v};
    for (int it = 0; it < opts.iterations; ++it) {
      Eigen::VectorXd next = v - step * 2.0 * (G * v);
      if (!make_feasible(next, sp, K)) break;
      const double moved = (next - v).norm();
      v = std::move(next);
      val = std::max(0.0, v.dot(G * v));
      if (val < best.value) best = {val, v};
      if (moved < 1e-13) break;
    }
  }
  return best;
}

}  // namespace

std::string to_string(ReMode mode) {
  return mode == ReMode::ExactEnumeration ? "ExactEnumeration" : "HeuristicLowerSearch";
}

bool exact_enumeration_allowed(long p, long s) {
  return p <= 16 && binomial(p, s) <= kMaxEnumeratedSupports;
}

Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& z, double radius) {
  if (radius < 0.0) throw std::invalid_argument("negative l1 radius");
  if (z.lpNorm<1>() <= radius) return z;
  if (radius == 0.0) return Eigen::VectorXd::Zero(z.size());
  std::vector<double> u(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) u[i] = std::abs(z[i]);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (size_t k = 0; k < u.size(); ++k) {
    cum += u[k];
    const double t = (cum - radius) / double(k + 1);
    if (u[k] > t) theta = t;
  }
  Eigen::VectorXd out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double m = std::max(std::abs(z[i]) - theta, 0.0);
    out[i] = z[i] < 0.0 ? -m : m;
  }
  return out;
}

double re_ratio(const DesignMatrix& x, const Eigen::VectorXd& v, const std::vector<int>& support) {
  double nj = 0.0;
  for (int j : support) nj += v[j] * v[j];
  if (!(nj > 0.0)) throw std::invalid_argument("v_J must be nonzero");
  return (x.values() * v).norm() / (std::sqrt(double(x.rows())) * std::sqrt(nj));
}

ReResult restricted_eigenvalue(const DesignMatrix& x, int s, double K, ReMode mode,
                               const ReOptions& opts) {
  const int p = static_cast<int>(x.cols());
  if (s < 1 || s > p) throw std::invalid_argument("need 1 <= s <= p");
  if (!(K > 0.0)) throw std::invalid_argument("K must be > 0");
  if (opts.inits < 0 || opts.iterations < 0 || opts.heuristic_supports < 1) {
    throw std::invalid_argument("invalid restricted eigenvalue options");
  }
  if (mode == ReMode::ExactEnumeration && !exact_enumeration_allowed(p, s)) {
    throw std::invalid_argument("exact enumeration needs p <= 16 and at most " +
                                std::to_string(kMaxEnumeratedSupports) + " supports");
  }

  const Eigen::MatrixXd G = x.values().transpose() * x.values() / double(x.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  const double lmax = std::max(es.eigenvalues().maxCoeff(), 1e-300);
  const Eigen::VectorXd bottom = es.eigenvectors().col(0);

  const auto supports = mode == ReMode::ExactEnumeration
                            ? all_supports(p, s)
                            : random_supports(p, s, opts.heuristic_supports, opts.seed);
  const auto results = map_indices<SupportResult>(
      static_cast<int>(supports.size()), opts.threads,
      [&](int i) { return solve_support(G, lmax, bottom, supports[i], K, opts); });

  size_t best = 0;
  for (size_t i = 1; i < results.size(); ++i) {
    if (results[i].value < results[best].value) best = i;
  }
  ReResult out;
  out.method = mode;
  out.support = supports[best];
  out.argmin = results[best].v;
  out.kappa = re_ratio(x, out.argmin, out.support);
  out.supports_searched = static_cast<long>(supports.size());
  return out;
}

ReCondition re_condition_holds(const DesignMatrix& x, int s0, double K, const ReOptions& opts) {
  if (s0 < 1 || 2L * s0 > x.cols()) throw std::invalid_argument("need 1 <= 2 s0 <= p");
  const ReMode mode = exact_enumeration_allowed(x.cols(), 2L * s0) ? ReMode::ExactEnumeration
                                                                   : ReMode::HeuristicLowerSearch;
  ReCondition c;
  c.result = restricted_eigenvalue(x, 2 * s0, K, mode, opts);
  c.holds = c.result.kappa > kRePositivity;
  return c;
}

}  // namespace lslasso
