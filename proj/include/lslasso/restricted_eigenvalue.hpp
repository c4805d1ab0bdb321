#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "lslasso/design.hpp"

namespace lslasso {

enum class ReMode { ExactEnumeration, HeuristicLowerSearch };

std::string to_string(ReMode mode);

struct ReOptions {
  int inits = 64;
  int iterations = 2000;
  int heuristic_supports = 256;
  std::uint64_t seed = 0;
  int threads = 1;
};

/// kappa(s, K) = min ||Xv||_2 / (sqrt(N) ||v_J||_2) over |J| <= s and the
/// cone ||v_{J^c}||_1 <= K ||v_J||_1.
///
/// Only |J| = s is searched: enlarging J keeps v in the cone and shrinks the
/// ratio. Every probe is feasible, so the reported value is attained by
/// `argmin`. With ExactEnumeration all supports are visited.
struct ReResult {
  double kappa = 0.0;
  std::vector<int> support;
  Eigen::VectorXd argmin;
  ReMode method = ReMode::ExactEnumeration;
  long supports_searched = 0;
};

/// Enumeration is allowed for p <= 16 with at most this many supports.
inline constexpr long kMaxEnumeratedSupports = 1820;
inline constexpr double kRePositivity = 1e-6;

bool exact_enumeration_allowed(long p, long s);

ReResult restricted_eigenvalue(const DesignMatrix& x, int s, double K, ReMode mode,
                               const ReOptions& opts = {});

/// Ratio of a single direction; throws if v_J = 0.
double re_ratio(const DesignMatrix& x, const Eigen::VectorXd& v, const std::vector<int>& support);

/// Euclidean projection onto {b : ||b||_1 <= radius}.
Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& z, double radius);

struct ReCondition {
  bool holds = false;
  ReResult result;
};

/// Evaluates kappa(2 s0, K) (exact when allowed, heuristic otherwise).
ReCondition re_condition_holds(const DesignMatrix& x, int s0, double K, const ReOptions& opts = {});

}  // namespace lslasso
