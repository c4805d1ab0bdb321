#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lslasso/harness.hpp"

namespace lslasso {

/// Thrown for every configuration problem; the message names the key and
/// where its value came from (file line or command-line flag).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  // io
  std::string design_csv;
  std::string response_csv;
  std::string response_column;
  bool header = true;
  std::string output_dir;
  bool timestamp = false;

  // simulation
  std::string design = "rademacher";  // rademacher | uniform | file
  long N = 100;
  long p = 8;
  long s0 = 2;
  double theta_magnitude = 0.25;
  double box_lo = -0.5;
  double box_hi = 0.5;
  std::string family = "logistic";  // logistic | gaussian | poisson
  std::string link = "identity";    // identity | sigmoid | tanh
  double sigma0 = 1.0;
  std::optional<double> noise_variance;   // default sigma0^2
  std::optional<Interval> interval;       // default: padded index range
  long trials = 100;
  unsigned long long seed = 0;
  int threads = 0;

  // bounds
  std::string regime = "auto";  // auto | bounded | gaussian
  int m = 1;
  double q = 0.05;
  double qprime = 0.05;
  double q1 = 0.05;
  double q2 = 0.05;
  double K = 3.0;
  double threshold_scale = 1.0;
  long search_random = 4096;
  long search_local = 200;

  // solver
  std::optional<double> lambda;  // default: theoretical penalty
  int max_iter = 10000;
  double kkt_tol = 1e-8;
  int restarts = 16;

  // restricted eigenvalue
  int re_s = 2;
  std::string re_mode = "auto";  // auto | exact | heuristic
  int re_inits = 64;
  int re_iterations = 2000;
  int re_supports = 256;

  // lemma check and scaling study
  long massart_p = 64;
  std::vector<long> scaling_n;
};

/// Keys in canonical order.
const std::vector<std::string>& config_keys();

using ConfigOverrides = std::vector<std::pair<std::string, std::string>>;

/// Parses `key = value` lines ('#' starts a comment) and then applies the
/// overrides. Unknown or repeated keys, malformed values and constraint
/// violations are errors.
RunConfig parse_config_text(const std::string& text, const ConfigOverrides& overrides = {},
                            const std::string& source = "config");
RunConfig parse_config_file(const std::string& path, const ConfigOverrides& overrides = {});

/// Canonical form: every key in canonical order, doubles with 17 digits.
std::string emit_config(const RunConfig& cfg);

bool operator==(const RunConfig& a, const RunConfig& b);

/// Keys that a subcommand cannot run without.
void require_for_command(const RunConfig& cfg, const std::string& command);

LossFamily family_from_config(const RunConfig& cfg, Interval iv);
Regime regime_from_config(const RunConfig& cfg);

/// Design from CSV (design = file) or generated from the seed.
// design = file, or any run with design_csv set
bool uses_design_file(const RunConfig& cfg);
DesignMatrix design_from_config(const RunConfig& cfg);

/// Simulation spec with theta* = alternating_theta(p, s0, theta_magnitude).
SimSpec spec_from_config(const RunConfig& cfg);

HarnessOptions harness_options(const RunConfig& cfg);
SolverOptions solver_options(const RunConfig& cfg);
ReOptions re_options(const RunConfig& cfg);

/// output_dir if set, else $LSLASSO_OUTPUT_DIR, else "lslasso_out".
std::string resolve_output_dir(const RunConfig& cfg);

}  // namespace lslasso
