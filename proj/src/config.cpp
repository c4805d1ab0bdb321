#include "lslasso/config.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace lslasso {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
T to_integer(const std::string& s) {
  T v{};
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end) {
    throw std::invalid_argument("expected an integer, got '" + s + "'");
  }
  return v;
}

double to_double(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("expected a number, got ''");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
    throw std::invalid_argument("expected a finite number, got '" + s + "'");
  }
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("expected true/false, got '" + s + "'");
}

std::string to_choice(const std::string& s, std::initializer_list<const char*> choices) {
  std::string all;
  for (const char* c : choices) {
    if (s == c) return s;
    all += all.empty() ? c : std::string("|") + c;
  }
  throw std::invalid_argument("expected one of " + all + ", got '" + s + "'");
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  return out;
}

struct KeyDef {
  std::string name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define KEY_STRING(f) \
  KeyDef{#f, [](RunConfig& c, const std::string& v) { c.f = v; }, [](const RunConfig& c) { return c.f; }}
#define KEY_CHOICE(f, ...)                                                           \
  KeyDef{#f, [](RunConfig& c, const std::string& v) { c.f = to_choice(v, {__VA_ARGS__}); }, \
         [](const RunConfig& c) { return c.f; }}
#define KEY_INT(f, T)                                                                   \
  KeyDef{#f, [](RunConfig& c, const std::string& v) { c.f = to_integer<T>(v); },         \
         [](const RunConfig& c) { return std::to_string(c.f); }}
#define KEY_DOUBLE(f)                                                     \
  KeyDef{#f, [](RunConfig& c, const std::string& v) { c.f = to_double(v); }, \
         [](const RunConfig& c) { return fmt_double(c.f); }}
#define KEY_BOOL(f)                                                     \
  KeyDef{#f, [](RunConfig& c, const std::string& v) { c.f = to_bool(v); }, \
         [](const RunConfig& c) { return std::string(c.f ? "true" : "false"); }}
#define KEY_OPT_DOUBLE(f)                                                                      \
  KeyDef{#f,                                                                                   \
         [](RunConfig& c, const std::string& v) {                                              \
           if (v == "auto") c.f.reset();                                                       \
           else c.f = to_double(v);                                                            \
         },                                                                                    \
         [](const RunConfig& c) { return c.f ? fmt_double(*c.f) : std::string("auto"); }}

const std::vector<KeyDef>& key_table() {
  static const std::vector<KeyDef> table = {
      KEY_STRING(design_csv),
      KEY_STRING(response_csv),
      KEY_STRING(response_column),
      KEY_BOOL(header),
      KEY_STRING(output_dir),
      KEY_BOOL(timestamp),
      KEY_CHOICE(design, "rademacher", "uniform", "file"),
      KEY_INT(N, long),
      KEY_INT(p, long),
      KEY_INT(s0, long),
      KEY_DOUBLE(theta_magnitude),
      KEY_DOUBLE(box_lo),
      KEY_DOUBLE(box_hi),
      KEY_CHOICE(family, "logistic", "gaussian", "poisson"),
      KEY_CHOICE(link, "identity", "sigmoid", "tanh"),
      KEY_DOUBLE(sigma0),
      KEY_OPT_DOUBLE(noise_variance),
      KeyDef{"interval",
             [](RunConfig& c, const std::string& v) {
               if (v == "auto") {
                 c.interval.reset();
                 return;
               }
               const auto cells = split_commas(v);
               if (cells.size() != 2) throw std::invalid_argument("expected auto or lo,hi");
               c.interval = Interval{to_double(cells[0]), to_double(cells[1])};
             },
             [](const RunConfig& c) {
               return c.interval ? fmt_double(c.interval->lo) + "," + fmt_double(c.interval->hi)
                                 : std::string("auto");
             }},
      KEY_INT(trials, long),
      KEY_INT(seed, unsigned long long),
      KEY_INT(threads, int),
      KEY_CHOICE(regime, "auto", "bounded", "gaussian"),
      KEY_INT(m, int),
      KEY_DOUBLE(q),
      KEY_DOUBLE(qprime),
      KEY_DOUBLE(q1),
      KEY_DOUBLE(q2),
      KEY_DOUBLE(K),
      KEY_DOUBLE(threshold_scale),
      KEY_INT(search_random, long),
      KEY_INT(search_local, long),
      KEY_OPT_DOUBLE(lambda),
      KEY_INT(max_iter, int),
      KEY_DOUBLE(kkt_tol),
      KEY_INT(restarts, int),
      KEY_INT(re_s, int),
      KEY_CHOICE(re_mode, "auto", "exact", "heuristic"),
      KEY_INT(re_inits, int),
      KEY_INT(re_iterations, int),
      KEY_INT(re_supports, int),
      KEY_INT(massart_p, long),
      KeyDef{"scaling_n",
             [](RunConfig& c, const std::string& v) {
               c.scaling_n.clear();
               if (v.empty()) return;
               for (const auto& cell : split_commas(v)) c.scaling_n.push_back(to_integer<long>(cell));
             },
             [](const RunConfig& c) {
               std::string s;
               for (size_t k = 0; k < c.scaling_n.size(); ++k) {
                 if (k) s += ",";
                 s += std::to_string(c.scaling_n[k]);
               }
               return s;
             }},
  };
  return table;
}

#undef KEY_STRING
#undef KEY_CHOICE
#undef KEY_INT
#undef KEY_DOUBLE
#undef KEY_BOOL
#undef KEY_OPT_DOUBLE

const KeyDef* find_key(const std::string& name) {
  for (const auto& k : key_table()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

using Origins = std::map<std::string, std::string>;

void apply(RunConfig& cfg, Origins& origins, const std::string& key, const std::string& value,
           const std::string& where) {
  const KeyDef* def = find_key(key);
  if (!def) throw ConfigError(where + ": unknown key '" + key + "'");
  try {
    def->set(cfg, value);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": key '" + key + "': " + e.what());
  }
  origins[key] = where;
}

void validate(const RunConfig& c, const Origins& origins) {
  auto fail = [&](const std::string& key, const std::string& msg) {
    const auto it = origins.find(key);
    const std::string where = it == origins.end() ? "default" : it->second;
    throw ConfigError(where + ": key '" + key + "': " + msg);
  };
  auto prob = [&](const std::string& key, double v) {
    if (!(v > 0.0 && v < 1.0)) fail(key, "value " + fmt_double(v) + " must lie in (0, 1)");
  };
  if (c.N < 1) fail("N", "must be >= 1");
  if (c.p < 1) fail("p", "must be >= 1");
  if (c.s0 < 0 || c.s0 > c.p) fail("s0", "must satisfy 0 <= s0 <= p");
  if (c.trials < 1) fail("trials", "must be >= 1");
  if (c.threads < 0) fail("threads", "must be >= 0 (0 = all hardware threads)");
  if (c.m < 0 || c.m > 2) fail("m", "must be 0, 1 or 2");
  prob("q", c.q);
  prob("qprime", c.qprime);
  prob("q1", c.q1);
  prob("q2", c.q2);
  if (!(c.q + c.qprime < 1.0)) fail("qprime", "q + qprime must be < 1");
  if (!(c.q1 + c.q2 < 1.0)) fail("q2", "q1 + q2 must be < 1");
  if (!(c.K > 1.0)) fail("K", "must be > 1");
  if (!(c.sigma0 > 0.0)) fail("sigma0", "must be > 0");
  if (!(c.box_lo < c.box_hi)) fail("box_hi", "box_lo must be < box_hi");
  if (c.noise_variance && *c.noise_variance < 0.0) fail("noise_variance", "must be >= 0");
  if (c.interval && !(c.interval->lo < c.interval->hi)) fail("interval", "needs lo < hi");
  if (!(c.threshold_scale > 0.0)) fail("threshold_scale", "must be > 0");
  if (c.search_random < 0) fail("search_random", "must be >= 0");
  if (c.search_local < 0) fail("search_local", "must be >= 0");
  if (c.lambda && !(*c.lambda > 0.0)) fail("lambda", "must be > 0");
  if (c.max_iter < 1) fail("max_iter", "must be >= 1");
  if (!(c.kkt_tol > 0.0)) fail("kkt_tol", "must be > 0");
  if (c.restarts < 1) fail("restarts", "must be >= 1");
  if (c.re_s < 1) fail("re_s", "must be >= 1");
  if (c.re_inits < 0) fail("re_inits", "must be >= 0");
  if (c.re_iterations < 0) fail("re_iterations", "must be >= 0");
  if (c.re_supports < 1) fail("re_supports", "must be >= 1");
  if (c.massart_p < 1) fail("massart_p", "must be >= 1");
  for (long n : c.scaling_n) {
    if (n < 1) fail("scaling_n", "entries must be >= 1");
  }
  if (!c.design_csv.empty() && !std::filesystem::exists(c.design_csv)) {
    fail("design_csv", "file not found: " + c.design_csv);
  }
  if (!c.response_csv.empty() && !std::filesystem::exists(c.response_csv)) {
    fail("response_csv", "file not found: " + c.response_csv);
  }
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& d : key_table()) k.push_back(d.name);
    return k;
  }();
  return keys;
}

RunConfig parse_config_text(const std::string& text, const ConfigOverrides& overrides,
                            const std::string& source) {
  RunConfig cfg;
  Origins origins;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (!seen.insert(key).second) throw ConfigError(where + ": duplicate key '" + key + "'");
    apply(cfg, origins, key, trim(line.substr(eq + 1)), where);
  }
  for (const auto& [key, value] : overrides) {
    std::string flag = key;
    for (auto& ch : flag) ch = ch == '_' ? '-' : ch;
    apply(cfg, origins, key, trim(value), "flag --" + flag);
  }
  validate(cfg, origins);
  return cfg;
}

RunConfig parse_config_file(const std::string& path, const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), overrides, path);
}

std::string emit_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& d : key_table()) out += d.name + " = " + d.get(cfg) + "\n";
  return out;
}

bool operator==(const RunConfig& a, const RunConfig& b) { return emit_config(a) == emit_config(b); }

void require_for_command(const RunConfig& cfg, const std::string& command) {
  auto need = [&](const std::string& key, const std::string& value) {
    if (value.empty()) throw ConfigError("missing required key '" + key + "' for " + command);
  };
  if (command == "fit") {
    need("design_csv", cfg.design_csv);
    need("response_csv", cfg.response_csv);
  }
  if (uses_design_file(cfg) && command != "verify-massart") need("design_csv", cfg.design_csv);
}

LossFamily family_from_config(const RunConfig& cfg, Interval iv) {
  if (cfg.family == "logistic") return LossFamily::logistic(iv);
  if (cfg.family == "poisson") return LossFamily::poisson_log(iv);
  const Link link = cfg.link == "sigmoid" ? Link::Sigmoid
                    : cfg.link == "tanh"  ? Link::Tanh
                                          : Link::Identity;
  return LossFamily::gaussian_square(link, cfg.sigma0, iv);
}

Regime regime_from_config(const RunConfig& cfg) {
  if (cfg.regime == "bounded") return Regime::Bounded;
  if (cfg.regime == "gaussian") return Regime::Gaussian;
  return cfg.family == "gaussian" ? Regime::Gaussian : Regime::Bounded;
}

bool uses_design_file(const RunConfig& cfg) { return cfg.design == "file" || !cfg.design_csv.empty(); }

DesignMatrix design_from_config(const RunConfig& cfg) {
  if (uses_design_file(cfg)) return read_design_csv(cfg.design_csv, cfg.header);
  SimSpec tmp;
  tmp.N = cfg.N;
  tmp.p = cfg.p;
  tmp.seed = cfg.seed;
  tmp.design = cfg.design == "uniform" ? DesignKind::UniformBox : DesignKind::Rademacher;
  return make_design(tmp);
}

SimSpec spec_from_config(const RunConfig& cfg) {
  DesignMatrix x = design_from_config(cfg);
  SimSpec spec;
  spec.N = x.rows();
  spec.p = x.cols();
  spec.s0 = cfg.s0;
  spec.seed = cfg.seed;
  spec.trials = cfg.trials;
  spec.theta_star = alternating_theta(spec.p, cfg.s0, cfg.theta_magnitude);
  spec.domain = ParamDomain::uniform_box(spec.p, cfg.box_lo, cfg.box_hi);
  const Interval iv = cfg.interval ? *cfg.interval : padded_index_range(x, spec.domain);
  spec.family = family_from_config(cfg, iv);
  if (cfg.noise_variance) spec.variances = Eigen::VectorXd::Constant(spec.N, *cfg.noise_variance);
  if (uses_design_file(cfg)) {
    spec.design = DesignKind::FromFile;
    spec.design_values = std::move(x);
  } else {
    spec.design = cfg.design == "uniform" ? DesignKind::UniformBox : DesignKind::Rademacher;
  }
  return spec;
}

HarnessOptions harness_options(const RunConfig& cfg) {
  HarnessOptions o;
  o.budget = {cfg.search_random, cfg.search_local};
  o.threads = cfg.threads;
  o.threshold_scale = cfg.threshold_scale;
  return o;
}

SolverOptions solver_options(const RunConfig& cfg) {
  SolverOptions o;
  o.max_iter = cfg.max_iter;
  o.kkt_tol = cfg.kkt_tol;
  o.restarts = cfg.restarts;
  o.seed = cfg.seed;
  return o;
}

ReOptions re_options(const RunConfig& cfg) {
  ReOptions o;
  o.inits = cfg.re_inits;
  o.iterations = cfg.re_iterations;
  o.heuristic_supports = cfg.re_supports;
  o.seed = cfg.seed;
  o.threads = cfg.threads;
  return o;
}

std::string resolve_output_dir(const RunConfig& cfg) {
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  if (const char* env = std::getenv("LSLASSO_OUTPUT_DIR"); env && *env) return env;
  return "lslasso_out";
}

}  // namespace lslasso
