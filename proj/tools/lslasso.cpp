// lslasso: weighted-l1 GLM estimation with theory-driven penalties and
// Monte-Carlo checks of the accompanying tail bounds.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "lslasso/bounds.hpp"
#include "lslasso/config.hpp"
#include "lslasso/design.hpp"
#include "lslasso/harness.hpp"
#include "lslasso/losses.hpp"
#include "lslasso/parallel.hpp"
#include "lslasso/report.hpp"
#include "lslasso/restricted_eigenvalue.hpp"
#include "lslasso/solver.hpp"

using namespace lslasso;
namespace fs = std::filesystem;

namespace {

std::string dashed(std::string key) {
  for (auto& c : key) c = c == '_' ? '-' : c;
  return key;
}

// Canonical config minus the keys that must not influence report bytes.
Json config_json(const RunConfig& cfg) {
  Json j = Json::object();
  std::istringstream in(emit_config(cfg));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    const std::string key = line.substr(0, eq);
    if (key == "threads" || key == "output_dir" || key == "timestamp") continue;
    j[key] = line.substr(eq + 3);
  }
  return j;
}

Json constants_json(const LslConstants& c) {
  Json j;
  j["m"] = c.m;
  j["phi"] = c.phi;
  j["psi"] = c.psi;
  j["A"] = c.A;
  j["B"] = c.B;
  if (c.C) j["C"] = *c.C;
  return j;
}

Eigen::VectorXd variances_for(const RunConfig& cfg, long N) {
  const double v = cfg.noise_variance ? *cfg.noise_variance : cfg.sigma0 * cfg.sigma0;
  return Eigen::VectorXd::Constant(N, v);
}

Report cmd_bounds(const RunConfig& cfg, const std::string& dir) {
  const DesignMatrix x = design_from_config(cfg);
  const long N = x.rows(), p = x.cols();
  const ParamDomain dom = ParamDomain::uniform_box(p, cfg.box_lo, cfg.box_hi);
  const Interval iv = cfg.interval ? *cfg.interval : padded_index_range(x, dom);
  const LossFamily fam = family_from_config(cfg, iv);
  const Feasibility feas = check_feasibility(x, dom, iv);
  const Eigen::VectorXd d = column_scales(x);
  const Diameters diam = weighted_l1_diameter(dom, d);

  Report rep;
  rep.command = "bounds";
  rep.checks.push_back({"feasibility", feas.ok});
  Json& b = rep.body;
  b["config"] = config_json(cfg);
  b["family"] = fam.name();
  b["interval"] = {iv.lo, iv.hi};
  b["N"] = N;
  b["p"] = p;
  b["column_scales"] = to_json(d);
  b["R"] = diam.weighted;
  b["Delta"] = diam.unweighted;
  b["feasibility"] = {{"ok", feas.ok},
                      {"index_min", feas.index_min},
                      {"index_max", feas.index_max},
                      {"diagnostic", feas.diagnostic}};

  std::ostringstream row;
  row.precision(17);
  std::string header;
  const Regime regime = regime_from_config(cfg);
  if (regime == Regime::Bounded) {
    const DerivBounds db = derivative_bounds(fam, cfg.m);
    const DerivBounds d1 = derivative_bounds(fam, 1);
    const LslConstants c = bounded_constants(x, d, db.F_m, db.F_mplus1, diam.weighted, cfg.m);
    const LslConstants c1 = bounded_constants(x, d, d1.F_m, d1.F_mplus1, diam.weighted, 1);
    const double thr = bounded_threshold(c, p, cfg.q);
    const double xi1 = xi1_threshold_bounded(d1.F_m, N, p, cfg.qprime);
    const double M = coefficient_bound_m1(c1, d1.F_m, N, p, cfg.q, cfg.qprime);
    Json j = constants_json(c);
    j["F_m"] = db.F_m;
    j["F_mplus1"] = db.F_mplus1;
    j["threshold"] = thr;
    j["xi1_threshold"] = xi1;
    j["M"] = M;
    b["bounded"] = j;
    header = "regime,m,F_m,F_mplus1,phi,psi,A,B,C,threshold,xi1_threshold,M";
    row << "bounded," << c.m << "," << db.F_m << "," << db.F_mplus1 << "," << c.phi << ","
        << c.psi << "," << c.A << "," << c.B << "," << c.C.value_or(0.0) << "," << thr << ","
        << xi1 << "," << M;
  } else {
    const DerivBounds lb = link_bounds(fam, cfg.m);
    const DerivBounds l1 = link_bounds(fam, 1);
    const Eigen::VectorXd var = variances_for(cfg, N);
    const LslConstants c =
        gaussian_constants(x, d, cfg.sigma0, var, lb.F_m, lb.F_mplus1, diam.weighted, cfg.m);
    const LslConstants c1 =
        gaussian_constants(x, d, cfg.sigma0, var, l1.F_m, l1.F_mplus1, diam.weighted, 1);
    const double thr = gaussian_threshold(c, p, cfg.q);
    const double xi1 = xi1_threshold_gaussian(p, cfg.qprime);
    const double M = gaussian_coefficient_bound_m1(c1, l1.F_m, p, cfg.q, cfg.qprime);
    Json j = constants_json(c);
    j["F_m"] = lb.F_m;
    j["F_mplus1"] = lb.F_mplus1;
    j["sigma0"] = cfg.sigma0;
    j["w"] = to_json(c.w);
    j["lambda_weights"] = to_json(c.lambda_weights);
    j["threshold"] = thr;
    j["xi1_threshold"] = xi1;
    j["M"] = M;
    b["gaussian"] = j;
    header = "regime,m,F_m,F_mplus1,phi,psi,A,B,C,threshold,xi1_threshold,M";
    row << "gaussian," << c.m << "," << lb.F_m << "," << lb.F_mplus1 << "," << c.phi << ","
        << c.psi << "," << c.A << "," << c.B << ",0," << thr << "," << xi1 << "," << M;
  }
  fs::create_directories(dir);
  std::ofstream csv(fs::path(dir) / "bounds.csv");
  csv << header << "\n" << row.str() << "\n";
  std::cout << header << "\n" << row.str() << "\n";
  return rep;
}

Report cmd_fit(const RunConfig& cfg, const std::string& dir) {
  const DesignMatrix x = read_design_csv(cfg.design_csv, cfg.header);
  const Eigen::VectorXd y = read_response_csv(cfg.response_csv, cfg.header, cfg.response_column);
  const long p = x.cols();
  const ParamDomain dom = ParamDomain::uniform_box(p, cfg.box_lo, cfg.box_hi);
  const Interval iv = cfg.interval ? *cfg.interval : padded_index_range(x, dom);
  const LossFamily fam = family_from_config(cfg, iv);
  const double d = column_scales(x).maxCoeff();

  double lambda = 0.0, M_q = 0.0;
  if (cfg.lambda) {
    lambda = *cfg.lambda;
  } else {
    M_q = theoretical_M_q(fam, x, dom, variances_for(cfg, x.rows()), cfg.q1, cfg.q2);
    lambda = lambda_from_theory(cfg.K, M_q, d);
  }
  const auto problem = LassoProblem::with_scalar_penalty(x, y, fam, dom, lambda, d);
  const LassoFit f = fit(problem, solver_options(cfg));

  fs::create_directories(dir);
  write_vector_csv((fs::path(dir) / "theta_hat.csv").string(), f.theta_hat, "theta_hat");

  Report rep;
  rep.command = "fit";
  rep.checks.push_back({"converged", f.converged});
  Json& b = rep.body;
  b["config"] = config_json(cfg);
  b["family"] = fam.name();
  b["lambda_source"] = cfg.lambda ? "config" : "theory";
  if (!cfg.lambda) b["M_q"] = M_q;
  b["lambda"] = lambda;
  b["d"] = d;
  b["objective"] = f.objective;
  b["kkt_residual"] = f.kkt_residual;
  b["iterations"] = f.iterations;
  b["restarts_used"] = f.restarts_used;
  b["converged"] = f.converged;
  b["theta_hat"] = to_json(f.theta_hat);
  return rep;
}

Report cmd_re(const RunConfig& cfg) {
  const DesignMatrix x = design_from_config(cfg);
  ReMode mode = exact_enumeration_allowed(x.cols(), cfg.re_s) ? ReMode::ExactEnumeration
                                                              : ReMode::HeuristicLowerSearch;
  if (cfg.re_mode == "exact") mode = ReMode::ExactEnumeration;
  if (cfg.re_mode == "heuristic") mode = ReMode::HeuristicLowerSearch;
  const ReResult r = restricted_eigenvalue(x, cfg.re_s, cfg.K, mode, re_options(cfg));

  Report rep;
  rep.command = "re";
  rep.checks.push_back({"kappa_positive", r.kappa > kRePositivity});
  Json& b = rep.body;
  b["config"] = config_json(cfg);
  b["s"] = cfg.re_s;
  b["K"] = cfg.K;
  b["method"] = to_string(r.method);
  b["certified"] = r.method == ReMode::ExactEnumeration;
  b["kappa"] = r.kappa;
  b["argmin_support"] = r.support;
  b["argmin_vector"] = to_json(r.argmin);
  b["supports_searched"] = r.supports_searched;
  return rep;
}

Report cmd_simulate(const RunConfig& cfg, const std::string& dir) {
  const SimSpec spec = spec_from_config(cfg);
  const DesignMatrix x = make_design(spec);
  validate_spec(spec, x);
  const auto ys = map_indices<Eigen::VectorXd>(static_cast<int>(spec.trials), cfg.threads,
                                               [&](int t) { return simulate(spec, x, t).y; });
  Eigen::MatrixXd y(spec.N, spec.trials);
  for (long t = 0; t < spec.trials; ++t) y.col(t) = ys[t];

  fs::create_directories(dir);
  write_matrix_csv((fs::path(dir) / "design.csv").string(), x.values(), "x");
  write_vector_csv((fs::path(dir) / "theta_star.csv").string(), spec.theta_star, "theta_star");
  write_matrix_csv((fs::path(dir) / "responses.csv").string(), y, "y");

  Report rep;
  rep.command = "simulate";
  rep.checks.push_back({"feasibility", true});
  Json& b = rep.body;
  b["config"] = config_json(cfg);
  b["family"] = spec.family.name();
  b["interval"] = {spec.family.interval().lo, spec.family.interval().hi};
  b["N"] = spec.N;
  b["p"] = spec.p;
  b["trials"] = spec.trials;
  b["theta_star"] = to_json(spec.theta_star);
  b["response_mean"] = y.mean();
  b["files"] = {"design.csv", "theta_star.csv", "responses.csv"};
  return rep;
}

Report mc_report(const std::string& command, const RunConfig& cfg, const McReport& mc) {
  Report rep;
  rep.command = command;
  rep.checks.push_back({mc.check, mc.pass});
  rep.body["config"] = config_json(cfg);
  rep.body["report"] = to_json(mc);
  rep.records = mc.records;
  return rep;
}

Report cmd_verify_tail(const RunConfig& cfg) {
  const SimSpec spec = spec_from_config(cfg);
  const HarnessOptions o = harness_options(cfg);
  const McReport mc = regime_from_config(cfg) == Regime::Gaussian
                          ? verify_tail_gaussian(spec, cfg.q, cfg.qprime, o)
                          : verify_tail_bounded(spec, cfg.q, cfg.qprime, o);
  return mc_report("verify-tail", cfg, mc);
}

Report cmd_verify_xi1(const RunConfig& cfg) {
  const SimSpec spec = spec_from_config(cfg);
  const McReport mc = verify_xi1(spec, cfg.q, regime_from_config(cfg), harness_options(cfg));
  return mc_report("verify-xi1", cfg, mc);
}

Report cmd_verify_massart(const RunConfig& cfg) {
  const Eigen::MatrixXd cols = uses_design_file(cfg)
                                   ? read_design_csv(cfg.design_csv, cfg.header).values()
                                   : Eigen::MatrixXd::Identity(cfg.massart_p, cfg.massart_p);
  const MassartReport m = verify_massart(cols, cfg.trials, cfg.seed, cfg.threads);
  Report rep;
  rep.command = "verify-massart";
  rep.checks.push_back({"massart", m.pass});
  rep.body["config"] = config_json(cfg);
  rep.body["p"] = cols.cols();
  rep.body["report"] = to_json(m);
  rep.records = m.records;
  return rep;
}

Report cmd_verify_error(const RunConfig& cfg) {
  const SimSpec spec = spec_from_config(cfg);
  const McReport mc = verify_l2_bound(spec, cfg.q1, cfg.q2, cfg.K, harness_options(cfg),
                                      solver_options(cfg), re_options(cfg));
  Report rep = mc_report("verify-error", cfg, mc);
  if (!cfg.scaling_n.empty()) {
    const ScalingReport s = scaling_study(spec, cfg.scaling_n, cfg.q1, cfg.q2, cfg.K,
                                          harness_options(cfg), solver_options(cfg),
                                          re_options(cfg));
    Json rows = Json::array();
    for (const auto& r : s.rows) {
      rows.push_back(
          {{"N", r.N}, {"median_error", r.median_error}, {"rhs", r.rhs}, {"lambda", r.lambda}});
    }
    rep.body["scaling"] = {{"rows", rows}, {"ratios", s.ratios}, {"decreasing", s.decreasing},
                           {"pass", s.pass}};
    rep.checks.push_back({"scaling", s.pass});
  }
  return rep;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lslasso: l1-penalized GLM estimation and Monte-Carlo bound checks"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"bounds", "tail-bound constants and thresholds for a design"},
      {"fit", "penalized estimate from design and response CSVs"},
      {"re", "restricted eigenvalue of a design"},
      {"simulate", "draw a design and per-trial responses"},
      {"verify-tail", "coverage of the local Lipschitz coefficient bound"},
      {"verify-xi1", "coverage of the linear-term bound"},
      {"verify-massart", "maximal inequality for Gaussian projections"},
      {"verify-error", "coverage of the l2 error bound (optional scaling study)"},
  };

  std::string config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "key = value configuration file");
    for (const auto& key : config_keys()) {
      sub->add_option("--" + dashed(key), values[key], "config key " + key);
    }
    subs[name] = sub;
  }

  CLI11_PARSE(app, argc, argv);

  try {
    std::string command;
    CLI::App* sub = nullptr;
    for (const auto& [name, s] : subs) {
      if (s->parsed()) {
        command = name;
        sub = s;
      }
    }
    ConfigOverrides overrides;
    for (const auto& key : config_keys()) {
      if (sub->get_option("--" + dashed(key))->count() > 0) overrides.emplace_back(key, values[key]);
    }
    const RunConfig cfg = config_path.empty() ? parse_config_text("", overrides)
                                              : parse_config_file(config_path, overrides);
    require_for_command(cfg, command);
    const std::string dir = resolve_output_dir(cfg);

    Report rep;
    if (command == "bounds") rep = cmd_bounds(cfg, dir);
    else if (command == "fit") rep = cmd_fit(cfg, dir);
    else if (command == "re") rep = cmd_re(cfg);
    else if (command == "simulate") rep = cmd_simulate(cfg, dir);
    else if (command == "verify-tail") rep = cmd_verify_tail(cfg);
    else if (command == "verify-xi1") rep = cmd_verify_xi1(cfg);
    else if (command == "verify-massart") rep = cmd_verify_massart(cfg);
    else rep = cmd_verify_error(cfg);

    const EmitResult out = emit_report(rep, dir, cfg.timestamp);
    std::cout << out.summary << "\n";
    return out.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
