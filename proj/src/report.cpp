#include "lslasso/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace lslasso {

Json to_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json to_json(const McReport& report) {
  Json j;
  j["check"] = report.check;
  j["trials"] = report.trials;
  j["violations"] = report.violations;
  j["violation_rate"] = report.violation_rate;
  j["nominal_q"] = report.nominal_q;
  j["binomial_slack"] = report.binomial_slack;
  j["pass"] = report.pass;
  Json d = Json::object();
  for (const auto& [k, v] : report.details) d[k] = v;
  j["details"] = d;
  return j;
}

Json to_json(const MassartReport& report) {
  Json j;
  j["trials"] = report.trials;
  j["mean"] = report.mean;
  j["standard_error"] = report.standard_error;
  j["bound"] = report.bound;
  j["pass"] = report.pass;
  return j;
}

int exit_code(const Report& report) {
  for (const auto& c : report.checks) {
    if (!c.pass) return 1;
  }
  return 0;
}

std::string summary_line(const Report& report) {
  std::string failing;
  for (const auto& c : report.checks) {
    if (!c.pass) failing += (failing.empty() ? "" : ", ") + c.name;
  }
  if (failing.empty()) return report.command + ": PASS";
  return report.command + ": FAIL [" + failing + "]";
}

void write_trial_csv(const std::string& path, const std::vector<TrialRecord>& records) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot write " + path);
  std::fprintf(f, "%s\n", kTrialCsvHeader);
  for (const auto& r : records) {
    std::fprintf(f, "%ld,%.17g,%.17g,%d\n", r.trial, r.statistic, r.threshold, r.violated ? 1 : 0);
  }
  if (std::fclose(f) != 0) throw std::runtime_error("cannot write " + path);
}

EmitResult emit_report(const Report& report, const std::string& dir, bool include_timestamp) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());

  EmitResult out;
  out.exit_code = exit_code(report);
  out.summary = summary_line(report);

  Json j;
  j["command"] = report.command;
  j["pass"] = out.exit_code == 0;
  Json checks = Json::array();
  for (const auto& c : report.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}});
  j["checks"] = checks;
  for (const auto& [k, v] : report.body.items()) j[k] = v;
  if (include_timestamp) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    j["timestamp"] = buf;
  }

  if (!report.records.empty()) {
    out.csv_path = (fs::path(dir) / (report.command + "_trials.csv")).string();
    write_trial_csv(out.csv_path, report.records);
    j["trial_csv"] = report.command + "_trials.csv";
  }

  out.json_path = (fs::path(dir) / (report.command + ".json")).string();
  std::ofstream f(out.json_path);
  if (!f) throw std::runtime_error("cannot write " + out.json_path);
  f << j.dump(2) << "\n";
  if (!f) throw std::runtime_error("cannot write " + out.json_path);
  return out;
}

}  // namespace lslasso
