#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "lslasso/harness.hpp"

namespace lslasso {

using Json = nlohmann::ordered_json;

struct CheckResult {
  std::string name;
  bool pass = true;
};

struct Report {
  std::string command;
  Json body = Json::object();
  std::vector<CheckResult> checks;
  std::vector<TrialRecord> records;  // written as <command>_trials.csv when non-empty
};

struct EmitResult {
  std::string json_path;
  std::string csv_path;
  std::string summary;
  int exit_code = 0;
};

Json to_json(const McReport& report);
Json to_json(const MassartReport& report);
Json to_json(const Eigen::VectorXd& v);

/// 0 iff every check passes.
int exit_code(const Report& report);

/// "<command>: PASS" or "<command>: FAIL [name, ...]".
std::string summary_line(const Report& report);

/// Header of the per-trial CSV.
inline constexpr const char* kTrialCsvHeader = "trial,statistic,threshold,violated";

void write_trial_csv(const std::string& path, const std::vector<TrialRecord>& records);

/// Writes <dir>/<command>.json (and the trial CSV). The JSON is a pure
/// function of the report unless `include_timestamp` is set.
EmitResult emit_report(const Report& report, const std::string& dir,
                       bool include_timestamp = false);

}  // namespace lslasso
