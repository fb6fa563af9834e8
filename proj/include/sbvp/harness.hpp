#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sbvp/halfline.hpp"
#include "sbvp/hypotheses.hpp"
#include "sbvp/solver.hpp"

namespace sbvp {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One hypothesis audit request: a label plus its named inputs (expression
/// strings and numbers), dispatched by label family.
struct HypothesisRequest {
  std::string label;
  nlohmann::json params;
};

/// Full run description: problem, solver options, hypothesis audits, output.
struct RunConfig {
  ProblemSpec problem;
  SolverOptions solver;
  HalfLineSchedule halfline_schedule;
  std::vector<HypothesisRequest> hypotheses;
  std::string output_path;
  std::string output_format = "json";  // json | csv

  nlohmann::json to_json() const;
};

RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Registry entry: a pinned worked example with its chapter's regularization
/// style, the hypothesis audit plan, and the expected verdicts.
struct ExampleRecord {
  std::string id;
  std::string anchor;  // chapter/section
  std::string description;
  RunConfig config;
  std::map<std::string, bool> expected_verdicts;  // label -> holds
};

const std::vector<ExampleRecord>& registry();
const ExampleRecord& registry_get(const std::string& id);

/// Exit codes of a run: 0 converged, 2 non-converged (artifacts written),
/// 3 config/validation error, 4 internal numeric error.
enum class RunStatus : int {
  Converged = 0,
  NotConverged = 2,
  ConfigError = 3,
  NumericError = 4,
};

struct RunResult {
  RunStatus status = RunStatus::Converged;
  std::optional<SolutionPair> solution;
  std::vector<HypothesisReport> reports;
  std::string message;

  nlohmann::json to_json() const;
};

/// Runs the hypothesis audit (when requested) and the solve, writes artifacts
/// to the configured output path (atomic write-temp-then-rename).
RunResult run(const RunConfig& config, bool solve_problem = true);

/// Executes just the hypothesis audit of a config.
std::vector<HypothesisReport> audit(const RunConfig& config);

nlohmann::json report_to_json(const HypothesisReport& rep);
nlohmann::json solution_to_json(const SolutionPair& sol);
std::string solution_to_csv(const SolutionPair& sol);

/// Atomic whole-file write (temp file + rename).
void write_file_atomic(const std::string& path, const std::string& contents);

/// Default output directory: $SBVP_OUTPUT_DIR or the current directory.
std::string default_output_dir();

}  // namespace sbvp
