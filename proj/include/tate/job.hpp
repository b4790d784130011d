#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tate/serialize.hpp"

namespace tate {

inline constexpr const char* kReportVersion = "1.0";

/// Batch job: one curve, a precision, a seed and an ordered task list.
struct JobConfig {
    CurveSpec curve;
    std::string curve_name;  ///< preset name, empty for explicit curves
    int precision = 2;
    u64 seed = 1;
    std::string output = "json";
    Json tasks = Json::array();
};

/// Parses and validates a config document; ConfigError on anything malformed.
JobConfig parse_config(const Json& j);

Json echo(const JobConfig& cfg);

/// Task kinds accepted in the task list.
const std::vector<std::string>& task_kinds();
const std::vector<std::string>& check_names();

struct JobOutcome {
    Json document;
    int exit_code = 0;
};

/// Runs the tasks in order.  Exit code 0 iff every verification passed, 3 on a
/// computation error (embedded in the failing task's report).
JobOutcome run_job(const JobConfig& cfg);

/// Row-per-check flattening of a report document.
std::string render_csv(const Json& document);

}  // namespace tate
