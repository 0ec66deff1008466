#pragma once

#include "pmelab/estimates.hpp"
#include "pmelab/exact.hpp"
#include "pmelab/martingale.hpp"

#include <json.hpp>
#include <string>

namespace pmelab {

using nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kOutputDirEnv = "PMELAB_OUTPUT_DIR";

/// Stable catalog of check ids with parameter schemas (for `list-checks`
/// and config validation).
json check_catalog();

/// Parse and validate a config document. Throws ConfigError with the
/// offending field on any problem.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json load_config(const std::string& path);
void validate_config(const json& config);

/// Execute every scenario/check of a validated config. Reports are written
/// under the output directory (config value, overridden by `output_dir`
/// argument if non-empty): report.json with the full numeric results,
/// timing.json with wall-clock data kept out of the deterministic report,
/// and one CSV time series per check.
struct RunResult {
  json report;
  int exit_code = 0;  // 0 pass, 1 check failure
};

RunResult run_config(const json& config, const std::string& output_dir = "");

}  // namespace pmelab
