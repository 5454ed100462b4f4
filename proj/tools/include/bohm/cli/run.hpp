#pragma once

#include "bohm/cli/config.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace bohm::cli {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double limit = 0.0;
  std::string detail;
};

enum ExitCode : int { exit_ok = 0, exit_check_failed = 1, exit_config_error = 2, exit_runtime_error = 3 };

struct RunResult {
  int exit_code = exit_ok;
  std::vector<CheckResult> checks;
  std::filesystem::path directory;  // <out>/<command>
  std::vector<std::string> artifacts;  // relative to directory
  std::string error;
};

// Executes a validated config. Artifacts go to <out>/<command>/, which is
// cleared first; manifest.json is written even when the run fails.
RunResult run(const RunConfig& cfg);

std::string version();

}  // namespace bohm::cli
