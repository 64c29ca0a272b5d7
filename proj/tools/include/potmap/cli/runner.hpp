#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "potmap/cli/report.hpp"
#include "potmap/cli/scenario.hpp"

namespace potmap::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitTolerance = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

struct RunOptions {
  std::filesystem::path out_dir = "potmap_out";
  std::map<std::string, double> tol_overrides;
  std::uint64_t seed = 1;
};

struct RunOutcome {
  int exit_code = kExitOk;
  RunReport report;
};

/// Configuration problems map to 2, everything else raised at run time to 3.
int exit_code_for(ErrorCode code) noexcept;

/// Parses "KEY=VAL" into the overrides map. Throws ConfigError.
void parse_tolerance_override(const std::string& text, std::map<std::string, double>& out);

/// Runs one of check, prolong, solve, hamilton, lie. Never throws; the report
/// file is written whenever the output directory is writable.
RunOutcome run_scenario(const std::filesystem::path& scenario_path, const std::string& command,
                        const RunOptions& options);

/// Same on an already loaded scenario (exceptions propagate, no files written
/// unless `write_files`).
RunReport execute(const Scenario& scenario, const std::string& command, const RunOptions& options,
                  bool write_files);

}  // namespace potmap::cli
