#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "potmap/jets.hpp"

namespace potmap::cli {

/// Default tolerance per residual name. Every report echoes this table.
const std::map<std::string, double>& default_tolerances();

struct ResidualStat {
  double max = 0.0;
  double mean = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

struct RunReport {
  std::string scenario;
  std::string command;
  std::vector<std::pair<std::string, ResidualStat>> residuals;  // insertion order
  nlohmann::ordered_json values = nlohmann::ordered_json::object();
  std::vector<std::string> files;
  double elapsed_ms = 0.0;
  std::optional<std::pair<std::string, std::string>> error;  // code, message

  /// Adds one residual from its samples (each already a nonnegative magnitude).
  void add(const std::string& name, const std::vector<double>& samples, double tolerance);
  bool all_pass() const;
};

nlohmann::ordered_json report_json(const RunReport& report);
/// Throws IOError.
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Header t1..tp,x1..xn, one row per node (last axis fastest), 17 significant digits.
std::string sheet_csv(const GridSpec& grid, const Matrix& node_values);
/// Throws IOError.
void write_sheet_csv(const std::filesystem::path& path, const GridSpec& grid, const Matrix& node_values);
/// Reads a sheet back, inferring the axes from the distinct parameter values.
/// Throws IOError on malformed input.
SheetSample read_sheet_csv(const std::filesystem::path& path);

}  // namespace potmap::cli
