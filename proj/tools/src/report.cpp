#include "potmap/cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "potmap/energy.hpp"
#include "potmap/errors.hpp"

namespace potmap::cli {

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> table = {
      // check
      {"metric_compatibility", 1e-8},
      {"frame_duality", 1e-12},
      {"sasaki_reconstruction", 1e-10},
      {"grad_f", 1e-6},
      {"el_vs_eq11", 1e-10},
      {"legendre", 1e-12},
      {"causal_rescale", 1e-10},
      // prolong and solve
      {"first_order", 1e-6},
      {"integrability", 1e-6},
      {"eq9", 1e-6},
      {"eq10", 1e-6},
      {"eq11", 1e-6},
      {"eq12", 1e-6},
      {"eq11p", 1e-6},
      {"eq12p", 1e-6},
      {"reference_error", 1e-6},
      {"discrete_el", 1e-5},
      {"action_increase", 0.0},
      // hamilton
      {"theorem1_r1", 1e-8},
      {"theorem1_r2", 1e-6},
      {"theorem2_r1", 1e-8},
      {"theorem2_r2", 1e-6},
      {"theorem1_omega_exact", 1e-6},
      {"theorem2_omega_exact", 1e-6},
      {"theorem1_dH", 1e-6},
      {"theorem2_dH", 1e-6},
      {"dd_zero", 1e-6},
      // lie
      {"bracket", 1e-6},
      {"maurer_cartan", 1e-6},
      {"regularity", 0.0},
      {"lie_integrability", 1e-6},
      {"extremal", 1e-6},
      {"group_law", 1e-6},
  };
  return table;
}

void RunReport::add(const std::string& name, const std::vector<double>& samples, double tolerance) {
  ResidualStat st;
  st.tolerance = tolerance;
  if (!samples.empty()) {
    st.max = *std::max_element(samples.begin(), samples.end());
    st.mean = pairwise_sum(samples) / static_cast<double>(samples.size());
  }
  bool finite = true;
  for (double v : samples) finite = finite && std::isfinite(v);
  st.pass = finite && st.max <= tolerance;
  residuals.emplace_back(name, st);
}

bool RunReport::all_pass() const {
  return std::all_of(residuals.begin(), residuals.end(), [](const auto& r) { return r.second.pass; });
}

nlohmann::ordered_json report_json(const RunReport& report) {
  nlohmann::ordered_json j;
  j["scenario"] = report.scenario;
  j["command"] = report.command;
  nlohmann::ordered_json res = nlohmann::ordered_json::object();
  for (const auto& [name, st] : report.residuals) {
    res[name] = {{"max", st.max}, {"mean", st.mean}, {"tolerance", st.tolerance}, {"pass", st.pass}};
  }
  j["residuals"] = res;
  j["values"] = report.values;
  j["files"] = report.files;
  if (report.error) j["error"] = {{"code", report.error->first}, {"message", report.error->second}};
  nlohmann::ordered_json defaults = nlohmann::ordered_json::object();
  for (const auto& [k, v] : default_tolerances()) defaults[k] = v;
  j["defaults"] = defaults;
  j["timings"] = {{"total_ms", report.elapsed_ms}};
  return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IOError, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::IOError, "failed writing '" + path.string() + "'");
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string sheet_csv(const GridSpec& grid, const Matrix& node_values) {
  std::string out;
  const int p = grid.dim();
  const int n = static_cast<int>(node_values.cols());
  for (int a = 0; a < p; ++a) out += (a ? ",t" : "t") + std::to_string(a + 1);
  for (int i = 0; i < n; ++i) out += ",x" + std::to_string(i + 1);
  out += '\n';
  for (std::size_t k = 0; k < grid.node_count(); ++k) {
    const Vector t = grid.node_point(k);
    for (int a = 0; a < p; ++a) out += (a ? "," : "") + fmt17(t(a));
    for (int i = 0; i < n; ++i) out += "," + fmt17(node_values(static_cast<Eigen::Index>(k), i));
    out += '\n';
  }
  return out;
}

void write_sheet_csv(const std::filesystem::path& path, const GridSpec& grid, const Matrix& node_values) {
  write_text_file(path, sheet_csv(grid, node_values));
}

SheetSample read_sheet_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOError, "cannot read '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::IOError, "empty sheet file");
  int p = 0;
  int n = 0;
  {
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) {
      if (!col.empty() && col[0] == 't' && n == 0) {
        ++p;
      } else if (!col.empty() && col[0] == 'x') {
        ++n;
      } else {
        throw Error(ErrorCode::IOError, "unexpected sheet column '" + col + "'");
      }
    }
  }
  if (p == 0 || n == 0) throw Error(ErrorCode::IOError, "sheet header needs t and x columns");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) throw Error(ErrorCode::IOError, "malformed number '" + cell + "'");
      row.push_back(v);
    }
    if (static_cast<int>(row.size()) != p + n) throw Error(ErrorCode::IOError, "sheet row has wrong width");
    rows.push_back(std::move(row));
  }
  GridSpec grid;
  for (int a = 0; a < p; ++a) {
    std::set<double> distinct;
    for (const auto& r : rows) distinct.insert(r[a]);
    grid.lo.push_back(*distinct.begin());
    grid.hi.push_back(*distinct.rbegin());
    grid.nodes.push_back(static_cast<int>(distinct.size()));
  }
  if (grid.node_count() != rows.size()) throw Error(ErrorCode::IOError, "sheet rows do not form a full grid");
  Matrix values(static_cast<Eigen::Index>(rows.size()), n);
  for (std::size_t k = 0; k < rows.size(); ++k)
    for (int i = 0; i < n; ++i) values(static_cast<Eigen::Index>(k), i) = rows[k][p + i];
  return SheetSample::sampled(grid, values);
}

}  // namespace potmap::cli
