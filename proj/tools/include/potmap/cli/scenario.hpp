#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "potmap/cli/expression.hpp"
#include "potmap/energy.hpp"
#include "potmap/field.hpp"
#include "potmap/geometry.hpp"
#include "potmap/hamilton.hpp"
#include "potmap/jets.hpp"
#include "potmap/solvers.hpp"

namespace potmap::cli {

enum class MapKind { None, Expr, Integrate, Relax };

struct LieConfig {
  std::vector<std::vector<Expression>> generators;  // p rows of n expressions in x
  Tensor3 structure;                                // [c][a][b]
  std::vector<std::vector<Expression>> A;           // [b][a], expressions in t
};

/// A validated scenario with its expression-backed geometric objects built.
struct Scenario {
  std::string name;
  int p = 0;
  int n = 0;
  MetricSpec h;
  MetricSpec g;
  std::optional<DistTensorField> X;
  bool perfect_square = false;
  std::optional<Expression> c;
  MapKind map = MapKind::None;
  std::vector<Expression> map_expr;
  std::optional<std::vector<Expression>> reference;
  std::optional<std::vector<Expression>> boundary;
  std::optional<Vector> t0;
  std::optional<Vector> x0;
  std::optional<GridSpec> grid;
  SolveConfig solver;
  double relax_noise = 0.1;
  std::vector<std::string> prolong_modes{"eq11"};
  std::vector<HamiltonVariant> hamilton_variants;
  int hamilton_samples = 5;
  int check_samples = 20;
  std::vector<std::pair<double, double>> x_box;
  std::optional<LieConfig> lie;
  std::map<std::string, double> tolerances;
  std::vector<std::string> outputs{"report", "sheet_csv"};

  LagrangianSpec lagrangian() const;
  bool wants(const std::string& output) const;
};

/// Throws ConfigError naming the offending key, or ParseFailure for expressions.
Scenario parse_scenario(const nlohmann::json& j, const std::string& default_name);
Scenario load_scenario(const std::filesystem::path& path);

// Expression-backed objects, exposed for tests.
MetricSpec expression_metric(const std::vector<std::vector<Expression>>& components, std::vector<int> signature,
                             VarKind variables);
DistTensorField expression_field(const std::vector<std::vector<Expression>>& table, int p, int n);
SheetSample expression_sheet(const std::vector<Expression>& components, int p);
LieGroupData expression_lie_group(const LieConfig& cfg, int p, int n);

}  // namespace potmap::cli
