#include "potmap/cli/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "potmap/potential.hpp"

namespace potmap::cli {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& key, const std::string& what) {
  throw Error(ErrorCode::ConfigError, "scenario key '" + key + "': " + what);
}

int get_int(const json& j, const std::string& key, int min_value) {
  if (!j.is_number_integer()) config_error(key, "expected an integer");
  const int v = j.get<int>();
  if (v < min_value) config_error(key, "must be at least " + std::to_string(min_value));
  return v;
}

double get_number(const json& j, const std::string& key) {
  if (!j.is_number()) config_error(key, "expected a number");
  return j.get<double>();
}

Expression get_expression(const json& j, const std::string& key, VariableLimits limits) {
  if (j.is_number()) return Expression::number(j.get<double>());
  if (!j.is_string()) config_error(key, "expected an expression string or a number");
  try {
    return parse_expression(j.get<std::string>(), limits);
  } catch (const ParseFailure& e) {
    throw Error(ErrorCode::ParseError, "scenario key '" + key + "': " + e.what());
  }
}

std::vector<Expression> get_expr_vector(const json& j, const std::string& key, std::size_t size, VariableLimits limits) {
  if (!j.is_array()) config_error(key, "expected an array");
  if (j.size() != size)
    config_error(key, "expected " + std::to_string(size) + " entries, got " + std::to_string(j.size()));
  std::vector<Expression> out;
  for (std::size_t k = 0; k < size; ++k) out.push_back(get_expression(j[k], key + "[" + std::to_string(k) + "]", limits));
  return out;
}

std::vector<std::vector<Expression>> get_expr_table(const json& j, const std::string& key, std::size_t rows,
                                                    std::size_t cols, const std::string& row_name,
                                                    VariableLimits limits) {
  if (!j.is_array()) config_error(key, "expected an array of rows");
  if (j.size() != rows)
    config_error(key, "expected " + std::to_string(rows) + " rows (" + row_name + "), got " + std::to_string(j.size()));
  std::vector<std::vector<Expression>> out;
  for (std::size_t r = 0; r < rows; ++r)
    out.push_back(get_expr_vector(j[r], key + "[" + std::to_string(r) + "]", cols, limits));
  return out;
}

Vector get_vector(const json& j, const std::string& key, int size) {
  if (!j.is_array()) config_error(key, "expected an array");
  if (static_cast<int>(j.size()) != size)
    config_error(key, "expected " + std::to_string(size) + " entries, got " + std::to_string(j.size()));
  Vector v(size);
  for (int k = 0; k < size; ++k) v(k) = get_number(j[k], key + "[" + std::to_string(k) + "]");
  return v;
}

void reject_unknown(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) config_error(where.empty() ? k : where + "." + k, "unknown key");
}

MetricSpec parse_metric(const json& j, const std::string& key, int dim, VarKind vars) {
  if (!j.is_object()) config_error(key, "expected an object with 'catalog' or 'components'");
  reject_unknown(j, key, {"catalog", "components", "signature"});
  if (j.contains("catalog")) {
    if (!j["catalog"].is_string()) config_error(key + ".catalog", "expected a string");
    try {
      return catalog_metric(j["catalog"].get<std::string>(), dim);
    } catch (const Error& e) {
      config_error(key + ".catalog", e.what());
    }
  }
  if (!j.contains("components")) config_error(key, "needs 'catalog' or 'components'");
  const VariableLimits limits = vars == VarKind::T ? VariableLimits{dim, 0} : VariableLimits{0, dim};
  const auto table = get_expr_table(j["components"], key + ".components", dim, dim, "dimension", limits);
  if (!j.contains("signature")) config_error(key + ".signature", "required with 'components'");
  const json& sj = j["signature"];
  if (!sj.is_array() || static_cast<int>(sj.size()) != dim)
    config_error(key + ".signature", "expected " + std::to_string(dim) + " entries of +1/-1");
  std::vector<int> sig;
  for (const auto& s : sj) {
    if (!s.is_number_integer() || (s.get<int>() != 1 && s.get<int>() != -1))
      config_error(key + ".signature", "entries must be +1 or -1");
    sig.push_back(s.get<int>());
  }
  return expression_metric(table, sig, vars);
}

GridSpec parse_grid(const json& j, int p) {
  if (!j.is_object() || !j.contains("axes")) config_error("grid", "expected {\"axes\": [...]}");
  reject_unknown(j, "grid", {"axes"});
  const json& axes = j["axes"];
  if (!axes.is_array() || static_cast<int>(axes.size()) != p)
    config_error("grid.axes", "expected " + std::to_string(p) + " axes (p)");
  GridSpec grid;
  for (int a = 0; a < p; ++a) {
    const std::string key = "grid.axes[" + std::to_string(a) + "]";
    const json& ax = axes[a];
    if (!ax.is_object()) config_error(key, "expected {min, max, nodes}");
    reject_unknown(ax, key, {"min", "max", "nodes"});
    for (const char* field : {"min", "max", "nodes"})
      if (!ax.contains(field)) config_error(key + "." + field, "missing");
    grid.lo.push_back(get_number(ax["min"], key + ".min"));
    grid.hi.push_back(get_number(ax["max"], key + ".max"));
    grid.nodes.push_back(get_int(ax["nodes"], key + ".nodes", 3));
    if (!(grid.hi.back() > grid.lo.back())) config_error(key, "max must exceed min");
  }
  return grid;
}

}  // namespace

MetricSpec expression_metric(const std::vector<std::vector<Expression>>& components, std::vector<int> signature,
                             VarKind variables) {
  const int dim = static_cast<int>(components.size());
  std::vector<std::vector<std::vector<Expression>>> partial(dim);
  for (int c = 0; c < dim; ++c) {
    partial[c].resize(dim);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) partial[c][a].push_back(components[a][b].derivative(Variable{variables, c}));
  }
  const bool on_t = variables == VarKind::T;
  auto eval = [on_t](const Expression& e, const Vector& q) {
    static const Vector empty;
    return on_t ? e.evaluate(q, empty) : e.evaluate(empty, q);
  };
  MetricSpec m;
  m.dim = dim;
  m.signature = std::move(signature);
  m.name = "custom";
  m.components = [components, dim, eval](const Vector& q) {
    Matrix out(dim, dim);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) out(a, b) = eval(components[a][b], q);
    return out;
  };
  m.partials = [partial, dim, eval](const Vector& q) {
    Tensor3 out(dim, dim, dim);
    for (int c = 0; c < dim; ++c)
      for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) out(c, a, b) = eval(partial[c][a][b], q);
    return out;
  };
  return m;
}

DistTensorField expression_field(const std::vector<std::vector<Expression>>& table, int p, int n) {
  std::vector<Expression> dt;  // [(b * p + a) * n + i]
  std::vector<Expression> dx;  // [(j * p + a) * n + i]
  for (int b = 0; b < p; ++b)
    for (int a = 0; a < p; ++a)
      for (int i = 0; i < n; ++i) dt.push_back(table[a][i].derivative(Variable{VarKind::T, b}));
  for (int j = 0; j < n; ++j)
    for (int a = 0; a < p; ++a)
      for (int i = 0; i < n; ++i) dx.push_back(table[a][i].derivative(Variable{VarKind::X, j}));
  DistTensorField X;
  X.p = p;
  X.n = n;
  X.components = [table, p, n](const Vector& t, const Vector& x) {
    Matrix out(p, n);
    for (int a = 0; a < p; ++a)
      for (int i = 0; i < n; ++i) out(a, i) = table[a][i].evaluate(t, x);
    return out;
  };
  X.dt_partial = [dt, p, n](const Vector& t, const Vector& x) {
    Tensor3 out(p, p, n);
    for (int b = 0; b < p; ++b)
      for (int a = 0; a < p; ++a)
        for (int i = 0; i < n; ++i) out(b, a, i) = dt[(b * p + a) * n + i].evaluate(t, x);
    return out;
  };
  X.dx_partial = [dx, p, n](const Vector& t, const Vector& x) {
    Tensor3 out(n, p, n);
    for (int j = 0; j < n; ++j)
      for (int a = 0; a < p; ++a)
        for (int i = 0; i < n; ++i) out(j, a, i) = dx[(j * p + a) * n + i].evaluate(t, x);
    return out;
  };
  return X;
}

SheetSample expression_sheet(const std::vector<Expression>& components, int p) {
  const int n = static_cast<int>(components.size());
  std::vector<Expression> d1;  // [a * n + i]
  std::vector<Expression> d2;  // [(a * p + b) * n + i]
  for (int a = 0; a < p; ++a)
    for (int i = 0; i < n; ++i) d1.push_back(components[i].derivative(Variable{VarKind::T, a}));
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      for (int i = 0; i < n; ++i) d2.push_back(d1[a * n + i].derivative(Variable{VarKind::T, b}));
  static const Vector empty;
  return SheetSample::analytic(
      p, n,
      [components, n](const Vector& t) {
        Vector v(n);
        for (int i = 0; i < n; ++i) v(i) = components[i].evaluate(t, empty);
        return v;
      },
      [d1, p, n](const Vector& t) {
        Matrix m(p, n);
        for (int a = 0; a < p; ++a)
          for (int i = 0; i < n; ++i) m(a, i) = d1[a * n + i].evaluate(t, empty);
        return m;
      },
      [d2, p, n](const Vector& t) {
        Tensor3 m(p, p, n);
        for (int a = 0; a < p; ++a)
          for (int b = 0; b < p; ++b)
            for (int i = 0; i < n; ++i) m(a, b, i) = d2[(a * p + b) * n + i].evaluate(t, empty);
        return m;
      });
}

LieGroupData expression_lie_group(const LieConfig& cfg, int p, int n) {
  static const Vector empty;
  LieGroupData data;
  data.p = p;
  data.n = n;
  data.C = cfg.structure;
  for (int b = 0; b < p; ++b) {
    const std::vector<Expression> gen = cfg.generators[b];
    data.xi.push_back([gen, n](const Vector& x) {
      Vector v(n);
      for (int i = 0; i < n; ++i) v(i) = gen[i].evaluate(empty, x);
      return v;
    });
  }
  const auto A = cfg.A;
  std::vector<Expression> dA;  // [(c * p + b) * p + a]
  for (int c = 0; c < p; ++c)
    for (int b = 0; b < p; ++b)
      for (int a = 0; a < p; ++a) dA.push_back(A[b][a].derivative(Variable{VarKind::T, c}));
  data.A = [A, p](const Vector& t) {
    Matrix m(p, p);
    for (int b = 0; b < p; ++b)
      for (int a = 0; a < p; ++a) m(b, a) = A[b][a].evaluate(t, empty);
    return m;
  };
  data.dA = [dA, p](const Vector& t) {
    Tensor3 m(p, p, p);
    for (int c = 0; c < p; ++c)
      for (int b = 0; b < p; ++b)
        for (int a = 0; a < p; ++a) m(c, b, a) = dA[(c * p + b) * p + a].evaluate(t, empty);
    return m;
  };
  return data;
}

LagrangianSpec Scenario::lagrangian() const {
  LagrangianSpec spec{h, g, X, {}, perfect_square, true};
  if (c) {
    const Expression e = *c;
    spec.c = [e](const Vector& t, const Vector& x) { return e.evaluate(t, x); };
  }
  return spec;
}

bool Scenario::wants(const std::string& output) const {
  return std::find(outputs.begin(), outputs.end(), output) != outputs.end();
}

Scenario parse_scenario(const json& j, const std::string& default_name) {
  if (!j.is_object()) config_error("<root>", "expected a JSON object");
  reject_unknown(j, "", {"name", "description", "p", "n", "h", "g", "X", "c", "map", "reference", "boundary",
                         "initial", "grid", "solver", "prolong", "hamilton", "check", "lie", "tolerances",
                         "outputs"});
  Scenario s;
  s.name = default_name;
  if (j.contains("name")) {
    if (!j["name"].is_string()) config_error("name", "expected a string");
    s.name = j["name"].get<std::string>();
  }
  if (!j.contains("p")) config_error("p", "missing");
  if (!j.contains("n")) config_error("n", "missing");
  s.p = get_int(j["p"], "p", 1);
  s.n = get_int(j["n"], "n", 1);
  const int p = s.p;
  const int n = s.n;
  const VariableLimits tx{p, n};

  s.h = j.contains("h") ? parse_metric(j["h"], "h", p, VarKind::T) : euclidean_metric(p);
  s.g = j.contains("g") ? parse_metric(j["g"], "g", n, VarKind::X) : euclidean_metric(n);

  if (j.contains("X")) s.X = expression_field(get_expr_table(j["X"], "X", p, n, "p", tx), p, n);

  if (j.contains("c")) {
    if (j["c"].is_string() && j["c"].get<std::string>() == "perfect_square") {
      if (!s.X) config_error("c", "'perfect_square' requires X");
      s.perfect_square = true;
    } else {
      s.c = get_expression(j["c"], "c", tx);
    }
  } else {
    s.perfect_square = s.X.has_value();
  }

  const VariableLimits t_only{p, 0};
  if (j.contains("map")) {
    const json& m = j["map"];
    if (m.is_string()) {
      const std::string kind = m.get<std::string>();
      if (kind == "integrate") {
        s.map = MapKind::Integrate;
      } else if (kind == "relax") {
        s.map = MapKind::Relax;
      } else {
        config_error("map", "expected \"integrate\", \"relax\" or {\"expr\": [...]}");
      }
    } else if (m.is_object() && m.contains("expr")) {
      reject_unknown(m, "map", {"expr"});
      s.map = MapKind::Expr;
      s.map_expr = get_expr_vector(m["expr"], "map.expr", n, t_only);
    } else {
      config_error("map", "expected \"integrate\", \"relax\" or {\"expr\": [...]}");
    }
  }
  if (s.map == MapKind::Integrate && !s.X) config_error("map", "\"integrate\" requires X");
  if (j.contains("reference")) s.reference = get_expr_vector(j["reference"], "reference", n, t_only);
  if (j.contains("boundary")) s.boundary = get_expr_vector(j["boundary"], "boundary", n, t_only);

  if (j.contains("initial")) {
    const json& ini = j["initial"];
    if (!ini.is_object()) config_error("initial", "expected {t0, x0}");
    reject_unknown(ini, "initial", {"t0", "x0"});
    if (!ini.contains("t0")) config_error("initial.t0", "missing");
    if (!ini.contains("x0")) config_error("initial.x0", "missing");
    s.t0 = get_vector(ini["t0"], "initial.t0", p);
    s.x0 = get_vector(ini["x0"], "initial.x0", n);
  }
  if (j.contains("grid")) s.grid = parse_grid(j["grid"], p);

  if (j.contains("solver")) {
    const json& sv = j["solver"];
    if (!sv.is_object()) config_error("solver", "expected an object");
    reject_unknown(sv, "solver", {"method", "step", "max_steps", "relax_rate", "relax_tol", "max_iters", "noise"});
    if (sv.contains("method")) {
      if (!sv["method"].is_string()) config_error("solver.method", "expected \"rk4\" or \"euler\"");
      try {
        s.solver.method = parse_step_method(sv["method"].get<std::string>());
      } catch (const Error& e) {
        config_error("solver.method", e.what());
      }
    }
    if (sv.contains("step")) s.solver.step = get_number(sv["step"], "solver.step");
    if (sv.contains("max_steps")) s.solver.max_steps = get_int(sv["max_steps"], "solver.max_steps", 1);
    if (sv.contains("relax_rate")) s.solver.relax_rate = get_number(sv["relax_rate"], "solver.relax_rate");
    if (sv.contains("relax_tol")) s.solver.relax_tol = get_number(sv["relax_tol"], "solver.relax_tol");
    if (sv.contains("max_iters")) s.solver.max_iters = get_int(sv["max_iters"], "solver.max_iters", 1);
    if (sv.contains("noise")) s.relax_noise = get_number(sv["noise"], "solver.noise");
    try {
      s.solver.validate();
    } catch (const Error& e) {
      config_error("solver", e.what());
    }
  }

  if (j.contains("prolong")) {
    const json& pj = j["prolong"];
    if (!pj.is_object()) config_error("prolong", "expected an object");
    reject_unknown(pj, "prolong", {"modes"});
    if (pj.contains("modes")) {
      if (!pj["modes"].is_array()) config_error("prolong.modes", "expected an array");
      s.prolong_modes.clear();
      for (const auto& m : pj["modes"]) {
        if (!m.is_string()) config_error("prolong.modes", "expected mode names");
        try {
          parse_prolongation_mode(m.get<std::string>());
        } catch (const Error& e) {
          config_error("prolong.modes", e.what());
        }
        s.prolong_modes.push_back(m.get<std::string>());
      }
    }
  }

  if (s.X) {
    s.hamilton_variants = {HamiltonVariant::Theorem1, HamiltonVariant::Theorem2};
  } else {
    s.hamilton_variants = {HamiltonVariant::Theorem1};
  }
  if (j.contains("hamilton")) {
    const json& hj = j["hamilton"];
    if (!hj.is_object()) config_error("hamilton", "expected an object");
    reject_unknown(hj, "hamilton", {"variants", "samples"});
    if (hj.contains("variants")) {
      if (!hj["variants"].is_array()) config_error("hamilton.variants", "expected an array");
      s.hamilton_variants.clear();
      for (const auto& v : hj["variants"]) {
        if (!v.is_string()) config_error("hamilton.variants", "expected variant names");
        try {
          s.hamilton_variants.push_back(parse_hamilton_variant(v.get<std::string>()));
        } catch (const Error& e) {
          config_error("hamilton.variants", e.what());
        }
        if (s.hamilton_variants.back() == HamiltonVariant::Theorem2 && !s.X)
          config_error("hamilton.variants", "theorem2 requires X");
      }
    }
    if (hj.contains("samples")) s.hamilton_samples = get_int(hj["samples"], "hamilton.samples", 1);
  }

  if (j.contains("check")) {
    const json& cj = j["check"];
    if (!cj.is_object()) config_error("check", "expected an object");
    reject_unknown(cj, "check", {"samples", "x_box"});
    if (cj.contains("samples")) s.check_samples = get_int(cj["samples"], "check.samples", 1);
    if (cj.contains("x_box")) {
      const json& box = cj["x_box"];
      if (!box.is_array() || static_cast<int>(box.size()) != n)
        config_error("check.x_box", "expected " + std::to_string(n) + " [lo, hi] pairs (n)");
      for (int i = 0; i < n; ++i) {
        const std::string key = "check.x_box[" + std::to_string(i) + "]";
        if (!box[i].is_array() || box[i].size() != 2) config_error(key, "expected [lo, hi]");
        const double lo = get_number(box[i][0], key);
        const double hi = get_number(box[i][1], key);
        if (!(hi > lo)) config_error(key, "hi must exceed lo");
        s.x_box.emplace_back(lo, hi);
      }
    }
  }

  if (j.contains("lie")) {
    const json& lj = j["lie"];
    if (!lj.is_object()) config_error("lie", "expected an object");
    reject_unknown(lj, "lie", {"generators", "structure", "A"});
    for (const char* field : {"generators", "structure", "A"})
      if (!lj.contains(field)) config_error(std::string("lie.") + field, "missing");
    LieConfig lc;
    lc.generators = get_expr_table(lj["generators"], "lie.generators", p, n, "p", VariableLimits{0, n});
    lc.A = get_expr_table(lj["A"], "lie.A", p, p, "p", t_only);
    lc.structure = Tensor3(p, p, p);
    const json& cj = lj["structure"];
    if (!cj.is_array() || static_cast<int>(cj.size()) != p) config_error("lie.structure", "expected p x p x p numbers");
    for (int c = 0; c < p; ++c) {
      if (!cj[c].is_array() || static_cast<int>(cj[c].size()) != p)
        config_error("lie.structure", "expected p x p x p numbers");
      for (int a = 0; a < p; ++a) {
        if (!cj[c][a].is_array() || static_cast<int>(cj[c][a].size()) != p)
          config_error("lie.structure", "expected p x p x p numbers");
        for (int b = 0; b < p; ++b) lc.structure(c, a, b) = get_number(cj[c][a][b], "lie.structure");
      }
    }
    s.lie = std::move(lc);
  }

  if (j.contains("tolerances")) {
    const json& tj = j["tolerances"];
    if (!tj.is_object()) config_error("tolerances", "expected an object of name: value");
    for (const auto& [k, v] : tj.items()) {
      const double val = get_number(v, "tolerances." + k);
      if (!(val >= 0.0)) config_error("tolerances." + k, "must be non-negative");
      s.tolerances[k] = val;
    }
  }

  if (j.contains("outputs")) {
    const json& oj = j["outputs"];
    if (!oj.is_array()) config_error("outputs", "expected an array");
    s.outputs.clear();
    for (const auto& o : oj) {
      if (!o.is_string() || (o.get<std::string>() != "report" && o.get<std::string>() != "sheet_csv"))
        config_error("outputs", "entries must be \"report\" or \"sheet_csv\"");
      s.outputs.push_back(o.get<std::string>());
    }
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open scenario file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, "scenario file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_scenario(j, path.stem().string());
}

}  // namespace potmap::cli
