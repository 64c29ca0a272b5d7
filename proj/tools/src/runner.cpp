#include "potmap/cli/runner.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include "potmap/hamilton.hpp"
#include "potmap/potential.hpp"
#include "potmap/solvers.hpp"

namespace potmap::cli {

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::ParseError:
    case ErrorCode::BadMode:
    case ErrorCode::MissingField:
    case ErrorCode::SignatureMismatch: return kExitConfig;
    default: return kExitRuntime;
  }
}

void parse_tolerance_override(const std::string& text, std::map<std::string, double>& out) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0)
    throw Error(ErrorCode::ConfigError, "--tol expects KEY=VAL, got '" + text + "'");
  const std::string key = text.substr(0, eq);
  const std::string val = text.substr(eq + 1);
  char* end = nullptr;
  const double v = std::strtod(val.c_str(), &end);
  if (val.empty() || *end != '\0' || !(v >= 0.0))
    throw Error(ErrorCode::ConfigError, "--tol " + key + ": '" + val + "' is not a nonnegative number");
  if (!default_tolerances().count(key)) throw Error(ErrorCode::ConfigError, "--tol " + key + ": unknown residual name");
  out[key] = v;
}

namespace {

class Context {
 public:
  Context(const Scenario& s, const RunOptions& o, RunReport& r) : s_(s), o_(o), r_(r), rng_(o.seed) {}

  double tol(const std::string& name) const {
    if (auto it = o_.tol_overrides.find(name); it != o_.tol_overrides.end()) return it->second;
    if (auto it = s_.tolerances.find(name); it != s_.tolerances.end()) return it->second;
    return default_tolerances().at(name);
  }

  void add(const std::string& name, const std::vector<double>& samples) { r_.add(name, samples, tol(name)); }

  const Scenario& s() const { return s_; }
  RunReport& report() { return r_; }
  std::mt19937_64& rng() { return rng_; }

  const GridSpec& grid(const std::string& why) const {
    if (!s_.grid) throw Error(ErrorCode::ConfigError, "scenario key 'grid': required for " + why);
    return *s_.grid;
  }
  const DistTensorField& field(const std::string& why) const {
    if (!s_.X) throw Error(ErrorCode::ConfigError, "scenario key 'X': required for " + why);
    return *s_.X;
  }
  const Vector& t0(const std::string& why) const {
    if (!s_.t0) throw Error(ErrorCode::ConfigError, "scenario key 'initial': required for " + why);
    return *s_.t0;
  }
  const Vector& x0(const std::string& why) const {
    if (!s_.x0) throw Error(ErrorCode::ConfigError, "scenario key 'initial': required for " + why);
    return *s_.x0;
  }

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }

 private:
  const Scenario& s_;
  const RunOptions& o_;
  RunReport& r_;
  std::mt19937_64 rng_;
};

std::vector<std::size_t> interior_nodes(const GridSpec& grid, std::size_t limit) {
  std::vector<std::size_t> all;
  for (std::size_t k = 0; k < grid.node_count(); ++k)
    if (grid.is_interior(grid.unflatten(k))) all.push_back(k);
  if (all.size() <= limit) return all;
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < limit; ++k) out.push_back(all[k * (all.size() - 1) / (limit - 1)]);
  return out;
}

Vector eval_vector(const std::vector<Expression>& e, const Vector& t) {
  static const Vector empty;
  Vector v(static_cast<Eigen::Index>(e.size()));
  for (std::size_t i = 0; i < e.size(); ++i) v(static_cast<Eigen::Index>(i)) = e[i].evaluate(t, empty);
  return v;
}

void emit_sheet(Context& ctx, const SheetSample& sheet, const std::filesystem::path& path, bool write_files) {
  if (!write_files || !ctx.s().wants("sheet_csv") || sheet.mode != SheetMode::Grid) return;
  write_sheet_csv(path, sheet.grid, sheet.node_values);
  ctx.report().files.push_back(path.filename().string());
}

void reference_error(Context& ctx, const SheetSample& sheet, const std::vector<Expression>* reference) {
  if (!reference || sheet.mode != SheetMode::Grid) return;
  std::vector<double> err;
  for (std::size_t k = 0; k < sheet.grid.node_count(); ++k) {
    const Vector ref = eval_vector(*reference, sheet.grid.node_point(k));
    err.push_back((sheet.node_values.row(static_cast<Eigen::Index>(k)).transpose() - ref).cwiseAbs().maxCoeff());
  }
  ctx.add("reference_error", err);
}

SheetSample integrated_sheet(Context& ctx, const std::string& why) {
  return integrate_first_order(ctx.field(why), ctx.t0(why), ctx.x0(why), ctx.grid(why), ctx.s().solver);
}

// Analytic sheets from an expression map, or the integrated sheet.
SheetSample evaluation_sheet(Context& ctx, const std::string& why) {
  switch (ctx.s().map) {
    case MapKind::Expr: return expression_sheet(ctx.s().map_expr, ctx.s().p);
    case MapKind::Integrate: return integrated_sheet(ctx, why);
    default:
      throw Error(ErrorCode::ConfigError, "scenario key 'map': " + why + " needs an expression map or \"integrate\"");
  }
}

void first_order_residual(Context& ctx, const SheetSample& sheet, const std::vector<std::size_t>& nodes) {
  const DistTensorField& X = ctx.field("the first-order residual");
  std::vector<double> r;
  for (std::size_t k : nodes) {
    const Vector t = ctx.grid("sampling").node_point(k);
    const SheetJet jet = sample_jet(sheet, t, false);
    r.push_back((jet.x1 - X(t, jet.x)).cwiseAbs().maxCoeff());
  }
  ctx.add("first_order", r);
}

void run_check(Context& ctx) {
  const Scenario& s = ctx.s();
  const int p = s.p;
  const int n = s.n;
  std::vector<double> compat, dual, sasaki, gradf, el, legendre, rescale;
  int counts[3] = {0, 0, 0};
  const LagrangianSpec ps{s.h, s.g, s.X, {}, true, true};
  const LagrangianSpec no_cross{s.h, s.g, s.X, {}, true, false};
  std::optional<DistTensorField> rescaled;
  if (s.X) rescaled = rescaled_field(*s.X, s.h, s.g);

  for (int k = 0; k < s.check_samples; ++k) {
    Vector t(p);
    for (int a = 0; a < p; ++a)
      t(a) = s.grid ? ctx.uniform(s.grid->lo[a], s.grid->hi[a]) : ctx.uniform(0.0, 1.0);
    Vector x(n);
    for (int i = 0; i < n; ++i) {
      if (!s.x_box.empty()) {
        x(i) = ctx.uniform(s.x_box[i].first, s.x_box[i].second);
      } else {
        const double c = s.x0 ? (*s.x0)(i) : 0.0;
        x(i) = ctx.uniform(c - 0.5, c + 0.5);
      }
    }
    SheetJet jet{t, x, Matrix(p, n), Tensor3(p, p, n)};
    for (int a = 0; a < p; ++a)
      for (int i = 0; i < n; ++i) jet.x1(a, i) = ctx.normal();
    for (int a = 0; a < p; ++a)
      for (int b = a; b < p; ++b)
        for (int i = 0; i < n; ++i) jet.xx(a, b, i) = jet.xx(b, a, i) = ctx.normal();

    verify_metric(s.h, t);
    verify_metric(s.g, x);
    compat.push_back(std::max(compatibility_residual(s.h, t).max_abs(), compatibility_residual(s.g, x).max_abs()));

    const JetPoint jp = jet.point();
    const AdaptedFrames fr = adapted_frames(s.h, s.g, jp);
    const int D = static_cast<int>(fr.frame.rows());
    dual.push_back(max_abs(Matrix(fr.frame * fr.coframe.transpose() - Matrix::Identity(D, D))));
    const Matrix S = sasaki_metric(s.h, s.g, jp);
    sasaki.push_back(max_abs(Matrix(fr.frame * S * fr.frame.transpose() - sasaki_adapted_blocks(s.h, s.g, jp))));

    if (!s.X) continue;
    const DistTensorField& X = *s.X;
    const GradfCheck gc = gradf_term_check(X, s.h, s.g, t, x);
    gradf.push_back(max_abs(Vector(gc.term - gc.gradf_fd)) / std::max(1.0, max_abs(gc.gradf_fd)));
    const Vector r11 = prolongation_residual(X, s.h, s.g, jet, ProlongationMode::Eq11);
    const Vector e = euler_lagrange_residual(ps, jet) + metric_components(s.g, x) * r11;
    el.push_back(max_abs(e));
    legendre.push_back(std::abs(hamiltonian_density(ps, jp) - hamiltonian_density(no_cross, jp)));

    const double f = potential_energy(X, s.h, s.g, t, x);
    const CausalClass kind = classify_potential_energy(f);
    ++counts[static_cast<int>(kind)];
    if (std::abs(f) > kCriticalTol) {
      const double fr2 = potential_energy(*rescaled, s.h, s.g, t, x);
      rescale.push_back(std::abs(std::abs(fr2) - 0.5));
    }
  }
  ctx.add("metric_compatibility", compat);
  ctx.add("frame_duality", dual);
  ctx.add("sasaki_reconstruction", sasaki);
  if (s.X) {
    ctx.add("grad_f", gradf);
    ctx.add("el_vs_eq11", el);
    ctx.add("legendre", legendre);
    ctx.add("causal_rescale", rescale);
    ctx.report().values["causal_counts"] = {
        {"timelike", counts[0]}, {"lightlike", counts[1]}, {"spacelike", counts[2]}};
  }
  ctx.report().values["samples"] = s.check_samples;
}

void run_prolong(Context& ctx, const std::filesystem::path& sheet_path, bool write_files) {
  const Scenario& s = ctx.s();
  const DistTensorField& X = ctx.field("prolong");
  const GridSpec& grid = ctx.grid("prolong");
  const SheetSample sheet = evaluation_sheet(ctx, "prolong");
  const std::vector<std::size_t> nodes =
      interior_nodes(grid, sheet.mode == SheetMode::Analytic ? 2000 : grid.node_count());
  first_order_residual(ctx, sheet, nodes);
  for (const std::string& name : s.prolong_modes) {
    const ProlongationMode mode = parse_prolongation_mode(name);
    std::vector<double> r;
    for (std::size_t k : nodes) {
      const Vector t = grid.node_point(k);
      if (is_traced(mode)) {
        r.push_back(max_abs(prolongation_residual(X, s.h, s.g, sheet, t, mode)));
      } else {
        r.push_back(untraced_prolongation_residual(X, s.h, s.g, sample_jet(sheet, t), mode).max_abs());
      }
    }
    ctx.add(name, r);
  }
  if (s.p >= 2) {
    std::vector<double> r;
    for (std::size_t k : nodes) {
      const Vector t = grid.node_point(k);
      r.push_back(integrability_residual(X, t, sheet.at(t)).max_abs());
    }
    ctx.add("integrability", r);
  }
  reference_error(ctx, sheet, s.reference ? &*s.reference : nullptr);
  emit_sheet(ctx, sheet, sheet_path, write_files);
}

void run_solve(Context& ctx, const std::filesystem::path& sheet_path, bool write_files) {
  const Scenario& s = ctx.s();
  const GridSpec& grid = ctx.grid("solve");
  if (s.map != MapKind::Relax) {
    // An expression map becomes the reference for the integrated sheet.
    const SheetSample sheet = integrated_sheet(ctx, "solve");
    first_order_residual(ctx, sheet, interior_nodes(grid, grid.node_count()));
    reference_error(ctx, sheet, s.reference ? &*s.reference : s.map == MapKind::Expr ? &s.map_expr : nullptr);
    emit_sheet(ctx, sheet, sheet_path, write_files);
    return;
  }

  const std::vector<Expression>* bexpr = s.boundary ? &*s.boundary : s.reference ? &*s.reference : nullptr;
  if (!bexpr) throw Error(ErrorCode::ConfigError, "scenario key 'boundary': required for relax");
  validate_grid(grid);
  const std::size_t N = grid.node_count();
  Matrix boundary(static_cast<Eigen::Index>(N), s.n);
  for (std::size_t k = 0; k < N; ++k)
    boundary.row(static_cast<Eigen::Index>(k)) = eval_vector(*bexpr, grid.node_point(k)).transpose();

  Matrix init = boundary;
  if (s.p == 1) {
    const Eigen::RowVectorXd a = boundary.row(0);
    const Eigen::RowVectorXd b = boundary.row(static_cast<Eigen::Index>(N - 1));
    for (std::size_t k = 0; k < N; ++k) {
      const double w = static_cast<double>(k) / static_cast<double>(N - 1);
      init.row(static_cast<Eigen::Index>(k)) = (1.0 - w) * a + w * b;
    }
  }
  for (std::size_t k = 0; k < N; ++k) {
    if (!grid.is_interior(grid.unflatten(k))) continue;
    for (int i = 0; i < s.n; ++i) init(static_cast<Eigen::Index>(k), i) += ctx.uniform(-s.relax_noise, s.relax_noise);
  }

  const RelaxResult res = relax_to_extremal(s.lagrangian(), boundary, SheetSample::sampled(grid, init), s.solver);
  const Matrix r = discrete_euler_lagrange_residual(s.lagrangian(), res.sheet);
  std::vector<double> per_node;
  for (std::size_t k : interior_nodes(grid, N)) per_node.push_back(r.row(static_cast<Eigen::Index>(k)).cwiseAbs().maxCoeff());
  ctx.add("discrete_el", per_node);
  std::vector<double> increase;
  for (std::size_t k = 1; k < res.action_history.size(); ++k)
    increase.push_back(std::max(0.0, res.action_history[k] - res.action_history[k - 1]));
  ctx.add("action_increase", increase);
  reference_error(ctx, res.sheet, s.reference ? &*s.reference : nullptr);
  ctx.report().values["final_action"] = res.action_history.back();
  ctx.report().values["initial_action"] = res.action_history.front();
  ctx.report().values["iterations"] = res.iterations;
  ctx.report().values["converged"] = res.converged;
  emit_sheet(ctx, res.sheet, sheet_path, write_files);
}

void run_hamilton(Context& ctx) {
  const Scenario& s = ctx.s();
  const GridSpec& grid = ctx.grid("hamilton");
  const SheetSample sheet = evaluation_sheet(ctx, "hamilton");
  const std::vector<std::size_t> nodes = interior_nodes(grid, 200);

  // Random jets over sheet points for the form identities.
  std::vector<JetPoint> jets;
  for (int k = 0; k < s.hamilton_samples; ++k) {
    const std::size_t node = nodes[static_cast<std::size_t>(ctx.uniform(0.0, 1.0) * static_cast<double>(nodes.size())) %
                                   nodes.size()];
    const Vector t = grid.node_point(node);
    JetPoint jp{t, sheet.at(t), Matrix(s.p, s.n)};
    for (int a = 0; a < s.p; ++a)
      for (int i = 0; i < s.n; ++i) jp.x1(a, i) = ctx.normal();
    jets.push_back(jp);
  }

  std::vector<double> dd;
  for (HamiltonVariant v : s.hamilton_variants) {
    const std::string tag(to_string(v));
    const HamiltonSetup setup = make_hamilton_setup(s.X, s.h, s.g, v);
    std::vector<double> r1, r2;
    for (std::size_t k : nodes) {
      const HamiltonResidual hr = hamilton_system_residual(setup, sample_jet(sheet, grid.node_point(k)));
      r1.push_back(max_abs(hr.r1));
      r2.push_back(max_abs(hr.r2));
    }
    ctx.add(tag + "_r1", r1);
    ctx.add(tag + "_r2", r2);

    const LiouvilleForms lf = liouville_and_omega(setup);
    const DifferentialForm H = hamiltonian_form(setup);
    const DifferentialForm dH = form_d(H);
    const DifferentialForm ddH = form_d(dH);
    std::vector<double> omega, dh;
    for (const JetPoint& jp : jets) {
      const Vector z = setup.chart.coords(jp);
      for (int a = 0; a < s.p; ++a) {
        const DifferentialForm dtheta = form_d(lf.theta[a]);
        omega.push_back((lf.omega[a](z) + dtheta(z)).max_abs());
        // d(dθ) would exceed the top degree on small jet spaces.
        if (dtheta.degree() + 1 <= setup.chart.dim()) dd.push_back(form_d(dtheta)(z).max_abs());
      }
      const FormValue printed = wedge(hamiltonian_differential_prefactor(setup, jp),
                                      volume_form_value(setup.chart, s.h, jp.t));
      dh.push_back((dH(z) - printed).max_abs());
      dd.push_back(ddH(z).max_abs());
    }
    ctx.add(tag + "_omega_exact", omega);
    ctx.add(tag + "_dH", dh);
  }
  ctx.add("dd_zero", dd);
}

void run_lie(Context& ctx, const std::filesystem::path& sheet_path, bool write_files) {
  const Scenario& s = ctx.s();
  if (!s.lie) throw Error(ErrorCode::ConfigError, "scenario key 'lie': required for the lie command");
  const LieReport rep = lie_group_check(expression_lie_group(*s.lie, s.p, s.n), s.h, s.g, ctx.t0("lie"),
                                        ctx.x0("lie"), ctx.grid("lie"), s.solver);
  ctx.add("bracket", {rep.bracket_residual});
  ctx.add("maurer_cartan", {rep.maurer_cartan_residual});
  ctx.add("regularity", {std::abs(rep.det_A) > 1e-12 ? 0.0 : 1.0});
  ctx.add("lie_integrability", {rep.integrability_residual});
  ctx.add("extremal", {rep.extremal_residual});
  if (rep.group_law_residual) ctx.add("group_law", {*rep.group_law_residual});
  ctx.report().values["det_A"] = rep.det_A;
  reference_error(ctx, rep.sheet, s.reference ? &*s.reference : nullptr);
  emit_sheet(ctx, rep.sheet, sheet_path, write_files);
}

}  // namespace

RunReport execute(const Scenario& scenario, const std::string& command, const RunOptions& options,
                  bool write_files) {
  for (const auto& [k, v] : scenario.tolerances)
    if (!default_tolerances().count(k))
      throw Error(ErrorCode::ConfigError, "scenario key 'tolerances." + k + "': unknown residual name");
  RunReport report;
  report.scenario = scenario.name;
  report.command = command;
  Context ctx(scenario, options, report);
  const std::filesystem::path sheet_path = options.out_dir / (scenario.name + "." + command + ".sheet.csv");
  if (command == "check") {
    run_check(ctx);
  } else if (command == "prolong") {
    run_prolong(ctx, sheet_path, write_files);
  } else if (command == "solve") {
    run_solve(ctx, sheet_path, write_files);
  } else if (command == "hamilton") {
    run_hamilton(ctx);
  } else if (command == "lie") {
    run_lie(ctx, sheet_path, write_files);
  } else {
    throw Error(ErrorCode::ConfigError, "unknown command '" + command + "'");
  }
  return report;
}

RunOutcome run_scenario(const std::filesystem::path& scenario_path, const std::string& command,
                        const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  RunOutcome out;
  out.report.scenario = scenario_path.stem().string();
  out.report.command = command;
  try {
    const Scenario scenario = load_scenario(scenario_path);
    out.report.scenario = scenario.name;
    out.report = execute(scenario, command, options, true);
    out.exit_code = out.report.all_pass() ? kExitOk : kExitTolerance;
  } catch (const Error& e) {
    out.report.error = {std::string(to_string(e.code())), e.what()};
    out.exit_code = exit_code_for(e.code());
  } catch (const std::exception& e) {
    out.report.error = {"Internal", e.what()};
    out.exit_code = kExitRuntime;
  }
  out.report.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  try {
    const std::filesystem::path path = options.out_dir / (out.report.scenario + "." + command + ".json");
    write_text_file(path, report_json(out.report).dump(2) + "\n");
  } catch (const Error& e) {
    if (out.exit_code == kExitOk || out.exit_code == kExitTolerance) out.exit_code = kExitRuntime;
    if (!out.report.error) out.report.error = {std::string(to_string(e.code())), e.what()};
  }
  return out;
}

}  // namespace potmap::cli
