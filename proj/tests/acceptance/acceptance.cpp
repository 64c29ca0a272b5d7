// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "support.hpp"

#include "potmap/energy.hpp"
#include "potmap/forms.hpp"
#include "potmap/hamilton.hpp"
#include "potmap/potential.hpp"
#include "potmap/solvers.hpp"

using namespace potmap;
using testkit::kPi;
using testkit::mat;
using testkit::vec;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Line {
  std::string label;
  double value;
  double tol;
  bool upper = true;  // value <= tol, otherwise value >= tol
  bool ok() const { return std::isfinite(value) && (upper ? value <= tol : value >= tol); }
};

int failures = 0;

void report(const char* id, const std::vector<Line>& lines, double elapsed) {
  bool ok = true;
  for (const Line& l : lines) ok = ok && l.ok();
  if (!ok) ++failures;
  std::printf("%-3s %s  (%.2fs)\n", id, ok ? "PASS" : "FAIL", elapsed);
  for (const Line& l : lines)
    std::printf("      %-44s %.3e %s %.1e%s\n", l.label.c_str(), l.value, l.upper ? "<=" : ">=", l.tol,
                l.ok() ? "" : "  <--");
}

LagrangianSpec perfect_square(DistTensorField X, MetricSpec h, MetricSpec g, bool cross = true) {
  LagrangianSpec s;
  s.h = std::move(h);
  s.g = std::move(g);
  s.X = std::move(X);
  s.perfect_square = true;
  s.cross_term = cross;
  return s;
}

SheetSample equator() {
  return SheetSample::analytic(
      1, 2, [](const Vector& t) { return vec({kPi / 2, t(0)}); }, [](const Vector&) { return mat(1, 2, {0.0, 1.0}); },
      [](const Vector&) { return Tensor3(1, 1, 2); });
}

// f = 1/2 tr(h^-1 X g X^T), written independently of the library.
double closed_form_f(const Matrix& X, const Matrix& h, const Matrix& g) {
  return 0.5 * (h.inverse() * X * g * X.transpose()).trace();
}

void c1() {
  const auto start = Clock::now();
  const DistTensorField X = testkit::rotation_field();
  const MetricSpec h = euclidean_metric(1), g = euclidean_metric(2);

  double analytic = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Vector t = vec({2.0 * kPi * k / 100.0});
    analytic = std::max(analytic, max_abs(prolongation_residual(X, h, g, testkit::circle_sheet(), t, ProlongationMode::Eq11)));
  }

  SolveConfig cfg;
  cfg.step = 1e-3;
  const GridSpec grid = uniform_grid({0.0}, {2.0 * kPi}, {6284});
  const SheetSample sheet = integrate_first_order(X, vec({0.0}), vec({1.0, 0.0}), grid, cfg);
  double integrated = 0.0;
  for (std::size_t k = 0; k < grid.node_count(); ++k)
    integrated = std::max(integrated, max_abs(prolongation_residual(X, h, g, sheet, grid.node_point(k),
                                                                    ProlongationMode::Eq11)));
  const double elapsed = seconds_since(start);
  report("C1",
         {{"eq11 residual, analytic circle", analytic, 1e-10},
          {"eq11 residual, rk4 sheet (step 1e-3)", integrated, 1e-6},
          {"runtime [s]", elapsed, 1.0}},
         elapsed);
}

void c2() {
  const auto start = Clock::now();
  testkit::Rng rng(2002);
  struct Case {
    DistTensorField X;
    MetricSpec h, g;
    bool sphere;
  };
  const std::vector<Case> cases = {
      {testkit::rotation_field(), euclidean_metric(1), euclidean_metric(2), false},
      {testkit::sphere_field(), euclidean_metric(1), sphere_metric(), true},
      {testkit::mixed_field(), minkowski_metric(2), euclidean_metric(2), false},
  };
  double worst = 0.0;
  for (const Case& c : cases) {
    const LagrangianSpec spec = perfect_square(c.X, c.h, c.g);
    const int p = c.h.dim, n = c.g.dim;
    for (int k = 0; k < 100; ++k) {
      SheetJet jet{rng.vector(p, -1, 1), rng.vector(n, -1, 1), rng.matrix(p, n), rng.symmetric_second(p, n)};
      if (c.sphere) jet.x = vec({rng.uniform(0.4, 2.7), rng.uniform(0.0, 6.2)});
      // Lower-index Euler-Lagrange expression against -g (eq11 residual).
      const Vector el = euler_lagrange_residual(spec, jet);
      const Vector eq11 = prolongation_residual(c.X, c.h, c.g, jet, ProlongationMode::Eq11);
      const Vector lowered = -metric_components(c.g, jet.x) * eq11;
      worst = std::max(worst, max_abs(el - lowered));
    }
  }
  const double elapsed = seconds_since(start);
  report("C2", {{"|EL + g eq11|, 300 jets, 3 scenarios", worst, 1e-10}, {"runtime [s]", elapsed, 5.0}}, elapsed);
}

void c3() {
  const auto start = Clock::now();
  testkit::Rng rng(3003);
  const MetricSpec h = euclidean_metric(1);
  double rot = 0.0, expo = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Vector x2 = rng.vector(2, -2, 2);
    const GradfCheck r = gradf_term_check(testkit::rotation_field(), h, euclidean_metric(2), vec({0.0}), x2);
    rot = std::max(rot, max_abs(r.term - r.gradf_fd) / max_abs(r.term));
    const Vector x1 = rng.vector(1, 0.05, 3);
    const GradfCheck e = gradf_term_check(testkit::scaling_field(), h, euclidean_metric(1), vec({0.0}), x1);
    expo = std::max(expo, max_abs(e.term - e.gradf_fd) / max_abs(e.term));
  }
  report("C3", {{"relative error, rotational", rot, 1e-6}, {"relative error, exponential", expo, 1e-6}},
         seconds_since(start));
}

void c4() {
  const auto start = Clock::now();
  const DistTensorField X = testkit::rotation_field();
  const LagrangianSpec spec = perfect_square(X, euclidean_metric(1), euclidean_metric(2));
  SolveConfig cfg;
  cfg.step = 1e-3;
  const GridSpec grid = uniform_grid({0.0}, {2.0 * kPi}, {6284});
  const SheetSample sheet = integrate_first_order(X, vec({0.0}), vec({1.0, 0.0}), grid, cfg);
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < grid.node_count(); ++k)
    worst = std::max(worst, max_abs(impulse_divergence(spec, sheet, grid.node_point(k))));
  report("C4", {{"|div T + dL/dt|, interior nodes", worst, 1e-5}}, seconds_since(start));
}

void c5() {
  const auto start = Clock::now();
  testkit::Rng rng(5005);
  const MetricSpec h = constant_metric(rng.signed_metric(2, 1), {-1, 1});
  const MetricSpec g = constant_metric(rng.signed_metric(2, 0), {1, 1});
  const LagrangianSpec l1 = perfect_square(testkit::mixed_field(), h, g, true);
  const LagrangianSpec l2 = perfect_square(testkit::mixed_field(), h, g, false);
  const LagrangianSpec r1 = perfect_square(testkit::rotation_field(), euclidean_metric(1), euclidean_metric(2), true);
  const LagrangianSpec r2 = perfect_square(testkit::rotation_field(), euclidean_metric(1), euclidean_metric(2), false);
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const JetPoint a{rng.vector(2, -1, 1), rng.vector(2, -1, 1), rng.matrix(2, 2)};
    worst = std::max(worst, std::abs(hamiltonian_density(l1, a) - hamiltonian_density(l2, a)));
    const JetPoint b{rng.vector(1, -1, 1), rng.vector(2, -2, 2), rng.matrix(1, 2)};
    worst = std::max(worst, std::abs(hamiltonian_density(r1, b) - hamiltonian_density(r2, b)));
  }
  report("C5", {{"|H(L1) - H(L2)|, 1000 jets", worst, 1e-12}}, seconds_since(start));
}

void c6() {
  const auto start = Clock::now();
  testkit::Rng rng(6006);
  struct Case {
    MetricSpec h, g;
    bool sphere;
  };
  const std::vector<Case> cases = {
      {euclidean_metric(1), sphere_metric(), true},
      {minkowski_metric(2), sphere_metric(), true},
      {minkowski_metric(2), constant_metric(rng.signed_metric(3, 1), {-1, 1, 1}), false},
      {euclidean_metric(2), minkowski_metric(2), false},
      {constant_metric(rng.signed_metric(3, 2), {-1, -1, 1}), constant_metric(rng.signed_metric(2, 1), {-1, 1}),
       false},
      {hyperbolic_metric(2), minkowski_metric(3), false},
  };
  double duality = 0.0, blocks = 0.0;
  int mismatches = 0;
  for (const Case& c : cases) {
    const int p = c.h.dim, n = c.g.dim;
    const int dim = p + n + p * n;
    for (int k = 0; k < 20; ++k) {
      JetPoint jp{rng.vector(p, -1, 1), rng.vector(n, -1, 1), rng.matrix(p, n)};
      if (c.sphere) jp.x = vec({rng.uniform(0.4, 2.7), rng.uniform(0.0, 6.2)});
      if (c.h.name == "hyperbolic") jp.t(p - 1) = rng.uniform(0.5, 2.0);
      const AdaptedFrames f = adapted_frames(c.h, c.g, jp);
      duality = std::max(duality, max_abs(f.coframe * f.frame.transpose() - Matrix::Identity(dim, dim)));

      // Build block-diag(h, g, h^-1 (x) g) here and compare it with S in the adapted frame.
      const Matrix hm = metric_components(c.h, jp.t), gm = metric_components(c.g, jp.x);
      const Matrix hi = hm.inverse();
      Matrix expected = Matrix::Zero(dim, dim);
      expected.topLeftCorner(p, p) = hm;
      expected.block(p, p, n, n) = gm;
      for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b)
          expected.block(p + n + a * n, p + n + b * n, n, n) = hi(a, b) * gm;
      const Matrix S = sasaki_metric(c.h, c.g, jp);
      blocks = std::max(blocks, max_abs(f.frame * S * f.frame.transpose() - expected));

      const int nh = negative_eigenvalue_count(hm), ng = negative_eigenvalue_count(gm);
      const int product = nh * (n - ng) + (p - nh) * ng;
      if (negative_eigenvalue_count(S) != nh + ng + product) ++mismatches;
    }
  }
  report("C6",
         {{"frame/coframe duality", duality, 1e-12},
          {"adapted-cobasis block reconstruction", blocks, 1e-10},
          {"signature mismatches (count)", static_cast<double>(mismatches), 0.0}},
         seconds_since(start));
}

void c7() {
  const auto start = Clock::now();
  testkit::Rng rng(7007);
  struct Case {
    std::optional<DistTensorField> X;
    int n;
  };
  const std::vector<Case> fixtures = {{std::nullopt, 2}, {zero_field(1, 2), 2}, {testkit::rotation_field(), 2}};
  double omega = 0.0, dd = 0.0;
  for (const Case& c : fixtures)
    for (HamiltonVariant v : {HamiltonVariant::Theorem1, HamiltonVariant::Theorem2}) {
      if (v == HamiltonVariant::Theorem2 && !c.X) continue;
      const HamiltonSetup s = make_hamilton_setup(c.X, euclidean_metric(1), euclidean_metric(c.n), v);
      const LiouvilleForms lf = liouville_and_omega(s);
      std::vector<DifferentialForm> all = {hamiltonian_form(s), volume_form(s.chart, s.h)};
      for (int a = 0; a < s.h.dim; ++a) {
        all.push_back(lf.theta[static_cast<std::size_t>(a)]);
        all.push_back(lf.omega[static_cast<std::size_t>(a)]);
        all.push_back(polysymplectic_prefactor(s, a));
      }
      for (int k = 0; k < 5; ++k) {
        const JetPoint jp{rng.vector(1, -1, 1), rng.vector(c.n, -1, 1), rng.matrix(1, c.n)};
        const Vector z = s.chart.coords(jp);
        for (int a = 0; a < s.h.dim; ++a)
          omega = std::max(omega, (lf.omega[static_cast<std::size_t>(a)](z) +
                                   form_d(lf.theta[static_cast<std::size_t>(a)])(z))
                                      .max_abs());
        for (const DifferentialForm& w : all)
          if (w.degree() + 2 <= s.chart.dim()) dd = std::max(dd, form_d(form_d(w))(z).max_abs());
      }
    }
  report("C7", {{"|Omega + d theta|, flat and rotational", omega, 1e-6}, {"|d d w|, constructed forms", dd, 1e-6}},
         seconds_since(start));
}

void c8() {
  const auto start = Clock::now();
  const MetricSpec e1 = euclidean_metric(1), e2 = euclidean_metric(2);
  double sheets = 0.0;
  auto take = [&](const HamiltonResidual& r) { sheets = std::max({sheets, max_abs(r.r1), max_abs(r.r2)}); };
  for (double t : {0.1, 0.9, 2.3, 4.4}) {
    take(hamilton_system_residual(testkit::rotation_field(), e1, e2, testkit::circle_sheet(), vec({t}),
                                  HamiltonVariant::Theorem2));
    for (HamiltonVariant v : {HamiltonVariant::Theorem1, HamiltonVariant::Theorem2})
      take(hamilton_system_residual(testkit::scaling_field(), e1, e1, testkit::exponential_sheet(), vec({t / 4}), v));
    take(hamilton_system_residual(std::nullopt, e1, sphere_metric(), equator(), vec({t}), HamiltonVariant::Theorem1));
  }

  testkit::Rng rng(8008);
  const MetricSpec h = minkowski_metric(2);
  const MetricSpec g = constant_metric(rng.signed_metric(2, 0), {1, 1});
  const HamiltonSetup s2 = make_hamilton_setup(testkit::mixed_field(), h, g, HamiltonVariant::Theorem2);
  double cross = 0.0;
  for (int k = 0; k < 50; ++k) {
    const SheetJet j{rng.vector(2, -1, 1), rng.vector(2, -1, 1), rng.matrix(2, 2), rng.symmetric_second(2, 2)};
    const Vector eq11 = tension(j, h, g) - traced_prolongation_rhs(testkit::mixed_field(), h, g, j.point(),
                                                                   ProlongationMode::Eq11);
    cross = std::max(cross, max_abs(hamilton_system_residual(s2, j).r2 - eq11));
  }
  report("C8",
         {{"hamilton residuals on solution sheets", sheets, 1e-8}, {"|r2 - eq11|, 50 jets", cross, 1e-10}},
         seconds_since(start));
}

LieGroupData one_parameter(std::function<Vector(const Vector&)> xi, int n) {
  LieGroupData d;
  d.p = 1;
  d.n = n;
  d.xi = {std::move(xi)};
  d.C = Tensor3(1, 1, 1);
  d.A = [](const Vector&) { return mat(1, 1, {1.0}); };
  return d;
}

double exponential_error(double step) {
  SolveConfig cfg;
  cfg.step = step;
  const SheetSample s =
      integrate_first_order(testkit::scaling_field(), vec({0.0}), vec({1.0}), uniform_grid({0.0}, {1.0}, {11}), cfg);
  return std::abs(s.at(vec({1.0}))(0) - std::exp(1.0));
}

void c9() {
  const auto start = Clock::now();
  const GridSpec grid = uniform_grid({0.0}, {1.0}, {1001});
  const SolveConfig cfg;
  struct Fixture {
    const char* name;
    LieGroupData data;
    MetricSpec g;
    Vector y0;
  };
  const std::vector<Fixture> fixtures = {
      {"translation", one_parameter([](const Vector&) { return vec({1.0}); }, 1), euclidean_metric(1), vec({0.3})},
      {"rotation", one_parameter([](const Vector& x) { return vec({-x(1), x(0)}); }, 2), euclidean_metric(2),
       vec({1.0, 0.0})},
      {"scaling", one_parameter([](const Vector& x) { return x; }, 1), euclidean_metric(1), vec({2.0})},
  };
  std::vector<Line> lines;
  for (const Fixture& f : fixtures) {
    const LieReport r = lie_group_check(f.data, euclidean_metric(1), f.g, vec({0.0}), f.y0, grid, cfg);
    lines.push_back({std::string(f.name) + ": bracket", r.bracket_residual, 1e-6});
    lines.push_back({std::string(f.name) + ": Maurer-Cartan", r.maurer_cartan_residual, 1e-6});
    lines.push_back({std::string(f.name) + ": extremality", r.extremal_residual, 1e-6});
  }

  // Least-squares slope of log(error) against log(step).
  const std::vector<double> steps = {1e-1, 1e-2, 1e-3};
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double h : steps) {
    const double x = std::log10(h), y = std::log10(exponential_error(h));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(steps.size());
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  lines.push_back({"rk4 order fit, exponential", slope, 3.7, false});
  report("C9", lines, seconds_since(start));
}

void c10() {
  const auto start = Clock::now();
  testkit::Rng rng(10010);
  int mismatches = 0;
  double unit = 0.0;
  int rescaled_points = 0;
  for (int k = 0; k < 1000; ++k) {
    const int p = 1 + k % 3, n = 1 + (k / 3) % 3;
    const Matrix hm = rng.signed_metric(p, static_cast<int>(rng.uniform(0, p + 1)));
    const Matrix gm = rng.signed_metric(n, static_cast<int>(rng.uniform(0, n + 1)));
    std::vector<int> hs(static_cast<std::size_t>(p), 1), gs(static_cast<std::size_t>(n), 1);
    for (int i = 0; i < negative_eigenvalue_count(hm); ++i) hs[static_cast<std::size_t>(i)] = -1;
    for (int i = 0; i < negative_eigenvalue_count(gm); ++i) gs[static_cast<std::size_t>(i)] = -1;
    const MetricSpec h = constant_metric(hm, hs), g = constant_metric(gm, gs);

    // X = A + B x, one linear map per row.
    const Matrix A = rng.matrix(p, n);
    std::vector<Matrix> B;
    for (int a = 0; a < p; ++a) B.push_back(rng.matrix(n, n));
    DistTensorField X;
    X.p = p;
    X.n = n;
    X.components = [A, B, p](const Vector&, const Vector& x) {
      Matrix out = A;
      for (int a = 0; a < p; ++a) out.row(a) += (B[static_cast<std::size_t>(a)] * x).transpose();
      return out;
    };
    const Vector t = rng.vector(p, -1, 1), x = rng.vector(n, -1, 1);

    const double f = closed_form_f(X(t, x), hm, gm);
    const CausalClass expected = f > kNullBand ? CausalClass::Spacelike
                                 : f < -kNullBand ? CausalClass::Timelike
                                                  : CausalClass::Lightlike;
    const CausalCharacter cc = potential_energy_and_character(X, h, g, t, x);
    if (cc.kind != expected) ++mismatches;

    if (std::abs(f) > kCriticalTol) {
      const DistTensorField R = rescaled_field(X, h, g);
      unit = std::max(unit, std::abs(std::abs(closed_form_f(R(t, x), hm, gm)) - 0.5));
      ++rescaled_points;
    }
  }
  report("C10",
         {{"classification mismatches (count)", static_cast<double>(mismatches), 0.0},
          {"||f_rescaled| - 1/2|, " + std::to_string(rescaled_points) + " points", unit, 1e-10}},
         seconds_since(start));
}

}  // namespace

int main() {
  const auto start = Clock::now();
  const std::vector<std::function<void()>> criteria = {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10};
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    try {
      criteria[k]();
    } catch (const std::exception& e) {
      ++failures;
      std::printf("C%zu  FAIL  exception: %s\n", k + 1, e.what());
    }
  }
  const double total = seconds_since(start);
  std::printf("total %.2fs (budget 60s), %d failing criteria\n", total, failures);
  return failures == 0 && total < 60.0 ? 0 : 1;
}
