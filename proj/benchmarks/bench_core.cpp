#include <benchmark/benchmark.h>

#include <cmath>

#include "potmap/energy.hpp"
#include "potmap/forms.hpp"
#include "potmap/hamilton.hpp"
#include "potmap/potential.hpp"
#include "potmap/solvers.hpp"

using namespace potmap;

namespace {

Vector v2(double a, double b) {
  Vector out(2);
  out << a, b;
  return out;
}

DistTensorField rotation() {
  DistTensorField X;
  X.p = 1;
  X.n = 2;
  X.components = [](const Vector&, const Vector& x) {
    Matrix m(1, 2);
    m << -x(1), x(0);
    return m;
  };
  return X;
}

SheetJet sample_jet_point() {
  SheetJet j;
  j.t = Vector::Constant(1, 0.3);
  j.x = v2(0.9, 0.4);
  j.x1 = Matrix(1, 2);
  j.x1 << -0.4, 0.9;
  j.xx = Tensor3(1, 1, 2);
  j.xx(0, 0, 0) = -0.9;
  j.xx(0, 0, 1) = -0.4;
  return j;
}

}  // namespace

static void BM_ChristoffelSphere(benchmark::State& state) {
  const MetricSpec g = sphere_metric();
  const Vector x = v2(0.8, 1.3);
  for (auto _ : state) benchmark::DoNotOptimize(christoffel(g, x));
}
BENCHMARK(BM_ChristoffelSphere);

static void BM_Eq11Residual(benchmark::State& state) {
  const DistTensorField X = rotation();
  const MetricSpec h = euclidean_metric(1), g = sphere_metric();
  const SheetJet j = sample_jet_point();
  for (auto _ : state) benchmark::DoNotOptimize(prolongation_residual(X, h, g, j, ProlongationMode::Eq11));
}
BENCHMARK(BM_Eq11Residual);

static void BM_IntegrateRk4(benchmark::State& state) {
  const DistTensorField X = rotation();
  const GridSpec grid = uniform_grid({0.0}, {6.283185307179586}, {static_cast<int>(state.range(0))});
  SolveConfig cfg;
  cfg.step = 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(integrate_first_order(X, Vector::Zero(1), v2(1.0, 0.0), grid, cfg));
}
BENCHMARK(BM_IntegrateRk4)->Arg(629)->Arg(6284);

static void BM_DiscreteActionGradient(benchmark::State& state) {
  LagrangianSpec spec;
  spec.h = euclidean_metric(2);
  spec.g = euclidean_metric(2);
  const int m = static_cast<int>(state.range(0));
  const GridSpec grid = uniform_grid({0.0, 0.0}, {1.0, 1.0}, {m, m});
  Matrix values(static_cast<Eigen::Index>(grid.node_count()), 2);
  for (std::size_t k = 0; k < grid.node_count(); ++k) {
    const Vector t = grid.node_point(k);
    values.row(static_cast<Eigen::Index>(k)) << std::sin(t(0)) * t(1), t(0) * t(0) - t(1);
  }
  for (auto _ : state) benchmark::DoNotOptimize(discrete_action_gradient(spec, grid, values));
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * static_cast<int64_t>(grid.node_count()));
}
BENCHMARK(BM_DiscreteActionGradient)->Arg(33)->Arg(129);

static void BM_OmegaMinusDTheta(benchmark::State& state) {
  const HamiltonSetup s = make_hamilton_setup(rotation(), euclidean_metric(1), euclidean_metric(2),
                                              HamiltonVariant::Theorem2);
  const LiouvilleForms lf = liouville_and_omega(s);
  const DifferentialForm dtheta = form_d(lf.theta[0]);
  Vector z(5);
  z << 0.2, 0.9, 0.4, -0.4, 0.9;
  for (auto _ : state) benchmark::DoNotOptimize((lf.omega[0](z) + dtheta(z)).max_abs());
}
BENCHMARK(BM_OmegaMinusDTheta);

static void BM_HamiltonResidual(benchmark::State& state) {
  const HamiltonSetup s = make_hamilton_setup(rotation(), euclidean_metric(1), euclidean_metric(2),
                                              HamiltonVariant::Theorem2);
  const SheetJet j = sample_jet_point();
  for (auto _ : state) benchmark::DoNotOptimize(hamilton_system_residual(s, j));
}
BENCHMARK(BM_HamiltonResidual);

BENCHMARK_MAIN();
