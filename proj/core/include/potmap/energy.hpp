#pragma once

#include <functional>
#include <optional>

#include "potmap/field.hpp"
#include "potmap/geometry.hpp"
#include "potmap/jets.hpp"

namespace potmap {

/// Energy density
///   E = 1/2 h^ab g_ij x^i_a x^j_b - h^ab g_ij x^i_a X^j_b + c(t, x)
/// with Lagrangian L = E sqrt|h|. Without X the cross term is absent (canonical
/// energy). `perfect_square` sets c = f = 1/2 h^ab g_ij X^i_a X^j_b, which turns E
/// into 1/2 |x1 - X|^2. Clearing `cross_term` while keeping X gives E0 + c.
struct LagrangianSpec {
  MetricSpec h;
  MetricSpec g;
  std::optional<DistTensorField> X;
  std::function<double(const Vector&, const Vector&)> c;  // empty means 0
  bool perfect_square = false;
  bool cross_term = true;

  bool has_cross_term() const { return X.has_value() && cross_term; }
};

/// c(t, x), or f when perfect_square is set.
double potential_value(const LagrangianSpec& spec, const Vector& t, const Vector& x);

/// dc/dx^k. The perfect-square potential is differentiated in closed form
/// through the metric and field partials; a user potential by central differences.
Vector potential_gradient(const LagrangianSpec& spec, const Vector& t, const Vector& x);

double energy_density(const LagrangianSpec& spec, const JetPoint& jp);
double energy_density(const LagrangianSpec& spec, const SheetSample& phi, const Vector& t);

/// E sqrt|h|.
double lagrangian_density(const LagrangianSpec& spec, const JetPoint& jp);

/// dE/dx^k_a, p x n.
Matrix energy_velocity_gradient(const LagrangianSpec& spec, const JetPoint& jp);

/// dE/dx^k at fixed t and x1.
Vector energy_position_gradient(const LagrangianSpec& spec, const JetPoint& jp);

/// Trapezoidal quadrature of E sqrt|h| over the nodes of `domain`.
double energy_integral(const LagrangianSpec& spec, const SheetSample& phi, const GridSpec& domain);

/// dE/dx^k - d/dt^a (dE/dx^k_a) - H^c_ca dE/dx^k_a, with the t-derivative taken
/// as a total derivative along phi by the chain rule. Lower index k.
Vector euler_lagrange_residual(const LagrangianSpec& spec, const SheetJet& jet);
Vector euler_lagrange_residual(const LagrangianSpec& spec, const SheetSample& phi, const Vector& t);

/// T^a_b = x^i_b dL/dx^i_a - L delta^a_b, laid out (a, b).
Matrix energy_impulse(const LagrangianSpec& spec, const JetPoint& jp);
Matrix energy_impulse(const LagrangianSpec& spec, const SheetSample& phi, const Vector& t);

/// Explicit dL/dt^b at fixed (x, x1), central differences.
Vector lagrangian_time_partials(const LagrangianSpec& spec, const JetPoint& jp, double step = 1e-5);

/// d T^a_b / dt^a + dL/dt^b along phi. Analytic sheets use central differences
/// with `step`; grid sheets use the node stencils.
Vector impulse_divergence(const LagrangianSpec& spec, const SheetSample& phi, const Vector& t, double step = 1e-4);

/// H = x^i_a dL/dx^i_a - L.
double hamiltonian_density(const LagrangianSpec& spec, const JetPoint& jp);
double hamiltonian_density(const LagrangianSpec& spec, const SheetSample& phi, const Vector& t);

/// Sum with pairwise reduction; deterministic for a given ordering.
double pairwise_sum(const std::vector<double>& values);

}  // namespace potmap
