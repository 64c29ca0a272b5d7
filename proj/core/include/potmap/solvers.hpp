#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "potmap/energy.hpp"
#include "potmap/field.hpp"
#include "potmap/geometry.hpp"
#include "potmap/jets.hpp"

namespace potmap {

enum class StepMethod { Rk4, Euler };

/// "rk4" / "euler". Throws BadMode.
StepMethod parse_step_method(std::string_view name);
std::string_view to_string(StepMethod m) noexcept;

struct SolveConfig {
  double step = 1e-3;
  StepMethod method = StepMethod::Rk4;
  long max_steps = 50'000'000;
  double relax_rate = 0.25;
  double relax_tol = 1e-6;
  int max_iters = 200'000;

  /// Throws InvalidArgument.
  void validate() const;
};

inline constexpr double kIntegrabilityTol = 1e-6;
inline constexpr double kPathIndependenceTol = 1e-5;
inline constexpr double kBlowupNorm = 1e12;

/// Solves x^i_a = X^i_a(t, x) through (t0, x0) on the nodes of `grid`. Axis 1 is
/// swept through t0 first, then each further axis line by line. For p >= 2 the
/// integrability residual is checked before and after, and five nodes are
/// recomputed with the axis order reversed. Throws NotIntegrable, StepUnstable.
SheetSample integrate_first_order(const DistTensorField& X, const Vector& t0, const Vector& x0, const GridSpec& grid,
                                  const SolveConfig& cfg);

/// Integrates along axis `axis` from t (with state x) to coordinate `target`.
Vector integrate_along_axis(const DistTensorField& X, Vector t, Vector x, int axis, double target,
                            const SolveConfig& cfg);

/// Midpoint-cell discretization of the action: every cell contributes its
/// volume times E sqrt|h| at the cell centre, with x the corner mean and x_a
/// the mean of the edge differences along axis a.
double discrete_action(const LagrangianSpec& spec, const GridSpec& grid, const Matrix& node_values);
/// Gradient of discrete_action with respect to the node values (node_count x n).
Matrix discrete_action_gradient(const LagrangianSpec& spec, const GridSpec& grid, const Matrix& node_values);
/// Gradient divided by the cell volume, zeroed on boundary nodes: a discrete
/// Euler-Lagrange expression (lower index, weighted by sqrt|h|).
Matrix discrete_euler_lagrange_residual(const LagrangianSpec& spec, const SheetSample& sheet);

struct RelaxResult {
  SheetSample sheet;
  std::vector<double> action_history;  // accepted iterates only
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Gradient descent on the discrete action with boundary rows of `boundary`
/// held fixed; the step is relax_rate * (min spacing)^2 times the residual and
/// is halved whenever the action would increase. Throws
/// IndefiniteParameterMetric unless h is positive definite, Diverged on
/// non-finite iterates.
RelaxResult relax_to_extremal(const LagrangianSpec& spec, const Matrix& boundary, const SheetSample& init,
                              const SolveConfig& cfg);

/// Finite-dimensional group acting on M: infinitesimal generators xi_b, structure
/// constants C^c_ab ([c][a][b]) and the matrix of 1-forms A^b_a(t) ([b][a]).
struct LieGroupData {
  int p = 0;
  int n = 0;
  std::vector<std::function<Vector(const Vector&)>> xi;
  Tensor3 C;
  std::function<Matrix(const Vector&)> A;
  std::function<Tensor3(const Vector&)> dA;  // optional [c][b][a] = dA^b_a / dt^c
};

/// X^i_a = xi^i_b A^b_a.
DistTensorField lie_field(const LieGroupData& data);

struct LieReport {
  double bracket_residual = 0.0;
  double maurer_cartan_residual = 0.0;
  double det_A = 0.0;
  double integrability_residual = 0.0;
  double extremal_residual = 0.0;
  std::optional<double> group_law_residual;  // p = 1 with t-independent A only
  SheetSample sheet;
};

/// Diagnostic only: every condition is measured and reported, nothing thrown
/// for failed conditions. Integration errors propagate.
LieReport lie_group_check(const LieGroupData& data, const MetricSpec& h, const MetricSpec& g, const Vector& t0,
                          const Vector& y0, const GridSpec& grid, const SolveConfig& cfg);

}  // namespace potmap
