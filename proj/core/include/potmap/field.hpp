#pragma once

#include <functional>
#include <vector>

#include "potmap/geometry.hpp"
#include "potmap/tensor.hpp"

namespace potmap {

/// Distinguished tensor field X^i_alpha(t, x) on T x M, stored p x n ([alpha][i]).
///
/// Partials are optional; absent ones are central differences with `fd_step`.
/// Layouts: dt_partial [beta][alpha][i] = dX^i_alpha/dt^beta,
///          dx_partial [j][alpha][i]    = dX^i_alpha/dx^j.
struct DistTensorField {
  int p = 0;
  int n = 0;
  std::function<Matrix(const Vector&, const Vector&)> components;
  std::function<Tensor3(const Vector&, const Vector&)> dt_partial;
  std::function<Tensor3(const Vector&, const Vector&)> dx_partial;
  double fd_step = 1e-5;

  Matrix operator()(const Vector& t, const Vector& x) const { return components(t, x); }
};

Tensor3 field_t_partials(const DistTensorField& X, const Vector& t, const Vector& x);
Tensor3 field_x_partials(const DistTensorField& X, const Vector& t, const Vector& x);

/// Max discrepancy between analytic partials (when given) and central differences.
double field_partial_consistency(const DistTensorField& X, const std::vector<std::pair<Vector, Vector>>& points);

DistTensorField zero_field(int p, int n);
DistTensorField constant_field(const Matrix& value);

/// f = 1/2 h^ab g_ij X^i_a X^j_b.
double potential_energy(const DistTensorField& X, const MetricSpec& h, const MetricSpec& g, const Vector& t,
                        const Vector& x);

}  // namespace potmap
