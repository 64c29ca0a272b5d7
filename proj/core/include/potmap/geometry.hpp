#pragma once

#include <functional>
#include <string>
#include <vector>

#include "potmap/tensor.hpp"

namespace potmap {

/// Metric tensor field on one factor manifold (parameter space T or target M).
///
/// `partials` and `christoffel_analytic` are optional. When `partials` is
/// absent the derivatives of the components are taken by central differences
/// with `fd_step`. Christoffel symbols are built from the same partials unless
/// an analytic table is supplied, so identities that only involve metric
/// derivatives stay algebraically consistent.
struct MetricSpec {
  int dim = 0;
  std::function<Matrix(const Vector&)> components;
  std::vector<int> signature;  // declared, one +-1 per eigenvalue
  double fd_step = 1e-5;
  std::function<Tensor3(const Vector&)> partials;              // [c][a][b] = d g_ab / d p^c
  std::function<Tensor3(const Vector&)> christoffel_analytic;  // [a][b][c] = Gamma^a_bc
  std::string name = "custom";
};

inline constexpr double kSingularDetTol = 1e-10;
inline constexpr double kSymmetryTol = 1e-12;

Matrix metric_components(const MetricSpec& m, const Vector& p);

/// Throws SingularMetric if |det g(p)| <= 1e-10.
Matrix metric_inverse(const MetricSpec& m, const Vector& p);

Tensor3 metric_partials(const MetricSpec& m, const Vector& p);

/// d g^{ab} / d p^c laid out [c][a][b], obtained as -g^{-1} (d g) g^{-1}.
Tensor3 inverse_metric_partials(const MetricSpec& m, const Vector& p);

/// Levi-Civita symbols from an inverse metric and component partials ([c][a][b]).
Tensor3 levi_civita(const Matrix& inverse, const Tensor3& partials);

/// Gamma^a_bc laid out [a][b][c].
Tensor3 christoffel(const MetricSpec& m, const Vector& p);

/// sqrt|det g(p)|.
double volume_density(const MetricSpec& m, const Vector& p);

/// d g_ij/dx^k - Gamma^h_ki g_hj - Gamma^h_kj g_hi, laid out [k][i][j].
Tensor3 compatibility_residual(const MetricSpec& m, const Vector& p);
Tensor3 compatibility_residual(const MetricSpec& m, const Vector& p, const Tensor3& gamma);

/// d g^ab/dp^c + Gamma^a_cl g^lb + Gamma^b_cl g^al, laid out [c][a][b].
Tensor3 inverse_compatibility_residual(const MetricSpec& m, const Vector& p);

/// Checks symmetry, nondegeneracy and that the eigenvalue signs match the
/// declared signature. Throws SignatureMismatch / SingularMetric / InvalidArgument.
void verify_metric(const MetricSpec& m, const Vector& p);

/// Number of negative entries of a declared signature.
int negative_count(const std::vector<int>& signature);
int negative_eigenvalue_count(const Matrix& symmetric);

bool is_positive_definite(const MetricSpec& m);

Vector lower_index(const MetricSpec& m, const Vector& p, const Vector& v);
Vector raise_index(const MetricSpec& m, const Vector& p, const Vector& w);

// Catalog. Coordinates: sphere (theta, phi); hyperbolic is the upper half
// space with the last coordinate positive; minkowski has the first axis timelike.
MetricSpec euclidean_metric(int dim);
MetricSpec minkowski_metric(int dim);
MetricSpec sphere_metric();
MetricSpec hyperbolic_metric(int dim);
MetricSpec constant_metric(const Matrix& components, std::vector<int> signature, std::string name = "custom");

/// Looks up "euclidean", "minkowski", "sphere" or "hyperbolic". Throws ConfigError.
MetricSpec catalog_metric(const std::string& name, int dim);

}  // namespace potmap
