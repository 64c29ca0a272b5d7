#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "potmap/geometry.hpp"
#include "potmap/tensor.hpp"

namespace potmap {

// Index layout used throughout: first jets are p x n matrices [alpha][i],
// second jets are p x p x n tensors [alpha][beta][i].

/// Rectangular grid on a box of the parameter space. Nodes are numbered
/// row-major with the last axis fastest.
struct GridSpec {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<int> nodes;

  int dim() const noexcept { return static_cast<int>(nodes.size()); }
  std::size_t node_count() const noexcept;
  double spacing(int axis) const;
  std::vector<int> unflatten(std::size_t flat) const;
  std::size_t flatten(const std::vector<int>& index) const;
  Vector node_point(std::size_t flat) const;
  Vector node_point(const std::vector<int>& index) const;
  bool is_interior(const std::vector<int>& index) const;
  /// Node index of `t`, if it lies on a node (within 1e-9 of the spacing).
  std::optional<std::vector<int>> locate(const Vector& t) const;
  bool contains(const Vector& t) const;
};

/// Validates node counts (>= 3 per axis) and box orientation. Throws InvalidArgument.
void validate_grid(const GridSpec& grid);

GridSpec uniform_grid(std::vector<double> lo, std::vector<double> hi, std::vector<int> nodes);

enum class SheetMode { Analytic, Grid };

/// A candidate map phi: T -> M, either closed-form or sampled on a grid.
struct SheetSample {
  SheetMode mode = SheetMode::Analytic;
  int p = 0;
  int n = 0;
  std::function<Vector(const Vector&)> value;  // analytic
  std::function<Matrix(const Vector&)> d1;     // optional analytic first jet
  std::function<Tensor3(const Vector&)> d2;    // optional analytic plain second derivatives
  GridSpec grid;                               // grid mode
  Matrix node_values;                          // grid mode: node_count x n
  double fd_step = 1e-5;                       // analytic first derivatives without d1
  double fd_step2 = 1e-4;                      // analytic second derivatives without d2

  static SheetSample analytic(int p, int n, std::function<Vector(const Vector&)> value,
                              std::function<Matrix(const Vector&)> d1 = {},
                              std::function<Tensor3(const Vector&)> d2 = {});
  static SheetSample sampled(GridSpec grid, Matrix node_values);

  Vector at(const Vector& t) const;
};

/// A point of the first jet space: (t^alpha, x^i, x^i_alpha).
struct JetPoint {
  Vector t;
  Vector x;
  Matrix x1;  // p x n

  int p() const noexcept { return static_cast<int>(t.size()); }
  int n() const noexcept { return static_cast<int>(x.size()); }
};

/// Pointwise data of a sheet up to second order; `xx` holds the plain second
/// partials d^2 x^i / dt^alpha dt^beta.
struct SheetJet {
  Vector t;
  Vector x;
  Matrix x1;
  Tensor3 xx;

  JetPoint point() const { return {t, x, x1}; }
};

/// Samples value, first and second partials of phi at t. Analytic handles are
/// used when present, otherwise central differences (grid: the node stencils).
SheetJet sample_jet(const SheetSample& phi, const Vector& t, bool with_second = true);
SheetJet sample_jet_at_node(const SheetSample& phi, const std::vector<int>& node, bool with_second = true);

Matrix first_jet(const SheetSample& phi, const Vector& t);

/// x^i_ab = d^2x^i/dt^a dt^b - H^c_ab x^i_c + G^i_jk x^j_a x^k_b.
Tensor3 second_covariant_jet(const SheetJet& jet, const MetricSpec& h, const MetricSpec& g);
Tensor3 second_covariant_jet(const SheetSample& phi, const MetricSpec& h, const MetricSpec& g, const Vector& t);

/// tau^i = h^ab x^i_ab.
Vector tension(const SheetJet& jet, const MetricSpec& h, const MetricSpec& g);
Vector tension(const SheetSample& phi, const MetricSpec& h, const MetricSpec& g, const Vector& t);

/// Largest discrepancy between the analytic first jet and central differences
/// over the given points (0 when no analytic d1 is present).
double first_jet_consistency(const SheetSample& phi, const std::vector<Vector>& points);

struct StencilTap {
  int offset;
  double weight;
};

/// Second-order first-derivative stencil at node k of an axis with `count`
/// nodes and spacing h: central inside, one-sided at both ends.
std::vector<StencilTap> first_derivative_taps(int k, int count, double h);
std::vector<StencilTap> second_derivative_taps(int k, int count, double h);

/// Central-difference first derivative of a vector function, one column per axis: returns p x n.
Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& t, double step);

}  // namespace potmap
