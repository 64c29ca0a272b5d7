#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "potmap/jets.hpp"
#include "potmap/tensor.hpp"

namespace potmap {

/// Coordinates (t^alpha, x^i, x^i_alpha) of one chart of J1(T, M), flattened as
/// [t^1..t^p, x^1..x^n, x^1_1..x^n_1, ..., x^1_p..x^n_p].
struct JetChart {
  int p = 0;
  int n = 0;

  int dim() const noexcept { return p + n + p * n; }
  int t_index(int alpha) const noexcept { return alpha; }
  int x_index(int i) const noexcept { return p + i; }
  int x1_index(int alpha, int i) const noexcept { return p + n + alpha * n + i; }

  Vector coords(const JetPoint& jp) const;
  JetPoint point(const Vector& z) const;
  std::string label(int k) const;
};

/// Bit k set means dz^k participates; only sorted subsets are stored.
using FormMask = std::uint32_t;

inline constexpr int kMaxFormDim = 31;

/// A k-form at one point: antisymmetric coefficients over sorted index subsets.
class FormValue {
 public:
  FormValue() = default;
  FormValue(int dim, int degree);

  static FormValue monomial(int dim, const std::vector<int>& indices, double coeff = 1.0);
  static FormValue scalar(int dim, double value);
  static FormValue one_form(const Vector& components);

  int dim() const noexcept { return dim_; }
  int degree() const noexcept { return degree_; }

  double coeff(FormMask mask) const;
  /// Coefficient of dz^i1 ^ ... ^ dz^ik for an arbitrary index order (sign applied).
  double component(const std::vector<int>& indices) const;
  void add(FormMask mask, double value);
  const std::map<FormMask, double>& terms() const noexcept { return terms_; }
  double max_abs() const;

  FormValue& operator+=(const FormValue& o);
  FormValue& operator-=(const FormValue& o);
  FormValue& operator*=(double s);
  friend FormValue operator+(FormValue a, const FormValue& b) { return a += b; }
  friend FormValue operator-(FormValue a, const FormValue& b) { return a -= b; }
  friend FormValue operator*(double s, FormValue a) { return a *= s; }

 private:
  int dim_ = 0;
  int degree_ = 0;
  std::map<FormMask, double> terms_;
};

FormMask mask_of(const std::vector<int>& sorted_indices);
std::vector<int> indices_of(FormMask mask);

/// Throws DegreeOverflow when deg a + deg b exceeds the dimension.
FormValue wedge(const FormValue& a, const FormValue& b);
/// Contraction into the first slot. Throws DegreeUnderflow on 0-forms.
FormValue interior(const Vector& v, const FormValue& a);

/// A vector field on the chart in the coordinate frame.
struct JetVectorField {
  int dim = 0;
  std::function<Vector(const Vector&)> components;
};

/// A differential form whose coefficients are evaluated lazily at chart points.
class DifferentialForm {
 public:
  using Evaluator = std::function<FormValue(const Vector&)>;

  DifferentialForm() = default;
  DifferentialForm(int dim, int degree, Evaluator eval);

  static DifferentialForm constant(const FormValue& value);
  static DifferentialForm function(int dim, std::function<double(const Vector&)> f);

  int dim() const noexcept { return dim_; }
  int degree() const noexcept { return degree_; }
  FormValue operator()(const Vector& z) const;

  friend DifferentialForm operator+(const DifferentialForm& a, const DifferentialForm& b);
  friend DifferentialForm operator-(const DifferentialForm& a, const DifferentialForm& b);
  friend DifferentialForm operator*(double s, const DifferentialForm& a);

 private:
  int dim_ = 0;
  int degree_ = 0;
  Evaluator eval_;
};

DifferentialForm form_wedge(const DifferentialForm& a, const DifferentialForm& b);
DifferentialForm form_interior(const JetVectorField& v, const DifferentialForm& a);
/// Coordinate exterior derivative, coefficient partials by central differences.
DifferentialForm form_d(const DifferentialForm& a, double fd_step = 1e-4);

/// Largest top-degree coefficient of (a - b) ^ m over all complementary
/// monomials m when `modulo` is empty; otherwise of (a - b) ^ modulo.
double form_discrepancy(const FormValue& a, const FormValue& b);
double form_discrepancy_modulo(const FormValue& a, const FormValue& b, const FormValue& modulo);

}  // namespace potmap
