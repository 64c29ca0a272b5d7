#include "potmap/forms.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "potmap/errors.hpp"

namespace potmap {

Vector JetChart::coords(const JetPoint& jp) const {
  Vector z(dim());
  for (int a = 0; a < p; ++a) z(t_index(a)) = jp.t(a);
  for (int i = 0; i < n; ++i) z(x_index(i)) = jp.x(i);
  for (int a = 0; a < p; ++a)
    for (int i = 0; i < n; ++i) z(x1_index(a, i)) = jp.x1(a, i);
  return z;
}

JetPoint JetChart::point(const Vector& z) const {
  JetPoint jp{Vector(p), Vector(n), Matrix(p, n)};
  for (int a = 0; a < p; ++a) jp.t(a) = z(t_index(a));
  for (int i = 0; i < n; ++i) jp.x(i) = z(x_index(i));
  for (int a = 0; a < p; ++a)
    for (int i = 0; i < n; ++i) jp.x1(a, i) = z(x1_index(a, i));
  return jp;
}

std::string JetChart::label(int k) const {
  std::ostringstream os;
  if (k < p) {
    os << "t" << k + 1;
  } else if (k < p + n) {
    os << "x" << k - p + 1;
  } else {
    const int r = k - p - n;
    os << "x" << r % n + 1 << "_" << r / n + 1;
  }
  return os.str();
}

FormMask mask_of(const std::vector<int>& sorted_indices) {
  FormMask m = 0;
  for (int k : sorted_indices) m |= FormMask{1} << k;
  return m;
}

std::vector<int> indices_of(FormMask mask) {
  std::vector<int> out;
  for (int k = 0; mask != 0; ++k, mask >>= 1)
    if (mask & 1u) out.push_back(k);
  return out;
}

FormValue::FormValue(int dim, int degree) : dim_(dim), degree_(degree) {
  if (dim < 0 || dim > kMaxFormDim) throw Error(ErrorCode::InvalidArgument, "form dimension out of range");
  if (degree < 0 || degree > dim) throw Error(ErrorCode::DegreeOverflow, "form degree exceeds the dimension");
}

FormValue FormValue::monomial(int dim, const std::vector<int>& indices, double coeff) {
  FormValue f(dim, static_cast<int>(indices.size()));
  std::vector<int> sorted = indices;
  // Bubble sort to count transpositions; degrees are tiny.
  int sign = 1;
  for (std::size_t a = 0; a < sorted.size(); ++a)
    for (std::size_t b = 0; b + 1 < sorted.size() - a; ++b)
      if (sorted[b] > sorted[b + 1]) {
        std::swap(sorted[b], sorted[b + 1]);
        sign = -sign;
      }
  for (std::size_t k = 0; k + 1 < sorted.size(); ++k)
    if (sorted[k] == sorted[k + 1]) return f;
  for (int k : sorted)
    if (k < 0 || k >= dim) throw Error(ErrorCode::InvalidArgument, "form index out of range");
  f.add(mask_of(sorted), sign * coeff);
  return f;
}

FormValue FormValue::scalar(int dim, double value) {
  FormValue f(dim, 0);
  f.add(0, value);
  return f;
}

FormValue FormValue::one_form(const Vector& components) {
  const int dim = static_cast<int>(components.size());
  FormValue f(dim, 1);
  for (int k = 0; k < dim; ++k) f.add(FormMask{1} << k, components(k));
  return f;
}

double FormValue::coeff(FormMask mask) const {
  const auto it = terms_.find(mask);
  return it == terms_.end() ? 0.0 : it->second;
}

double FormValue::component(const std::vector<int>& indices) const {
  const FormValue m = monomial(dim_, indices, 1.0);
  if (m.terms_.empty()) return 0.0;
  const auto& [mask, sign] = *m.terms_.begin();
  return sign * coeff(mask);
}

void FormValue::add(FormMask mask, double value) {
  if (std::popcount(mask) != degree_) throw Error(ErrorCode::InvalidArgument, "monomial degree mismatch");
  if (value == 0.0) return;
  terms_[mask] += value;
}

double FormValue::max_abs() const {
  double m = 0.0;
  for (const auto& [mask, v] : terms_) m = std::max(m, std::abs(v));
  return m;
}

FormValue& FormValue::operator+=(const FormValue& o) {
  if (o.dim_ != dim_ || o.degree_ != degree_) throw Error(ErrorCode::InvalidArgument, "adding forms of different type");
  for (const auto& [mask, v] : o.terms_) terms_[mask] += v;
  return *this;
}

FormValue& FormValue::operator-=(const FormValue& o) {
  if (o.dim_ != dim_ || o.degree_ != degree_) throw Error(ErrorCode::InvalidArgument, "subtracting forms of different type");
  for (const auto& [mask, v] : o.terms_) terms_[mask] -= v;
  return *this;
}

FormValue& FormValue::operator*=(double s) {
  for (auto& [mask, v] : terms_) v *= s;
  return *this;
}

namespace {

// Sign of the shuffle that sorts (indices of A) followed by (indices of B).
int shuffle_sign(FormMask a, FormMask b) {
  int swaps = 0;
  for (FormMask rest = b; rest != 0; rest &= rest - 1) {
    const FormMask low = rest & (~rest + 1);
    // Elements of a greater than this element of b.
    swaps += std::popcount(a & ~((low << 1) - 1));
  }
  return swaps % 2 == 0 ? 1 : -1;
}

}  // namespace

FormValue wedge(const FormValue& a, const FormValue& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::InvalidArgument, "wedge of forms on different charts");
  if (a.degree() + b.degree() > a.dim()) throw Error(ErrorCode::DegreeOverflow, "wedge degree exceeds the dimension");
  FormValue out(a.dim(), a.degree() + b.degree());
  for (const auto& [ma, va] : a.terms())
    for (const auto& [mb, vb] : b.terms()) {
      if (ma & mb) continue;
      out.add(ma | mb, shuffle_sign(ma, mb) * va * vb);
    }
  return out;
}

FormValue interior(const Vector& v, const FormValue& a) {
  if (a.degree() == 0) throw Error(ErrorCode::DegreeUnderflow, "interior product of a 0-form");
  if (v.size() != a.dim()) throw Error(ErrorCode::InvalidArgument, "vector and form live on different charts");
  FormValue out(a.dim(), a.degree() - 1);
  for (const auto& [mask, coeff] : a.terms()) {
    int position = 0;
    for (FormMask rest = mask; rest != 0; rest &= rest - 1, ++position) {
      const int k = std::countr_zero(rest);
      if (v(k) == 0.0) continue;
      const double sign = position % 2 == 0 ? 1.0 : -1.0;
      out.add(mask & ~(FormMask{1} << k), sign * v(k) * coeff);
    }
  }
  return out;
}

DifferentialForm::DifferentialForm(int dim, int degree, Evaluator eval)
    : dim_(dim), degree_(degree), eval_(std::move(eval)) {
  if (degree < 0 || degree > dim) throw Error(ErrorCode::DegreeOverflow, "form degree exceeds the dimension");
}

DifferentialForm DifferentialForm::constant(const FormValue& value) {
  return DifferentialForm(value.dim(), value.degree(), [value](const Vector&) { return value; });
}

DifferentialForm DifferentialForm::function(int dim, std::function<double(const Vector&)> f) {
  return DifferentialForm(dim, 0, [dim, f = std::move(f)](const Vector& z) { return FormValue::scalar(dim, f(z)); });
}

FormValue DifferentialForm::operator()(const Vector& z) const {
  if (z.size() != dim_) throw Error(ErrorCode::InvalidArgument, "chart point has wrong dimension");
  FormValue v = eval_(z);
  if (v.degree() != degree_ || v.dim() != dim_) throw Error(ErrorCode::InvalidArgument, "form evaluator returned wrong type");
  return v;
}

DifferentialForm operator+(const DifferentialForm& a, const DifferentialForm& b) {
  if (a.degree() != b.degree() || a.dim() != b.dim()) throw Error(ErrorCode::InvalidArgument, "adding forms of different type");
  return DifferentialForm(a.dim(), a.degree(), [a, b](const Vector& z) { return a(z) + b(z); });
}

DifferentialForm operator-(const DifferentialForm& a, const DifferentialForm& b) {
  if (a.degree() != b.degree() || a.dim() != b.dim()) throw Error(ErrorCode::InvalidArgument, "subtracting forms of different type");
  return DifferentialForm(a.dim(), a.degree(), [a, b](const Vector& z) { return a(z) - b(z); });
}

DifferentialForm operator*(double s, const DifferentialForm& a) {
  return DifferentialForm(a.dim(), a.degree(), [s, a](const Vector& z) { return s * a(z); });
}

DifferentialForm form_wedge(const DifferentialForm& a, const DifferentialForm& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::InvalidArgument, "wedge of forms on different charts");
  if (a.degree() + b.degree() > a.dim()) throw Error(ErrorCode::DegreeOverflow, "wedge degree exceeds the dimension");
  return DifferentialForm(a.dim(), a.degree() + b.degree(), [a, b](const Vector& z) { return wedge(a(z), b(z)); });
}

DifferentialForm form_interior(const JetVectorField& v, const DifferentialForm& a) {
  if (a.degree() == 0) throw Error(ErrorCode::DegreeUnderflow, "interior product of a 0-form");
  if (v.dim != a.dim()) throw Error(ErrorCode::InvalidArgument, "vector field and form live on different charts");
  return DifferentialForm(a.dim(), a.degree() - 1, [v, a](const Vector& z) { return interior(v.components(z), a(z)); });
}

DifferentialForm form_d(const DifferentialForm& a, double fd_step) {
  if (a.degree() + 1 > a.dim()) throw Error(ErrorCode::DegreeOverflow, "exterior derivative of a top form");
  const int dim = a.dim();
  return DifferentialForm(dim, a.degree() + 1, [a, dim, fd_step](const Vector& z) {
    FormValue out(dim, a.degree() + 1);
    Vector q = z;
    for (int j = 0; j < dim; ++j) {
      q(j) = z(j) + fd_step;
      const FormValue up = a(q);
      q(j) = z(j) - fd_step;
      const FormValue dn = a(q);
      q(j) = z(j);
      FormValue partial = up - dn;
      partial *= 1.0 / (2.0 * fd_step);
      out += wedge(FormValue::monomial(dim, {j}), partial);
    }
    return out;
  });
}

double form_discrepancy(const FormValue& a, const FormValue& b) { return (a - b).max_abs(); }

double form_discrepancy_modulo(const FormValue& a, const FormValue& b, const FormValue& modulo) {
  const FormValue diff = a - b;
  if (diff.degree() + modulo.degree() > diff.dim()) return 0.0;
  return wedge(diff, modulo).max_abs();
}

}  // namespace potmap
