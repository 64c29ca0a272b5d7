#include "potmap/hamilton.hpp"

#include <Eigen/QR>
#include <bit>
#include <cmath>

#include "potmap/errors.hpp"
#include "potmap/potential.hpp"

namespace potmap {

AdaptedFrames adapted_frames(const MetricSpec& h, const MetricSpec& g, const JetPoint& jp) {
  const JetChart chart{jp.p(), jp.n()};
  const int p = chart.p;
  const int n = chart.n;
  metric_inverse(h, jp.t);
  metric_inverse(g, jp.x);
  const Tensor3 H = christoffel(h, jp.t);
  const Tensor3 G = christoffel(g, jp.x);
  const int D = chart.dim();
  AdaptedFrames out{Matrix::Identity(D, D), Matrix::Identity(D, D)};

  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int c = 0; c < p; ++c) s += H(c, a, b) * jp.x1(c, i);
        out.frame(chart.t_index(a), chart.x1_index(b, i)) += s;
      }
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < p; ++a)
      for (int hh = 0; hh < n; ++hh) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += G(hh, i, k) * jp.x1(a, k);
        out.frame(chart.x_index(i), chart.x1_index(a, hh)) -= s;
      }
  for (int b = 0; b < p; ++b)
    for (int j = 0; j < n; ++j) {
      const int row = chart.x1_index(b, j);
      for (int l = 0; l < p; ++l) {
        double s = 0.0;
        for (int c = 0; c < p; ++c) s += H(c, b, l) * jp.x1(c, j);
        out.coframe(row, chart.t_index(l)) -= s;
      }
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int hh = 0; hh < n; ++hh) s += G(j, hh, k) * jp.x1(b, hh);
        out.coframe(row, chart.x_index(k)) += s;
      }
    }
  return out;
}

Matrix sasaki_adapted_blocks(const MetricSpec& h, const MetricSpec& g, const JetPoint& jp) {
  const JetChart chart{jp.p(), jp.n()};
  const int p = chart.p;
  const int n = chart.n;
  const Matrix hm = metric_components(h, jp.t);
  const Matrix hinv = metric_inverse(h, jp.t);
  const Matrix gm = metric_components(g, jp.x);
  metric_inverse(g, jp.x);
  Matrix B = Matrix::Zero(chart.dim(), chart.dim());
  B.block(0, 0, p, p) = hm;
  B.block(p, p, n, n) = gm;
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) B(chart.x1_index(a, i), chart.x1_index(b, j)) = hinv(a, b) * gm(i, j);
  return B;
}

Matrix sasaki_metric(const MetricSpec& h, const MetricSpec& g, const JetPoint& jp) {
  const Matrix C = adapted_frames(h, g, jp).coframe;
  const Matrix S = C.transpose() * sasaki_adapted_blocks(h, g, jp) * C;
  return 0.5 * (S + S.transpose());
}

HamiltonVariant parse_hamilton_variant(std::string_view name) {
  if (name == "theorem1") return HamiltonVariant::Theorem1;
  if (name == "theorem2") return HamiltonVariant::Theorem2;
  throw Error(ErrorCode::BadMode, "unknown Hamilton variant '" + std::string(name) + "'");
}

std::string_view to_string(HamiltonVariant v) noexcept {
  return v == HamiltonVariant::Theorem1 ? "theorem1" : "theorem2";
}

HamiltonSetup make_hamilton_setup(std::optional<DistTensorField> X, MetricSpec h, MetricSpec g,
                                  HamiltonVariant variant) {
  if (variant == HamiltonVariant::Theorem2 && !X)
    throw Error(ErrorCode::MissingField, "the second Hamilton variant requires a field X");
  if (X && (X->p != h.dim || X->n != g.dim))
    throw Error(ErrorCode::InvalidArgument, "field dimensions do not match the metrics");
  if (h.dim + g.dim + h.dim * g.dim > kMaxFormDim)
    throw Error(ErrorCode::InvalidArgument, "jet chart too large for form storage");
  HamiltonSetup s{std::move(X), std::move(h), std::move(g), variant, {}};
  s.chart = JetChart{s.h.dim, s.g.dim};
  return s;
}

FormValue volume_form_value(const JetChart& chart, const MetricSpec& h, const Vector& t) {
  std::vector<int> idx(chart.p);
  for (int a = 0; a < chart.p; ++a) idx[a] = chart.t_index(a);
  return FormValue::monomial(chart.dim(), idx, volume_density(h, t));
}

DifferentialForm volume_form(const JetChart& chart, const MetricSpec& h) {
  return DifferentialForm(chart.dim(), chart.p,
                          [chart, h](const Vector& z) { return volume_form_value(chart, h, chart.point(z).t); });
}

namespace {

FormValue basis_one_form(int dim, int k) { return FormValue::monomial(dim, {k}); }

FormValue row_one_form(const Matrix& m, int row) { return FormValue::one_form(m.row(row).transpose()); }

}  // namespace

FormValue polysymplectic_prefactor_value(const HamiltonSetup& s, int alpha, const Vector& z) {
  const JetChart& chart = s.chart;
  const int D = chart.dim();
  const int p = chart.p;
  const int n = chart.n;
  const JetPoint jp = chart.point(z);
  const Matrix gm = metric_components(s.g, jp.x);
  const Matrix C = adapted_frames(s.h, s.g, jp).coframe;

  FormValue A(D, 2);
  for (int i = 0; i < n; ++i) {
    FormValue dxi = basis_one_form(D, chart.x_index(i));
    for (int j = 0; j < n; ++j) {
      if (gm(i, j) == 0.0) continue;
      A += gm(i, j) * wedge(dxi, row_one_form(C, chart.x1_index(alpha, j)));
    }
  }
  if (s.variant == HamiltonVariant::Theorem2) {
    const FieldGeometry fg = field_geometry(*s.X, s.h, s.g, jp.t, jp.x);
    const Tensor3 omega = lower_helicity(fg.F, fg.g, 0.5);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        A += FormValue::monomial(D, {chart.x_index(i), chart.x_index(j)}, omega(alpha, i, j));
    for (int b = 0; b < p; ++b)
      for (int j = 0; j < n; ++j) {
        double c = 0.0;
        for (int i = 0; i < n; ++i) c += gm(i, j) * fg.D_X(b, alpha, i);
        A += FormValue::monomial(D, {chart.t_index(b), chart.x_index(j)}, c);
      }
  }
  return A;
}

DifferentialForm polysymplectic_prefactor(const HamiltonSetup& s, int alpha) {
  return DifferentialForm(s.chart.dim(), 2,
                          [s, alpha](const Vector& z) { return polysymplectic_prefactor_value(s, alpha, z); });
}

LiouvilleForms liouville_and_omega(const std::optional<DistTensorField>& X, const MetricSpec& h, const MetricSpec& g,
                                   HamiltonVariant variant) {
  return liouville_and_omega(make_hamilton_setup(X, h, g, variant));
}

LiouvilleForms liouville_and_omega(const HamiltonSetup& s) {
  const JetChart chart = s.chart;
  const int D = chart.dim();
  LiouvilleForms out;
  for (int alpha = 0; alpha < chart.p; ++alpha) {
    out.theta.emplace_back(D, chart.p + 1, [s, alpha](const Vector& z) {
      const JetChart& c = s.chart;
      const JetPoint jp = c.point(z);
      const Matrix gm = metric_components(s.g, jp.x);
      Matrix y = jp.x1;
      if (s.variant == HamiltonVariant::Theorem2) y -= (*s.X)(jp.t, jp.x);
      Vector comp = Vector::Zero(c.dim());
      for (int j = 0; j < c.n; ++j) comp(c.x_index(j)) = (y.row(alpha) * gm.col(j))(0);
      return wedge(FormValue::one_form(comp), volume_form_value(c, s.h, jp.t));
    });
    out.omega.emplace_back(D, chart.p + 2, [s, alpha](const Vector& z) {
      return wedge(polysymplectic_prefactor_value(s, alpha, z), volume_form_value(s.chart, s.h, s.chart.point(z).t));
    });
  }
  return out;
}

DifferentialForm hamiltonian_form(const HamiltonSetup& s) {
  return DifferentialForm(s.chart.dim(), s.chart.p, [s](const Vector& z) {
    const JetPoint jp = s.chart.point(z);
    const Matrix hinv = metric_inverse(s.h, jp.t);
    const Matrix gm = metric_components(s.g, jp.x);
    double e = 0.5 * hinv.cwiseProduct(jp.x1 * gm * jp.x1.transpose()).sum();
    if (s.X) e -= potential_energy(*s.X, s.h, s.g, jp.t, jp.x);
    FormValue v = volume_form_value(s.chart, s.h, jp.t);
    v *= e;
    return v;
  });
}

FormValue hamiltonian_differential_prefactor(const HamiltonSetup& s, const JetPoint& jp) {
  const JetChart& chart = s.chart;
  const int p = chart.p;
  const int n = chart.n;
  const Matrix hinv = metric_inverse(s.h, jp.t);
  const Matrix gm = metric_components(s.g, jp.x);
  const Matrix C = adapted_frames(s.h, s.g, jp).coframe;
  const Matrix c = hinv * jp.x1 * gm;  // (a, i) = h^ab g_ij x^j_b

  Vector comp = Vector::Zero(chart.dim());
  for (int a = 0; a < p; ++a)
    for (int i = 0; i < n; ++i) comp += c(a, i) * C.row(chart.x1_index(a, i)).transpose();
  if (s.X) {
    const FieldGeometry fg = field_geometry(*s.X, s.h, s.g, jp.t, jp.x);
    const Matrix q = hinv * fg.X * gm;  // (a, i) = h^ab g_ij X^j_b
    for (int k = 0; k < n; ++k) {
      double v = 0.0;
      for (int a = 0; a < p; ++a)
        for (int i = 0; i < n; ++i) v += q(a, i) * fg.nabla_X(k, a, i);
      comp(chart.x_index(k)) -= v;
    }
  }
  return FormValue::one_form(comp);
}

FormValue split_volume_factor(const JetChart& chart, const MetricSpec& h, const Vector& t, const FormValue& w,
                              double tol) {
  if (w.degree() != chart.p + 1) throw Error(ErrorCode::InvalidArgument, "expected a (p+1)-form");
  const FormMask time_mask = (FormMask{1} << chart.p) - 1;
  const double vol = volume_density(h, t);
  const double sign = chart.p % 2 == 0 ? 1.0 : -1.0;
  const double scale = 1.0 + w.max_abs();
  Vector comp = Vector::Zero(chart.dim());
  for (const auto& [mask, v] : w.terms()) {
    if ((mask & time_mask) == time_mask) {
      const int k = std::countr_zero(mask & ~time_mask);
      comp(k) = sign * v / vol;
    } else if (std::abs(v) > tol * scale) {
      throw Error(ErrorCode::NotResolvable, "form is not a multiple of the volume form");
    }
  }
  return FormValue::one_form(comp);
}

HamiltonianObject resolve_vector_object(const HamiltonSetup& s, const JetPoint& jp, const FormValue& B,
                                        bool with_time_part, double tol) {
  const JetChart& chart = s.chart;
  const int p = chart.p;
  const int n = chart.n;
  const int D = chart.dim();
  const Vector z = chart.coords(jp);
  const Matrix hinv = metric_inverse(s.h, jp.t);
  const Matrix frame = adapted_frames(s.h, s.g, jp).frame;

  std::vector<FormValue> A;
  A.reserve(p);
  for (int a = 0; a < p; ++a) A.push_back(polysymplectic_prefactor_value(s, a, z));

  const int unknowns = p * n + p * n * p;
  const int rows = D - p;
  auto restrict = [&](const FormValue& one) {
    Vector r(rows);
    for (int k = p; k < D; ++k) r(k - p) = one.coeff(FormMask{1} << k);
    return r;
  };

  std::vector<Vector> fixed(p, Vector::Zero(D));
  Vector b0 = Vector::Zero(rows);
  if (with_time_part) {
    for (int a = 0; a < p; ++a) {
      for (int c = 0; c < p; ++c) fixed[a] += hinv(a, c) * frame.row(chart.t_index(c)).transpose();
      b0 += restrict(interior(fixed[a], A[a]));
    }
  }

  // Column order: u(a, l) then V(a, l, c).
  auto u_col = [&](int a, int l) { return a * n + l; };
  auto v_col = [&](int a, int l, int c) { return p * n + (a * n + l) * p + c; };
  Matrix M(rows, unknowns);
  for (int a = 0; a < p; ++a)
    for (int l = 0; l < n; ++l) {
      M.col(u_col(a, l)) = restrict(interior(frame.row(chart.x_index(l)).transpose(), A[a]));
      for (int c = 0; c < p; ++c) {
        Vector e = Vector::Zero(D);
        e(chart.x1_index(c, l)) = 1.0;
        M.col(v_col(a, l, c)) = restrict(interior(e, A[a]));
      }
    }

  const Vector target = restrict(B) - b0;
  const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(M);
  const Vector xi = cod.solve(target);
  HamiltonianObject out;
  out.residual = max_abs(Vector(M * xi - target));
  if (!std::isfinite(out.residual) || out.residual > tol * (1.0 + max_abs(target)))
    throw Error(ErrorCode::NotResolvable, "differential is not in the image of the contraction map");

  out.u = Matrix(p, n);
  out.V = Tensor3(p, n, p);
  out.trace = Vector::Zero(n);
  out.vectors = fixed;
  for (int a = 0; a < p; ++a)
    for (int l = 0; l < n; ++l) {
      out.u(a, l) = xi(u_col(a, l));
      out.vectors[a] += out.u(a, l) * frame.row(chart.x_index(l)).transpose();
      for (int c = 0; c < p; ++c) {
        out.V(a, l, c) = xi(v_col(a, l, c));
        out.vectors[a](chart.x1_index(c, l)) += out.V(a, l, c);
      }
      out.trace(l) += out.V(a, l, a);
    }
  return out;
}

HamiltonianObject resolve_hamiltonian_object(const HamiltonSetup& s, const JetPoint& jp) {
  return resolve_vector_object(s, jp, hamiltonian_differential_prefactor(s, jp),
                               s.variant == HamiltonVariant::Theorem2);
}

HamiltonResidual hamilton_system_residual(const HamiltonSetup& s, const SheetJet& jet) {
  const JetPoint jp = jet.point();
  const int p = jp.p();
  const int n = jp.n();
  const HamiltonianObject obj = resolve_hamiltonian_object(s, jp);
  const Matrix hinv = metric_inverse(s.h, jet.t);
  const Tensor3 dhinv = inverse_metric_partials(s.h, jet.t);
  const Tensor3 H = christoffel(s.h, jet.t);
  const Tensor3 G = christoffel(s.g, jet.x);

  // Along phi the first equation makes u = h^ab x_b; its adapted divergence
  // d_a u^{ai} + H^a_ac u^{ci} + G^i_jk x^j_a u^{ak}.
  const Matrix u = hinv * jet.x1;
  Vector div = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    double v = 0.0;
    for (int a = 0; a < p; ++a) {
      for (int b = 0; b < p; ++b) v += dhinv(a, a, b) * jet.x1(b, i) + hinv(a, b) * jet.xx(a, b, i);
      for (int c = 0; c < p; ++c) v += H(a, a, c) * u(c, i);
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) v += G(i, j, k) * jet.x1(a, j) * u(a, k);
    }
    div(i) = v;
  }
  return HamiltonResidual{obj.u - u, div - obj.trace, div, obj.trace};
}

HamiltonResidual hamilton_system_residual(const std::optional<DistTensorField>& X, const MetricSpec& h,
                                          const MetricSpec& g, const SheetSample& phi, const Vector& t,
                                          HamiltonVariant variant) {
  return hamilton_system_residual(make_hamilton_setup(X, h, g, variant), sample_jet(phi, t));
}

DifferentialForm poisson_bracket(const HamiltonSetup& s, const DifferentialForm& f1, const DifferentialForm& f2,
                                 double fd_step) {
  const int p = s.chart.p;
  if (f1.degree() != p || f2.degree() != p || f1.dim() != s.chart.dim() || f2.dim() != s.chart.dim())
    throw Error(ErrorCode::InvalidArgument, "Poisson bracket takes p-forms on the jet chart");
  const DifferentialForm d1 = form_d(f1, fd_step);
  const DifferentialForm d2 = form_d(f2, fd_step);
  return DifferentialForm(s.chart.dim(), p, [s, d1, d2](const Vector& z) {
    const JetPoint jp = s.chart.point(z);
    const HamiltonianObject x1 =
        resolve_vector_object(s, jp, split_volume_factor(s.chart, s.h, jp.t, d1(z)), false);
    const HamiltonianObject x2 =
        resolve_vector_object(s, jp, split_volume_factor(s.chart, s.h, jp.t, d2(z)), false);
    double value = 0.0;
    for (int a = 0; a < s.chart.p; ++a) {
      const FormValue A = polysymplectic_prefactor_value(s, a, z);
      value += interior(x1.vectors[a], interior(x2.vectors[a], A)).coeff(0);
    }
    FormValue out = volume_form_value(s.chart, s.h, jp.t);
    out *= value;
    return out;
  });
}

}  // namespace potmap
