#include "potmap/potential.hpp"

#include <sstream>

#include "potmap/errors.hpp"

namespace potmap {

FieldGeometry field_geometry(const DistTensorField& X, const MetricSpec& h, const MetricSpec& g, const Vector& t,
                             const Vector& x) {
  const int p = X.p;
  const int n = X.n;
  FieldGeometry fg;
  fg.X = X(t, x);
  fg.dX_dt = field_t_partials(X, t, x);
  fg.dX_dx = field_x_partials(X, t, x);
  fg.h = metric_components(h, t);
  fg.h_inv = metric_inverse(h, t);
  fg.g = metric_components(g, x);
  fg.g_inv = metric_inverse(g, x);
  fg.H = christoffel(h, t);
  fg.G = christoffel(g, x);

  fg.nabla_X = Tensor3(n, p, n);
  for (int j = 0; j < n; ++j)
    for (int a = 0; a < p; ++a)
      for (int i = 0; i < n; ++i) {
        double s = fg.dX_dx(j, a, i);
        for (int k = 0; k < n; ++k) s += fg.G(i, j, k) * fg.X(a, k);
        fg.nabla_X(j, a, i) = s;
      }

  fg.D_X = Tensor3(p, p, n);
  for (int b = 0; b < p; ++b)
    for (int a = 0; a < p; ++a)
      for (int i = 0; i < n; ++i) {
        double s = fg.dX_dt(b, a, i);
        for (int c = 0; c < p; ++c) s -= fg.H(c, b, a) * fg.X(c, i);
        fg.D_X(b, a, i) = s;
      }

  fg.F = Tensor3(p, n, n);
  for (int a = 0; a < p; ++a)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        double s = fg.nabla_X(j, a, i);
        for (int hh = 0; hh < n; ++hh)
          for (int k = 0; k < n; ++k) s -= fg.g(hh, j) * fg.g_inv(i, k) * fg.nabla_X(k, a, hh);
        fg.F(a, j, i) = s;
      }
  return fg;
}

CovariantDerivatives covariant_derivatives_of_X(const DistTensorField& X, const MetricSpec& h, const MetricSpec& g,
                                                const Vector& t, const Vector& x) {
  FieldGeometry fg = field_geometry(X, h, g, t, x);
  return {std::move(fg.nabla_X), std::move(fg.D_X)};
}

Tensor3 helicity(const DistTensorField& X, const MetricSpec& h, const MetricSpec& g, const Vector& t,
                 const Vector& x) {
  return field_geometry(X, h, g, t, x).F;
}

Tensor3 lower_helicity(const Tensor3& F, const Matrix& g, double scale) {
  const int p = F.dim0();
  const int n = F.dim1();
  Tensor3 omega(p, n, n);
  for (int a = 0; a < p; ++a)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int hh = 0; hh < n; ++hh) s += g(hh, i) * F(a, j, hh);
        omega(a, j, i) = scale * s;
      }
  return omega;
}

double skew_defect(const Tensor3& omega) {
  double worst = 0.0;
  for (int a = 0; a < omega.dim0(); ++a)
    for (int j = 0; j < omega.dim1(); ++j)
      for (int i = j; i < omega.dim2(); ++i) worst = std::max(worst, std::abs(omega(a, j, i) + omega(a, i, j)));
  return worst;
}

std::string_view to_string(CausalClass c) noexcept {
  switch (c) {
    case CausalClass::Timelike: return "timelike";
    case CausalClass::Lightlike: return "lightlike";
    case CausalClass::Spacelike: return "spacelike";
  }
  return "unknown";
}

CausalClass classify_potential_energy(double f, double null_band) noexcept {
  if (std::abs(f) < null_band) return CausalClass::Lightlike;
  return f < 0.0 ? CausalClass::Timelike : CausalClass::Spacelike;
}

DistTensorField rescaled_field(const DistTensorField& X, const MetricSpec& h, const MetricSpec& g,
                               double critical_tol) {
  DistTensorField R;
  R.p = X.p;
  R.n = X.n;
  R.fd_step = X.fd_step;
  R.components = [X, h, g, critical_tol](const Vector& t, const Vector& x) {
    const double f = potential_energy(X, h, g, t, x);
    if (!(std::abs(f) > critical_tol)) throw Error(ErrorCode::CriticalPoint, "field cannot be rescaled on its critical set");
    return Matrix(X(t, x) / std::sqrt(2.0 * std::abs(f)));
  };
  return R;
}

CausalCharacter potential_energy_and_character(const DistTensorField& X, const MetricSpec& h, const MetricSpec& g,
                                               const Vector& t, const Vector& x, double critical_tol) {
  CausalCharacter out;
  out.f = potential_energy(X, h, g, t, x);
  out.kind = classify_potential_energy(out.f);
  if (std::abs(out.f) > critical_tol) out.rescaled = rescaled_field(X, h, g, critical_tol);
  return out;
}

Tensor3 integrability_residual(const DistTensorField& X, const Vector& t, const Vector& x) {
  const int p = X.p;
  const int n = X.n;
  Tensor3 out(p, p, n);
  if (p < 2) return out;
  const Matrix Xv = X(t, x);
  const Tensor3 dt = field_t_partials(X, t, x);
  const Tensor3 dx = field_x_partials(X, t, x);
  auto flow = [&](int a, int b, int i) {
    double s = dt(b, a, i);
    for (int j = 0; j < n; ++j) s += dx(j, a, i) * Xv(b, j);
    return s;
  };
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      for (int i = 0; i < n; ++i) out(a, b, i) = flow(a, b, i) - flow(b, a, i);
  return out;
}

ProlongationMode parse_prolongation_mode(std::string_view name) {
  if (name == "eq9") return ProlongationMode::Eq9;
  if (name == "eq10") return ProlongationMode::Eq10;
  if (name == "eq11") return ProlongationMode::Eq11;
  if (name == "eq12") return ProlongationMode::Eq12;
  if (name == "eq11p") return ProlongationMode::Eq11Reduced;
  if (name == "eq12p") return ProlongationMode::Eq12Reduced;
  throw Error(ErrorCode::BadMode, "unknown prolongation mode '" + std::string(name) + "'");
}

std::string_view to_string(ProlongationMode mode) noexcept {
  switch (mode) {
    case ProlongationMode::Eq9: return "eq9";
    case ProlongationMode::Eq10: return "eq10";
    case ProlongationMode::Eq11: return "eq11";
    case ProlongationMode::Eq12: return "eq12";
    case ProlongationMode::Eq11Reduced: return "eq11p";
    case ProlongationMode::Eq12Reduced: return "eq12p";
  }
  return "unknown";
}

bool is_traced(ProlongationMode mode) noexcept {
  return mode != ProlongationMode::Eq9 && mode != ProlongationMode::Eq10;
}

namespace {

void check_jet(const DistTensorField& X, const JetPoint& jet) {
  if (jet.p() != X.p || jet.n() != X.n || jet.x1.rows() != X.p || jet.x1.cols() != X.n)
    throw Error(ErrorCode::InvalidArgument, "jet point dimensions do not match the field");
}

// Pieces of the untraced systems, all [alpha][beta][i].
struct RhsTerms {
  Tensor3 gradient;  // g^ih g_kj (nabla_h X^k_a) X^j_b
  Tensor3 helical;   // F_j^i_a x^j_b
  Tensor3 drift;     // D_b X^i_a
  Tensor3 eq9;       // D_b X^i_a + nabla_j X^i_a x^j_b
};

RhsTerms rhs_terms(const FieldGeometry& fg, const Matrix& x1) {
  const int p = static_cast<int>(fg.X.rows());
  const int n = static_cast<int>(fg.X.cols());
  RhsTerms r{Tensor3(p, p, n), Tensor3(p, p, n), Tensor3(p, p, n), Tensor3(p, p, n)};
  // lowered[a][h][j] = g_kj nabla_h X^k_a
  Tensor3 lowered(p, n, n);
  for (int a = 0; a < p; ++a)
    for (int hh = 0; hh < n; ++hh)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += fg.g(k, j) * fg.nabla_X(hh, a, k);
        lowered(a, hh, j) = s;
      }
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      for (int i = 0; i < n; ++i) {
        double grad = 0.0;
        for (int hh = 0; hh < n; ++hh) {
          double inner = 0.0;
          for (int j = 0; j < n; ++j) inner += lowered(a, hh, j) * fg.X(b, j);
          grad += fg.g_inv(i, hh) * inner;
        }
        double hel = 0.0;
        double transport = 0.0;
        for (int j = 0; j < n; ++j) {
          hel += fg.F(a, j, i) * x1(b, j);
          transport += fg.nabla_X(j, a, i) * x1(b, j);
        }
        r.gradient(a, b, i) = grad;
        r.helical(a, b, i) = hel;
        r.drift(a, b, i) = fg.D_X(b, a, i);
        r.eq9(a, b, i) = fg.D_X(b, a, i) + transport;
      }
  return r;
}

Vector h_trace(const Matrix& h_inv, const Tensor3& t) {
  Vector out = Vector::Zero(t.dim2());
  for (int a = 0; a < t.dim0(); ++a)
    for (int b = 0; b < t.dim1(); ++b)
      for (int i = 0; i < t.dim2(); ++i) out(i) += h_inv(a, b) * t(a, b, i);
  return out;
}

}  // namespace

std::variant<Tensor3, Vector> prolongation_rhs(const DistTensorField& X, const MetricSpec& h, const MetricSpec& g,
                                               const JetPoint& jet, ProlongationMode mode) {
  check_jet(X, jet);
  const FieldGeometry fg = field_geometry(X, h, g, jet.t, jet.x);
  const RhsTerms r = rhs_terms(fg, jet.x1);
  switch (mode) {
    case ProlongationMode::Eq9: return r.eq9;
    case ProlongationMode::Eq10: return r.gradient + r.helical + r.drift;
    case ProlongationMode::Eq11: return h_trace(fg.h_inv, r.gradient + r.helical + r.drift);
    case ProlongationMode::Eq12: return h_trace(fg.h_inv, r.gradient + r.drift);
    case ProlongationMode::Eq11Reduced: return h_trace(fg.h_inv, r.helical + r.drift);
    case ProlongationMode::Eq12Reduced: return h_trace(fg.h_inv, r.drift);
  }
  throw Error(ErrorCode::BadMode, "unknown prolongation mode");
}

Vector traced_prolongation_rhs(const DistTensorField& X, const MetricSpec& h, const MetricSpec& g,
                               const JetPoint& jet, ProlongationMode mode) {
  if (!is_traced(mode))
    throw Error(ErrorCode::BadMode, "mode '" + std::string(to_string(mode)) + "' is not a traced system");
  return std::get<Vector>(prolongation_rhs(X, h, g, jet, mode));
}

Vector prolongation_residual(const DistTensorField& X, const MetricSpec& h, const MetricSpec& g, const SheetJet& jet,
                             ProlongationMode mode) {
  return tension(jet, h, g) - traced_prolongation_rhs(X, h, g, jet.point(), mode);
}

Vector prolongation_residual(const DistTensorField& X, const MetricSpec& h, const MetricSpec& g,
                             const SheetSample& phi, const Vector& t, ProlongationMode mode) {
  return prolongation_residual(X, h, g, sample_jet(phi, t), mode);
}

Tensor3 untraced_prolongation_residual(const DistTensorField& X, const MetricSpec& h, const MetricSpec& g,
                                       const SheetJet& jet, ProlongationMode mode) {
  if (is_traced(mode)) throw Error(ErrorCode::BadMode, "mode is traced; use prolongation_residual");
  return second_covariant_jet(jet, h, g) - std::get<Tensor3>(prolongation_rhs(X, h, g, jet.point(), mode));
}

GradfCheck gradf_term_check(const DistTensorField& X, const MetricSpec& h, const MetricSpec& g, const Vector& t,
                            const Vector& x, double step) {
  const FieldGeometry fg = field_geometry(X, h, g, t, x);
  const RhsTerms r = rhs_terms(fg, Matrix::Zero(X.p, X.n));
  GradfCheck out;
  out.term = h_trace(fg.h_inv, r.gradient);
  Vector df(X.n);
  Vector q = x;
  for (int k = 0; k < X.n; ++k) {
    q(k) = x(k) + step;
    const double up = potential_energy(X, h, g, t, q);
    q(k) = x(k) - step;
    const double dn = potential_energy(X, h, g, t, q);
    q(k) = x(k);
    df(k) = (up - dn) / (2.0 * step);
  }
  out.gradf_fd = fg.g_inv * df;
  return out;
}

Vector potential_residual(const LagrangianSpec& spec, const SheetJet& jet) {
  const int p = static_cast<int>(jet.t.size());
  const int n = static_cast<int>(jet.x.size());
  Vector res = tension(jet, spec.h, spec.g);
  const Matrix g_inv = metric_inverse(spec.g, jet.x);
  res -= g_inv * potential_gradient(spec, jet.t, jet.x);
  if (!spec.X) return res;
  const FieldGeometry fg = field_geometry(*spec.X, spec.h, spec.g, jet.t, jet.x);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b) {
        if (fg.h_inv(a, b) == 0.0) continue;
        double inner = fg.D_X(a, b, i);
        for (int k = 0; k < n; ++k) {
          double bracket = fg.nabla_X(k, b, i);
          for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) bracket -= fg.g(k, j) * fg.g_inv(i, l) * fg.nabla_X(l, b, j);
          inner += bracket * jet.x1(a, k);
        }
        s += fg.h_inv(a, b) * inner;
      }
    res(i) -= s;
  }
  return res;
}

Vector potential_residual(const LagrangianSpec& spec, const SheetSample& phi, const Vector& t) {
  return potential_residual(spec, sample_jet(phi, t));
}

ForceData force_from_field(const DistTensorField& X, const MetricSpec& h, const MetricSpec& g) {
  ForceData force;
  force.F = [X, h, g](const Vector& t, const Vector& x) { return helicity(X, h, g, t, x); };
  force.U = [X, h, g](const Vector& t, const Vector& x) {
    const Tensor3 D = covariant_derivatives_of_X(X, h, g, t, x).D;
    Tensor3 U(X.p, X.p, X.n);
    for (int a = 0; a < X.p; ++a)
      for (int b = 0; b < X.p; ++b)
        for (int i = 0; i < X.n; ++i) U(a, b, i) = D(b, a, i);
    return U;
  };
  force.c = [X, h, g](const Vector& t, const Vector& x) { return potential_energy(X, h, g, t, x); };
  force.grad_c = [X, h, g](const Vector& t, const Vector& x) {
    LagrangianSpec spec{h, g, X, {}, true, true};
    return potential_gradient(spec, t, x);
  };
  return force;
}

Vector lorentz_udriste_residual(const ForceData& force, const MetricSpec& h, const MetricSpec& g,
                                const SheetJet& jet) {
  const int p = static_cast<int>(jet.t.size());
  const int n = static_cast<int>(jet.x.size());
  const Tensor3 F = force.F(jet.t, jet.x);
  const Matrix gm = metric_components(g, jet.x);
  const double defect = skew_defect(lower_helicity(F, gm));
  if (defect > kSkewTol) {
    std::ostringstream os;
    os << "g o F is not skew-symmetric (defect " << defect << ")";
    throw Error(ErrorCode::SkewViolation, os.str());
  }
  const Tensor3 U = force.U(jet.t, jet.x);
  const Matrix h_inv = metric_inverse(h, jet.t);
  const Matrix g_inv = metric_inverse(g, jet.x);

  Vector grad_c;
  if (force.grad_c) {
    grad_c = force.grad_c(jet.t, jet.x);
  } else {
    grad_c = Vector::Zero(n);
    if (force.c) {
      const double step = 1e-5;
      Vector q = jet.x;
      for (int k = 0; k < n; ++k) {
        q(k) = jet.x(k) + step;
        const double up = force.c(jet.t, q);
        q(k) = jet.x(k) - step;
        const double dn = force.c(jet.t, q);
        q(k) = jet.x(k);
        grad_c(k) = (up - dn) / (2.0 * step);
      }
    }
  }

  Vector res = tension(jet, h, g) - g_inv * grad_c;
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b) {
        double inner = U(a, b, i);
        for (int j = 0; j < n; ++j) inner += F(a, j, i) * jet.x1(b, j);
        s += h_inv(a, b) * inner;
      }
    res(i) -= s;
  }
  return res;
}

Vector lorentz_udriste_residual(const ForceData& force, const MetricSpec& h, const MetricSpec& g,
                                const SheetSample& phi, const Vector& t) {
  return lorentz_udriste_residual(force, h, g, sample_jet(phi, t));
}

NonlinearConnection nonlinear_connection(const DistTensorField& X, const MetricSpec& h, const MetricSpec& g,
                                         const JetPoint& jet) {
  check_jet(X, jet);
  const int p = X.p;
  const int n = X.n;
  const FieldGeometry fg = field_geometry(X, h, g, jet.t, jet.x);
  NonlinearConnection nc{Tensor3(p, n, n), Tensor3(p, p, n)};
  for (int a = 0; a < p; ++a)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        double s = -fg.F(a, j, i);
        for (int k = 0; k < n; ++k) s += fg.G(i, j, k) * jet.x1(a, k);
        nc.N(a, j, i) = s;
      }
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int c = 0; c < p; ++c) s -= fg.H(c, a, b) * jet.x1(c, i);
        nc.M(a, b, i) = s;
      }
  return nc;
}

}  // namespace potmap
