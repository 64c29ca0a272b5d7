#include "potmap/energy.hpp"

#include "potmap/errors.hpp"

namespace potmap {

namespace {

// Gradient of c by central differences in x at fixed t.
Vector fd_potential_gradient(const std::function<double(const Vector&, const Vector&)>& c, const Vector& t,
                             const Vector& x, double step) {
  Vector grad(x.size());
  Vector q = x;
  for (int k = 0; k < x.size(); ++k) {
    q(k) = x(k) + step;
    const double up = c(t, q);
    q(k) = x(k) - step;
    const double dn = c(t, q);
    q(k) = x(k);
    grad(k) = (up - dn) / (2.0 * step);
  }
  return grad;
}

Matrix cross_field(const LagrangianSpec& spec, const JetPoint& jp) {
  if (!spec.has_cross_term()) return Matrix::Zero(jp.p(), jp.n());
  return (*spec.X)(jp.t, jp.x);
}

}  // namespace

double potential_value(const LagrangianSpec& spec, const Vector& t, const Vector& x) {
  if (spec.perfect_square) {
    if (!spec.X) throw Error(ErrorCode::MissingField, "perfect-square potential requires a field X");
    return potential_energy(*spec.X, spec.h, spec.g, t, x);
  }
  return spec.c ? spec.c(t, x) : 0.0;
}

Vector potential_gradient(const LagrangianSpec& spec, const Vector& t, const Vector& x) {
  const int n = static_cast<int>(x.size());
  if (spec.perfect_square) {
    if (!spec.X) throw Error(ErrorCode::MissingField, "perfect-square potential requires a field X");
    const DistTensorField& X = *spec.X;
    const Matrix Xv = X(t, x);
    const Matrix hinv = metric_inverse(spec.h, t);
    const Matrix g = metric_components(spec.g, x);
    const Tensor3 dg = metric_partials(spec.g, x);
    const Tensor3 dX = field_x_partials(X, t, x);
    const int p = X.p;
    Vector grad = Vector::Zero(n);
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b)
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
              s += hinv(a, b) * (0.5 * dg(k, i, j) * Xv(a, i) * Xv(b, j) + g(i, j) * dX(k, a, i) * Xv(b, j));
      grad(k) = s;
    }
    return grad;
  }
  if (!spec.c) return Vector::Zero(n);
  return fd_potential_gradient(spec.c, t, x, 1e-5);
}

double energy_density(const LagrangianSpec& spec, const JetPoint& jp) {
  const Matrix hinv = metric_inverse(spec.h, jp.t);
  const Matrix g = metric_components(spec.g, jp.x);
  double e = 0.5 * hinv.cwiseProduct(jp.x1 * g * jp.x1.transpose()).sum();
  if (spec.has_cross_term()) {
    const Matrix Xv = (*spec.X)(jp.t, jp.x);
    e -= hinv.cwiseProduct(jp.x1 * g * Xv.transpose()).sum();
  }
  return e + potential_value(spec, jp.t, jp.x);
}

double energy_density(const LagrangianSpec& spec, const SheetSample& phi, const Vector& t) {
  return energy_density(spec, sample_jet(phi, t, false).point());
}

double lagrangian_density(const LagrangianSpec& spec, const JetPoint& jp) {
  return energy_density(spec, jp) * volume_density(spec.h, jp.t);
}

Matrix energy_velocity_gradient(const LagrangianSpec& spec, const JetPoint& jp) {
  const Matrix hinv = metric_inverse(spec.h, jp.t);
  const Matrix g = metric_components(spec.g, jp.x);
  return hinv * (jp.x1 - cross_field(spec, jp)) * g;
}

Vector energy_position_gradient(const LagrangianSpec& spec, const JetPoint& jp) {
  const int p = jp.p();
  const int n = jp.n();
  const Matrix hinv = metric_inverse(spec.h, jp.t);
  const Matrix g = metric_components(spec.g, jp.x);
  const Tensor3 dg = metric_partials(spec.g, jp.x);
  const Matrix& x1 = jp.x1;
  Vector out = potential_gradient(spec, jp.t, jp.x);
  const bool cross = spec.has_cross_term();
  const Matrix Xv = cross_field(spec, jp);
  const Tensor3 dX = cross ? field_x_partials(*spec.X, jp.t, jp.x) : Tensor3(n, p, n);
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b) {
        if (hinv(a, b) == 0.0) continue;
        double inner = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            inner += 0.5 * dg(k, i, j) * x1(a, i) * x1(b, j);
            if (cross) inner -= dg(k, i, j) * x1(a, i) * Xv(b, j) + g(i, j) * x1(a, i) * dX(k, b, j);
          }
        s += hinv(a, b) * inner;
      }
    out(k) += s;
  }
  return out;
}

double pairwise_sum(const std::vector<double>& values) {
  std::vector<double> level = values;
  if (level.empty()) return 0.0;
  while (level.size() > 1) {
    std::vector<double> next((level.size() + 1) / 2);
    for (std::size_t k = 0; k < next.size(); ++k)
      next[k] = level[2 * k] + (2 * k + 1 < level.size() ? level[2 * k + 1] : 0.0);
    level.swap(next);
  }
  return level[0];
}

double energy_integral(const LagrangianSpec& spec, const SheetSample& phi, const GridSpec& domain) {
  validate_grid(domain);
  std::vector<double> terms(domain.node_count());
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const std::vector<int> idx = domain.unflatten(k);
    double w = 1.0;
    for (int a = 0; a < domain.dim(); ++a) {
      const bool end = idx[a] == 0 || idx[a] == domain.nodes[a] - 1;
      w *= end ? 0.5 * domain.spacing(a) : domain.spacing(a);
    }
    const Vector t = domain.node_point(idx);
    terms[k] = w * energy_density(spec, phi, t) * volume_density(spec.h, t);
  }
  return pairwise_sum(terms);
}

Vector euler_lagrange_residual(const LagrangianSpec& spec, const SheetJet& jet) {
  const int p = static_cast<int>(jet.t.size());
  const int n = static_cast<int>(jet.x.size());
  const JetPoint jp = jet.point();
  const Matrix hinv = metric_inverse(spec.h, jet.t);
  const Tensor3 dhinv = inverse_metric_partials(spec.h, jet.t);
  const Tensor3 H = christoffel(spec.h, jet.t);
  const Matrix g = metric_components(spec.g, jet.x);
  const Tensor3 dg = metric_partials(spec.g, jet.x);
  const bool cross = spec.has_cross_term();
  const Matrix y = jet.x1 - cross_field(spec, jp);
  Tensor3 dXt(p, p, n);
  Tensor3 dXx(n, p, n);
  if (cross) {
    dXt = field_t_partials(*spec.X, jet.t, jet.x);
    dXx = field_x_partials(*spec.X, jet.t, jet.x);
  }

  // Total t-derivative of y^j_b along phi: d_a y^j_b.
  Tensor3 dy(p, p, n);
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      for (int j = 0; j < n; ++j) {
        double v = jet.xx(a, b, j);
        if (cross) {
          v -= dXt(a, b, j);
          for (int l = 0; l < n; ++l) v -= dXx(l, b, j) * jet.x1(a, l);
        }
        dy(a, b, j) = v;
      }

  const Matrix P = energy_velocity_gradient(spec, jp);
  Vector out = energy_position_gradient(spec, jp);
  for (int k = 0; k < n; ++k) {
    double div = 0.0;
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b)
        for (int j = 0; j < n; ++j) {
          double dg_along = 0.0;
          for (int l = 0; l < n; ++l) dg_along += dg(l, k, j) * jet.x1(a, l);
          div += dhinv(a, a, b) * g(k, j) * y(b, j) + hinv(a, b) * dg_along * y(b, j) +
                 hinv(a, b) * g(k, j) * dy(a, b, j);
        }
    double trace_term = 0.0;
    for (int a = 0; a < p; ++a)
      for (int c = 0; c < p; ++c) trace_term += H(c, c, a) * P(a, k);
    out(k) -= div + trace_term;
  }
  return out;
}

Vector euler_lagrange_residual(const LagrangianSpec& spec, const SheetSample& phi, const Vector& t) {
  return euler_lagrange_residual(spec, sample_jet(phi, t));
}

Matrix energy_impulse(const LagrangianSpec& spec, const JetPoint& jp) {
  const int p = jp.p();
  const double vol = volume_density(spec.h, jp.t);
  const Matrix dL = energy_velocity_gradient(spec, jp) * vol;  // [a][i]
  const double L = energy_density(spec, jp) * vol;
  Matrix T = dL * jp.x1.transpose();  // (a, b) = dL/dx^i_a x^i_b
  T -= L * Matrix::Identity(p, p);
  return T;
}

Matrix energy_impulse(const LagrangianSpec& spec, const SheetSample& phi, const Vector& t) {
  return energy_impulse(spec, sample_jet(phi, t, false).point());
}

Vector lagrangian_time_partials(const LagrangianSpec& spec, const JetPoint& jp, double step) {
  const int p = jp.p();
  Vector out(p);
  JetPoint q = jp;
  for (int b = 0; b < p; ++b) {
    q.t(b) = jp.t(b) + step;
    const double up = lagrangian_density(spec, q);
    q.t(b) = jp.t(b) - step;
    const double dn = lagrangian_density(spec, q);
    q.t(b) = jp.t(b);
    out(b) = (up - dn) / (2.0 * step);
  }
  return out;
}

Vector impulse_divergence(const LagrangianSpec& spec, const SheetSample& phi, const Vector& t, double step) {
  const int p = phi.p;
  Vector div = Vector::Zero(p);
  if (phi.mode == SheetMode::Analytic) {
    Vector q = t;
    for (int a = 0; a < p; ++a) {
      q(a) = t(a) + step;
      const Matrix up = energy_impulse(spec, phi, q);
      q(a) = t(a) - step;
      const Matrix dn = energy_impulse(spec, phi, q);
      q(a) = t(a);
      div += ((up.row(a) - dn.row(a)) / (2.0 * step)).transpose();
    }
  } else {
    const auto node = phi.grid.locate(t);
    if (!node) throw Error(ErrorCode::OutOfDomain, "point is not a node of the sheet grid");
    for (int a = 0; a < p; ++a) {
      // Jets on the end nodes carry a different stencil error; keep them out of
      // the difference quotient wherever the axis is long enough.
      const int k = (*node)[a], count = phi.grid.nodes[a];
      const bool inner = count >= 5 && k >= 1 && k <= count - 2;
      const auto taps = inner ? first_derivative_taps(k - 1, count - 2, phi.grid.spacing(a))
                              : first_derivative_taps(k, count, phi.grid.spacing(a));
      for (const StencilTap& tap : taps) {
        std::vector<int> idx = *node;
        idx[a] += tap.offset;
        const Matrix T = energy_impulse(spec, sample_jet_at_node(phi, idx, false).point());
        div += tap.weight * T.row(a).transpose();
      }
    }
  }
  return div + lagrangian_time_partials(spec, sample_jet(phi, t, false).point());
}

double hamiltonian_density(const LagrangianSpec& spec, const JetPoint& jp) {
  const double vol = volume_density(spec.h, jp.t);
  const Matrix dL = energy_velocity_gradient(spec, jp) * vol;
  return jp.x1.cwiseProduct(dL).sum() - energy_density(spec, jp) * vol;
}

double hamiltonian_density(const LagrangianSpec& spec, const SheetSample& phi, const Vector& t) {
  return hamiltonian_density(spec, sample_jet(phi, t, false).point());
}

}  // namespace potmap
