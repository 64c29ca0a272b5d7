#include "potmap/field.hpp"

#include "potmap/errors.hpp"

namespace potmap {

namespace {

void check_dims(const DistTensorField& X, const Vector& t, const Vector& x) {
  if (t.size() != X.p || x.size() != X.n)
    throw Error(ErrorCode::InvalidArgument, "field evaluated at a point of wrong dimension");
}

Tensor3 fd_partials(const DistTensorField& X, const Vector& t, const Vector& x, bool wrt_t) {
  const int d = wrt_t ? X.p : X.n;
  Tensor3 out(d, X.p, X.n);
  Vector tq = t;
  Vector xq = x;
  const double h = X.fd_step;
  for (int c = 0; c < d; ++c) {
    double& slot = wrt_t ? tq(c) : xq(c);
    const double base = slot;
    slot = base + h;
    const Matrix up = X.components(tq, xq);
    slot = base - h;
    const Matrix dn = X.components(tq, xq);
    slot = base;
    for (int a = 0; a < X.p; ++a)
      for (int i = 0; i < X.n; ++i) out(c, a, i) = (up(a, i) - dn(a, i)) / (2.0 * h);
  }
  return out;
}

}  // namespace

Tensor3 field_t_partials(const DistTensorField& X, const Vector& t, const Vector& x) {
  check_dims(X, t, x);
  return X.dt_partial ? X.dt_partial(t, x) : fd_partials(X, t, x, true);
}

Tensor3 field_x_partials(const DistTensorField& X, const Vector& t, const Vector& x) {
  check_dims(X, t, x);
  return X.dx_partial ? X.dx_partial(t, x) : fd_partials(X, t, x, false);
}

double field_partial_consistency(const DistTensorField& X, const std::vector<std::pair<Vector, Vector>>& points) {
  double worst = 0.0;
  for (const auto& [t, x] : points) {
    if (X.dt_partial) worst = std::max(worst, (X.dt_partial(t, x) - fd_partials(X, t, x, true)).max_abs());
    if (X.dx_partial) worst = std::max(worst, (X.dx_partial(t, x) - fd_partials(X, t, x, false)).max_abs());
  }
  return worst;
}

DistTensorField zero_field(int p, int n) { return constant_field(Matrix::Zero(p, n)); }

DistTensorField constant_field(const Matrix& value) {
  DistTensorField X;
  X.p = static_cast<int>(value.rows());
  X.n = static_cast<int>(value.cols());
  X.components = [value](const Vector&, const Vector&) { return value; };
  const int p = X.p;
  const int n = X.n;
  X.dt_partial = [p, n](const Vector&, const Vector&) { return Tensor3(p, p, n); };
  X.dx_partial = [p, n](const Vector&, const Vector&) { return Tensor3(n, p, n); };
  return X;
}

double potential_energy(const DistTensorField& X, const MetricSpec& h, const MetricSpec& g, const Vector& t,
                        const Vector& x) {
  const Matrix Xv = X(t, x);
  const Matrix hinv = metric_inverse(h, t);
  const Matrix gm = metric_components(g, x);
  return 0.5 * (hinv.cwiseProduct(Xv * gm * Xv.transpose())).sum();
}

}  // namespace potmap
