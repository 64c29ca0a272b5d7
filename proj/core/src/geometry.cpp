#include "potmap/geometry.hpp"

#include <sstream>

#include "potmap/errors.hpp"

namespace potmap {

namespace {

void check_point(const MetricSpec& m, const Vector& p) {
  if (p.size() != m.dim) {
    std::ostringstream os;
    os << "metric '" << m.name << "' has dim " << m.dim << " but point has " << p.size() << " coordinates";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
}

}  // namespace

Matrix metric_components(const MetricSpec& m, const Vector& p) {
  check_point(m, p);
  Matrix g = m.components(p);
  if (g.rows() != m.dim || g.cols() != m.dim)
    throw Error(ErrorCode::InvalidArgument, "metric '" + m.name + "' returned a matrix of wrong shape");
  return g;
}

Matrix metric_inverse(const MetricSpec& m, const Vector& p) {
  const Matrix g = metric_components(m, p);
  const double det = g.determinant();
  if (!(std::abs(det) > kSingularDetTol)) {
    std::ostringstream os;
    os << "metric '" << m.name << "' is degenerate (det = " << det << ")";
    throw Error(ErrorCode::SingularMetric, os.str());
  }
  return g.inverse();
}

Tensor3 metric_partials(const MetricSpec& m, const Vector& p) {
  check_point(m, p);
  if (m.partials) return m.partials(p);
  const int d = m.dim;
  Tensor3 out(d, d, d);
  const double h = m.fd_step;
  Vector q = p;
  for (int c = 0; c < d; ++c) {
    q(c) = p(c) + h;
    const Matrix gp = m.components(q);
    q(c) = p(c) - h;
    const Matrix gm = m.components(q);
    q(c) = p(c);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) out(c, a, b) = (gp(a, b) - gm(a, b)) / (2.0 * h);
  }
  return out;
}

Tensor3 inverse_metric_partials(const MetricSpec& m, const Vector& p) {
  const Matrix inv = metric_inverse(m, p);
  const Tensor3 dg = metric_partials(m, p);
  const int d = m.dim;
  Tensor3 out(d, d, d);
  for (int c = 0; c < d; ++c) {
    Matrix slice(d, d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) slice(a, b) = dg(c, a, b);
    const Matrix r = -inv * slice * inv;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) out(c, a, b) = r(a, b);
  }
  return out;
}

Tensor3 levi_civita(const Matrix& inverse, const Tensor3& dg) {
  const int d = static_cast<int>(inverse.rows());
  // Christoffel symbols of the first kind, [l][b][c].
  Tensor3 first(d, d, d);
  for (int l = 0; l < d; ++l)
    for (int b = 0; b < d; ++b)
      for (int c = b; c < d; ++c) {
        const double v = 0.5 * (dg(b, l, c) + dg(c, l, b) - dg(l, b, c));
        first(l, b, c) = v;
        first(l, c, b) = v;
      }
  Tensor3 out(d, d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = b; c < d; ++c) {
        double s = 0.0;
        for (int l = 0; l < d; ++l) s += inverse(a, l) * first(l, b, c);
        out(a, b, c) = s;
        out(a, c, b) = s;
      }
  return out;
}

Tensor3 christoffel(const MetricSpec& m, const Vector& p) {
  check_point(m, p);
  const Matrix inv = metric_inverse(m, p);
  if (m.christoffel_analytic) return m.christoffel_analytic(p);
  return levi_civita(inv, metric_partials(m, p));
}

double volume_density(const MetricSpec& m, const Vector& p) {
  const Matrix g = metric_components(m, p);
  const double det = g.determinant();
  if (!(std::abs(det) > kSingularDetTol))
    throw Error(ErrorCode::SingularMetric, "metric '" + m.name + "' is degenerate");
  return std::sqrt(std::abs(det));
}

Tensor3 compatibility_residual(const MetricSpec& m, const Vector& p) {
  return compatibility_residual(m, p, christoffel(m, p));
}

Tensor3 compatibility_residual(const MetricSpec& m, const Vector& p, const Tensor3& gamma) {
  const Matrix g = metric_components(m, p);
  const Tensor3 dg = metric_partials(m, p);
  const int d = m.dim;
  Tensor3 out(d, d, d);
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double s = dg(k, i, j);
        for (int h = 0; h < d; ++h) s -= gamma(h, k, i) * g(h, j) + gamma(h, k, j) * g(h, i);
        out(k, i, j) = s;
      }
  return out;
}

Tensor3 inverse_compatibility_residual(const MetricSpec& m, const Vector& p) {
  const Matrix inv = metric_inverse(m, p);
  const Tensor3 dinv = inverse_metric_partials(m, p);
  const Tensor3 gamma = christoffel(m, p);
  const int d = m.dim;
  Tensor3 out(d, d, d);
  for (int c = 0; c < d; ++c)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        double s = dinv(c, a, b);
        for (int l = 0; l < d; ++l) s += gamma(a, c, l) * inv(l, b) + gamma(b, c, l) * inv(a, l);
        out(c, a, b) = s;
      }
  return out;
}

int negative_count(const std::vector<int>& signature) {
  int n = 0;
  for (int s : signature) n += s < 0 ? 1 : 0;
  return n;
}

int negative_eigenvalue_count(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric, Eigen::EigenvaluesOnly);
  int n = 0;
  for (int k = 0; k < es.eigenvalues().size(); ++k) n += es.eigenvalues()(k) < 0.0 ? 1 : 0;
  return n;
}

void verify_metric(const MetricSpec& m, const Vector& p) {
  const Matrix g = metric_components(m, p);
  if (static_cast<int>(m.signature.size()) != m.dim)
    throw Error(ErrorCode::InvalidArgument, "metric '" + m.name + "' declares a signature of wrong length");
  if (max_abs(Matrix(g - g.transpose())) > kSymmetryTol)
    throw Error(ErrorCode::InvalidArgument, "metric '" + m.name + "' is not symmetric");
  metric_inverse(m, p);
  if (negative_eigenvalue_count(g) != negative_count(m.signature)) {
    std::ostringstream os;
    os << "metric '" << m.name << "' has " << negative_eigenvalue_count(g)
       << " negative eigenvalues, declared " << negative_count(m.signature);
    throw Error(ErrorCode::SignatureMismatch, os.str());
  }
}

bool is_positive_definite(const MetricSpec& m) { return negative_count(m.signature) == 0; }

Vector lower_index(const MetricSpec& m, const Vector& p, const Vector& v) { return metric_components(m, p) * v; }

Vector raise_index(const MetricSpec& m, const Vector& p, const Vector& w) { return metric_inverse(m, p) * w; }

MetricSpec constant_metric(const Matrix& components, std::vector<int> signature, std::string name) {
  MetricSpec m;
  m.dim = static_cast<int>(components.rows());
  m.components = [components](const Vector&) { return components; };
  m.signature = std::move(signature);
  const int d = m.dim;
  m.partials = [d](const Vector&) { return Tensor3(d, d, d); };
  m.name = std::move(name);
  return m;
}

MetricSpec euclidean_metric(int dim) {
  return constant_metric(Matrix::Identity(dim, dim), std::vector<int>(dim, 1), "euclidean");
}

MetricSpec minkowski_metric(int dim) {
  Matrix eta = Matrix::Identity(dim, dim);
  eta(0, 0) = -1.0;
  std::vector<int> sig(dim, 1);
  sig[0] = -1;
  return constant_metric(eta, std::move(sig), "minkowski");
}

MetricSpec sphere_metric() {
  MetricSpec m;
  m.dim = 2;
  m.name = "sphere";
  m.signature = {1, 1};
  m.components = [](const Vector& p) {
    Matrix g = Matrix::Zero(2, 2);
    const double s = std::sin(p(0));
    g(0, 0) = 1.0;
    g(1, 1) = s * s;
    return g;
  };
  m.partials = [](const Vector& p) {
    Tensor3 d(2, 2, 2);
    d(0, 1, 1) = 2.0 * std::sin(p(0)) * std::cos(p(0));
    return d;
  };
  m.christoffel_analytic = [](const Vector& p) {
    const double s = std::sin(p(0));
    const double c = std::cos(p(0));
    if (!(std::abs(s) > 1e-12)) throw Error(ErrorCode::SingularMetric, "sphere chart is singular at sin(theta)=0");
    Tensor3 gamma(2, 2, 2);
    gamma(0, 1, 1) = -s * c;
    gamma(1, 0, 1) = c / s;
    gamma(1, 1, 0) = c / s;
    return gamma;
  };
  return m;
}

MetricSpec hyperbolic_metric(int dim) {
  MetricSpec m;
  m.dim = dim;
  m.name = "hyperbolic";
  m.signature = std::vector<int>(dim, 1);
  m.components = [dim](const Vector& p) {
    const double y = p(dim - 1);
    return Matrix(Matrix::Identity(dim, dim) / (y * y));
  };
  m.partials = [dim](const Vector& p) {
    const double y = p(dim - 1);
    Tensor3 d(dim, dim, dim);
    for (int a = 0; a < dim; ++a) d(dim - 1, a, a) = -2.0 / (y * y * y);
    return d;
  };
  return m;
}

MetricSpec catalog_metric(const std::string& name, int dim) {
  if (dim <= 0) throw Error(ErrorCode::ConfigError, "metric dimension must be positive");
  if (name == "euclidean") return euclidean_metric(dim);
  if (name == "minkowski") return minkowski_metric(dim);
  if (name == "hyperbolic") return hyperbolic_metric(dim);
  if (name == "sphere") {
    if (dim != 2) throw Error(ErrorCode::ConfigError, "the sphere metric is two-dimensional");
    return sphere_metric();
  }
  throw Error(ErrorCode::ConfigError, "unknown catalog metric '" + name + "'");
}

}  // namespace potmap
