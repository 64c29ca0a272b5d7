#include "potmap/jets.hpp"

#include <sstream>
#include <utility>

#include "potmap/errors.hpp"

namespace potmap {

std::size_t GridSpec::node_count() const noexcept {
  std::size_t n = 1;
  for (int k : nodes) n *= static_cast<std::size_t>(k);
  return nodes.empty() ? 0 : n;
}

double GridSpec::spacing(int axis) const { return (hi[axis] - lo[axis]) / (nodes[axis] - 1); }

std::vector<int> GridSpec::unflatten(std::size_t flat) const {
  std::vector<int> idx(nodes.size());
  for (int a = dim() - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % nodes[a]);
    flat /= nodes[a];
  }
  return idx;
}

std::size_t GridSpec::flatten(const std::vector<int>& index) const {
  std::size_t flat = 0;
  for (int a = 0; a < dim(); ++a) flat = flat * nodes[a] + index[a];
  return flat;
}

Vector GridSpec::node_point(std::size_t flat) const { return node_point(unflatten(flat)); }

Vector GridSpec::node_point(const std::vector<int>& index) const {
  Vector t(dim());
  for (int a = 0; a < dim(); ++a) {
    // Pin the last node exactly to the upper bound.
    t(a) = index[a] == nodes[a] - 1 ? hi[a] : lo[a] + index[a] * spacing(a);
  }
  return t;
}

bool GridSpec::is_interior(const std::vector<int>& index) const {
  for (int a = 0; a < dim(); ++a)
    if (index[a] <= 0 || index[a] >= nodes[a] - 1) return false;
  return true;
}

std::optional<std::vector<int>> GridSpec::locate(const Vector& t) const {
  if (t.size() != dim()) return std::nullopt;
  std::vector<int> idx(nodes.size());
  for (int a = 0; a < dim(); ++a) {
    const double s = (t(a) - lo[a]) / spacing(a);
    const double r = std::round(s);
    if (std::abs(s - r) > 1e-9 || r < 0 || r > nodes[a] - 1) return std::nullopt;
    idx[a] = static_cast<int>(r);
  }
  return idx;
}

bool GridSpec::contains(const Vector& t) const {
  if (t.size() != dim()) return false;
  for (int a = 0; a < dim(); ++a) {
    const double tol = 1e-9 * spacing(a);
    if (t(a) < lo[a] - tol || t(a) > hi[a] + tol) return false;
  }
  return true;
}

void validate_grid(const GridSpec& grid) {
  if (grid.nodes.empty() || grid.lo.size() != grid.nodes.size() || grid.hi.size() != grid.nodes.size())
    throw Error(ErrorCode::InvalidArgument, "grid axes are inconsistent");
  for (int a = 0; a < grid.dim(); ++a) {
    if (grid.nodes[a] < 3) {
      std::ostringstream os;
      os << "grid axis " << a + 1 << " has " << grid.nodes[a] << " nodes; at least 3 are required";
      throw Error(ErrorCode::InvalidArgument, os.str());
    }
    if (!(grid.hi[a] > grid.lo[a])) throw Error(ErrorCode::InvalidArgument, "grid axis has empty range");
  }
}

GridSpec uniform_grid(std::vector<double> lo, std::vector<double> hi, std::vector<int> nodes) {
  GridSpec g{std::move(lo), std::move(hi), std::move(nodes)};
  validate_grid(g);
  return g;
}

SheetSample SheetSample::analytic(int p, int n, std::function<Vector(const Vector&)> value,
                                  std::function<Matrix(const Vector&)> d1, std::function<Tensor3(const Vector&)> d2) {
  SheetSample s;
  s.mode = SheetMode::Analytic;
  s.p = p;
  s.n = n;
  s.value = std::move(value);
  s.d1 = std::move(d1);
  s.d2 = std::move(d2);
  return s;
}

SheetSample SheetSample::sampled(GridSpec grid, Matrix node_values) {
  validate_grid(grid);
  if (static_cast<std::size_t>(node_values.rows()) != grid.node_count())
    throw Error(ErrorCode::InvalidArgument, "node table does not match the grid");
  SheetSample s;
  s.mode = SheetMode::Grid;
  s.p = grid.dim();
  s.n = static_cast<int>(node_values.cols());
  s.grid = std::move(grid);
  s.node_values = std::move(node_values);
  return s;
}

using Tap = StencilTap;

std::vector<Tap> first_derivative_taps(int k, int count, double h) {
  if (k == 0) return {{0, -1.5 / h}, {1, 2.0 / h}, {2, -0.5 / h}};
  if (k == count - 1) return {{0, 1.5 / h}, {-1, -2.0 / h}, {-2, 0.5 / h}};
  return {{-1, -0.5 / h}, {1, 0.5 / h}};
}

std::vector<Tap> second_derivative_taps(int k, int count, double h) {
  const double h2 = h * h;
  if (k > 0 && k < count - 1) return {{-1, 1.0 / h2}, {0, -2.0 / h2}, {1, 1.0 / h2}};
  const int s = k == 0 ? 1 : -1;
  if (count >= 4) return {{0, 2.0 / h2}, {s, -5.0 / h2}, {2 * s, 4.0 / h2}, {3 * s, -1.0 / h2}};
  return {{0, 1.0 / h2}, {s, -2.0 / h2}, {2 * s, 1.0 / h2}};
}

namespace {

Vector node_value(const SheetSample& phi, std::vector<int> idx) {
  return phi.node_values.row(static_cast<Eigen::Index>(phi.grid.flatten(idx))).transpose();
}

SheetJet grid_jet(const SheetSample& phi, const std::vector<int>& node, bool with_second) {
  const GridSpec& grid = phi.grid;
  const int p = phi.p;
  const int n = phi.n;
  SheetJet jet;
  jet.t = grid.node_point(node);
  jet.x = node_value(phi, node);
  jet.x1 = Matrix::Zero(p, n);
  for (int a = 0; a < p; ++a) {
    for (const Tap& tap : first_derivative_taps(node[a], grid.nodes[a], grid.spacing(a))) {
      std::vector<int> idx = node;
      idx[a] += tap.offset;
      jet.x1.row(a) += tap.weight * node_value(phi, idx).transpose();
    }
  }
  jet.xx = Tensor3(p, p, n);
  if (!with_second) return jet;
  for (int a = 0; a < p; ++a) {
    for (int b = a; b < p; ++b) {
      Vector acc = Vector::Zero(n);
      if (a == b) {
        for (const Tap& tap : second_derivative_taps(node[a], grid.nodes[a], grid.spacing(a))) {
          std::vector<int> idx = node;
          idx[a] += tap.offset;
          acc += tap.weight * node_value(phi, idx);
        }
      } else {
        for (const Tap& ta : first_derivative_taps(node[a], grid.nodes[a], grid.spacing(a)))
          for (const Tap& tb : first_derivative_taps(node[b], grid.nodes[b], grid.spacing(b))) {
            std::vector<int> idx = node;
            idx[a] += ta.offset;
            idx[b] += tb.offset;
            acc += ta.weight * tb.weight * node_value(phi, idx);
          }
      }
      for (int i = 0; i < n; ++i) {
        jet.xx(a, b, i) = acc(i);
        jet.xx(b, a, i) = acc(i);
      }
    }
  }
  return jet;
}

SheetJet analytic_jet(const SheetSample& phi, const Vector& t, bool with_second) {
  const int p = phi.p;
  const int n = phi.n;
  SheetJet jet;
  jet.t = t;
  jet.x = phi.value(t);
  jet.x1 = phi.d1 ? phi.d1(t) : fd_jacobian(phi.value, t, phi.fd_step);
  jet.xx = Tensor3(p, p, n);
  if (!with_second) return jet;
  if (phi.d2) {
    jet.xx = phi.d2(t);
    return jet;
  }
  if (phi.d1) {
    const double h = phi.fd_step;
    Vector q = t;
    for (int b = 0; b < p; ++b) {
      q(b) = t(b) + h;
      const Matrix up = phi.d1(q);
      q(b) = t(b) - h;
      const Matrix dn = phi.d1(q);
      q(b) = t(b);
      for (int a = 0; a < p; ++a)
        for (int i = 0; i < n; ++i) jet.xx(a, b, i) = (up(a, i) - dn(a, i)) / (2.0 * h);
    }
    // symmetrize
    for (int a = 0; a < p; ++a)
      for (int b = a + 1; b < p; ++b)
        for (int i = 0; i < n; ++i) {
          const double v = 0.5 * (jet.xx(a, b, i) + jet.xx(b, a, i));
          jet.xx(a, b, i) = v;
          jet.xx(b, a, i) = v;
        }
    return jet;
  }
  const double h = phi.fd_step2;
  Vector q = t;
  for (int a = 0; a < p; ++a) {
    q(a) = t(a) + h;
    const Vector up = phi.value(q);
    q(a) = t(a) - h;
    const Vector dn = phi.value(q);
    q(a) = t(a);
    for (int i = 0; i < n; ++i) jet.xx(a, a, i) = (up(i) - 2.0 * jet.x(i) + dn(i)) / (h * h);
    for (int b = a + 1; b < p; ++b) {
      Vector acc = Vector::Zero(n);
      for (int sa : {1, -1})
        for (int sb : {1, -1}) {
          Vector r = t;
          r(a) += sa * h;
          r(b) += sb * h;
          acc += static_cast<double>(sa * sb) * phi.value(r);
        }
      acc /= 4.0 * h * h;
      for (int i = 0; i < n; ++i) {
        jet.xx(a, b, i) = acc(i);
        jet.xx(b, a, i) = acc(i);
      }
    }
  }
  return jet;
}

}  // namespace

Vector SheetSample::at(const Vector& t) const {
  if (mode == SheetMode::Analytic) return value(t);
  const auto node = grid.locate(t);
  if (!node) throw Error(ErrorCode::OutOfDomain, "point is not a node of the sheet grid");
  return node_value(*this, *node);
}

Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& t, double step) {
  const int p = static_cast<int>(t.size());
  Vector q = t;
  Matrix out;
  for (int a = 0; a < p; ++a) {
    q(a) = t(a) + step;
    const Vector up = f(q);
    q(a) = t(a) - step;
    const Vector dn = f(q);
    q(a) = t(a);
    if (a == 0) out = Matrix::Zero(p, up.size());
    out.row(a) = ((up - dn) / (2.0 * step)).transpose();
  }
  return out;
}

SheetJet sample_jet(const SheetSample& phi, const Vector& t, bool with_second) {
  if (t.size() != phi.p) throw Error(ErrorCode::InvalidArgument, "parameter point has wrong dimension");
  if (phi.mode == SheetMode::Analytic) return analytic_jet(phi, t, with_second);
  if (!phi.grid.contains(t)) throw Error(ErrorCode::OutOfDomain, "point lies outside the sheet grid");
  const auto node = phi.grid.locate(t);
  if (!node) throw Error(ErrorCode::OutOfDomain, "point is not a node of the sheet grid");
  return grid_jet(phi, *node, with_second);
}

SheetJet sample_jet_at_node(const SheetSample& phi, const std::vector<int>& node, bool with_second) {
  if (phi.mode != SheetMode::Grid) return analytic_jet(phi, phi.grid.node_point(node), with_second);
  return grid_jet(phi, node, with_second);
}

Matrix first_jet(const SheetSample& phi, const Vector& t) { return sample_jet(phi, t, false).x1; }

Tensor3 second_covariant_jet(const SheetJet& jet, const MetricSpec& h, const MetricSpec& g) {
  const int p = static_cast<int>(jet.t.size());
  const int n = static_cast<int>(jet.x.size());
  const Tensor3 H = christoffel(h, jet.t);
  const Tensor3 G = christoffel(g, jet.x);
  Tensor3 out = jet.xx;
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int c = 0; c < p; ++c) s -= H(c, a, b) * jet.x1(c, i);
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) s += G(i, j, k) * jet.x1(a, j) * jet.x1(b, k);
        out(a, b, i) += s;
      }
  return out;
}

Tensor3 second_covariant_jet(const SheetSample& phi, const MetricSpec& h, const MetricSpec& g, const Vector& t) {
  return second_covariant_jet(sample_jet(phi, t), h, g);
}

Vector tension(const SheetJet& jet, const MetricSpec& h, const MetricSpec& g) {
  const int p = static_cast<int>(jet.t.size());
  const int n = static_cast<int>(jet.x.size());
  const Tensor3 x2 = second_covariant_jet(jet, h, g);
  const Matrix hinv = metric_inverse(h, jet.t);
  Vector tau = Vector::Zero(n);
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      for (int i = 0; i < n; ++i) tau(i) += hinv(a, b) * x2(a, b, i);
  return tau;
}

Vector tension(const SheetSample& phi, const MetricSpec& h, const MetricSpec& g, const Vector& t) {
  return tension(sample_jet(phi, t), h, g);
}

double first_jet_consistency(const SheetSample& phi, const std::vector<Vector>& points) {
  if (phi.mode != SheetMode::Analytic || !phi.d1) return 0.0;
  double worst = 0.0;
  for (const Vector& t : points)
    worst = std::max(worst, max_abs(Matrix(phi.d1(t) - fd_jacobian(phi.value, t, phi.fd_step))));
  return worst;
}

}  // namespace potmap
