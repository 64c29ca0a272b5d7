#include "potmap/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "potmap/errors.hpp"
#include "potmap/potential.hpp"

namespace potmap {

StepMethod parse_step_method(std::string_view name) {
  if (name == "rk4") return StepMethod::Rk4;
  if (name == "euler") return StepMethod::Euler;
  throw Error(ErrorCode::BadMode, "unknown step method '" + std::string(name) + "'");
}

std::string_view to_string(StepMethod m) noexcept { return m == StepMethod::Rk4 ? "rk4" : "euler"; }

void SolveConfig::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw Error(ErrorCode::InvalidArgument, "step must be positive");
  if (!(relax_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "relax_tol must be positive");
  if (!(relax_rate > 0.0)) throw Error(ErrorCode::InvalidArgument, "relax_rate must be positive");
  if (max_steps <= 0 || max_iters <= 0) throw Error(ErrorCode::InvalidArgument, "iteration limits must be positive");
}

namespace {

double axis_coord(const GridSpec& grid, int axis, int k) {
  return k == grid.nodes[axis] - 1 ? grid.hi[axis] : grid.lo[axis] + k * grid.spacing(axis);
}

void check_state(const Vector& x) {
  if (!x.allFinite() || x.norm() > kBlowupNorm)
    throw Error(ErrorCode::StepUnstable, "integrated state left the finite range");
}

// Sheet values along axis `axis` at every node coordinate of that axis,
// starting from (t, x); t(axis) need not be a node.
std::vector<Vector> sweep_axis(const DistTensorField& X, const Vector& t, const Vector& x, int axis,
                               const GridSpec& grid, const SolveConfig& cfg) {
  const int count = grid.nodes[axis];
  std::vector<Vector> out(count);
  const double s0 = t(axis);
  int first_up = 0;
  while (first_up < count && axis_coord(grid, axis, first_up) < s0) ++first_up;
  Vector tc = t;
  Vector xc = x;
  for (int k = first_up; k < count; ++k) {
    const double target = axis_coord(grid, axis, k);
    xc = integrate_along_axis(X, tc, xc, axis, target, cfg);
    tc(axis) = target;
    out[k] = xc;
  }
  tc = t;
  xc = x;
  for (int k = first_up - 1; k >= 0; --k) {
    const double target = axis_coord(grid, axis, k);
    xc = integrate_along_axis(X, tc, xc, axis, target, cfg);
    tc(axis) = target;
    out[k] = xc;
  }
  return out;
}

std::vector<std::size_t> spread_indices(std::size_t count, std::size_t samples) {
  std::vector<std::size_t> out;
  if (count == 0) return out;
  if (count <= samples) {
    for (std::size_t k = 0; k < count; ++k) out.push_back(k);
    return out;
  }
  for (std::size_t k = 0; k < samples; ++k) out.push_back(k * (count - 1) / (samples - 1));
  return out;
}

}  // namespace

Vector integrate_along_axis(const DistTensorField& X, Vector t, Vector x, int axis, double target,
                            const SolveConfig& cfg) {
  const double d = target - t(axis);
  if (d == 0.0) return x;
  const double steps_real = std::ceil(std::abs(d) / cfg.step - 1e-9);
  if (steps_real > static_cast<double>(cfg.max_steps))
    throw Error(ErrorCode::StepUnstable, "step budget exhausted");
  const long m = std::max(1L, static_cast<long>(steps_real));
  const double hs = d / static_cast<double>(m);
  const double s0 = t(axis);
  auto f = [&](const Vector& tt, const Vector& xx) -> Vector { return X(tt, xx).row(axis).transpose(); };
  for (long k = 0; k < m; ++k) {
    t(axis) = s0 + static_cast<double>(k) * hs;
    if (cfg.method == StepMethod::Euler) {
      x += hs * f(t, x);
    } else {
      Vector tm = t;
      tm(axis) += 0.5 * hs;
      Vector te = t;
      te(axis) = k + 1 == m ? target : s0 + static_cast<double>(k + 1) * hs;
      const Vector k1 = f(t, x);
      const Vector k2 = f(tm, x + 0.5 * hs * k1);
      const Vector k3 = f(tm, x + 0.5 * hs * k2);
      const Vector k4 = f(te, x + hs * k3);
      x += (hs / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    check_state(x);
  }
  return x;
}

SheetSample integrate_first_order(const DistTensorField& X, const Vector& t0, const Vector& x0, const GridSpec& grid,
                                  const SolveConfig& cfg) {
  cfg.validate();
  validate_grid(grid);
  const int p = grid.dim();
  const int n = X.n;
  if (X.p != p || t0.size() != p || x0.size() != n)
    throw Error(ErrorCode::InvalidArgument, "initial point does not match the field dimensions");
  if (!grid.contains(t0)) throw Error(ErrorCode::OutOfDomain, "initial parameter point lies outside the grid box");

  if (p >= 2) {
    for (std::size_t k : spread_indices(grid.node_count(), 200)) {
      const double r = integrability_residual(X, grid.node_point(k), x0).max_abs();
      if (!(r <= kIntegrabilityTol))
        throw Error(ErrorCode::NotIntegrable, "integrability residual " + std::to_string(r) + " over the grid box");
    }
  }

  // Stage a holds the sheet on nodes of axes < a with the other coordinates at t0.
  std::vector<std::pair<Vector, Vector>> stage{{t0, x0}};
  for (int a = 0; a < p; ++a) {
    std::vector<std::pair<Vector, Vector>> next;
    next.reserve(stage.size() * grid.nodes[a]);
    for (const auto& [t, x] : stage) {
      const std::vector<Vector> line = sweep_axis(X, t, x, a, grid, cfg);
      for (int k = 0; k < grid.nodes[a]; ++k) {
        Vector tk = t;
        tk(a) = axis_coord(grid, a, k);
        next.emplace_back(tk, line[k]);
      }
    }
    stage.swap(next);
  }

  Matrix values(static_cast<Eigen::Index>(grid.node_count()), n);
  for (std::size_t k = 0; k < stage.size(); ++k) values.row(static_cast<Eigen::Index>(k)) = stage[k].second.transpose();

  if (p >= 2) {
    for (std::size_t k : spread_indices(grid.node_count(), 200)) {
      const double r = integrability_residual(X, stage[k].first, stage[k].second).max_abs();
      if (!(r <= kIntegrabilityTol))
        throw Error(ErrorCode::NotIntegrable, "integrability residual " + std::to_string(r) + " along the sheet");
    }
    for (std::size_t k : spread_indices(grid.node_count(), 5)) {
      const Vector target = stage[k].first;
      Vector t = t0;
      Vector x = x0;
      for (int a = p - 1; a >= 0; --a) {
        x = integrate_along_axis(X, t, x, a, target(a), cfg);
        t(a) = target(a);
      }
      const double diff = (x - stage[k].second).cwiseAbs().maxCoeff();
      if (!(diff <= kPathIndependenceTol))
        throw Error(ErrorCode::NotIntegrable, "sheet depends on the sweep order");
    }
  }
  return SheetSample::sampled(grid, values);
}

namespace {

struct CellGeometry {
  Vector center;
  Vector widths;
  double volume = 1.0;
};

// Iterates over cells, handing each one its corner node indices (bit a of the
// corner number selects the upper node on axis a).
template <class Fn>
void for_each_cell(const GridSpec& grid, Fn&& fn) {
  const int p = grid.dim();
  std::vector<int> cell(p, 0);
  const int corners = 1 << p;
  std::vector<std::size_t> corner_nodes(corners);
  while (true) {
    CellGeometry geo{Vector(p), Vector(p), 1.0};
    for (int a = 0; a < p; ++a) {
      const double lo = axis_coord(grid, a, cell[a]);
      const double hi = axis_coord(grid, a, cell[a] + 1);
      geo.center(a) = 0.5 * (lo + hi);
      geo.widths(a) = hi - lo;
      geo.volume *= hi - lo;
    }
    for (int c = 0; c < corners; ++c) {
      std::vector<int> idx = cell;
      for (int a = 0; a < p; ++a)
        if (c & (1 << a)) ++idx[a];
      corner_nodes[c] = grid.flatten(idx);
    }
    fn(geo, corner_nodes);
    int a = p - 1;
    while (a >= 0 && ++cell[a] == grid.nodes[a] - 1) {
      cell[a] = 0;
      --a;
    }
    if (a < 0) break;
  }
}

JetPoint cell_jet(const CellGeometry& geo, const std::vector<std::size_t>& corners, const Matrix& values) {
  const int p = static_cast<int>(geo.center.size());
  const int n = static_cast<int>(values.cols());
  const int count = static_cast<int>(corners.size());
  JetPoint jp{geo.center, Vector::Zero(n), Matrix::Zero(p, n)};
  for (int c = 0; c < count; ++c) jp.x += values.row(static_cast<Eigen::Index>(corners[c])).transpose();
  jp.x /= count;
  const double edge_weight = 2.0 / count;
  for (int a = 0; a < p; ++a)
    for (int c = 0; c < count; ++c) {
      if (!(c & (1 << a))) continue;
      const auto up = static_cast<Eigen::Index>(corners[c]);
      const auto dn = static_cast<Eigen::Index>(corners[c & ~(1 << a)]);
      jp.x1.row(a) += edge_weight * (values.row(up) - values.row(dn)) / geo.widths(a);
    }
  return jp;
}

double uniform_cell_volume(const GridSpec& grid) {
  double v = 1.0;
  for (int a = 0; a < grid.dim(); ++a) v *= grid.spacing(a);
  return v;
}

}  // namespace

double discrete_action(const LagrangianSpec& spec, const GridSpec& grid, const Matrix& node_values) {
  std::vector<double> terms;
  for_each_cell(grid, [&](const CellGeometry& geo, const std::vector<std::size_t>& corners) {
    const JetPoint jp = cell_jet(geo, corners, node_values);
    terms.push_back(geo.volume * lagrangian_density(spec, jp));
  });
  return pairwise_sum(terms);
}

Matrix discrete_action_gradient(const LagrangianSpec& spec, const GridSpec& grid, const Matrix& node_values) {
  const int p = grid.dim();
  Matrix grad = Matrix::Zero(node_values.rows(), node_values.cols());
  for_each_cell(grid, [&](const CellGeometry& geo, const std::vector<std::size_t>& corners) {
    const JetPoint jp = cell_jet(geo, corners, node_values);
    const double w = geo.volume * volume_density(spec.h, jp.t);
    const Vector dx = energy_position_gradient(spec, jp);
    const Matrix dx1 = energy_velocity_gradient(spec, jp);
    const int count = static_cast<int>(corners.size());
    const double edge_weight = 2.0 / count;
    for (int c = 0; c < count; ++c) {
      Vector contrib = dx / count;
      for (int a = 0; a < p; ++a) {
        const double sign = (c & (1 << a)) ? 1.0 : -1.0;
        contrib += sign * edge_weight / geo.widths(a) * dx1.row(a).transpose();
      }
      grad.row(static_cast<Eigen::Index>(corners[c])) += w * contrib.transpose();
    }
  });
  return grad;
}

Matrix discrete_euler_lagrange_residual(const LagrangianSpec& spec, const SheetSample& sheet) {
  if (sheet.mode != SheetMode::Grid) throw Error(ErrorCode::InvalidArgument, "discrete residual needs a grid sheet");
  Matrix r = discrete_action_gradient(spec, sheet.grid, sheet.node_values) / uniform_cell_volume(sheet.grid);
  for (std::size_t k = 0; k < sheet.grid.node_count(); ++k)
    if (!sheet.grid.is_interior(sheet.grid.unflatten(k))) r.row(static_cast<Eigen::Index>(k)).setZero();
  return r;
}

RelaxResult relax_to_extremal(const LagrangianSpec& spec, const Matrix& boundary, const SheetSample& init,
                              const SolveConfig& cfg) {
  cfg.validate();
  if (init.mode != SheetMode::Grid) throw Error(ErrorCode::InvalidArgument, "relaxation needs a grid sheet");
  const GridSpec& grid = init.grid;
  validate_grid(grid);
  if (boundary.rows() != init.node_values.rows() || boundary.cols() != init.node_values.cols())
    throw Error(ErrorCode::InvalidArgument, "boundary table does not match the sheet");
  if (!is_positive_definite(spec.h) ||
      negative_eigenvalue_count(metric_components(spec.h, grid.node_point(std::size_t{0}))) != 0)
    throw Error(ErrorCode::IndefiniteParameterMetric, "descent needs a positive definite parameter metric");

  RelaxResult out;
  out.sheet = init;
  Matrix& x = out.sheet.node_values;
  for (std::size_t k = 0; k < grid.node_count(); ++k)
    if (!grid.is_interior(grid.unflatten(k))) x.row(static_cast<Eigen::Index>(k)) = boundary.row(static_cast<Eigen::Index>(k));

  double min_spacing = grid.spacing(0);
  for (int a = 1; a < grid.dim(); ++a) min_spacing = std::min(min_spacing, grid.spacing(a));
  double rate = cfg.relax_rate;
  double action = discrete_action(spec, grid, x);
  if (!std::isfinite(action)) throw Error(ErrorCode::Diverged, "initial action is not finite");
  out.action_history.push_back(action);

  int flat_steps = 0;
  for (out.iterations = 0; out.iterations < cfg.max_iters; ++out.iterations) {
    if (flat_steps >= 100) break;
    const Matrix r = discrete_euler_lagrange_residual(spec, out.sheet);
    if (!r.allFinite()) throw Error(ErrorCode::Diverged, "residual is not finite");
    out.residual = r.cwiseAbs().maxCoeff();
    if (out.residual <= cfg.relax_tol) {
      out.converged = true;
      return out;
    }
    while (true) {
      const Matrix candidate = x - rate * min_spacing * min_spacing * r;
      if (!candidate.allFinite()) throw Error(ErrorCode::Diverged, "iterate is not finite");
      const double next = discrete_action(spec, grid, candidate);
      if (!std::isfinite(next)) throw Error(ErrorCode::Diverged, "action is not finite");
      if (next <= action) {
        // Decreases below the rounding of the action carry no information.
        flat_steps = action - next <= 8.0 * std::numeric_limits<double>::epsilon() * std::abs(action) ? flat_steps + 1 : 0;
        x = candidate;
        action = next;
        out.action_history.push_back(action);
        break;
      }
      rate *= 0.5;
      if (rate < 1e-12 * cfg.relax_rate) return out;  // no descent left at this precision
    }
  }
  out.residual = discrete_euler_lagrange_residual(spec, out.sheet).cwiseAbs().maxCoeff();
  out.converged = out.residual <= cfg.relax_tol;
  return out;
}

DistTensorField lie_field(const LieGroupData& data) {
  if (static_cast<int>(data.xi.size()) != data.p)
    throw Error(ErrorCode::InvalidArgument, "one generator per parameter direction is required");
  DistTensorField X;
  X.p = data.p;
  X.n = data.n;
  X.components = [data](const Vector& t, const Vector& x) {
    const Matrix A = data.A(t);
    Matrix out = Matrix::Zero(data.p, data.n);
    for (int b = 0; b < data.p; ++b) {
      const Vector v = data.xi[b](x);
      for (int a = 0; a < data.p; ++a) out.row(a) += A(b, a) * v.transpose();
    }
    return out;
  };
  return X;
}

namespace {

Tensor3 one_form_partials(const LieGroupData& data, const Vector& t) {
  if (data.dA) return data.dA(t);
  const int p = data.p;
  const double step = 1e-5;
  Tensor3 out(p, p, p);
  Vector q = t;
  for (int c = 0; c < p; ++c) {
    q(c) = t(c) + step;
    const Matrix up = data.A(q);
    q(c) = t(c) - step;
    const Matrix dn = data.A(q);
    q(c) = t(c);
    for (int b = 0; b < p; ++b)
      for (int a = 0; a < p; ++a) out(c, b, a) = (up(b, a) - dn(b, a)) / (2.0 * step);
  }
  return out;
}

}  // namespace

LieReport lie_group_check(const LieGroupData& data, const MetricSpec& h, const MetricSpec& g, const Vector& t0,
                          const Vector& y0, const GridSpec& grid, const SolveConfig& cfg) {
  const int p = data.p;
  const DistTensorField X = lie_field(data);
  LieReport rep;
  rep.sheet = integrate_first_order(X, t0, y0, grid, cfg);

  std::vector<Vector> xs{y0};
  std::vector<Vector> ts{t0};
  for (std::size_t k : spread_indices(grid.node_count(), 50)) {
    xs.push_back(rep.sheet.node_values.row(static_cast<Eigen::Index>(k)).transpose());
    ts.push_back(grid.node_point(k));
  }

  for (const Vector& x : xs) {
    std::vector<Matrix> J;
    std::vector<Vector> v;
    for (int b = 0; b < p; ++b) {
      v.push_back(data.xi[b](x));
      J.push_back(fd_jacobian(data.xi[b], x, 1e-5));  // (j, i) = d xi^i / d x^j
    }
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b) {
        Vector r = (v[a].transpose() * J[b] - v[b].transpose() * J[a]).transpose();
        for (int c = 0; c < p; ++c) r -= data.C(c, a, b) * v[c];
        rep.bracket_residual = std::max(rep.bracket_residual, max_abs(r));
      }
  }

  double time_variation = 0.0;
  for (const Vector& t : ts) {
    const Matrix A = data.A(t);
    const Tensor3 dA = one_form_partials(data, t);
    time_variation = std::max(time_variation, dA.max_abs());
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b)
        for (int c = 0; c < p; ++c) {
          double r = dA(c, a, b) - dA(b, a, c);
          for (int l = 0; l < p; ++l)
            for (int d = 0; d < p; ++d) r -= data.C(a, l, d) * A(l, b) * A(d, c);
          rep.maurer_cartan_residual = std::max(rep.maurer_cartan_residual, std::abs(r));
        }
  }
  rep.det_A = data.A(t0).determinant();

  for (std::size_t k = 1; k < xs.size(); ++k)
    rep.integrability_residual = std::max(rep.integrability_residual, integrability_residual(X, ts[k], xs[k]).max_abs());

  LagrangianSpec spec{h, g, X, {}, true, true};
  for (std::size_t k = 0; k < grid.node_count(); ++k) {
    const std::vector<int> idx = grid.unflatten(k);
    if (!grid.is_interior(idx)) continue;
    rep.extremal_residual =
        std::max(rep.extremal_residual, max_abs(euler_lagrange_residual(spec, rep.sheet, grid.node_point(idx))));
  }

  if (p == 1 && time_variation <= 1e-12) {
    const double length = grid.hi[0] - grid.lo[0];
    const double pairs[][2] = {{0.2, 0.3}, {0.5, 0.25}, {0.1, 0.6}};
    double worst = 0.0;
    for (const auto& pr : pairs) {
      const double s = pr[0] * length;
      const double u = pr[1] * length;
      const Vector first = integrate_along_axis(X, t0, y0, 0, t0(0) + s, cfg);
      const Vector composed = integrate_along_axis(X, t0, first, 0, t0(0) + u, cfg);
      const Vector direct = integrate_along_axis(X, t0, y0, 0, t0(0) + s + u, cfg);
      worst = std::max(worst, max_abs(Vector(composed - direct)));
    }
    rep.group_law_residual = worst;
  }
  return rep;
}

}  // namespace potmap
