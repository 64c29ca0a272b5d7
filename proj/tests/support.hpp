#pragma once

// Shared fixtures for the unit and acceptance tests. Every closed form here is
// written out by hand so that it can serve as an oracle for the library.

#include <cmath>
#include <numbers>
#include <random>

#include "potmap/field.hpp"
#include "potmap/geometry.hpp"
#include "potmap/jets.hpp"

namespace testkit {

using potmap::Matrix;
using potmap::Tensor3;
using potmap::Vector;

inline constexpr double kPi = std::numbers::pi;

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out(k++) = x;
  return out;
}

inline Matrix mat(int rows, int cols, std::initializer_list<double> v) {
  Matrix out(rows, cols);
  auto it = v.begin();
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out(r, c) = *it++;
  return out;
}

struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed = 7) : engine(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine); }
  Vector vector(int n, double lo, double hi) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = uniform(lo, hi);
    return v;
  }
  Matrix matrix(int r, int c) {
    Matrix m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = normal();
    return m;
  }
  Tensor3 symmetric_second(int p, int n) {
    Tensor3 xx(p, p, n);
    for (int a = 0; a < p; ++a)
      for (int b = a; b < p; ++b)
        for (int i = 0; i < n; ++i) xx(a, b, i) = xx(b, a, i) = normal();
    return xx;
  }
  /// Random symmetric matrix with `negatives` negative eigenvalues.
  Matrix signed_metric(int dim, int negatives) {
    Eigen::HouseholderQR<Matrix> qr(matrix(dim, dim));
    const Matrix q = qr.householderQ();
    Vector d(dim);
    for (int i = 0; i < dim; ++i) d(i) = (i < negatives ? -1.0 : 1.0) * uniform(0.5, 2.0);
    return q * d.asDiagonal() * q.transpose();
  }
};

/// X = (-x2, x1), p = 1, n = 2, with exact partials.
inline potmap::DistTensorField rotation_field() {
  potmap::DistTensorField X;
  X.p = 1;
  X.n = 2;
  X.components = [](const Vector&, const Vector& x) { return mat(1, 2, {-x(1), x(0)}); };
  X.dt_partial = [](const Vector&, const Vector&) { return Tensor3(1, 1, 2); };
  X.dx_partial = [](const Vector&, const Vector&) {
    Tensor3 d(2, 1, 2);
    d(1, 0, 0) = -1.0;  // dX^1/dx^2
    d(0, 0, 1) = 1.0;   // dX^2/dx^1
    return d;
  };
  return X;
}

/// X = x on the line.
inline potmap::DistTensorField scaling_field() {
  potmap::DistTensorField X;
  X.p = 1;
  X.n = 1;
  X.components = [](const Vector&, const Vector& x) { return mat(1, 1, {x(0)}); };
  X.dt_partial = [](const Vector&, const Vector&) { return Tensor3(1, 1, 1); };
  X.dx_partial = [](const Vector&, const Vector&) { return Tensor3(1, 1, 1, 1.0); };
  return X;
}

/// (cos t, sin t) with exact first and second derivatives.
inline potmap::SheetSample circle_sheet(double radius = 1.0) {
  return potmap::SheetSample::analytic(
      1, 2, [radius](const Vector& t) { return vec({radius * std::cos(t(0)), radius * std::sin(t(0))}); },
      [radius](const Vector& t) { return mat(1, 2, {-radius * std::sin(t(0)), radius * std::cos(t(0))}); },
      [radius](const Vector& t) {
        Tensor3 d(1, 1, 2);
        d(0, 0, 0) = -radius * std::cos(t(0));
        d(0, 0, 1) = -radius * std::sin(t(0));
        return d;
      });
}

inline potmap::SheetSample exponential_sheet() {
  return potmap::SheetSample::analytic(
      1, 1, [](const Vector& t) { return vec({std::exp(t(0))}); },
      [](const Vector& t) { return mat(1, 1, {std::exp(t(0))}); },
      [](const Vector& t) { return Tensor3(1, 1, 1, std::exp(t(0))); });
}

/// Plain polynomial x(t) = t^2 on the line.
inline potmap::SheetSample square_sheet() {
  return potmap::SheetSample::analytic(
      1, 1, [](const Vector& t) { return vec({t(0) * t(0)}); },
      [](const Vector& t) { return mat(1, 1, {2.0 * t(0)}); }, [](const Vector&) { return Tensor3(1, 1, 1, 2.0); });
}

/// A field on the sphere target (theta, phi): X = (sin phi, cos theta), p = 1.
/// Partials left to central differences.
inline potmap::DistTensorField sphere_field() {
  potmap::DistTensorField X;
  X.p = 1;
  X.n = 2;
  X.components = [](const Vector&, const Vector& x) { return mat(1, 2, {std::sin(x(1)), std::cos(x(0))}); };
  return X;
}

/// t-dependent field with p = n = 2 and exact partials:
/// X_1 = (t1 x2 + 0.3, x1 - t2), X_2 = (x1 x2, t1/2 + x2).
inline potmap::DistTensorField mixed_field() {
  potmap::DistTensorField X;
  X.p = 2;
  X.n = 2;
  X.components = [](const Vector& t, const Vector& x) {
    return mat(2, 2, {t(0) * x(1) + 0.3, x(0) - t(1), x(0) * x(1), 0.5 * t(0) + x(1)});
  };
  X.dt_partial = [](const Vector& t, const Vector& x) {
    (void)t;
    Tensor3 d(2, 2, 2);  // [beta][alpha][i]
    d(0, 0, 0) = x(1);
    d(1, 0, 1) = -1.0;
    d(0, 1, 1) = 0.5;
    return d;
  };
  X.dx_partial = [](const Vector& t, const Vector& x) {
    Tensor3 d(2, 2, 2);  // [j][alpha][i]
    d(1, 0, 0) = t(0);
    d(0, 0, 1) = 1.0;
    d(0, 1, 0) = x(1);
    d(1, 1, 0) = x(0);
    d(1, 1, 1) = 1.0;
    return d;
  };
  return X;
}

}  // namespace testkit
