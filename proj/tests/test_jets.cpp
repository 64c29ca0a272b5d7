#include "doctest.h"
#include "support.hpp"

#include "potmap/errors.hpp"
#include "potmap/jets.hpp"

using namespace potmap;
using testkit::kPi;
using testkit::mat;
using testkit::vec;

namespace {

SheetSample sampled_from(const std::function<Vector(const Vector&)>& f, const GridSpec& grid, int n) {
  Matrix values(static_cast<Eigen::Index>(grid.node_count()), n);
  for (std::size_t k = 0; k < grid.node_count(); ++k) values.row(static_cast<Eigen::Index>(k)) = f(grid.node_point(k));
  return SheetSample::sampled(grid, values);
}

SheetSample equator() {
  return SheetSample::analytic(1, 2, [](const Vector& t) { return vec({kPi / 2, t(0)}); });
}

}  // namespace

TEST_CASE("first jet") {
  const SheetSample affine =
      SheetSample::analytic(2, 1, [](const Vector& t) { return vec({t(0) + 2.0 * t(1)}); });
  const Matrix j = first_jet(affine, vec({0.4, -3.0}));
  CHECK(j(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(j(1, 0) == doctest::Approx(2.0).epsilon(1e-9));

  const SheetSample constant = SheetSample::analytic(1, 2, [](const Vector&) { return vec({1.0, -2.0}); });
  CHECK(max_abs(first_jet(constant, vec({0.7}))) == 0.0);

  const GridSpec grid = uniform_grid({-1.0}, {1.0}, {2001});
  const SheetSample sine = sampled_from([](const Vector& t) { return vec({std::sin(t(0))}); }, grid, 1);
  CHECK(first_jet(sine, vec({0.0}))(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("grid sheets only answer at nodes") {
  const GridSpec grid = uniform_grid({0.0}, {1.0}, {11});
  const SheetSample s = sampled_from([](const Vector& t) { return t; }, grid, 1);
  CHECK(s.at(vec({0.3}))(0) == doctest::Approx(0.3));
  try {
    s.at(vec({0.35}));
    FAIL("expected OutOfDomain");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutOfDomain);
  }
  CHECK_THROWS_AS(s.at(vec({1.5})), Error);
  CHECK_THROWS_AS(validate_grid(uniform_grid({0.0}, {1.0}, {2})), Error);
  CHECK_THROWS_AS(validate_grid(uniform_grid({1.0}, {0.0}, {5})), Error);
}

TEST_CASE("grid numbering") {
  const GridSpec grid = uniform_grid({0.0, 10.0}, {1.0, 12.0}, {3, 5});
  CHECK(grid.node_count() == 15);
  CHECK(grid.unflatten(7) == std::vector<int>{1, 2});
  CHECK(grid.flatten({2, 4}) == 14);
  CHECK(grid.node_point(7)(1) == doctest::Approx(11.0));
  CHECK(grid.is_interior({1, 2}));
  CHECK_FALSE(grid.is_interior({0, 2}));
}

TEST_CASE("second covariant jet and tension") {
  const MetricSpec flat1 = euclidean_metric(1);
  const MetricSpec flat2 = euclidean_metric(2);

  const SheetSample line =
      SheetSample::analytic(1, 2, [](const Vector& t) { return vec({1.0 + 2.0 * t(0), -t(0)}); });
  CHECK(second_covariant_jet(line, flat1, flat2, vec({0.3})).max_abs() < 1e-6);
  CHECK(max_abs(tension(line, flat1, flat2, vec({0.3}))) < 1e-6);

  const SheetSample sq = testkit::square_sheet();
  CHECK(second_covariant_jet(sq, flat1, flat1, vec({0.8}))(0, 0, 0) == doctest::Approx(2.0));
  CHECK(tension(sq, flat1, flat1, vec({0.8}))(0) == doctest::Approx(2.0));

  // Fd second derivatives of a t-linear sheet are exact up to rounding.
  const MetricSpec sphere = sphere_metric();
  CHECK(second_covariant_jet(equator(), flat1, sphere, vec({0.4})).max_abs() < 1e-8);
  CHECK(max_abs(tension(equator(), flat1, sphere, vec({0.4}))) < 1e-8);
}

TEST_CASE("second covariant jet is symmetric and reduces to the Hessian on flat factors") {
  const SheetSample s = SheetSample::analytic(2, 2, [](const Vector& t) {
    return vec({std::sin(t(0)) * t(1) + 1.3, std::cos(t(0) + 2.0 * t(1))});
  });
  const MetricSpec h = minkowski_metric(2);
  const MetricSpec g = sphere_metric();
  const Tensor3 xx = second_covariant_jet(s, h, g, vec({0.3, 0.2}));
  for (int i = 0; i < 2; ++i) CHECK(std::abs(xx(0, 1, i) - xx(1, 0, i)) < 1e-8);

  const Vector t = vec({0.3, 0.2});
  const Tensor3 flat = second_covariant_jet(s, euclidean_metric(2), euclidean_metric(2), t);
  const double hess00 = -std::sin(0.3) * 0.2;
  const double hess01 = std::cos(0.3);
  const double hess11_2 = -4.0 * std::cos(0.3 + 0.4);
  CHECK(flat(0, 0, 0) == doctest::Approx(hess00).epsilon(1e-6));
  CHECK(flat(0, 1, 0) == doctest::Approx(hess01).epsilon(1e-6));
  CHECK(flat(1, 1, 1) == doctest::Approx(hess11_2).epsilon(1e-6));
}

TEST_CASE("grid tension converges at second order") {
  // phi(t) = (pi/4 + 0.3 sin t, t^2) into the sphere.
  auto phi = [](const Vector& t) { return vec({kPi / 4 + 0.3 * std::sin(t(0)), t(0) * t(0)}); };
  const SheetSample exact = SheetSample::analytic(
      1, 2, phi, [](const Vector& t) { return mat(1, 2, {0.3 * std::cos(t(0)), 2.0 * t(0)}); },
      [](const Vector& t) {
        Tensor3 d(1, 1, 2);
        d(0, 0, 0) = -0.3 * std::sin(t(0));
        d(0, 0, 1) = 2.0;
        return d;
      });
  const MetricSpec h = euclidean_metric(1);
  const MetricSpec g = sphere_metric();
  std::vector<double> errors;
  for (int nodes : {65, 129, 257}) {
    const GridSpec grid = uniform_grid({0.0}, {1.0}, {nodes});
    const SheetSample s = sampled_from(phi, grid, 2);
    double err = 0.0;
    for (int k = 1; k < 16; ++k) {
      const Vector t = vec({k / 16.0});
      err = std::max(err, max_abs(tension(s, h, g, t) - tension(exact, h, g, t)));
    }
    errors.push_back(err);
  }
  const double order1 = std::log2(errors[0] / errors[1]);
  const double order2 = std::log2(errors[1] / errors[2]);
  CAPTURE(errors[0]);
  CAPTURE(errors[2]);
  CHECK(order1 >= 1.9);
  CHECK(order2 >= 1.9);
}

TEST_CASE("one-sided stencils are second order at both ends") {
  const GridSpec grid = uniform_grid({0.0}, {1.0}, {201});
  const SheetSample s = sampled_from([](const Vector& t) { return vec({std::exp(t(0))}); }, grid, 1);
  CHECK(first_jet(s, vec({0.0}))(0, 0) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(first_jet(s, vec({1.0}))(0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-4));
  const SheetJet end = sample_jet(s, vec({1.0}));
  CHECK(end.xx(0, 0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-3));

  double weight_sum = 0.0;
  for (const StencilTap& tap : first_derivative_taps(0, 10, 0.1)) weight_sum += tap.weight;
  CHECK(std::abs(weight_sum) < 1e-12);
}

TEST_CASE("analytic first jet agrees with differences") {
  testkit::Rng rng(5);
  std::vector<Vector> points;
  for (int k = 0; k < 10; ++k) points.push_back(rng.vector(1, 0.0, 6.0));
  CHECK(first_jet_consistency(testkit::circle_sheet(), points) <= 1e-4);

  const SheetSample wrong = SheetSample::analytic(
      1, 1, [](const Vector& t) { return t; }, [](const Vector&) { return mat(1, 1, {3.0}); });
  CHECK(first_jet_consistency(wrong, points) == doctest::Approx(2.0).epsilon(1e-6));
}
