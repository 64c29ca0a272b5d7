#include "doctest.h"
#include "support.hpp"

#include "potmap/errors.hpp"
#include "potmap/hamilton.hpp"
#include "potmap/potential.hpp"

using namespace potmap;
using testkit::kPi;
using testkit::mat;
using testkit::vec;

namespace {

JetPoint random_point(testkit::Rng& rng, int p, int n) {
  return {rng.vector(p, -1, 1), rng.vector(n, -1, 1), rng.matrix(p, n)};
}

JetPoint random_sphere_point(testkit::Rng& rng, int p) {
  return {rng.vector(p, -1, 1), vec({rng.uniform(0.4, 2.7), rng.uniform(0, 6)}), rng.matrix(p, 2)};
}

SheetSample equator() {
  return SheetSample::analytic(
      1, 2, [](const Vector& t) { return vec({kPi / 2, t(0)}); }, [](const Vector&) { return mat(1, 2, {0.0, 1.0}); },
      [](const Vector&) { return Tensor3(1, 1, 2); });
}

}  // namespace

TEST_CASE("adapted frames") {
  const JetPoint flat_pt{vec({0.1}), vec({0.2, 0.3}), mat(1, 2, {0.5, -0.4})};
  const AdaptedFrames flat = adapted_frames(euclidean_metric(1), euclidean_metric(2), flat_pt);
  CHECK(max_abs(flat.frame - Matrix::Identity(5, 5)) == 0.0);
  CHECK(max_abs(flat.coframe - Matrix::Identity(5, 5)) == 0.0);

  testkit::Rng rng(2);
  JetPoint sp = random_point(rng, 1, 2);
  sp.x = vec({kPi / 4, 0.3});
  const AdaptedFrames f = adapted_frames(euclidean_metric(1), sphere_metric(), sp);
  CHECK(max_abs(f.frame * f.coframe.transpose() - Matrix::Identity(5, 5)) <= 1e-12);
}

TEST_CASE("pairings of the adapted frames follow the Kronecker pattern") {
  testkit::Rng rng(6);
  const MetricSpec h = hyperbolic_metric(2);
  const MetricSpec g = sphere_metric();
  const JetChart chart{2, 2};
  for (int k = 0; k < 20; ++k) {
    JetPoint jp = random_sphere_point(rng, 2);
    jp.t(1) = rng.uniform(0.5, 2.0);
    const AdaptedFrames f = adapted_frames(h, g, jp);
    const Matrix pair = f.coframe * f.frame.transpose();  // covector row against vector row
    // Blocks: (dt, dx, delta x) against (delta/delta t, delta/delta x, d/dx1).
    const int blocks[4] = {0, chart.p, chart.p + chart.n, chart.dim()};
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) {
        const Matrix b = pair.block(blocks[r], blocks[c], blocks[r + 1] - blocks[r], blocks[c + 1] - blocks[c]);
        CAPTURE(r);
        CAPTURE(c);
        if (r == c)
          CHECK(max_abs(b - Matrix::Identity(b.rows(), b.cols())) <= 1e-12);
        else
          CHECK(max_abs(b) <= 1e-12);
      }
  }
}

TEST_CASE("Sasaki-like metric") {
  const JetPoint one{vec({0.0}), vec({0.0}), mat(1, 1, {0.7})};
  CHECK(max_abs(sasaki_metric(euclidean_metric(1), euclidean_metric(1), one) - Matrix::Identity(3, 3)) == 0.0);

  const MetricSpec neg = constant_metric(mat(1, 1, {-1.0}), {-1});
  const Matrix s = sasaki_metric(neg, euclidean_metric(1), one);
  CHECK(max_abs(s - Vector(vec({-1.0, 1.0, -1.0})).asDiagonal().toDenseMatrix()) <= 1e-15);
}

TEST_CASE("Sasaki metric is block diagonal in the adapted cobasis and has the product signature") {
  testkit::Rng rng(12);
  struct Case {
    MetricSpec h, g;
  };
  const std::vector<Case> cases = {
      {minkowski_metric(2), sphere_metric()},
      {minkowski_metric(2), constant_metric(rng.signed_metric(2, 1), {-1, 1})},
      {euclidean_metric(1), minkowski_metric(2)},
      {constant_metric(rng.signed_metric(2, 2), {-1, -1}), constant_metric(rng.signed_metric(2, 1), {-1, 1})},
  };
  for (const Case& c : cases) {
    const int p = c.h.dim, n = c.g.dim;
    for (int k = 0; k < 10; ++k) {
      JetPoint jp = random_point(rng, p, n);
      if (c.g.name == "sphere") jp.x = vec({rng.uniform(0.4, 2.7), rng.uniform(0, 6)});
      const AdaptedFrames f = adapted_frames(c.h, c.g, jp);
      const Matrix S = sasaki_metric(c.h, c.g, jp);
      CHECK(max_abs(S - S.transpose()) <= 1e-12);
      CHECK(max_abs(f.frame * S * f.frame.transpose() - sasaki_adapted_blocks(c.h, c.g, jp)) <= 1e-10);
      const int nh = negative_eigenvalue_count(metric_components(c.h, jp.t));
      const int ng = negative_eigenvalue_count(metric_components(c.g, jp.x));
      const int expected = nh + ng + nh * (n - ng) + (p - nh) * ng;
      CHECK(negative_eigenvalue_count(S) == expected);
    }
  }
}

TEST_CASE("variant names") {
  CHECK(parse_hamilton_variant("theorem2") == HamiltonVariant::Theorem2);
  CHECK(to_string(HamiltonVariant::Theorem1) == "theorem1");
  CHECK_THROWS_AS(parse_hamilton_variant("theorem3"), Error);
  try {
    make_hamilton_setup(std::nullopt, euclidean_metric(1), euclidean_metric(1), HamiltonVariant::Theorem2);
    FAIL("expected MissingField");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingField);
  }
}

TEST_CASE("Liouville and polysymplectic forms, hand-expanded cases") {
  const LiouvilleForms t1 =
      liouville_and_omega(std::nullopt, euclidean_metric(1), euclidean_metric(1), HamiltonVariant::Theorem1);
  const Vector z = vec({0.3, 1.1, -0.6});
  // Omega = dx ^ dx1 ^ dt, theta = x1 dx ^ dt.
  CHECK((t1.omega[0](z) - FormValue::monomial(3, {1, 2, 0})).max_abs() == 0.0);
  CHECK((t1.theta[0](z) - FormValue::monomial(3, {1, 0}, -0.6)).max_abs() == 0.0);

  const LiouvilleForms zero = liouville_and_omega(zero_field(1, 2), euclidean_metric(1), euclidean_metric(2),
                                                  HamiltonVariant::Theorem2);
  const LiouvilleForms plain = liouville_and_omega(std::nullopt, euclidean_metric(1), euclidean_metric(2),
                                                   HamiltonVariant::Theorem1);
  const Vector z5 = vec({0.3, 1.1, -0.6, 0.2, 0.9});
  CHECK((zero.omega[0](z5) - plain.omega[0](z5)).max_abs() == 0.0);
  CHECK((zero.theta[0](z5) - plain.theta[0](z5)).max_abs() == 0.0);

  // Rotational X: the helicity contributes 2 omega_12 dx1 ^ dx2 ^ dt with omega = g F / 2.
  const LiouvilleForms rot = liouville_and_omega(testkit::rotation_field(), euclidean_metric(1), euclidean_metric(2),
                                                 HamiltonVariant::Theorem2);
  CHECK(rot.omega[0](z5).component({1, 2, 0}) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("Omega is minus d theta and d d vanishes") {
  testkit::Rng rng(15);
  struct Case {
    std::optional<DistTensorField> X;
    MetricSpec h, g;
    HamiltonVariant v;
    bool sphere;
  };
  const std::vector<Case> cases = {
      {std::nullopt, euclidean_metric(1), euclidean_metric(2), HamiltonVariant::Theorem1, false},
      {testkit::rotation_field(), euclidean_metric(1), euclidean_metric(2), HamiltonVariant::Theorem1, false},
      {testkit::rotation_field(), euclidean_metric(1), euclidean_metric(2), HamiltonVariant::Theorem2, false},
      {testkit::sphere_field(), euclidean_metric(1), sphere_metric(), HamiltonVariant::Theorem2, true},
      {testkit::mixed_field(), minkowski_metric(2), euclidean_metric(2), HamiltonVariant::Theorem2, false},
  };
  for (const Case& c : cases) {
    const HamiltonSetup s = make_hamilton_setup(c.X, c.h, c.g, c.v);
    const LiouvilleForms lf = liouville_and_omega(s);
    const DifferentialForm H = hamiltonian_form(s);
    for (int k = 0; k < 3; ++k) {
      const JetPoint jp = c.sphere ? random_sphere_point(rng, c.h.dim) : random_point(rng, c.h.dim, c.g.dim);
      const Vector z = s.chart.coords(jp);
      for (int a = 0; a < c.h.dim; ++a) {
        const DifferentialForm dtheta = form_d(lf.theta[a]);
        CHECK((lf.omega[a](z) + dtheta(z)).max_abs() <= 1e-6);
        if (dtheta.degree() < s.chart.dim()) CHECK(form_d(dtheta)(z).max_abs() <= 1e-6);
      }
      CHECK(form_d(form_d(H))(z).max_abs() <= 1e-6);
    }
  }
}

TEST_CASE("printed differential of H matches the coordinate derivative") {
  testkit::Rng rng(19);
  for (HamiltonVariant v : {HamiltonVariant::Theorem1, HamiltonVariant::Theorem2}) {
    const HamiltonSetup s = make_hamilton_setup(testkit::sphere_field(), euclidean_metric(1), sphere_metric(), v);
    const DifferentialForm dH = form_d(hamiltonian_form(s));
    for (int k = 0; k < 5; ++k) {
      const JetPoint jp = random_sphere_point(rng, 1);
      const FormValue printed =
          wedge(hamiltonian_differential_prefactor(s, jp), volume_form_value(s.chart, s.h, jp.t));
      CHECK((dH(s.chart.coords(jp)) - printed).max_abs() <= 1e-6);
    }
  }
}

TEST_CASE("volume factor splits off") {
  testkit::Rng rng(20);
  const JetChart chart{2, 1};
  const MetricSpec h = minkowski_metric(2);
  const Vector t = vec({0.2, 0.4});
  const FormValue B = FormValue::one_form(vec({0.0, 0.0, 1.5, -0.5, 2.0}));
  const FormValue w = wedge(B, volume_form_value(chart, h, t));
  CHECK((split_volume_factor(chart, h, t, w) - B).max_abs() <= 1e-14);
  const FormValue stray = w + FormValue::monomial(5, {2, 3, 4});
  try {
    split_volume_factor(chart, h, t, stray);
    FAIL("expected NotResolvable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotResolvable);
  }
}

TEST_CASE("Hamiltonian object reproduces u = h x1") {
  testkit::Rng rng(25);
  for (HamiltonVariant v : {HamiltonVariant::Theorem1, HamiltonVariant::Theorem2}) {
    const HamiltonSetup s = make_hamilton_setup(testkit::mixed_field(), minkowski_metric(2),
                                                constant_metric(rng.signed_metric(2, 0), {1, 1}), v);
    for (int k = 0; k < 20; ++k) {
      const JetPoint jp = random_point(rng, 2, 2);
      const HamiltonianObject obj = resolve_hamiltonian_object(s, jp);
      CHECK(max_abs(obj.u - metric_inverse(s.h, jp.t) * jp.x1) <= 1e-10);
      CHECK(obj.residual <= kResolveTol);
    }
  }
}

TEST_CASE("Hamilton systems on known solutions") {
  const HamiltonResidual geo =
      hamilton_system_residual(std::nullopt, euclidean_metric(1), sphere_metric(), equator(), vec({0.4}),
                               HamiltonVariant::Theorem1);
  CHECK(max_abs(geo.r1) <= 1e-12);
  CHECK(max_abs(geo.r2) <= 1e-8);

  for (double t : {0.2, 1.7, 4.0}) {
    const HamiltonResidual c = hamilton_system_residual(testkit::rotation_field(), euclidean_metric(1),
                                                        euclidean_metric(2), testkit::circle_sheet(), vec({t}),
                                                        HamiltonVariant::Theorem2);
    CHECK(max_abs(c.r1) <= 1e-8);
    CHECK(max_abs(c.r2) <= 1e-8);
    const HamiltonResidual e = hamilton_system_residual(testkit::scaling_field(), euclidean_metric(1),
                                                        euclidean_metric(1), testkit::exponential_sheet(),
                                                        vec({t / 4}), HamiltonVariant::Theorem1);
    CHECK(max_abs(e.r2) <= 1e-8);
  }
}

TEST_CASE("Hamilton residuals against the traced prolongations") {
  testkit::Rng rng(27);
  const MetricSpec h = minkowski_metric(2);
  const MetricSpec g = constant_metric(rng.signed_metric(2, 0), {1, 1});
  const HamiltonSetup s2 = make_hamilton_setup(testkit::mixed_field(), h, g, HamiltonVariant::Theorem2);
  const HamiltonSetup s1 = make_hamilton_setup(testkit::mixed_field(), h, g, HamiltonVariant::Theorem1);
  for (int k = 0; k < 50; ++k) {
    const SheetJet j{rng.vector(2, -1, 1), rng.vector(2, -1, 1), rng.matrix(2, 2), rng.symmetric_second(2, 2)};
    const Vector eq11 = prolongation_residual(testkit::mixed_field(), h, g, j, ProlongationMode::Eq11);
    CHECK(max_abs(hamilton_system_residual(s2, j).r2 - eq11) <= 1e-10);
    // The first variant keeps only the grad f term.
    const Vector tau = tension(j, h, g);
    const Vector gradf = gradf_term_check(testkit::mixed_field(), h, g, j.t, j.x).term;
    CHECK(max_abs(hamilton_system_residual(s1, j).r2 - (tau - gradf)) <= 1e-10);
  }
}

TEST_CASE("Poisson bracket") {
  testkit::Rng rng(33);
  const HamiltonSetup s = make_hamilton_setup(testkit::rotation_field(), euclidean_metric(1), euclidean_metric(2),
                                              HamiltonVariant::Theorem2);
  const DifferentialForm H = hamiltonian_form(s);
  const DifferentialForm vol = volume_form(s.chart, s.h);
  const DifferentialForm constant = 3.0 * vol;
  const DifferentialForm momentum =
      form_wedge(DifferentialForm::function(5, [](const Vector& z) { return z(3) * z(1) + z(2) * z(2); }), vol);
  const DifferentialForm HH = poisson_bracket(s, H, H);
  const DifferentialForm Hc = poisson_bracket(s, H, constant);
  const DifferentialForm Hm = poisson_bracket(s, H, momentum);
  const DifferentialForm mH = poisson_bracket(s, momentum, H);
  double worst_anti = 0.0, typical = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Vector z = s.chart.coords(random_point(rng, 1, 2));
    CHECK(HH(z).max_abs() <= 1e-9);
    CHECK(Hc(z).max_abs() <= 1e-9);
    worst_anti = std::max(worst_anti, (Hm(z) + mH(z)).max_abs());
    typical = std::max(typical, Hm(z).max_abs());
  }
  CHECK(worst_anti <= 1e-9);
  CHECK(typical > 1e-3);  // the check above is not vacuous
}
