#include <doctest.h>

#include <cmath>

#include "common.hpp"
#include "leafscope/transform.hpp"

using namespace leafscope;
using test::scene;
using test::vec;

namespace {

// Composite Simpson with n (even) intervals; smooth integrands only.
double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// R x unit disk with the exact (max) product boundary and a long first factor.
MetricScene long_cylinder(double half_width) {
  return build_scene({{"type", "product"},
                      {"combine", "max"},
                      {"factors",
                       {{{"type", "euclidean"}, {"dim", 1}, {"boundary", {{"kind", "interval"}, {"half_width", half_width}}}},
                        {{"type", "euclidean"}, {"dim", 2}, {"boundary", {{"kind", "ball"}, {"radius", 1.0}}}}}}});
}

}  // namespace

TEST_CASE("X-ray transform on the unit disk") {
  const MetricScene s = scene("unit_disk");
  const ScalarField one = ScalarField::expression(s, "1");
  const GeodesicTrace center = integrate_geodesic(s, {vec({0.0, 0.0}), vec({1.0, 0.0})}, 10.0);
  const TransformSample c = xray_transform(s, one, center);
  CHECK(c.raw_value.real() == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(c.value.real() < 2.0);
  CHECK(c.value.real() > 1.98);

  const GeodesicTrace off = integrate_geodesic(s, {vec({0.0, 0.6}), vec({1.0, 0.0})}, 10.0);
  const TransformSample o = xray_transform(s, one, off);
  CHECK(o.raw_value.real() == doctest::Approx(1.6).epsilon(1e-9));
  CHECK(o.value.real() == doctest::Approx(1.6).epsilon(2e-2));

  CHECK(xray_transform(s, ScalarField::zero(s), off).value == cplx(0.0, 0.0));
}

TEST_CASE("2D Radon transform closed forms") {
  const Fn2 g = [](double a, double b) { return std::exp(-(a * a + b * b)); };
  Box box;
  box.lo = Vec::Constant(2, -7.0);
  box.hi = Vec::Constant(2, 7.0);
  QuadratureOptions qo;
  qo.tol = 1e-11;
  for (double th : {0.0, 0.7, 2.1})
    for (double p : {-0.8, 0.0, 0.5})
      CHECK(radon_2d(g, box, th, p, qo) == doctest::Approx(std::sqrt(kPi) * std::exp(-p * p)).epsilon(1e-6));

  CHECK(radon_2d([](double, double) { return 0.0; }, box, 0.3, 0.1) == 0.0);

  const Fn2 disk = [](double a, double b) {
    const double u = std::clamp((1.0 - std::hypot(a, b)) / 1e-2, 0.0, 1.0);
    return u * u * (3.0 - 2.0 * u);
  };
  Box unit;
  unit.lo = Vec::Constant(2, -1.0);
  unit.hi = Vec::Constant(2, 1.0);
  CHECK(radon_2d(disk, unit, 0.4, 0.0, qo) == doctest::Approx(2.0).epsilon(1e-2));

  const Grid2D grid = [&] {
    Grid2D gr = Grid2D::over(-4.0, 4.0, -4.0, 4.0, 161, 161);
    gr.fill(g);
    return gr;
  }();
  CHECK(radon_2d(grid, 0.7, 0.5) == doctest::Approx(std::sqrt(kPi) * std::exp(-0.25)).epsilon(1e-3));
}

TEST_CASE("leaf transform oracles") {
  SUBCASE("equal potentials give exactly zero") {
    const MetricScene s = scene("product_interval_disk");
    const ScalarField q = ScalarField::expression(s, "exp(x1) * (1 + x2*x3)");
    BicharLeaf l = build_leaf(s, vec({0.0, 0.1, 0.0}), vec({0.0, 0.0, 1.0}));
    screen_leaf(s, l);
    const TransformSample t = leaf_transform(s, q - q, l, HoloAmplitude{0.7});
    CHECK(t.value == cplx(0.0, 0.0));
    CHECK(t.raw_value == cplx(0.0, 0.0));
    CHECK(attenuated_transversal_transform(s, q - q, l.transversal, 0.35).value == cplx(0.0, 0.0));
  }
  SUBCASE("plane through the center of the unit ball has area pi") {
    const MetricScene s = scene("ball3");
    BicharLeaf l = build_plane_leaf(s, vec({1.0, 0.0, 0.0}), Vec::Zero(3), vec({0.0, 0.6, 0.8}));
    screen_leaf(s, l);
    const TransformSample t = leaf_transform(s, ScalarField::expression(s, "1"), l, HoloAmplitude{0.0});
    CHECK(t.raw_value.real() == doctest::Approx(kPi).epsilon(1e-3));
    CHECK(t.value.real() == doctest::Approx(kPi).epsilon(1e-2));
  }
  SUBCASE("separable integrand factors into one-dimensional integrals") {
    const MetricScene s = long_cylinder(1.0);
    BicharLeaf l = build_leaf(s, vec({0.0, 0.2, -0.1}), vec({0.0, 0.6, 0.8}));
    REQUIRE(screen_leaf(s, l) == GoodnessStatus::Good);
    const ScalarField f(s, [](const Vec& x) { 
      const double w = 1.0 - x[0] * x[0];
      return w * w * (1.0 + x[0]) * std::cos(x[1] + 2.0 * x[2]);
    });
    const double iu = 16.0 / 15.0;
    const double iv = simpson(
        [&](double sv) {
          const Vec x = l.point(0.0, sv).x;
          return std::cos(x[1] + 2.0 * x[2]);
        },
        l.s_min, l.s_max);
    const TransformSample t = leaf_transform(s, f, l, HoloAmplitude{0.0});
    CHECK(t.raw_value.real() == doctest::Approx(iu * iv).epsilon(1e-6));
    const TransformSample a = attenuated_transversal_transform(s, f, l.transversal, 0.0);
    CHECK(a.raw_value.real() == doctest::Approx(iu * iv).epsilon(1e-6));
  }
  SUBCASE("Gaussian in x_1 gives sqrt(pi) times the transversal integral") {
    const MetricScene s = long_cylinder(6.0);
    BicharLeaf l = build_leaf(s, vec({0.0, -0.3, 0.2}), vec({0.0, 0.8, -0.6}));
    REQUIRE(screen_leaf(s, l) == GoodnessStatus::Good);
    const ScalarField f(s, [](const Vec& x) { return std::exp(-x[0] * x[0]) * (2.0 + x[1] - x[2] * x[2]); });
    const double iv = simpson(
        [&](double sv) {
          const Vec x = l.point(0.0, sv).x;
          return 2.0 + x[1] - x[2] * x[2];
        },
        l.s_min, l.s_max);
    const TransformSample a = attenuated_transversal_transform(s, f, l.transversal, 0.0);
    CHECK(a.raw_value.real() == doctest::Approx(std::sqrt(kPi) * iv).epsilon(1e-6));
  }
  SUBCASE("leaf and attenuated transforms agree") {
    const MetricScene s = scene("product_interval_plane");
    const ScalarField f = ScalarField::expression(s, "exp(-(x1^2 + x2^2 + x3^2)) * (1 + 0.3*x2)");
    BicharLeaf l = build_leaf(s, vec({0.2, -0.2, -0.5}), vec({0.0, 0.6, 0.8}));
    screen_leaf(s, l);
    const double lam = 0.5;
    const cplx a = attenuated_transversal_transform(s, f, l.transversal, lam).value;
    const cplx b = leaf_transform(s, f, l, HoloAmplitude{2.0 * lam}).value;
    CHECK(std::abs(b - std::exp(cplx(0.0, 2.0 * lam * 0.2)) * a) < 1e-6);
  }
  SUBCASE("non-good leaves are rejected") {
    const MetricScene t = scene("trapped_example");
    BicharLeaf l = build_sphere_leaf(t, vec({0.0, 0.0, 1.0, 0.0}), vec({0.0, 1.0, 0.0, 0.0}));
    screen_leaf(t, l);
    CHECK_THROWS_AS(leaf_transform(t, ScalarField::expression(t, "1"), l, HoloAmplitude{0.0}), ConfigError);
  }
}

TEST_CASE("holomorphic amplitudes satisfy Cauchy-Riemann") {
  CHECK(HoloAmplitude{cplx(1.3, -0.4)}.cauchy_riemann_residual(0.0, 1.0, -0.5, 0.5, 9) < 1e-6);
  const HoloAmplitude psi{0.5};
  CHECK(std::abs(psi(1.0, 2.0) - std::exp(-0.5 * cplx(1.0, 2.0))) < 1e-15);
}

TEST_CASE("product pullback") {
  const MetricScene s = scene("product_intervals");
  const FactorGeodesic g1 = factor_geodesic(s.factor(0), {vec({0.0}), vec({1.0})});
  const FactorGeodesic g2 = factor_geodesic(s.factor(1), {vec({0.0}), vec({1.0})});
  CHECK(g1.length == doctest::Approx(2.0).epsilon(1e-9));
  const ScalarField f(s, [](const Vec& x) { return std::cos(x[0]) * (1.0 + x[1] * x[1]); });
  const Fn2 h = product_pullback(s, f, g1, g2);
  for (double a : {0.4, 1.0, 1.6})
    for (double b : {0.3, 1.2})
      CHECK(h(a, b) == doctest::Approx(std::cos(a - 1.0) * (1.0 + (b - 1.0) * (b - 1.0))).epsilon(1e-9));
  CHECK(h(-0.2, 1.0) == 0.0);
  CHECK(h(1.0, 2.3) == 0.0);

  const MetricScene sp = scene("product_interval_sphere");
  const FactorGeodesic c1 = factor_geodesic(sp.factor(0), {vec({0.0}), vec({1.0})});
  const FactorGeodesic c2 = factor_geodesic(sp.factor(1), {vec({kPi / 2, 0.0}), vec({0.0, 1.0})});
  CHECK(c2.length == doctest::Approx(2.0).epsilon(1e-8));
  const ScalarField fs(sp, [](const Vec& x) { return std::exp(0.3 * x[0]) * std::sin(x[1]) * std::cos(x[2]); });
  const Fn2 hs = product_pullback(sp, fs, c1, c2);
  for (double a : {0.7, 1.2})
    for (double b : {0.5, 1.0, 1.5})
      CHECK(hs(a, b) == doctest::Approx(std::exp(0.3 * (a - 1.0)) * std::cos(b - 1.0)).epsilon(1e-7));
}

TEST_CASE("tilted geodesics on a flat product") {
  const MetricScene s = scene("product_intervals");
  const FactorGeodesic g1 = factor_geodesic(s.factor(0), {vec({0.0}), vec({1.0})});
  const FactorGeodesic g2 = factor_geodesic(s.factor(1), {vec({0.0}), vec({1.0})});
  const Eigen::Vector2d a(0.9, 1.2);
  const GeodesicTrace t0 = tilted_geodesic(s, g1, g2, 0.0, a);
  for (const PhasePoint& p : t0.samples) CHECK(p.x[1] == doctest::Approx(a.y() - 1.0).epsilon(1e-12));
  const GeodesicTrace t90 = tilted_geodesic(s, g1, g2, kPi / 2, a);
  for (const PhasePoint& p : t90.samples) CHECK(p.x[0] == doctest::Approx(a.x() - 1.0).epsilon(1e-12));
  const GeodesicTrace t45 = tilted_geodesic(s, g1, g2, kPi / 4, a);
  REQUIRE(t45.samples.size() > 10);
  for (const PhasePoint& p : t45.samples) CHECK(p.x[0] - p.x[1] == doctest::Approx(a.x() - a.y()).epsilon(1e-12));
  CHECK(geodesic_residual(s, t45) < 1e-9);

  const ScalarField f = ScalarField::expression(s, "exp(-3*((x1 - 0.2)^2 + x2^2))");
  const Fn2 h = product_pullback(s, f, g1, g2);
  Box box;
  box.lo = Vec::Zero(2);
  box.hi = vec({g1.length, g2.length});
  QuadratureOptions qo;
  qo.tol = 1e-10;
  const double th = 0.8, p = 0.3;
  const Eigen::Vector2d c(1.0, 1.0);
  const GeodesicTrace tr = tilted_geodesic(s, g1, g2, th, c + p * Eigen::Vector2d(-std::sin(th), std::cos(th)));
  CHECK(xray_transform(s, f, tr, qo).value.real() == doctest::Approx(radon_2d(h, box, th, p, qo, c)).epsilon(1e-7));
}
