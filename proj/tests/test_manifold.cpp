#include <doctest.h>

#include <cmath>

#include "common.hpp"
#include "leafscope/manifold.hpp"

using namespace leafscope;
using test::scene;
using test::vec;

namespace {

// Gamma^k_ij from central differences of the metric.
double fd_christoffel(const MetricScene& s, const Vec& x, int k, int i, int j, double step = 1e-5) {
  const int n = s.coord_dim();
  auto dg = [&](int l) {
    Vec a = x, b = x;
    a[l] += step;
    b[l] -= step;
    return Mat((s.metric(a) - s.metric(b)) / (2.0 * step));
  };
  const Mat ginv = s.metric(x).inverse();
  double out = 0.0;
  for (int l = 0; l < n; ++l) out += 0.5 * ginv(k, l) * (dg(i)(j, l) + dg(j)(i, l) - dg(l)(i, j));
  return out;
}

}  // namespace

TEST_CASE("euclidean disk: identity metric and zero Christoffels") {
  const MetricScene s = scene("unit_disk");
  CHECK(s.dim() == 2);
  const Vec x = vec({0.3, -0.4});
  CHECK((s.metric(x) - Mat::Identity(2, 2)).norm() == 0.0);
  const Christoffel c = christoffel(s, x);
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) CHECK(c(k, i, j) == 0.0);
}

TEST_CASE("flat product of intervals: block identity metric") {
  const MetricScene s = scene("product_intervals");
  CHECK(s.is_product());
  CHECK((s.metric(vec({0.2, -0.1})) - Mat::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("sphere chart metric matches great-circle arc length") {
  const MetricScene s = scene("sphere_cap");
  const double th = 1.1;
  const Mat g = s.metric(vec({th, 0.3}));
  CHECK(g(0, 0) == doctest::Approx(1.0));
  CHECK(g(1, 1) == doctest::Approx(std::sin(th) * std::sin(th)));
  CHECK(g(0, 1) == doctest::Approx(0.0));
  // Length of a sampled great-circle arc of angle 1, measured with the chart metric.
  const Eigen::Vector3d u(0.8, 0.0, 0.6), v(0.0, 1.0, 0.0);
  auto chart = [&](double t) {
    const Eigen::Vector3d p = std::cos(t) * u + std::sin(t) * v;
    return vec({std::acos(p.z()), std::atan2(p.y(), p.x())});
  };
  const int m = 4000;
  double len = 0.0;
  for (int i = 0; i < m; ++i) {
    const Vec a = chart(static_cast<double>(i) / m), b = chart(static_cast<double>(i + 1) / m);
    const Vec d = b - a;
    len += std::sqrt(d.dot(s.metric(0.5 * (a + b)) * d));
  }
  CHECK(len == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("sphere Christoffel symbols against finite differences") {
  const MetricScene s = scene("sphere_cap");
  const Vec x = vec({kPi / 4, 0.2});
  const Christoffel c = christoffel(s, x);
  CHECK(c(0, 1, 1) == doctest::Approx(-0.5).epsilon(1e-9));
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) CHECK(c(k, i, j) == doctest::Approx(fd_christoffel(s, x, k, i, j)).epsilon(1e-6));
}

TEST_CASE("constant conformal factor leaves Christoffels unchanged") {
  const MetricScene base = scene("conformal_disk");
  const MetricScene scaled = build_scene(nlohmann::json::parse(R"j({"type": "conformal",
      "factor": "4*(1 + 0.3*exp(-(x1^2 + x2^2)))",
      "base": {"type": "euclidean", "dim": 2, "boundary": {"kind": "ball", "radius": 1.0}}})j"));
  const Vec x = vec({0.2, -0.35});
  const Christoffel a = christoffel(base, x);
  const Christoffel b = christoffel(scaled, x);
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        CHECK(b(k, i, j) == doctest::Approx(a(k, i, j)).epsilon(1e-12));
        CHECK(a(k, i, j) == doctest::Approx(fd_christoffel(base, x, k, i, j)).epsilon(1e-6));
      }
}

TEST_CASE("unit disk boundary function") {
  const MetricScene s = scene("unit_disk");
  CHECK(s.rho(vec({0.0, 0.0})) == doctest::Approx(-1.0));
  CHECK(s.rho(vec({1.0, 0.0})) == doctest::Approx(0.0));
  const Vec nu = outward_conormal(s, vec({1.0, 0.0}));
  CHECK(nu[0] == doctest::Approx(1.0));
  CHECK(nu[1] == doctest::Approx(0.0));
  CHECK(boundary_eval(s, vec({0.5, 0.0})).inside());
  CHECK_FALSE(boundary_eval(s, vec({1.2, 0.0})).inside());
}

TEST_CASE("product of intervals: rho is the max of factor distances away from corners") {
  const MetricScene s = scene("product_intervals");
  // far from the rounded corner the smoothed max equals the exact max
  for (double y : {-0.3, 0.0, 0.4}) {
    const double exact = std::max(std::abs(0.95) - 1.0, std::abs(y) - 1.0);
    CHECK(s.rho(vec({0.95, y})) == doctest::Approx(exact).epsilon(1e-3));
  }
}

TEST_CASE("second fundamental form of disks") {
  const MetricScene s = scene("unit_disk");
  const ShapeOperator u = second_fundamental_form(s, vec({0.6, 0.8}));
  CHECK(u.matrix(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(u.strictly_convex);

  const double r = 2.5;
  const MetricScene big = build_scene(
      {{"type", "euclidean"}, {"dim", 2}, {"boundary", {{"kind", "ball"}, {"radius", r}}}});
  const Vec p = vec({r * std::cos(0.4), r * std::sin(0.4)});
  // curvature of the circle through three nearby boundary points
  auto at = [&](double a) { return Eigen::Vector2d(r * std::cos(a), r * std::sin(a)); };
  const Eigen::Vector2d a = at(0.39), b = at(0.4), c = at(0.41);
  const double area2 = std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
  const double kappa = 2.0 * area2 / ((b - a).norm() * (c - b).norm() * (c - a).norm());
  CHECK(second_fundamental_form(big, p).matrix(0, 0) == doctest::Approx(kappa).epsilon(1e-6));
}

TEST_CASE("flat face of a rounded square is not strictly convex") {
  const MetricScene s = build_scene(
      {{"type", "euclidean"}, {"dim", 2}, {"boundary", {{"kind", "superellipse"}, {"half_widths", {1.0, 1.0}}, {"p", 8}}}});
  const Vec x = boundary_point_along(s, Vec::Zero(2), vec({1.0, 0.0}));
  const ShapeOperator so = second_fundamental_form(s, x);
  CHECK(std::abs(so.min_eigenvalue) < 1e-6);
  CHECK_FALSE(so.strictly_convex);
}

TEST_CASE("scene config errors") {
  CHECK_THROWS_AS(build_scene(nlohmann::json::parse(R"({"type": "nope"})")), ConfigError);
  CHECK_THROWS_AS(build_scene(nlohmann::json::parse(R"({"type": "euclidean", "dim": 2})")), ConfigError);
  CHECK_THROWS_AS(build_scene_file("/nonexistent/scene.json"), ConfigError);
}

TEST_CASE("convexity screen") {
  CHECK(check_convexity(scene("unit_disk"), 64, 1).strictly_convex);
  CHECK(check_convexity(scene("perturbed_disk"), 64, 1).strictly_convex);
  CHECK_FALSE(check_convexity(scene("product_intervals"), 64, 1).strictly_convex);
  const ConvexityCheck band = check_convexity(scene("sphere_band"), 64, 1);
  CHECK_FALSE(band.strictly_convex);
  CHECK(band.skipped > 0);
}
