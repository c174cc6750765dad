#include <doctest.h>

#include <cmath>

#include "common.hpp"
#include "leafscope/leaf.hpp"

using namespace leafscope;
using test::scene;
using test::vec;

namespace {

Eigen::Vector3d embed(const Vec& th_ph) {
  return {std::sin(th_ph[0]) * std::cos(th_ph[1]), std::sin(th_ph[0]) * std::sin(th_ph[1]), std::cos(th_ph[0])};
}

}  // namespace

TEST_CASE("conjugated symbol in R^3 with phi = x_1") {
  const MetricScene s = scene("ball3");
  const LCW w = LCW::natural();
  const Vec x = vec({0.1, 0.2, -0.3});
  SymbolValue v = weyl_symbol(s, w, {x, vec({0.0, 1.0, 0.0})});
  CHECK(v.a == doctest::Approx(0.0));
  CHECK(v.b == doctest::Approx(0.0));
  v = weyl_symbol(s, w, {x, vec({1.0, 0.0, 0.0})});
  CHECK(v.a == doctest::Approx(0.0));
  CHECK(v.b == doctest::Approx(2.0));
  v = weyl_symbol(s, w, {x, vec({0.0, 2.0, 0.0})});
  CHECK(v.a == doctest::Approx(3.0));
  CHECK(v.b == doctest::Approx(0.0));
}

TEST_CASE("H_b translates x_1 on a product") {
  const MetricScene s = scene("product_interval_disk");
  const PhasePoint p{vec({-0.4, 0.1, 0.2}), vec({0.0, 0.6, 0.8})};
  const GeodesicTrace c = hamilton_curve(s, LCW::natural(), p, HamiltonField::B, 0.3);
  for (std::size_t i = 0; i < c.t.size(); ++i) {
    CHECK(c.samples[i].x[0] == doctest::Approx(-0.4 + 2.0 * c.t[i]).epsilon(1e-12));
    CHECK((c.samples[i].x.tail(2) - p.x.tail(2)).norm() < 1e-14);
    CHECK((c.samples[i].xi - p.xi).norm() < 1e-14);
  }
  CHECK(symbol_deviation(s, LCW::natural(), c) < 1e-12);
}

TEST_CASE("H_a in the plane is a straight line") {
  const MetricScene s = scene("unit_disk");
  const GeodesicTrace c = hamilton_curve(s, LCW::natural(), {vec({0.0, 0.0}), vec({0.0, 1.0})}, HamiltonField::A, 0.4);
  for (std::size_t i = 0; i < c.t.size(); ++i) {
    CHECK(std::abs(c.samples[i].x[0]) < 1e-14);
    CHECK(c.samples[i].x[1] == doctest::Approx(2.0 * c.t[i]).epsilon(1e-12));
  }
}

TEST_CASE("H_a on R x S^2 follows a great circle with x_1 frozen") {
  const MetricScene s = scene("product_interval_sphere");
  const PhasePoint p{vec({0.2, kPi / 2, -0.3}), vec({0.0, 0.0, 1.0})};
  const GeodesicTrace c = hamilton_curve(s, LCW::natural(), p, HamiltonField::A, 0.4);
  for (std::size_t i = 0; i < c.t.size(); ++i) {
    CHECK(c.samples[i].x[0] == 0.2);
    CHECK(c.samples[i].x[1] == doctest::Approx(kPi / 2).epsilon(1e-10));
    CHECK(c.samples[i].x[2] == doctest::Approx(-0.3 + 2.0 * c.t[i]).epsilon(1e-10));
  }
  CHECK(symbol_deviation(s, LCW::natural(), c) < 1e-10);
}

TEST_CASE("product leaves") {
  SUBCASE("R x R^2: the leaf lies in the plane through y' spanned by x_1 and eta'") {
    const MetricScene s = scene("product_interval_plane");
    const BicharLeaf l = build_leaf(s, vec({0.1, 0.2, -0.3}), vec({0.0, 0.6, 0.8}));
    for (double t : {-0.5, 0.0, 0.4})
      for (double u : {0.1, 0.5, 0.9}) {
        const double sv = l.s_min + u * l.length();
        const Vec x = l.point(t, sv).x;
        CHECK(x[0] == doctest::Approx(0.1 + t));
        const Eigen::Vector2d d(x[1] - 0.2, x[2] + 0.3);
        CHECK(std::abs(d.x() * 0.8 - d.y() * 0.6) < 1e-9);
      }
    // chord of the radius-1.5 disk through (0.2, -0.3) along (0.6, 0.8)
    const double b = 0.2 * 0.6 - 0.3 * 0.8, c = 0.04 + 0.09 - 2.25;
    CHECK(l.length() == doctest::Approx(2.0 * std::sqrt(b * b - c)).epsilon(1e-9));
  }
  SUBCASE("R x unit disk: a diameter gives s in [0, 2]") {
    const MetricScene s = scene("product_interval_disk");
    BicharLeaf l = build_leaf(s, vec({0.0, 0.0, 0.0}), vec({0.0, 1.0, 0.0}));
    CHECK(l.length() == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(screen_leaf(s, l) == GoodnessStatus::Good);
  }
  SUBCASE("R x sphere cap: the transversal curve is a great-circle arc") {
    const MetricScene s = scene("product_interval_sphere");
    const BicharLeaf l = build_leaf(s, vec({0.0, kPi / 2, 0.0}), vec({0.0, 0.6, 0.8}));
    CHECK(l.length() == doctest::Approx(2.0).epsilon(1e-8));
    const Eigen::Vector3d a = embed(l.point(0.0, l.s_min + 0.1).x.tail(2));
    const Eigen::Vector3d b = embed(l.point(0.0, l.s_min + 0.7).x.tail(2));
    const Eigen::Vector3d nrm = a.cross(b).normalized();
    for (double u : {0.2, 0.5, 0.8, 0.95}) CHECK(std::abs(nrm.dot(embed(l.point(0.0, l.s_min + u * l.length()).x.tail(2)))) < 1e-8);
  }
  SUBCASE("nearly tangent chord is Tangential") {
    const MetricScene s = scene("product_interval_disk");
    BicharLeaf l = build_leaf(s, vec({0.0, 0.0, 1.0 - 1e-7}), vec({0.0, 1.0, 0.0}));
    CHECK(screen_leaf(s, l) == GoodnessStatus::Tangential);
  }
  SUBCASE("bad inputs") {
    const MetricScene s = scene("product_interval_disk");
    CHECK_THROWS_AS(build_leaf(s, vec({0.0, 0.0, 0.0}), vec({1.0, 0.0, 0.0})), ConfigError);
    CHECK_THROWS_AS(build_leaf(s, vec({0.0, 2.0, 0.0}), vec({0.0, 1.0, 0.0})), ConfigError);
    CHECK_THROWS_AS(build_leaf(scene("unit_disk"), vec({0.0, 0.0}), vec({0.0, 1.0})), ConfigError);
  }
}

TEST_CASE("trapped example construction and leaves") {
  const MetricScene s = build_trapped_example(3, 0.05);
  CHECK(s.embedded());
  CHECK(s.rho(vec({0.0, 0.0, 1.0, 0.0})) < 0.0);
  CHECK(s.rho(vec({0.0, 0.0, 0.0, 1.0})) > 0.0);  // cap around e_3 removed at t = 0
  CHECK_THROWS_AS(build_trapped_example(3, 0.2), ConfigError);

  BicharLeaf trapped = build_sphere_leaf(s, vec({0.0, 0.0, 1.0, 0.0}), vec({0.0, 1.0, 0.0, 0.0}));
  CHECK(screen_leaf(s, trapped) == GoodnessStatus::Trapped);
  REQUIRE(trapped.witness.has_value());

  // eta close to e_3: the curve through the base point runs into the cap and exits
  const GeodesicTrace out = integrate_geodesic(s, {vec({0.0, 0.0, 1.0, 0.0}), vec({0.0, 0.0, 0.0, 1.0})}, 1000.0);
  CHECK(out.l_plus.has_value());
  CHECK(out.l_minus.has_value());
}

TEST_CASE("trapped-leaf detection") {
  const TrappedReport r = detect_all_trapped(build_trapped_example(3, 0.05), 6);
  CHECK(r.total == 36);
  CHECK(r.trapped == 36);
  CHECK(r.verified == 36);
  CHECK(r.hypothesis_ok);
  CHECK(r.to_json()["summary"] == "100% Trapped");

  const TrappedReport wide = detect_all_trapped(build_trapped_example(3, 0.45, true), 6);
  CHECK_FALSE(wide.hypothesis_ok);
  CHECK_FALSE(wide.notes.empty());
  CHECK(wide.trapped < wide.total);

  CHECK_THROWS_AS(detect_all_trapped(scene("product_interval_disk"), 4), ConfigError);
}
