#include <doctest.h>

#include <cmath>

#include "common.hpp"
#include "leafscope/flow.hpp"
#include "leafscope/rng.hpp"

using namespace leafscope;
using test::scene;
using test::vec;

TEST_CASE("disk geodesics are straight chords") {
  const MetricScene s = scene("unit_disk");
  const GeodesicTrace tr = integrate_geodesic(s, {vec({0.0, 0.0}), vec({1.0, 0.0})}, s.default_t_cap());
  REQUIRE_FALSE(tr.trapped());
  CHECK(*tr.l_plus == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(*tr.l_minus == doctest::Approx(-1.0).epsilon(1e-10));
  for (double t : {-0.7, 0.2, 0.9}) {
    const Vec x = tr.position_at(t);
    CHECK(x[0] == doctest::Approx(t).epsilon(1e-10));
    CHECK(std::abs(x[1]) < 1e-12);
  }

  const ExitTimes e = exit_times(s, {vec({0.5, 0.0}), vec({1.0, 0.0})}, s.default_t_cap());
  CHECK(*e.l_minus == doctest::Approx(-1.5).epsilon(1e-10));
  CHECK(*e.l_plus == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(classify(tr) == DirectionClass::G);
}

TEST_CASE("equatorial sphere geodesic closes after 2 pi") {
  const MetricScene s = scene("sphere_band");
  const GeodesicTrace tr = integrate_geodesic(s, {vec({kPi / 2, 0.0}), vec({0.0, 1.0})}, 7.0);
  CHECK(tr.trapped());
  const Vec x = tr.position_at(2.0 * kPi);
  CHECK(std::abs(x[0] - kPi / 2) < 1e-6);
  CHECK(std::abs(std::remainder(x[1], 2.0 * kPi)) < 1e-6);
  CHECK(std::abs(std::remainder(tr.position_at(kPi)[1] - kPi, 2.0 * kPi)) < 1e-6);
}

TEST_CASE("product geodesic with xi_1 = 0 keeps x_1 fixed") {
  const MetricScene s = scene("product_interval_disk");
  const GeodesicTrace tr = integrate_geodesic(s, {vec({0.3, 0.1, -0.2}), vec({0.0, 0.6, 0.8})}, s.default_t_cap());
  REQUIRE_FALSE(tr.trapped());
  for (const PhasePoint& p : tr.samples) CHECK(p.x[0] == 0.3);
}

TEST_CASE("trapped example: great circle away from the cap is trapped both ways") {
  const MetricScene s = scene("trapped_example");
  const PhasePoint p{vec({0.0, 0.0, 1.0, 0.0}), vec({0.0, 1.0, 0.0, 0.0})};
  const GeodesicTrace tr = integrate_geodesic(s, p, 1000.0);
  CHECK_FALSE(tr.l_minus.has_value());
  CHECK_FALSE(tr.l_plus.has_value());
  CHECK(tr.energy_drift < 1e-6);
  CHECK(classify_direction(s, p, 1000.0) == DirectionClass::B2);
}

TEST_CASE("funnel: geodesic asymptotic to the neck is half trapped") {
  const MetricScene s = scene("funnel");
  // xi_2 = 1 is the separatrix value: x_1' = -tanh(x_1) forwards, escape backwards
  const double x1 = 0.5;
  const PhasePoint p{vec({x1, 0.0}), vec({-std::tanh(x1), 1.0})};
  CHECK(s.norm_covector(p.x, p.xi) == doctest::Approx(1.0));
  CHECK(classify_direction(s, p, 30.0) == DirectionClass::B1);
}

TEST_CASE("nontangential chords") {
  const MetricScene s = scene("unit_disk");
  CHECK(nontangential(integrate_geodesic(s, {vec({0.0, 0.0}), vec({0.0, 1.0})}, 10.0)));
  const double d = 1.0 - 1e-9;
  CHECK_FALSE(nontangential(integrate_geodesic(s, {vec({0.0, d}), vec({1.0, 0.0})}, 10.0)));

  const MetricScene pd = scene("perturbed_disk");
  int ok = 0;
  for (int i = 0; i < 1000; ++i) {
    CounterRng rng(17, static_cast<std::uint64_t>(i));
    const Vec x = pd.sample_point(rng);
    if (nontangential(integrate_geodesic(pd, {x, pd.sample_unit_covector(x, rng)}, 50.0))) ++ok;
  }
  CHECK(ok == 1000);
}

TEST_CASE("coverage is complete on the disk and reproducible") {
  const MetricScene s = scene("unit_disk");
  const CoverageReport a = coverage_monte_carlo(s, 200, 16, s.default_t_cap(), 3);
  CHECK(a.fraction == 1.0);
  CHECK(a.uncovered.empty());
  CHECK(a.strictly_convex);
  CHECK(a.to_json().dump() == coverage_monte_carlo(s, 200, 16, s.default_t_cap(), 3).to_json().dump());
}

TEST_CASE("B1 measure estimates") {
  const MetricScene disk = scene("unit_disk");
  const MeasureReport d = b1_measure_estimate(disk, 500, disk.default_t_cap(), 1);
  CHECK(d.b1 == 0);
  CHECK(d.b2 == 0);

  const MetricScene t = scene("trapped_example");
  const MeasureReport m = b1_measure_estimate(t, 1000, t.default_t_cap(), 2);
  CHECK(m.b1_fraction() < 3.0 / std::sqrt(1000.0));

  // flat torus with a small hole: most directions miss it in both time directions
  const MetricScene torus = build_scene(nlohmann::json::parse(R"({"type": "expression", "dim": 2,
      "metric": [["1", "0"], ["0", "1"]],
      "boundary": {"kind": "expression", "rho": "0.0625 - x1^2 - x2^2", "scale": 1.0,
                   "bounds": {"lo": [-3.141592653589793, -3.141592653589793],
                              "hi": [3.141592653589793, 3.141592653589793]}, "interior": [2, 2]},
      "chart": {"lo": [-3.141592653589793, -3.141592653589793], "hi": [3.141592653589793, 3.141592653589793]},
      "periodic": [6.283185307179586, 6.283185307179586]})"));
  const MeasureReport b = b1_measure_estimate(torus, 400, 5.0, 4);
  CHECK(b.b2_fraction() > 0.75);
  CHECK(b.b1_fraction() < 0.25);
}
