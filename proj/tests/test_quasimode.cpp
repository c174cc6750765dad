#include <doctest.h>

#include <cmath>

#include "common.hpp"
#include "leafscope/quasimode.hpp"

using namespace leafscope;
using test::scene;
using test::vec;

namespace {

struct Diameter {
  MetricScene s = scene("product_interval_disk");
  BicharLeaf leaf = build_leaf(s, vec({0.0, 0.0, 0.0}), vec({0.0, 1.0, 0.0}));
};

}  // namespace

TEST_CASE("plane wave solves the transversal Helmholtz equation") {
  Diameter d;
  BeamOptions o;
  o.kind = BeamKind::PlaneWave;
  o.grid = 128;
  const TransversalBeam v(d.s.factor(1), d.leaf.transversal, 0.125, 0.0, 1, o);
  CHECK(v.residual_l2() / v.norm_l2() < 1e-12);
}

TEST_CASE("gaussian beam profile") {
  Diameter d;
  BeamOptions o;
  o.grid = 256;
  const double h = 1.0 / 64.0;
  const TransversalBeam v(d.s.factor(1), d.leaf.transversal, h, 0.0, 1, o);
  // H' = -H^2, A' = -H A / 2 with H = i, A = 1 at the base point
  for (double u : {-0.8, -0.3, 0.0, 0.5, 0.9}) {
    const double sv = v.anchor() + u;
    CHECK(std::abs(v.riccati(sv) - 1.0 / cplx(u, -1.0)) < 1e-8);
    CHECK(std::abs(v.amplitude(sv) - std::pow(cplx(1.0, u), -0.5)) < 1e-8);
  }
  CHECK(v.min_imag_h() > 0.0);
  // |v|^2 integrates to one per unit length across the beam, so ||v||^2 is the chord length
  CHECK(v.norm_l2() == doctest::Approx(std::sqrt(2.0)).epsilon(0.02));
}

TEST_CASE("relative residual of the Gaussian beam decreases with h") {
  Diameter d;
  std::vector<double> rel;
  for (int k = 4; k <= 6; ++k) {
    const double h = std::ldexp(1.0, -k);
    const TransversalBeam v(d.s.factor(1), d.leaf.transversal, h, 0.0, 1);
    rel.push_back(v.residual_l2() * h * h / v.norm_l2());
  }
  CHECK(rel[1] < rel[0]);
  CHECK(rel[2] < rel[1]);
}

TEST_CASE("pairing and concentration with a vanishing potential") {
  Diameter d;
  screen_leaf(d.s, d.leaf);
  const ScalarField zero = ScalarField::expression(d.s, "0");
  BeamOptions bo;
  bo.grid = 96;
  const TransversalBeam vp(d.s.factor(1), d.leaf.transversal, 0.25, 0.0, 1, bo);
  const TransversalBeam vm(d.s.factor(1), d.leaf.transversal, 0.25, 0.0, -1, bo);
  const Quasimode wp = assemble_w(d.s, vp, 17), wm = assemble_w(d.s, vm, 17);
  CHECK(pairing(d.s, zero, wp, wm) == cplx(0.0, 0.0));

  ConcentrationOptions co;
  co.k_min = 2;
  co.k_max = 4;
  co.beam = bo;
  co.n1 = 17;
  const PairingResult r = concentration_test(d.s, d.leaf, zero, 0.0, 0.0, co);
  CHECK(r.target == cplx(0.0, 0.0));
  for (double dev : r.deviations) CHECK(dev == 0.0);
  CHECK(r.pass);
}

TEST_CASE("amplitude density") {
  const DensityResult one = amplitude_density_check("1", 0.0, 1.0, 0.0, 1.0, lambda_grid(-2.0, 2.0, 21));
  CHECK(one.sup_error < 1e-10);
  const double coarse = amplitude_density_check("z^2", 0.0, 1.0, 0.0, 1.0, lambda_grid(-2.0, 2.0, 3)).sup_error;
  const double fine = amplitude_density_check("z^2", 0.0, 1.0, 0.0, 1.0, lambda_grid(-2.0, 2.0, 5)).sup_error;
  CHECK(fine < coarse);
  const std::vector<double> g = lambda_grid(-2.0, 2.0, 5);
  CHECK(g == std::vector<double>{-2.0, -1.0, 0.0, 1.0, 2.0});
}
