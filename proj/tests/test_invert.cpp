#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "common.hpp"
#include "leafscope/invert.hpp"

using namespace leafscope;
using test::scene;
using test::vec;

namespace {

// exp(-a |x - c|^2) and its line integrals along {t w + p w_perp}
struct Gauss {
  double a, cx, cy, amp = 1.0;
  double f(double x, double y) const { return amp * std::exp(-a * ((x - cx) * (x - cx) + (y - cy) * (y - cy))); }
  double line(double th, double p) const {
    const double q = p - (-std::sin(th) * cx + std::cos(th) * cy);
    return amp * std::sqrt(kPi / a) * std::exp(-a * q * q);
  }
};

Eigen::VectorXd flatten(const Grid2D& g) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(g.nx) * g.ny);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) x[static_cast<Eigen::Index>(i) * g.ny + j] = g.v(i, j);
  return x;
}

// grid node with the largest value inside the disk of radius r about (x, y)
Eigen::Vector2d local_argmax(const Grid2D& g, double x, double y, double r) {
  Eigen::Vector2d best(x, y);
  double top = -1e300;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      if (std::hypot(g.x(i) - x, g.y(j) - y) < r && g.v(i, j) > top) {
        top = g.v(i, j);
        best = {g.x(i), g.y(j)};
      }
  return best;
}

}  // namespace

TEST_CASE("filtered backprojection") {
  const Grid2D target = Grid2D::over(-1.5, 1.5, -1.5, 1.5, 129, 129);
  SUBCASE("zero sinogram") {
    Sinogram s = Sinogram::layout(180, 256, 1.5 * std::sqrt(2.0));
    const ReconstructionReport r = fbp_invert(s, target);
    CHECK(r.grid.v.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("Gaussian from analytic line integrals") {
    const Gauss g{4.0, 0.2, -0.1};
    Sinogram s = Sinogram::layout(180, 256, 1.5 * std::sqrt(2.0));
    synthesize(s, [&](double th, double p) { return g.line(th, p); });
    const ReconstructionReport r = fbp_invert(s, target);
    Grid2D truth = r.grid;
    truth.fill([&](double x, double y) { return g.f(x, y); });
    CHECK(relative_l2(r.grid, truth) < 0.03);
  }
  SUBCASE("two bumps are located to within a pixel") {
    const Gauss a{40.0, 0.5, 0.1}, b{40.0, -0.4, -0.6, 0.7};
    Sinogram s = Sinogram::layout(180, 256, 1.5 * std::sqrt(2.0));
    synthesize(s, [&](double th, double p) { return a.line(th, p) + b.line(th, p); });
    const ReconstructionReport r = fbp_invert(s, target);
    const Eigen::Vector2d pa = local_argmax(r.grid, a.cx, a.cy, 0.3), pb = local_argmax(r.grid, b.cx, b.cy, 0.3);
    CHECK(std::abs(pa.x() - a.cx) <= target.dx);
    CHECK(std::abs(pa.y() - a.cy) <= target.dy);
    CHECK(std::abs(pb.x() - b.cx) <= target.dx);
    CHECK(std::abs(pb.y() - b.cy) <= target.dy);
  }
}

TEST_CASE("radon_2d on a grid matches the analytic Gaussian") {
  const Gauss g{4.0, 0.1, 0.3};
  Grid2D h = Grid2D::over(-1.5, 1.5, -1.5, 1.5, 301, 301);
  h.fill([&](double x, double y) { return g.f(x, y); });
  for (double th : {0.0, 0.7, 2.0})
    for (double p : {-0.4, 0.0, 0.25}) CHECK(radon_2d(h, th, p) == doctest::Approx(g.line(th, p)).epsilon(1e-3));
}

TEST_CASE("cgls") {
  SUBCASE("zero data gives the zero image") {
    const Grid2D layout = Grid2D::over(-1.0, 1.0, -1.0, 1.0, 16, 16);
    const auto a = radon_matrix(Sinogram::layout(24, 24, std::sqrt(2.0)), layout);
    const ReconstructionReport r = cgls_invert(a, Eigen::VectorXd::Zero(a.rows()), layout);
    CHECK(r.grid.v.cwiseAbs().maxCoeff() == 0.0);
    CHECK_FALSE(r.diverged);
  }
  SUBCASE("consistent data on a 32^2 grid") {
    const Grid2D layout = Grid2D::over(-1.0, 1.0, -1.0, 1.0, 32, 32);
    Grid2D truth = layout;
    const Gauss g{6.0, 0.2, 0.0};
    truth.fill([&](double x, double y) { return g.f(x, y); });
    const auto a = radon_matrix(Sinogram::layout(64, 48, std::sqrt(2.0)), layout);
    const Eigen::VectorXd b = a * flatten(truth);
    const ReconstructionReport r = cgls_invert(a, b, layout);
    CHECK(relative_l2(r.grid, truth) < 0.05);
    for (std::size_t k = 1; k < r.residuals.size(); ++k) CHECK(r.residuals[k] <= r.residuals[k - 1] * (1.0 + 1e-12));
  }
  SUBCASE("small overdetermined system is solved to round-off") {
    const Grid2D layout = Grid2D::over(-1.0, 1.0, -1.0, 1.0, 8, 8);
    Grid2D truth = layout;
    truth.fill([](double x, double y) { return 1.0 + x - 0.5 * y * y; });
    const auto a = radon_matrix(Sinogram::layout(32, 24, std::sqrt(2.0)), layout);
    const Eigen::VectorXd b = a * flatten(truth);
    CglsOptions o;
    o.max_iters = 400;
    const ReconstructionReport r = cgls_invert(a, b, layout, o);
    CHECK(r.residuals.back() < 1e-6 * b.norm());
    CHECK(relative_l2(r.grid, truth) < 1e-6);
  }
  SUBCASE("Tikhonov weight shrinks the solution") {
    const Grid2D layout = Grid2D::over(-1.0, 1.0, -1.0, 1.0, 16, 16);
    Grid2D truth = layout;
    truth.fill([](double x, double y) { return std::exp(-4.0 * (x * x + y * y)); });
    const auto a = radon_matrix(Sinogram::layout(32, 24, std::sqrt(2.0)), layout);
    const Eigen::VectorXd b = a * flatten(truth);
    CglsOptions o;
    o.reg = 10.0;
    const double n0 = flatten(cgls_invert(a, b, layout).grid).norm();
    const double n1 = flatten(cgls_invert(a, b, layout, o).grid).norm();
    CHECK(n1 < n0);
  }
}

TEST_CASE("fourier slice recovery on a Gaussian") {
  const MetricScene s = scene("ball3_large");
  const ScalarField f = ScalarField::expression(s, "exp(-(x1^2 + x2^2 + x3^2))");
  const double c = std::pow(kPi, 1.5);
  CHECK(std::abs(fourier_slice_recover(s, f, vec({0.0, 0.0, 0.0})) - c) < 1e-3 * c);
  CHECK(std::abs(fourier_slice_recover(s, f, vec({1.0, 0.0, 0.0})) - c * std::exp(-0.25)) < 1e-3 * c);
  const ScalarField zero = ScalarField::expression(s, "0");
  CHECK(std::abs(fourier_slice_recover(s, zero, vec({0.3, 0.4, 0.0}))) == 0.0);
}

TEST_CASE("product pipeline") {
  const MetricScene s = scene("product_intervals");
  const auto c1 = find_factor_chord(s.factor(0), s.factor(0).interior_point());
  const auto c2 = find_factor_chord(s.factor(1), s.factor(1).interior_point());
  REQUIRE(c1.has_value());
  REQUIRE(c2.has_value());
  PipelineOptions o;
  o.n_theta = 60;
  o.n_p = 96;
  o.grid = 65;
  const ScalarField zero = ScalarField::expression(s, "0");
  CHECK(product_injectivity_pipeline(s, zero, *c1, *c2, o).rec.sup_norm == 0.0);
  o.zero_data = true;
  const ScalarField bump = ScalarField::expression(s, "exp(-5*(x1^2 + x2^2))");
  CHECK(product_injectivity_pipeline(s, bump, *c1, *c2, o).rec.sup_norm < 1e-2);
}

TEST_CASE("sinogram csv round trip") {
  Sinogram s = Sinogram::layout(7, 9, 1.3);
  const Gauss g{3.0, 0.1, 0.2};
  synthesize(s, [&](double th, double p) { return g.line(th, p) / 3.0; });
  const std::string path = (std::filesystem::temp_directory_path() / "leafscope_sino_roundtrip.csv").string();
  write_sinogram(s, path);
  const Sinogram r = read_sinogram(path);
  std::filesystem::remove(path);
  CHECK(r.theta == s.theta);
  CHECK(r.p == s.p);
  CHECK((r.values - s.values).cwiseAbs().maxCoeff() == 0.0);
}
