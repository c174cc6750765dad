#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "leafscope/leaf.hpp"

namespace leafscope {

inline constexpr double kMollifierBand = 1e-2;
inline constexpr double kRawBoundaryTol = 1e-12;

// Function on the chart, extended by zero outside M. Inside the band
// -band < rho <= 0 the mollified value is damped by a C^1 smoothstep.
class ScalarField {
 public:
  using Fn = std::function<double(const Vec&)>;

  ScalarField() = default;
  ScalarField(Fn f, std::string tag = "");
  ScalarField(const MetricScene& domain, Fn f, std::string tag = "", double band = kMollifierBand);

  static ScalarField zero(const MetricScene& domain);
  static ScalarField expression(const MetricScene& domain, const std::string& src, double band = kMollifierBand);

  double operator()(const Vec& x) const;  // mollified
  double raw(const Vec& x) const;         // sharp cutoff at dM (rho <= kRawBoundaryTol)
  double interior(const Vec& x) const { return f_(x); }

  const std::string& tag() const { return tag_; }
  double band() const { return band_; }
  bool has_domain() const { return domain_.has_value(); }
  ScalarField with_band(double band) const;
  ScalarField operator-(const ScalarField& other) const;
  ScalarField scaled(double c) const;

 private:
  Fn f_ = [](const Vec&) { return 0.0; };
  std::optional<MetricScene> domain_;
  std::string tag_;
  double band_ = kMollifierBand;
};

// Psi(z) = e^{-lambda z} with z = s + i t.
struct HoloAmplitude {
  cplx lambda{0.0, 0.0};
  cplx operator()(double s, double t) const { return std::exp(-lambda * cplx(s, t)); }
  HoloAmplitude operator*(const HoloAmplitude& o) const { return {lambda + o.lambda}; }
  // max |d Psi/ds + i d Psi/dt| by central differences on an n x n grid of K
  double cauchy_riemann_residual(double s0, double s1, double t0, double t1, int n) const;
};

struct TransformSample {
  std::string geometry;  // geodesic | leaf | line
  nlohmann::json params;
  cplx value{0.0, 0.0};
  cplx raw_value{0.0, 0.0};  // without mollification (when computed)
  int grid = 0;
  double est_error = 0.0;
  nlohmann::json to_json() const;
};

struct QuadratureOptions {
  double tol = 1e-6;
  int min_log2 = 4;
  int max_depth = 12;
};

// Dyadic composite Simpson: refine 2^k intervals until successive values agree to tol.
struct QuadResult {
  cplx value{0.0, 0.0};
  double est_error = 0.0;
  int intervals = 0;
};
QuadResult simpson_dyadic(const std::function<cplx(double)>& f, double a, double b, const QuadratureOptions& o = {});

// Integral of f along the M-part of the trace, with respect to arc length.
TransformSample xray_transform(const MetricScene& scene, const ScalarField& f, const GeodesicTrace& trace,
                               const QuadratureOptions& o = {});

struct LeafQuadrature {
  int n0 = 256;         // starting t grid and s scan resolution
  int max_n = 4096;     // outer (t) refinement limit
  double tol = 1e-6;
  bool allow_non_good = false;
};

// Integral of f(point(t, s)) Psi(s + i t) ds dt over the leaf core.
TransformSample leaf_transform(const MetricScene& scene, const ScalarField& f, const BicharLeaf& leaf,
                               const HoloAmplitude& psi, const LeafQuadrature& q = {});

// int_0^L e^{-2 lambda s} [ int e^{-2 i lambda t} q(t, gamma(s)) dt ] ds, nested adaptive quadrature.
// gamma is a geodesic of the transversal factor; s = 0 at its entry point.
TransformSample attenuated_transversal_transform(const MetricScene& scene, const ScalarField& q,
                                                 const GeodesicTrace& gamma, double lambda,
                                                 const QuadratureOptions& o = {});

// Bilinear grid function, zero outside [x0, x0 + (nx-1) dx] x [y0, y0 + (ny-1) dy].
struct Grid2D {
  double x0 = 0.0, y0 = 0.0, dx = 1.0, dy = 1.0;
  int nx = 0, ny = 0;
  Eigen::MatrixXd v;  // v(i, j) at (x0 + i dx, y0 + j dy)

  static Grid2D over(double xlo, double xhi, double ylo, double yhi, int nx, int ny);
  double x(int i) const { return x0 + i * dx; }
  double y(int j) const { return y0 + j * dy; }
  double operator()(double px, double py) const;
  template <class F>
  void fill(F&& f) {
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j) v(i, j) = f(x(i), y(j));
  }
};
void write_grid_csv(const Grid2D& g, const std::string& path);

// Line {t w + p w_perp + center}, w = (cos theta, sin theta), w_perp = (-sin theta, cos theta).
using Fn2 = std::function<double(double, double)>;
double radon_2d(const Fn2& h, const Box& support, double theta, double p, const QuadratureOptions& o = {},
                const Eigen::Vector2d& center = Eigen::Vector2d::Zero());
double radon_2d(const Grid2D& h, double theta, double p, const Eigen::Vector2d& center = Eigen::Vector2d::Zero());

// Chord of a factor scene, arc-length parametrized from its entry point.
struct FactorGeodesic {
  GeodesicTrace trace;
  double start = 0.0;   // trace time of the entry point
  double length = 0.0;  // T
  PhasePoint at(double y) const { return trace.phase_at(start + y); }
};
FactorGeodesic factor_geodesic(const MetricScene& factor, const PhasePoint& p0);

// h(y1, y2) = f(gamma_1(y1), gamma_2(y2)) on [0, T1] x [0, T2], zero elsewhere.
Fn2 product_pullback(const MetricScene& scene, const ScalarField& f, const FactorGeodesic& g1,
                     const FactorGeodesic& g2);
Grid2D product_pullback_grid(const MetricScene& scene, const ScalarField& f, const FactorGeodesic& g1,
                             const FactorGeodesic& g2, int nx, int ny);

// eta(t) = (gamma_1(t cos theta + a1), gamma_2(t sin theta + a2)), sampled where both
// parameters stay on the chords; l_minus/l_plus are the first entry and last exit of M.
GeodesicTrace tilted_geodesic(const MetricScene& scene, const FactorGeodesic& g1, const FactorGeodesic& g2,
                              double theta, const Eigen::Vector2d& a);

// Max deviation between a trace and the geodesic integrated from its first sample.
double geodesic_residual(const MetricScene& scene, const GeodesicTrace& trace);

// theta, p, value
void write_sinogram_csv(const std::vector<double>& theta, const std::vector<double>& p, const Eigen::MatrixXd& values,
                        const std::string& path);

}  // namespace leafscope
