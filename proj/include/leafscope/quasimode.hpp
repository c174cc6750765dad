#pragma once

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "leafscope/transform.hpp"

namespace leafscope {

enum class BeamKind { Gaussian, PlaneWave };

struct BeamOptions {
  int grid = 512;             // transversal nodes per axis (raised to 8 points per wavelength)
  double riccati_step = 1e-3;
  BeamKind kind = BeamKind::Gaussian;
};

// First-order Gaussian beam on a flat two-dimensional factor along the line
// gamma(s) = origin + s omega, s = 0 at the entry point:
//   v = (pi h)^{-1/4} A(s) exp(i k Theta),  Theta = s + H(s) n^2 / 2,  k = 1/h + i lambda,
// with H' = -H^2, A' = -H A / 2, and H = i, A = 1 at the trace's base point (time 0).
class TransversalBeam {
 public:
  TransversalBeam(const MetricScene& factor, const GeodesicTrace& gamma, double h, double lambda, int sign,
                  const BeamOptions& o = {});

  cplx operator()(const Vec& x) const;
  // (-Delta - k^2) v at x, from the closed-form derivatives of Theta and A.
  cplx residual_at(const Vec& x) const;

  double h() const { return h_; }
  double lambda() const { return lambda_; }
  int sign() const { return sign_; }
  BeamKind kind() const { return kind_; }
  double length() const { return length_; }
  double anchor() const { return anchor_; }  // s of the base point
  const Vec& origin() const { return origin_; }
  const Vec& direction() const { return omega_; }
  cplx riccati(double s) const;    // H(s)
  cplx amplitude(double s) const;  // A(s)
  double min_imag_h() const { return min_imag_h_; }

  // Trapezoid grid over the factor's bounding box, restricted to M0.
  const Grid2D& layout() const { return layout_; }
  double norm_l2() const { return norm_; }          // ||v||_{L^2(M0)}
  double residual_l2() const { return residual_; }  // ||(-Delta - k^2) v||_{L^2(M0)}
  const MetricScene& factor() const { return factor_; }

 private:
  void sample(double s, cplx& hv, cplx& av) const;

  MetricScene factor_;
  double h_, lambda_;
  int sign_;
  BeamKind kind_;
  Vec origin_, omega_;
  double length_ = 0.0;
  double anchor_ = 0.0, s_lo_ = 0.0, ds_ = 0.0;
  std::vector<cplx> hs_, as_;
  double min_imag_h_ = 0.0;
  Grid2D layout_;
  double norm_ = 0.0, residual_ = 0.0;
};

TransversalBeam gaussian_beam(const MetricScene& factor, const GeodesicTrace& gamma, double h, double lambda,
                              int sign, const BeamOptions& o = {});

// w_+ = e^{-i lambda x1} v_+, w_- = e^{+i lambda x1} v_- on a product scene R x M0.
struct Quasimode {
  std::shared_ptr<const TransversalBeam> v;
  double lambda = 0.0;
  int sign = 1;
  double x1_lo = 0.0, x1_hi = 0.0;
  int n1 = 0;
  double norm_m = 0.0;         // ||w||_{L^2(M)}
  double norm_cylinder = 0.0;  // over [x1_lo, x1_hi] x M0
  double residual = 0.0;       // ||P_{+-phi} w||_{L^2(M)} = h^2 ||(-Delta_0 - k^2) v|| (slab length)^{1/2}

  cplx operator()(const Vec& x) const;
  nlohmann::json to_json() const;
};

Quasimode assemble_w(const MetricScene& scene, const TransversalBeam& v, int n1 = 65);

// int_M f w_plus conj(w_minus) dV on the shared grid.
cplx pairing(const MetricScene& scene, const ScalarField& f, const Quasimode& wp, const Quasimode& wm);

struct PairingResult {
  std::vector<double> h;
  std::vector<cplx> values;
  cplx target{0.0, 0.0};
  cplx target_attenuated{0.0, 0.0};  // same limit from the nested transversal quadrature
  std::vector<double> deviations;         // |pairing - target|
  double scale = 1.0;                      // max(1, |target|)
  std::vector<double> scaled_deviations;  // deviations / scale; PASS uses these
  std::vector<double> norms_plus, norms_minus, residuals;
  bool pass = false;
  nlohmann::json to_json() const;
};

struct ConcentrationOptions {
  int k_min = 2, k_max = 7;  // h = 2^-k
  BeamOptions beam{};
  int n1 = 65;
};

PairingResult concentration_test(const MetricScene& scene, const BicharLeaf& leaf, const ScalarField& f,
                                 double lambda_plus, double lambda_minus, const ConcentrationOptions& o = {});

struct DensityResult {
  std::vector<double> lambdas;
  std::vector<cplx> coefficients;
  double sup_error = 0.0;
  int rank = 0;
  nlohmann::json to_json() const;
};

// Least-squares fit of F(z), z = s + i t, on K = [s0, s1] x [t0, t1] by span{e^{-lambda z}}.
DensityResult amplitude_density_check(const std::string& f_of_z, double s0, double s1, double t0, double t1,
                                      const std::vector<double>& lambdas, int fit_nodes = 41, int check_nodes = 81);

std::vector<double> lambda_grid(double lo, double hi, int count);

}  // namespace leafscope
