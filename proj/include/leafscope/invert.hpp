#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SparseCore>
#include <nlohmann/json.hpp>

#include "leafscope/transform.hpp"

namespace leafscope {

// Parallel-beam data on uniform grids: theta_k = pi k / n_theta, p_j uniform on
// [-p_max, p_max]; values(k, j) integrates along {center + t w_k + p_j w_k^perp}.
struct Sinogram {
  std::vector<double> theta, p;
  Eigen::MatrixXd values;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  std::string provenance;

  static Sinogram layout(int n_theta, int n_p, double p_max, const Eigen::Vector2d& center = Eigen::Vector2d::Zero());
  double dp() const { return p.size() > 1 ? p[1] - p[0] : 0.0; }
  void validate() const;  // uniform grids, finite values
};

void write_sinogram(const Sinogram& s, const std::string& path);
Sinogram read_sinogram(const std::string& path, const Eigen::Vector2d& center = Eigen::Vector2d::Zero());

// Fills values by sample(theta, p), parallel over rows.
void synthesize(Sinogram& s, const std::function<double(double, double)>& sample);

struct ReconstructionReport {
  std::string method;
  Grid2D grid;
  std::optional<double> rel_l2;  // against ground truth on the interior mask
  double sup_norm = 0.0;
  std::vector<double> residuals;  // cgls: ||Ax - b|| per iteration
  int iterations = 0;
  bool diverged = false;
  std::vector<std::string> warnings;
  nlohmann::json meta = nlohmann::json::object();
  nlohmann::json to_json() const;
};

using Mask2 = std::function<bool(double, double)>;

// ||a - b|| / ||b|| over grid nodes where mask holds (all nodes without a mask).
double relative_l2(const Grid2D& a, const Grid2D& b, const Mask2& mask = {});

struct FbpOptions {
  double window_cutoff = 0.9;  // raised-cosine apodization, fraction of Nyquist
};

// Ramp-filtered backprojection onto the node layout of `target`.
ReconstructionReport fbp_invert(const Sinogram& s, const Grid2D& target, const FbpOptions& o = {});

// Discrete Radon operator on the bilinear node values of `layout`, one row per (theta, p).
Eigen::SparseMatrix<double, Eigen::RowMajor> radon_matrix(const Sinogram& geometry, const Grid2D& layout);

struct CglsOptions {
  int max_iters = 200;
  double reg = 0.0;         // Tikhonov weight on ||x||^2
  double tol = 1e-12;       // stop when ||A^T r - reg x|| <= tol ||A^T b||
  double guard = 10.0;      // abort if the residual grows past guard * initial
};

ReconstructionReport cgls_invert(const Eigen::SparseMatrix<double, Eigen::RowMajor>& a, const Eigen::VectorXd& b,
                                 const Grid2D& layout, const CglsOptions& o = {});

struct FourierSliceOptions {
  double spacing = 0.5;     // plane offset step along zeta
  LeafQuadrature quad{};
};

// f^(zeta) = int f e^{-i x.zeta} dx assembled from integrals over planes orthogonal to zeta.
cplx fourier_slice_recover(const MetricScene& scene, const ScalarField& f, const Vec& zeta,
                           const FourierSliceOptions& o = {});

// Direct n-D quadrature of the same transform over the bounding box (oracle for tests).
cplx direct_fourier(const MetricScene& scene, const ScalarField& f, const Vec& zeta, int nodes_per_axis);

// Nontangential chord through x in a factor scene, longest over a deterministic direction set.
std::optional<FactorGeodesic> find_factor_chord(const MetricScene& factor, const Vec& x, int n_dirs = 64,
                                                std::uint64_t seed = 0);

struct PipelineOptions {
  int n_theta = 180;
  int n_p = 256;
  int grid = 129;
  bool zero_data = false;
  int identity_stride = 97;  // radon_2d cross-check on every k-th sample
  double tol = 1e-10;
};

struct PipelineResult {
  ReconstructionReport rec;
  Grid2D truth;
  Sinogram sinogram;
  double identity_max_dev = 0.0;
  int identity_checked = 0;
  nlohmann::json to_json() const;
};

PipelineResult product_injectivity_pipeline(const MetricScene& scene, const ScalarField& f, const FactorGeodesic& g1,
                                            const FactorGeodesic& g2, const PipelineOptions& o = {});

}  // namespace leafscope
