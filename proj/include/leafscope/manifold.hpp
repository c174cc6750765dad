#pragma once

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "leafscope/jet.hpp"
#include "leafscope/rng.hpp"
#include "leafscope/types.hpp"

namespace leafscope {

enum class StructureTag { Euclidean, Sphere, Product, Conformal, Expression, TrappedExample };

std::string to_string(StructureTag tag);

// Axis-aligned box in chart coordinates.
struct Box {
  Vec lo, hi;
  bool contains(std::span<const double> x) const;
  double diameter() const { return (hi - lo).norm(); }
};

// Symmetric n x n metric entries as jets (value plus first coordinate derivatives).
struct JetMatrix {
  int n = 0;
  std::array<Jet, kMaxDim * kMaxDim> a{};
  Jet& operator()(int i, int j) { return a[static_cast<std::size_t>(i * kMaxDim + j)]; }
  const Jet& operator()(int i, int j) const { return a[static_cast<std::size_t>(i * kMaxDim + j)]; }
};

// Metric family behind a scene. Implementations evaluate on jet coordinates,
// which yields exact first derivatives of the metric for free.
class MetricModel {
 public:
  virtual ~MetricModel() = default;
  virtual int coord_dim() const = 0;
  virtual JetMatrix metric(std::span<const Jet> x) const = 0;

  // Right-hand side of the unit-speed cogeodesic system for H = |xi|^2_g / 2.
  // The default uses metric jets; models living in ambient coordinates override it.
  virtual void geodesic_rhs(const Vec& x, const Vec& xi, Vec& dx, Vec& dxi) const;
};

// Boundary description: M = {rho <= 0}. `gauge` is a nonnegative function with
// M = {gauge <= 1}, used to combine factor boundaries of product scenes.
class BoundaryModel {
 public:
  virtual ~BoundaryModel() = default;
  virtual Jet rho(std::span<const Jet> x) const = 0;
  virtual Jet gauge(std::span<const Jet> x) const;
  // Length over which rho changes by one gauge unit; also the injectivity-scale proxy.
  virtual double scale() const = 0;
};

struct Christoffel {
  int n = 0;
  std::array<double, kMaxDim * kMaxDim * kMaxDim> a{};
  // Gamma^k_{ij}
  double& operator()(int k, int i, int j) {
    return a[static_cast<std::size_t>((k * kMaxDim + i) * kMaxDim + j)];
  }
  double operator()(int k, int i, int j) const {
    return a[static_cast<std::size_t>((k * kMaxDim + i) * kMaxDim + j)];
  }
};

struct BoundaryValue {
  double rho = 0.0;
  Vec gradient;  // d rho as a covector in chart coordinates
  bool inside() const { return rho <= 0.0; }
};

struct ShapeOperator {
  Mat matrix;  // second fundamental form in a g-orthonormal frame of the tangent space of dM
  double min_eigenvalue = 0.0;
  bool strictly_convex = false;
};

struct MetricDerivatives {
  Mat g;
  std::array<Mat, kMaxDim> dg;  // dg[k] = d g / d x_k
};

// Immutable Riemannian scene: single chart, metric, boundary level set.
// Copies share the underlying (immutable) state and are safe across threads.
class MetricScene {
 public:
  struct State;

  MetricScene() = default;
  explicit MetricScene(std::shared_ptr<const State> state) : s_(std::move(state)) {}

  int dim() const;        // manifold dimension n
  int coord_dim() const;  // number of chart coordinates (n + 1 for ambient-coordinate scenes)
  StructureTag tag() const;
  bool embedded() const;  // trapped_example lives in ambient coordinates of R x S^{n-1}

  const Box& chart() const;
  const Box& bounding_box() const;  // box containing M
  const Vec& periods() const;       // 0 for non-periodic coordinates
  const Vec& interior_point() const;
  double length_scale() const;
  double integration_step() const;
  double default_t_cap() const;  // 200 x chart diameter
  const nlohmann::json& config() const;

  bool in_chart(std::span<const double> x) const;
  void wrap(Vec& x) const;  // reduce periodic coordinates into the chart

  Mat metric(const Vec& x) const;
  MetricDerivatives metric_derivatives(const Vec& x) const;
  double norm_covector(const Vec& x, const Vec& xi) const;  // |xi|_g
  void geodesic_rhs(const Vec& x, const Vec& xi, Vec& dx, Vec& dxi) const;

  // Projects a covector onto the cotangent space of the manifold at x
  // (identity for chart scenes).
  Vec project_covector(const Vec& x, const Vec& xi) const;

  double rho(const Vec& x) const;
  BoundaryValue boundary(const Vec& x) const;

  // Product structure: factor scenes and the coordinate split index.
  bool is_product() const;
  const MetricScene& factor(int i) const;
  int split() const;

  // trapped_example parameters
  int trapped_n() const;
  double trapped_eps() const;
  Vec trapped_cap_center(double t) const;  // f(t) on S^{n-1}

  // Volume-uniform point of M and a g-uniform unit covector at it.
  Vec sample_point(CounterRng& rng) const;
  Vec sample_unit_covector(const Vec& x, CounterRng& rng) const;

  const MetricModel& model() const;

 private:
  std::shared_ptr<const State> s_;
};

// Builds a scene from its structured description; throws ConfigError on
// malformed configs, non-positive-definite metric samples, or a degenerate boundary.
MetricScene build_scene(const nlohmann::json& config);
MetricScene build_scene_file(const std::string& path);

Christoffel christoffel(const MetricScene& scene, const Vec& x);
BoundaryValue boundary_eval(const MetricScene& scene, const Vec& x);

// Outward unit conormal at x (covector with |nu|_g = 1).
Vec outward_conormal(const MetricScene& scene, const Vec& x);

inline constexpr double kBoundaryTol = 1e-6;
inline constexpr double kConvexityTol = 1e-6;

ShapeOperator second_fundamental_form(const MetricScene& scene, const Vec& x,
                                      double boundary_tol = kBoundaryTol);

// Point of dM reached from `from` (inside M) along the chart ray with direction `dir`.
Vec boundary_point_along(const MetricScene& scene, const Vec& from, const Vec& dir);

// Samples `count` boundary points and reports whether every sample is strictly convex.
struct ConvexityCheck {
  bool strictly_convex = false;
  double min_eigenvalue = 0.0;
  int samples = 0;
  int skipped = 0;  // rays from the interior point that never reach dM inside the chart
};
ConvexityCheck check_convexity(const MetricScene& scene, int count, std::uint64_t seed);

}  // namespace leafscope
