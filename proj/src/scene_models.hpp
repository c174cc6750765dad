// Internal metric and boundary families behind MetricScene.
#pragma once

#include <memory>
#include <vector>

#include "leafscope/expression.hpp"
#include "leafscope/manifold.hpp"

namespace leafscope {

struct MetricScene::State {
  StructureTag tag = StructureTag::Euclidean;
  int dim = 0;
  int coord_dim = 0;
  Box chart;
  Box bbox;
  Vec periods;
  Vec interior;
  double scale = 1.0;
  double max_volume_density = 1.0;  // upper bound of sqrt(det g) on the bounding box
  nlohmann::json config;
  std::shared_ptr<const MetricModel> metric;
  std::shared_ptr<const BoundaryModel> boundary;
  std::vector<MetricScene> factors;
  int split = 0;
  int trapped_n = 0;
  double trapped_eps = 0.0;
};

namespace detail {

class EuclideanMetric final : public MetricModel {
 public:
  explicit EuclideanMetric(int n) : n_(n) {}
  int coord_dim() const override { return n_; }
  JetMatrix metric(std::span<const Jet> x) const override;
  void geodesic_rhs(const Vec& x, const Vec& xi, Vec& dx, Vec& dxi) const override;

 private:
  int n_;
};

// Round S^2 in spherical coordinates (theta, phi): g = diag(1, sin^2 theta).
class SphereMetric final : public MetricModel {
 public:
  int coord_dim() const override { return 2; }
  JetMatrix metric(std::span<const Jet> x) const override;
  void geodesic_rhs(const Vec& x, const Vec& xi, Vec& dx, Vec& dxi) const override;
};

class ProductMetric final : public MetricModel {
 public:
  ProductMetric(std::shared_ptr<const MetricModel> a, std::shared_ptr<const MetricModel> b)
      : a_(std::move(a)), b_(std::move(b)) {}
  int coord_dim() const override { return a_->coord_dim() + b_->coord_dim(); }
  JetMatrix metric(std::span<const Jet> x) const override;

 private:
  std::shared_ptr<const MetricModel> a_, b_;
};

// Tensor-product Catmull-Rom interpolant of gridded samples (C^1, cubic).
class GridFunction {
 public:
  GridFunction(Vec lo, Vec hi, std::vector<int> shape, std::vector<double> values);
  // value and gradient at x
  double eval(std::span<const double> x, double* grad) const;
  int dim() const { return static_cast<int>(shape_.size()); }

 private:
  Vec lo_, hi_;
  std::vector<int> shape_;
  std::vector<double> values_;
};

// c(x) * g_base(x) with c given as an expression or a grid.
class ConformalMetric final : public MetricModel {
 public:
  ConformalMetric(std::shared_ptr<const MetricModel> base, Expression factor)
      : base_(std::move(base)), expr_(std::move(factor)) {}
  ConformalMetric(std::shared_ptr<const MetricModel> base, std::shared_ptr<const GridFunction> grid)
      : base_(std::move(base)), grid_(std::move(grid)) {}
  int coord_dim() const override { return base_->coord_dim(); }
  JetMatrix metric(std::span<const Jet> x) const override;
  Jet factor(std::span<const Jet> x) const;

 private:
  std::shared_ptr<const MetricModel> base_;
  Expression expr_;
  std::shared_ptr<const GridFunction> grid_;
};

class ExpressionMetric final : public MetricModel {
 public:
  ExpressionMetric(int n, std::vector<Expression> entries) : n_(n), entries_(std::move(entries)) {}
  int coord_dim() const override { return n_; }
  JetMatrix metric(std::span<const Jet> x) const override;

 private:
  int n_;
  std::vector<Expression> entries_;  // row-major n x n
};

// R x S^{n-1} in ambient coordinates (t, y) with y on the unit sphere of R^n.
// The metric is the ambient identity restricted to tangent vectors.
class EmbeddedSphereProduct final : public MetricModel {
 public:
  explicit EmbeddedSphereProduct(int n) : n_(n) {}
  int coord_dim() const override { return n_ + 1; }
  JetMatrix metric(std::span<const Jet> x) const override;
  void geodesic_rhs(const Vec& x, const Vec& xi, Vec& dx, Vec& dxi) const override;

 private:
  int n_;
};

class BallBoundary final : public BoundaryModel {
 public:
  BallBoundary(Vec center, double radius) : c_(std::move(center)), r_(radius) {}
  Jet rho(std::span<const Jet> x) const override;
  Jet gauge(std::span<const Jet> x) const override;
  double scale() const override { return r_; }

 private:
  Vec c_;
  double r_;
};

class SuperellipseBoundary final : public BoundaryModel {
 public:
  SuperellipseBoundary(Vec center, Vec half, double p) : c_(std::move(center)), a_(std::move(half)), p_(p) {}
  Jet rho(std::span<const Jet> x) const override;
  Jet gauge(std::span<const Jet> x) const override;
  double scale() const override { return a_.minCoeff(); }

 private:
  Vec c_, a_;
  double p_;
};

// r(phi) = R (1 + delta cos(k phi)) in the plane.
class PerturbedDiskBoundary final : public BoundaryModel {
 public:
  PerturbedDiskBoundary(double r, double delta, int k) : r_(r), delta_(delta), k_(k) {}
  Jet rho(std::span<const Jet> x) const override;
  Jet gauge(std::span<const Jet> x) const override;
  double scale() const override { return r_ * (1.0 - std::abs(delta_)); }

 private:
  double r_, delta_;
  int k_;
};

// Geodesic ball of radius r around (theta_c, phi_c) on S^2.
class SphereCapBoundary final : public BoundaryModel {
 public:
  SphereCapBoundary(double theta_c, double phi_c, double r) : tc_(theta_c), pc_(phi_c), r_(r) {}
  Jet rho(std::span<const Jet> x) const override;
  Jet gauge(std::span<const Jet> x) const override;
  double scale() const override { return r_; }

 private:
  double tc_, pc_, r_;
};

// |theta - pi/2| <= w on S^2.
class SphereBandBoundary final : public BoundaryModel {
 public:
  explicit SphereBandBoundary(double w) : w_(w) {}
  Jet rho(std::span<const Jet> x) const override;
  Jet gauge(std::span<const Jet> x) const override;
  double scale() const override { return w_; }

 private:
  double w_;
};

class ExpressionBoundary final : public BoundaryModel {
 public:
  ExpressionBoundary(Expression rho, double scale) : expr_(std::move(rho)), scale_(scale) {}
  Jet rho(std::span<const Jet> x) const override { return expr_.eval(x); }
  double scale() const override { return scale_; }

 private:
  Expression expr_;
  double scale_;
};

class ProductBoundary final : public BoundaryModel {
 public:
  ProductBoundary(std::shared_ptr<const BoundaryModel> a, std::shared_ptr<const BoundaryModel> b,
                  int split, bool use_max, double p)
      : a_(std::move(a)), b_(std::move(b)), split_(split), max_(use_max), p_(p) {}
  Jet rho(std::span<const Jet> x) const override;
  Jet gauge(std::span<const Jet> x) const override;
  double scale() const override { return std::min(a_->scale(), b_->scale()); }

 private:
  std::shared_ptr<const BoundaryModel> a_, b_;
  int split_;
  bool max_;
  double p_;
};

// Moving-cap domain on R x S^{n-1}: the slice at time t removes the cap
// {y . f(t) > 1 - eps}, and the slab is closed by smooth end caps.
class TrappedBoundary final : public BoundaryModel {
 public:
  TrappedBoundary(int n, double eps) : n_(n), eps_(eps) {}
  Jet rho(std::span<const Jet> x) const override;
  Jet gauge(std::span<const Jet> x) const override;
  double scale() const override { return 1.0; }

  // f(t) with f = e_n outside [eps, 1 - eps] and f(1/2) = e_1.
  template <class T>
  std::array<T, kMaxDim> cap_center(const T& t) const;

  static constexpr double kEndCapExtent = 0.25;
  static constexpr double kPNorm = 8.0;

 private:
  int n_;
  double eps_;
};

}  // namespace detail
}  // namespace leafscope
