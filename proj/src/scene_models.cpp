#include "scene_models.hpp"

#include <cmath>
#include <type_traits>

namespace leafscope {

void MetricModel::geodesic_rhs(const Vec& x, const Vec& xi, Vec& dx, Vec& dxi) const {
  const int n = coord_dim();
  std::array<Jet, kMaxDim> jx;
  for (int i = 0; i < n; ++i) jx[i] = Jet::variable(x[i], i);
  const JetMatrix jg = metric(std::span<const Jet>(jx.data(), n));
  Mat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = jg(i, j).v;
  const Vec v = g.ldlt().solve(xi);
  dx = v;
  dxi.resize(n);
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) acc += jg(i, j).d[k] * v[i] * v[j];
    dxi[k] = 0.5 * acc;
  }
}

Jet BoundaryModel::gauge(std::span<const Jet> x) const {
  Jet g = rho(x) / scale() + 1.0;
  if (g.v < 0.0) return Jet(0.0);
  return g;
}

namespace detail {

namespace {
Jet sq(const Jet& a) { return a * a; }
}  // namespace

JetMatrix EuclideanMetric::metric(std::span<const Jet>) const {
  JetMatrix g;
  g.n = n_;
  for (int i = 0; i < n_; ++i) g(i, i) = Jet(1.0);
  return g;
}

void EuclideanMetric::geodesic_rhs(const Vec&, const Vec& xi, Vec& dx, Vec& dxi) const {
  dx = xi;
  dxi = Vec::Zero(n_);
}

JetMatrix SphereMetric::metric(std::span<const Jet> x) const {
  JetMatrix g;
  g.n = 2;
  g(0, 0) = Jet(1.0);
  g(1, 1) = sq(sin(x[0]));
  return g;
}

void SphereMetric::geodesic_rhs(const Vec& x, const Vec& xi, Vec& dx, Vec& dxi) const {
  const double s = std::sin(x[0]);
  const double c = std::cos(x[0]);
  const double vphi = xi[1] / (s * s);
  dx.resize(2);
  dx[0] = xi[0];
  dx[1] = vphi;
  dxi.resize(2);
  dxi[0] = s * c * vphi * vphi;
  dxi[1] = 0.0;
}

JetMatrix ProductMetric::metric(std::span<const Jet> x) const {
  const int na = a_->coord_dim();
  const int nb = b_->coord_dim();
  const JetMatrix ga = a_->metric(x.subspan(0, na));
  const JetMatrix gb = b_->metric(x.subspan(na, nb));
  JetMatrix g;
  g.n = na + nb;
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < na; ++j) g(i, j) = ga(i, j);
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nb; ++j) g(na + i, na + j) = gb(i, j);
  return g;
}

GridFunction::GridFunction(Vec lo, Vec hi, std::vector<int> shape, std::vector<double> values)
    : lo_(std::move(lo)), hi_(std::move(hi)), shape_(std::move(shape)), values_(std::move(values)) {
  std::size_t total = 1;
  for (int s : shape_) {
    if (s < 2) throw ConfigError("grid shape entries must be >= 2");
    total *= static_cast<std::size_t>(s);
  }
  if (total != values_.size()) throw ConfigError("grid values do not match shape");
  if (lo_.size() != static_cast<int>(shape_.size()) || hi_.size() != lo_.size())
    throw ConfigError("grid lo/hi do not match shape");
}

double GridFunction::eval(std::span<const double> x, double* grad) const {
  const int n = dim();
  std::array<int, kMaxDim> base{};
  std::array<std::array<double, 4>, kMaxDim> w{}, dw{};
  for (int d = 0; d < n; ++d) {
    const double h = (hi_[d] - lo_[d]) / (shape_[d] - 1);
    const double pos = (x[d] - lo_[d]) / h;
    const int i = std::clamp(static_cast<int>(std::floor(pos)), 0, shape_[d] - 2);
    const double u = pos - i;
    base[d] = i;
    const double u2 = u * u, u3 = u2 * u;
    w[d] = {0.5 * (-u3 + 2 * u2 - u), 0.5 * (3 * u3 - 5 * u2 + 2), 0.5 * (-3 * u3 + 4 * u2 + u),
            0.5 * (u3 - u2)};
    dw[d] = {0.5 * (-3 * u2 + 4 * u - 1) / h, 0.5 * (9 * u2 - 10 * u) / h,
             0.5 * (-9 * u2 + 8 * u + 1) / h, 0.5 * (3 * u2 - 2 * u) / h};
  }
  double value = 0.0;
  std::array<double, kMaxDim> g{};
  int combos = 1;
  for (int d = 0; d < n; ++d) combos *= 4;
  for (int c = 0; c < combos; ++c) {
    std::size_t flat = 0;
    double weight = 1.0;
    std::array<int, kMaxDim> sel{};
    int rem = c;
    for (int d = 0; d < n; ++d) {
      sel[d] = rem % 4;
      rem /= 4;
      const int idx = std::clamp(base[d] - 1 + sel[d], 0, shape_[d] - 1);
      flat = flat * static_cast<std::size_t>(shape_[d]) + static_cast<std::size_t>(idx);
      weight *= w[d][sel[d]];
    }
    const double f = values_[flat];
    value += weight * f;
    for (int d = 0; d < n; ++d) {
      double wd = dw[d][sel[d]];
      for (int e = 0; e < n; ++e)
        if (e != d) wd *= w[e][sel[e]];
      g[d] += wd * f;
    }
  }
  if (grad)
    for (int d = 0; d < n; ++d) grad[d] = g[d];
  return value;
}

Jet ConformalMetric::factor(std::span<const Jet> x) const {
  if (grid_) {
    std::array<double, kMaxDim> xv{}, grad{};
    for (std::size_t i = 0; i < x.size(); ++i) xv[i] = x[i].v;
    Jet r(grid_->eval(std::span<const double>(xv.data(), x.size()), grad.data()));
    for (std::size_t i = 0; i < x.size(); ++i)
      for (int k = 0; k < kMaxDim; ++k) r.d[k] += grad[i] * x[i].d[k];
    return r;
  }
  return expr_.eval(x);
}

JetMatrix ConformalMetric::metric(std::span<const Jet> x) const {
  JetMatrix g = base_->metric(x);
  const Jet c = factor(x);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) g(i, j) = g(i, j) * c;
  return g;
}

JetMatrix ExpressionMetric::metric(std::span<const Jet> x) const {
  JetMatrix g;
  g.n = n_;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) g(i, j) = entries_[static_cast<std::size_t>(i * n_ + j)].eval(x);
  return g;
}

JetMatrix EmbeddedSphereProduct::metric(std::span<const Jet>) const {
  JetMatrix g;
  g.n = n_ + 1;
  for (int i = 0; i <= n_; ++i) g(i, i) = Jet(1.0);
  return g;
}

void EmbeddedSphereProduct::geodesic_rhs(const Vec& x, const Vec& xi, Vec& dx, Vec& dxi) const {
  dx = xi;
  dxi.resize(n_ + 1);
  dxi[0] = 0.0;
  double speed2 = 0.0, r2 = 0.0;
  for (int i = 1; i <= n_; ++i) {
    speed2 += xi[i] * xi[i];
    r2 += x[i] * x[i];
  }
  for (int i = 1; i <= n_; ++i) dxi[i] = -speed2 / r2 * x[i];
}

Jet BallBoundary::rho(std::span<const Jet> x) const {
  Jet r2(0.0);
  for (std::size_t i = 0; i < x.size(); ++i) r2 += sq(x[i] - c_[static_cast<int>(i)]);
  if (x.size() == 1) return abs(x[0] - c_[0]) - r_;
  return sqrt(r2) - r_;
}

Jet BallBoundary::gauge(std::span<const Jet> x) const { return rho(x) / r_ + 1.0; }

Jet SuperellipseBoundary::gauge(std::span<const Jet> x) const {
  Jet s(0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const int k = static_cast<int>(i);
    s += pow(abs((x[i] - c_[k]) / a_[k]), p_);
  }
  return pow(s, 1.0 / p_);
}

Jet SuperellipseBoundary::rho(std::span<const Jet> x) const { return (gauge(x) - 1.0) * scale(); }

Jet PerturbedDiskBoundary::gauge(std::span<const Jet> x) const {
  const Jet r = sqrt(sq(x[0]) + sq(x[1]));
  const Jet phi = atan2(x[1], x[0]);
  const Jet boundary = (cos(phi * static_cast<double>(k_)) * delta_ + 1.0) * r_;
  return r / boundary;
}

Jet PerturbedDiskBoundary::rho(std::span<const Jet> x) const {
  const Jet r = sqrt(sq(x[0]) + sq(x[1]));
  const Jet phi = atan2(x[1], x[0]);
  return r - (cos(phi * static_cast<double>(k_)) * delta_ + 1.0) * r_;
}

Jet SphereCapBoundary::rho(std::span<const Jet> x) const {
  const Jet st = sin(x[0]);
  const Jet dot = st * cos(x[1]) * (std::sin(tc_) * std::cos(pc_)) +
                  st * sin(x[1]) * (std::sin(tc_) * std::sin(pc_)) + cos(x[0]) * std::cos(tc_);
  return acos(dot) - r_;
}

Jet SphereCapBoundary::gauge(std::span<const Jet> x) const { return rho(x) / r_ + 1.0; }

Jet SphereBandBoundary::rho(std::span<const Jet> x) const { return abs(x[0] - kPi / 2) - w_; }

Jet SphereBandBoundary::gauge(std::span<const Jet> x) const { return abs(x[0] - kPi / 2) / w_; }

Jet ProductBoundary::rho(std::span<const Jet> x) const {
  if (max_) {
    const Jet ra = a_->rho(x.subspan(0, split_));
    const Jet rb = b_->rho(x.subspan(split_));
    return ra.v >= rb.v ? ra : rb;
  }
  return (gauge(x) - 1.0) * scale();
}

Jet ProductBoundary::gauge(std::span<const Jet> x) const {
  const Jet ga = a_->gauge(x.subspan(0, split_));
  const Jet gb = b_->gauge(x.subspan(split_));
  if (max_) return ga.v >= gb.v ? ga : gb;
  return pow(pow(ga, p_) + pow(gb, p_), 1.0 / p_);
}

template <class T>
std::array<T, kMaxDim> TrappedBoundary::cap_center(const T& t) const {
  using std::cos, std::sin;
  std::array<T, kMaxDim> f{};
  for (auto& c : f) c = T(0.0);
  const int en = n_ - 1, e2 = 1, e1 = 0;
  const double tv = [&] {
    if constexpr (std::is_same_v<T, Jet>) return t.v;
    else return t;
  }();
  const double b[4] = {eps_, 0.5 * (eps_ + 0.5), 0.5, 1.0 - eps_};
  const int pts[4] = {en, e2, e1, en};
  if (tv <= b[0] || tv >= b[3]) {
    f[static_cast<std::size_t>(en)] = T(1.0);
    return f;
  }
  int k = 0;
  while (k < 2 && tv >= b[k + 1]) ++k;
  const T u = (t - b[k]) / (b[k + 1] - b[k]);
  // smootherstep keeps f twice differentiable across the junctions
  const T s = u * u * u * (u * (u * 6.0 - 15.0) + 10.0);
  const T alpha = s * (kPi / 2);
  f[static_cast<std::size_t>(pts[k])] = f[static_cast<std::size_t>(pts[k])] + cos(alpha);
  f[static_cast<std::size_t>(pts[k + 1])] = f[static_cast<std::size_t>(pts[k + 1])] + sin(alpha);
  return f;
}

template std::array<double, kMaxDim> TrappedBoundary::cap_center<double>(const double&) const;

Jet TrappedBoundary::gauge(std::span<const Jet> x) const {
  const Jet u1 = abs(x[0] - 0.5) / (0.5 + kEndCapExtent);
  const auto f = cap_center(x[0]);
  Jet dot(0.0);
  for (int i = 0; i < n_; ++i) dot += x[static_cast<std::size_t>(i + 1)] * f[static_cast<std::size_t>(i)];
  const Jet u2 = (dot + 1.0) / (2.0 - eps_);
  return pow(pow(u1, kPNorm) + pow(u2, kPNorm), 1.0 / kPNorm);
}

Jet TrappedBoundary::rho(std::span<const Jet> x) const { return gauge(x) - 1.0; }

}  // namespace detail
}  // namespace leafscope
