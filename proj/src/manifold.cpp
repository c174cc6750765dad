#include "leafscope/manifold.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "scene_models.hpp"

namespace leafscope {

using nlohmann::json;
using State = MetricScene::State;

std::string to_string(StructureTag tag) {
  switch (tag) {
    case StructureTag::Euclidean: return "euclidean";
    case StructureTag::Sphere: return "sphere";
    case StructureTag::Product: return "product";
    case StructureTag::Conformal: return "conformal";
    case StructureTag::Expression: return "expression";
    case StructureTag::TrappedExample: return "trapped_example";
  }
  return "unknown";
}

bool Box::contains(std::span<const double> x) const {
  for (int i = 0; i < lo.size(); ++i)
    if (x[static_cast<std::size_t>(i)] < lo[i] || x[static_cast<std::size_t>(i)] > hi[i]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// MetricScene accessors

int MetricScene::dim() const { return s_->dim; }
int MetricScene::coord_dim() const { return s_->coord_dim; }
StructureTag MetricScene::tag() const { return s_->tag; }
bool MetricScene::embedded() const { return s_->tag == StructureTag::TrappedExample; }
const Box& MetricScene::chart() const { return s_->chart; }
const Box& MetricScene::bounding_box() const { return s_->bbox; }
const Vec& MetricScene::periods() const { return s_->periods; }
const Vec& MetricScene::interior_point() const { return s_->interior; }
double MetricScene::length_scale() const { return s_->scale; }
double MetricScene::integration_step() const { return std::min(1e-3, 1e-3 * s_->scale); }
double MetricScene::default_t_cap() const { return 200.0 * s_->chart.diameter(); }
const json& MetricScene::config() const { return s_->config; }
const MetricModel& MetricScene::model() const { return *s_->metric; }
bool MetricScene::is_product() const { return s_->tag == StructureTag::Product; }
int MetricScene::split() const { return s_->split; }
int MetricScene::trapped_n() const { return s_->trapped_n; }
double MetricScene::trapped_eps() const { return s_->trapped_eps; }

const MetricScene& MetricScene::factor(int i) const {
  if (!is_product()) throw ConfigError("scene has no product structure");
  return s_->factors.at(static_cast<std::size_t>(i));
}

Vec MetricScene::trapped_cap_center(double t) const {
  if (!embedded()) throw ConfigError("scene is not a trapped_example");
  const detail::TrappedBoundary b(s_->trapped_n, s_->trapped_eps);
  const auto f = b.cap_center(t);
  Vec v(s_->trapped_n);
  for (int i = 0; i < s_->trapped_n; ++i) v[i] = f[static_cast<std::size_t>(i)];
  return v;
}

bool MetricScene::in_chart(std::span<const double> x) const { return s_->chart.contains(x); }

void MetricScene::wrap(Vec& x) const {
  for (int i = 0; i < s_->periods.size(); ++i) {
    const double p = s_->periods[i];
    if (p <= 0.0) continue;
    const double lo = s_->chart.lo[i];
    double r = std::fmod(x[i] - lo, p);
    if (r < 0.0) r += p;
    x[i] = lo + r;
  }
}

namespace {

std::array<Jet, kMaxDim> seed_jets(const Vec& x) {
  std::array<Jet, kMaxDim> j;
  for (int i = 0; i < x.size(); ++i) j[static_cast<std::size_t>(i)] = Jet::variable(x[i], i);
  return j;
}

}  // namespace

Mat MetricScene::metric(const Vec& x) const {
  const auto jx = seed_jets(x);
  const JetMatrix jg = s_->metric->metric(std::span<const Jet>(jx.data(), static_cast<std::size_t>(x.size())));
  Mat g(jg.n, jg.n);
  for (int i = 0; i < jg.n; ++i)
    for (int j = 0; j < jg.n; ++j) g(i, j) = jg(i, j).v;
  return g;
}

MetricDerivatives MetricScene::metric_derivatives(const Vec& x) const {
  const int n = coord_dim();
  const auto jx = seed_jets(x);
  const JetMatrix jg = s_->metric->metric(std::span<const Jet>(jx.data(), static_cast<std::size_t>(n)));
  MetricDerivatives out;
  out.g.resize(n, n);
  for (int k = 0; k < n; ++k) out.dg[static_cast<std::size_t>(k)].resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      out.g(i, j) = jg(i, j).v;
      for (int k = 0; k < n; ++k) out.dg[static_cast<std::size_t>(k)](i, j) = jg(i, j).d[static_cast<std::size_t>(k)];
    }
  return out;
}

double MetricScene::norm_covector(const Vec& x, const Vec& xi) const {
  if (embedded()) return xi.norm();
  return std::sqrt(xi.dot(metric(x).ldlt().solve(xi)));
}

void MetricScene::geodesic_rhs(const Vec& x, const Vec& xi, Vec& dx, Vec& dxi) const {
  s_->metric->geodesic_rhs(x, xi, dx, dxi);
}

Vec MetricScene::project_covector(const Vec& x, const Vec& xi) const {
  if (!embedded()) return xi;
  Vec out = xi;
  const int n = s_->trapped_n;
  const Vec y = x.segment(1, n);
  const double r2 = y.squaredNorm();
  out.segment(1, n) -= (xi.segment(1, n).dot(y) / r2) * y;
  return out;
}

double MetricScene::rho(const Vec& x) const {
  std::array<Jet, kMaxDim> jx;
  for (int i = 0; i < x.size(); ++i) jx[static_cast<std::size_t>(i)] = Jet(x[i]);
  return s_->boundary->rho(std::span<const Jet>(jx.data(), static_cast<std::size_t>(x.size()))).v;
}

BoundaryValue MetricScene::boundary(const Vec& x) const {
  const auto jx = seed_jets(x);
  const Jet r = s_->boundary->rho(std::span<const Jet>(jx.data(), static_cast<std::size_t>(x.size())));
  BoundaryValue out;
  out.rho = r.v;
  out.gradient.resize(x.size());
  for (int i = 0; i < x.size(); ++i) out.gradient[i] = r.d[static_cast<std::size_t>(i)];
  out.gradient = project_covector(x, out.gradient);
  return out;
}

Vec MetricScene::sample_point(CounterRng& rng) const {
  const Box& b = s_->bbox;
  for (int attempt = 0; attempt < 1000000; ++attempt) {
    Vec x(coord_dim());
    if (embedded()) {
      x[0] = rng.uniform(b.lo[0], b.hi[0]);
      x.segment(1, s_->trapped_n) = rng.unit_vector(s_->trapped_n);
      if (rho(x) <= 0.0) return x;
      continue;
    }
    for (int i = 0; i < x.size(); ++i) x[i] = rng.uniform(b.lo[i], b.hi[i]);
    const double u = rng.uniform();
    if (rho(x) > 0.0) continue;
    const double density = std::sqrt(std::max(metric(x).determinant(), 0.0));
    if (u * s_->max_volume_density <= density) return x;
  }
  throw NumericalError("rejection sampling of M failed");
}

Vec MetricScene::sample_unit_covector(const Vec& x, CounterRng& rng) const {
  if (embedded()) {
    for (;;) {
      Vec w(coord_dim());
      for (int i = 0; i < w.size(); ++i) w[i] = rng.normal();
      w = project_covector(x, w);
      const double nrm = w.norm();
      if (nrm > 1e-12) return w / nrm;
    }
  }
  const Vec omega = rng.unit_vector(coord_dim());
  const Eigen::SelfAdjointEigenSolver<Mat> es(metric(x));
  const Mat root = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  return root * omega;
}

// ---------------------------------------------------------------------------
// Operations

Christoffel christoffel(const MetricScene& scene, const Vec& x) {
  if (scene.embedded())
    throw ConfigError("christoffel: ambient-coordinate scenes have no chart Christoffel symbols");
  if (!scene.in_chart(std::span<const double>(x.data(), static_cast<std::size_t>(x.size()))))
    throw ConfigError("christoffel: point outside chart");
  const int n = scene.coord_dim();
  const MetricDerivatives md = scene.metric_derivatives(x);
  const Mat ginv = md.g.inverse();
  Christoffel G;
  G.n = n;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double acc = 0.0;
        for (int l = 0; l < n; ++l)
          acc += ginv(k, l) * (md.dg[static_cast<std::size_t>(i)](l, j) +
                               md.dg[static_cast<std::size_t>(j)](l, i) -
                               md.dg[static_cast<std::size_t>(l)](i, j));
        G(k, i, j) = 0.5 * acc;
        G(k, j, i) = 0.5 * acc;
      }
  return G;
}

BoundaryValue boundary_eval(const MetricScene& scene, const Vec& x) {
  if (!scene.embedded() && !scene.in_chart(std::span<const double>(x.data(), static_cast<std::size_t>(x.size()))))
    throw ConfigError("boundary_eval: point outside chart");
  return scene.boundary(x);
}

Vec outward_conormal(const MetricScene& scene, const Vec& x) {
  const BoundaryValue b = scene.boundary(x);
  const double nrm = scene.norm_covector(x, b.gradient);
  if (nrm <= 0.0) throw NumericalError("degenerate boundary gradient");
  return b.gradient / nrm;
}

ShapeOperator second_fundamental_form(const MetricScene& scene, const Vec& x, double boundary_tol) {
  if (scene.embedded())
    throw ConfigError("second_fundamental_form: ambient-coordinate scenes are not supported");
  const BoundaryValue b = boundary_eval(scene, x);
  if (std::abs(b.rho) > boundary_tol) throw ConfigError("second_fundamental_form: point not on boundary");
  const int n = scene.coord_dim();
  const Mat g = scene.metric(x);
  const double grad_norm = scene.norm_covector(x, b.gradient);

  // Hessian of rho: central differences of the exact gradient
  const double h = 1e-5 * scene.length_scale();
  Mat hess(n, n);
  for (int j = 0; j < n; ++j) {
    Vec xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const Vec gp = scene.boundary(xp).gradient;
    const Vec gm = scene.boundary(xm).gradient;
    hess.col(j) = (gp - gm) / (2 * h);
  }
  hess = 0.5 * (hess + hess.transpose()).eval();
  const Christoffel G = christoffel(scene, x);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) hess(i, j) -= G(k, i, j) * b.gradient[k];

  // g-orthonormal frame of ker d rho
  const Vec normal = g.ldlt().solve(b.gradient) / grad_norm;
  std::vector<Vec> frame;
  for (int i = 0; i < n && static_cast<int>(frame.size()) < n - 1; ++i) {
    Vec v = Vec::Zero(n);
    v[i] = 1.0;
    v -= (v.dot(g * normal)) * normal;
    for (const Vec& e : frame) v -= (v.dot(g * e)) * e;
    const double len = std::sqrt(v.dot(g * v));
    if (len > 1e-8) frame.push_back(v / len);
  }
  const int m = static_cast<int>(frame.size());
  ShapeOperator out;
  out.matrix.resize(m, m);
  for (int a = 0; a < m; ++a)
    for (int c = 0; c < m; ++c) out.matrix(a, c) = frame[a].dot(hess * frame[c]) / grad_norm;
  out.min_eigenvalue = m > 0 ? Eigen::SelfAdjointEigenSolver<Mat>(out.matrix).eigenvalues().minCoeff() : 0.0;
  out.strictly_convex = out.min_eigenvalue > kConvexityTol;
  return out;
}

namespace {

// Point reached after moving distance r from `from` along direction `dir`
// (chart straight line, or a great-circle arc for ambient-coordinate scenes).
Vec move_along(const MetricScene& scene, const Vec& from, const Vec& dir, double r) {
  if (!scene.embedded()) return from + r * dir;
  const int n = scene.trapped_n();
  Vec out = from;
  out[0] += r * dir[0];
  const Vec vy = dir.segment(1, n);
  const double speed = vy.norm();
  if (speed > 0.0) {
    const Vec y = from.segment(1, n);
    out.segment(1, n) = std::cos(r * speed) * y + std::sin(r * speed) * vy / speed;
  }
  return out;
}

}  // namespace

Vec boundary_point_along(const MetricScene& scene, const Vec& from, const Vec& dir_in) {
  Vec dir = scene.project_covector(from, dir_in);
  dir /= dir.norm();
  const double step = scene.length_scale() / 16.0;
  const double limit = 4.0 * scene.chart().diameter();
  double lo = 0.0, hi = -1.0;
  for (double r = step; r <= limit; r += step) {
    Vec p = move_along(scene, from, dir, r);
    scene.wrap(p);
    if (!scene.embedded() && !scene.in_chart(std::span<const double>(p.data(), static_cast<std::size_t>(p.size()))))
      throw ConfigError("M is not compactly contained in the chart along a sampled ray");
    if (scene.rho(p) > 0.0) {
      hi = r;
      break;
    }
    lo = r;
  }
  if (hi < 0.0) throw ConfigError("no boundary crossing found along a sampled ray");
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    Vec p = move_along(scene, from, dir, mid);
    scene.wrap(p);
    if (scene.rho(p) > 0.0) hi = mid;
    else lo = mid;
  }
  Vec p = move_along(scene, from, dir, 0.5 * (lo + hi));
  scene.wrap(p);
  return p;
}

ConvexityCheck check_convexity(const MetricScene& scene, int count, std::uint64_t seed) {
  ConvexityCheck out;
  out.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (int i = 0; i < count; ++i) {
    CounterRng rng(seed, static_cast<std::uint64_t>(i));
    const Vec dir = rng.unit_vector(scene.coord_dim());
    Vec p;
    try {
      p = boundary_point_along(scene, scene.interior_point(), dir);
    } catch (const ConfigError&) {
      ++out.skipped;
      continue;
    }
    const ShapeOperator s = second_fundamental_form(scene, p, 1e-8);
    out.min_eigenvalue = std::min(out.min_eigenvalue, s.min_eigenvalue);
    ++out.samples;
  }
  out.strictly_convex = out.samples > 0 && out.skipped == 0 && out.min_eigenvalue > kConvexityTol;
  return out;
}

MetricScene build_scene_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scene config '" + path + "'");
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    throw ConfigError("scene config '" + path + "': " + e.what());
  }
  return build_scene(cfg);
}

}  // namespace leafscope
