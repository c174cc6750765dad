// Scene construction from structured configs.
#include <cmath>

#include "scene_models.hpp"

namespace leafscope {

using nlohmann::json;
using State = MetricScene::State;

namespace {

Vec vec_from(const json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + " must be an array of numbers");
  Vec v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(what + " must be an array of numbers");
    v[static_cast<int>(i)] = j[i].get<double>();
  }
  return v;
}

double number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return j[key].get<double>();
}

double required_number(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing '") + key + "'");
  return number(j, key, 0.0);
}

Vec concat(const Vec& a, const Vec& b) {
  Vec v(a.size() + b.size());
  v << a, b;
  return v;
}

Box inflate(const Box& b, double margin) {
  Box out = b;
  out.lo.array() -= margin;
  out.hi.array() += margin;
  return out;
}

std::shared_ptr<State> build_state(const json& cfg);
void validate(State& s);

// Boundary for flat/expression coordinates; fills bbox and interior point.
void euclidean_boundary(State& s, const json& b) {
  const int n = s.coord_dim;
  const std::string kind = b.value("kind", "");
  Vec center = b.contains("center") ? vec_from(b["center"], "boundary.center") : Vec(Vec::Zero(n));
  if (center.size() != n) throw ConfigError("boundary.center has wrong dimension");
  if (kind == "ball" || kind == "interval") {
    const double r = kind == "ball" ? required_number(b, "radius") : required_number(b, "half_width");
    if (r <= 0.0) throw ConfigError("boundary radius must be positive");
    if (kind == "interval" && n != 1) throw ConfigError("interval boundary needs dim 1");
    s.boundary = std::make_shared<detail::BallBoundary>(center, r);
    s.bbox = {center.array() - r, center.array() + r};
    s.interior = center;
  } else if (kind == "superellipse") {
    const Vec half = vec_from(b.at("half_widths"), "boundary.half_widths");
    if (half.size() != n || half.minCoeff() <= 0.0) throw ConfigError("bad superellipse half_widths");
    const double p = number(b, "p", 8.0);
    if (p < 2.0) throw ConfigError("superellipse p must be >= 2");
    s.boundary = std::make_shared<detail::SuperellipseBoundary>(center, half, p);
    s.bbox = {center - half, center + half};
    s.interior = center;
  } else if (kind == "perturbed_disk") {
    if (n != 2) throw ConfigError("perturbed_disk needs dim 2");
    const double r = required_number(b, "radius");
    const double delta = number(b, "delta", 0.05);
    const int k = static_cast<int>(number(b, "k", 3));
    if (r <= 0.0 || std::abs(delta) >= 1.0) throw ConfigError("bad perturbed_disk parameters");
    s.boundary = std::make_shared<detail::PerturbedDiskBoundary>(r, delta, k);
    const double rmax = r * (1.0 + std::abs(delta));
    s.bbox = {Vec::Constant(2, -rmax), Vec::Constant(2, rmax)};
    s.interior = Vec::Zero(2);
  } else if (kind == "expression") {
    s.boundary = std::make_shared<detail::ExpressionBoundary>(
        Expression::over_coordinates(b.at("rho").get<std::string>(), n), number(b, "scale", 1.0));
    if (!b.contains("bounds")) throw ConfigError("expression boundary needs 'bounds'");
    s.bbox = {vec_from(b["bounds"].at("lo"), "bounds.lo"), vec_from(b["bounds"].at("hi"), "bounds.hi")};
    s.interior = vec_from(b.at("interior"), "boundary.interior");
  } else {
    throw ConfigError("unknown boundary kind '" + kind + "'");
  }
}

std::shared_ptr<State> build_euclidean(const json& cfg) {
  auto s = std::make_shared<State>();
  s->tag = StructureTag::Euclidean;
  s->dim = s->coord_dim = static_cast<int>(required_number(cfg, "dim"));
  if (s->dim < 1 || s->dim > kMaxDim) throw ConfigError("euclidean dim out of range");
  s->metric = std::make_shared<detail::EuclideanMetric>(s->dim);
  euclidean_boundary(*s, cfg.at("boundary"));
  s->periods = Vec::Zero(s->dim);
  return s;
}

std::shared_ptr<State> build_sphere(const json& cfg) {
  auto s = std::make_shared<State>();
  s->tag = StructureTag::Sphere;
  s->dim = s->coord_dim = 2;
  s->metric = std::make_shared<detail::SphereMetric>();
  const double pole = number(cfg, "pole_margin", 1e-3);
  s->chart = {Vec(2), Vec(2)};
  s->chart.lo << pole, -kPi;
  s->chart.hi << kPi - pole, kPi;
  s->periods = Vec(2);
  s->periods << 0.0, 2 * kPi;
  const json& b = cfg.at("boundary");
  const std::string kind = b.value("kind", "");
  if (kind == "cap") {
    const Vec c = vec_from(b.at("center"), "cap.center");
    const double r = required_number(b, "radius");
    if (c.size() != 2 || r <= 0.0 || c[0] - r <= pole || c[0] + r >= kPi - pole)
      throw ConfigError("sphere cap must stay away from the chart poles");
    s->boundary = std::make_shared<detail::SphereCapBoundary>(c[0], c[1], r);
    // bounding box from the boundary circle
    const Eigen::Vector3d cc(std::sin(c[0]) * std::cos(c[1]), std::sin(c[0]) * std::sin(c[1]), std::cos(c[0]));
    Eigen::Vector3d u = cc.cross(Eigen::Vector3d::UnitZ());
    if (u.norm() < 1e-9) u = Eigen::Vector3d::UnitX();
    u.normalize();
    const Eigen::Vector3d w = cc.cross(u);
    Box bb{Vec::Constant(2, 1e9), Vec::Constant(2, -1e9)};
    for (int k = 0; k < 1440; ++k) {
      const double a = 2 * kPi * k / 1440.0;
      const Eigen::Vector3d p = std::cos(r) * cc + std::sin(r) * (std::cos(a) * u + std::sin(a) * w);
      Vec q(2);
      q << std::acos(std::clamp(p.z(), -1.0, 1.0)), std::atan2(p.y(), p.x());
      if (q[1] - c[1] > kPi) q[1] -= 2 * kPi;
      if (q[1] - c[1] < -kPi) q[1] += 2 * kPi;
      bb.lo = bb.lo.cwiseMin(q);
      bb.hi = bb.hi.cwiseMax(q);
    }
    s->bbox = inflate(bb, 1e-3);
    s->interior = c;
  } else if (kind == "band") {
    const double w = required_number(b, "half_width");
    if (w <= 0.0 || w >= kPi / 2 - pole) throw ConfigError("band half_width must stay away from the poles");
    s->boundary = std::make_shared<detail::SphereBandBoundary>(w);
    s->bbox = {Vec(2), Vec(2)};
    s->bbox.lo << kPi / 2 - w, -kPi;
    s->bbox.hi << kPi / 2 + w, kPi;
    s->interior = Vec(2);
    s->interior << kPi / 2, 0.0;
  } else {
    throw ConfigError("unknown sphere boundary kind '" + kind + "'");
  }
  s->scale = s->boundary->scale();
  return s;
}

std::shared_ptr<State> build_product(const json& cfg) {
  const json& f = cfg.at("factors");
  if (!f.is_array() || f.size() != 2) throw ConfigError("product needs exactly two factors");
  auto a = build_state(f[0]);
  auto b = build_state(f[1]);
  if (a->tag == StructureTag::TrappedExample || b->tag == StructureTag::TrappedExample)
    throw ConfigError("trapped_example cannot be a product factor");
  validate(*a);
  validate(*b);
  auto s = std::make_shared<State>();
  s->tag = StructureTag::Product;
  s->dim = a->dim + b->dim;
  s->coord_dim = a->coord_dim + b->coord_dim;
  if (s->coord_dim > kMaxDim) throw ConfigError("product dimension too large");
  s->split = a->coord_dim;
  s->metric = std::make_shared<detail::ProductMetric>(a->metric, b->metric);
  const std::string combine = cfg.value("combine", "pnorm");
  if (combine != "pnorm" && combine != "max") throw ConfigError("combine must be 'pnorm' or 'max'");
  s->boundary = std::make_shared<detail::ProductBoundary>(a->boundary, b->boundary, s->split,
                                                          combine == "max", number(cfg, "p", 8.0));
  s->bbox = {concat(a->bbox.lo, b->bbox.lo), concat(a->bbox.hi, b->bbox.hi)};
  s->chart = {concat(a->chart.lo, b->chart.lo), concat(a->chart.hi, b->chart.hi)};
  s->periods = concat(a->periods, b->periods);
  s->interior = concat(a->interior, b->interior);
  s->max_volume_density = a->max_volume_density * b->max_volume_density;
  s->factors = {MetricScene(a), MetricScene(b)};
  return s;
}

std::shared_ptr<State> build_conformal(const json& cfg) {
  auto base = build_state(cfg.at("base"));
  if (base->tag == StructureTag::TrappedExample) throw ConfigError("conformal base cannot be trapped_example");
  auto s = std::make_shared<State>(*base);
  s->tag = StructureTag::Conformal;
  s->factors.clear();
  const json& c = cfg.at("factor");
  if (c.is_string()) {
    s->metric = std::make_shared<detail::ConformalMetric>(
        base->metric, Expression::over_coordinates(c.get<std::string>(), base->coord_dim));
  } else if (c.is_object() && c.contains("grid")) {
    const json& g = c["grid"];
    std::vector<int> shape = g.at("shape").get<std::vector<int>>();
    auto grid = std::make_shared<detail::GridFunction>(vec_from(g.at("lo"), "grid.lo"), vec_from(g.at("hi"), "grid.hi"),
                                                       shape, g.at("values").get<std::vector<double>>());
    if (grid->dim() != base->coord_dim) throw ConfigError("conformal grid dimension mismatch");
    s->metric = std::make_shared<detail::ConformalMetric>(base->metric, grid);
  } else {
    throw ConfigError("conformal factor must be an expression string or {grid: ...}");
  }
  s->max_volume_density = 0.0;  // recomputed below
  return s;
}

std::shared_ptr<State> build_expression(const json& cfg) {
  auto s = std::make_shared<State>();
  s->tag = StructureTag::Expression;
  s->dim = s->coord_dim = static_cast<int>(required_number(cfg, "dim"));
  const int n = s->dim;
  if (n < 1 || n > kMaxDim) throw ConfigError("expression dim out of range");
  const json& m = cfg.at("metric");
  if (!m.is_array() || static_cast<int>(m.size()) != n) throw ConfigError("metric must be an n x n array");
  std::vector<Expression> entries;
  for (int i = 0; i < n; ++i) {
    if (!m[i].is_array() || static_cast<int>(m[i].size()) != n) throw ConfigError("metric must be an n x n array");
    for (int j = 0; j < n; ++j) {
      const json& e = m[i][j];
      entries.push_back(Expression::over_coordinates(e.is_string() ? e.get<std::string>() : e.dump(), n));
    }
  }
  s->metric = std::make_shared<detail::ExpressionMetric>(n, std::move(entries));
  if (!cfg.contains("chart")) throw ConfigError("expression scenes need an explicit chart");
  euclidean_boundary(*s, cfg.at("boundary"));
  s->periods = cfg.contains("periodic") ? vec_from(cfg["periodic"], "periodic") : Vec(Vec::Zero(n));
  if (s->periods.size() != n) throw ConfigError("periodic has wrong dimension");
  return s;
}

std::shared_ptr<State> build_trapped(const json& cfg) {
  auto s = std::make_shared<State>();
  const int n = static_cast<int>(number(cfg, "n", 3));
  const double eps = number(cfg, "eps", 0.05);
  if (n < 3 || n + 1 > kMaxDim) throw ConfigError("trapped_example needs 3 <= n <= " + std::to_string(kMaxDim - 1));
  if (!(eps > 0.0 && eps < 0.1) && !cfg.value("allow_out_of_range", false))
    throw ConfigError("trapped_example needs 0 < eps < 0.1");
  if (!(eps > 0.0 && eps < 0.5)) throw ConfigError("trapped_example eps must lie in (0, 0.5)");
  s->tag = StructureTag::TrappedExample;
  s->dim = n;
  s->coord_dim = n + 1;
  s->trapped_n = n;
  s->trapped_eps = eps;
  s->metric = std::make_shared<detail::EmbeddedSphereProduct>(n);
  s->boundary = std::make_shared<detail::TrappedBoundary>(n, eps);
  const double half = 0.5 + detail::TrappedBoundary::kEndCapExtent;
  s->bbox = {Vec::Constant(n + 1, -1.0), Vec::Constant(n + 1, 1.0)};
  s->bbox.lo[0] = 0.5 - half;
  s->bbox.hi[0] = 0.5 + half;
  s->chart = inflate(s->bbox, 0.5);
  s->periods = Vec::Zero(n + 1);
  s->interior = Vec::Zero(n + 1);
  s->interior[0] = 0.5;
  s->interior[n] = -1.0;
  s->scale = 1.0;
  s->max_volume_density = 1.0;
  return s;
}

std::shared_ptr<State> build_state(const json& cfg) {
  if (!cfg.is_object() || !cfg.contains("type") || !cfg["type"].is_string())
    throw ConfigError("scene config must be an object with a string 'type'");
  const std::string type = cfg["type"].get<std::string>();
  std::shared_ptr<State> s;
  try {
    if (type == "euclidean") s = build_euclidean(cfg);
    else if (type == "sphere") s = build_sphere(cfg);
    else if (type == "product") s = build_product(cfg);
    else if (type == "conformal") s = build_conformal(cfg);
    else if (type == "expression") s = build_expression(cfg);
    else if (type == "trapped_example") s = build_trapped(cfg);
    else throw ConfigError("unknown scene type '" + type + "'");
  } catch (const json::exception& e) {
    throw ConfigError("scene '" + type + "': " + e.what());
  }
  s->config = cfg;
  if (s->tag != StructureTag::TrappedExample) {
    if (s->tag != StructureTag::Product && s->tag != StructureTag::Conformal) s->scale = s->boundary->scale();
    if (s->tag == StructureTag::Product) s->scale = s->boundary->scale();
    if (cfg.contains("chart")) {
      s->chart = {vec_from(cfg["chart"].at("lo"), "chart.lo"), vec_from(cfg["chart"].at("hi"), "chart.hi")};
    } else if (s->tag == StructureTag::Euclidean) {
      const double margin = number(cfg, "margin", 0.25 * (s->bbox.hi - s->bbox.lo).maxCoeff());
      s->chart = inflate(s->bbox, margin);
    }
    if (s->chart.lo.size() != s->coord_dim || s->chart.hi.size() != s->coord_dim)
      throw ConfigError("chart has wrong dimension");
  }
  return s;
}

// Invariant checks shared by every scene: SPD metric samples, regular boundary.
void validate(State& s) {
  const MetricScene scene(std::shared_ptr<const State>(&s, [](const State*) {}));
  for (int i = 0; i < s.coord_dim; ++i)
    if (s.interior[i] < s.chart.lo[i] || s.interior[i] > s.chart.hi[i])
      throw ConfigError("interior point outside chart");
  if (scene.rho(s.interior) >= 0.0) throw ConfigError("interior point is not inside M");
  if (!scene.embedded()) {
    double max_density = 0.0;
    for (int k = 0; k < 2048; ++k) {
      CounterRng rng(0x5eed, static_cast<std::uint64_t>(k));
      Vec x(s.coord_dim);
      const Box& box = k < 1024 ? s.chart : s.bbox;
      for (int i = 0; i < s.coord_dim; ++i) x[i] = rng.uniform(box.lo[i], box.hi[i]);
      const Mat g = scene.metric(x);
      if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + g.cwiseAbs().maxCoeff()))
        throw ConfigError("metric sample is not symmetric");
      const double ev = Eigen::SelfAdjointEigenSolver<Mat>(g).eigenvalues().minCoeff();
      if (!(ev > 0.0)) throw ConfigError("metric sample is not positive definite");
      if (k >= 1024) max_density = std::max(max_density, std::sqrt(g.determinant()));
    }
    s.max_volume_density = 1.25 * max_density + 1e-12;
  }
  int hits = 0;
  for (int k = 0; k < 64; ++k) {
    CounterRng rng(0xb0b, static_cast<std::uint64_t>(k));
    const Vec dir = rng.unit_vector(s.coord_dim);
    Vec p;
    try {
      p = boundary_point_along(scene, s.interior, dir);
    } catch (const ConfigError&) {
      // rays along periodic directions may never meet the boundary
      if (s.periods.cwiseAbs().maxCoeff() > 0.0) continue;
      throw;
    }
    ++hits;
    if (scene.boundary(p).gradient.norm() < 1e-8) throw ConfigError("degenerate boundary: grad rho vanishes");
  }
  if (hits == 0) throw ConfigError("no sampled ray meets the boundary");
}

}  // namespace

MetricScene build_scene(const json& config) {
  auto s = build_state(config);
  validate(*s);
  return MetricScene(std::move(s));
}

}  // namespace leafscope
