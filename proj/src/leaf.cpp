#include "leafscope/leaf.hpp"

#include <algorithm>
#include <cmath>

#include "leafscope/io.hpp"
#include "leafscope/parallel.hpp"

namespace leafscope {

// ---------------------------------------------------------------------------
// LCW

LCW LCW::natural() { return LCW(); }

LCW LCW::linear(const Vec& w) {
  if (w.norm() < 1e-12) throw ConfigError("linear weight needs a nonzero direction");
  LCW l;
  l.kind_ = Kind::Linear;
  l.w_ = w;
  return l;
}

LCW LCW::expression(const std::string& src, int n) {
  LCW l;
  l.kind_ = Kind::Expression;
  l.expr_ = Expression::over_coordinates(src, n);
  return l;
}

double LCW::value(const Vec& x) const {
  switch (kind_) {
    case Kind::Natural: return x[0];
    case Kind::Linear: return w_.dot(x);
    case Kind::Expression: return expr_->eval(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  }
  return 0.0;
}

Vec LCW::differential(const Vec& x) const {
  switch (kind_) {
    case Kind::Natural: return Vec::Unit(x.size(), 0);
    case Kind::Linear:
      if (w_.size() != x.size()) throw ConfigError("linear weight has wrong dimension");
      return w_;
    case Kind::Expression: {
      std::array<Jet, kMaxDim> jx;
      for (int i = 0; i < x.size(); ++i) jx[static_cast<std::size_t>(i)] = Jet::variable(x[i], i);
      const Jet v = expr_->eval(std::span<const Jet>(jx.data(), static_cast<std::size_t>(x.size())));
      Vec d(x.size());
      for (int i = 0; i < x.size(); ++i) d[i] = v.d[static_cast<std::size_t>(i)];
      return d;
    }
  }
  return Vec::Zero(x.size());
}

Mat LCW::hessian(const Vec& x) const {
  const int n = static_cast<int>(x.size());
  Mat h = Mat::Zero(n, n);
  if (kind_ != Kind::Expression) return h;
  const double step = 1e-5;
  for (int k = 0; k < n; ++k) {
    Vec xp = x, xm = x;
    xp[k] += step;
    xm[k] -= step;
    h.col(k) = (differential(xp) - differential(xm)) / (2 * step);
  }
  return 0.5 * (h + h.transpose());
}

std::string LCW::describe() const {
  switch (kind_) {
    case Kind::Natural: return "x1";
    case Kind::Linear: {
      std::string s = "linear(";
      for (int i = 0; i < w_.size(); ++i) s += (i ? "," : "") + format_double(w_[i]);
      return s + ")";
    }
    case Kind::Expression: return expr_->source();
  }
  return "";
}

SymbolValue weyl_symbol(const MetricScene& scene, const LCW& lcw, const PhasePoint& p) {
  const Vec dphi = lcw.differential(p.x);
  SymbolValue s;
  s.a = inner_covectors(scene, p.x, p.xi, p.xi) - inner_covectors(scene, p.x, dphi, dphi);
  s.b = 2.0 * inner_covectors(scene, p.x, dphi, p.xi);
  return s;
}

// ---------------------------------------------------------------------------
// Hamilton curves

namespace {

struct Rates {
  Vec dx, dxi;
};

Rates hamilton_rates(const MetricScene& scene, const LCW& lcw, HamiltonField field, const Vec& x_in, const Vec& xi) {
  Vec x = x_in;
  scene.wrap(x);
  Rates r;
  if (scene.embedded()) {
    if (lcw.kind() != LCW::Kind::Natural) throw ConfigError("ambient-coordinate scenes support the natural weight only");
    if (field == HamiltonField::A) {
      scene.geodesic_rhs(x, xi, r.dx, r.dxi);
      r.dx *= 2.0;
      r.dxi *= 2.0;
    } else {
      r.dx = 2.0 * Vec::Unit(x.size(), 0);
      r.dxi = Vec::Zero(x.size());
    }
    return r;
  }
  const int n = static_cast<int>(x.size());
  const MetricDerivatives md = scene.metric_derivatives(x);
  const auto ldlt = md.g.ldlt();
  const Vec dphi = lcw.differential(x);
  const Vec gxi = ldlt.solve(xi);
  const Vec gdphi = ldlt.solve(dphi);
  const Mat hphi = lcw.hessian(x);
  r.dxi.resize(n);
  if (field == HamiltonField::A) {
    r.dx = 2.0 * gxi;
    const Vec hg = hphi * gdphi;
    for (int k = 0; k < n; ++k) {
      const Mat& dg = md.dg[static_cast<std::size_t>(k)];
      r.dxi[k] = gxi.dot(dg * gxi) - gdphi.dot(dg * gdphi) + 2.0 * hg[k];
    }
  } else {
    r.dx = 2.0 * gdphi;
    const Vec hg = hphi * gxi;
    for (int k = 0; k < n; ++k) {
      const Mat& dg = md.dg[static_cast<std::size_t>(k)];
      r.dxi[k] = -2.0 * hg[k] + 2.0 * gdphi.dot(dg * gxi);
    }
  }
  return r;
}

PhasePoint hamilton_step(const MetricScene& scene, const LCW& lcw, HamiltonField f, const PhasePoint& z, double h) {
  const Rates k1 = hamilton_rates(scene, lcw, f, z.x, z.xi);
  const Rates k2 = hamilton_rates(scene, lcw, f, z.x + 0.5 * h * k1.dx, z.xi + 0.5 * h * k1.dxi);
  const Rates k3 = hamilton_rates(scene, lcw, f, z.x + 0.5 * h * k2.dx, z.xi + 0.5 * h * k2.dxi);
  const Rates k4 = hamilton_rates(scene, lcw, f, z.x + h * k3.dx, z.xi + h * k3.dxi);
  PhasePoint out{z.x + (h / 6.0) * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx),
                 z.xi + (h / 6.0) * (k1.dxi + 2.0 * k2.dxi + 2.0 * k3.dxi + k4.dxi)};
  scene.wrap(out.x);
  return out;
}

}  // namespace

GeodesicTrace hamilton_curve(const MetricScene& scene, const LCW& lcw, const PhasePoint& p0, HamiltonField field,
                             double t_cap, double step) {
  if (!(t_cap > 0.0)) throw ConfigError("t_cap must be positive");
  if (p0.x.size() != scene.coord_dim() || p0.xi.size() != scene.coord_dim())
    throw ConfigError("phase point has wrong dimension");
  const double h_nom = step > 0.0 ? step : scene.integration_step();
  const int n_steps = std::max(1, static_cast<int>(std::ceil(t_cap / h_nom)));
  const double h = t_cap / n_steps;
  GeodesicTrace tr;
  tr.t_cap = t_cap;
  tr.step = h;
  tr.periods = scene.periods();
  tr.l_minus = 0.0;
  PhasePoint z{p0.x, scene.project_covector(p0.x, p0.xi)};
  scene.wrap(z.x);
  tr.energy = scene.norm_covector(z.x, z.xi);
  auto push = [&](double t, const PhasePoint& p) {
    tr.t.push_back(t);
    tr.samples.push_back(p);
    const Rates r = hamilton_rates(scene, lcw, field, p.x, p.xi);
    tr.rates.push_back({r.dx, r.dxi});
  };
  push(0.0, z);
  bool inside = scene.rho(z.x) <= 0.0;
  for (int k = 1; k <= n_steps; ++k) {
    const PhasePoint next = hamilton_step(scene, lcw, field, z, h);
    if (!next.x.allFinite() || !next.xi.allFinite()) throw NumericalError("hamilton curve produced non-finite values");
    if (!scene.embedded() &&
        !scene.in_chart(std::span<const double>(next.x.data(), static_cast<std::size_t>(next.x.size()))))
      throw ConfigError("hamilton curve left the chart at t = " + format_double(k * h));
    if (inside && !tr.l_plus && scene.rho(next.x) > 0.0) {
      double lo = 0.0, hi = h;
      while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        (scene.rho(hamilton_step(scene, lcw, field, z, mid).x) > 0.0 ? hi : lo) = mid;
      }
      tr.l_plus = (k - 1) * h + 0.5 * (lo + hi);
    }
    tr.energy_drift = std::max(tr.energy_drift, std::abs(scene.norm_covector(next.x, next.xi) - tr.energy));
    push(k * h, next);
    z = next;
  }
  return tr;
}

double symbol_deviation(const MetricScene& scene, const LCW& lcw, const GeodesicTrace& curve) {
  double m = 0.0;
  for (const auto& p : curve.samples) {
    const SymbolValue s = weyl_symbol(scene, lcw, p);
    m = std::max({m, std::abs(s.a), std::abs(s.b)});
  }
  return m;
}

// ---------------------------------------------------------------------------
// Leaves

std::string to_string(GoodnessStatus s) {
  switch (s) {
    case GoodnessStatus::Good: return "Good";
    case GoodnessStatus::Trapped: return "Trapped";
    case GoodnessStatus::Tangential: return "Tangential";
    case GoodnessStatus::Unknown: return "Unknown";
  }
  return "?";
}

PhasePoint BicharLeaf::point(double t, double s) const {
  PhasePoint p;
  switch (kind) {
    case LeafKind::Product: {
      const double tau = s + transversal.l_minus.value_or(-transversal.t_cap);
      const PhasePoint g = transversal.phase_at(tau);
      const int m = static_cast<int>(g.x.size());
      p.x.resize(m + 1);
      p.xi.resize(m + 1);
      p.x[0] = y[0] + t;
      p.x.tail(m) = g.x;
      p.xi[0] = 0.0;
      p.xi.tail(m) = g.xi;
      break;
    }
    case LeafKind::EuclideanPlane:
      p.x = y + t * plane_e + s * eta;
      p.xi = eta;
      break;
    case LeafKind::SphereSlice: {
      const int m = static_cast<int>(y.size()) - 1;
      p.x.resize(m + 1);
      p.xi.resize(m + 1);
      p.x[0] = y[0] + t;
      p.x.tail(m) = std::cos(s) * y.tail(m) + std::sin(s) * eta.tail(m);
      p.xi[0] = 0.0;
      p.xi.tail(m) = -std::sin(s) * y.tail(m) + std::cos(s) * eta.tail(m);
      break;
    }
  }
  return p;
}

namespace {

nlohmann::json vec_json(const Vec& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

std::string kind_name(LeafKind k) {
  switch (k) {
    case LeafKind::Product: return "product";
    case LeafKind::EuclideanPlane: return "euclidean_plane";
    case LeafKind::SphereSlice: return "sphere_slice";
  }
  return "?";
}

void set_t_range(BicharLeaf& leaf, double lo, double hi, double offset) {
  const double pad = 0.05 * (hi - lo);
  leaf.t_min = lo - pad - offset;
  leaf.t_max = hi + pad - offset;
}

}  // namespace

nlohmann::json BicharLeaf::to_json() const {
  nlohmann::json j;
  j["kind"] = kind_name(kind);
  j["y"] = vec_json(y);
  j["eta"] = vec_json(eta);
  j["s_interval"] = {s_min, s_max};
  j["t_interval"] = {t_min, t_max};
  j["status"] = to_string(status);
  if (kind == LeafKind::EuclideanPlane) j["plane_e"] = vec_json(plane_e);
  if (kind == LeafKind::Product) {
    j["transversal"] = {{"l_minus", transversal.l_minus ? nlohmann::json(*transversal.l_minus) : nlohmann::json()},
                        {"l_plus", transversal.l_plus ? nlohmann::json(*transversal.l_plus) : nlohmann::json()},
                        {"entry_cosine", transversal.entry ? nlohmann::json(transversal.entry->cosine) : nlohmann::json()},
                        {"exit_cosine", transversal.exit ? nlohmann::json(transversal.exit->cosine) : nlohmann::json()}};
  }
  if (witness) j["witness"] = {{"t", witness->t}, {"s", witness->s}, {"x", vec_json(witness->x)}, {"xi", vec_json(witness->xi)}};
  return j;
}

BicharLeaf build_leaf(const MetricScene& scene, const Vec& y, const Vec& eta) {
  if (!scene.is_product()) throw ConfigError("build_leaf needs a product scene");
  const MetricScene& first = scene.factor(0);
  const MetricScene& m0 = scene.factor(1);
  if (first.tag() != StructureTag::Euclidean || first.coord_dim() != 1)
    throw ConfigError("build_leaf needs a one-dimensional Euclidean first factor");
  if (y.size() != scene.coord_dim() || eta.size() != scene.coord_dim()) throw ConfigError("base point has wrong dimension");
  const Vec yp = y.tail(m0.coord_dim());
  const Vec ep = eta.tail(m0.coord_dim());
  if (std::abs(eta[0]) > 1e-8) throw ConfigError("eta is not characteristic: eta_1 must vanish");
  if (std::abs(m0.norm_covector(yp, ep) - 1.0) > 1e-8)
    throw ConfigError("eta is not characteristic: |eta'| must be 1");
  if (m0.rho(yp) > 1e-9) throw ConfigError("base point y' lies outside M_0");
  BicharLeaf leaf;
  leaf.kind = LeafKind::Product;
  leaf.y = y;
  leaf.eta = eta;
  leaf.transversal = integrate_geodesic(m0, {yp, ep}, m0.default_t_cap());
  if (leaf.transversal.left_chart) throw ConfigError("transversal geodesic left the chart inside M_0 (margin violation)");
  const double lo = leaf.transversal.l_minus.value_or(-leaf.transversal.t_cap);
  const double hi = leaf.transversal.l_plus.value_or(leaf.transversal.t_cap);
  leaf.s_min = 0.0;
  leaf.s_max = hi - lo;
  set_t_range(leaf, scene.bounding_box().lo[0], scene.bounding_box().hi[0], y[0]);
  return leaf;
}

BicharLeaf build_plane_leaf(const MetricScene& scene, const Vec& e, const Vec& y, const Vec& eta) {
  if (scene.tag() != StructureTag::Euclidean) throw ConfigError("plane leaves need a Euclidean scene");
  const int n = scene.coord_dim();
  if (n < 3) throw ConfigError("plane leaves need dimension >= 3");
  if (e.size() != n || y.size() != n || eta.size() != n) throw ConfigError("plane leaf vectors have wrong dimension");
  if (std::abs(e.norm() - 1.0) > 1e-8 || std::abs(eta.norm() - 1.0) > 1e-8 || std::abs(e.dot(eta)) > 1e-8)
    throw ConfigError("plane leaf needs orthonormal e and eta");
  BicharLeaf leaf;
  leaf.kind = LeafKind::EuclideanPlane;
  leaf.y = y;
  leaf.eta = eta;
  leaf.plane_e = e;
  const Box& b = scene.bounding_box();
  double tlo = 1e300, thi = -1e300, slo = 1e300, shi = -1e300;
  for (int mask = 0; mask < (1 << n); ++mask) {
    Vec c(n);
    for (int i = 0; i < n; ++i) c[i] = (mask >> i & 1) ? b.hi[i] : b.lo[i];
    const double tc = (c - y).dot(e), sc = (c - y).dot(eta);
    tlo = std::min(tlo, tc);
    thi = std::max(thi, tc);
    slo = std::min(slo, sc);
    shi = std::max(shi, sc);
  }
  set_t_range(leaf, tlo, thi, 0.0);
  const double pad = 0.05 * (shi - slo);
  leaf.s_min = slo - pad;
  leaf.s_max = shi + pad;
  return leaf;
}

BicharLeaf build_sphere_leaf(const MetricScene& scene, const Vec& y, const Vec& eta) {
  if (!scene.embedded()) throw ConfigError("sphere leaves need the trapped_example scene");
  const int m = scene.trapped_n();
  if (y.size() != m + 1 || eta.size() != m + 1) throw ConfigError("leaf base point has wrong dimension");
  const Vec yp = y.tail(m), ep = eta.tail(m);
  if (std::abs(yp.norm() - 1.0) > 1e-8) throw ConfigError("y' must lie on the unit sphere");
  if (std::abs(eta[0]) > 1e-8 || std::abs(ep.norm() - 1.0) > 1e-8 || std::abs(ep.dot(yp)) > 1e-8)
    throw ConfigError("eta is not characteristic: need eta_1 = 0 and a unit tangent eta'");
  BicharLeaf leaf;
  leaf.kind = LeafKind::SphereSlice;
  leaf.y = y;
  leaf.eta = eta;
  leaf.s_min = 0.0;
  leaf.s_max = 2 * kPi;
  set_t_range(leaf, scene.bounding_box().lo[0], scene.bounding_box().hi[0], y[0]);
  return leaf;
}

GoodnessStatus screen_leaf(const MetricScene& scene, BicharLeaf& leaf, const ScreenOptions& opts) {
  double t_cap = opts.t_cap;
  if (t_cap <= 0.0) t_cap = leaf.kind == LeafKind::SphereSlice ? kTrappedScreenCap : scene.default_t_cap();
  leaf.witness.reset();
  bool any_inside = false, tangential = false;
  TraceOptions topts;
  topts.record = false;
  for (int i = 0; i < opts.t_samples && !leaf.witness; ++i) {
    const double t = leaf.t_min + (i + 0.5) * (leaf.t_max - leaf.t_min) / opts.t_samples;
    for (int j = 0; j < opts.s_samples; ++j) {
      const double s = leaf.s_min + (j + 0.5) * (leaf.s_max - leaf.s_min) / opts.s_samples;
      const PhasePoint p = leaf.point(t, s);
      if (!scene.embedded() &&
          !scene.in_chart(std::span<const double>(p.x.data(), static_cast<std::size_t>(p.x.size()))))
        continue;
      if (scene.rho(p.x) >= 0.0) continue;
      any_inside = true;
      const GeodesicTrace tr = integrate_geodesic(scene, p, t_cap, topts);
      if (tr.trapped()) {
        leaf.witness = BicharLeaf::Witness{t, s, p.x, p.xi};
        break;
      }
      if (!nontangential(tr)) tangential = true;
    }
  }
  if (leaf.witness) {
    leaf.status = GoodnessStatus::Trapped;
  } else if (leaf.kind == LeafKind::Product) {
    if (leaf.transversal.trapped()) leaf.status = GoodnessStatus::Unknown;
    else leaf.status = nontangential(leaf.transversal) ? GoodnessStatus::Good : GoodnessStatus::Tangential;
  } else if (!any_inside) {
    leaf.status = GoodnessStatus::Unknown;
  } else {
    leaf.status = tangential ? GoodnessStatus::Tangential : GoodnessStatus::Good;
  }
  return leaf.status;
}

// ---------------------------------------------------------------------------
// Trapped example

MetricScene build_trapped_example(int n, double eps, bool allow_out_of_range) {
  return build_scene({{"type", "trapped_example"}, {"n", n}, {"eps", eps}, {"allow_out_of_range", allow_out_of_range}});
}

nlohmann::json TrappedReport::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["eps"] = eps;
  j["grid"] = grid;
  j["t_cap"] = t_cap;
  j["total"] = total;
  j["trapped"] = trapped;
  j["verified"] = verified;
  j["trapped_fraction"] = fraction();
  j["summary"] = format_double(100.0 * fraction()) + "% Trapped";
  j["hypothesis_ok"] = hypothesis_ok;
  j["notes"] = notes;
  j["leaves"] = nlohmann::json::array();
  for (const auto& l : leaves) {
    nlohmann::json r{{"normal", vec_json(l.normal)}, {"y", vec_json(l.y)}, {"eta", vec_json(l.eta)},
                     {"status", l.trapped ? "Trapped" : "Escaping"}, {"verified", l.verified}};
    if (l.trapped) r["witness"] = {{"t", l.t}, {"s", l.s}};
    j["leaves"].push_back(r);
  }
  return j;
}

TrappedReport detect_all_trapped(const MetricScene& scene, int grid, double t_cap) {
  if (scene.tag() != StructureTag::TrappedExample) throw ConfigError("detect_all_trapped needs the trapped_example scene");
  if (grid <= 0) throw ConfigError("leaf grid must be positive");
  const int m = scene.trapped_n();
  const double eps = scene.trapped_eps();
  TrappedReport rep;
  rep.n = m;
  rep.eps = eps;
  rep.grid = grid;
  rep.t_cap = t_cap;
  rep.total = grid * grid;
  if (!(eps > 0.0 && eps < 0.1)) {
    rep.hypothesis_ok = false;
    rep.notes.push_back("eps outside (0, 0.1): the small-cap hypothesis does not hold");
  }
  rep.leaves.resize(static_cast<std::size_t>(rep.total));

  // candidate slices inside the moving-cap window
  constexpr int kSlices = 65;
  std::vector<double> slices;
  for (int k = 0; k < kSlices; ++k) slices.push_back(eps + (1.0 - 2.0 * eps) * k / (kSlices - 1));
  slices.push_back(0.5 * (eps + 0.5));
  slices.push_back(0.5);
  std::vector<Vec> centers;
  for (double t : slices) centers.push_back(scene.trapped_cap_center(t));

  parallel_for(rep.leaves.size(), [&](std::size_t idx) {
    TrappedLeafRecord& rec = rep.leaves[idx];
    Vec yp(m), ep(m);
    if (m == 3) {
      const int i = static_cast<int>(idx) / grid, j = static_cast<int>(idx) % grid;
      const double th = (i + 0.5) / grid * (kPi / 2), ph = 2 * kPi * j / grid;
      Eigen::Vector3d nu(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
      Eigen::Vector3d a = std::abs(nu.z()) < 0.9 ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitX();
      Eigen::Vector3d u = (a - a.dot(nu) * nu).normalized();
      Eigen::Vector3d w = nu.cross(u);
      rec.normal = Vec(nu);
      yp = Vec(u);
      ep = Vec(w);
    } else {
      CounterRng rng(0x7eaf, idx);
      yp = rng.unit_vector(m);
      Vec v = rng.unit_vector(m);
      ep = (v - v.dot(yp) * yp).normalized();
      rec.normal = yp;
    }
    rec.y = Vec::Zero(m + 1);
    rec.y.tail(m) = yp;
    rec.eta = Vec::Zero(m + 1);
    rec.eta.tail(m) = ep;

    // try the slices where the cap sits farthest from the leaf's circle first
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t k = 0; k < slices.size(); ++k) {
      const Vec& f = centers[k];
      const double reach = std::hypot(f.dot(yp), f.dot(ep));
      order.emplace_back(reach, k);
    }
    std::sort(order.begin(), order.end());
    TraceOptions topts;
    topts.record = false;
    for (int c = 0; c < 4; ++c) {
      const std::size_t k = order[static_cast<std::size_t>(c)].second;
      const double t = slices[k];
      const Vec& f = centers[k];
      const double s = std::atan2(-f.dot(ep), -f.dot(yp));  // point of the circle farthest from the cap
      Vec x(m + 1), xi(m + 1);
      x[0] = t;
      x.tail(m) = std::cos(s) * yp + std::sin(s) * ep;
      xi[0] = 0.0;
      xi.tail(m) = -std::sin(s) * yp + std::cos(s) * ep;
      if (scene.rho(x) >= 0.0) continue;
      const GeodesicTrace tr = integrate_geodesic(scene, {x, xi}, t_cap, topts);
      if (!tr.l_minus && !tr.l_plus) {
        rec.trapped = true;
        rec.t = t;
        rec.s = s;
        const GeodesicTrace tr2 = integrate_geodesic(scene, {x, xi}, 2.0 * t_cap, topts);
        rec.verified = !tr2.l_minus && !tr2.l_plus;
        break;
      }
    }
  });
  for (const auto& l : rep.leaves) {
    if (l.trapped) ++rep.trapped;
    if (l.verified) ++rep.verified;
  }
  return rep;
}

void write_leaf_csv(const BicharLeaf& leaf, int nt, int ns, const std::string& path) {
  if (nt < 2 || ns < 2) throw ConfigError("leaf grid needs at least 2 x 2 points");
  const int n = static_cast<int>(leaf.point(leaf.t_min, leaf.s_min).x.size());
  std::vector<std::string> header{"t", "s"};
  for (int i = 1; i <= n; ++i) header.push_back("x" + std::to_string(i));
  CsvWriter csv(path, header);
  std::vector<double> row(static_cast<std::size_t>(n + 2));
  for (int i = 0; i < nt; ++i) {
    const double t = leaf.t_min + (leaf.t_max - leaf.t_min) * i / (nt - 1);
    for (int j = 0; j < ns; ++j) {
      const double s = leaf.s_min + (leaf.s_max - leaf.s_min) * j / (ns - 1);
      const Vec x = leaf.point(t, s).x;
      row[0] = t;
      row[1] = s;
      for (int k = 0; k < n; ++k) row[static_cast<std::size_t>(2 + k)] = x[k];
      csv.row(row);
    }
  }
}

}  // namespace leafscope
