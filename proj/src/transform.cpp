#include "leafscope/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "leafscope/io.hpp"

namespace leafscope {

// ---------------------------------------------------------------------------
// ScalarField

ScalarField::ScalarField(Fn f, std::string tag) : f_(std::move(f)), tag_(std::move(tag)) {}

ScalarField::ScalarField(const MetricScene& domain, Fn f, std::string tag, double band)
    : f_(std::move(f)), domain_(domain), tag_(std::move(tag)), band_(band) {
  if (band < 0.0) throw ConfigError("mollifier band must be nonnegative");
}

ScalarField ScalarField::zero(const MetricScene& domain) {
  return ScalarField(domain, [](const Vec&) { return 0.0; }, "zero");
}

ScalarField ScalarField::expression(const MetricScene& domain, const std::string& src, double band) {
  const Expression e = Expression::over_coordinates(src, domain.coord_dim());
  return ScalarField(
      domain, [e](const Vec& x) { return e.eval(std::span<const double>(x.data(), static_cast<std::size_t>(x.size()))); },
      src, band);
}

double ScalarField::raw(const Vec& x) const {
  if (!domain_) return f_(x);
  if (!domain_->embedded() &&
      !domain_->in_chart(std::span<const double>(x.data(), static_cast<std::size_t>(x.size()))))
    return 0.0;
  return domain_->rho(x) > kRawBoundaryTol ? 0.0 : f_(x);
}

double ScalarField::operator()(const Vec& x) const {
  if (!domain_) return f_(x);
  if (!domain_->embedded() &&
      !domain_->in_chart(std::span<const double>(x.data(), static_cast<std::size_t>(x.size()))))
    return 0.0;
  const double r = domain_->rho(x);
  if (r > 0.0) return 0.0;
  if (band_ <= 0.0 || r <= -band_) return f_(x);
  const double u = -r / band_;
  return f_(x) * u * u * (3.0 - 2.0 * u);
}

ScalarField ScalarField::with_band(double band) const {
  ScalarField g = *this;
  if (band < 0.0) throw ConfigError("mollifier band must be nonnegative");
  g.band_ = band;
  return g;
}

ScalarField ScalarField::operator-(const ScalarField& other) const {
  ScalarField g = *this;
  const Fn a = f_, b = other.f_;
  g.f_ = [a, b](const Vec& x) { return a(x) - b(x); };
  g.tag_ = "(" + tag_ + ") - (" + other.tag_ + ")";
  return g;
}

ScalarField ScalarField::scaled(double c) const {
  ScalarField g = *this;
  const Fn a = f_;
  g.f_ = [a, c](const Vec& x) { return c * a(x); };
  return g;
}

double HoloAmplitude::cauchy_riemann_residual(double s0, double s1, double t0, double t1, int n) const {
  if (n < 5) throw ConfigError("Cauchy-Riemann grid needs n >= 5");
  const double hs = (s1 - s0) / (n - 1), ht = (t1 - t0) / (n - 1);
  const cplx i(0.0, 1.0);
  double m = 0.0;
  // fourth-order central differences
  auto d4 = [](cplx fm2, cplx fm1, cplx fp1, cplx fp2, double h) {
    return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
  };
  for (int a = 2; a < n - 2; ++a)
    for (int b = 2; b < n - 2; ++b) {
      const double s = s0 + a * hs, t = t0 + b * ht;
      const cplx ds = d4((*this)(s - 2 * hs, t), (*this)(s - hs, t), (*this)(s + hs, t), (*this)(s + 2 * hs, t), hs);
      const cplx dt = d4((*this)(s, t - 2 * ht), (*this)(s, t - ht), (*this)(s, t + ht), (*this)(s, t + 2 * ht), ht);
      m = std::max(m, std::abs(ds + i * dt));
    }
  return m;
}

nlohmann::json TransformSample::to_json() const {
  return {{"geometry", geometry}, {"params", params},  {"re", value.real()},         {"im", value.imag()},
          {"raw_re", raw_value.real()}, {"raw_im", raw_value.imag()}, {"grid", grid}, {"est_error", est_error}};
}

// ---------------------------------------------------------------------------
// Quadrature

namespace {

// Mollified and raw integrand values carried through one refinement.
struct Pair {
  cplx m{0.0, 0.0}, r{0.0, 0.0};
  Pair operator+(const Pair& o) const { return {m + o.m, r + o.r}; }
  Pair operator*(double c) const { return {m * c, r * c}; }
};
inline double quad_norm(cplx v) { return std::abs(v); }
inline double quad_norm(const Pair& v) { return std::abs(v.m); }

template <class T>
struct Quad {
  T value{};
  double est_error = 0.0;
  int intervals = 0;
};

template <class T, class F>
Quad<T> simpson_t(F&& f, double a, double b, const QuadratureOptions& o) {
  Quad<T> r;
  if (b <= a) return r;
  int n = 1 << o.min_log2;
  std::vector<T> vals(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) vals[static_cast<std::size_t>(k)] = f(a + (b - a) * k / n);
  auto simpson = [&](int m) {
    T s = vals.front() + vals.back();
    for (int k = 1; k < m; ++k) s = s + vals[static_cast<std::size_t>(k)] * (k % 2 ? 4.0 : 2.0);
    return s * ((b - a) / m / 3.0);
  };
  T prev = simpson(n);
  r.value = prev;
  r.intervals = n;
  r.est_error = std::numeric_limits<double>::infinity();
  for (int depth = o.min_log2 + 1; depth <= o.max_depth; ++depth) {
    const int m = 2 * n;
    std::vector<T> next(static_cast<std::size_t>(m) + 1);
    for (int k = 0; k <= n; ++k) next[static_cast<std::size_t>(2 * k)] = vals[static_cast<std::size_t>(k)];
    for (int k = 0; k < n; ++k) next[static_cast<std::size_t>(2 * k + 1)] = f(a + (b - a) * (2 * k + 1) / m);
    vals.swap(next);
    n = m;
    const T cur = simpson(n);
    r.value = cur;
    r.intervals = n;
    r.est_error = quad_norm(cur + prev * -1.0);
    if (r.est_error < o.tol) break;
    prev = cur;
  }
  return r;
}

// Parameters in (a, b) where rho crosses 0 or -band, located by scanning and bisection.
std::vector<double> band_breaks(const std::function<double(double)>& rho, double a, double b, double band,
                                int scan) {
  std::vector<double> out{a};
  std::vector<double> levels{0.0};
  if (band > 0.0) levels.push_back(-band);
  std::vector<double> u(static_cast<std::size_t>(scan) + 1), r(u.size());
  for (int k = 0; k <= scan; ++k) {
    u[static_cast<std::size_t>(k)] = a + (b - a) * k / scan;
    r[static_cast<std::size_t>(k)] = rho(u[static_cast<std::size_t>(k)]);
  }
  for (std::size_t k = 0; k + 1 < u.size(); ++k)
    for (const double lv : levels) {
      const bool s0 = r[k] > lv, s1 = r[k + 1] > lv;
      if (s0 == s1) continue;
      double lo = u[k], hi = u[k + 1];
      for (int it = 0; it < 100 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        ((rho(mid) > lv) == s0 ? lo : hi) = mid;
      }
      out.push_back(0.5 * (lo + hi));
    }
  out.push_back(b);
  std::sort(out.begin(), out.end());
  return out;
}

// Simpson on each piece between band crossings; pieces outside M are skipped.
template <class T, class F>
Quad<T> piecewise_simpson(F&& f, const std::function<double(double)>& rho, double a, double b, double band,
                          int scan, const QuadratureOptions& o) {
  Quad<T> total;
  if (b <= a) return total;
  const std::vector<double> br = band_breaks(rho, a, b, band, scan);
  QuadratureOptions po = o;
  po.tol = o.tol / static_cast<double>(br.size());
  for (std::size_t k = 0; k + 1 < br.size(); ++k) {
    if (br[k + 1] - br[k] <= 0.0) continue;
    if (rho(0.5 * (br[k] + br[k + 1])) > kRawBoundaryTol) continue;
    const Quad<T> q = simpson_t<T>(f, br[k], br[k + 1], po);
    total.value = total.value + q.value;
    total.est_error += q.est_error;
    total.intervals += q.intervals;
  }
  return total;
}

}  // namespace

QuadResult simpson_dyadic(const std::function<cplx(double)>& f, double a, double b, const QuadratureOptions& o) {
  const Quad<cplx> q = simpson_t<cplx>(f, a, b, o);
  QuadResult r;
  r.value = q.value;
  r.est_error = b > a ? q.est_error : 0.0;
  r.intervals = q.intervals;
  return r;
}

TransformSample xray_transform(const MetricScene& scene, const ScalarField& f, const GeodesicTrace& trace,
                               const QuadratureOptions& o) {
  if (trace.trapped()) throw ConfigError("xray_transform: trace is trapped");
  TransformSample out;
  out.geometry = "geodesic";
  out.params = {{"l_minus", *trace.l_minus}, {"l_plus", *trace.l_plus}};
  if (trace.t.empty() || !(*trace.l_plus > *trace.l_minus)) return out;
  const double speed = trace.energy;
  const auto rho = [&](double t) { return scene.rho(trace.position_at(t)); };
  const double a = *trace.l_minus, b = *trace.l_plus;
  const auto q = piecewise_simpson<Pair>(
      [&](double t) {
        const Vec x = trace.position_at(t);
        return Pair{cplx(speed * f(x), 0.0), cplx(speed * f.raw(x), 0.0)};
      },
      rho, a, b, f.band(), 64, o);
  out.value = q.value.m;
  out.raw_value = q.value.r;
  out.grid = q.intervals;
  out.est_error = q.est_error;
  return out;
}

TransformSample leaf_transform(const MetricScene& scene, const ScalarField& f, const BicharLeaf& leaf,
                               const HoloAmplitude& psi, const LeafQuadrature& q) {
  if (leaf.status != GoodnessStatus::Good && !q.allow_non_good)
    throw ConfigError("leaf_transform: leaf status is " + to_string(leaf.status) + ", not Good");
  if (q.n0 < 2 || (q.n0 & (q.n0 - 1))) throw ConfigError("leaf grid must be a power of two >= 2");
  TransformSample out;
  out.geometry = "leaf";
  out.params = {{"lambda_re", psi.lambda.real()}, {"lambda_im", psi.lambda.imag()}, {"leaf", leaf.to_json()}};
  QuadratureOptions outer;
  outer.tol = q.tol * 0.5;
  outer.min_log2 = static_cast<int>(std::log2(q.n0));
  outer.max_depth = static_cast<int>(std::log2(std::max(q.max_n, q.n0)));
  QuadratureOptions inner;
  inner.tol = q.tol * 0.5 / std::max(1.0, leaf.t_max - leaf.t_min);
  double inner_err = 0.0;
  const auto row = [&](double t) {
    const auto r = piecewise_simpson<Pair>(
        [&](double s) {
          const Vec x = leaf.point(t, s).x;
          const cplx w = psi(s, t);
          return Pair{f(x) * w, f.raw(x) * w};
        },
        [&](double s) { return scene.rho(leaf.point(t, s).x); }, leaf.s_min, leaf.s_max, f.band(), q.n0, inner);
    inner_err = std::max(inner_err, r.est_error);
    return r.value;
  };
  const auto r = simpson_t<Pair>(row, leaf.t_min, leaf.t_max, outer);
  out.value = r.value.m;
  out.raw_value = r.value.r;
  out.grid = r.intervals;
  out.est_error = r.est_error + (leaf.t_max - leaf.t_min) * inner_err;
  return out;
}

TransformSample attenuated_transversal_transform(const MetricScene& scene, const ScalarField& q,
                                                 const GeodesicTrace& gamma, double lambda,
                                                 const QuadratureOptions& o) {
  if (!scene.is_product()) throw ConfigError("attenuated transform needs a product scene");
  if (gamma.trapped()) throw ConfigError("attenuated transform: transversal geodesic is trapped");
  if (!nontangential(gamma)) throw ConfigError("attenuated transform: transversal geodesic is tangential");
  const double L = *gamma.l_plus - *gamma.l_minus;
  const double ta = scene.bounding_box().lo[0], tb = scene.bounding_box().hi[0];
  const int m = static_cast<int>(gamma.samples.front().x.size());
  QuadratureOptions outer = o;
  outer.tol = o.tol * 0.5;
  QuadratureOptions inner = o;
  inner.tol = o.tol * 0.5 / std::max(1.0, L);
  double inner_err = 0.0;
  const auto slice = [&](double s) {
    const Vec g = gamma.position_at(*gamma.l_minus + s);
    Vec x(m + 1);
    x.tail(m) = g;
    const auto r = piecewise_simpson<Pair>(
        [&](double t) {
          x[0] = t;
          const cplx w = std::exp(cplx(0.0, -2.0 * lambda * t));
          return Pair{q(x) * w, q.raw(x) * w};
        },
        [&](double t) {
          Vec z = x;
          z[0] = t;
          return scene.rho(z);
        },
        ta, tb, q.band(), 64, inner);
    inner_err = std::max(inner_err, r.est_error);
    return r.value * std::exp(-2.0 * lambda * s);
  };
  const auto r = simpson_t<Pair>(slice, 0.0, L, outer);
  TransformSample out;
  out.geometry = "attenuated";
  out.params = {{"lambda", lambda}, {"length", L}};
  out.value = r.value.m;
  out.raw_value = r.value.r;
  out.grid = r.intervals;
  out.est_error = r.est_error + L * inner_err;
  return out;
}

// ---------------------------------------------------------------------------
// 2D Radon

Grid2D Grid2D::over(double xlo, double xhi, double ylo, double yhi, int nx, int ny) {
  if (nx < 2 || ny < 2 || !(xhi > xlo) || !(yhi > ylo)) throw ConfigError("bad grid specification");
  Grid2D g;
  g.x0 = xlo;
  g.y0 = ylo;
  g.dx = (xhi - xlo) / (nx - 1);
  g.dy = (yhi - ylo) / (ny - 1);
  g.nx = nx;
  g.ny = ny;
  g.v = Eigen::MatrixXd::Zero(nx, ny);
  return g;
}

double Grid2D::operator()(double px, double py) const {
  const double fx = (px - x0) / dx, fy = (py - y0) / dy;
  if (!(fx >= 0.0 && fx <= nx - 1 && fy >= 0.0 && fy <= ny - 1)) return 0.0;
  const int i = std::min(static_cast<int>(fx), nx - 2), j = std::min(static_cast<int>(fy), ny - 2);
  const double u = fx - i, w = fy - j;
  return (1 - u) * (1 - w) * v(i, j) + u * (1 - w) * v(i + 1, j) + (1 - u) * w * v(i, j + 1) + u * w * v(i + 1, j + 1);
}

void write_grid_csv(const Grid2D& g, const std::string& path) {
  CsvWriter csv(path, {"x", "y", "value"});
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) csv.row({g.x(i), g.y(j), g.v(i, j)});
}

namespace {

// Parameter interval of the line base + t w inside the box, empty if lo >= hi.
std::pair<double, double> clip_line(const Eigen::Vector2d& base, const Eigen::Vector2d& w, const Eigen::Vector2d& lo,
                                    const Eigen::Vector2d& hi) {
  double t0 = -std::numeric_limits<double>::infinity(), t1 = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 2; ++k) {
    if (std::abs(w[k]) < 1e-15) {
      if (base[k] < lo[k] || base[k] > hi[k]) return {0.0, 0.0};
      continue;
    }
    double a = (lo[k] - base[k]) / w[k], b = (hi[k] - base[k]) / w[k];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
  }
  return {t0, t1};
}

}  // namespace

double radon_2d(const Fn2& h, const Box& support, double theta, double p, const QuadratureOptions& o,
                const Eigen::Vector2d& center) {
  if (support.lo.size() != 2 || support.hi.size() != 2) throw ConfigError("radon_2d support must be a 2D box");
  const Eigen::Vector2d w(std::cos(theta), std::sin(theta)), wp(-std::sin(theta), std::cos(theta));
  const Eigen::Vector2d base = center + p * wp;
  const auto [t0, t1] = clip_line(base, w, Eigen::Vector2d(support.lo[0], support.lo[1]),
                                  Eigen::Vector2d(support.hi[0], support.hi[1]));
  if (!(t1 > t0)) return 0.0;
  return simpson_dyadic(
             [&](double t) {
               const Eigen::Vector2d q = base + t * w;
               return cplx(h(q[0], q[1]), 0.0);
             },
             t0, t1, o)
      .value.real();
}

double radon_2d(const Grid2D& h, double theta, double p, const Eigen::Vector2d& center) {
  const Eigen::Vector2d w(std::cos(theta), std::sin(theta)), wp(-std::sin(theta), std::cos(theta));
  const Eigen::Vector2d base = center + p * wp;
  const auto [t0, t1] = clip_line(base, w, Eigen::Vector2d(h.x0, h.y0),
                                  Eigen::Vector2d(h.x(h.nx - 1), h.y(h.ny - 1)));
  if (!(t1 > t0)) return 0.0;
  int n = static_cast<int>(std::ceil((t1 - t0) / (0.25 * std::min(h.dx, h.dy))));
  n = std::max(2, n + n % 2);
  const double dt = (t1 - t0) / n;
  double acc = 0.0;
  for (int k = 0; k <= n; ++k) {
    const Eigen::Vector2d q = base + (t0 + k * dt) * w;
    const double wk = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    acc += wk * h(q[0], q[1]);
  }
  return acc * dt / 3.0;
}

// ---------------------------------------------------------------------------
// Product pullback and tilted geodesics

FactorGeodesic factor_geodesic(const MetricScene& factor, const PhasePoint& p0) {
  const double nrm = factor.norm_covector(p0.x, p0.xi);
  if (!(nrm > 0.0)) throw ConfigError("factor geodesic needs a nonzero covector");
  FactorGeodesic g;
  g.trace = integrate_geodesic(factor, {p0.x, p0.xi / nrm}, factor.default_t_cap());
  if (g.trace.trapped()) throw ConfigError("factor geodesic is trapped");
  g.start = *g.trace.l_minus;
  g.length = *g.trace.l_plus - *g.trace.l_minus;
  return g;
}

Fn2 product_pullback(const MetricScene& scene, const ScalarField& f, const FactorGeodesic& g1,
                     const FactorGeodesic& g2) {
  if (!scene.is_product()) throw ConfigError("product_pullback needs a product scene");
  const int m1 = scene.split(), m2 = scene.coord_dim() - scene.split();
  return [&f, &g1, &g2, m1, m2](double y1, double y2) {
    if (y1 < 0.0 || y1 > g1.length || y2 < 0.0 || y2 > g2.length) return 0.0;
    Vec x(m1 + m2);
    x.head(m1) = g1.at(y1).x;
    x.tail(m2) = g2.at(y2).x;
    return f(x);
  };
}

Grid2D product_pullback_grid(const MetricScene& scene, const ScalarField& f, const FactorGeodesic& g1,
                             const FactorGeodesic& g2, int nx, int ny) {
  const Fn2 h = product_pullback(scene, f, g1, g2);
  Grid2D g = Grid2D::over(0.0, g1.length, 0.0, g2.length, nx, ny);
  g.fill([&](double a, double b) { return h(a, b); });
  return g;
}

GeodesicTrace tilted_geodesic(const MetricScene& scene, const FactorGeodesic& g1, const FactorGeodesic& g2,
                              double theta, const Eigen::Vector2d& a) {
  if (!scene.is_product()) throw ConfigError("tilted_geodesic needs a product scene");
  const int m1 = scene.split(), m2 = scene.coord_dim() - scene.split();
  const double c = std::cos(theta), s = std::sin(theta);
  const auto [t0, t1] = clip_line(a, Eigen::Vector2d(c, s), Eigen::Vector2d(0.0, 0.0),
                                  Eigen::Vector2d(g1.length, g2.length));
  GeodesicTrace tr;
  tr.periods = scene.periods();
  tr.energy = 1.0;
  if (!(t1 > t0)) {
    tr.l_minus = tr.l_plus = 0.0;
    return tr;
  }
  constexpr double kSpacing = 1e-2;
  const int n = std::max(2, static_cast<int>(std::ceil((t1 - t0) / kSpacing)));
  tr.step = (t1 - t0) / n;
  tr.t_cap = t1 - t0;
  for (int k = 0; k <= n; ++k) {
    const double t = (k == n) ? t1 : t0 + k * tr.step;
    const PhasePoint p1 = g1.at(std::clamp(t * c + a[0], 0.0, g1.length));
    const PhasePoint p2 = g2.at(std::clamp(t * s + a[1], 0.0, g2.length));
    PhasePoint p;
    p.x.resize(m1 + m2);
    p.xi.resize(m1 + m2);
    p.x.head(m1) = p1.x;
    p.x.tail(m2) = p2.x;
    p.xi.head(m1) = c * p1.xi;
    p.xi.tail(m2) = s * p2.xi;
    PhasePoint r;
    scene.geodesic_rhs(p.x, p.xi, r.x, r.xi);
    tr.t.push_back(t);
    tr.samples.push_back(p);
    tr.rates.push_back(r);
    tr.energy_drift = std::max(tr.energy_drift, std::abs(scene.norm_covector(p.x, p.xi) - 1.0));
  }

  // first entry and last exit of M along the sampled curve
  std::vector<double> rho(tr.samples.size());
  for (std::size_t k = 0; k < rho.size(); ++k) rho[k] = scene.rho(tr.samples[k].x);
  auto crossing = [&](std::size_t k_out, std::size_t k_in) {
    double lo = tr.t[k_out], hi = tr.t[k_in];  // rho(lo) > 0 >= rho(hi)
    for (int it = 0; it < 200 && std::abs(hi - lo) > 1e-13; ++it) {
      const double mid = 0.5 * (lo + hi);
      (scene.rho(tr.position_at(mid)) > 0.0 ? lo : hi) = mid;
    }
    return hi;
  };
  std::optional<std::size_t> first, last;
  for (std::size_t k = 0; k < rho.size(); ++k)
    if (rho[k] <= 0.0) {
      if (!first) first = k;
      last = k;
    }
  if (!first) {
    tr.l_minus = tr.l_plus = t0;
    return tr;
  }
  tr.l_minus = *first == 0 ? tr.t.front() : crossing(*first - 1, *first);
  tr.l_plus = *last + 1 == rho.size() ? tr.t.back() : crossing(*last + 1, *last);
  auto make = [&](double t) {
    Crossing cr;
    const PhasePoint p = tr.phase_at(t);
    cr.t = t;
    cr.x = p.x;
    cr.xi = p.xi;
    if (std::abs(scene.rho(p.x)) < 1e-6) {
      const Vec nu = outward_conormal(scene, p.x);
      cr.cosine = inner_covectors(scene, p.x, p.xi, nu) / scene.norm_covector(p.x, p.xi);
    }
    cr.tangential = std::abs(cr.cosine) <= kTangencyTol;
    return cr;
  };
  tr.entry = make(*tr.l_minus);
  tr.exit = make(*tr.l_plus);
  tr.max_interior_rho = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < rho.size(); ++k)
    if (tr.t[k] > *tr.l_minus + 2 * tr.step && tr.t[k] < *tr.l_plus - 2 * tr.step)
      tr.max_interior_rho = std::max(tr.max_interior_rho, rho[k]);
  return tr;
}

double geodesic_residual(const MetricScene& scene, const GeodesicTrace& trace) {
  if (trace.samples.size() < 2) return 0.0;
  const int n = scene.coord_dim();
  const VectorField field = [&](const Eigen::VectorXd& z) {
    Vec x = z.head(n), xi = z.tail(n), dx, dxi;
    scene.wrap(x);
    scene.geodesic_rhs(x, xi, dx, dxi);
    Eigen::VectorXd out(2 * n);
    out << dx, dxi;
    return out;
  };
  Eigen::VectorXd z(2 * n);
  z << trace.samples.front().x, trace.samples.front().xi;
  double worst = 0.0;
  for (std::size_t k = 1; k < trace.samples.size(); ++k) {
    const IntegralCurve c = integrate_field(field, z, trace.t[k - 1], trace.t[k], scene.integration_step());
    z = c.z.back();
    Vec diff = z.head(n) - trace.samples[k].x;
    for (int i = 0; i < n; ++i) {
      const double p = scene.periods()[i];
      if (p > 0.0) diff[i] -= p * std::round(diff[i] / p);
    }
    worst = std::max(worst, diff.norm());
  }
  return worst;
}

void write_sinogram_csv(const std::vector<double>& theta, const std::vector<double>& p, const Eigen::MatrixXd& values,
                        const std::string& path) {
  CsvWriter csv(path, {"theta", "p", "value"});
  for (std::size_t i = 0; i < theta.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j)
      csv.row({theta[i], p[j], values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))});
}

}  // namespace leafscope
