#include "leafscope/quasimode.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

#include "leafscope/expression.hpp"

namespace leafscope {

namespace {

constexpr cplx kI{0.0, 1.0};

// Trapezoid weight of node i on an n-node axis.
inline double trap(int i, int n) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; }
inline double simpson_weight(int i, int n) { return (i == 0 || i == n - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0); }

void require_flat_plane(const MetricScene& factor) {
  if (factor.tag() != StructureTag::Euclidean || factor.coord_dim() != 2)
    throw ConfigError("Gaussian beams need a flat two-dimensional transversal factor");
}

}  // namespace

TransversalBeam::TransversalBeam(const MetricScene& factor, const GeodesicTrace& gamma, double h, double lambda,
                                 int sign, const BeamOptions& o)
    : factor_(factor), h_(h), lambda_(lambda), sign_(sign), kind_(o.kind) {
  require_flat_plane(factor);
  if (!(h > 0.0 && h <= 1.0)) throw ConfigError("semiclassical parameter must lie in (0, 1]");
  if (sign != 1 && sign != -1) throw ConfigError("beam sign must be +1 or -1");
  if (gamma.trapped()) throw ConfigError("beam geodesic is trapped");
  if (!nontangential(gamma)) throw ConfigError("beam geodesic is tangential");
  if (!(o.riccati_step > 0.0)) throw ConfigError("Riccati step must be positive");
  const PhasePoint p0 = gamma.phase_at(*gamma.l_minus);
  origin_ = p0.x;
  omega_ = p0.xi / p0.xi.norm();
  length_ = *gamma.l_plus - *gamma.l_minus;

  const Box& box = factor.bounding_box();
  const double wx = box.hi[0] - box.lo[0], wy = box.hi[1] - box.lo[1];
  const int need = static_cast<int>(std::ceil(8.0 * std::max(wx, wy) / (2.0 * kPi * h))) + 1;
  const int n = std::max(o.grid, need);
  layout_ = Grid2D::over(box.lo[0], box.hi[0], box.lo[1], box.hi[1], n, n);

  double slo = 0.0, shi = 0.0;
  for (double cx : {box.lo[0], box.hi[0]})
    for (double cy : {box.lo[1], box.hi[1]}) {
      const double s = (cx - origin_[0]) * omega_[0] + (cy - origin_[1]) * omega_[1];
      slo = std::min(slo, s);
      shi = std::max(shi, s);
    }
  // H = i at gamma(0), the trace's base point
  anchor_ = -*gamma.l_minus;
  ds_ = o.riccati_step;
  const int back = static_cast<int>(std::ceil((anchor_ - slo) / ds_)) + 1,
            fwd = static_cast<int>(std::ceil((shi - anchor_) / ds_)) + 1;
  s_lo_ = anchor_ - back * ds_;
  hs_.assign(static_cast<std::size_t>(back + fwd + 1), cplx(0.0, 0.0));
  as_.assign(hs_.size(), cplx(1.0, 0.0));
  if (kind_ == BeamKind::Gaussian) {
    auto rhs = [](cplx hv, cplx av, cplx& dh, cplx& da) {
      dh = -hv * hv;
      da = -0.5 * hv * av;
    };
    auto run = [&](int dir) {
      cplx hv = kI, av = 1.0;
      hs_[static_cast<std::size_t>(back)] = hv;
      as_[static_cast<std::size_t>(back)] = av;
      const double dt = dir * ds_;
      for (int k = 1; k <= (dir > 0 ? fwd : back); ++k) {
        cplx k1h, k1a, k2h, k2a, k3h, k3a, k4h, k4a;
        rhs(hv, av, k1h, k1a);
        rhs(hv + 0.5 * dt * k1h, av + 0.5 * dt * k1a, k2h, k2a);
        rhs(hv + 0.5 * dt * k2h, av + 0.5 * dt * k2a, k3h, k3a);
        rhs(hv + dt * k3h, av + dt * k3a, k4h, k4a);
        hv += dt / 6.0 * (k1h + 2.0 * k2h + 2.0 * k3h + k4h);
        av += dt / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
        if (!std::isfinite(std::abs(hv)) || !std::isfinite(std::abs(av)))
          throw NumericalError("Riccati solution blew up");
        const std::size_t idx = static_cast<std::size_t>(back + dir * k);
        hs_[idx] = hv;
        as_[idx] = av;
      }
    };
    run(1);
    run(-1);
    min_imag_h_ = hs_.front().imag();
    for (const cplx& v : hs_) min_imag_h_ = std::min(min_imag_h_, v.imag());
    if (!(min_imag_h_ > 0.0)) throw NumericalError("Riccati solution lost positivity");
  }

  double nrm = 0.0, res = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vec x(2);
      x << layout_.x(i), layout_.y(j);
      if (factor_.rho(x) > 0.0) continue;
      const double w = trap(i, n) * trap(j, n);
      nrm += w * std::norm((*this)(x));
      res += w * std::norm(residual_at(x));
    }
  const double cell = layout_.dx * layout_.dy;
  norm_ = std::sqrt(nrm * cell);
  residual_ = std::sqrt(res * cell);
}

void TransversalBeam::sample(double s, cplx& hv, cplx& av) const {
  if (kind_ == BeamKind::PlaneWave) {
    hv = 0.0;
    av = 1.0;
    return;
  }
  const double u = std::clamp((s - s_lo_) / ds_, 0.0, static_cast<double>(hs_.size() - 1));
  const std::size_t k = std::min(static_cast<std::size_t>(u), hs_.size() - 2);
  const double w = u - static_cast<double>(k);
  // cubic Hermite with the ODE derivatives
  const double h00 = (1 + 2 * w) * (1 - w) * (1 - w), h10 = w * (1 - w) * (1 - w), h01 = w * w * (3 - 2 * w),
               h11 = w * w * (w - 1);
  const cplx H0 = hs_[k], H1 = hs_[k + 1], A0 = as_[k], A1 = as_[k + 1];
  hv = h00 * H0 + h10 * ds_ * (-H0 * H0) + h01 * H1 + h11 * ds_ * (-H1 * H1);
  av = h00 * A0 + h10 * ds_ * (-0.5 * H0 * A0) + h01 * A1 + h11 * ds_ * (-0.5 * H1 * A1);
}

cplx TransversalBeam::riccati(double s) const {
  cplx hv, av;
  sample(s, hv, av);
  return hv;
}

cplx TransversalBeam::amplitude(double s) const {
  cplx hv, av;
  sample(s, hv, av);
  return av;
}

cplx TransversalBeam::operator()(const Vec& x) const {
  const double dx = x[0] - origin_[0], dy = x[1] - origin_[1];
  const double s = dx * omega_[0] + dy * omega_[1], nn = -dx * omega_[1] + dy * omega_[0];
  cplx hv, av;
  sample(s, hv, av);
  const cplx k(1.0 / h_, lambda_);
  const cplx theta = s + 0.5 * hv * nn * nn;
  const double c = kind_ == BeamKind::Gaussian ? std::pow(kPi * h_, -0.25) : 1.0;
  return c * av * std::exp(kI * k * theta);
}

cplx TransversalBeam::residual_at(const Vec& x) const {
  if (kind_ == BeamKind::PlaneWave) return 0.0;
  const double dx = x[0] - origin_[0], dy = x[1] - origin_[1];
  const double s = dx * omega_[0] + dy * omega_[1], nn = -dx * omega_[1] + dy * omega_[0];
  cplx hv, av;
  sample(s, hv, av);
  const cplx k(1.0 / h_, lambda_);
  const cplx h1 = -hv * hv, h2 = -2.0 * hv * h1;
  const cplx a1 = -0.5 * hv * av, a2 = -0.5 * (h1 * av + hv * a1);
  const double n2 = nn * nn;
  const cplx th_s = 1.0 + 0.5 * h1 * n2, th_n = hv * nn, lap = 0.5 * h2 * n2 + hv;
  const cplx theta = s + 0.5 * hv * n2;
  const cplx bracket = k * k * (th_s * th_s + th_n * th_n - 1.0) * av - kI * k * (2.0 * th_s * a1 + lap * av) - a2;
  const double c = std::pow(kPi * h_, -0.25);
  return c * std::exp(kI * k * theta) * bracket;
}

TransversalBeam gaussian_beam(const MetricScene& factor, const GeodesicTrace& gamma, double h, double lambda,
                              int sign, const BeamOptions& o) {
  return TransversalBeam(factor, gamma, h, lambda, sign, o);
}

// ---------------------------------------------------------------------------

cplx Quasimode::operator()(const Vec& x) const {
  const Vec xp = x.tail(x.size() - 1);
  return std::exp(cplx(0.0, -sign * lambda * x[0])) * (*v)(xp);
}

nlohmann::json Quasimode::to_json() const {
  return {{"h", v->h()},           {"lambda", lambda},          {"sign", sign},
          {"x1_lo", x1_lo},        {"x1_hi", x1_hi},            {"n1", n1},
          {"norm_m", norm_m},      {"norm_cylinder", norm_cylinder},
          {"norm_transversal", v->norm_l2()}, {"residual", residual},
          {"transversal_residual", v->residual_l2()}, {"grid", v->layout().nx},
          {"min_imag_riccati", v->min_imag_h()}};
}

namespace {

void require_product_of(const MetricScene& scene, const TransversalBeam& v) {
  if (!scene.is_product() || scene.split() != 1) throw ConfigError("quasimodes need a product scene R x M0");
  if (scene.factor(1).coord_dim() != v.factor().coord_dim()) throw ConfigError("beam factor does not match the scene");
}

}  // namespace

Quasimode assemble_w(const MetricScene& scene, const TransversalBeam& v, int n1) {
  require_product_of(scene, v);
  if (n1 < 3 || n1 % 2 == 0) throw ConfigError("x1 grid needs an odd node count >= 3");
  Quasimode w;
  w.v = std::make_shared<const TransversalBeam>(v);
  w.lambda = v.lambda();
  w.sign = v.sign();
  w.x1_lo = scene.bounding_box().lo[0];
  w.x1_hi = scene.bounding_box().hi[0];
  w.n1 = n1;
  const double d1 = (w.x1_hi - w.x1_lo) / (n1 - 1);
  const Grid2D& g = v.layout();
  double in_m = 0.0, in_cyl = 0.0;
  std::vector<std::pair<Vec, double>> nodes;
  double peak = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      Vec xp(2);
      xp << g.x(i), g.y(j);
      if (v.factor().rho(xp) > 0.0) continue;
      const double a = std::norm(v(xp)) * trap(i, g.nx) * trap(j, g.ny);
      peak = std::max(peak, a);
      nodes.emplace_back(xp, a);
    }
  Vec x(3);
  for (const auto& [xp, a] : nodes) {
    if (a < 1e-20 * peak) continue;
    x.tail(2) = xp;
    for (int k = 0; k < n1; ++k) {
      x[0] = w.x1_lo + k * d1;
      const double wk = simpson_weight(k, n1) * d1 / 3.0;
      in_cyl += wk * a;
      if (scene.rho(x) <= 0.0) in_m += wk * a;
    }
  }
  const double cell = g.dx * g.dy;
  w.norm_m = std::sqrt(in_m * cell);
  w.norm_cylinder = std::sqrt(in_cyl * cell);
  w.residual = v.h() * v.h() * v.residual_l2() * std::sqrt(w.x1_hi - w.x1_lo);
  return w;
}

cplx pairing(const MetricScene& scene, const ScalarField& f, const Quasimode& wp, const Quasimode& wm) {
  const Grid2D& g = wp.v->layout();
  const Grid2D& gm = wm.v->layout();
  if (g.nx != gm.nx || g.ny != gm.ny || g.x0 != gm.x0 || g.y0 != gm.y0 || g.dx != gm.dx || g.dy != gm.dy ||
      wp.n1 != wm.n1 || wp.x1_lo != wm.x1_lo || wp.x1_hi != wm.x1_hi)
    throw ConfigError("pairing: quasimode grids do not match");
  require_product_of(scene, *wp.v);
  const int n1 = wp.n1;
  const double d1 = (wp.x1_hi - wp.x1_lo) / (n1 - 1);
  std::vector<cplx> phase(static_cast<std::size_t>(n1));
  for (int k = 0; k < n1; ++k) {
    const double x1 = wp.x1_lo + k * d1;
    phase[static_cast<std::size_t>(k)] = std::exp(cplx(0.0, -wp.sign * wp.lambda * x1)) *
                                         std::conj(std::exp(cplx(0.0, -wm.sign * wm.lambda * x1))) *
                                         (simpson_weight(k, n1) * d1 / 3.0);
  }
  // transversal products, negligible nodes dropped
  std::vector<std::pair<Vec, cplx>> nodes;
  double peak = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      Vec xp(2);
      xp << g.x(i), g.y(j);
      if (wp.v->factor().rho(xp) > 0.0) continue;
      const cplx p = (*wp.v)(xp) * std::conj((*wm.v)(xp)) * (trap(i, g.nx) * trap(j, g.ny));
      peak = std::max(peak, std::abs(p));
      nodes.emplace_back(xp, p);
    }
  cplx acc(0.0, 0.0);
  Vec x(3);
  for (const auto& [xp, p] : nodes) {
    if (std::abs(p) < 1e-18 * peak) continue;
    x.tail(2) = xp;
    cplx row(0.0, 0.0);
    for (int k = 0; k < n1; ++k) {
      x[0] = wp.x1_lo + k * d1;
      const double fv = f(x);
      if (fv != 0.0) row += fv * phase[static_cast<std::size_t>(k)];
    }
    acc += row * p;
  }
  return acc * (g.dx * g.dy);
}

nlohmann::json PairingResult::to_json() const {
  nlohmann::json vals = nlohmann::json::array();
  for (const cplx& v : values) vals.push_back({v.real(), v.imag()});
  return {{"h", h},
          {"pairing", vals},
          {"target", {target.real(), target.imag()}},
          {"target_attenuated", {target_attenuated.real(), target_attenuated.imag()}},
          {"deviations", deviations},
          {"scale", scale},
          {"scaled_deviations", scaled_deviations},
          {"norms_plus", norms_plus},
          {"norms_minus", norms_minus},
          {"residuals", residuals},
          {"pass", pass}};
}

PairingResult concentration_test(const MetricScene& scene, const BicharLeaf& leaf, const ScalarField& f,
                                 double lambda_plus, double lambda_minus, const ConcentrationOptions& o) {
  if (leaf.kind != LeafKind::Product) throw ConfigError("concentration test needs a product leaf");
  if (leaf.status != GoodnessStatus::Good) throw ConfigError("concentration test needs a Good leaf");
  if (o.k_min < 0 || o.k_max < o.k_min) throw ConfigError("bad h ladder");
  PairingResult out;
  const double lam = lambda_plus + lambda_minus;
  out.target = std::exp(cplx(0.0, -lam * leaf.y[0])) * leaf_transform(scene, f, leaf, HoloAmplitude{lam}).value;
  out.target_attenuated = attenuated_transversal_transform(scene, f, leaf.transversal, 0.5 * lam).value;
  const MetricScene& m0 = scene.factor(1);
  for (int k = o.k_min; k <= o.k_max; ++k) {
    const double h = std::ldexp(1.0, -k);
    const TransversalBeam vp(m0, leaf.transversal, h, lambda_plus, 1, o.beam);
    const Quasimode wp = assemble_w(scene, vp, o.n1);
    Quasimode wm;
    if (lambda_minus == lambda_plus) {
      wm = wp;  // same beam; only the x1 phase changes sign
      wm.sign = -1;
    } else {
      wm = assemble_w(scene, TransversalBeam(m0, leaf.transversal, h, lambda_minus, -1, o.beam), o.n1);
    }
    const cplx val = pairing(scene, f, wp, wm);
    out.h.push_back(h);
    out.values.push_back(val);
    out.deviations.push_back(std::abs(val - out.target));
    out.norms_plus.push_back(wp.norm_m);
    out.norms_minus.push_back(wm.norm_m);
    out.residuals.push_back(std::max(wp.residual, wm.residual));
  }
  out.scale = std::max(1.0, std::abs(out.target));
  for (double d : out.deviations) out.scaled_deviations.push_back(d / out.scale);
  const std::size_t n = out.deviations.size();
  bool mono = n >= 3;
  for (std::size_t i = n >= 3 ? n - 3 : 0; i + 1 < n; ++i) mono = mono && out.deviations[i + 1] <= out.deviations[i];
  out.pass = mono && out.scaled_deviations.back() < 1e-2;
  return out;
}

// ---------------------------------------------------------------------------

std::vector<double> lambda_grid(double lo, double hi, int count) {
  if (count < 1) throw ConfigError("lambda grid needs at least one point");
  if (count == 1) return {0.5 * (lo + hi)};
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
  return out;
}

nlohmann::json DensityResult::to_json() const {
  nlohmann::json c = nlohmann::json::array();
  for (const cplx& v : coefficients) c.push_back({v.real(), v.imag()});
  return {{"lambdas", lambdas}, {"coefficients", c}, {"sup_error", sup_error}, {"rank", rank}};
}

DensityResult amplitude_density_check(const std::string& f_of_z, double s0, double s1, double t0, double t1,
                                      const std::vector<double>& lambdas, int fit_nodes, int check_nodes) {
  if (lambdas.empty()) throw ConfigError("density check needs a lambda grid");
  if (fit_nodes < 2 || check_nodes < 2 || !(s1 > s0) || !(t1 > t0)) throw ConfigError("bad density check region");
  const Expression fz(f_of_z, {"z"});
  auto F = [&](cplx z) { return fz.eval(std::span<const cplx>(&z, 1)); };
  const int m = static_cast<int>(lambdas.size());
  const int rows = fit_nodes * fit_nodes;
  Eigen::MatrixXcd a(rows, m);
  Eigen::VectorXcd b(rows);
  for (int i = 0; i < fit_nodes; ++i)
    for (int j = 0; j < fit_nodes; ++j) {
      const cplx z(s0 + (s1 - s0) * i / (fit_nodes - 1), t0 + (t1 - t0) * j / (fit_nodes - 1));
      const int r = i * fit_nodes + j;
      for (int c = 0; c < m; ++c) a(r, c) = std::exp(-lambdas[static_cast<std::size_t>(c)] * z);
      b[r] = F(z);
    }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-15);
  const Eigen::VectorXcd coef = svd.solve(b);
  DensityResult out;
  out.lambdas = lambdas;
  out.rank = static_cast<int>(svd.rank());
  out.coefficients.assign(coef.data(), coef.data() + coef.size());
  for (int i = 0; i < check_nodes; ++i)
    for (int j = 0; j < check_nodes; ++j) {
      const cplx z(s0 + (s1 - s0) * i / (check_nodes - 1), t0 + (t1 - t0) * j / (check_nodes - 1));
      cplx v(0.0, 0.0);
      for (int c = 0; c < m; ++c) v += coef[c] * std::exp(-lambdas[static_cast<std::size_t>(c)] * z);
      out.sup_error = std::max(out.sup_error, std::abs(v - F(z)));
    }
  return out;
}

}  // namespace leafscope
