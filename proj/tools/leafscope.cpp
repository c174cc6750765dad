#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>

#include "leafscope/invert.hpp"
#include "leafscope/io.hpp"
#include "leafscope/parallel.hpp"
#include "leafscope/quasimode.hpp"
#include "leafscope/rng.hpp"

namespace fs = std::filesystem;
using namespace leafscope;
using nlohmann::json;

namespace {

struct Common {
  std::string scene;
  std::string out = "leafscope_out";
  std::uint64_t seed = 0;
  double tol = 1e-6;
  double t_cap = 0.0;
  double h_min = 1.0 / 128;
  double h_max = 0.25;
  int grid = 0;
};

struct Context {
  Common c;
  std::vector<std::string> outputs;
  json summary = json::object();

  std::string path(const std::string& name) {
    outputs.push_back(name);
    return (fs::path(c.out) / name).string();
  }
  MetricScene scene() const {
    if (c.scene.empty()) throw ConfigError("--scene is required for this command");
    return build_scene_file(c.scene);
  }
  double t_cap(const MetricScene& s) const { return c.t_cap > 0.0 ? c.t_cap : s.default_t_cap(); }
  int grid_or(int fallback) const { return c.grid > 0 ? c.grid : fallback; }
};

Vec to_vec(const std::vector<double>& v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

json cplx_json(cplx v) { return json::array({v.real(), v.imag()}); }

ScalarField field(const MetricScene& s, const std::string& expr) { return ScalarField::expression(s, expr); }

Fn2 phantom(const std::string& expr) {
  const Expression e(expr, {"x1", "x2"});
  return [e](double a, double b) {
    const double v[2] = {a, b};
    return e.eval(std::span<const double>(v, 2));
  };
}

Vec unit_or(const std::vector<double>& v, int n, int axis) {
  if (!v.empty()) {
    if (static_cast<int>(v.size()) != n) throw ConfigError("vector option has the wrong dimension");
    return to_vec(v);
  }
  Vec e = Vec::Zero(n);
  e[axis] = 1.0;
  return e;
}

// Leaf through (y, eta) appropriate to the scene type.
BicharLeaf make_leaf(const MetricScene& s, const std::vector<double>& y, const std::vector<double>& eta,
                     const std::vector<double>& e) {
  const int n = s.coord_dim();
  if (s.is_product()) {
    Vec yv = y.empty() ? s.interior_point() : to_vec(y);
    return build_leaf(s, yv, unit_or(eta, n, std::min(1, n - 1)));
  }
  if (s.tag() == StructureTag::TrappedExample) {
    Vec yv = y.empty() ? Vec::Zero(n) : to_vec(y);
    if (y.empty()) yv[n - 1] = 1.0;
    return build_sphere_leaf(s, yv, unit_or(eta, n, 1));
  }
  if (s.tag() == StructureTag::Euclidean)
    return build_plane_leaf(s, unit_or(e, n, 0), y.empty() ? Vec::Zero(n) : to_vec(y), unit_or(eta, n, 1));
  throw ConfigError("leaves need a product, Euclidean or trapped-example scene");
}

void write_grid(const Grid2D& g, const std::string& path) { write_grid_csv(g, path); }

// ---------------------------------------------------------------------------

struct Geodesic {
  std::vector<double> x, xi;
  void add(CLI::App* a) {
    a->add_option("--x", x, "start point")->delimiter(',');
    a->add_option("--xi", xi, "start covector (normalized)")->delimiter(',');
  }
  void run(Context& ctx) {
    const MetricScene s = ctx.scene();
    const Vec x0 = x.empty() ? s.interior_point() : to_vec(x);
    const Vec k0 = unit_or(xi, s.coord_dim(), 0);
    const double nrm = s.norm_covector(x0, k0);
    if (!(nrm > 0.0)) throw ConfigError("covector must be nonzero");
    const GeodesicTrace tr = integrate_geodesic(s, {x0, k0 / nrm}, ctx.t_cap(s));
    write_trace_csv(s, tr, ctx.path("trace.csv"));
    json r = {{"class", to_string(classify(tr))},
              {"t_cap", tr.t_cap},
              {"energy", tr.energy},
              {"energy_drift", tr.energy_drift},
              {"left_chart", tr.left_chart},
              {"samples", tr.t.size()}};
    r["l_minus"] = tr.l_minus ? json(*tr.l_minus) : json(nullptr);
    r["l_plus"] = tr.l_plus ? json(*tr.l_plus) : json(nullptr);
    if (!tr.trapped()) r["nontangential"] = nontangential(tr);
    write_json(ctx.path("geodesic.json"), r);
    ctx.summary = r;
    if (tr.energy_drift > 1e-6) throw NumericalError("energy drift " + format_double(tr.energy_drift) + " exceeds 1e-6");
  }
};

struct Coverage {
  int points = 1000, dirs = 64, b1_samples = 0;
  void add(CLI::App* a) {
    a->add_option("--points", points, "base points");
    a->add_option("--dirs", dirs, "directions per point");
    a->add_option("--b1-samples", b1_samples, "also estimate mu(B1) with this many samples");
  }
  void run(Context& ctx) {
    const MetricScene s = ctx.scene();
    const CoverageReport rep = coverage_monte_carlo(s, points, dirs, ctx.t_cap(s), ctx.c.seed);
    json j = rep.to_json();
    write_json(ctx.path("coverage.json"), j);
    ctx.summary = {{"fraction", j["fraction"]}};
    if (b1_samples > 0) {
      const MeasureReport m = b1_measure_estimate(s, b1_samples, ctx.t_cap(s), ctx.c.seed);
      write_json(ctx.path("measure.json"), m.to_json());
      ctx.summary["measure"] = m.to_json();
    }
  }
};

struct LeafScreen {
  std::vector<double> y, eta, e;
  void add(CLI::App* a) {
    a->add_option("--y", y, "leaf base point")->delimiter(',');
    a->add_option("--eta", eta, "leaf direction")->delimiter(',');
    a->add_option("--e", e, "weight direction (Euclidean plane leaves)")->delimiter(',');
  }
  void run(Context& ctx) {
    const MetricScene s = ctx.scene();
    BicharLeaf leaf = make_leaf(s, y, eta, e);
    ScreenOptions so;
    so.t_cap = ctx.c.t_cap;
    screen_leaf(s, leaf, so);
    const int g = ctx.grid_or(33);
    write_leaf_csv(leaf, g, g, ctx.path("leaf.csv"));
    write_json(ctx.path("leaf.json"), leaf.to_json());
    ctx.summary = {{"status", to_string(leaf.status)}};
  }
};

struct TrappedExample {
  int n = 3;
  double eps = 0.05;
  void add(CLI::App* a) {
    a->add_option("--n", n, "sphere dimension + 1");
    a->add_option("--eps", eps, "cap size");
  }
  void run(Context& ctx) {
    const MetricScene s = build_trapped_example(n, eps);
    const double cap = ctx.c.t_cap > 0.0 ? ctx.c.t_cap : kTrappedScreenCap;
    const TrappedReport rep = detect_all_trapped(s, ctx.grid_or(32), cap);
    const json j = rep.to_json();
    write_json(ctx.path("trapped.json"), j);
    CsvWriter csv(ctx.path("witnesses.csv"), {"index", "t", "s", "trapped", "verified"});
    for (std::size_t i = 0; i < rep.leaves.size(); ++i) {
      const auto& l = rep.leaves[i];
      csv.row({static_cast<double>(i), l.t, l.s, l.trapped ? 1.0 : 0.0, l.verified ? 1.0 : 0.0});
    }
    ctx.summary = {{"summary", j["summary"]}, {"trapped", rep.trapped}, {"verified", rep.verified}, {"total", rep.total}};
    std::printf("%s\n", j["summary"].get<std::string>().c_str());
  }
};

struct Xray {
  std::string f = "1";
  std::vector<double> x, xi;
  int samples = 16;
  void add(CLI::App* a) {
    a->add_option("--f", f, "integrand expression in x1..xn");
    a->add_option("--x", x, "single geodesic start point")->delimiter(',');
    a->add_option("--xi", xi, "single geodesic covector")->delimiter(',');
    a->add_option("--samples", samples, "random geodesics when --x is absent");
  }
  void run(Context& ctx) {
    const MetricScene s = ctx.scene();
    const ScalarField fld = field(s, f);
    QuadratureOptions qo;
    qo.tol = ctx.c.tol;
    std::vector<PhasePoint> starts;
    if (!x.empty()) {
      const Vec k0 = unit_or(xi, s.coord_dim(), 0);
      starts.push_back({to_vec(x), k0 / s.norm_covector(to_vec(x), k0)});
    } else {
      for (int i = 0; i < samples; ++i) {
        CounterRng rng(ctx.c.seed, static_cast<std::uint64_t>(i));
        const Vec p = s.sample_point(rng);
        starts.push_back({p, s.sample_unit_covector(p, rng)});
      }
    }
    std::vector<json> rows(starts.size());
    parallel_for(starts.size(), [&](std::size_t i) {
      const GeodesicTrace tr = integrate_geodesic(s, starts[i], ctx.t_cap(s));
      json r = {{"x", std::vector<double>(starts[i].x.data(), starts[i].x.data() + starts[i].x.size())},
                {"xi", std::vector<double>(starts[i].xi.data(), starts[i].xi.data() + starts[i].xi.size())}};
      if (tr.trapped()) {
        r["trapped"] = true;
      } else {
        r["trapped"] = false;
        r["sample"] = xray_transform(s, fld, tr, qo).to_json();
      }
      rows[i] = r;
    });
    write_json(ctx.path("xray.json"), rows);
    ctx.summary = {{"count", rows.size()}};
  }
};

struct LeafTransform {
  std::string f = "exp(-(x1^2 + x2^2 + x3^2))";
  std::vector<double> y, eta, e, lambda{0.0};
  bool allow = false;
  void add(CLI::App* a) {
    a->add_option("--f", f, "integrand expression");
    a->add_option("--y", y, "leaf base point")->delimiter(',');
    a->add_option("--eta", eta, "leaf direction")->delimiter(',');
    a->add_option("--e", e, "weight direction (Euclidean plane leaves)")->delimiter(',');
    a->add_option("--lambda", lambda, "amplitude exponents, Psi = exp(-lambda z)")->delimiter(',');
    a->add_flag("--allow-non-good", allow, "integrate over leaves that failed the screen");
  }
  void run(Context& ctx) {
    const MetricScene s = ctx.scene();
    BicharLeaf leaf = make_leaf(s, y, eta, e);
    ScreenOptions so;
    so.t_cap = ctx.c.t_cap;
    screen_leaf(s, leaf, so);
    LeafQuadrature q;
    q.tol = ctx.c.tol;
    q.allow_non_good = allow;
    if (ctx.c.grid > 0) q.n0 = ctx.c.grid;
    const ScalarField fld = field(s, f);
    json rows = json::array();
    for (double l : lambda) rows.push_back(leaf_transform(s, fld, leaf, HoloAmplitude{l}, q).to_json());
    write_json(ctx.path("leaf_transform.json"), rows);
    ctx.summary = {{"count", rows.size()}, {"status", to_string(leaf.status)}};
  }
};

struct Attenuated {
  std::string f = "exp(-(x1^2 + x2^2 + x3^2))";
  std::vector<double> y, eta, lambda{0.0};
  bool check_leaf = false;
  void add(CLI::App* a) {
    a->add_option("--f", f, "integrand expression");
    a->add_option("--y", y, "leaf base point (y1, y')")->delimiter(',');
    a->add_option("--eta", eta, "direction (0, eta')")->delimiter(',');
    a->add_option("--lambda", lambda, "attenuation parameters")->delimiter(',');
    a->add_flag("--check-leaf", check_leaf, "compare with the leaf transform");
  }
  void run(Context& ctx) {
    const MetricScene s = ctx.scene();
    if (!s.is_product()) throw ConfigError("attenuated needs a product scene");
    BicharLeaf leaf = make_leaf(s, y, eta, {});
    const ScalarField fld = field(s, f);
    QuadratureOptions qo;
    qo.tol = ctx.c.tol;
    if (check_leaf) screen_leaf(s, leaf);
    json rows = json::array();
    double worst = 0.0;
    for (double l : lambda) {
      const TransformSample a = attenuated_transversal_transform(s, fld, leaf.transversal, l, qo);
      json r = a.to_json();
      if (check_leaf) {
        LeafQuadrature lq;
        lq.tol = ctx.c.tol;
        const TransformSample b = leaf_transform(s, fld, leaf, HoloAmplitude{2.0 * l}, lq);
        const cplx expect = std::exp(cplx(0.0, 2.0 * l * leaf.y[0])) * a.value;
        r["leaf"] = cplx_json(b.value);
        r["deviation"] = std::abs(b.value - expect);
        worst = std::max(worst, std::abs(b.value - expect));
      }
      rows.push_back(r);
    }
    write_json(ctx.path("attenuated.json"), rows);
    ctx.summary = {{"count", rows.size()}};
    if (check_leaf) ctx.summary["max_deviation"] = worst;
  }
};

struct RadonOpts {
  std::string expr = "exp(-4*(x1^2 + x2^2))";
  double half_width = 1.5;
  int n_theta = 180, n_p = 256;
  void add(CLI::App* a) {
    a->add_option("--phantom", expr, "function of x1, x2");
    a->add_option("--half-width", half_width, "support box [-w, w]^2");
    a->add_option("--n-theta", n_theta, "angles on [0, pi)");
    a->add_option("--n-p", n_p, "offsets");
  }
  Sinogram synth(const Context& ctx) const {
    const Fn2 h = phantom_fn();
    Box box;
    box.lo = Vec::Constant(2, -half_width);
    box.hi = Vec::Constant(2, half_width);
    Sinogram s = Sinogram::layout(n_theta, n_p, half_width * std::sqrt(2.0));
    s.provenance = "radon_2d of " + expr;
    QuadratureOptions qo;
    qo.tol = std::min(ctx.c.tol, 1e-8);
    synthesize(s, [&](double th, double p) { return radon_2d(h, box, th, p, qo); });
    return s;
  }
  Fn2 phantom_fn() const { return phantom(expr); }
};

struct Radon {
  RadonOpts r;
  void add(CLI::App* a) { r.add(a); }
  void run(Context& ctx) {
    const Sinogram s = r.synth(ctx);
    write_sinogram(s, ctx.path("sinogram.csv"));
    const json j = {{"n_theta", s.theta.size()}, {"n_p", s.p.size()}, {"p_max", s.p.back()}, {"provenance", s.provenance}};
    write_json(ctx.path("radon.json"), j);
    ctx.summary = j;
  }
};

struct InvertFbp {
  RadonOpts r;
  std::string sinogram;
  void add(CLI::App* a) {
    r.add(a);
    a->add_option("--sinogram", sinogram, "sinogram CSV (theta,p,value); otherwise synthesized from --phantom");
  }
  void run(Context& ctx) {
    const Sinogram s = sinogram.empty() ? r.synth(ctx) : read_sinogram(sinogram);
    const int g = ctx.grid_or(129);
    const double w = r.half_width;
    ReconstructionReport rep = fbp_invert(s, Grid2D::over(-w, w, -w, w, g, g));
    if (sinogram.empty()) {
      Grid2D truth = rep.grid;
      const Fn2 h = r.phantom_fn();
      truth.fill([&](double a, double b) { return h(a, b); });
      rep.rel_l2 = relative_l2(rep.grid, truth);
    }
    write_grid(rep.grid, ctx.path("recon.csv"));
    write_json(ctx.path("report.json"), rep.to_json());
    ctx.summary = {{"rel_l2", rep.rel_l2 ? json(*rep.rel_l2) : json(nullptr)}, {"warnings", rep.warnings}};
  }
};

struct InvertCgls {
  std::string phantom = "exp(-6*((x1 - 0.2)^2 + x2^2))";
  int n_theta = 64, n_p = 0, iters = 200;
  double reg = 0.0, noise = 0.0;
  void add(CLI::App* a) {
    a->add_option("--phantom", phantom, "function of x1, x2 on [-1, 1]^2");
    a->add_option("--n-theta", n_theta, "angles");
    a->add_option("--n-p", n_p, "offsets (default 1.5 x grid)");
    a->add_option("--iters", iters, "maximum iterations");
    a->add_option("--reg", reg, "Tikhonov weight");
    a->add_option("--noise", noise, "relative Gaussian noise level (seeded)");
  }
  void run(Context& ctx) {
    const int g = ctx.grid_or(32);
    Grid2D layout = Grid2D::over(-1.0, 1.0, -1.0, 1.0, g, g);
    Grid2D truth = layout;
    const Fn2 h = ::phantom(phantom);
    truth.fill([&](double a, double b) { return h(a, b); });
    const Sinogram geo = Sinogram::layout(n_theta, n_p > 0 ? n_p : (3 * g) / 2, std::sqrt(2.0));
    const auto a = radon_matrix(geo, layout);
    Eigen::VectorXd x(static_cast<Eigen::Index>(g) * g);
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j) x[static_cast<Eigen::Index>(i) * g + j] = truth.v(i, j);
    Eigen::VectorXd b = a * x;
    if (noise > 0.0) {
      const double scale = noise * b.norm() / std::sqrt(static_cast<double>(b.size()));
      for (Eigen::Index i = 0; i < b.size(); ++i) {
        CounterRng rng(ctx.c.seed, static_cast<std::uint64_t>(i));
        b[i] += scale * rng.normal();
      }
    }
    CglsOptions o;
    o.max_iters = iters;
    o.reg = reg;
    ReconstructionReport rep = cgls_invert(a, b, layout, o);
    rep.rel_l2 = relative_l2(rep.grid, truth);
    write_grid(rep.grid, ctx.path("recon.csv"));
    write_json(ctx.path("report.json"), rep.to_json());
    ctx.summary = {{"rel_l2", *rep.rel_l2}, {"iterations", rep.iterations}, {"final_residual", rep.residuals.back()}};
    if (rep.diverged) throw NumericalError("cgls diverged");
  }
};

struct FourierSlice {
  std::string f = "exp(-(x1^2 + x2^2 + x3^2))";
  std::vector<double> zeta;
  double spacing = 0.5;
  int direct = 0;
  void add(CLI::App* a) {
    a->add_option("--f", f, "integrand expression");
    a->add_option("--zeta", zeta, "frequency")->delimiter(',');
    a->add_option("--spacing", spacing, "plane offset step");
    a->add_option("--direct", direct, "nodes per axis for the direct oracle (0: skip)");
  }
  void run(Context& ctx) {
    const MetricScene s = ctx.scene();
    const Vec z = zeta.empty() ? Vec::Zero(s.coord_dim()) : to_vec(zeta);
    FourierSliceOptions o;
    o.spacing = spacing;
    o.quad.tol = ctx.c.tol;
    const ScalarField fld = field(s, f);
    const cplx v = fourier_slice_recover(s, fld, z, o);
    json j = {{"zeta", std::vector<double>(z.data(), z.data() + z.size())}, {"value", cplx_json(v)}};
    if (direct > 0) {
      const cplx d = direct_fourier(s, fld, z, direct);
      j["direct"] = cplx_json(d);
      j["relative_difference"] = std::abs(v - d) / std::max(std::abs(d), 1e-300);
    }
    write_json(ctx.path("fourier.json"), j);
    ctx.summary = j;
  }
};

struct ProductPipeline {
  std::string f = "exp(-5*((x1 - 0.1)^2 + (x2 + 0.2)^2))";
  int n_theta = 180, n_p = 256;
  bool zero_data = false;
  void add(CLI::App* a) {
    a->add_option("--f", f, "integrand expression");
    a->add_option("--n-theta", n_theta, "angles");
    a->add_option("--n-p", n_p, "offsets");
    a->add_flag("--zero-data", zero_data, "replace the X-ray data by zeros");
  }
  void run(Context& ctx) {
    const MetricScene s = ctx.scene();
    if (!s.is_product()) throw ConfigError("product-pipeline needs a product scene");
    const auto c1 = find_factor_chord(s.factor(0), s.factor(0).interior_point(), 64, ctx.c.seed);
    const auto c2 = find_factor_chord(s.factor(1), s.factor(1).interior_point(), 64, ctx.c.seed);
    if (!c1 || !c2) throw NumericalError("no nontangential factor chord through the factor interior points");
    PipelineOptions o;
    o.n_theta = n_theta;
    o.n_p = n_p;
    o.grid = ctx.grid_or(129);
    o.zero_data = zero_data;
    const PipelineResult r = product_injectivity_pipeline(s, field(s, f), *c1, *c2, o);
    write_grid(r.rec.grid, ctx.path("recon.csv"));
    write_grid(r.truth, ctx.path("truth.csv"));
    write_sinogram(r.sinogram, ctx.path("sinogram.csv"));
    write_json(ctx.path("pipeline.json"), r.to_json());
    ctx.summary = {{"rel_l2", *r.rec.rel_l2}, {"sup_norm", r.rec.sup_norm}, {"identity_max_dev", r.identity_max_dev}};
  }
};

struct BeamLadder {
  std::string f = "exp(-(x1^2 + x2^2 + x3^2))";
  std::vector<double> y, eta;
  double lambda_plus = 0.0, lambda_minus = 0.0;
  void add(CLI::App* a) {
    a->add_option("--f", f, "integrand expression");
    a->add_option("--y", y, "leaf base point")->delimiter(',');
    a->add_option("--eta", eta, "leaf direction")->delimiter(',');
    a->add_option("--lambda-plus", lambda_plus, "spectral shift of w+");
    a->add_option("--lambda-minus", lambda_minus, "spectral shift of w-");
  }
  void run(Context& ctx) {
    const MetricScene s = ctx.scene();
    if (!s.is_product()) throw ConfigError("beam-ladder needs a product scene");
    BicharLeaf leaf = make_leaf(s, y, eta, {});
    screen_leaf(s, leaf);
    if (!(ctx.c.h_min > 0.0 && ctx.c.h_max >= ctx.c.h_min)) throw ConfigError("need 0 < h-min <= h-max");
    ConcentrationOptions o;
    o.k_min = static_cast<int>(std::lround(-std::log2(ctx.c.h_max)));
    o.k_max = static_cast<int>(std::lround(-std::log2(ctx.c.h_min)));
    if (ctx.c.grid > 0) o.beam.grid = ctx.c.grid;
    const PairingResult r = concentration_test(s, leaf, field(s, f), lambda_plus, lambda_minus, o);
    write_json(ctx.path("pairing.json"), r.to_json());
    CsvWriter csv(ctx.path("ladder.csv"),
                  {"h", "pairing_re", "pairing_im", "deviation", "scaled_deviation", "residual", "norm_plus", "norm_minus"});
    for (std::size_t i = 0; i < r.h.size(); ++i)
      csv.row({r.h[i], r.values[i].real(), r.values[i].imag(), r.deviations[i], r.scaled_deviations[i], r.residuals[i],
               r.norms_plus[i], r.norms_minus[i]});
    ctx.summary = {{"pass", r.pass}, {"final_scaled_deviation", r.scaled_deviations.back()}};
  }
};

struct DensityCheck {
  std::string F = "z";
  double s0 = 0.0, s1 = 1.0, t0 = 0.0, t1 = 1.0, lmin = -2.0, lmax = 2.0;
  int count = 21;
  void add(CLI::App* a) {
    a->add_option("--F", F, "holomorphic test function of z");
    a->add_option("--s0", s0);
    a->add_option("--s1", s1);
    a->add_option("--t0", t0);
    a->add_option("--t1", t1);
    a->add_option("--lambda-min", lmin);
    a->add_option("--lambda-max", lmax);
    a->add_option("--lambda-count", count);
  }
  void run(Context& ctx) {
    const DensityResult r = amplitude_density_check(F, s0, s1, t0, t1, lambda_grid(lmin, lmax, count));
    write_json(ctx.path("density.json"), r.to_json());
    ctx.summary = {{"sup_error", r.sup_error}, {"rank", r.rank}};
  }
};

void add_common(CLI::App* a, Common& c) {
  a->add_option("--scene", c.scene, "scene config JSON");
  a->add_option("--seed", c.seed, "random seed");
  a->add_option("--out", c.out, "output directory");
  a->add_option("--tol", c.tol, "quadrature tolerance");
  a->add_option("--t-cap", c.t_cap, "geodesic cutoff (0: scene default)");
  a->add_option("--h-min", c.h_min, "smallest semiclassical parameter");
  a->add_option("--h-max", c.h_max, "largest semiclassical parameter");
  a->add_option("--grid", c.grid, "grid size (0: command default)");
}

json option_values(const CLI::App* sub) {
  json j = json::object();
  for (const CLI::Option* o : sub->get_options()) {
    const std::string name = o->get_name();
    if (name == "--out" || name == "--help" || name.empty()) continue;
    if (o->count() > 0)
      j[name] = o->results();
    else
      j[name] = o->get_default_str();
  }
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"leafscope: geodesic, leaf and Radon transforms with inversion and quasimode checks"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", std::string(kVersion));

  Context ctx;
  Geodesic geodesic;
  Coverage coverage;
  LeafScreen leaf_screen;
  TrappedExample trapped;
  Xray xray;
  LeafTransform leaf_transform_cmd;
  Attenuated attenuated;
  Radon radon;
  InvertFbp fbp;
  InvertCgls cgls;
  FourierSlice fourier;
  ProductPipeline pipeline;
  BeamLadder beams;
  DensityCheck density;

  std::map<std::string, std::function<void(Context&)>> runners;
  auto reg = [&](const char* name, const char* help, auto& cmd) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, ctx.c);
    cmd.add(sub);
    runners[name] = [&cmd](Context& c) { cmd.run(c); };
    return sub;
  };
  reg("geodesic", "integrate one cogeodesic", geodesic);
  reg("coverage", "Monte-Carlo chord coverage", coverage);
  reg("leaf-screen", "build and screen a bicharacteristic leaf", leaf_screen);
  reg("trapped-example", "trapped-leaf detection on the moving-cap example", trapped);
  reg("xray", "geodesic X-ray transform samples", xray);
  reg("leaf-transform", "leaf transform with holomorphic amplitudes", leaf_transform_cmd);
  reg("attenuated", "attenuated transversal transform", attenuated);
  reg("radon", "2D Radon sinogram of a phantom", radon);
  reg("invert-fbp", "filtered backprojection", fbp);
  reg("invert-cgls", "CGLS inversion of the discrete Radon operator", cgls);
  reg("fourier-slice", "Fourier transform from parallel plane integrals", fourier);
  reg("product-pipeline", "pullback, tilted X-ray data and FBP on a product scene", pipeline);
  reg("beam-ladder", "Gaussian-beam pairing ladder", beams);
  reg("density-check", "exponential amplitude density fit", density);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  json config = {{"command", command}, {"options", option_values(sub)}};
  const auto start = std::chrono::steady_clock::now();
  int status = 0;
  std::string error;
  try {
    fs::create_directories(ctx.c.out);
    if (!ctx.c.scene.empty()) config["scene"] = read_json(ctx.c.scene);
    runners.at(command)(ctx);
  } catch (const ConfigError& e) {
    status = 1;
    error = e.what();
  } catch (const NumericalError& e) {
    status = 2;
    error = e.what();
  } catch (const std::exception& e) {
    status = 2;
    error = e.what();
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (status != 0) std::fprintf(stderr, "leafscope %s: %s\n", command.c_str(), error.c_str());
  try {
    if (status == 2)
      write_json(ctx.path("diagnostic.json"), {{"command", command}, {"error", error}, {"summary", ctx.summary}});
    json manifest = {{"command", command},
                     {"config_hash", hex64(config_hash(config))},
                     {"seed", ctx.c.seed},
                     {"options", config["options"]},
                     {"scene", ctx.c.scene},
                     {"versions", build_versions()},
                     {"exit_code", status},
                     {"outputs", ctx.outputs},
                     {"summary", ctx.summary},
                     {"wall_time_s", wall}};
    if (!error.empty()) manifest["error"] = error;
    write_json((fs::path(ctx.c.out) / "manifest.json").string(), manifest);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "leafscope: cannot write manifest: %s\n", e.what());
    if (status == 0) status = 1;
  }
  return status;
}
