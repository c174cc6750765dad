#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>

#include "leafscope/invert.hpp"
#include "leafscope/io.hpp"
#include "leafscope/parallel.hpp"
#include "leafscope/quasimode.hpp"
#include "leafscope/rng.hpp"

#ifndef LEAFSCOPE_SCENES
#define LEAFSCOPE_SCENES "scenes"
#endif

namespace fs = std::filesystem;
using namespace leafscope;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  json data = json::object();
};

struct Env {
  fs::path scenes;
  std::uint64_t seed = 20240611;
  MetricScene scene(const std::string& name) const { return build_scene_file((scenes / (name + ".json")).string()); }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

std::vector<std::string> scene_names(const Env& env) {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(env.scenes))
    if (e.path().extension() == ".json") names.push_back(e.path().stem().string());
  std::sort(names.begin(), names.end());
  return names;
}

// 1 ---------------------------------------------------------------------------
Outcome geodesic_conservation(const Env& env) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto names = scene_names(env);
  std::vector<MetricScene> scenes;
  for (const auto& n : names) scenes.push_back(env.scene(n));
  constexpr int kCount = 1000;
  constexpr double kCap = 1000.0;
  std::vector<double> drift(kCount, 0.0);
  TraceOptions opts;
  opts.record = false;
  parallel_for(kCount, [&](std::size_t i) {
    const MetricScene& s = scenes[i % scenes.size()];
    CounterRng rng(env.seed, i);
    const Vec x = s.sample_point(rng);
    const Vec xi = s.sample_unit_covector(x, rng);
    drift[i] = integrate_geodesic(s, {x, xi}, kCap, opts).energy_drift;
  });
  const double worst = *std::max_element(drift.begin(), drift.end());
  const double wall = seconds_since(t0);
  Outcome o;
  o.pass = worst < 1e-6 && wall < 60.0;
  o.detail = fmt("max |xi|_g drift %.3g over %d geodesics on %zu scenes, t <= %g (%.1f s)", worst, kCount,
                 scenes.size(), kCap, wall);
  o.data = {{"max_drift", worst}, {"scenes", names}, {"wall_s", wall}};
  return o;
}

// 2 ---------------------------------------------------------------------------
Outcome chord_coverage(const Env& env) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  o.pass = true;
  json per = json::object();
  double worst = 1.0;
  std::string first;
  for (const auto& name : scene_names(env)) {
    const MetricScene s = env.scene(name);
    if (s.is_product() || s.embedded()) continue;
    if (!check_convexity(s, 256, env.seed).strictly_convex) continue;
    const CoverageReport r = coverage_monte_carlo(s, 1000, 64, s.default_t_cap(), env.seed);
    per[name] = r.fraction;
    worst = std::min(worst, r.fraction);
    if (r.fraction < 0.999) o.pass = false;
    if (first.empty()) first = name;
  }
  bool reproducible = true;
  if (!first.empty()) {
    const MetricScene s = env.scene(first);
    const int before = worker_count();
    set_worker_count(before == 1 ? 3 : 1);
    const std::string a = coverage_monte_carlo(s, 1000, 64, s.default_t_cap(), env.seed).to_json().dump();
    set_worker_count(before);
    const std::string b = coverage_monte_carlo(s, 1000, 64, s.default_t_cap(), env.seed).to_json().dump();
    reproducible = a == b;
  }
  o.pass = o.pass && reproducible && !per.empty();
  o.detail = fmt("min covered fraction %.6f over %zu strictly convex scenes, reproducible %s (%.1f s)", worst,
                 per.size(), reproducible ? "yes" : "no", seconds_since(t0));
  o.data = {{"fractions", per}, {"reproducible", reproducible}};
  return o;
}

// 3 ---------------------------------------------------------------------------
Outcome b1_nullity(const Env& env) {
  const auto t0 = std::chrono::steady_clock::now();
  const MetricScene s = env.scene("trapped_example");
  const MeasureReport m = b1_measure_estimate(s, 10000, s.default_t_cap(), env.seed);
  Outcome o;
  o.pass = m.b1_fraction() < 0.02;
  o.detail = fmt("mu(B1)/mu(SM) ~ %.4f (B2 %.4f) from %d samples (%.1f s)", m.b1_fraction(), m.b2_fraction(),
                 m.n_samples, seconds_since(t0));
  o.data = m.to_json();
  return o;
}

// 4 ---------------------------------------------------------------------------
Outcome involutivity(const Env& env) {
  const auto t0 = std::chrono::steady_clock::now();
  const MetricScene s = env.scene("product_interval_torus");
  const LCW lcw = LCW::natural();
  constexpr int kCount = 100;
  std::vector<double> dev_a(kCount), dev_b(kCount);
  parallel_for(kCount, [&](std::size_t i) {
    CounterRng rng(env.seed, 4000 + i);
    Vec x = s.sample_point(rng);
    x[0] = rng.uniform(-0.5, 0.5);
    Vec xi = s.sample_unit_covector(x, rng);
    xi[0] = 0.0;
    xi /= s.norm_covector(x, xi);
    dev_a[i] = symbol_deviation(s, lcw, hamilton_curve(s, lcw, {x, xi}, HamiltonField::A, 50.0));
    // H_b translates x_1 at speed 2; stay inside the chart
    dev_b[i] = symbol_deviation(s, lcw, hamilton_curve(s, lcw, {x, xi}, HamiltonField::B, 0.25));
  });
  const double wa = *std::max_element(dev_a.begin(), dev_a.end());
  const double wb = *std::max_element(dev_b.begin(), dev_b.end());
  Outcome o;
  o.pass = std::max(wa, wb) < 1e-6;
  o.detail = fmt("max(|a|,|b|) %.3g along H_a (t <= 50), %.3g along H_b, %d curves (%.1f s)", wa, wb, kCount,
                 seconds_since(t0));
  o.data = {{"max_dev_a", wa}, {"max_dev_b", wb}};
  return o;
}

// 5 ---------------------------------------------------------------------------
Outcome trapped_leaves(const Env&) {
  const auto t0 = std::chrono::steady_clock::now();
  const MetricScene s = build_trapped_example(3, 0.05);
  const TrappedReport r = detect_all_trapped(s, 32, kTrappedScreenCap);
  Outcome o;
  o.pass = r.total == 32 * 32 && r.trapped == r.total && r.verified == r.total;
  o.detail = fmt("%s: %d/%d trapped, %d verified at t_cap %g and %g (%.1f s)",
                 r.to_json()["summary"].get<std::string>().c_str(), r.trapped, r.total, r.verified, r.t_cap,
                 2.0 * r.t_cap, seconds_since(t0));
  o.data = {{"trapped", r.trapped}, {"verified", r.verified}, {"total", r.total}};
  return o;
}

// 6 ---------------------------------------------------------------------------
Outcome product_identity(const Env& env) {
  auto t0 = std::chrono::steady_clock::now();
  const MetricScene s = env.scene("product_interval_plane");
  const FactorGeodesic g1 = factor_geodesic(s.factor(0), {vec({0.0}), vec({1.0})});
  const FactorGeodesic g2 = factor_geodesic(s.factor(1), {vec({0.0, 0.3}), vec({1.0, 0.0})});
  const ScalarField f = ScalarField::expression(s, "exp(-(x1^2 + x2^2 + x3^2)) * (1 + 0.3*x2)");
  const Fn2 h = product_pullback(s, f, g1, g2);
  Box box;
  box.lo = Vec::Zero(2);
  box.hi = vec({g1.length, g2.length});
  const Eigen::Vector2d c(0.5 * g1.length, 0.5 * g2.length);
  const double reach = 0.5 * std::hypot(g1.length, g2.length);
  QuadratureOptions qo;
  qo.tol = 1e-9;
  constexpr int kCount = 1000;
  std::vector<double> dev(kCount);
  parallel_for(kCount, [&](std::size_t i) {
    CounterRng rng(env.seed, 6000 + i);
    const double th = rng.uniform(0.0, kPi);
    const double p = rng.uniform(-0.95 * reach, 0.95 * reach);
    const Eigen::Vector2d a = c + p * Eigen::Vector2d(-std::sin(th), std::cos(th));
    const GeodesicTrace tr = tilted_geodesic(s, g1, g2, th, a);
    const double x = xray_transform(s, f, tr, qo).value.real();
    dev[i] = std::abs(x - radon_2d(h, box, th, p, qo, c));
  });
  const double worst = *std::max_element(dev.begin(), dev.end());
  const double t_identity = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const MetricScene q = env.scene("product_intervals");
  const auto c1 = find_factor_chord(q.factor(0), q.factor(0).interior_point(), 64, env.seed);
  const auto c2 = find_factor_chord(q.factor(1), q.factor(1).interior_point(), 64, env.seed);
  double rel = 1.0;
  if (c1 && c2) {
    const ScalarField bump = ScalarField::expression(q, "exp(-5*((x1 - 0.1)^2 + (x2 + 0.2)^2))");
    rel = *product_injectivity_pipeline(q, bump, *c1, *c2).rec.rel_l2;
  }
  const double t_pipe = seconds_since(t0);
  Outcome o;
  o.pass = worst < 1e-6 && rel < 0.05 && t_pipe < 120.0;
  o.detail = fmt("tilted X-ray vs Radon max dev %.3g on %d (theta, a) (%.1f s); pipeline 180x256 rel L2 %.4f (%.1f s)",
                 worst, kCount, t_identity, rel, t_pipe);
  o.data = {{"identity_max_dev", worst}, {"pipeline_rel_l2", rel}, {"pipeline_wall_s", t_pipe}};
  return o;
}

// 7 ---------------------------------------------------------------------------
Outcome leaf_attenuated(const Env& env) {
  const auto t0 = std::chrono::steady_clock::now();
  const MetricScene s = env.scene("product_interval_plane");
  const ScalarField q1 = ScalarField::expression(s, "exp(-(x1^2 + x2^2 + x3^2)) * (1 + 0.3*x2)");
  const ScalarField q2 = ScalarField::expression(s, "exp(-(x1^2 + x2^2 + x3^2)) * (1 + 0.3*x2)");
  const ScalarField diff = q1 - q2;
  const std::vector<double> lambdas{0.0, 0.25, 0.5, 0.75, 1.0};
  const std::vector<std::pair<Vec, Vec>> rays{
      {vec({0.0, 0.0, 0.0}), vec({0.0, 1.0, 0.0})},    {vec({0.0, -0.2, -0.5}), vec({0.0, 0.6, 0.8})},
      {vec({0.1, 0.4, 0.1}), vec({0.0, 0.0, 1.0})},    {vec({-0.2, 0.3, -0.3}), vec({0.0, -0.8, 0.6})},
      {vec({0.0, -0.6, 0.2}), vec({0.0, 0.28, -0.96})}};
  std::vector<double> dev(lambdas.size() * rays.size());
  std::vector<double> zero(dev.size());
  parallel_for(dev.size(), [&](std::size_t k) {
    const double l = lambdas[k % lambdas.size()];
    const auto& [y, eta] = rays[k / lambdas.size()];
    BicharLeaf leaf = build_leaf(s, y, eta);
    screen_leaf(s, leaf);
    const cplx a = attenuated_transversal_transform(s, q1, leaf.transversal, l).value;
    const cplx b = leaf_transform(s, q1, leaf, HoloAmplitude{2.0 * l}).value;
    dev[k] = std::abs(b - std::exp(cplx(0.0, 2.0 * l * y[0])) * a);
    zero[k] = std::abs(leaf_transform(s, diff, leaf, HoloAmplitude{2.0 * l}).value) +
              std::abs(attenuated_transversal_transform(s, diff, leaf.transversal, l).value);
  });
  const double worst = *std::max_element(dev.begin(), dev.end());
  const double z = *std::max_element(zero.begin(), zero.end());
  Outcome o;
  o.pass = worst < 1e-6 && z == 0.0;
  o.detail = fmt("max leaf/attenuated deviation %.3g over 5x5 (lambda, geodesic); q1 = q2 gives %.3g (%.1f s)", worst,
                 z, seconds_since(t0));
  o.data = {{"max_dev", worst}, {"equal_inputs", z}};
  return o;
}

// 8 ---------------------------------------------------------------------------
Outcome fourier_slice(const Env& env) {
  const auto t0 = std::chrono::steady_clock::now();
  const MetricScene s = env.scene("ball3_large");
  const ScalarField f = ScalarField::expression(s, "exp(-(x1^2 + x2^2 + x3^2))");
  std::vector<Vec> zetas;
  for (double k : {0.0, 0.5, 1.0, 1.5, 2.0}) {
    zetas.push_back(vec({0.6 * k, 0.0, 0.8 * k}));
    if (k > 0.0) zetas.push_back(vec({0.48 * k, -0.6 * k, 0.64 * k}));
  }
  std::vector<double> rel(zetas.size());
  parallel_for(zetas.size(), [&](std::size_t i) {
    const double k2 = zetas[i].squaredNorm();
    const double exact = std::pow(kPi, 1.5) * std::exp(-k2 / 4.0);
    rel[i] = std::abs(fourier_slice_recover(s, f, zetas[i]) - exact) / exact;
  });
  const double worst = *std::max_element(rel.begin(), rel.end());
  Outcome o;
  o.pass = worst < 1e-3;
  o.detail = fmt("max relative error %.3g against pi^{3/2} e^{-|zeta|^2/4}, %zu frequencies |zeta| <= 2 (%.1f s)", worst,
                 zetas.size(), seconds_since(t0));
  o.data = {{"max_rel", worst}};
  return o;
}

// 9 ---------------------------------------------------------------------------
Outcome concentration(const Env& env) {
  const auto t0 = std::chrono::steady_clock::now();
  const MetricScene s = env.scene("product_interval_plane");
  BicharLeaf leaf = build_leaf(s, vec({0.0, -0.2, -0.5}), vec({0.0, 0.6, 0.8}));
  screen_leaf(s, leaf);
  const ScalarField f = ScalarField::expression(s, "exp(-(x1^2 + x2^2 + x3^2))");
  ConcentrationOptions co;
  co.k_min = 2;
  co.k_max = 7;
  const PairingResult r = concentration_test(s, leaf, f, 0.0, 0.0, co);

  BeamOptions bo;
  bo.kind = BeamKind::PlaneWave;
  double plane = 0.0;
  for (int k = 2; k <= 7; ++k) {
    const double h = std::ldexp(1.0, -k);
    const TransversalBeam v(s.factor(1), leaf.transversal, h, 0.0, 1, bo);
    plane = std::max(plane, v.residual_l2() * h * h / v.norm_l2());
  }
  bool monotone = true;
  for (std::size_t i = 1; i < r.deviations.size(); ++i) monotone = monotone && r.deviations[i] <= r.deviations[i - 1];
  const double final_dev = r.scaled_deviations.back();
  Outcome o;
  o.pass = monotone && final_dev < 1e-2 && plane < 1e-12;
  std::string ladder;
  for (double d : r.deviations) ladder += fmt("%s%.3g", ladder.empty() ? "" : " ", d);
  o.detail = fmt("deviations [%s] monotone %s, final %.3g (scaled by max(1,|target|) = %.3g); plane-wave relative "
                 "residual %.3g (%.1f s)",
                 ladder.c_str(), monotone ? "yes" : "no", final_dev, r.scale, plane, seconds_since(t0));
  o.data = r.to_json();
  o.data["plane_wave_residual"] = plane;
  return o;
}

// 10 --------------------------------------------------------------------------
Outcome amplitude_density(const Env&) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::string> fs{"1", "z", "z^2", "z^3", "1 + 2*z - 0.5*z^3"};
  json per = json::object();
  double worst = 0.0;
  for (const auto& f : fs) {
    const DensityResult r = amplitude_density_check(f, 0.0, 1.0, 0.0, 1.0, lambda_grid(-2.0, 2.0, 21));
    per[f] = r.sup_error;
    worst = std::max(worst, r.sup_error);
  }
  Outcome o;
  o.pass = worst < 1e-3;
  o.detail = fmt("max sup error %.3g for F up to degree 3 on [0,1]^2, 21-point lambda grid on [-2,2] (%.1f s)", worst,
                 seconds_since(t0));
  o.data = per;
  return o;
}

// 11 --------------------------------------------------------------------------
std::string determinism_fingerprint(const Env& env) {
  std::string out;
  const MetricScene disk = env.scene("perturbed_disk");
  out += coverage_monte_carlo(disk, 200, 16, disk.default_t_cap(), env.seed).to_json().dump();
  std::vector<std::string> xr(48);
  const ScalarField f = ScalarField::expression(disk, "exp(-(x1^2 + x2^2))");
  parallel_for(xr.size(), [&](std::size_t i) {
    CounterRng rng(env.seed, 11000 + i);
    const Vec x = disk.sample_point(rng);
    const GeodesicTrace tr = integrate_geodesic(disk, {x, disk.sample_unit_covector(x, rng)}, disk.default_t_cap());
    xr[i] = tr.trapped() ? "trapped" : format_double(xray_transform(disk, f, tr).value.real());
  });
  for (const auto& v : xr) out += v + ",";
  Sinogram s = Sinogram::layout(48, 64, 1.5);
  Box box;
  box.lo = Vec::Constant(2, -1.0);
  box.hi = Vec::Constant(2, 1.0);
  const Fn2 g = [](double a, double b) { return std::exp(-4.0 * (a * a + b * b)); };
  synthesize(s, [&](double th, double p) { return radon_2d(g, box, th, p); });
  const ReconstructionReport rep = fbp_invert(s, Grid2D::over(-1.0, 1.0, -1.0, 1.0, 33, 33));
  for (Eigen::Index i = 0; i < rep.grid.v.size(); ++i) out += format_double(rep.grid.v.data()[i]) + ",";
  return out;
}

Outcome determinism(const Env& env) {
  const auto t0 = std::chrono::steady_clock::now();
  const int before = worker_count();
  std::vector<std::string> prints;
  for (int n : {1, 2, 5}) {
    set_worker_count(n);
    prints.push_back(determinism_fingerprint(env));
  }
  set_worker_count(before);
  const bool same = std::all_of(prints.begin(), prints.end(), [&](const std::string& p) { return p == prints[0]; });
  Outcome o;
  o.pass = same;
  o.detail = fmt("coverage, X-ray and FBP outputs identical under 1, 2, 5 workers: %s (%zu bytes; CLI runs are "
                 "compared by the cli_smoke test) (%.1f s)",
                 same ? "yes" : "no", prints[0].size(), seconds_since(t0));
  o.data = {{"identical", same}, {"bytes", prints[0].size()}};
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"leafscope acceptance suite"};
  Env env;
  std::string out;
  std::string scenes = LEAFSCOPE_SCENES;
  std::vector<int> only;
  app.add_option("--out", out, "directory for acceptance.json");
  app.add_option("--scenes", scenes, "scene config directory");
  app.add_option("--seed", env.seed, "random seed");
  app.add_option("--only", only, "run a subset of criteria")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  env.scenes = scenes;

  const std::vector<std::pair<std::string, std::function<Outcome(const Env&)>>> criteria{
      {"geodesic conservation", geodesic_conservation},
      {"chord coverage", chord_coverage},
      {"B1 nullity", b1_nullity},
      {"characteristic involutivity", involutivity},
      {"trapped leaves", trapped_leaves},
      {"product X-ray identity and pipeline", product_identity},
      {"leaf/attenuated consistency", leaf_attenuated},
      {"Fourier slice", fourier_slice},
      {"beam concentration", concentration},
      {"amplitude density", amplitude_density},
      {"determinism", determinism},
  };
  const std::set<int> wanted(only.begin(), only.end());
  json report = json::array();
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!wanted.empty() && !wanted.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second(env);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("error: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("%-4s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
    report.push_back({{"criterion", id}, {"name", criteria[i].first}, {"pass", o.pass}, {"detail", o.detail},
                      {"data", o.data}});
  }
  if (!out.empty()) {
    fs::create_directories(out);
    write_json((fs::path(out) / "acceptance.json").string(), report);
  }
  return failed == 0 ? 0 : 1;
}
