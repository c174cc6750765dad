#include "leafscope/flow.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "leafscope/io.hpp"
#include "leafscope/parallel.hpp"

namespace leafscope {

namespace {

struct Phase {
  Vec x, xi;
};

Phase rates(const MetricScene& scene, const Phase& z) {
  Phase d;
  Vec xw = z.x;
  scene.wrap(xw);
  scene.geodesic_rhs(xw, z.xi, d.x, d.xi);
  return d;
}

Phase rk4(const MetricScene& scene, const Phase& z, double h) {
  const Phase k1 = rates(scene, z);
  const Phase k2 = rates(scene, {z.x + 0.5 * h * k1.x, z.xi + 0.5 * h * k1.xi});
  const Phase k3 = rates(scene, {z.x + 0.5 * h * k2.x, z.xi + 0.5 * h * k2.xi});
  const Phase k4 = rates(scene, {z.x + h * k3.x, z.xi + h * k3.xi});
  Phase out{z.x + (h / 6.0) * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
            z.xi + (h / 6.0) * (k1.xi + 2.0 * k2.xi + 2.0 * k3.xi + k4.xi)};
  scene.wrap(out.x);
  return out;
}

bool finite(const Phase& z) { return z.x.allFinite() && z.xi.allFinite(); }

// One time direction of a trace.
struct Side {
  std::vector<double> t;
  std::vector<Phase> z;
  std::optional<double> exit_time;
  std::optional<Phase> exit_point;
  bool left_chart = false;
  double drift = 0.0;
  double body_max = -std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, double>> head;  // (t, rho) of the first few samples
};

constexpr int kGuardSteps = 2;  // samples this close to a crossing are not "interior"

Side run_side(const MetricScene& scene, const Phase& start, double t_cap, double h_nominal, bool record,
              std::size_t max_samples) {
  Side side;
  const int n_steps = std::max(1, static_cast<int>(std::ceil(t_cap / h_nominal)));
  const double h = t_cap / n_steps;
  const double e0 = scene.norm_covector(start.x, start.xi);
  const double head_window = kGuardSteps * h * 1.5;
  std::deque<double> tail;
  std::size_t stride = 1;
  if (record) {
    side.t.push_back(0.0);
    side.z.push_back(start);
  }
  Phase z = start;
  for (int k = 1; k <= n_steps; ++k) {
    const Phase next = rk4(scene, z, h);
    if (!finite(next)) throw NumericalError("geodesic integration produced non-finite values");
    const double r = scene.rho(next.x);
    if (r > 0.0) {
      double lo = 0.0, hi = h;
      while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        (scene.rho(rk4(scene, z, mid).x) > 0.0 ? hi : lo) = mid;
      }
      const double tau = 0.5 * (lo + hi);
      side.exit_time = (k - 1) * h + tau;
      side.exit_point = rk4(scene, z, tau);
      side.drift = std::max(side.drift, std::abs(scene.norm_covector(side.exit_point->x, side.exit_point->xi) - e0));
      if (record) {
        side.t.push_back(*side.exit_time);
        side.z.push_back(*side.exit_point);
      }
      return side;
    }
    if (!scene.embedded() &&
        !scene.in_chart(std::span<const double>(next.x.data(), static_cast<std::size_t>(next.x.size())))) {
      side.left_chart = true;
      return side;
    }
    const double tk = k * h;
    if (tk < head_window) {
      side.head.emplace_back(tk, r);
    } else {
      tail.push_back(r);
      if (static_cast<int>(tail.size()) > kGuardSteps) {
        side.body_max = std::max(side.body_max, tail.front());
        tail.pop_front();
      }
    }
    if (k % 16 == 0 || k == n_steps)
      side.drift = std::max(side.drift, std::abs(scene.norm_covector(next.x, next.xi) - e0));
    if (record && k % stride == 0) {
      side.t.push_back(tk);
      side.z.push_back(next);
      if (side.z.size() > max_samples) {
        std::size_t w = 0;
        for (std::size_t i = 0; i < side.z.size(); i += 2, ++w) {
          side.t[w] = side.t[i];
          side.z[w] = side.z[i];
        }
        side.t.resize(w);
        side.z.resize(w);
        stride *= 2;
      }
    }
    z = next;
  }
  // trapped side: the remaining tail samples are interior too
  for (double r : tail) side.body_max = std::max(side.body_max, r);
  return side;
}

Crossing make_crossing(const MetricScene& scene, double t, const Phase& z, double sign) {
  Crossing c;
  c.t = t;
  c.x = z.x;
  c.xi = sign * z.xi;
  const Vec nu = outward_conormal(scene, z.x);
  // measured along the direction of travel of this side, so exits have cosine > 0
  c.cosine = inner_covectors(scene, z.x, z.xi, nu) / scene.norm_covector(z.x, z.xi);
  if (sign < 0) c.cosine = -c.cosine;
  c.tangential = std::abs(c.cosine) <= kTangencyTol;
  return c;
}

}  // namespace

double inner_covectors(const MetricScene& scene, const Vec& x, const Vec& a, const Vec& b) {
  if (scene.embedded()) return scene.project_covector(x, a).dot(scene.project_covector(x, b));
  return a.dot(scene.metric(x).ldlt().solve(b));
}

GeodesicTrace integrate_geodesic(const MetricScene& scene, const PhasePoint& p0, double t_cap,
                                 const TraceOptions& opts) {
  if (!(t_cap > 0.0)) throw ConfigError("t_cap must be positive");
  if (p0.x.size() != scene.coord_dim() || p0.xi.size() != scene.coord_dim())
    throw ConfigError("phase point has wrong dimension");
  if (!scene.embedded() &&
      !scene.in_chart(std::span<const double>(p0.x.data(), static_cast<std::size_t>(p0.x.size()))))
    throw ConfigError("starting point outside the chart");
  if (opts.check_inside && scene.rho(p0.x) > 1e-9) throw ConfigError("starting point outside M");
  const double h = opts.step > 0.0 ? opts.step : scene.integration_step();

  Phase start{p0.x, scene.project_covector(p0.x, p0.xi)};
  scene.wrap(start.x);
  const Side fwd = run_side(scene, start, t_cap, h, opts.record, opts.max_samples);
  const Side bwd = run_side(scene, {start.x, -start.xi}, t_cap, h, opts.record, opts.max_samples);

  GeodesicTrace tr;
  tr.t_cap = t_cap;
  tr.step = h;
  tr.periods = scene.periods();
  tr.energy = scene.norm_covector(start.x, start.xi);
  tr.energy_drift = std::max(fwd.drift, bwd.drift);
  tr.left_chart = fwd.left_chart || bwd.left_chart;
  if (fwd.exit_time) {
    tr.l_plus = *fwd.exit_time;
    tr.exit = make_crossing(scene, *fwd.exit_time, *fwd.exit_point, 1.0);
  }
  if (bwd.exit_time) {
    tr.l_minus = -*bwd.exit_time;
    tr.entry = make_crossing(scene, -*bwd.exit_time, *bwd.exit_point, -1.0);
  }

  // interior check: drop samples within the guard band of either crossing
  const double guard = kGuardSteps * h * 1.0000001;
  const double lo = tr.l_minus ? *tr.l_minus : -std::numeric_limits<double>::infinity();
  const double hi = tr.l_plus ? *tr.l_plus : std::numeric_limits<double>::infinity();
  double m = std::max(fwd.body_max, bwd.body_max);
  if (lo + guard < 0.0 && 0.0 < hi - guard) m = std::max(m, scene.rho(start.x));
  for (const auto& [t, r] : fwd.head)
    if (t > lo + guard && t < hi - guard) m = std::max(m, r);
  for (const auto& [t, r] : bwd.head)
    if (-t > lo + guard && -t < hi - guard) m = std::max(m, r);
  tr.max_interior_rho = m;

  if (opts.record) {
    const std::size_t nb = bwd.z.size(), nf = fwd.z.size();
    tr.t.reserve(nb + nf);
    tr.samples.reserve(nb + nf);
    for (std::size_t i = nb; i-- > 1;) {
      tr.t.push_back(-bwd.t[i]);
      tr.samples.push_back({bwd.z[i].x, -bwd.z[i].xi});
    }
    for (std::size_t i = 0; i < nf; ++i) {
      tr.t.push_back(fwd.t[i]);
      tr.samples.push_back({fwd.z[i].x, fwd.z[i].xi});
    }
    tr.rates.reserve(tr.samples.size());
    for (const auto& s : tr.samples) {
      const Phase d = rates(scene, {s.x, s.xi});
      tr.rates.push_back({d.x, d.xi});
    }
  }
  return tr;
}

double GeodesicTrace::arc_length() const {
  const double lo = l_minus ? *l_minus : -t_cap;
  const double hi = l_plus ? *l_plus : t_cap;
  return energy * (hi - lo);
}

namespace {

Vec unwrap_to(const Vec& ref, Vec x, const Vec& periods) {
  for (int i = 0; i < periods.size(); ++i) {
    const double p = periods[i];
    if (p <= 0.0) continue;
    x[i] -= p * std::round((x[i] - ref[i]) / p);
  }
  return x;
}

}  // namespace

PhasePoint GeodesicTrace::phase_at(double time) const {
  if (t.empty()) throw ConfigError("trace has no recorded samples");
  if (time <= t.front()) return samples.front();
  if (time >= t.back()) return samples.back();
  const std::size_t j = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), time) - t.begin());
  const std::size_t i = j - 1;
  const double dt = t[j] - t[i];
  const double s = (time - t[i]) / dt;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  const Vec x1 = unwrap_to(samples[i].x, samples[j].x, periods);
  PhasePoint p;
  p.x = h00 * samples[i].x + h10 * dt * rates[i].x + h01 * x1 + h11 * dt * rates[j].x;
  p.xi = h00 * samples[i].xi + h10 * dt * rates[i].xi + h01 * samples[j].xi + h11 * dt * rates[j].xi;
  return p;
}

Vec GeodesicTrace::position_at(double time) const { return phase_at(time).x; }

ExitTimes exit_times(const MetricScene& scene, const PhasePoint& p0, double t_cap) {
  if (scene.rho(p0.x) > 1e-9) throw ConfigError("exit_times: starting point outside M");
  TraceOptions opts;
  opts.record = false;
  const GeodesicTrace tr = integrate_geodesic(scene, p0, t_cap, opts);
  return {tr.l_minus, tr.l_plus};
}

std::string to_string(DirectionClass c) {
  switch (c) {
    case DirectionClass::G: return "G";
    case DirectionClass::B1: return "B1";
    case DirectionClass::B2: return "B2";
  }
  return "?";
}

DirectionClass classify(const GeodesicTrace& trace) {
  const int finite = (trace.l_minus ? 1 : 0) + (trace.l_plus ? 1 : 0);
  return finite == 2 ? DirectionClass::G : finite == 1 ? DirectionClass::B1 : DirectionClass::B2;
}

DirectionClass classify_direction(const MetricScene& scene, const PhasePoint& p0, double t_cap) {
  TraceOptions opts;
  opts.record = false;
  return classify(integrate_geodesic(scene, p0, t_cap, opts));
}

bool nontangential(const GeodesicTrace& trace, double tang_tol) {
  if (trace.trapped() || !trace.entry || !trace.exit) throw ConfigError("nontangential: trace is trapped");
  return std::abs(trace.entry->cosine) > tang_tol && std::abs(trace.exit->cosine) > tang_tol &&
         trace.max_interior_rho < -kInteriorTol;
}

IntegralCurve integrate_field(const VectorField& field, const Eigen::VectorXd& z0, double t0, double t1,
                              double step) {
  if (!(step > 0.0)) throw ConfigError("integration step must be positive");
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(t1 - t0) / step)));
  const double h = (t1 - t0) / n;
  IntegralCurve c;
  c.t.reserve(static_cast<std::size_t>(n) + 1);
  c.z.reserve(static_cast<std::size_t>(n) + 1);
  c.t.push_back(t0);
  c.z.push_back(z0);
  Eigen::VectorXd z = z0;
  for (int k = 1; k <= n; ++k) {
    const Eigen::VectorXd k1 = field(z);
    const Eigen::VectorXd k2 = field(z + 0.5 * h * k1);
    const Eigen::VectorXd k3 = field(z + 0.5 * h * k2);
    const Eigen::VectorXd k4 = field(z + h * k3);
    z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!z.allFinite()) throw NumericalError("integral curve produced non-finite values");
    c.t.push_back(t0 + k * h);
    c.z.push_back(z);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Monte-Carlo drivers

namespace {

nlohmann::json vec_json(const Vec& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

}  // namespace

nlohmann::json CoverageReport::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["n_points"] = n_points;
  j["n_dirs"] = n_dirs;
  j["t_cap"] = t_cap;
  j["covered"] = covered;
  j["fraction"] = fraction;
  j["convexity_checked"] = convexity_checked;
  j["strictly_convex"] = strictly_convex;
  j["warnings"] = warnings;
  j["richardson_max_diff"] = richardson_max_diff;
  j["uncovered"] = nlohmann::json::array();
  for (const auto& u : uncovered) j["uncovered"].push_back(vec_json(u));
  return j;
}

CoverageReport coverage_monte_carlo(const MetricScene& scene, int n_points, int n_dirs, double t_cap,
                                    std::uint64_t seed) {
  if (n_points <= 0 || n_dirs <= 0) throw ConfigError("coverage needs positive sample counts");
  CoverageReport rep;
  rep.seed = seed;
  rep.n_points = n_points;
  rep.n_dirs = n_dirs;
  rep.t_cap = t_cap;
  if (scene.embedded()) {
    rep.warnings.push_back("convexity not checked: ambient-coordinate scene; coverage hypotheses unverified");
  } else {
    rep.convexity_checked = true;
    const ConvexityCheck cc = check_convexity(scene, 256, seed);
    rep.strictly_convex = cc.strictly_convex;
    if (cc.skipped > 0)
      rep.warnings.push_back(std::to_string(cc.skipped) + " convexity rays never reached dM; coverage hypotheses unverified");
    else if (!cc.strictly_convex)
      rep.warnings.push_back("boundary not strictly convex (min eigenvalue " + format_double(cc.min_eigenvalue) +
                             "); coverage hypotheses unmet");
  }

  std::vector<char> covered(static_cast<std::size_t>(n_points), 0);
  std::vector<Vec> points(static_cast<std::size_t>(n_points));
  std::vector<double> rich(static_cast<std::size_t>(n_points), 0.0);
  parallel_for(static_cast<std::size_t>(n_points), [&](std::size_t i) {
    CounterRng rng(seed, i);
    const Vec x = scene.sample_point(rng);
    points[i] = x;
    TraceOptions opts;
    opts.record = false;
    for (int d = 0; d < n_dirs; ++d) {
      const Vec xi = scene.sample_unit_covector(x, rng);
      const GeodesicTrace tr = integrate_geodesic(scene, {x, xi}, t_cap, opts);
      if (i % 100 == 0 && d == 0 && !tr.trapped()) {
        TraceOptions half = opts;
        half.step = 0.5 * tr.step;
        const GeodesicTrace tr2 = integrate_geodesic(scene, {x, xi}, t_cap, half);
        if (!tr2.trapped())
          rich[i] = std::max(std::abs(*tr.l_plus - *tr2.l_plus), std::abs(*tr.l_minus - *tr2.l_minus));
        else
          rich[i] = std::numeric_limits<double>::infinity();
      }
      if (!tr.trapped() && nontangential(tr)) {
        covered[i] = 1;
        break;
      }
    }
  });
  for (std::size_t i = 0; i < covered.size(); ++i) {
    if (covered[i]) ++rep.covered;
    else rep.uncovered.push_back(points[i]);
    rep.richardson_max_diff = std::max(rep.richardson_max_diff, rich[i]);
  }
  rep.fraction = static_cast<double>(rep.covered) / n_points;
  return rep;
}

nlohmann::json MeasureReport::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["n_samples"] = n_samples;
  j["t_cap"] = t_cap;
  j["good"] = good;
  j["b1"] = b1;
  j["b2"] = b2;
  j["b1_fraction"] = b1_fraction();
  j["b2_fraction"] = b2_fraction();
  return j;
}

MeasureReport b1_measure_estimate(const MetricScene& scene, int n_samples, double t_cap, std::uint64_t seed) {
  if (n_samples <= 0) throw ConfigError("b1_measure_estimate needs a positive sample count");
  std::vector<DirectionClass> cls(static_cast<std::size_t>(n_samples));
  parallel_for(cls.size(), [&](std::size_t i) {
    CounterRng rng(seed, i);
    const Vec x = scene.sample_point(rng);
    const Vec xi = scene.sample_unit_covector(x, rng);
    cls[i] = classify_direction(scene, {x, xi}, t_cap);
  });
  MeasureReport rep;
  rep.seed = seed;
  rep.n_samples = n_samples;
  rep.t_cap = t_cap;
  for (auto c : cls) {
    if (c == DirectionClass::G) ++rep.good;
    else if (c == DirectionClass::B1) ++rep.b1;
    else ++rep.b2;
  }
  return rep;
}

void write_trace_csv(const MetricScene& scene, const GeodesicTrace& trace, const std::string& path) {
  const int n = scene.coord_dim();
  std::vector<std::string> header{"t"};
  for (int i = 1; i <= n; ++i) header.push_back("x" + std::to_string(i));
  for (int i = 1; i <= n; ++i) header.push_back("xi" + std::to_string(i));
  header.push_back("rho");
  CsvWriter csv(path, header);
  std::vector<double> row(static_cast<std::size_t>(2 * n + 2));
  for (std::size_t k = 0; k < trace.t.size(); ++k) {
    row[0] = trace.t[k];
    for (int i = 0; i < n; ++i) {
      row[static_cast<std::size_t>(1 + i)] = trace.samples[k].x[i];
      row[static_cast<std::size_t>(1 + n + i)] = trace.samples[k].xi[i];
    }
    row.back() = scene.rho(trace.samples[k].x);
    csv.row(row);
  }
}

}  // namespace leafscope
