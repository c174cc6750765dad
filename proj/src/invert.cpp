#include "leafscope/invert.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "leafscope/io.hpp"
#include "leafscope/parallel.hpp"
#include "leafscope/rng.hpp"

namespace leafscope {

Sinogram Sinogram::layout(int n_theta, int n_p, double p_max, const Eigen::Vector2d& center) {
  if (n_theta < 1 || n_p < 2 || !(p_max > 0.0)) throw ConfigError("bad sinogram layout");
  Sinogram s;
  s.theta.resize(static_cast<std::size_t>(n_theta));
  s.p.resize(static_cast<std::size_t>(n_p));
  for (int k = 0; k < n_theta; ++k) s.theta[static_cast<std::size_t>(k)] = kPi * k / n_theta;
  for (int j = 0; j < n_p; ++j) s.p[static_cast<std::size_t>(j)] = -p_max + 2.0 * p_max * j / (n_p - 1);
  s.values = Eigen::MatrixXd::Zero(n_theta, n_p);
  s.center = center;
  return s;
}

void Sinogram::validate() const {
  if (theta.empty() || p.size() < 2) throw ConfigError("sinogram grids are empty");
  if (values.rows() != static_cast<Eigen::Index>(theta.size()) || values.cols() != static_cast<Eigen::Index>(p.size()))
    throw ConfigError("sinogram value matrix does not match its grids");
  auto uniform = [](const std::vector<double>& g) {
    if (g.size() < 2) return true;
    const double d = g[1] - g[0];
    for (std::size_t i = 1; i < g.size(); ++i)
      if (std::abs(g[i] - g[i - 1] - d) > 1e-9 * std::max(1.0, std::abs(d))) return false;
    return d > 0.0;
  };
  if (!uniform(theta) || !uniform(p)) throw ConfigError("sinogram grids are not uniform");
  if (!values.allFinite()) throw NumericalError("sinogram has non-finite values");
}

void write_sinogram(const Sinogram& s, const std::string& path) { write_sinogram_csv(s.theta, s.p, s.values, path); }

Sinogram read_sinogram(const std::string& path, const Eigen::Vector2d& center) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read sinogram " + path);
  std::string line;
  std::getline(in, line);
  if (line != "theta,p,value") throw ConfigError("sinogram header must be theta,p,value");
  std::vector<double> th, pp, vv;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c))
      throw ConfigError("malformed sinogram row: " + line);
    try {
      th.push_back(std::stod(a));
      pp.push_back(std::stod(b));
      vv.push_back(std::stod(c));
    } catch (const std::logic_error&) {
      throw ConfigError("malformed sinogram row: " + line);
    }
  }
  Sinogram s;
  s.center = center;
  s.provenance = path;
  for (double t : th)
    if (s.theta.empty() || t != s.theta.back()) s.theta.push_back(t);
  if (s.theta.empty() || vv.size() % s.theta.size()) throw ConfigError("sinogram rows are not a full grid");
  const std::size_t np = vv.size() / s.theta.size();
  s.p.assign(pp.begin(), pp.begin() + static_cast<std::ptrdiff_t>(np));
  s.values.resize(static_cast<Eigen::Index>(s.theta.size()), static_cast<Eigen::Index>(np));
  for (std::size_t i = 0; i < s.theta.size(); ++i)
    for (std::size_t j = 0; j < np; ++j) {
      if (th[i * np + j] != s.theta[i] || pp[i * np + j] != s.p[j]) throw ConfigError("sinogram rows are not a full grid");
      s.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = vv[i * np + j];
    }
  s.validate();
  return s;
}

void synthesize(Sinogram& s, const std::function<double(double, double)>& sample) {
  const std::size_t nt = s.theta.size(), np = s.p.size();
  parallel_for(nt * np, [&](std::size_t idx) {
    const std::size_t k = idx / np, j = idx % np;
    s.values(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = sample(s.theta[k], s.p[j]);
  });
}

nlohmann::json ReconstructionReport::to_json() const {
  nlohmann::json j = {{"method", method},       {"nx", grid.nx},         {"ny", grid.ny},
                      {"x0", grid.x0},          {"y0", grid.y0},         {"dx", grid.dx},
                      {"dy", grid.dy},          {"sup_norm", sup_norm},  {"iterations", iterations},
                      {"diverged", diverged},   {"warnings", warnings},  {"meta", meta}};
  j["rel_l2"] = rel_l2 ? nlohmann::json(*rel_l2) : nlohmann::json(nullptr);
  if (!residuals.empty()) j["residuals"] = residuals;
  return j;
}

double relative_l2(const Grid2D& a, const Grid2D& b, const Mask2& mask) {
  if (a.nx != b.nx || a.ny != b.ny) throw ConfigError("relative_l2: grid mismatch");
  double num = 0.0, den = 0.0;
  for (int i = 0; i < a.nx; ++i)
    for (int j = 0; j < a.ny; ++j) {
      if (mask && !mask(b.x(i), b.y(j))) continue;
      const double d = a.v(i, j) - b.v(i, j);
      num += d * d;
      den += b.v(i, j) * b.v(i, j);
    }
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(num / den);
}

// ---------------------------------------------------------------------------
// Filtered backprojection

namespace {

// Ramp kernel of the sampled Radon data (spatial form), apodized in frequency;
// returns the real transfer function on N/2 + 1 bins.
std::vector<double> ramp_response(int n, double dp, double cutoff) {
  std::vector<double> h(static_cast<std::size_t>(n), 0.0);
  h[0] = 1.0 / (4.0 * dp * dp);
  for (int k = 1; k < n / 2; ++k) {
    if (k % 2 == 0) continue;
    const double v = -1.0 / (kPi * kPi * k * k * dp * dp);
    h[static_cast<std::size_t>(k)] = v;
    h[static_cast<std::size_t>(n - k)] = v;
  }
  std::vector<cplx> spec(static_cast<std::size_t>(n / 2 + 1));
  fftw_plan plan = fftw_plan_dft_r2c_1d(n, h.data(), reinterpret_cast<fftw_complex*>(spec.data()), FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  std::vector<double> out(spec.size());
  for (std::size_t m = 0; m < spec.size(); ++m) {
    const double nu = static_cast<double>(m) / (n / 2);  // fraction of Nyquist
    const double w = nu < cutoff ? 0.5 * (1.0 + std::cos(kPi * nu / cutoff)) : 0.0;
    out[m] = spec[m].real() * w;
  }
  return out;
}

}  // namespace

ReconstructionReport fbp_invert(const Sinogram& s, const Grid2D& target, const FbpOptions& o) {
  s.validate();
  if (!(o.window_cutoff > 0.0 && o.window_cutoff <= 1.0)) throw ConfigError("window cutoff must lie in (0, 1]");
  ReconstructionReport rep;
  rep.method = "fbp";
  rep.grid = target;
  rep.grid.v.setZero();
  const int nt = static_cast<int>(s.theta.size()), np = static_cast<int>(s.p.size());
  const double dp = s.dp();

  if (nt < 2 || std::abs(nt * (s.theta[1] - s.theta[0]) - kPi) > 1e-9)
    rep.warnings.push_back("angles do not cover [0, pi) uniformly");
  double reach = 0.0;
  for (double cx : {target.x0, target.x(target.nx - 1)})
    for (double cy : {target.y0, target.y(target.ny - 1)})
      reach = std::max(reach, std::hypot(cx - s.center[0], cy - s.center[1]));
  if (reach > std::max(std::abs(s.p.front()), std::abs(s.p.back())) + 1e-12)
    rep.warnings.push_back("offset range does not reach every target node");
  if (dp > 2.0 * std::min(target.dx, target.dy)) rep.warnings.push_back("offset spacing coarser than the target grid");
  if (nt < np / 4) rep.warnings.push_back("angular sampling below a quarter of the offset count");

  int n = 1;
  while (n < 2 * np) n <<= 1;
  const std::vector<double> resp = ramp_response(n, dp, o.window_cutoff);

  Eigen::MatrixXd q(nt, np);
  {
    std::vector<double> buf(static_cast<std::size_t>(n));
    std::vector<cplx> spec(static_cast<std::size_t>(n / 2 + 1));
    fftw_plan fwd = fftw_plan_dft_r2c_1d(n, buf.data(), reinterpret_cast<fftw_complex*>(spec.data()), FFTW_ESTIMATE);
    fftw_plan inv = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(spec.data()), buf.data(), FFTW_ESTIMATE);
    for (int k = 0; k < nt; ++k) {
      std::fill(buf.begin(), buf.end(), 0.0);
      for (int j = 0; j < np; ++j) buf[static_cast<std::size_t>(j)] = s.values(k, j);
      fftw_execute(fwd);
      for (std::size_t m = 0; m < spec.size(); ++m) {
        spec[m] *= resp[m];
      }
      fftw_execute(inv);
      for (int j = 0; j < np; ++j) q(k, j) = buf[static_cast<std::size_t>(j)] * dp / n;
    }
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
  }

  std::vector<double> cs(static_cast<std::size_t>(nt)), sn(static_cast<std::size_t>(nt));
  for (int k = 0; k < nt; ++k) {
    cs[static_cast<std::size_t>(k)] = std::cos(s.theta[static_cast<std::size_t>(k)]);
    sn[static_cast<std::size_t>(k)] = std::sin(s.theta[static_cast<std::size_t>(k)]);
  }
  const double p0 = s.p.front();
  parallel_for(static_cast<std::size_t>(target.nx), [&](std::size_t ii) {
    const int i = static_cast<int>(ii);
    for (int j = 0; j < target.ny; ++j) {
      const double x = target.x(i) - s.center[0], y = target.y(j) - s.center[1];
      double acc = 0.0;
      for (int k = 0; k < nt; ++k) {
        const double pk = -x * sn[static_cast<std::size_t>(k)] + y * cs[static_cast<std::size_t>(k)];
        const double u = (pk - p0) / dp;
        if (!(u >= 0.0 && u <= np - 1)) continue;
        const int a = std::min(static_cast<int>(u), np - 2);
        const double w = u - a;
        acc += (1.0 - w) * q(k, a) + w * q(k, a + 1);
      }
      rep.grid.v(i, j) = acc * kPi / nt;
    }
  });
  rep.sup_norm = rep.grid.v.cwiseAbs().maxCoeff();
  rep.meta = {{"n_theta", nt}, {"n_p", np}, {"dp", dp}, {"window_cutoff", o.window_cutoff}, {"fft_length", n}};
  return rep;
}

// ---------------------------------------------------------------------------
// Discrete operator and CGLS

Eigen::SparseMatrix<double, Eigen::RowMajor> radon_matrix(const Sinogram& geometry, const Grid2D& layout) {
  const int nt = static_cast<int>(geometry.theta.size()), np = static_cast<int>(geometry.p.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(layout.nx) * layout.ny;
  std::vector<Eigen::Triplet<double>> trip;
  const double xlo = layout.x0, xhi = layout.x(layout.nx - 1), ylo = layout.y0, yhi = layout.y(layout.ny - 1);
  const double step = 0.5 * std::min(layout.dx, layout.dy);
  for (int k = 0; k < nt; ++k) {
    const double th = geometry.theta[static_cast<std::size_t>(k)];
    const Eigen::Vector2d w(std::cos(th), std::sin(th)), wp(-std::sin(th), std::cos(th));
    for (int jp = 0; jp < np; ++jp) {
      const int row = k * np + jp;
      const Eigen::Vector2d base = geometry.center + geometry.p[static_cast<std::size_t>(jp)] * wp;
      double t0 = -1e300, t1 = 1e300;
      bool hit = true;
      for (int c = 0; c < 2; ++c) {
        const double lo = c ? ylo : xlo, hi = c ? yhi : xhi;
        if (std::abs(w[c]) < 1e-15) {
          if (base[c] < lo || base[c] > hi) hit = false;
          continue;
        }
        double a = (lo - base[c]) / w[c], b = (hi - base[c]) / w[c];
        if (a > b) std::swap(a, b);
        t0 = std::max(t0, a);
        t1 = std::min(t1, b);
      }
      if (!hit || !(t1 > t0)) continue;
      int n = static_cast<int>(std::ceil((t1 - t0) / step));
      n = std::max(2, n + n % 2);
      const double dt = (t1 - t0) / n;
      for (int m = 0; m <= n; ++m) {
        const Eigen::Vector2d pt = base + (t0 + m * dt) * w;
        const double wm = (m == 0 || m == n ? 1.0 : (m % 2 ? 4.0 : 2.0)) * dt / 3.0;
        const double fx = std::clamp((pt[0] - layout.x0) / layout.dx, 0.0, layout.nx - 1.0);
        const double fy = std::clamp((pt[1] - layout.y0) / layout.dy, 0.0, layout.ny - 1.0);
        const int i = std::min(static_cast<int>(fx), layout.nx - 2), j = std::min(static_cast<int>(fy), layout.ny - 2);
        const double u = fx - i, v = fy - j;
        auto put = [&](int a, int b, double c) {
          if (c != 0.0) trip.emplace_back(row, static_cast<Eigen::Index>(a) * layout.ny + b, wm * c);
        };
        put(i, j, (1 - u) * (1 - v));
        put(i + 1, j, u * (1 - v));
        put(i, j + 1, (1 - u) * v);
        put(i + 1, j + 1, u * v);
      }
    }
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> a(static_cast<Eigen::Index>(nt) * np, cols);
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

ReconstructionReport cgls_invert(const Eigen::SparseMatrix<double, Eigen::RowMajor>& a, const Eigen::VectorXd& b,
                                 const Grid2D& layout, const CglsOptions& o) {
  if (a.rows() != b.size()) throw ConfigError("cgls: operator rows and data length differ");
  if (a.cols() != static_cast<Eigen::Index>(layout.nx) * layout.ny) throw ConfigError("cgls: operator columns do not match the grid");
  if (o.reg < 0.0) throw ConfigError("cgls: regularization must be nonnegative");
  ReconstructionReport rep;
  rep.method = "cgls";
  rep.grid = layout;
  rep.grid.v.setZero();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(a.cols());
  Eigen::VectorXd r = b;
  Eigen::VectorXd s = a.transpose() * r;
  Eigen::VectorXd p = s;
  double gamma = s.squaredNorm();
  const double r0 = r.norm(), g0 = std::sqrt(gamma);
  rep.residuals.push_back(r0);
  bool monotone = true;
  int it = 0;
  if (g0 > 0.0) {
    for (; it < o.max_iters; ++it) {
      const Eigen::VectorXd q = a * p;
      const double delta = q.squaredNorm() + o.reg * p.squaredNorm();
      if (!(delta > 0.0)) break;
      const double alpha = gamma / delta;
      x += alpha * p;
      r -= alpha * q;
      s = a.transpose() * r - o.reg * x;
      const double gnew = s.squaredNorm();
      const double rn = r.norm();
      if (!std::isfinite(rn)) throw NumericalError("cgls: non-finite residual");
      if (rn > rep.residuals.back() * (1.0 + 1e-12) + 1e-300) monotone = false;
      rep.residuals.push_back(rn);
      if (rn > o.guard * r0) {
        rep.diverged = true;
        rep.warnings.push_back("residual exceeded the divergence guard");
        ++it;
        break;
      }
      if (std::sqrt(gnew) <= o.tol * g0) {
        ++it;
        break;
      }
      p = s + (gnew / gamma) * p;
      gamma = gnew;
    }
  }
  rep.iterations = it;
  for (int i = 0; i < layout.nx; ++i)
    for (int j = 0; j < layout.ny; ++j) rep.grid.v(i, j) = x[static_cast<Eigen::Index>(i) * layout.ny + j];
  rep.sup_norm = rep.grid.v.cwiseAbs().maxCoeff();
  rep.meta = {{"reg", o.reg},
              {"max_iters", o.max_iters},
              {"final_residual", rep.residuals.back()},
              {"monotone", monotone},
              {"rows", a.rows()},
              {"nnz", a.nonZeros()}};
  return rep;
}

// ---------------------------------------------------------------------------
// Fourier slice

namespace {

// Orthonormal pair spanning the complement of the unit vector u (first two Gram-Schmidt survivors).
std::pair<Vec, Vec> complement_pair(const Vec& u) {
  const int n = static_cast<int>(u.size());
  std::vector<Vec> basis;
  for (int k = 0; k < n && basis.size() < 2; ++k) {
    Vec v = Vec::Zero(n);
    v[k] = 1.0;
    v -= v.dot(u) * u;
    for (const Vec& b : basis) v -= v.dot(b) * b;
    if (v.norm() > 1e-6) basis.push_back(v / v.norm());
  }
  return {basis[0], basis[1]};
}

}  // namespace

cplx fourier_slice_recover(const MetricScene& scene, const ScalarField& f, const Vec& zeta,
                           const FourierSliceOptions& o) {
  if (scene.tag() != StructureTag::Euclidean) throw ConfigError("fourier slice needs a Euclidean scene");
  const int n = scene.coord_dim();
  if (n < 3) throw ConfigError("fourier slice needs dimension >= 3");
  if (zeta.size() != n) throw ConfigError("frequency has the wrong dimension");
  if (!(o.spacing > 0.0)) throw ConfigError("plane spacing must be positive");
  const double k = zeta.norm();
  Vec u = Vec::Zero(n);
  if (k > 0.0)
    u = zeta / k;
  else
    u[n - 1] = 1.0;
  const auto [e, eta] = complement_pair(u);

  const Box& b = scene.bounding_box();
  double rlo = 1e300, rhi = -1e300;
  for (int mask = 0; mask < (1 << n); ++mask) {
    Vec c(n);
    for (int i = 0; i < n; ++i) c[i] = (mask >> i & 1) ? b.hi[i] : b.lo[i];
    rlo = std::min(rlo, c.dot(u));
    rhi = std::max(rhi, c.dot(u));
  }
  const long k0 = static_cast<long>(std::floor(rlo / o.spacing)) - 1, k1 = static_cast<long>(std::ceil(rhi / o.spacing)) + 1;
  const bool convex = check_convexity(scene, 256, 0).strictly_convex;
  std::vector<cplx> parts(static_cast<std::size_t>(k1 - k0 + 1));
  for (long j = k0; j <= k1; ++j) {
    const double r = j * o.spacing;
    BicharLeaf leaf = build_plane_leaf(scene, e, r * u, eta);
    if (convex)
      leaf.status = GoodnessStatus::Good;
    else
      screen_leaf(scene, leaf);
    const TransformSample t = leaf_transform(scene, f, leaf, HoloAmplitude{}, o.quad);
    parts[static_cast<std::size_t>(j - k0)] = t.value * std::exp(cplx(0.0, -r * k));
  }
  cplx acc(0.0, 0.0);
  for (const cplx& c : parts) acc += c;
  return acc * o.spacing;
}

cplx direct_fourier(const MetricScene& scene, const ScalarField& f, const Vec& zeta, int nodes_per_axis) {
  const int n = scene.coord_dim();
  if (nodes_per_axis < 2) throw ConfigError("direct_fourier needs at least 2 nodes per axis");
  const Box& b = scene.bounding_box();
  Vec h(n);
  for (int i = 0; i < n; ++i) h[i] = (b.hi[i] - b.lo[i]) / (nodes_per_axis - 1);
  long total = 1;
  for (int i = 0; i < n; ++i) total *= nodes_per_axis;
  cplx acc(0.0, 0.0);
  Vec x(n);
  for (long idx = 0; idx < total; ++idx) {
    long rest = idx;
    double w = 1.0;
    for (int i = 0; i < n; ++i) {
      const int a = static_cast<int>(rest % nodes_per_axis);
      rest /= nodes_per_axis;
      x[i] = b.lo[i] + a * h[i];
      if (a == 0 || a == nodes_per_axis - 1) w *= 0.5;
    }
    const double v = f(x);
    if (v != 0.0) acc += w * v * std::exp(cplx(0.0, -x.dot(zeta)));
  }
  return acc * h.prod();
}

// ---------------------------------------------------------------------------
// Product pipeline

std::optional<FactorGeodesic> find_factor_chord(const MetricScene& factor, const Vec& x, int n_dirs,
                                                std::uint64_t seed) {
  const int d = factor.coord_dim();
  if (factor.rho(x) >= 0.0) throw ConfigError("chord search point is not interior");
  std::vector<Vec> dirs;
  if (d == 1) {
    dirs = {Vec::Constant(1, 1.0), Vec::Constant(1, -1.0)};
  } else if (d == 2) {
    for (int k = 0; k < n_dirs; ++k) {
      Vec v(2);
      v << std::cos(2 * kPi * k / n_dirs), std::sin(2 * kPi * k / n_dirs);
      dirs.push_back(v);
    }
  } else {
    for (int k = 0; k < n_dirs; ++k) {
      CounterRng rng(seed, static_cast<std::uint64_t>(k));
      dirs.push_back(rng.unit_vector(d));
    }
  }
  std::optional<FactorGeodesic> best;
  for (const Vec& v : dirs) {
    const Vec xi = v / factor.norm_covector(x, v);
    TraceOptions topt;
    topt.record = false;
    const GeodesicTrace tr = integrate_geodesic(factor, {x, xi}, factor.default_t_cap(), topt);
    if (tr.trapped() || !nontangential(tr)) continue;
    const double len = *tr.l_plus - *tr.l_minus;
    if (!best || len > best->length + 1e-12) {
      best = factor_geodesic(factor, {x, xi});
    }
  }
  return best;
}

nlohmann::json PipelineResult::to_json() const {
  nlohmann::json j = rec.to_json();
  j["identity_max_dev"] = identity_max_dev;
  j["identity_checked"] = identity_checked;
  j["n_theta"] = sinogram.theta.size();
  j["n_p"] = sinogram.p.size();
  return j;
}

PipelineResult product_injectivity_pipeline(const MetricScene& scene, const ScalarField& f, const FactorGeodesic& g1,
                                            const FactorGeodesic& g2, const PipelineOptions& o) {
  if (!scene.is_product()) throw ConfigError("pipeline needs a product scene");
  if (o.grid < 2 || o.n_p < 2 || o.n_theta < 2) throw ConfigError("pipeline grids too small");
  const double t1 = g1.length, t2 = g2.length;
  const Eigen::Vector2d center(0.5 * t1, 0.5 * t2);
  PipelineResult out;
  out.sinogram = Sinogram::layout(o.n_theta, o.n_p, 0.5 * std::hypot(t1, t2), center);
  out.sinogram.provenance = "tilted_geodesic xray";
  QuadratureOptions qo;
  qo.tol = o.tol;
  if (!o.zero_data) {
    synthesize(out.sinogram, [&](double th, double p) {
      const Eigen::Vector2d a = center + p * Eigen::Vector2d(-std::sin(th), std::cos(th));
      const GeodesicTrace tr = tilted_geodesic(scene, g1, g2, th, a);
      if (tr.t.empty()) return 0.0;
      return xray_transform(scene, f, tr, qo).value.real();
    });
    const Fn2 h = product_pullback(scene, f, g1, g2);
    Box support;
    support.lo = Vec::Zero(2);
    support.hi = Vec(2);
    support.hi << t1, t2;
    const std::size_t np = out.sinogram.p.size(), total = out.sinogram.theta.size() * np;
    for (std::size_t idx = 0; idx < total; idx += static_cast<std::size_t>(std::max(1, o.identity_stride))) {
      const std::size_t k = idx / np, j = idx % np;
      const double r = radon_2d(h, support, out.sinogram.theta[k], out.sinogram.p[j], qo, center);
      out.identity_max_dev = std::max(
          out.identity_max_dev, std::abs(r - out.sinogram.values(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j))));
      ++out.identity_checked;
    }
  }
  out.truth = product_pullback_grid(scene, f, g1, g2, o.grid, o.grid);
  out.rec = fbp_invert(out.sinogram, Grid2D::over(0.0, t1, 0.0, t2, o.grid, o.grid));
  out.rec.method = "product-pipeline";
  const int m1 = scene.split(), m2 = scene.coord_dim() - scene.split();
  const double band = f.band();
  out.rec.rel_l2 = relative_l2(out.rec.grid, out.truth, [&](double y1, double y2) {
    Vec x(m1 + m2);
    x.head(m1) = g1.at(y1).x;
    x.tail(m2) = g2.at(y2).x;
    return scene.rho(x) < -band;
  });
  out.rec.meta["zero_data"] = o.zero_data;
  out.rec.meta["T1"] = t1;
  out.rec.meta["T2"] = t2;
  return out;
}

}  // namespace leafscope
