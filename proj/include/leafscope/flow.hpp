#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "leafscope/manifold.hpp"

namespace leafscope {

struct PhasePoint {
  Vec x;
  Vec xi;
};

// One boundary crossing of a trace.
struct Crossing {
  double t = 0.0;
  Vec x;
  Vec xi;
  double cosine = 0.0;  // <xi, nu>_g / |xi|_g with nu the outward unit conormal
  bool tangential = false;
};

inline constexpr double kTangencyTol = 1e-3;
inline constexpr double kInteriorTol = 1e-8;

// Samples of a cogeodesic over [l_minus, l_plus] (or [-t_cap, t_cap] on trapped sides).
struct GeodesicTrace {
  std::vector<double> t;
  std::vector<PhasePoint> samples;
  std::vector<PhasePoint> rates;  // (dx/dt, dxi/dt) at each sample
  Vec periods;                    // copied from the scene for interpolation across wraps
  std::optional<double> l_minus;  // empty: trapped backwards
  std::optional<double> l_plus;   // empty: trapped forwards
  std::optional<Crossing> entry, exit;
  bool left_chart = false;
  double t_cap = 0.0;
  double energy = 0.0;           // |xi|_g at t = 0
  double energy_drift = 0.0;     // max | |xi(t)|_g - |xi(0)|_g |
  double max_interior_rho = 0.0; // max rho over samples away from both endpoints
  double step = 0.0;

  bool trapped() const { return !l_minus || !l_plus; }
  double arc_length() const;
  // Cubic Hermite interpolation of the base point between samples.
  Vec position_at(double time) const;
  PhasePoint phase_at(double time) const;
};

struct TraceOptions {
  bool record = true;       // keep samples (Monte-Carlo drivers switch this off)
  std::size_t max_samples = 40000;  // decimated by 2 beyond this
  double step = 0.0;        // 0: the scene default
  bool check_inside = true; // reject starting points outside M
};

// Fixed-step RK4 integration of the Hamiltonian field of |xi|^2_g / 2 in both
// time directions, stopping at the first boundary crossing on each side.
GeodesicTrace integrate_geodesic(const MetricScene& scene, const PhasePoint& p0, double t_cap,
                                 const TraceOptions& opts = {});

struct ExitTimes {
  std::optional<double> l_minus, l_plus;
};
ExitTimes exit_times(const MetricScene& scene, const PhasePoint& p0, double t_cap);

enum class DirectionClass { G, B1, B2 };
std::string to_string(DirectionClass c);
DirectionClass classify_direction(const MetricScene& scene, const PhasePoint& p0, double t_cap);
DirectionClass classify(const GeodesicTrace& trace);

bool nontangential(const GeodesicTrace& trace, double tang_tol = kTangencyTol);

// Generic fixed-step RK4 for z' = F(z) on R^m, with samples every step.
using VectorField = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
struct IntegralCurve {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> z;
};
IntegralCurve integrate_field(const VectorField& field, const Eigen::VectorXd& z0, double t0, double t1,
                              double step);

struct CoverageReport {
  std::uint64_t seed = 0;
  int n_points = 0;
  int n_dirs = 0;
  double t_cap = 0.0;
  int covered = 0;
  double fraction = 0.0;
  std::vector<Vec> uncovered;
  bool convexity_checked = false;
  bool strictly_convex = false;
  std::vector<std::string> warnings;
  double richardson_max_diff = 0.0;  // exit-time discrepancy of half-step cross-checks
  nlohmann::json to_json() const;
};
CoverageReport coverage_monte_carlo(const MetricScene& scene, int n_points, int n_dirs, double t_cap,
                                    std::uint64_t seed);

struct MeasureReport {
  std::uint64_t seed = 0;
  int n_samples = 0;
  double t_cap = 0.0;
  int good = 0, b1 = 0, b2 = 0;
  double b1_fraction() const { return n_samples ? static_cast<double>(b1) / n_samples : 0.0; }
  double b2_fraction() const { return n_samples ? static_cast<double>(b2) / n_samples : 0.0; }
  nlohmann::json to_json() const;
};
MeasureReport b1_measure_estimate(const MetricScene& scene, int n_samples, double t_cap, std::uint64_t seed);

// t, x_1..x_n, xi_1..xi_n, rho(x)
void write_trace_csv(const MetricScene& scene, const GeodesicTrace& trace, const std::string& path);

// <a, b>_g for covectors at x.
double inner_covectors(const MetricScene& scene, const Vec& x, const Vec& a, const Vec& b);

}  // namespace leafscope
