#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "leafscope/expression.hpp"
#include "leafscope/flow.hpp"

namespace leafscope {

// Limiting Carleman weight phi on the chart.
class LCW {
 public:
  enum class Kind { Natural, Linear, Expression };

  static LCW natural();                         // phi = x_1
  static LCW linear(const Vec& w);              // phi = w . x
  static LCW expression(const std::string& src, int n);

  Kind kind() const { return kind_; }
  double value(const Vec& x) const;
  Vec differential(const Vec& x) const;  // d phi
  Mat hessian(const Vec& x) const;       // zero for natural and linear weights
  std::string describe() const;

 private:
  Kind kind_ = Kind::Natural;
  Vec w_;
  std::optional<Expression> expr_;
};

struct SymbolValue {
  double a = 0.0;
  double b = 0.0;
};

// p_phi = a + i b with a = |xi|^2 - |dphi|^2 and b = 2 <dphi, xi>.
SymbolValue weyl_symbol(const MetricScene& scene, const LCW& lcw, const PhasePoint& p);

enum class HamiltonField { A, B };

// Integral curve of H_a or H_b over [0, t_cap]. The boundary does not stop the
// curve; l_minus is 0 and l_plus records the first exit from M if any.
// Throws ConfigError if the curve leaves the chart.
GeodesicTrace hamilton_curve(const MetricScene& scene, const LCW& lcw, const PhasePoint& p0, HamiltonField field,
                             double t_cap, double step = 0.0);

// max(|a|, |b|) over the samples of a curve.
double symbol_deviation(const MetricScene& scene, const LCW& lcw, const GeodesicTrace& curve);

enum class GoodnessStatus { Good, Trapped, Tangential, Unknown };
std::string to_string(GoodnessStatus s);

enum class LeafKind { Product, EuclideanPlane, SphereSlice };

// Gamma_{y,eta}: points (y_1 + t, gamma(s)) with covector (0, gamma'(s)) in the product
// case, y + t e + s eta for Euclidean two-planes, and (y_1 + t, cos s y' + sin s eta')
// on the trapped example.
struct BicharLeaf {
  LeafKind kind = LeafKind::Product;
  Vec y, eta;
  Vec plane_e;                 // unit dphi for Euclidean plane leaves
  GeodesicTrace transversal;   // product leaves: geodesic of the second factor
  double s_min = 0.0, s_max = 0.0;
  double t_min = 0.0, t_max = 0.0;
  GoodnessStatus status = GoodnessStatus::Unknown;
  struct Witness {
    double t = 0.0, s = 0.0;
    Vec x, xi;
  };
  std::optional<Witness> witness;

  double length() const { return s_max - s_min; }
  PhasePoint point(double t, double s) const;
  nlohmann::json to_json() const;
};

// Product scene with a one-dimensional Euclidean first factor, natural LCW.
// eta_1 must vanish and |eta'|_{g_0} = 1; y' must lie in M_0.
BicharLeaf build_leaf(const MetricScene& scene, const Vec& y, const Vec& eta);
// Two-plane leaf of a Euclidean scene with LCW phi = e . x.
BicharLeaf build_plane_leaf(const MetricScene& scene, const Vec& e, const Vec& y, const Vec& eta);
// Leaf of the trapped example through (y, eta) with y' on the sphere and eta' tangent to it.
BicharLeaf build_sphere_leaf(const MetricScene& scene, const Vec& y, const Vec& eta);

struct ScreenOptions {
  double t_cap = 0.0;  // 0: scene default
  int t_samples = 9;
  int s_samples = 5;
};
// Priority Trapped > Tangential > Good; sets leaf.status and leaf.witness.
GoodnessStatus screen_leaf(const MetricScene& scene, BicharLeaf& leaf, const ScreenOptions& opts = {});

// Moving-cap scene on R x S^{n-1}; 0 < eps < 0.1 unless allow_out_of_range.
MetricScene build_trapped_example(int n, double eps, bool allow_out_of_range = false);

struct TrappedLeafRecord {
  Vec normal;  // n = 3: unit normal of the great circle; otherwise y'
  Vec y, eta;
  bool trapped = false;
  bool verified = false;  // still trapped at twice the cutoff
  double t = 0.0, s = 0.0;
};

struct TrappedReport {
  int n = 0;
  double eps = 0.0;
  int grid = 0;
  double t_cap = 0.0;
  int total = 0;
  int trapped = 0;
  int verified = 0;
  bool hypothesis_ok = true;
  std::vector<std::string> notes;
  std::vector<TrappedLeafRecord> leaves;
  double fraction() const { return total ? static_cast<double>(trapped) / total : 0.0; }
  nlohmann::json to_json() const;
};

inline constexpr double kTrappedScreenCap = 13.0;  // a bit over two turns of a great circle

TrappedReport detect_all_trapped(const MetricScene& scene, int grid, double t_cap = kTrappedScreenCap);

// Spatial projection of the leaf as a point cloud: t, s, x_1..x_n.
void write_leaf_csv(const BicharLeaf& leaf, int nt, int ns, const std::string& path);

}  // namespace leafscope
