#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "leafscope/flow.hpp"
#include "leafscope/invert.hpp"
#include "leafscope/io.hpp"
#include "leafscope/leaf.hpp"
#include "leafscope/quasimode.hpp"

namespace py = pybind11;
using namespace leafscope;

namespace {

// Results cross the boundary as JSON text; the Python package decodes them.
std::string dump(const nlohmann::json& j) { return j.dump(); }

nlohmann::json trace_json(const GeodesicTrace& tr) {
  nlohmann::json j = {{"class", to_string(classify(tr))},
                      {"energy", tr.energy},
                      {"energy_drift", tr.energy_drift},
                      {"t_cap", tr.t_cap}};
  j["l_minus"] = tr.l_minus ? nlohmann::json(*tr.l_minus) : nlohmann::json(nullptr);
  j["l_plus"] = tr.l_plus ? nlohmann::json(*tr.l_plus) : nlohmann::json(nullptr);
  if (!tr.trapped()) j["nontangential"] = nontangential(tr);
  return j;
}

Eigen::MatrixXd positions(const GeodesicTrace& tr) {
  if (tr.samples.empty()) return {};
  Eigen::MatrixXd out(static_cast<Eigen::Index>(tr.samples.size()), tr.samples.front().x.size() + 1);
  for (std::size_t i = 0; i < tr.samples.size(); ++i) {
    out(static_cast<Eigen::Index>(i), 0) = tr.t[i];
    out.row(static_cast<Eigen::Index>(i)).tail(tr.samples[i].x.size()) = tr.samples[i].x.transpose();
  }
  return out;
}

BicharLeaf screened_leaf(const MetricScene& s, const Vec& y, const Vec& eta) {
  BicharLeaf l = build_leaf(s, y, eta);
  screen_leaf(s, l);
  return l;
}

}  // namespace

PYBIND11_MODULE(_leafscope, m) {
  m.doc() = "leafscope core bindings";
  m.attr("__version__") = std::string(kVersion);

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<MetricScene>(m, "Scene")
      .def_property_readonly("dim", &MetricScene::dim)
      .def_property_readonly("coord_dim", &MetricScene::coord_dim)
      .def_property_readonly("is_product", &MetricScene::is_product)
      .def_property_readonly("interior_point", [](const MetricScene& s) { return Vec(s.interior_point()); })
      .def_property_readonly("default_t_cap", &MetricScene::default_t_cap)
      .def("metric", [](const MetricScene& s, const Vec& x) { return Mat(s.metric(x)); })
      .def("rho", &MetricScene::rho)
      .def("config_json", [](const MetricScene& s) { return dump(s.config()); });

  m.def("load_scene", &build_scene_file, py::arg("path"));
  m.def("scene_from_json", [](const std::string& text) { return build_scene(nlohmann::json::parse(text)); },
        py::arg("text"));
  m.def("trapped_example", &build_trapped_example, py::arg("n") = 3, py::arg("eps") = 0.05,
        py::arg("allow_out_of_range") = false);

  m.def(
      "geodesic",
      [](const MetricScene& s, const Vec& x, const Vec& xi, double t_cap) {
        const GeodesicTrace tr = integrate_geodesic(s, {x, xi}, t_cap > 0.0 ? t_cap : s.default_t_cap());
        return py::make_tuple(dump(trace_json(tr)), positions(tr));
      },
      py::arg("scene"), py::arg("x"), py::arg("xi"), py::arg("t_cap") = 0.0);

  m.def(
      "coverage",
      [](const MetricScene& s, int points, int dirs, double t_cap, std::uint64_t seed) {
        return dump(coverage_monte_carlo(s, points, dirs, t_cap > 0.0 ? t_cap : s.default_t_cap(), seed).to_json());
      },
      py::arg("scene"), py::arg("points") = 1000, py::arg("dirs") = 64, py::arg("t_cap") = 0.0, py::arg("seed") = 0);

  m.def(
      "detect_trapped",
      [](const MetricScene& s, int grid, double t_cap) { return dump(detect_all_trapped(s, grid, t_cap).to_json()); },
      py::arg("scene"), py::arg("grid") = 32, py::arg("t_cap") = kTrappedScreenCap);

  m.def(
      "leaf_screen",
      [](const MetricScene& s, const Vec& y, const Vec& eta) { return dump(screened_leaf(s, y, eta).to_json()); },
      py::arg("scene"), py::arg("y"), py::arg("eta"));

  m.def(
      "xray",
      [](const MetricScene& s, const std::string& f, const Vec& x, const Vec& xi, double tol) {
        const GeodesicTrace tr = integrate_geodesic(s, {x, xi}, s.default_t_cap());
        QuadratureOptions o;
        o.tol = tol;
        const TransformSample r = xray_transform(s, ScalarField::expression(s, f), tr, o);
        return py::make_tuple(r.value.real(), r.raw_value.real());
      },
      py::arg("scene"), py::arg("f"), py::arg("x"), py::arg("xi"), py::arg("tol") = 1e-8);

  m.def(
      "leaf_transform",
      [](const MetricScene& s, const std::string& f, const Vec& y, const Vec& eta, cplx lambda, double tol) {
        LeafQuadrature q;
        q.tol = tol;
        return leaf_transform(s, ScalarField::expression(s, f), screened_leaf(s, y, eta), HoloAmplitude{lambda}, q)
            .value;
      },
      py::arg("scene"), py::arg("f"), py::arg("y"), py::arg("eta"), py::arg("lam") = cplx(0.0, 0.0),
      py::arg("tol") = 1e-6);

  m.def(
      "attenuated",
      [](const MetricScene& s, const std::string& f, const Vec& y, const Vec& eta, double lambda) {
        const BicharLeaf l = screened_leaf(s, y, eta);
        return attenuated_transversal_transform(s, ScalarField::expression(s, f), l.transversal, lambda).value;
      },
      py::arg("scene"), py::arg("f"), py::arg("y"), py::arg("eta"), py::arg("lam") = 0.0);

  m.def(
      "fbp",
      [](const Eigen::MatrixXd& values, double p_max, double half_width, int grid) {
        Sinogram s = Sinogram::layout(static_cast<int>(values.rows()), static_cast<int>(values.cols()), p_max);
        s.values = values;
        s.validate();
        return Eigen::MatrixXd(
            fbp_invert(s, Grid2D::over(-half_width, half_width, -half_width, half_width, grid, grid)).grid.v);
      },
      py::arg("sinogram"), py::arg("p_max"), py::arg("half_width"), py::arg("grid") = 129,
      "Rows are angles pi k / n_theta, columns offsets uniform on [-p_max, p_max]; returns v(i, j) at (x_i, y_j).");

  m.def(
      "fourier_slice",
      [](const MetricScene& s, const std::string& f, const Vec& zeta, double spacing) {
        FourierSliceOptions o;
        o.spacing = spacing;
        return fourier_slice_recover(s, ScalarField::expression(s, f), zeta, o);
      },
      py::arg("scene"), py::arg("f"), py::arg("zeta"), py::arg("spacing") = 0.5);

  m.def(
      "density_check",
      [](const std::string& f, const std::vector<double>& lambdas) {
        return dump(amplitude_density_check(f, 0.0, 1.0, 0.0, 1.0, lambdas).to_json());
      },
      py::arg("f"), py::arg("lambdas"));
}
