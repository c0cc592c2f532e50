#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <vector>

#include "cdtw/baselines.hpp"
#include "cdtw/curve.hpp"
#include "cdtw/engine.hpp"
#include "cdtw/error.hpp"
#include "cdtw/io.hpp"

namespace py = pybind11;

namespace {

py::object to_python(const nlohmann::json& j) {
  switch (j.type()) {
    case nlohmann::json::value_t::null: return py::none();
    case nlohmann::json::value_t::boolean: return py::bool_(j.get<bool>());
    case nlohmann::json::value_t::number_integer: return py::int_(j.get<long long>());
    case nlohmann::json::value_t::number_unsigned: return py::int_(j.get<unsigned long long>());
    case nlohmann::json::value_t::number_float: return py::float_(j.get<double>());
    case nlohmann::json::value_t::string: return py::str(j.get<std::string>());
    case nlohmann::json::value_t::array: {
      py::list out;
      for (const auto& v : j) out.append(to_python(v));
      return out;
    }
    case nlohmann::json::value_t::object: {
      py::dict out;
      for (const auto& [k, v] : j.items()) out[py::str(k)] = to_python(v);
      return out;
    }
    default: return py::none();
  }
}

py::dict run_cdtw(const std::vector<double>& p, const std::vector<double>& q, double eps,
                  bool path) {
  cdtw::CdtwConfig cfg;
  cfg.eps = eps;
  cfg.record_path = path;
  cdtw::CdtwResult r;
  {
    py::gil_scoped_release release;
    r = cdtw::cdtw_exact(cdtw::Curve(p), cdtw::Curve(q), cfg);
  }
  py::dict out;
  out["value"] = r.value;
  out["stats"] = to_python(cdtw::to_json(r.stats));
  if (r.path) {
    py::list points;
    for (const auto& pt : r.path->points) points.append(py::make_tuple(pt.x, pt.y));
    py::list legs;
    for (auto leg : r.path->legs) legs.append(cdtw::to_string(leg));
    out["path"] = points;
    out["legs"] = legs;
  } else {
    out["path"] = py::none();
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact continuous dynamic time warping for 1D polygonal curves";

  static py::exception<cdtw::Error> error(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const cdtw::Error& e) {
      PyErr_SetString(error.ptr(), e.what());
    }
  });

  m.def("cdtw", &run_cdtw, py::arg("p"), py::arg("q"), py::arg("eps") = cdtw::kDefaultEps,
        py::arg("path") = true,
        "Exact value with stats and, when requested, an optimal path.");
  m.def(
      "cdtw_grid",
      [](const std::vector<double>& p, const std::vector<double>& q, unsigned resolution,
         bool diagonal) {
        return cdtw::cdtw_grid(cdtw::Curve(p), cdtw::Curve(q), {resolution, diagonal});
      },
      py::arg("p"), py::arg("q"), py::arg("resolution"), py::arg("diagonal") = true);
  m.def(
      "dtw", [](const std::vector<double>& p, const std::vector<double>& q) { return cdtw::dtw(p, q); },
      py::arg("p"), py::arg("q"));
  m.def(
      "discrete_frechet",
      [](const std::vector<double>& p, const std::vector<double>& q) {
        return cdtw::discrete_frechet(p, q);
      },
      py::arg("p"), py::arg("q"));
  m.def(
      "height",
      [](const std::vector<double>& p, const std::vector<double>& q, double x, double y) {
        return cdtw::height(cdtw::Curve(p), cdtw::Curve(q), x, y);
      },
      py::arg("p"), py::arg("q"), py::arg("x"), py::arg("y"));
  m.def(
      "path_integral",
      [](const std::vector<double>& p, const std::vector<double>& q,
         const std::vector<std::pair<double, double>>& points) {
        cdtw::WarpPath w;
        for (auto [x, y] : points) w.points.push_back({x, y});
        return cdtw::path_integral(cdtw::Curve(p), cdtw::Curve(q), w);
      },
      py::arg("p"), py::arg("q"), py::arg("points"));
}
