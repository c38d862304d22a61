#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <filesystem>

#include "gqg/errors.hpp"
#include "gqg/harness.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

// Configs and reports cross the boundary as JSON text; the Python side turns
// them into dicts with the json module.
gqg::RunConfig config_from(const std::string& text) {
  gqg::RunConfig c = gqg::RunConfig::from_json(json::parse(text));
  c.validate();
  return c;
}

py::dict diagnostics_dict(const std::vector<gqg::DiagnosticsRecord>& recs) {
  const auto column = [&](double gqg::DiagnosticsRecord::*m) {
    py::array_t<double> a(static_cast<py::ssize_t>(recs.size()));
    auto v = a.mutable_unchecked<1>();
    for (std::size_t i = 0; i < recs.size(); ++i) v(static_cast<py::ssize_t>(i)) = recs[i].*m;
    return a;
  };
  py::dict d;
  d["t"] = column(&gqg::DiagnosticsRecord::t);
  d["E_frak"] = column(&gqg::DiagnosticsRecord::E_frak);
  d["l2_energy"] = column(&gqg::DiagnosticsRecord::l2_energy);
  d["h3_norm"] = column(&gqg::DiagnosticsRecord::h3_norm);
  d["div_residual"] = column(&gqg::DiagnosticsRecord::div_residual);
  d["bc_residual"] = column(&gqg::DiagnosticsRecord::bc_residual);
  d["mean_residual"] = column(&gqg::DiagnosticsRecord::mean_residual);
  d["compat_residual"] = column(&gqg::DiagnosticsRecord::compat_residual);
  return d;
}

py::dict read_snapshot_py(const std::string& path) {
  const gqg::Snapshot s = gqg::read_snapshot(std::filesystem::path(path));
  py::dict fields;
  for (const gqg::NamedArray& f : s.fields) {
    py::array_t<double> a({f.shape[0], f.shape[1], f.shape[2]});
    std::copy(f.data.begin(), f.data.end(), a.mutable_data());
    fields[py::str(f.name)] = a;
  }
  py::dict out;
  out["kind"] = s.kind;
  out["t"] = s.t;
  out["eps"] = s.eps;
  out["grid"] = py::dict(py::arg("nx") = s.grid.nx, py::arg("ny") = s.grid.ny, py::arg("nz") = s.grid.nz,
                         py::arg("h") = s.grid.h, py::arg("dealias") = s.grid.dealias);
  out["fields"] = fields;
  return out;
}

py::dict run_simulation_py(const std::string& config, bool write_files) {
  const gqg::RunConfig c = config_from(config);
  gqg::RunResult r;
  {
    py::gil_scoped_release release;
    r = gqg::run_simulation(c, write_files);
  }
  py::dict out;
  out["steps"] = r.steps;
  out["dt"] = r.dt;
  out["E0"] = r.E0;
  out["sup_E"] = r.sup_E;
  out["max_projection"] = r.max_projection;
  out["max_div_residual"] = r.max_div_residual;
  out["max_bc_residual"] = r.max_bc_residual;
  out["diagnostics"] = diagnostics_dict(r.diagnostics);
  return out;
}

template <class Fn>
std::string run_report(const std::string& config, Fn fn) {
  const gqg::RunConfig c = config_from(config);
  json j;
  {
    py::gil_scoped_release release;
    j = fn(c).json();
  }
  return j.dump();
}

}  // namespace

PYBIND11_MODULE(_gqg, m) {
  m.doc() = "Rotating Boussinesq channel solver and its quasi-geostrophic limit";

  auto base = py::register_exception<gqg::Error>(m, "GqgError", PyExc_RuntimeError);
  py::register_exception<gqg::ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<gqg::DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<gqg::NumericalInstability>(m, "NumericalInstability", base.ptr());
  py::register_exception<gqg::ConstraintViolation>(m, "ConstraintViolation", base.ptr());
  py::register_exception<gqg::IoError>(m, "IoError", base.ptr());

  m.def("default_config", [] { return gqg::RunConfig{}.to_json().dump(); });
  m.def("resolve_config", [](const std::string& text) { return config_from(text).to_json().dump(); },
        py::arg("config"));

  m.def("grid_nodes", [](int nx, int ny, int nz, double h) {
    const gqg::ChannelGrid g(nx, ny, nz, h);
    py::array_t<double> x(nx), y(ny), z(nz + 1), w(nz + 1);
    for (int i = 0; i < nx; ++i) x.mutable_at(i) = g.x(i);
    for (int j = 0; j < ny; ++j) y.mutable_at(j) = g.y(j);
    for (int k = 0; k <= nz; ++k) {
      z.mutable_at(k) = g.z(k);
      w.mutable_at(k) = g.cc_weights()[k];
    }
    return py::make_tuple(x, y, z, w);
  }, py::arg("nx"), py::arg("ny"), py::arg("nz"), py::arg("h") = 1.0);

  m.def("run_simulation", &run_simulation_py, py::arg("config"), py::arg("write_files") = false);
  m.def("run_eps_sweep", [](const std::string& c) {
    return run_report(c, [](const gqg::RunConfig& rc) { return gqg::run_eps_sweep(rc); });
  }, py::arg("config"));
  m.def("run_linear_validation", [](const std::string& c) {
    return run_report(c, [](const gqg::RunConfig& rc) { return gqg::run_linear_validation(rc); });
  }, py::arg("config"));
  m.def("run_wellprepared_comparison", [](const std::string& c) {
    return run_report(
        c, [](const gqg::RunConfig& rc) { return gqg::run_wellprepared_comparison(rc); });
  }, py::arg("config"));

  m.def("read_snapshot", &read_snapshot_py, py::arg("path"));
  m.def("read_snapshot_header",
        [](const std::string& p) { return gqg::read_snapshot_header(std::filesystem::path(p)).dump(); },
        py::arg("path"));
}
