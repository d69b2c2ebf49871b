// Python module rdv._core: configuration, single runs, sweeps and export.

#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rdv/config.hpp"
#include "rdv/export.hpp"
#include "rdv/runner.hpp"

namespace py = pybind11;
using namespace rdv;

namespace {

py::dict row_dict(const SweepRow& r) {
  py::dict d;
  d["tf"] = r.tf;
  d["dm_total"] = r.dm_total;
  d["dm_sat_I"] = r.dm_sat_I;
  d["dm_sat_II"] = r.dm_sat_II;
  d["dm_transfer"] = r.dm_transfer;
  d["dm_phasing_total"] = r.dm_phasing_total;
  d["family"] = r.family;
  d["final_inclination_deg"] = r.final_inclination_deg;
  d["iterations"] = r.iterations;
  d["converged"] = r.converged;
  d["max_eta"] = r.max_eta;
  d["wall_time_s"] = r.wall_time_s;
  d["note"] = r.note;
  return d;
}

Sat sat_of(const std::string& name) {
  if (name == "I") return Sat::I;
  if (name == "II") return Sat::II;
  throw py::value_error("spacecraft must be 'I' or 'II'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Minimum-propellant cooperative rendezvous by successive convexification";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<StageError>(m, "SolverError", PyExc_RuntimeError);

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("mu", &Scenario::mu)
      .def_readwrite("r0", &Scenario::r0)
      .def_readwrite("rf", &Scenario::rf)
      .def_readwrite("tf", &Scenario::tf)
      .def_readwrite("t_max", &Scenario::t_max)
      .def_readwrite("c", &Scenario::c)
      .def_readwrite("m0", &Scenario::m0)
      .def_readwrite("theta0", &Scenario::theta0)
      .def_readwrite("inc", &Scenario::inc)
      .def_readwrite("k_rev", &Scenario::k_rev)
      .def("coplanar", &Scenario::coplanar);

  py::class_<RunConfig>(m, "RunConfig")
      .def_readwrite("scenario", &RunConfig::scenario)
      .def_property(
          "nodes", [](const RunConfig& c) { return c.mesh.nodes; }, [](RunConfig& c, int v) { c.mesh.nodes = v; })
      .def_property(
          "mesh_tol", [](const RunConfig& c) { return c.mesh.tol; }, [](RunConfig& c, double v) { c.mesh.tol = v; })
      .def_property(
          "max_rounds", [](const RunConfig& c) { return c.mesh.max_rounds; },
          [](RunConfig& c, int v) { c.mesh.max_rounds = v; })
      .def_property(
          "propagate", [](const RunConfig& c) { return c.verify.options.propagate; },
          [](RunConfig& c, bool v) { c.verify.options.propagate = v; })
      .def_property(
          "sweep_tf", [](const RunConfig& c) { return c.sweep.tf; },
          [](RunConfig& c, std::vector<double> v) { c.sweep.tf = std::move(v); })
      .def_property(
          "continuation", [](const RunConfig& c) { return c.sweep.continuation; },
          [](RunConfig& c, bool v) { c.sweep.continuation = v; })
      .def_property(
          "workers", [](const RunConfig& c) { return c.sweep.workers; },
          [](RunConfig& c, int v) { c.sweep.workers = v; })
      .def("validate", &RunConfig::validate)
      .def("canonical_text", [](const RunConfig& c) { return canonical_text(c); })
      .def("hash", [](const RunConfig& c) { return hash_hex(config_hash(c)); });

  py::class_<RunRecord>(m, "RunRecord")
      .def_readonly("converged", &RunRecord::converged)
      .def_readonly("refinement_rounds", &RunRecord::refinement_rounds)
      .def_readonly("final_nodes", &RunRecord::final_nodes)
      .def_readonly("max_eta", &RunRecord::max_eta)
      .def_readonly("final_inclination_deg", &RunRecord::final_inclination_deg)
      .def_readonly("plane_change_deg", &RunRecord::plane_change_deg)
      .def_readonly("theta_span", &RunRecord::theta_span)
      .def_property_readonly("iterations", [](const RunRecord& r) { return r.first_pass.iterations; })
      .def_property_readonly("propellant", [](const RunRecord& r) { return r.verification.propellant; })
      .def_property_readonly("residual",
                             [](const RunRecord& r) { return r.verification.propagated_terminal.max(); })
      .def_property_readonly("relaxation_gap", [](const RunRecord& r) { return r.verification.relaxation_gap; })
      .def_property_readonly("times", [](const RunRecord& r) { return r.trajectory().mesh.times(); })
      .def(
          "states", [](const RunRecord& r, const std::string& s) -> StateTraj { return r.trajectory().states(sat_of(s)); },
          py::arg("sat"), "7 x M array: r, theta, phi, v_r, v_t, v_n, ln m")
      .def(
          "controls",
          [](const RunRecord& r, const std::string& s) -> ControlTraj { return r.trajectory().controls(sat_of(s)); },
          py::arg("sat"), "4 x M array: u_r, u_t, u_n, u_N")
      .def("row", [](const RunRecord& r) { return row_dict(make_row(r)); })
      .def("trajectory_csv", [](const RunRecord& r) {
        std::ostringstream out;
        write_trajectory_csv(r.trajectory(), out);
        return out.str();
      });

  m.def("preset_names", &preset_names);
  m.def("load_preset", [](const std::string& name) { return load_preset(name); }, py::arg("name"));
  m.def("load_config", [](const std::filesystem::path& p) { return load_scenario(p); }, py::arg("path"));
  m.def("parse_config", &parse_config, py::arg("text"), py::arg("origin") = "<string>");
  m.def("tf_range", &tf_range, py::arg("start"), py::arg("stop"), py::arg("step"));

  m.def(
      "solve", [](const RunConfig& cfg) { return run_single(cfg); }, py::arg("config"),
      py::call_guard<py::gil_scoped_release>(), "SCvx, mesh refinement, verification and phasing split.");
  m.def(
      "sweep",
      [](const RunConfig& cfg, std::vector<double> tf) {
        std::vector<SweepRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_sweep(cfg, std::move(tf));
        }
        py::list out;
        for (const SweepRow& r : rows) out.append(row_dict(r));
        return out;
      },
      py::arg("config"), py::arg("tf"));
  m.def(
      "transfer_cost", [](const RunConfig& cfg) { return transfer_cost(cfg); }, py::arg("config"),
      py::call_guard<py::gil_scoped_release>());
  m.def(
      "hohmann_dm",
      [](double r0, double rf, double c) { return hohmann_oracle(r0, rf, c).dm; }, py::arg("r0"), py::arg("rf"),
      py::arg("c"));
  m.def("sweep_columns", &sweep_columns);
}
