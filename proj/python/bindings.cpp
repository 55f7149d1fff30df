#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rydnhqc/experiments.hpp"

namespace py = pybind11;
using namespace rydnhqc;

namespace {

py::array_t<double> table_array(const io::ResultTable& t) {
  py::array_t<double> a({t.rows.size(), t.columns.size()});
  auto m = a.mutable_unchecked<2>();
  for (size_t i = 0; i < t.rows.size(); ++i)
    for (size_t j = 0; j < t.columns.size(); ++j) m(i, j) = t.rows[i][j];
  return a;
}

ExperimentConfig make_config(const std::string& experiment) {
  return ExperimentConfig::defaults(parse_experiment(experiment));
}

}  // namespace

PYBIND11_MODULE(_rydnhqc, m) {
  m.doc() = "Heralded holonomic Rydberg gate simulations";
  m.attr("__version__") = RYDNHQC_VERSION;

  py::register_exception<io::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ScheduleError>(m, "ScheduleError", PyExc_ValueError);
  py::register_exception<LayoutError>(m, "LayoutError", PyExc_ValueError);

  py::class_<ExperimentConfig>(m, "Config")
      .def(py::init(&make_config), py::arg("experiment") = "not-gate")
      .def_static("from_toml",
                  [](const std::string& text) { return ExperimentConfig::from_document(io::ConfigDocument::parse(text)); })
      .def("to_toml", [](const ExperimentConfig& c) { return c.to_document().serialize(); })
      .def("validate", &ExperimentConfig::validate)
      .def("use_gate", [](ExperimentConfig& c, const std::string& g) { c.use_gate(parse_gate_choice(g)); })
      .def_property_readonly("experiment", [](const ExperimentConfig& c) { return to_string(c.experiment); })
      .def_property(
          "level", [](const ExperimentConfig& c) { return to_string(c.level); },
          [](ExperimentConfig& c, const std::string& s) {
            try {
              c.level = parse_model_level(s);
            } catch (const std::invalid_argument& e) {
              throw io::ConfigError(e.what());
            }
            c.params.level = c.level;
          })
      .def_property_readonly("gate", [](const ExperimentConfig& c) { return to_string(c.gate); })
      .def_readwrite("theta_s", &ExperimentConfig::theta_s)
      .def_readwrite("theta1", &ExperimentConfig::theta1)
      .def_readwrite("phi1", &ExperimentConfig::phi1)
      .def_readwrite("chi0", &ExperimentConfig::chi0)
      .def_readwrite("omega3_tilde", &ExperimentConfig::omega3_tilde)
      .def_readwrite("epsilon", &ExperimentConfig::epsilon)
      .def_readwrite("gamma_khz", &ExperimentConfig::gamma_khz)
      .def_readwrite("steps", &ExperimentConfig::steps)
      .def_readwrite("master_steps", &ExperimentConfig::master_steps)
      .def_readwrite("snapshots", &ExperimentConfig::snapshots)
      .def_readwrite("epsilons", &ExperimentConfig::epsilons)
      .def_readwrite("chi0_values", &ExperimentConfig::chi0_values)
      .def_readwrite("gammas_khz", &ExperimentConfig::gammas_khz)
      .def_readwrite("qs_theta_over_pi", &ExperimentConfig::qs_theta_over_pi)
      .def_readwrite("qs_chi0", &ExperimentConfig::qs_chi0)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("threads", &ExperimentConfig::threads)
      .def_readwrite("strict", &ExperimentConfig::strict)
      .def_readwrite("out_dir", &ExperimentConfig::out_dir)
      .def("__eq__", [](const ExperimentConfig& a, const ExperimentConfig& b) { return a == b; });

  py::class_<RunOutput>(m, "Result")
      .def_property_readonly("scalars",
                             [](const RunOutput& r) {
                               py::dict d;
                               for (const auto& s : r.scalars) d[py::str(s.name)] = s.value;
                               return d;
                             })
      .def_property_readonly("tables",
                             [](const RunOutput& r) {
                               py::dict d;
                               for (const auto& t : r.tables) d[py::str(t.name)] = table_array(t);
                               return d;
                             })
      .def("columns",
           [](const RunOutput& r, const std::string& table) {
             std::vector<std::string> names;
             for (const auto& c : r.table(table).columns) names.push_back(c.name);
             return names;
           })
      .def_readonly("warnings", &RunOutput::warnings)
      .def_readonly("guard_violation", &RunOutput::guard_violation);

  m.def(
      "run",
      [](const ExperimentConfig& c) {
        py::gil_scoped_release release;
        return run_experiment(c);
      },
      py::arg("config"), "Runs the configured experiment.");
  m.def("emit_outputs", &emit_outputs, py::arg("result"), py::arg("config"), py::arg("out_dir"),
        "Writes the CSV tables and summary.json; returns the written paths.");

  m.def("qs_closed_form", &qs_closed_form, py::arg("chi0"), py::arg("theta_s"));
  m.def(
      "systematic_error_sensitivity",
      [](double theta_s, double chi0, int n_steps) {
        return systematic_error_sensitivity(LoopSchedule{theta_s, chi0, 1.0}, n_steps);
      },
      py::arg("theta_s"), py::arg("chi0"), py::arg("n_steps") = 20000);
  m.def(
      "controls",
      [](double t, double theta_s, double chi0) {
        const Controls c = controls_at(t, LoopSchedule{theta_s, chi0, 1.0});
        return std::make_pair(c.omega_x, c.omega_y);
      },
      py::arg("t"), py::arg("theta_s") = kPi, py::arg("chi0") = 1.0, "(omega_x, omega_y) in units of 1/T.");
  m.def("average_fidelity", [](const Matrix& mat) { return average_fidelity(mat, static_cast<int>(mat.rows())); },
        py::arg("m"));
  m.def(
      "target_gate",
      [](const std::string& name) {
        return target_gate(parse_gate_choice(name) == GateChoice::cnot ? GateSchedule::cnot_gate()
                                                                        : GateSchedule::not_gate());
      },
      py::arg("name"));
}
