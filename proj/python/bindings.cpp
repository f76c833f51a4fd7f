#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "rgl/config.hpp"
#include "rgl/hyperbolic.hpp"
#include "rgl/lyapunov.hpp"
#include "rgl/orbit.hpp"
#include "rgl/runner.hpp"
#include "rgl/stationary.hpp"

namespace py = pybind11;
using namespace rgl;

PYBIND11_MODULE(rgl_py, m) {
  m.doc() = "bindings for the rgl core";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<MapFamily>(m, "MapFamily")
      .def_static("doubling", &MapFamily::doubling, py::arg("t_star") = 0.0, py::arg("d") = 2)
      .def_static("nonlinear", &MapFamily::nonlinear, py::arg("d"), py::arg("alpha"), py::arg("t_star") = 0.0)
      .def_static("quadratic", &MapFamily::quadratic, py::arg("t_star"))
      .def("eval", &MapFamily::eval)
      .def("derivative", &MapFamily::derivative)
      .def_property_readonly("kind", [](const MapFamily& f) { return to_string(f.kind); });

  py::class_<NoiseKernel>(m, "NoiseKernel")
      .def_static("uniform", &NoiseKernel::uniform, py::arg("center"), py::arg("epsilon"))
      .def_static("dirac", &NoiseKernel::dirac, py::arg("center"))
      .def_readonly("center", &NoiseKernel::center)
      .def_readonly("epsilon", &NoiseKernel::epsilon);

  py::class_<OrbitRecord>(m, "OrbitRecord")
      .def_readonly("points", &OrbitRecord::points)
      .def_readonly("log_deriv", &OrbitRecord::log_deriv)
      .def_readonly("t_used", &OrbitRecord::t_used);

  m.def("random_orbit",
        [](const MapFamily& f, const NoiseKernel& k, std::uint64_t seed, double x0, std::int64_t n) {
          return random_orbit(f, make_realization(k, seed, n), x0, n);
        },
        py::arg("family"), py::arg("kernel"), py::arg("seed"), py::arg("x0"), py::arg("n"));

  m.def("exponent",
        [](const MapFamily& f, const NoiseKernel& k, std::uint64_t seed, double x0, int N, std::int64_t n) {
          return estimate_power_exponent(f, k, seed, x0, N, n).value;
        },
        py::arg("family"), py::arg("kernel"), py::arg("seed"), py::arg("x0"), py::arg("N"), py::arg("n"));

  m.def("hyperbolic_times",
        [](const std::vector<double>& ld, double lambda) { return hyperbolic_times(ld, lambda).times; });
  m.def("hyperbolic_times_bruteforce", &hyperbolic_times_bruteforce);

  m.def("ulam_density",
        [](const MapFamily& f, const NoiseKernel& k, int bins, int kernel_samples) {
          return ulam_stationary(build_ulam(f, k, bins, kernel_samples)).density.weights;
        },
        py::arg("family"), py::arg("kernel"), py::arg("bins") = 256, py::arg("kernel_samples") = 16);

  py::class_<QuadraticRow>(m, "QuadraticRow")
      .def_readonly("a", &QuadraticRow::a)
      .def_readonly("exponent", &QuadraticRow::exponent)
      .def_readonly("period", &QuadraticRow::period)
      .def_readonly("cycle_multiplier", &QuadraticRow::cycle_multiplier);
  m.def("quadratic_table", &quadratic_counterexample, py::arg("a_values"), py::arg("n_steps") = 100000,
        py::arg("seeds") = 2, py::arg("seed") = 1);

  m.def("subcommands", &subcommands);
  m.def(
      "run",
      [](const std::string& sub, const std::string& config_path, const std::vector<std::string>& overrides,
         const std::string& out_dir, int workers) {
        Config cfg = Config::defaults();
        if (!config_path.empty()) cfg.load_file(config_path);
        for (auto& o : overrides) cfg.set_override(o);
        std::ostringstream log;
        int code;
        {
          py::gil_scoped_release release;
          code = run(sub, cfg, out_dir, workers, log);
        }
        return py::make_tuple(code, log.str());
      },
      py::arg("subcommand"), py::arg("config") = "", py::arg("overrides") = std::vector<std::string>{},
      py::arg("out") = "out", py::arg("workers") = 1);
}
