#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qubus/chain.hpp"
#include "qubus/commands.hpp"
#include "qubus/config.hpp"
#include "qubus/link.hpp"
#include "qubus/parity_circuit.hpp"
#include "qubus/qnd.hpp"

namespace py = pybind11;
using namespace qubus;

namespace {

py::dict command_dict(const CommandResult& r) {
  py::dict d;
  d["exit_code"] = r.exit_code;
  d["csv"] = r.csv;
  d["report"] = r.report;
  d["event_log"] = r.event_log;
  return d;
}

RunConfig config_from_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "qubus repeater-protocol simulator core";
  m.attr("__version__") = "0.1.0";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("coherent_overlap", &coherent_overlap, py::arg("a"), py::arg("b"));

  // qnd
  py::class_<DetectorParams>(m, "DetectorParams")
      .def(py::init<>())
      .def(py::init([](double eta_D, double lambda_dark) {
             return DetectorParams{eta_D, lambda_dark};
           }),
           py::arg("eta_D") = 1.0, py::arg("lambda_dark") = 0.0)
      .def_readwrite("eta_D", &DetectorParams::eta_D)
      .def_readwrite("lambda_dark", &DetectorParams::lambda_dark);

  py::class_<QndParams>(m, "QndParams")
      .def(py::init([](Complex alpha0, double theta, DetectorParams det) {
             return QndParams{alpha0, theta, det};
           }),
           py::arg("alpha0"), py::arg("theta"), py::arg("det") = DetectorParams{})
      .def_readwrite("alpha0", &QndParams::alpha0)
      .def_readwrite("theta", &QndParams::theta)
      .def_readwrite("det", &QndParams::det);

  m.def("comparison_success", &comparison_success);
  m.def("comparison_error", &comparison_error);
  m.def(
      "purify_source",
      [](double p_s, const QndParams& q) {
        const PurifyResult r = purify_source(SourceState{p_s}, q);
        return py::make_tuple(r.click_prob, r.conditional_fidelity);
      },
      py::arg("p_s"), py::arg("qnd"), "Returns (click_prob, conditional_fidelity).");

  // link
  py::class_<LinkParams>(m, "LinkParams")
      .def(py::init<>())
      .def_readwrite("alpha", &LinkParams::alpha)
      .def_readwrite("theta", &LinkParams::theta)
      .def_readwrite("L0_km", &LinkParams::L0_km)
      .def_readwrite("atten_km", &LinkParams::atten_km)
      .def_readwrite("f_hz", &LinkParams::f_hz)
      .def_readwrite("c_km_s", &LinkParams::c_km_s)
      .def_readwrite("det", &LinkParams::det)
      .def_readwrite("gamma", &LinkParams::gamma)
      .def_readwrite("delta", &LinkParams::delta)
      .def_property_readonly("eta", &LinkParams::eta);

  m.def("p_g_exact", &p_g_exact);
  m.def("p_g_from_fidelity", &p_g_from_fidelity, py::arg("F"), py::arg("eta"));
  m.def("link_fidelity", &link_fidelity);
  m.def("mean_link_time", py::overload_cast<const LinkParams&>(&mean_link_time));
  m.def(
      "fig3_sweep",
      [](const std::vector<double>& d, const std::vector<double>& F, double atten) {
        std::vector<std::tuple<double, double, double>> rows;
        for (const Fig3Row& r : fig3_sweep(d, F, atten)) rows.emplace_back(r.L0_km, r.F, r.P_g);
        return rows;
      },
      py::arg("distances_km"), py::arg("F_grid"), py::arg("atten_km") = 25.0);

  py::class_<LinkSimulator>(m, "LinkSimulator")
      .def(py::init<const Matrix4c&, const LinkParams&>(), py::arg("rho_in"), py::arg("params"))
      .def("success_probability", &LinkSimulator::success_probability)
      .def("port_probabilities", &LinkSimulator::port_probabilities)
      .def(
          "run",
          [](const LinkSimulator& s, std::uint64_t attempts, std::uint64_t seed) {
            const LinkBatch b = s.run(attempts, seed);
            py::dict d;
            d["attempts"] = b.attempts;
            d["successes"] = b.successes;
            d["success_rate"] = b.success_rate();
            d["mean_fidelity"] = b.mean_fidelity;
            d["port_counts"] = b.port_counts;
            return d;
          },
          py::arg("attempts"), py::arg("seed"));

  // parity circuit
  m.def("verify_circuit", []() {
    const CircuitReport r = verify_circuit(build_unitaries());
    std::vector<std::tuple<std::string, double, bool>> checks;
    for (const auto& c : r.checks) checks.emplace_back(c.name, c.residual, c.passed);
    return py::make_tuple(r.all_passed(), checks);
  });

  // chain
  py::class_<ChainParams>(m, "ChainParams")
      .def(py::init<>())
      .def_readwrite("L0_km", &ChainParams::L0_km)
      .def_readwrite("L_km", &ChainParams::L_km)
      .def_readwrite("f_hz", &ChainParams::f_hz)
      .def_readwrite("P_g", &ChainParams::P_g)
      .def_readwrite("P_c", &ChainParams::P_c)
      .def_readwrite("tau0_s", &ChainParams::tau0_s)
      .def_readwrite("tauD_s", &ChainParams::tauD_s)
      .def_readwrite("c_km_s", &ChainParams::c_km_s)
      .def_readwrite("F_link", &ChainParams::F_link)
      .def_readwrite("memory_modes", &ChainParams::memory_modes);

  py::enum_<MemoryMode>(m, "MemoryMode")
      .value("RateLimited", MemoryMode::RateLimited)
      .value("DeadtimeLimited", MemoryMode::DeadtimeLimited);

  m.def("t_tot", &t_tot);
  m.def("t_tot_closed", &t_tot_closed);
  m.def("memory_space", &memory_space, py::arg("params"),
        py::arg("mode") = MemoryMode::RateLimited);
  m.def("final_fidelity", &final_fidelity, py::arg("F"), py::arg("L_km"), py::arg("L0_km"));
  m.def("pc_from_efficiencies", &pc_from_efficiencies);
  m.def(
      "mc_distribute",
      [](const ChainParams& p, std::uint64_t seed, std::uint64_t trials) {
        McResult r;
        {
          py::gil_scoped_release release;
          r = mc_distribute(p, seed, trials);
        }
        py::dict d;
        d["mean_time_s"] = r.mean_time_s;
        d["stderr_time_s"] = r.stderr_time_s;
        d["first_link_mean_s"] = r.first_link_mean_s;
        d["connected_fraction"] = r.connected_fraction;
        d["residual_failure"] = r.residual_failure;
        d["histogram"] = r.histogram.counts;
        d["events"] = r.sample_log.events.size();
        return d;
      },
      py::arg("params"), py::arg("seed"), py::arg("trials"));

  // cli command bodies, driven by config text
  m.def("run_command", [](const std::string& name, const std::string& config_text) {
    if (name == "verify-circuit") return command_dict(cmd_verify_circuit());
    const RunConfig cfg = config_from_text(config_text);
    if (name == "purify") return command_dict(cmd_purify(cfg));
    if (name == "fig3") return command_dict(cmd_fig3(cfg));
    if (name == "table") return command_dict(cmd_table(cfg));
    if (name == "fig4") return command_dict(cmd_fig4(cfg));
    if (name == "mc") return command_dict(cmd_mc(cfg));
    throw py::value_error("unknown command '" + name + "'");
  }, py::arg("name"), py::arg("config_text") = "");
}
