#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "mecmob/bounds.hpp"
#include "mecmob/config.hpp"
#include "mecmob/errors.hpp"
#include "mecmob/harness.hpp"
#include "mecmob/model.hpp"
#include "mecmob/policies.hpp"
#include "mecmob/trace_io.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

mecmob::RunConfig config_from(const std::string& text, const std::string& profile) {
    if (text.empty()) return mecmob::RunConfig::from_profile(profile);
    return mecmob::config_from_json(json::parse(text));
}

}  // namespace

PYBIND11_MODULE(_mecmob, m) {
    m.doc() = "Mobility management for mobile edge computing (C++ core)";

    py::register_exception<mecmob::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<mecmob::SchemaError>(m, "SchemaError", PyExc_ValueError);
    py::register_exception<mecmob::UnstableServer>(m, "UnstableServer", PyExc_ValueError);
    py::register_exception<mecmob::DegenerateGap>(m, "DegenerateGap", PyExc_ValueError);
    py::register_exception<mecmob::IoError>(m, "IoError", PyExc_OSError);
    py::register_exception<mecmob::ReplicationError>(m, "ReplicationError", PyExc_RuntimeError);

    m.def(
        "delay_cost",
        [](double lambda, double service_rate, double background_load) {
            return mecmob::delay_cost(lambda, {service_rate, background_load});
        },
        py::arg("lam"), py::arg("service_rate"), py::arg("background_load"));
    m.def(
        "uplink_rate",
        [](double gain, double interference, double noise_power, double bandwidth, double tx_power) {
            return mecmob::uplink_rate({gain, interference, noise_power, bandwidth, tx_power});
        },
        py::arg("gain"), py::arg("interference"), py::arg("noise_power"), py::arg("bandwidth"), py::arg("tx_power"));
    m.def(
        "tx_energy",
        [](double lambda, double gain, double interference, double noise_power, double bandwidth, double tx_power,
           double workload_bits) {
            return mecmob::tx_energy(lambda, {gain, interference, noise_power, bandwidth, tx_power}, workload_bits);
        },
        py::arg("lam"), py::arg("gain"), py::arg("interference"), py::arg("noise_power"), py::arg("bandwidth"),
        py::arg("tx_power"), py::arg("workload_bits"));
    m.def(
        "queue_update",
        [](double q, double energy, double per_period_budget) {
            return mecmob::queue_update({q, per_period_budget}, energy).q;
        },
        py::arg("q"), py::arg("energy"), py::arg("per_period_budget"));
    m.def("pathloss_db", &mecmob::pathloss_db, py::arg("distance_m"), py::arg("intercept_db") = 25.3,
          py::arg("slope_db") = 37.6);

    m.def("ucb_regret_bound", [](double z_max, const std::vector<double>& gaps, double slots) {
        return mecmob::ucb_regret_bound(z_max, gaps, slots);
    }, py::arg("z_max"), py::arg("gaps"), py::arg("slots"));
    m.def("theorem1_delay_bound",
          [](const std::vector<double>& d_star, double U, double C, int J, const std::vector<double>& weights) {
              return mecmob::theorem1_delay_bound(d_star, U, C, J, weights);
          },
          py::arg("d_star"), py::arg("U"), py::arg("C"), py::arg("frame_length"), py::arg("weights"));
    m.def("theorem1_energy_bound",
          [](const std::vector<double>& d_star, double U, double C, int J, const std::vector<double>& weights,
             double budget) { return mecmob::theorem1_energy_bound(d_star, U, C, J, weights, budget); },
          py::arg("d_star"), py::arg("U"), py::arg("C"), py::arg("frame_length"), py::arg("weights"),
          py::arg("budget"));

    m.def("default_config", [](const std::string& profile) {
        return mecmob::config_to_json(mecmob::RunConfig::from_profile(profile)).dump();
    }, py::arg("profile") = "paper");
    m.def(
        "generate_trace",
        [](const std::string& config, std::uint64_t seed, const std::string& profile) {
            const auto c = config_from(config, profile);
            return mecmob::trace_to_json(mecmob::generate_scenario(c, seed)).dump();
        },
        py::arg("config") = "", py::arg("seed") = 1, py::arg("profile") = "paper");
    m.def(
        "trace_hash",
        [](const std::string& trace) { return mecmob::trace_hash(mecmob::trace_from_json(json::parse(trace))); },
        py::arg("trace"));
    m.def(
        "run_experiment",
        [](const std::string& config, const std::string& profile) {
            const auto c = config_from(config, profile);
            mecmob::ExperimentReport report;
            {
                py::gil_scoped_release release;
                report = mecmob::run_experiment(c);
            }
            return mecmob::summary_json(report).dump();
        },
        py::arg("config") = "", py::arg("profile") = "desk");
    m.def(
        "evaluate_bounds",
        [](const std::string& summary) { return mecmob::evaluate_summary_bounds(json::parse(summary)).dump(); },
        py::arg("summary"));
}
