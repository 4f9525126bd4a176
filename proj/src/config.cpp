#include "mecmob/config.hpp"

#include <fstream>
#include <set>

#include "mecmob/errors.hpp"

namespace mecmob {

using nlohmann::json;

RunConfig RunConfig::paper() {
    RunConfig c;
    c.profile = "paper";
    c.replications = 1;
    return c;
}

RunConfig RunConfig::desk() {
    RunConfig c;
    c.profile = "desk";
    // Budget-binding at T = 100: between the energy of the best-channel and the
    // lowest-delay associations. V keeps V / (alpha*B / T)^2 of the paper setup.
    c.consts.horizon = 100;
    c.consts.budget_j = 3.0;
    const double per_period = c.consts.budget_j / c.consts.horizon;
    c.schedule = FrameSchedule::constant(25, 4, 0.01 * (per_period / 0.12) * (per_period / 0.12));
    c.replications = 10;
    return c;
}

RunConfig RunConfig::from_profile(const std::string& name) {
    if (name == "paper") return paper();
    if (name == "desk") return desk();
    throw ConfigError("unknown profile '" + name + "' (expected paper or desk)");
}

void RunConfig::validate() const {
    schedule.validate();
    if (consts.horizon != schedule.horizon())
        throw ConfigError("horizon T must equal R*J (" + std::to_string(schedule.horizon()) + ")");
    if (!(consts.workload_size_bits > 0.0) || !(consts.budget_j > 0.0) || !(consts.min_rate_bps > 0.0) ||
        !(consts.max_delay > 0.0))
        throw ConfigError("system constants must be strictly positive");
    if (replications < 1) throw ConfigError("replication count must be >= 1");
    if (psi.slots < 1) throw ConfigError("PSI slot count K must be >= 1");
    if (!(scenario.radio.noise_power_w > 0.0) || !(scenario.radio.bandwidth_hz > 0.0) ||
        !(scenario.radio.tx_power_w > 0.0))
        throw ConfigError("radio parameters must be strictly positive");
    if (policies.empty()) throw ConfigError("no policy configured");
    std::set<std::string> seen;
    for (const auto& p : policies) {
        if (p != "lookahead") policy_from_name(p);
        if (!seen.insert(p).second) throw ConfigError("policy '" + p + "' listed twice");
    }
}

std::string explore_mode_name(ExploreMode mode) {
    switch (mode) {
        case ExploreMode::RunningMax: return "running_max";
        case ExploreMode::Oracle: return "oracle";
        case ExploreMode::Fixed: return "fixed";
    }
    return "unknown";
}

ExploreMode explore_mode_from_name(const std::string& name) {
    for (auto m : {ExploreMode::RunningMax, ExploreMode::Oracle, ExploreMode::Fixed})
        if (explore_mode_name(m) == name) return m;
    throw ConfigError("unknown explore_coeff mode '" + name + "'");
}

json config_to_json(const RunConfig& c) {
    const auto& s = c.scenario;
    const auto& pp = s.processes;
    json doc;
    doc["schema"] = "mecmob.run_config";
    doc["version"] = kConfigSchemaVersion;
    doc["profile"] = c.profile;
    doc["topology"] = {{"side_count", s.grid.side_count},
                       {"spacing_m", s.grid.spacing_m},
                       {"area_m", json::array({s.grid.area.width, s.grid.area.height})},
                       {"association_radius_m", s.grid.association_radius_m}};
    doc["mobility"] = {{"step_m", s.mobility.step_m},
                       {"reversal_suppression", s.mobility.reversal_suppression},
                       {"margin_m", s.mobility.margin_m}};
    doc["processes"] = {{"lambda_max", pp.lambda_max},
                        {"mu_max", pp.mu_max},
                        {"service_rate", pp.service_rate},
                        {"pathloss_intercept_db", pp.pathloss_intercept_db},
                        {"pathloss_slope_db", pp.pathloss_slope_db},
                        {"min_distance_m", pp.min_distance_m},
                        {"interference_w", pp.interference_w},
                        {"interference_per_period", pp.interference_per_period},
                        {"shadowing_sigma_db", pp.shadowing_sigma_db},
                        {"max_resample", pp.max_resample}};
    doc["radio"] = {{"noise_power_w", s.radio.noise_power_w},
                    {"bandwidth_hz", s.radio.bandwidth_hz},
                    {"tx_power_w", s.radio.tx_power_w}};
    doc["constants"] = {{"workload_size_bits", c.consts.workload_size_bits},
                        {"budget", {{"value", c.consts.budget_j}, {"unit", c.budget_unit}}},
                        {"min_rate_bps", c.consts.min_rate_bps},
                        {"max_delay", c.consts.max_delay}};
    doc["schedule"] = {{"frame_count", c.schedule.frame_count},
                       {"frame_length", c.schedule.frame_length},
                       {"V", c.schedule.weights}};
    doc["policies"] = c.policies;
    doc["psi"] = {{"slots", c.psi.slots},
                  {"explore_coeff", {{"mode", explore_mode_name(c.psi.explore_mode)},
                                     {"value", c.psi.fixed_explore_coeff}}},
                  {"noise", {{"poisson_arrivals", c.psi.noise.poisson_arrivals},
                             {"shadowing_sigma_db", c.psi.noise.shadowing_sigma_db}}},
                  {"overload_delay", c.psi.overload_delay}};
    doc["lookahead"] = {{"max_sequences", c.lookahead.max_sequences},
                        {"fallback_on_infeasible", c.lookahead.fallback_on_infeasible}};
    doc["replications"] = c.replications;
    doc["base_seed"] = c.base_seed;
    doc["output"] = {{"dir", c.output_dir}};
    return doc;
}

namespace {

template <class T>
void read(const json& obj, const char* key, T& out) {
    if (obj.is_object() && obj.contains(key)) out = obj.at(key).get<T>();
}

const json& section(const json& doc, const char* key) {
    static const json empty = json::object();
    return doc.contains(key) ? doc.at(key) : empty;
}

}  // namespace

RunConfig config_from_json(const json& doc) {
    if (!doc.is_object()) throw SchemaError("run config must be a JSON object");
    if (doc.contains("schema") && doc.at("schema") != "mecmob.run_config")
        throw SchemaError("not a mecmob.run_config document");
    if (doc.contains("version") && doc.at("version").get<int>() != kConfigSchemaVersion) {
        throw SchemaError("run config version " + std::to_string(doc.at("version").get<int>()) +
                          " is not supported (expected " + std::to_string(kConfigSchemaVersion) + ")");
    }
    try {
        RunConfig c = RunConfig::from_profile(doc.value("profile", std::string("paper")));
        auto& s = c.scenario;
        const auto& topo = section(doc, "topology");
        read(topo, "side_count", s.grid.side_count);
        read(topo, "spacing_m", s.grid.spacing_m);
        read(topo, "association_radius_m", s.grid.association_radius_m);
        if (topo.contains("area_m")) s.grid.area = {topo["area_m"].at(0).get<double>(), topo["area_m"].at(1).get<double>()};
        const auto& mob = section(doc, "mobility");
        read(mob, "step_m", s.mobility.step_m);
        read(mob, "reversal_suppression", s.mobility.reversal_suppression);
        read(mob, "margin_m", s.mobility.margin_m);
        const auto& proc = section(doc, "processes");
        auto& pp = s.processes;
        read(proc, "lambda_max", pp.lambda_max);
        read(proc, "mu_max", pp.mu_max);
        read(proc, "service_rate", pp.service_rate);
        read(proc, "pathloss_intercept_db", pp.pathloss_intercept_db);
        read(proc, "pathloss_slope_db", pp.pathloss_slope_db);
        read(proc, "min_distance_m", pp.min_distance_m);
        read(proc, "interference_w", pp.interference_w);
        read(proc, "interference_per_period", pp.interference_per_period);
        read(proc, "shadowing_sigma_db", pp.shadowing_sigma_db);
        read(proc, "max_resample", pp.max_resample);
        const auto& radio = section(doc, "radio");
        read(radio, "noise_power_w", s.radio.noise_power_w);
        read(radio, "bandwidth_hz", s.radio.bandwidth_hz);
        read(radio, "tx_power_w", s.radio.tx_power_w);
        const auto& consts = section(doc, "constants");
        read(consts, "workload_size_bits", c.consts.workload_size_bits);
        read(consts, "min_rate_bps", c.consts.min_rate_bps);
        read(consts, "max_delay", c.consts.max_delay);
        if (consts.contains("budget")) {
            read(consts["budget"], "value", c.consts.budget_j);
            read(consts["budget"], "unit", c.budget_unit);
            if (c.budget_unit != "J") throw ConfigError("budget unit must be J, got '" + c.budget_unit + "'");
        }
        const auto& sched = section(doc, "schedule");
        read(sched, "frame_count", c.schedule.frame_count);
        read(sched, "frame_length", c.schedule.frame_length);
        read(sched, "V", c.schedule.weights);
        c.consts.horizon = c.schedule.frame_count * c.schedule.frame_length;
        read(doc, "policies", c.policies);
        const auto& psi = section(doc, "psi");
        read(psi, "slots", c.psi.slots);
        read(psi, "overload_delay", c.psi.overload_delay);
        if (psi.contains("explore_coeff")) {
            const auto& ec = psi["explore_coeff"];
            if (ec.contains("mode")) c.psi.explore_mode = explore_mode_from_name(ec["mode"].get<std::string>());
            read(ec, "value", c.psi.fixed_explore_coeff);
        }
        if (psi.contains("noise")) {
            read(psi["noise"], "poisson_arrivals", c.psi.noise.poisson_arrivals);
            read(psi["noise"], "shadowing_sigma_db", c.psi.noise.shadowing_sigma_db);
        }
        const auto& la = section(doc, "lookahead");
        read(la, "max_sequences", c.lookahead.max_sequences);
        read(la, "fallback_on_infeasible", c.lookahead.fallback_on_infeasible);
        read(doc, "replications", c.replications);
        read(doc, "base_seed", c.base_seed);
        if (doc.contains("output")) read(doc["output"], "dir", c.output_dir);
        c.validate();
        return c;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed run config: ") + e.what());
    }
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    try {
        return config_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
}

Topology build_topology(const ScenarioParams& params) {
    return build_grid_topology(params.grid.side_count, params.grid.spacing_m, params.grid.area,
                               params.grid.association_radius_m);
}

ScenarioTrace generate_scenario(const RunConfig& config, std::uint64_t seed) {
    const auto topo = build_topology(config.scenario);
    const auto traj = generate_trajectory(topo, config.consts.horizon, seed, config.scenario.mobility);
    return generate_processes(topo, traj, config.consts, config.scenario.radio, seed, config.scenario.processes);
}

}  // namespace mecmob
