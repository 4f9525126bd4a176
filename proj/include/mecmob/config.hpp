#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mecmob/offline.hpp"
#include "mecmob/policies.hpp"
#include "mecmob/scenario.hpp"

namespace mecmob {

inline constexpr int kConfigSchemaVersion = 1;

struct GridParams {
    int side_count = 5;
    double spacing_m = 160.0;
    Area area{1000.0, 1000.0};
    double association_radius_m = 250.0;
};

/// Everything needed to regenerate a trace from a seed.
struct ScenarioParams {
    GridParams grid;
    MobilityParams mobility;
    ProcessParams processes;
    RadioParams radio;
};

struct RunConfig {
    ScenarioParams scenario;
    /// horizon is derived from the schedule (R * J).
    SystemConstants consts{8e6, 120.0, 1000, 100e6, 5.0};
    std::string budget_unit = "J";
    FrameSchedule schedule = FrameSchedule::constant(250, 4, 0.01);
    /// Any of delay_optimal, energy_optimal, lookahead, fsi, psi.
    std::vector<std::string> policies{"delay_optimal", "energy_optimal", "lookahead", "fsi", "psi"};
    PsiConfig psi;
    LookaheadOptions lookahead{1e6, true};
    int replications = 1;
    std::uint64_t base_seed = 1;
    std::string output_dir = "out";
    std::string profile = "custom";

    /// Values of the published simulation setup (R = 250, J = 4, alpha*B = 120).
    static RunConfig paper();
    /// Shorter horizon for quick runs: R = 25, J = 4, 10 replications.
    static RunConfig desk();
    static RunConfig from_profile(const std::string& name);

    /// Throws ConfigError on an inconsistent configuration.
    void validate() const;
    std::uint64_t replication_seed(int replication) const { return base_seed + static_cast<std::uint64_t>(replication); }
};

nlohmann::json config_to_json(const RunConfig& config);
/// Missing keys keep the defaults of the named profile (or the paper profile).
RunConfig config_from_json(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

Topology build_topology(const ScenarioParams& params);

/// Trace for one replication seed; trajectory and processes use independent streams.
ScenarioTrace generate_scenario(const RunConfig& config, std::uint64_t seed);

std::string explore_mode_name(ExploreMode mode);
ExploreMode explore_mode_from_name(const std::string& name);

}  // namespace mecmob
