#pragma once

#include <cstdint>
#include <vector>

#include "mecmob/model.hpp"

namespace mecmob {

struct Point {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point&) const = default;
};

double distance(Point a, Point b);

/// Rectangle anchored at the origin, in meters.
struct Area {
    double width = 0.0;
    double height = 0.0;
    bool operator==(const Area&) const = default;
};

struct Topology {
    std::vector<Point> bs_positions;
    Area area;
    double association_radius = 0.0;

    int size() const { return static_cast<int>(bs_positions.size()); }

    /// Base stations within the association radius of p, in ascending index order.
    std::vector<BsId> candidates(Point p) const;

    bool operator==(const Topology&) const = default;
};

/// side_count x side_count BSs on a square grid centered in the area.
/// Throws ConfigError if the grid does not fit.
Topology build_grid_topology(int side_count, double spacing_m, Area area, double radius_m);

struct MobilityParams {
    double step_m = 30.0;
    /// Probability that the move opposite to the previous one is dropped from the choice set.
    double reversal_suppression = 1.0;
    /// Walk lattice extends this far beyond the BS bounding box (clipped to the area).
    double margin_m = 0.0;
};

struct Trajectory {
    std::vector<Point> locations;
    bool operator==(const Trajectory&) const = default;
};

/// Lattice random walk with suppressed back-and-forth moves. Every visited point has a
/// non-empty candidate set.
Trajectory generate_trajectory(const Topology& topology, int periods, std::uint64_t seed,
                               const MobilityParams& params);

struct RadioParams {
    double noise_power_w = 1e-13;
    double bandwidth_hz = 20e6;
    double tx_power_w = 0.1;
    bool operator==(const RadioParams&) const = default;
};

struct ProcessParams {
    double lambda_max = 12.0;
    double mu_max = 40.0;
    double service_rate = 50.0;
    double pathloss_intercept_db = 25.3;
    double pathloss_slope_db = 37.6;
    /// Distances are clamped to this floor before the pathloss is evaluated.
    double min_distance_m = 1.0;
    double interference_w = 0.0;
    /// Optional per-period interference; overrides interference_w when non-empty.
    std::vector<double> interference_per_period;
    /// Log-normal shadowing on the trace-level gains (0 disables it).
    double shadowing_sigma_db = 0.0;
    int max_resample = 100;
};

/// Pathloss in dB for a distance in meters (log10 convention).
double pathloss_db(double distance_m, double intercept_db, double slope_db);

/// Linear gain 10^(-PL/10) after clamping the distance.
double channel_gain(double distance_m, const ProcessParams& params);

struct CandidateLink {
    BsId bs = 0;
    ChannelState channel;
    bool operator==(const CandidateLink&) const = default;
};

/// Exogenous state of one period. servers covers every BS; links covers A(L^t) only.
struct PeriodState {
    Point location;
    double lambda = 0.0;
    std::vector<EdgeServerState> servers;
    std::vector<CandidateLink> links;
    bool operator==(const PeriodState&) const = default;
};

struct ScenarioTrace {
    Topology topology;
    RadioParams radio;
    SystemConstants consts;
    std::vector<PeriodState> periods;
    std::uint64_t seed = 0;

    int horizon() const { return static_cast<int>(periods.size()); }
    bool operator==(const ScenarioTrace&) const = default;
};

/// Draws workload, background load and channel gains along the trajectory. Periods with no
/// feasible candidate are redrawn (background load and shadowing) up to max_resample times,
/// after which InfeasibleScenario is thrown.
ScenarioTrace generate_processes(const Topology& topology, const Trajectory& trajectory,
                                 const SystemConstants& consts, const RadioParams& radio,
                                 std::uint64_t seed, const ProcessParams& params);

/// True when at least one candidate of the period passes is_feasible.
bool has_feasible_candidate(const PeriodState& period, const SystemConstants& consts);

}  // namespace mecmob
