#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mecmob/config.hpp"
#include "mecmob/offline.hpp"
#include "mecmob/policies.hpp"

namespace mecmob {

struct PolicyRun {
    std::string policy;
    RunSeries series;
    double mean_delay = 0.0;
    double total_energy = 0.0;
    bool budget_satisfied = false;
};

/// Theoretical bounds next to the inputs they were evaluated from.
struct BoundReport {
    double U = 0.0;
    int frame_length = 0;
    double budget = 0.0;
    std::vector<double> d_star;   // per frame
    std::vector<double> weights;  // per frame
    int infeasible_frames = 0;
    double fsi_delay_bound = 0.0;   // C = 0
    double fsi_energy_bound = 0.0;  // C = 0
    double psi_regret_c_empirical = 0.0;
    double psi_regret_c_bound = 0.0;
    double psi_delay_bound = 0.0;   // empirical C
    double psi_energy_bound = 0.0;  // empirical C
};

struct ReplicationReport {
    int replication = 0;
    std::uint64_t seed = 0;
    std::string trace_hash;
    std::vector<PolicyRun> runs;
    double d_star = 0.0;
    BoundReport bounds;

    const PolicyRun* find(const std::string& policy) const;
};

struct PolicyAggregate {
    std::string policy;
    double mean_delay = 0.0;
    double mean_delay_se = 0.0;
    double total_energy = 0.0;
    double total_energy_se = 0.0;
    double budget_satisfied_fraction = 0.0;
    double mean_handovers_within_period = 0.0;
    double handovers_between_periods = 0.0;
    double fallback_periods = 0.0;
};

struct ExperimentReport {
    RunConfig config;
    std::vector<ReplicationReport> replications;
    std::vector<PolicyAggregate> aggregates;
    /// PSI: sum over periods of the running-average noiseless objective at slot k,
    /// divided by the sum of the period optima (1.0 means optimal).
    std::vector<double> convergence;

    const PolicyAggregate* aggregate(const std::string& policy) const;
};

/// One trace per replication seed; every configured policy runs on that trace, then the
/// lookahead benchmark and the bounds. Replications run on a thread pool; results are
/// assembled in replication order.
ExperimentReport run_experiment(const RunConfig& config);

/// Bounds for one replication. The PSI entries stay zero without a PSI run.
BoundReport compute_bounds(const ScenarioTrace& trace, const RunConfig& config, const LookaheadResult& lookahead,
                           const RunSeries* psi);

struct SweepPoint {
    double value = 0.0;
    ExperimentReport report;
};

/// Sweepable parameters: budget, slots (K), V.
bool is_sweepable(const std::string& parameter);
RunConfig with_parameter(RunConfig config, const std::string& parameter, double value);
std::vector<SweepPoint> sweep(const RunConfig& config, const std::string& parameter, std::span<const double> values);

enum class EmitFormat { Csv, Json, Both };
EmitFormat emit_format_from_name(const std::string& name);

/// Period-level CSVs (t, replication, policy, <metric>), convergence.csv and summary.json.
void emit(const ExperimentReport& report, const std::filesystem::path& dir, EmitFormat format = EmitFormat::Both);

/// Names of the period-level CSV files written by emit.
std::vector<std::string> period_metrics();

nlohmann::json summary_json(const ExperimentReport& report);

/// Structural check of a summary document; throws SchemaError.
void validate_summary(const nlohmann::json& summary);

/// Recomputes the delay and energy bounds of every replication in a summary document.
nlohmann::json evaluate_summary_bounds(const nlohmann::json& summary);

}  // namespace mecmob
