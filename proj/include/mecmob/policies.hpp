#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mecmob/model.hpp"
#include "mecmob/scenario.hpp"

namespace mecmob {

/// Model-side view of one candidate BS in one period.
struct CandidateEval {
    BsId bs = 0;
    std::optional<double> delay;  // nullopt: server overloaded
    double energy = 0.0;
    double rate = 0.0;
    double gain = 0.0;
    bool feasible = false;  // minimum rate, stability and maximum delay
};

std::vector<CandidateEval> evaluate_period(const PeriodState& period, const SystemConstants& consts,
                                           const DelayFunction& delay = processor_sharing_delay());

/// Virtual energy-deficit queue.
struct DeficitQueue {
    double q = 0.0;
    double per_period_budget = 0.0;
};

/// q' = max(0, q + energy_used - per_period_budget)
DeficitQueue queue_update(DeficitQueue queue, double energy_used);

/// R frames of J periods, with one control weight V_r per frame.
struct FrameSchedule {
    int frame_length = 4;  // J
    int frame_count = 1;   // R
    std::vector<double> weights;

    static FrameSchedule constant(int frame_count, int frame_length, double weight);

    int horizon() const { return frame_length * frame_count; }
    double weight(int frame) const { return weights.size() == 1 ? weights.front() : weights.at(frame); }
    /// Per-frame weights, expanded to length R.
    std::vector<double> expanded() const;
    /// Throws ConfigError unless J, R >= 1 and every weight is positive.
    void validate() const;
};

struct Decision {
    int candidate = -1;  // index into the evaluated candidate list
    BsId bs = -1;
    bool fallback = false;
};

/// Drift-plus-penalty objective V * d + q * e of a candidate with a finite delay.
double p3_objective(const CandidateEval& c, double weight, double q);

/// Choice when no candidate satisfies the per-period constraints: lowest delay among stable
/// servers, else the smallest shortfall below the minimum rate.
Decision infeasible_fallback(std::span<const CandidateEval> cands, double min_rate_bps);

/// argmin of V * d + q * e over feasible candidates; lowest BS index wins ties.
Decision fsi_decide(double q, double weight, std::span<const CandidateEval> cands, double min_rate_bps);

/// Lowest delay among feasible candidates, energy ignored.
Decision baseline_delay_optimal(std::span<const CandidateEval> cands, double min_rate_bps);

/// Best channel (largest gain) among feasible candidates.
Decision baseline_energy_optimal(std::span<const CandidateEval> cands, double min_rate_bps);

/// UCB1 statistics for one period. Arms are candidate positions, not BS ids.
class UcbState {
public:
    explicit UcbState(int arms, double explore_coeff = 0.0);

    int arms() const { return static_cast<int>(z_bar_.size()); }
    /// Unvisited arms first (lowest index), then argmin z_bar - sqrt(coeff * ln k / theta).
    int select(int slot) const;
    /// Running-mean update with the slot objective V * delay + q * energy.
    void update(int arm, double observed_delay, double observed_energy, double weight, double q);
    void record(int arm, double objective);

    double index(int arm, int slot) const;
    double explore_coeff() const { return explore_coeff_; }
    void set_explore_coeff(double c) { explore_coeff_ = c; }
    const std::vector<double>& z_bar() const { return z_bar_; }
    const std::vector<int>& theta() const { return theta_; }

private:
    std::vector<double> z_bar_;
    std::vector<int> theta_;
    double explore_coeff_;
};

enum class ExploreMode {
    RunningMax,  // 2 * (largest slot objective observed so far in the period)^2
    Oracle,      // 2 * (largest noiseless per-slot objective among candidates)^2
    Fixed,
};

struct SlotNoise {
    bool poisson_arrivals = true;
    double shadowing_sigma_db = 2.0;
};

struct PsiConfig {
    int slots = 100;  // K
    ExploreMode explore_mode = ExploreMode::RunningMax;
    double fixed_explore_coeff = 0.0;
    SlotNoise noise;
    /// Period-level delay charged for an overloaded server.
    double overload_delay = 10.0;
};

struct PeriodOutcome {
    BsId chosen_bs = -1;             // PSI: BS of the final slot
    std::vector<BsId> slot_choices;  // PSI only
    double delay = 0.0;
    double energy = 0.0;
    double queue_before = 0.0;
    double queue_after = 0.0;
    int feasible_set_size = 0;
    int handovers_within_period = 0;
    bool infeasible_fallback = false;
    int infeasible_slots = 0;  // PSI: slots served by a BS violating the rate or delay limit

    // PSI diagnostics, all noiseless per-slot values.
    std::vector<double> slot_objective;  // observed V * d + q * e per slot
    std::vector<double> slot_expected;   // Z(n_k) / K of the selected arm
    double optimal_objective = 0.0;      // Z* over all candidates
    double z_max = 0.0;                  // max_n Z(n) / K
    std::vector<double> candidate_objective;  // Z(n) for every candidate
};

/// Noiseless period objective of each candidate, overloaded servers charged overload_delay.
std::vector<double> candidate_objectives(std::span<const CandidateEval> cands, double weight, double q,
                                         double overload_delay);

/// One period of UCB1 learning over K slots with noisy slot feedback.
PeriodOutcome psi_run_period(const PeriodState& period, const SystemConstants& consts, double q,
                             double weight, const PsiConfig& config, std::mt19937_64& rng);

enum class PolicyKind { DelayOptimal, EnergyOptimal, Fsi, Psi };

std::string policy_name(PolicyKind kind);
PolicyKind policy_from_name(const std::string& name);

struct RunSeries {
    std::string policy;
    std::vector<PeriodOutcome> periods;

    double mean_delay() const;
    double total_energy() const;
    int fallback_count() const;
    /// Changes of chosen_bs between consecutive periods.
    int handovers_between_periods() const;
    double mean_handovers_within_period() const;
};

/// Full-information drift-plus-penalty run: queue reset and V <- V_r at every frame start.
RunSeries fsi_run(const ScenarioTrace& trace, const FrameSchedule& schedule);

/// Partial-information run. seed drives the slot noise only.
RunSeries psi_run(const ScenarioTrace& trace, const FrameSchedule& schedule, const PsiConfig& config,
                  std::uint64_t seed);

/// Greedy baselines; the deficit queue is tracked for reporting only.
RunSeries baseline_run(const ScenarioTrace& trace, const FrameSchedule& schedule, PolicyKind kind);

/// Dispatch on kind.
RunSeries run_policy(PolicyKind kind, const ScenarioTrace& trace, const FrameSchedule& schedule,
                     const PsiConfig& psi, std::uint64_t seed);

}  // namespace mecmob
