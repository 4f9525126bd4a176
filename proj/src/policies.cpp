#include "mecmob/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mecmob/errors.hpp"

namespace mecmob {

std::vector<CandidateEval> evaluate_period(const PeriodState& period, const SystemConstants& consts,
                                           const DelayFunction& delay) {
    std::vector<CandidateEval> out;
    out.reserve(period.links.size());
    for (const auto& link : period.links) {
        CandidateEval c;
        c.bs = link.bs;
        c.delay = delay(period.lambda, period.servers.at(link.bs));
        c.rate = uplink_rate(link.channel);
        c.energy = tx_energy(period.lambda, link.channel, consts.workload_size_bits);
        c.gain = link.channel.gain;
        c.feasible = c.rate >= consts.min_rate_bps && c.delay && *c.delay <= consts.max_delay;
        out.push_back(c);
    }
    return out;
}

DeficitQueue queue_update(DeficitQueue queue, double energy_used) {
    queue.q = std::max(0.0, queue.q + energy_used - queue.per_period_budget);
    return queue;
}

FrameSchedule FrameSchedule::constant(int frame_count, int frame_length, double weight) {
    return FrameSchedule{frame_length, frame_count, {weight}};
}

std::vector<double> FrameSchedule::expanded() const {
    std::vector<double> out(frame_count);
    for (int r = 0; r < frame_count; ++r) out[r] = weight(r);
    return out;
}

void FrameSchedule::validate() const {
    if (frame_length < 1 || frame_count < 1) throw ConfigError("frame length and count must be >= 1");
    if (weights.size() != 1 && static_cast<int>(weights.size()) != frame_count)
        throw ConfigError("V schedule needs one weight or one weight per frame");
    for (double v : weights)
        if (!(v > 0.0)) throw ConfigError("control weights V_r must be positive");
}

double p3_objective(const CandidateEval& c, double weight, double q) {
    return weight * c.delay.value() + q * c.energy;
}

namespace {

template <class Key>
Decision argmin_feasible(std::span<const CandidateEval> cands, Key key) {
    Decision best;
    double best_value = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(cands.size()); ++i) {
        if (!cands[i].feasible) continue;
        const double v = key(cands[i]);
        if (best.candidate < 0 || v < best_value) {
            best_value = v;
            best = {i, cands[i].bs, false};
        }
    }
    return best;
}

}  // namespace

Decision infeasible_fallback(std::span<const CandidateEval> cands, double min_rate_bps) {
    Decision best;
    double best_value = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(cands.size()); ++i) {
        if (cands[i].delay && (best.candidate < 0 || *cands[i].delay < best_value)) {
            best_value = *cands[i].delay;
            best = {i, cands[i].bs, true};
        }
    }
    if (best.candidate >= 0) return best;
    for (int i = 0; i < static_cast<int>(cands.size()); ++i) {
        const double shortfall = std::max(0.0, min_rate_bps - cands[i].rate);
        if (best.candidate < 0 || shortfall < best_value) {
            best_value = shortfall;
            best = {i, cands[i].bs, true};
        }
    }
    return best;
}

Decision fsi_decide(double q, double weight, std::span<const CandidateEval> cands, double min_rate_bps) {
    auto d = argmin_feasible(cands, [&](const CandidateEval& c) { return p3_objective(c, weight, q); });
    return d.candidate >= 0 ? d : infeasible_fallback(cands, min_rate_bps);
}

Decision baseline_delay_optimal(std::span<const CandidateEval> cands, double min_rate_bps) {
    auto d = argmin_feasible(cands, [](const CandidateEval& c) { return *c.delay; });
    return d.candidate >= 0 ? d : infeasible_fallback(cands, min_rate_bps);
}

Decision baseline_energy_optimal(std::span<const CandidateEval> cands, double min_rate_bps) {
    auto d = argmin_feasible(cands, [](const CandidateEval& c) { return -c.gain; });
    return d.candidate >= 0 ? d : infeasible_fallback(cands, min_rate_bps);
}

UcbState::UcbState(int arms, double explore_coeff)
    : z_bar_(arms, 0.0), theta_(arms, 0), explore_coeff_(explore_coeff) {}

double UcbState::index(int arm, int slot) const {
    return z_bar_[arm] - std::sqrt(explore_coeff_ * std::log(static_cast<double>(slot)) / theta_[arm]);
}

int UcbState::select(int slot) const {
    for (int n = 0; n < arms(); ++n)
        if (theta_[n] == 0) return n;
    int best = 0;
    double best_index = index(0, slot);
    for (int n = 1; n < arms(); ++n) {
        const double v = index(n, slot);
        if (v < best_index) {
            best_index = v;
            best = n;
        }
    }
    return best;
}

void UcbState::record(int arm, double objective) {
    z_bar_[arm] = (theta_[arm] * z_bar_[arm] + objective) / (theta_[arm] + 1);
    theta_[arm] += 1;
}

void UcbState::update(int arm, double observed_delay, double observed_energy, double weight, double q) {
    record(arm, weight * observed_delay + q * observed_energy);
}

std::vector<double> candidate_objectives(std::span<const CandidateEval> cands, double weight, double q,
                                         double overload_delay) {
    std::vector<double> z;
    z.reserve(cands.size());
    for (const auto& c : cands) z.push_back(weight * c.delay.value_or(overload_delay) + q * c.energy);
    return z;
}

PeriodOutcome psi_run_period(const PeriodState& period, const SystemConstants& consts, double q,
                             double weight, const PsiConfig& config, std::mt19937_64& rng) {
    const auto cands = evaluate_period(period, consts);
    const int arms = static_cast<int>(cands.size());
    const int slots = config.slots;
    if (slots < arms) throw ConfigError("PSI needs at least one slot per candidate BS");

    PeriodOutcome out;
    out.queue_before = q;
    out.feasible_set_size = static_cast<int>(std::count_if(cands.begin(), cands.end(),
                                                           [](const CandidateEval& c) { return c.feasible; }));
    out.candidate_objective = candidate_objectives(cands, weight, q, config.overload_delay);
    out.optimal_objective = *std::min_element(out.candidate_objective.begin(), out.candidate_objective.end());
    out.z_max = *std::max_element(out.candidate_objective.begin(), out.candidate_objective.end()) / slots;

    const double lambda = period.lambda;
    const double mean_slot_arrivals = lambda / slots;
    std::poisson_distribution<int> arrivals(mean_slot_arrivals > 0.0 ? mean_slot_arrivals : 1.0);
    std::normal_distribution<double> shadow(0.0, 1.0);

    UcbState ucb(arms, 0.0);
    switch (config.explore_mode) {
        case ExploreMode::Oracle: ucb.set_explore_coeff(2.0 * out.z_max * out.z_max); break;
        case ExploreMode::Fixed: ucb.set_explore_coeff(config.fixed_explore_coeff); break;
        case ExploreMode::RunningMax: break;
    }
    double observed_max = 0.0;

    out.slot_choices.reserve(slots);
    out.slot_objective.reserve(slots);
    out.slot_expected.reserve(slots);
    for (int k = 1; k <= slots; ++k) {
        const int arm = ucb.select(k);
        const auto& c = cands[arm];
        const auto& link = period.links[arm];

        double workloads = mean_slot_arrivals;
        if (config.noise.poisson_arrivals && mean_slot_arrivals > 0.0) workloads = arrivals(rng);
        double rate = c.rate;
        if (config.noise.shadowing_sigma_db > 0.0) {
            ChannelState ch = link.channel;
            ch.gain *= std::pow(10.0, config.noise.shadowing_sigma_db * shadow(rng) / 10.0);
            rate = uplink_rate(ch);
        }
        const double period_delay = c.delay.value_or(config.overload_delay);
        const double slot_delay = lambda > 0.0 ? workloads * period_delay / lambda : 0.0;
        const double slot_energy = link.channel.tx_power * workloads * consts.workload_size_bits / rate;

        ucb.update(arm, slot_delay, slot_energy, weight, q);
        const double z = weight * slot_delay + q * slot_energy;
        if (config.explore_mode == ExploreMode::RunningMax) {
            observed_max = std::max(observed_max, z);
            ucb.set_explore_coeff(2.0 * observed_max * observed_max);
        }

        if (!out.slot_choices.empty() && out.slot_choices.back() != c.bs) ++out.handovers_within_period;
        if (!c.feasible) ++out.infeasible_slots;
        out.slot_choices.push_back(c.bs);
        out.slot_objective.push_back(z);
        out.slot_expected.push_back(out.candidate_objective[arm] / slots);
        out.delay += slot_delay;
        out.energy += slot_energy;
    }
    out.chosen_bs = out.slot_choices.back();
    return out;
}

std::string policy_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::DelayOptimal: return "delay_optimal";
        case PolicyKind::EnergyOptimal: return "energy_optimal";
        case PolicyKind::Fsi: return "fsi";
        case PolicyKind::Psi: return "psi";
    }
    return "unknown";
}

PolicyKind policy_from_name(const std::string& name) {
    for (auto k : {PolicyKind::DelayOptimal, PolicyKind::EnergyOptimal, PolicyKind::Fsi, PolicyKind::Psi})
        if (policy_name(k) == name) return k;
    throw ConfigError("unknown policy '" + name + "'");
}

double RunSeries::mean_delay() const {
    double sum = 0.0;
    for (const auto& p : periods) sum += p.delay;
    return periods.empty() ? 0.0 : sum / periods.size();
}

double RunSeries::total_energy() const {
    double sum = 0.0;
    for (const auto& p : periods) sum += p.energy;
    return sum;
}

int RunSeries::fallback_count() const {
    return static_cast<int>(std::count_if(periods.begin(), periods.end(),
                                          [](const PeriodOutcome& p) { return p.infeasible_fallback; }));
}

int RunSeries::handovers_between_periods() const {
    int n = 0;
    for (std::size_t t = 1; t < periods.size(); ++t) {
        const BsId prev = periods[t - 1].chosen_bs;
        const BsId first = periods[t].slot_choices.empty() ? periods[t].chosen_bs : periods[t].slot_choices.front();
        if (prev != first) ++n;
    }
    return n;
}

double RunSeries::mean_handovers_within_period() const {
    double sum = 0.0;
    for (const auto& p : periods) sum += p.handovers_within_period;
    return periods.empty() ? 0.0 : sum / periods.size();
}

namespace {

void check_horizon(const ScenarioTrace& trace, const FrameSchedule& schedule) {
    schedule.validate();
    if (schedule.horizon() != trace.horizon()) {
        throw ConfigError("trace horizon " + std::to_string(trace.horizon()) + " != R*J = " +
                          std::to_string(schedule.horizon()));
    }
}

// Shared frame loop: reset q and V at frame starts, decide, then update the queue.
template <class Step>
RunSeries run_frames(const ScenarioTrace& trace, const FrameSchedule& schedule, std::string name, Step step) {
    check_horizon(trace, schedule);
    RunSeries series;
    series.policy = std::move(name);
    series.periods.reserve(trace.horizon());
    DeficitQueue queue{0.0, trace.consts.per_period_budget()};
    double weight = schedule.weight(0);
    for (int t = 0; t < trace.horizon(); ++t) {
        if (t % schedule.frame_length == 0) {
            queue.q = 0.0;
            weight = schedule.weight(t / schedule.frame_length);
        }
        PeriodOutcome out = step(trace.periods[t], queue.q, weight);
        out.queue_before = queue.q;
        queue = queue_update(queue, out.energy);
        out.queue_after = queue.q;
        series.periods.push_back(std::move(out));
    }
    return series;
}

PeriodOutcome outcome_of(const std::vector<CandidateEval>& cands, const Decision& d, double overload_delay) {
    PeriodOutcome out;
    const auto& c = cands[d.candidate];
    out.chosen_bs = d.bs;
    out.delay = c.delay.value_or(overload_delay);
    out.energy = c.energy;
    out.infeasible_fallback = d.fallback;
    out.feasible_set_size = static_cast<int>(
        std::count_if(cands.begin(), cands.end(), [](const CandidateEval& e) { return e.feasible; }));
    return out;
}

}  // namespace

RunSeries fsi_run(const ScenarioTrace& trace, const FrameSchedule& schedule) {
    const auto& consts = trace.consts;
    return run_frames(trace, schedule, "fsi", [&](const PeriodState& p, double q, double weight) {
        const auto cands = evaluate_period(p, consts);
        return outcome_of(cands, fsi_decide(q, weight, cands, consts.min_rate_bps), PsiConfig{}.overload_delay);
    });
}

RunSeries psi_run(const ScenarioTrace& trace, const FrameSchedule& schedule, const PsiConfig& config,
                  std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x70736975u};
    std::mt19937_64 rng(seq);
    return run_frames(trace, schedule, "psi", [&](const PeriodState& p, double q, double weight) {
        return psi_run_period(p, trace.consts, q, weight, config, rng);
    });
}

RunSeries baseline_run(const ScenarioTrace& trace, const FrameSchedule& schedule, PolicyKind kind) {
    if (kind != PolicyKind::DelayOptimal && kind != PolicyKind::EnergyOptimal)
        throw ConfigError("baseline_run expects a baseline policy");
    const auto& consts = trace.consts;
    return run_frames(trace, schedule, policy_name(kind), [&](const PeriodState& p, double, double) {
        const auto cands = evaluate_period(p, consts);
        const auto d = kind == PolicyKind::DelayOptimal ? baseline_delay_optimal(cands, consts.min_rate_bps)
                                                        : baseline_energy_optimal(cands, consts.min_rate_bps);
        return outcome_of(cands, d, PsiConfig{}.overload_delay);
    });
}

RunSeries run_policy(PolicyKind kind, const ScenarioTrace& trace, const FrameSchedule& schedule,
                     const PsiConfig& psi, std::uint64_t seed) {
    switch (kind) {
        case PolicyKind::Fsi: return fsi_run(trace, schedule);
        case PolicyKind::Psi: return psi_run(trace, schedule, psi, seed);
        default: return baseline_run(trace, schedule, kind);
    }
}

}  // namespace mecmob
