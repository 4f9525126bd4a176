#include "mecmob/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "mecmob/errors.hpp"

namespace mecmob {

double compute_U(const ScenarioTrace& trace) {
    const double b = trace.consts.per_period_budget();
    double u = 0.0;
    for (const auto& period : trace.periods) {
        for (const auto& c : evaluate_period(period, trace.consts)) {
            if (!c.feasible) continue;
            const double y = c.energy - b;
            u = std::max(u, 0.5 * y * y);
        }
    }
    return u;
}

std::vector<double> regret_gaps(std::span<const double> objectives, int slots) {
    std::vector<double> gaps;
    if (objectives.empty()) return gaps;
    const double best = *std::min_element(objectives.begin(), objectives.end());
    for (double z : objectives) {
        const double gap = (z - best) / slots;
        if (gap > 0.0) gaps.push_back(gap);
    }
    return gaps;
}

double ucb_regret_bound(double z_max, std::span<const double> gaps, double slots) {
    const double log_k = std::log(slots);
    double inverse_sum = 0.0, gap_sum = 0.0;
    for (double g : gaps) {
        if (!(g > 0.0)) throw DegenerateGap("regret bound needs strictly positive gaps");
        inverse_sum += log_k / g;
        gap_sum += g;
    }
    return z_max * (8.0 * inverse_sum + (1.0 + std::numbers::pi * std::numbers::pi / 3.0) * gap_sum);
}

double theorem1_delay_bound(std::span<const double> d_star, double U, double C, int frame_length,
                            std::span<const double> weights) {
    const double frames = static_cast<double>(d_star.size());
    const double mean_d = std::accumulate(d_star.begin(), d_star.end(), 0.0) / frames;
    double inverse_v = 0.0;
    for (double v : weights) inverse_v += 1.0 / v;
    return mean_d + (U * (frame_length + 1) + C) / frames * inverse_v;
}

double theorem1_energy_bound(std::span<const double> d_star, double U, double C, int frame_length,
                             std::span<const double> weights, double budget) {
    const double J = frame_length;
    double slack = 0.0;
    for (std::size_t r = 0; r < d_star.size(); ++r) {
        slack += std::sqrt(2.0 * U * J * (J + 1.0) + C * J + weights[r] * J * d_star[r]);
    }
    return budget + slack;
}

RegretEstimate measure_regret(std::span<const double> realized_objectives, double optimum) {
    RegretEstimate est;
    est.runs = static_cast<int>(realized_objectives.size());
    if (est.runs == 0) return est;
    double sum = 0.0;
    for (double z : realized_objectives) sum += z - optimum;
    est.mean = sum / est.runs;
    if (est.runs > 1) {
        double ss = 0.0;
        for (double z : realized_objectives) ss += (z - optimum - est.mean) * (z - optimum - est.mean);
        est.std_error = std::sqrt(ss / (est.runs - 1) / est.runs);
    }
    return est;
}

std::vector<double> period_regret(const RunSeries& psi) {
    std::vector<double> out;
    out.reserve(psi.periods.size());
    for (const auto& p : psi.periods) {
        const double realized = std::accumulate(p.slot_objective.begin(), p.slot_objective.end(), 0.0);
        out.push_back(realized - p.optimal_objective);
    }
    return out;
}

double regret_bound_constant(const RunSeries& psi, int slots) {
    double c = 0.0;
    for (const auto& p : psi.periods) {
        const auto gaps = regret_gaps(p.candidate_objective, slots);
        c = std::max(c, ucb_regret_bound(p.z_max, gaps, slots));
    }
    return c;
}

double empirical_regret_constant(const RunSeries& psi) {
    double c = 0.0;
    for (double r : period_regret(psi)) c = std::max(c, r);
    return c;
}

}  // namespace mecmob
