#pragma once

#include <span>
#include <vector>

#include "mecmob/policies.hpp"
#include "mecmob/scenario.hpp"

namespace mecmob {

/// max over periods and feasible candidates of (e - alpha*B/T)^2 / 2.
double compute_U(const ScenarioTrace& trace);

/// Per-slot gaps (Z(n) - Z*) / K of the strictly suboptimal arms. Arms tied with the
/// optimum are left out.
std::vector<double> regret_gaps(std::span<const double> objectives, int slots);

/// z_max * [8 * sum(ln K / delta) + (1 + pi^2 / 3) * sum(delta)] over the given gaps.
/// Throws DegenerateGap if a gap is not strictly positive.
double ucb_regret_bound(double z_max, std::span<const double> gaps, double slots);

/// mean(D*_r) + (U (J + 1) + C) / R * sum(1 / V_r)
double theorem1_delay_bound(std::span<const double> d_star, double U, double C, int frame_length,
                            std::span<const double> weights);

/// alpha*B + sum_r sqrt(2 U J (J + 1) + C J + V_r J D*_r)
double theorem1_energy_bound(std::span<const double> d_star, double U, double C, int frame_length,
                             std::span<const double> weights, double budget);

struct RegretEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    int runs = 0;

    /// One-sided upper confidence limit at the given normal quantile (1.645 for 95%).
    double upper(double z = 1.645) const { return mean + z * std_error; }
};

/// Monte-Carlo estimate of E[Z~] - Z* from independent realized period objectives.
RegretEstimate measure_regret(std::span<const double> realized_objectives, double optimum);

/// Z~^t - Z^{t,*} for every period of a PSI run.
std::vector<double> period_regret(const RunSeries& psi);

/// Largest UCB regret bound over the periods of a PSI run.
double regret_bound_constant(const RunSeries& psi, int slots);

/// Largest measured period regret of a PSI run, floored at zero.
double empirical_regret_constant(const RunSeries& psi);

}  // namespace mecmob
