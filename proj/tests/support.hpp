#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "mecmob/model.hpp"
#include "mecmob/policies.hpp"
#include "mecmob/scenario.hpp"

namespace testing {

inline bool rel_close(double a, double b, double tol = 1e-12) {
    if (a == b) return true;
    return std::fabs(a - b) <= tol * std::max(std::fabs(a), std::fabs(b));
}

// Channel whose SNR P*H/(sigma^2 + I) is exactly snr with unit noise.
inline mecmob::ChannelState unit_noise_channel(double snr, double bandwidth = 20e6) {
    return {snr, 0.0, 1.0, bandwidth, 1.0};
}

inline mecmob::SystemConstants small_consts(double min_rate = 1e8, double max_delay = 5.0) {
    return {8e6, 10.0, 4, min_rate, max_delay};
}

// Period with one link per (background load, snr) pair. BS ids follow the pair order.
struct LinkSpec {
    double background_load;
    double snr;
};

inline mecmob::PeriodState make_period(double lambda, const std::vector<LinkSpec>& links, double service_rate = 50.0) {
    mecmob::PeriodState p;
    p.lambda = lambda;
    for (int i = 0; i < static_cast<int>(links.size()); ++i) {
        p.servers.push_back({service_rate, links[i].background_load});
        p.links.push_back({i, unit_noise_channel(links[i].snr)});
    }
    return p;
}

// Random period with n candidates; mostly feasible under small_consts().
inline mecmob::PeriodState random_period(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> lam(0.5, 12.0), mu(0.0, 40.0), snr_db(10.0, 40.0);
    std::vector<LinkSpec> links;
    for (int i = 0; i < n; ++i) links.push_back({mu(rng), std::pow(10.0, snr_db(rng) / 10.0)});
    return make_period(lam(rng), links);
}

}  // namespace testing
