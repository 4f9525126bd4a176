#include "mecmob/model.hpp"

#include <cmath>
#include <sstream>

namespace mecmob {

double delay_cost(double lambda, const EdgeServerState& server) {
    const double headroom = server.service_rate - (server.background_load + lambda);
    if (!(headroom > 0.0)) {
        std::ostringstream msg;
        msg << "server overloaded: s=" << server.service_rate << " mu=" << server.background_load
            << " lambda=" << lambda;
        throw UnstableServer(msg.str());
    }
    return lambda / headroom;
}

std::optional<double> try_delay_cost(double lambda, const EdgeServerState& server) noexcept {
    const double headroom = server.service_rate - (server.background_load + lambda);
    if (!(headroom > 0.0)) return std::nullopt;
    return lambda / headroom;
}

double uplink_rate(const ChannelState& ch) {
    const double sinr = ch.tx_power * ch.gain / (ch.noise_power + ch.interference);
    return ch.bandwidth * std::log2(1.0 + sinr);
}

double tx_energy(double lambda, const ChannelState& ch, double workload_size_bits) {
    return ch.tx_power * lambda * workload_size_bits / uplink_rate(ch);
}

bool is_feasible(double lambda, const EdgeServerState& server, const ChannelState& ch,
                 const SystemConstants& consts) {
    if (uplink_rate(ch) < consts.min_rate_bps) return false;
    const auto d = try_delay_cost(lambda, server);
    return d && *d <= consts.max_delay;
}

DelayFunction processor_sharing_delay() {
    return [](double lambda, const EdgeServerState& server) { return try_delay_cost(lambda, server); };
}

}  // namespace mecmob
