#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace mecmob {

/// Index of a base station in the topology.
using BsId = int;

struct EdgeServerState {
    double service_rate = 0.0;     // s, workloads per period
    double background_load = 0.0;  // mu, workloads per period
    bool operator==(const EdgeServerState&) const = default;
};

struct ChannelState {
    double gain = 0.0;          // linear power gain H
    double interference = 0.0;  // W
    double noise_power = 0.0;   // W
    double bandwidth = 0.0;     // Hz
    double tx_power = 0.0;      // W
    bool operator==(const ChannelState&) const = default;
};

struct SystemConstants {
    double workload_size_bits = 0.0;  // gamma
    double budget_j = 0.0;            // alpha * B over the whole horizon
    int horizon = 0;                  // T periods
    double min_rate_bps = 0.0;        // r_min
    double max_delay = 0.0;           // d_max, same units as delay_cost

    double per_period_budget() const { return budget_j / horizon; }
    bool operator==(const SystemConstants&) const = default;
};

/// Raised when the edge server cannot absorb the offered load (s <= mu + lambda).
class UnstableServer : public std::domain_error {
public:
    explicit UnstableServer(const std::string& what) : std::domain_error(what) {}
};

/// Rate-weighted mean response time of an M/G/1/PS server:
/// lambda / (s - (mu + lambda)). Throws UnstableServer when s <= mu + lambda.
double delay_cost(double lambda, const EdgeServerState& server);

/// Same as delay_cost but returns nullopt for an overloaded server.
std::optional<double> try_delay_cost(double lambda, const EdgeServerState& server) noexcept;

/// Shannon uplink rate W * log2(1 + P_tx * H / (sigma^2 + I)) in bits/s.
double uplink_rate(const ChannelState& ch);

/// Energy to upload lambda * gamma bits at the channel's uplink rate, in joules.
double tx_energy(double lambda, const ChannelState& ch, double workload_size_bits);

/// Per-period constraints: minimum uplink rate, stable server and bounded delay.
/// Both bounds are inclusive.
bool is_feasible(double lambda, const EdgeServerState& server, const ChannelState& ch,
                 const SystemConstants& consts);

/// Pluggable per-period delay model. Returning nullopt marks the server as overloaded.
using DelayFunction = std::function<std::optional<double>(double, const EdgeServerState&)>;

/// Default delay model (M/G/1/PS).
DelayFunction processor_sharing_delay();

}  // namespace mecmob
