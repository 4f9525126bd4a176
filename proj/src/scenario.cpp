#include "mecmob/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>

#include "mecmob/errors.hpp"

namespace mecmob {

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::vector<BsId> Topology::candidates(Point p) const {
    std::vector<BsId> out;
    for (BsId n = 0; n < size(); ++n) {
        if (distance(p, bs_positions[n]) <= association_radius) out.push_back(n);
    }
    return out;
}

Topology build_grid_topology(int side_count, double spacing_m, Area area, double radius_m) {
    if (side_count < 1) throw ConfigError("grid side_count must be >= 1");
    if (!(spacing_m > 0.0)) throw ConfigError("grid spacing must be > 0");
    if (!(radius_m > 0.0)) throw ConfigError("association radius must be > 0");
    const double extent = spacing_m * (side_count - 1);
    if (extent > area.width || extent > area.height) {
        std::ostringstream msg;
        msg << side_count << "x" << side_count << " grid with spacing " << spacing_m
            << " m does not fit in " << area.width << "x" << area.height << " m";
        throw ConfigError(msg.str());
    }
    Topology topo;
    topo.area = area;
    topo.association_radius = radius_m;
    const double x0 = (area.width - extent) / 2.0;
    const double y0 = (area.height - extent) / 2.0;
    topo.bs_positions.reserve(static_cast<std::size_t>(side_count) * side_count);
    for (int row = 0; row < side_count; ++row) {
        for (int col = 0; col < side_count; ++col) {
            topo.bs_positions.push_back({x0 + spacing_m * col, y0 + spacing_m * row});
        }
    }
    return topo;
}

namespace {

// Walk lattice: points reachable in unit steps along the axes.
class Lattice {
public:
    Lattice(const Topology& topo, const MobilityParams& params) : step_(params.step_m) {
        if (!(step_ > 0.0)) throw ConfigError("mobility step must be > 0");
        double min_x = topo.area.width, min_y = topo.area.height, max_x = 0.0, max_y = 0.0;
        for (const auto& p : topo.bs_positions) {
            min_x = std::min(min_x, p.x);
            min_y = std::min(min_y, p.y);
            max_x = std::max(max_x, p.x);
            max_y = std::max(max_y, p.y);
        }
        x0_ = std::max(0.0, min_x - params.margin_m);
        y0_ = std::max(0.0, min_y - params.margin_m);
        const double x1 = std::min(topo.area.width, max_x + params.margin_m);
        const double y1 = std::min(topo.area.height, max_y + params.margin_m);
        nx_ = static_cast<int>(std::floor((x1 - x0_) / step_ + 1e-9)) + 1;
        ny_ = static_cast<int>(std::floor((y1 - y0_) / step_ + 1e-9)) + 1;
        valid_.resize(static_cast<std::size_t>(nx_) * ny_);
        for (int j = 0; j < ny_; ++j) {
            for (int i = 0; i < nx_; ++i) {
                valid_[index(i, j)] = !topo.candidates(at(i, j)).empty();
            }
        }
    }

    Point at(int i, int j) const { return {x0_ + step_ * i, y0_ + step_ * j}; }
    bool valid(int i, int j) const {
        return i >= 0 && j >= 0 && i < nx_ && j < ny_ && valid_[index(i, j)];
    }
    std::vector<std::pair<int, int>> valid_cells() const {
        std::vector<std::pair<int, int>> out;
        for (int j = 0; j < ny_; ++j)
            for (int i = 0; i < nx_; ++i)
                if (valid_[index(i, j)]) out.emplace_back(i, j);
        return out;
    }

private:
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }

    double step_;
    double x0_ = 0.0, y0_ = 0.0;
    int nx_ = 0, ny_ = 0;
    std::vector<bool> valid_;
};

// East, north, west, south; the reverse of direction d is (d + 2) % 4.
constexpr std::array<std::pair<int, int>, 4> kMoves{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace

Trajectory generate_trajectory(const Topology& topology, int periods, std::uint64_t seed,
                               const MobilityParams& params) {
    if (periods < 1) throw ConfigError("trajectory length must be >= 1");
    if (params.reversal_suppression < 0.0 || params.reversal_suppression > 1.0)
        throw ConfigError("reversal_suppression must lie in [0, 1]");
    const Lattice lattice(topology, params);
    const auto cells = lattice.valid_cells();
    if (cells.empty()) throw ConfigError("no walkable lattice point is covered by a BS");

    auto rng = make_engine(seed, 0x7472616aULL);
    std::uniform_int_distribution<std::size_t> pick_start(0, cells.size() - 1);
    auto [i, j] = cells[pick_start(rng)];
    std::bernoulli_distribution suppress(params.reversal_suppression);

    Trajectory traj;
    traj.locations.reserve(periods);
    traj.locations.push_back(lattice.at(i, j));
    int last_dir = -1;
    for (int t = 1; t < periods; ++t) {
        std::vector<int> options;
        for (int d = 0; d < 4; ++d) {
            if (lattice.valid(i + kMoves[d].first, j + kMoves[d].second)) options.push_back(d);
        }
        // Always draw, so the stream position does not depend on the lattice shape.
        const bool drop_reverse = suppress(rng);
        if (last_dir >= 0 && drop_reverse && options.size() > 1) {
            std::erase(options, (last_dir + 2) % 4);
        }
        if (options.empty()) {
            traj.locations.push_back(lattice.at(i, j));
            continue;
        }
        std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
        last_dir = options[pick(rng)];
        i += kMoves[last_dir].first;
        j += kMoves[last_dir].second;
        traj.locations.push_back(lattice.at(i, j));
    }
    return traj;
}

double pathloss_db(double distance_m, double intercept_db, double slope_db) {
    return intercept_db + slope_db * std::log10(distance_m);
}

double channel_gain(double distance_m, const ProcessParams& params) {
    const double d = std::max(distance_m, params.min_distance_m);
    return std::pow(10.0, -pathloss_db(d, params.pathloss_intercept_db, params.pathloss_slope_db) / 10.0);
}

bool has_feasible_candidate(const PeriodState& period, const SystemConstants& consts) {
    return std::any_of(period.links.begin(), period.links.end(), [&](const CandidateLink& link) {
        return is_feasible(period.lambda, period.servers[link.bs], link.channel, consts);
    });
}

ScenarioTrace generate_processes(const Topology& topology, const Trajectory& trajectory,
                                 const SystemConstants& consts, const RadioParams& radio,
                                 std::uint64_t seed, const ProcessParams& params) {
    const int horizon = static_cast<int>(trajectory.locations.size());
    if (horizon < 1) throw ConfigError("empty trajectory");
    if (consts.horizon != horizon) {
        std::ostringstream msg;
        msg << "trajectory length " << horizon << " != horizon " << consts.horizon;
        throw ConfigError(msg.str());
    }
    if (!params.interference_per_period.empty() &&
        static_cast<int>(params.interference_per_period.size()) != horizon)
        throw ConfigError("interference_per_period must have one entry per period");
    if (!(params.service_rate > 0.0)) throw ConfigError("service_rate must be > 0");
    if (params.lambda_max < 0.0 || params.mu_max < 0.0)
        throw ConfigError("lambda_max and mu_max must be >= 0");

    auto rng = make_engine(seed, 0x70726f63ULL);
    std::uniform_real_distribution<double> draw_lambda(0.0, params.lambda_max);
    std::uniform_real_distribution<double> draw_mu(0.0, params.mu_max);
    std::normal_distribution<double> draw_shadow(0.0, 1.0);

    ScenarioTrace trace;
    trace.topology = topology;
    trace.radio = radio;
    trace.consts = consts;
    trace.seed = seed;
    trace.periods.reserve(horizon);

    const int n_bs = topology.size();
    for (int t = 0; t < horizon; ++t) {
        PeriodState period;
        period.location = trajectory.locations[t];
        period.lambda = draw_lambda(rng);
        const double interference = params.interference_per_period.empty()
                                        ? params.interference_w
                                        : params.interference_per_period[t];
        const auto cands = topology.candidates(period.location);
        if (cands.empty()) throw InfeasibleScenario(t, "trajectory point has no candidate BS");

        bool ok = false;
        for (int attempt = 0; attempt <= params.max_resample && !ok; ++attempt) {
            period.servers.assign(n_bs, {});
            for (auto& server : period.servers) {
                server.service_rate = params.service_rate;
                server.background_load = draw_mu(rng);
            }
            period.links.clear();
            for (BsId n : cands) {
                double gain = channel_gain(distance(period.location, topology.bs_positions[n]), params);
                if (params.shadowing_sigma_db > 0.0) {
                    gain *= std::pow(10.0, params.shadowing_sigma_db * draw_shadow(rng) / 10.0);
                }
                period.links.push_back({n, ChannelState{gain, interference, radio.noise_power_w,
                                                        radio.bandwidth_hz, radio.tx_power_w}});
            }
            ok = has_feasible_candidate(period, consts);
        }
        if (!ok) {
            std::ostringstream msg;
            msg << "period " << t << " has no feasible BS after " << params.max_resample
                << " redraws";
            throw InfeasibleScenario(t, msg.str());
        }
        trace.periods.push_back(std::move(period));
    }
    return trace;
}

}  // namespace mecmob
