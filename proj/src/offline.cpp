#include "mecmob/offline.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "mecmob/errors.hpp"

namespace mecmob {

namespace {

struct Option {
    BsId bs;
    double delay;
    double energy;
};

// Feasible options per period, ascending BS index.
std::vector<std::vector<Option>> feasible_options(std::span<const PeriodState> frame, const SystemConstants& consts) {
    std::vector<std::vector<Option>> out;
    out.reserve(frame.size());
    for (std::size_t t = 0; t < frame.size(); ++t) {
        std::vector<Option> opts;
        for (const auto& c : evaluate_period(frame[t], consts)) {
            if (c.feasible) opts.push_back({c.bs, *c.delay, c.energy});
        }
        if (opts.empty()) {
            throw FrameInfeasible(-1, "period " + std::to_string(t) + " of the frame has no feasible BS");
        }
        out.push_back(std::move(opts));
    }
    return out;
}

FrameSolution min_energy_sequence(const std::vector<std::vector<Option>>& options) {
    FrameSolution sol;
    double delay_sum = 0.0;
    for (const auto& opts : options) {
        const auto it = std::min_element(opts.begin(), opts.end(),
                                         [](const Option& a, const Option& b) { return a.energy < b.energy; });
        sol.decisions.push_back(it->bs);
        delay_sum += it->delay;
        sol.frame_energy += it->energy;
    }
    sol.avg_delay = delay_sum / static_cast<double>(options.size());
    return sol;
}

// Slack so that floating-point reassociation in the bounds never cuts an admissible branch.
constexpr double kBoundSlack = 1e-9;

class BranchAndBound {
public:
    BranchAndBound(const std::vector<std::vector<Option>>& options, double budget)
        : options_(options), budget_(budget), depth_(options.size()) {
        min_energy_suffix_.assign(depth_ + 1, 0.0);
        min_delay_suffix_.assign(depth_ + 1, 0.0);
        for (std::size_t i = depth_; i-- > 0;) {
            double me = std::numeric_limits<double>::infinity(), md = me;
            for (const auto& o : options_[i]) {
                me = std::min(me, o.energy);
                md = std::min(md, o.delay);
            }
            min_energy_suffix_[i] = min_energy_suffix_[i + 1] + me;
            min_delay_suffix_[i] = min_delay_suffix_[i + 1] + md;
        }
        current_.resize(depth_);
    }

    bool run() {
        descend(0, 0.0, 0.0);
        return found_;
    }

    FrameSolution solution() const {
        FrameSolution sol;
        for (std::size_t i = 0; i < depth_; ++i) sol.decisions.push_back(options_[i][best_[i]].bs);
        sol.avg_delay = best_delay_ / static_cast<double>(depth_);
        sol.frame_energy = best_energy_;
        return sol;
    }

private:
    void descend(std::size_t i, double energy, double delay) {
        if (i == depth_) {
            if (energy <= budget_ && (!found_ || delay < best_delay_)) {
                found_ = true;
                best_delay_ = delay;
                best_energy_ = energy;
                best_ = current_;
            }
            return;
        }
        for (std::size_t k = 0; k < options_[i].size(); ++k) {
            const auto& o = options_[i][k];
            const double e = energy + o.energy;
            const double d = delay + o.delay;
            if (e + min_energy_suffix_[i + 1] > budget_ * (1.0 + kBoundSlack)) continue;
            if (found_ && d + min_delay_suffix_[i + 1] > best_delay_ * (1.0 + kBoundSlack)) continue;
            current_[i] = k;
            descend(i + 1, e, d);
        }
    }

    const std::vector<std::vector<Option>>& options_;
    double budget_;
    std::size_t depth_;
    std::vector<double> min_energy_suffix_, min_delay_suffix_;
    std::vector<std::size_t> current_, best_;
    bool found_ = false;
    double best_delay_ = 0.0, best_energy_ = 0.0;
};

}  // namespace

FrameSolution solve_frame(std::span<const PeriodState> frame, double frame_budget, const SystemConstants& consts,
                          const LookaheadOptions& options) {
    if (frame.empty()) throw ConfigError("empty frame");
    const auto opts = feasible_options(frame, consts);
    double sequences = 1.0;
    for (const auto& o : opts) sequences *= static_cast<double>(o.size());
    if (sequences > options.max_sequences) {
        std::ostringstream msg;
        msg << "lookahead search space " << sequences << " exceeds the cap " << options.max_sequences;
        throw ConfigError(msg.str());
    }
    BranchAndBound search(opts, frame_budget);
    if (search.run()) return search.solution();
    if (options.fallback_on_infeasible) {
        auto sol = min_energy_sequence(opts);
        sol.budget_violated = true;
        return sol;
    }
    throw FrameInfeasible(-1, "no decision sequence meets the frame energy budget");
}

FrameSolution solve_frame_exhaustive(std::span<const PeriodState> frame, double frame_budget,
                                     const SystemConstants& consts) {
    std::vector<std::vector<CandidateEval>> cands;
    for (const auto& p : frame) cands.push_back(evaluate_period(p, consts));
    const std::size_t depth = cands.size();
    std::vector<std::size_t> pick(depth, 0);
    bool found = false;
    double best_sum = 0.0, best_energy = 0.0;
    std::vector<std::size_t> best;
    while (true) {
        bool ok = true;
        double delay_sum = 0.0, energy = 0.0;
        for (std::size_t i = 0; i < depth && ok; ++i) {
            const auto& c = cands[i][pick[i]];
            ok = c.feasible;
            if (ok) {
                delay_sum += *c.delay;
                energy += c.energy;
            }
        }
        if (ok && energy <= frame_budget && (!found || delay_sum < best_sum)) {
            found = true;
            best_sum = delay_sum;
            best_energy = energy;
            best = pick;
        }
        // odometer, last period fastest
        bool done = true;
        for (std::size_t i = depth; i-- > 0;) {
            if (++pick[i] < cands[i].size()) {
                done = false;
                break;
            }
            pick[i] = 0;
        }
        if (done) break;
    }
    if (!found) throw FrameInfeasible(-1, "no decision sequence meets the frame constraints");
    FrameSolution sol;
    for (std::size_t i = 0; i < depth; ++i) sol.decisions.push_back(cands[i][best[i]].bs);
    sol.avg_delay = best_sum / static_cast<double>(depth);
    sol.frame_energy = best_energy;
    return sol;
}

std::vector<double> LookaheadResult::per_frame_delay() const {
    std::vector<double> out;
    for (const auto& f : frames) out.push_back(f.avg_delay);
    return out;
}

LookaheadResult solve_lookahead(const ScenarioTrace& trace, int frame_count, int frame_length,
                                const LookaheadOptions& options) {
    if (frame_count < 1 || frame_length < 1) throw ConfigError("R and J must be >= 1");
    if (frame_count * frame_length != trace.horizon()) {
        throw ConfigError("trace horizon " + std::to_string(trace.horizon()) + " != R*J");
    }
    const double frame_budget = trace.consts.budget_j / frame_count;
    LookaheadResult result;
    result.series.policy = "lookahead";
    std::span<const PeriodState> periods(trace.periods);
    for (int r = 0; r < frame_count; ++r) {
        const auto slice = periods.subspan(static_cast<std::size_t>(r) * frame_length, frame_length);
        FrameSolution sol;
        try {
            sol = solve_frame(slice, frame_budget, trace.consts, options);
        } catch (const FrameInfeasible& e) {
            throw FrameInfeasible(r, "frame " + std::to_string(r) + ": " + e.what());
        }
        if (sol.budget_violated) ++result.infeasible_frames;
        for (int j = 0; j < frame_length; ++j) {
            const auto cands = evaluate_period(slice[j], trace.consts);
            PeriodOutcome out;
            out.chosen_bs = sol.decisions[j];
            for (const auto& c : cands) {
                if (c.feasible) ++out.feasible_set_size;
                if (c.bs == out.chosen_bs) {
                    out.delay = *c.delay;
                    out.energy = c.energy;
                }
            }
            out.infeasible_fallback = sol.budget_violated;
            result.series.periods.push_back(std::move(out));
        }
        result.frames.push_back(std::move(sol));
    }
    double sum = 0.0;
    for (const auto& f : result.frames) sum += f.avg_delay;
    result.d_star = sum / frame_count;
    return result;
}

}  // namespace mecmob
