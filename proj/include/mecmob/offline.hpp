#pragma once

#include <span>
#include <vector>

#include "mecmob/policies.hpp"
#include "mecmob/scenario.hpp"

namespace mecmob {

struct FrameSolution {
    std::vector<BsId> decisions;  // one per period of the frame
    double avg_delay = 0.0;       // D*_r
    double frame_energy = 0.0;
    /// Set when no sequence met the frame budget and the minimum-energy sequence was used.
    bool budget_violated = false;
};

struct LookaheadOptions {
    /// Abort when the product of per-period feasible set sizes exceeds this.
    double max_sequences = 1e6;
    /// Replace infeasible frames by their minimum-energy sequence instead of throwing.
    bool fallback_on_infeasible = false;
};

/// Exact minimizer of the frame's mean delay subject to the frame energy budget and the
/// per-period constraints. Depth-first over feasible candidates (ascending BS index) with
/// energy and delay bounds; the first sequence reaching the optimum is returned.
/// Throws FrameInfeasible (frame index -1) if no sequence meets every constraint.
FrameSolution solve_frame(std::span<const PeriodState> frame, double frame_budget, const SystemConstants& consts,
                          const LookaheadOptions& options = {});

/// Plain enumeration without pruning; test oracle for solve_frame.
FrameSolution solve_frame_exhaustive(std::span<const PeriodState> frame, double frame_budget,
                                     const SystemConstants& consts);

struct LookaheadResult {
    std::vector<FrameSolution> frames;
    double d_star = 0.0;  // mean of the per-frame optima
    RunSeries series;
    int infeasible_frames = 0;

    std::vector<double> per_frame_delay() const;
};

/// Concatenated per-frame optima with budget alpha*B / R per frame.
LookaheadResult solve_lookahead(const ScenarioTrace& trace, int frame_count, int frame_length,
                                const LookaheadOptions& options = {});

}  // namespace mecmob
