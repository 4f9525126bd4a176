#include <doctest.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "mecmob/config.hpp"
#include "mecmob/errors.hpp"
#include "mecmob/policies.hpp"
#include "support.hpp"

using namespace mecmob;
using testing::LinkSpec;
using testing::make_period;
using testing::rel_close;
using testing::small_consts;

namespace {

int brute_force_p3(const std::vector<CandidateEval>& cands, double q, double V) {
    int best = -1;
    double best_z = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(cands.size()); ++i) {
        if (!cands[i].feasible) continue;
        const double z = V * *cands[i].delay + q * cands[i].energy;
        if (z < best_z) {
            best_z = z;
            best = i;
        }
    }
    return best;
}

PsiConfig noiseless(int slots) {
    PsiConfig c;
    c.slots = slots;
    c.noise = {false, 0.0};
    c.explore_mode = ExploreMode::Oracle;
    return c;
}

}  // namespace

TEST_SUITE("policies") {

TEST_CASE("queue update") {
    CHECK(queue_update({0.0, 0.12}, 0.05).q == 0.0);
    CHECK(queue_update({5.0, 0.12}, 0.12).q == 5.0);
    CHECK(queue_update({0.0, 0.12}, 0.3).q == doctest::Approx(0.18).epsilon(1e-14));
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    DeficitQueue q{0.0, 0.12};
    for (int i = 0; i < 1000; ++i) {
        q = queue_update(q, 0.25 * u(rng));
        CHECK(q.q >= 0.0);
    }
}

TEST_CASE("fsi decision special cases") {
    const auto consts = small_consts(1e8);
    // BS 0: low delay, weak channel. BS 1: higher delay, strong channel.
    const auto period = make_period(6.0, {{10.0, 40.0}, {30.0, 2000.0}, {20.0, 200.0}});
    const auto cands = evaluate_period(period, consts);
    REQUIRE(std::all_of(cands.begin(), cands.end(), [](const CandidateEval& c) { return c.feasible; }));

    const auto min_delay = baseline_delay_optimal(cands, consts.min_rate_bps);
    CHECK(min_delay.bs == 0);
    CHECK(fsi_decide(0.0, 0.01, cands, consts.min_rate_bps).bs == min_delay.bs);
    CHECK(fsi_decide(0.0, 123.0, cands, consts.min_rate_bps).bs == min_delay.bs);

    const auto min_energy = baseline_energy_optimal(cands, consts.min_rate_bps);
    CHECK(min_energy.bs == 1);
    CHECK(fsi_decide(1.0, 1e-12, cands, consts.min_rate_bps).bs == min_energy.bs);
}

TEST_CASE("fsi decision on a hand instance") {
    // d = (0.25, 0.5, 1.0), e from SNR 15, 63, 255 with 20 MHz: rates 80, 120, 160 Mbit/s
    const auto consts = small_consts(5e7);
    const auto period = make_period(5.0, {{25.0, 15.0}, {35.0, 63.0}, {40.0, 255.0}});
    const auto cands = evaluate_period(period, consts);
    CHECK(*cands[0].delay == doctest::Approx(0.25));
    CHECK(*cands[1].delay == doctest::Approx(0.5));
    CHECK(*cands[2].delay == doctest::Approx(1.0));
    CHECK(cands[0].rate == doctest::Approx(8e7));
    // e = 5 * 8e6 / rate (P = 1): 0.5, 1/3, 0.25
    CHECK(cands[0].energy == doctest::Approx(0.5));
    CHECK(cands[2].energy == doctest::Approx(0.25));
    // V=1, q=1: 0.75, 0.8333, 1.25 -> BS 0; V=1, q=4: 2.25, 1.8333, 2.0 -> BS 1; q=20: 10.25, 7.17, 6.0 -> BS 2
    CHECK(fsi_decide(1.0, 1.0, cands, consts.min_rate_bps).bs == 0);
    CHECK(fsi_decide(4.0, 1.0, cands, consts.min_rate_bps).bs == 1);
    CHECK(fsi_decide(20.0, 1.0, cands, consts.min_rate_bps).bs == 2);
    for (double q : {0.0, 1.0, 4.0, 20.0}) CHECK(fsi_decide(q, 1.0, cands, 5e7).candidate == brute_force_p3(cands, q, 1.0));
}

TEST_CASE("fsi decision is invariant to scaling V and q together") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto consts = small_consts();
    for (int i = 0; i < 500; ++i) {
        const auto period = testing::random_period(rng, 1 + static_cast<int>(8 * u(rng)));
        const auto cands = evaluate_period(period, consts);
        const double q = 2.0 * u(rng), V = 0.1 * u(rng) + 1e-6, c = std::pow(2.0, static_cast<int>(20 * u(rng)) - 10);
        CHECK(fsi_decide(q, V, cands, consts.min_rate_bps).bs == fsi_decide(c * q, c * V, cands, consts.min_rate_bps).bs);
    }
}

TEST_CASE("ties go to the lowest index") {
    const auto consts = small_consts();
    const auto period = make_period(4.0, {{10.0, 1000.0}, {10.0, 1000.0}, {10.0, 1000.0}});
    const auto cands = evaluate_period(period, consts);
    CHECK(fsi_decide(1.0, 1.0, cands, consts.min_rate_bps).candidate == 0);
    CHECK(baseline_delay_optimal(cands, consts.min_rate_bps).candidate == 0);
    CHECK(baseline_energy_optimal(cands, consts.min_rate_bps).candidate == 0);
}

TEST_CASE("energy optimal follows the channel") {
    const auto consts = small_consts();
    auto period = make_period(4.0, {{10.0, 1000.0}, {5.0, 1500.0}, {0.0, 1200.0}});
    CHECK(baseline_energy_optimal(evaluate_period(period, consts), consts.min_rate_bps).bs == 1);
    period.links[2].channel.gain = 5000.0;
    CHECK(baseline_energy_optimal(evaluate_period(period, consts), consts.min_rate_bps).bs == 2);
}

TEST_CASE("infeasible fallback") {
    const auto consts = small_consts(1e8, 5.0);
    // every link below the minimum rate; BS 1 has the lowest delay
    auto period = make_period(4.0, {{30.0, 3.0}, {10.0, 3.0}, {44.0, 3.0}});
    auto cands = evaluate_period(period, consts);
    auto d = fsi_decide(1.0, 1.0, cands, consts.min_rate_bps);
    CHECK(d.fallback);
    CHECK(d.bs == 1);
    // every server overloaded: smallest rate shortfall
    period = make_period(10.0, {{45.0, 3.0}, {45.0, 15.0}, {45.0, 7.0}});
    cands = evaluate_period(period, consts);
    d = baseline_delay_optimal(cands, consts.min_rate_bps);
    CHECK(d.fallback);
    CHECK(d.bs == 1);
}

TEST_CASE("ucb selection") {
    UcbState fresh(4, 1.0);
    for (int k = 1; k <= 4; ++k) {
        const int arm = fresh.select(k);
        CHECK(arm == k - 1);
        fresh.record(arm, 1.0);
    }

    UcbState greedy(2, 0.0);
    for (int i = 0; i < 10; ++i) {
        greedy.record(0, 1.0);
        greedy.record(1, 2.0);
    }
    CHECK(greedy.select(21) == 0);

    UcbState hand(2, 2.0);
    for (int i = 0; i < 50; ++i) hand.record(0, 1.0);
    for (int i = 0; i < 2; ++i) hand.record(1, 1.2);
    // 1.0 - sqrt(2 ln 52 / 50) and 1.2 - sqrt(2 ln 52 / 2)
    CHECK(hand.index(0, 52) == doctest::Approx(0.6024452883649131).epsilon(1e-13));
    CHECK(hand.index(1, 52) == doctest::Approx(-0.7877735581754346).epsilon(1e-13));
    CHECK(hand.select(52) == 1);
}

TEST_CASE("ucb update is a running mean") {
    UcbState u(3, 0.0);
    u.update(1, 2.0, 0.5, 0.1, 4.0);  // 0.1 * 2 + 4 * 0.5 = 2.2
    CHECK(u.z_bar()[1] == doctest::Approx(2.2));
    CHECK(u.theta()[1] == 1);
    CHECK(u.theta()[0] == 0);
    u.update(1, 2.0, 0.5, 0.1, 4.0);
    CHECK(u.z_bar()[1] == doctest::Approx(2.2));

    UcbState v(1, 0.0);
    for (double z : {3.0, 1.0, 4.0, 1.0, 5.0}) v.record(0, z);
    CHECK(v.z_bar()[0] == doctest::Approx(2.8).epsilon(1e-15));
    CHECK(v.theta()[0] == 5);
}

TEST_CASE("psi with K equal to the candidate count is round robin") {
    const auto consts = small_consts();
    const auto period = make_period(6.0, {{10.0, 1000.0}, {20.0, 400.0}, {5.0, 100.0}});
    const auto cands = evaluate_period(period, consts);
    std::mt19937_64 rng(1);
    const auto out = psi_run_period(period, consts, 0.5, 0.01, noiseless(3), rng);
    CHECK(out.slot_choices == std::vector<BsId>{0, 1, 2});
    double delay = 0.0, energy = 0.0;
    for (const auto& c : cands) {
        delay += *c.delay / 3.0;
        energy += c.energy / 3.0;
    }
    CHECK(out.delay == doctest::Approx(delay).epsilon(1e-13));
    CHECK(out.energy == doctest::Approx(energy).epsilon(1e-13));
    CHECK(out.handovers_within_period == 2);
    CHECK_THROWS_AS(psi_run_period(period, consts, 0.5, 0.01, noiseless(2), rng), ConfigError);
}

TEST_CASE("noiseless psi concentrates on the P3 optimum") {
    const auto consts = small_consts();
    // q = 0: objective is V * d with d = 5/45, 5/20, 5/10
    const auto period = make_period(5.0, {{25.0, 1000.0}, {0.0, 1000.0}, {35.0, 1000.0}});
    std::mt19937_64 rng(1);
    const auto out = psi_run_period(period, consts, 0.0, 1.0, noiseless(20000), rng);
    const auto on_best = std::count(out.slot_choices.begin(), out.slot_choices.end(), 1);
    CHECK(static_cast<double>(on_best) / 20000.0 > 0.95);
    CHECK(out.optimal_objective == doctest::Approx(5.0 / 45.0));
}

TEST_CASE("psi slot noise is unbiased for delay") {
    const auto consts = small_consts();
    const auto period = make_period(8.0, {{10.0, 1000.0}});
    PsiConfig cfg;
    cfg.slots = 10;
    cfg.noise = {true, 0.0};
    std::mt19937_64 rng(3);
    const int runs = 4000;
    double delay = 0.0, energy = 0.0;
    for (int i = 0; i < runs; ++i) {
        const auto out = psi_run_period(period, consts, 0.0, 1.0, cfg, rng);
        delay += out.delay / runs;
        energy += out.energy / runs;
    }
    const auto cands = evaluate_period(period, consts);
    CHECK(delay == doctest::Approx(*cands[0].delay).epsilon(0.03));
    CHECK(energy == doctest::Approx(cands[0].energy).epsilon(0.03));
}

TEST_CASE("frame loop resets the queue and telescopes") {
    RunConfig c = RunConfig::desk();
    const auto trace = generate_scenario(c, 3);
    const auto fsi = fsi_run(trace, c.schedule);
    REQUIRE(fsi.periods.size() == 100);
    const double b = trace.consts.per_period_budget();
    for (int r = 0; r < c.schedule.frame_count; ++r) {
        const int start = r * c.schedule.frame_length;
        CHECK(fsi.periods[start].queue_before == 0.0);
        double y = 0.0;
        for (int t = start; t < start + c.schedule.frame_length; ++t) y += fsi.periods[t].energy - b;
        CHECK(y <= fsi.periods[start + c.schedule.frame_length - 1].queue_after + 1e-15);
    }
    const auto single = fsi_run(trace, FrameSchedule::constant(1, 100, c.schedule.weights[0]));
    CHECK(single.periods.size() == 100);
    CHECK(fsi_run(trace, c.schedule).mean_delay() == fsi.mean_delay());
    CHECK_THROWS_AS(fsi_run(trace, FrameSchedule::constant(10, 4, 0.01)), ConfigError);
}

TEST_CASE("baselines bracket fsi") {
    RunConfig c = RunConfig::desk();
    double dsum = 0.0, fsum = 0.0, esum = 0.0;
    for (int r = 0; r < 20; ++r) {
        const auto trace = generate_scenario(c, c.replication_seed(r));
        const double d = baseline_run(trace, c.schedule, PolicyKind::DelayOptimal).mean_delay();
        const double f = fsi_run(trace, c.schedule).mean_delay();
        const double e = baseline_run(trace, c.schedule, PolicyKind::EnergyOptimal).mean_delay();
        CHECK(d <= f);
        dsum += d;
        fsum += f;
        esum += e;
    }
    CHECK(dsum <= fsum);
    CHECK(fsum <= esum);
}

TEST_CASE("policy names") {
    for (auto k : {PolicyKind::DelayOptimal, PolicyKind::EnergyOptimal, PolicyKind::Fsi, PolicyKind::Psi})
        CHECK(policy_from_name(policy_name(k)) == k);
    CHECK_THROWS_AS(policy_from_name("greedy"), ConfigError);
}

}
