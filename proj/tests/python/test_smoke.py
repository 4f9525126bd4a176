import math

import pytest

import mecmob


def test_formulas():
    assert mecmob.delay_cost(4.0, 50.0, 10.0) == pytest.approx(4.0 / 36.0, rel=1e-15)
    rate = mecmob.uplink_rate(gain=3.0, interference=0.0, noise_power=1.0, bandwidth=1e6, tx_power=1.0)
    assert rate == pytest.approx(2e6, rel=1e-15)
    energy = mecmob.tx_energy(2.0, 3.0, 0.0, 1.0, 1e6, 1.0, 8e6)
    assert energy == pytest.approx(8.0, rel=1e-15)
    assert mecmob.queue_update(0.1, 0.02, 0.05) == 0.07
    assert mecmob.queue_update(0.0, 0.02, 0.05) == 0.0
    assert mecmob.ucb_regret_bound(1.0, [0.1], math.e) == pytest.approx(80 + (1 + math.pi**2 / 3) * 0.1)
    assert mecmob.theorem1_delay_bound([2.0], 1.0, 0.0, 1, [1.0]) == pytest.approx(4.0)


def test_errors_cross_the_boundary():
    with pytest.raises(mecmob.UnstableServer):
        mecmob.delay_cost(10.0, 20.0, 10.0)
    with pytest.raises(mecmob.DegenerateGap):
        mecmob.ucb_regret_bound(1.0, [0.0], 10)
    with pytest.raises(mecmob.ConfigError):
        mecmob.default_config("full")


def test_trace_generation_is_seeded():
    a = mecmob.generate_trace(seed=3, profile="desk")
    b = mecmob.generate_trace(seed=3, profile="desk")
    c = mecmob.generate_trace(seed=4, profile="desk")
    assert len(a["periods"]) == 100
    assert mecmob.trace_hash(a) == mecmob.trace_hash(b)
    assert mecmob.trace_hash(a) != mecmob.trace_hash(c)
    assert len(mecmob.trace_hash(a)) == 40


def test_experiment_summary():
    config = mecmob.default_config("desk")
    config["replications"] = 2
    summary = mecmob.run_experiment(config)
    assert len(summary["replications"]) == 2
    names = {a["policy"] for a in summary["aggregates"]}
    assert {"fsi", "psi", "lookahead", "delay_optimal", "energy_optimal"} <= names
    bounds = mecmob.evaluate_bounds(summary)
    for rep, ev in zip(summary["replications"], bounds):
        assert ev["fsi"]["delay_bound"] == rep["bounds"]["fsi"]["delay_bound"]
