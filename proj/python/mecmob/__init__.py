"""Python access to the mecmob simulator core.

Configs, traces and summaries cross the boundary as JSON documents; this
module converts them to and from plain dicts.
"""

import json

from . import _mecmob
from ._mecmob import (
    ConfigError,
    DegenerateGap,
    IoError,
    ReplicationError,
    SchemaError,
    UnstableServer,
    delay_cost,
    pathloss_db,
    queue_update,
    theorem1_delay_bound,
    theorem1_energy_bound,
    tx_energy,
    ucb_regret_bound,
    uplink_rate,
)

__all__ = [
    "ConfigError",
    "DegenerateGap",
    "IoError",
    "ReplicationError",
    "SchemaError",
    "UnstableServer",
    "default_config",
    "delay_cost",
    "evaluate_bounds",
    "generate_trace",
    "pathloss_db",
    "queue_update",
    "run_experiment",
    "theorem1_delay_bound",
    "theorem1_energy_bound",
    "trace_hash",
    "tx_energy",
    "ucb_regret_bound",
    "uplink_rate",
]


def _dump(doc):
    return "" if doc is None else json.dumps(doc)


def default_config(profile="paper"):
    return json.loads(_mecmob.default_config(profile))


def generate_trace(config=None, seed=1, profile="paper"):
    return json.loads(_mecmob.generate_trace(_dump(config), seed, profile))


def trace_hash(trace):
    return _mecmob.trace_hash(json.dumps(trace))


def run_experiment(config=None, profile="desk"):
    """Run every configured policy; returns the summary document."""
    return json.loads(_mecmob.run_experiment(_dump(config), profile))


def evaluate_bounds(summary):
    return json.loads(_mecmob.evaluate_bounds(json.dumps(summary)))
