"""Computable insurance contracts: logic engine, oracle, analysis and benchmark harness."""

import json

from . import _ccx
from ._ccx import (
    ConfigError,
    ParseError,
    aggregate,
    contract_text,
    extract_code,
    render_policy_prompt,
    render_query_prompt,
    rule_graph_dot,
    solve,
)

__all__ = [
    "ConfigError",
    "ParseError",
    "aggregate",
    "claim_covered",
    "contract_text",
    "extract_code",
    "gold",
    "render_policy_prompt",
    "render_query_prompt",
    "replay",
    "rule_graph_dot",
    "run_trial",
    "solve",
    "validate",
]


def claim_covered(time_days, reason, age_years, cause="none", visit_time_days=None,
                  confirm_time_days=None, fraud=False):
    """Reference decision for one claim scenario."""
    scenario = {
        "time_days": time_days,
        "reason": reason,
        "cause": cause,
        "age_years": age_years,
        "visit_time_days": visit_time_days,
        "confirm_time_days": confirm_time_days,
        "fraud": fraud,
    }
    return _ccx.claim_covered_json(json.dumps(scenario))


def gold():
    """The nine benchmark questions with their gold answers."""
    return json.loads(_ccx.gold_json())["queries"]


def validate(source):
    """Static report for a policy program."""
    return json.loads(_ccx.validate_json(source))


def run_trial(policy, queries, max_steps=1_000_000, max_depth=10_000):
    """Scores one policy and nine query encodings against the gold answers."""
    return json.loads(_ccx.run_trial_json(policy, list(queries), max_steps, max_depth))


def replay(directory, n_trials=1, jobs=1):
    """Replays stored encodings and returns the run summary."""
    return json.loads(_ccx.replay_json(str(directory), n_trials, jobs))
