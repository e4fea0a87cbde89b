"""Shared random-instance builders for the test suite."""

import random

from copredict import (BoxRunTrace, BoxState, BoxSuggestionHistory,
                       BoxSuggestionSet, CoveringState, RunTrace,
                       SparseConstraint, SuggestionHistory, SuggestionSet,
                       process_box_constraint, process_constraint)
from copredict import facility
from copredict.facility import client_step
from copredict.predictors import repair_to_feasible


def random_tight_suggestion(constraint, rng):
    raw = {i: rng.uniform(0.0, 1.0) for i in constraint.support}
    return repair_to_feasible(constraint, raw)


def random_covering(rng, n_max=12, m_max=8, k_max=4, k=None):
    """Random satisfiable covering instance with k feasible suggestions per
    step: (costs, constraints, raw suggestion lists)."""
    n = rng.randint(1, n_max)
    m = rng.randint(1, m_max)
    if k is None:
        k = rng.randint(1, k_max)
    costs = [rng.uniform(0.1, 2.0) for _ in range(n)]
    constraints, suggestions = [], []
    for t in range(m):
        size = rng.randint(1, min(n, 4))
        idx = sorted(rng.sample(range(n), size))
        coeffs = {i: rng.uniform(0.2, 2.0) for i in idx}
        total = sum(coeffs.values())
        if total < 1.05:
            coeffs = {i: a * 1.05 / total for i, a in coeffs.items()}
        constraint = SparseConstraint(t, tuple(sorted(coeffs.items())))
        constraints.append(constraint)
        suggestions.append([random_tight_suggestion(constraint, rng) for _ in range(k)])
    return costs, constraints, suggestions


def run_engine(costs, constraints, suggestions):
    """Run the covering engine over a full stream; returns (state, trace, history)."""
    n = len(costs)
    k = len(suggestions[0]) if suggestions else 1
    state = CoveringState(costs)
    trace = RunTrace(n, tuple(costs), k=k)
    history = SuggestionHistory(n, tuple(costs), k)
    for constraint, raw in zip(constraints, suggestions):
        ss = SuggestionSet.tightened(constraint, raw)
        history.append(constraint, ss)
        process_constraint(state, constraint, ss, trace=trace)
    return state, trace, history


def run_box_twin(costs, constraints, suggestions):
    """Box run with all d = 0 and the covering suggestions as the x parts;
    its y-dynamics mirror the covering engine exactly."""
    n = len(costs)
    k = len(suggestions[0]) if suggestions else 1
    state = BoxState(costs)
    trace = BoxRunTrace(n, tuple(costs), k=k)
    for constraint, raw in zip(constraints, suggestions):
        bs = BoxSuggestionSet.tightened(constraint, [(dict(s), dict(s)) for s in raw])
        zero_d = {i: 0.0 for i in constraint.support}
        process_box_constraint(state, constraint, zero_d, bs, trace=trace)
    return state, trace


def random_facloc(rng, max_fac=3, max_clients=4, k_max=3):
    """Random Euclidean facility instance plus per-client box suggestions.

    Returns (instance, steps, k) with steps = [(constraint, d, raw suggestions)].
    """
    n_fac = rng.randint(1, max_fac)
    n_clients = rng.randint(1, max_clients)
    k = rng.randint(1, k_max)
    inst = facility.random_instance(n_fac, n_clients, rng)
    steps = []
    for t in range(n_clients):
        constraint, d = client_step(inst, t)
        raw = []
        for _ in range(k):
            size = rng.randint(1, n_fac)
            chosen = rng.sample(range(n_fac), size)
            x = repair_to_feasible(constraint, {i: rng.uniform(0.0, 1.0) for i in chosen})
            raw.append((x, dict(x)))
        steps.append((constraint, d, raw))
    return inst, steps, k


def run_box_stream(facility_costs, steps):
    """Run the box engine over [(constraint, d, raw suggestions)] steps."""
    n = len(facility_costs)
    k = len(steps[0][2]) if steps else 1
    state = BoxState(facility_costs)
    trace = BoxRunTrace(n, tuple(facility_costs), k=k)
    history = BoxSuggestionHistory(n, tuple(facility_costs), k)
    for constraint, d, raw in steps:
        bs = BoxSuggestionSet.tightened(constraint, raw)
        history.append(constraint, d, bs)
        process_box_constraint(state, constraint, d, bs, trace=trace)
    return state, trace, history
