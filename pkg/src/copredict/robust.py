"""Suggestion-free baseline and the robustification meta-algorithm.

The meta-algorithm runs three engines in lockstep: the prediction path A
(the k suggestions), the baseline path B (no suggestions), and a meta engine
M fed two per-step suggestions extracted from A's and B's current doubled
outputs. M tracks the cheaper of the two, so its cost is at most
6 ln(3) * min(cost(A), cost(B)) regardless of suggestion quality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .constraints import SparseConstraint, SuggestionSet
from .covering import (EPS_SAT, HALF, CoveringState, PhaseRecord, RunTrace,
                       StepRecord, grow_until_half, output_solution,
                       process_constraint)

ROBUST_FACTOR = 6.0 * math.log(3.0)

# Sub-solution outputs satisfy their step's constraint to 1 only up to the
# engine's satisfaction slack, so the meta tightening gets a looser epsilon.
META_EPS_TIGHT = 1e-8


def baseline_step(state: CoveringState, constraint: SparseConstraint,
                  trace: RunTrace | None = None) -> list[PhaseRecord]:
    """One suggestion-free step: uniform offset 1/d over the d supported
    variables, the classic growth rule that is O(log d)-competitive."""
    support = constraint.support
    offsets = {i: 1.0 / len(support) for i in support}
    if state.constraint_value(constraint) >= HALF - EPS_SAT:
        phases: list[PhaseRecord] = []
    else:
        phases = grow_until_half(state, constraint, offsets)
    if trace is not None:
        trace.steps.append(StepRecord(constraint, None, tuple(phases),
                                      output_solution(state)))
    return phases


@dataclass
class RobustResult:
    output: tuple[float, ...]
    output_cost: float
    prediction_cost: float
    baseline_cost: float
    per_step_costs: list[tuple[float, float]]
    meta_trace: RunTrace
    prediction_trace: RunTrace
    baseline_trace: RunTrace

    @property
    def bound(self) -> float:
        return ROBUST_FACTOR * min(self.prediction_cost, self.baseline_cost)

    def bound_holds(self, rel_tol: float = 1e-6) -> bool:
        return self.output_cost <= self.bound * (1.0 + rel_tol)


def robust_run(costs, steps: Iterable[tuple[SparseConstraint, list]]) -> RobustResult:
    """Process a constraint stream with the two-path meta-algorithm.

    `steps` yields (constraint, raw suggestion list). After A and B satisfy
    the constraint, their doubled outputs restricted to its support are
    tightened and fed to M as a two-suggestion set; M's doubled output is the
    returned solution.
    """
    costs = tuple(float(c) for c in costs)
    a_state = CoveringState(costs)
    b_state = CoveringState(costs)
    m_state = CoveringState(costs)
    n = len(costs)
    a_trace = RunTrace(n, costs)
    b_trace = RunTrace(n, costs)
    m_trace = RunTrace(n, costs, k=2)
    per_step: list[tuple[float, float]] = []

    for constraint, raw in steps:
        suggestions = SuggestionSet.tightened(constraint, raw)
        if a_trace.k is None:
            a_trace.k = suggestions.k
        process_constraint(a_state, constraint, suggestions, trace=a_trace)
        baseline_step(b_state, constraint, trace=b_trace)

        proj_a = {i: 2.0 * a_state.x[i] for i in constraint.support if a_state.x[i] > 0.0}
        proj_b = {i: 2.0 * b_state.x[i] for i in constraint.support if b_state.x[i] > 0.0}
        meta = SuggestionSet.tightened(constraint, (proj_a, proj_b),
                                       eps_tight=META_EPS_TIGHT)
        process_constraint(m_state, constraint, meta, trace=m_trace)
        per_step.append((2.0 * a_state.internal_cost, 2.0 * b_state.internal_cost))

    output = output_solution(m_state)
    return RobustResult(
        output=output,
        output_cost=sum(c * v for c, v in zip(costs, output)),
        prediction_cost=2.0 * a_state.internal_cost,
        baseline_cost=2.0 * b_state.internal_cost,
        per_step_costs=per_step,
        meta_trace=m_trace,
        prediction_trace=a_trace,
        baseline_trace=b_trace,
    )
