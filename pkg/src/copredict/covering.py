"""Event-driven engine for online covering with per-step suggestions.

Each arriving constraint is satisfied to value 1/2 by growing the variables
it supports along the exponential law dx_i/dt = (a_i/c_i)(x_i + offset_i),
whose closed form x_i(t) = (x_i0 + o_i) e^{r_i t} - o_i makes every phase
exact up to bisection tolerance. A phase ends when some variable hits the
1/2 cap (it freezes) or the constraint value reaches 1/2 (the step ends).
Doubling the capped internal variables yields the feasible output solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

from .constraints import SparseConstraint, SuggestionSet
from .errors import StalledPhase, UnsatisfiableConstraint

HALF = 0.5
EPS_SAT = 1e-9
BISECT_TOL = 1e-12
BISECT_MAX_ITER = 200


class EventKind(str, Enum):
    FROZEN = "frozen"                  # a variable reached the 1/2 cap
    HALF_SATISFIED = "half_satisfied"  # the constraint value reached 1/2
    TIED = "tied"                      # box engine only: x_ij caught up with y_i


@dataclass(frozen=True)
class PhaseEvent:
    kind: EventKind
    time: float
    var: int | None = None


@dataclass(frozen=True)
class PhaseRecord:
    step: int
    phase: int
    duration: float
    active: tuple[int, ...]
    x_start: tuple[float, ...]
    x_end: tuple[float, ...]
    cost_increment: float
    event: PhaseEvent


@dataclass(frozen=True)
class StepRecord:
    constraint: SparseConstraint
    suggestions: SuggestionSet | None
    phases: tuple[PhaseRecord, ...]
    output: tuple[float, ...]


@dataclass
class RunTrace:
    """Per-phase log of a run, enough to replay every ledger check."""

    n: int
    costs: tuple[float, ...]
    k: int | None = None
    steps: list[StepRecord] = field(default_factory=list)

    def phases(self):
        for rec in self.steps:
            yield from rec.phases

    @property
    def total_cost(self) -> float:
        return sum(p.cost_increment for p in self.phases())


class CoveringState:
    """Monotone internal solution; every variable lives in [0, 1/2]."""

    __slots__ = ("n", "costs", "x", "internal_cost")

    def __init__(self, costs: Sequence[float]):
        costs = tuple(float(c) for c in costs)
        for i, c in enumerate(costs):
            if not (c > 0.0) or not math.isfinite(c):
                raise ValueError(f"cost of variable {i} must be positive and finite, got {c}")
        self.n = len(costs)
        self.costs = costs
        self.x = [0.0] * self.n
        self.internal_cost = 0.0

    def constraint_value(self, constraint: SparseConstraint) -> float:
        return sum(a * self.x[i] for i, a in constraint.coeffs)


def output_solution(state: CoveringState) -> tuple[float, ...]:
    """Double the internal variables; the 1/2 cap keeps the result in [0, 1]."""
    return tuple(min(1.0, 2.0 * v) for v in state.x)


def _value_at(x0: float, offset: float, rate: float, t: float) -> float:
    return (x0 + offset) * math.exp(rate * t) - offset


def phase_advance(active, rates: Mapping[int, float], offsets: Mapping[int, float],
                  starts: Mapping[int, float], coeffs: Mapping[int, float],
                  target: float):
    """Advance one phase of the growth law x_i(t) = (x_i0 + o_i) e^{r_i t} - o_i.

    The phase ends at the earlier of (a) the first active variable reaching
    1/2 and (b) the weighted sum over the active set reaching `target`; the
    half-satisfaction time is found by bisection, which is sound because the
    sum is strictly increasing while any variable grows. Ties go to the
    half-satisfaction event. Returns (duration, event, end values by index).
    """
    order = sorted(active)
    if not order:
        raise StalledPhase("no active variables")
    growing = [i for i in order if starts[i] + offsets[i] > 0.0]
    if not growing:
        raise StalledPhase("every active variable has zero value and zero suggested mass")

    t_freeze = math.inf
    freeze_var = None
    for i in growing:
        t_i = math.log((HALF + offsets[i]) / (starts[i] + offsets[i])) / rates[i]
        if t_i < t_freeze:
            t_freeze, freeze_var = t_i, i

    def total(t: float) -> float:
        acc = 0.0
        for i in order:
            if starts[i] + offsets[i] > 0.0:
                acc += coeffs[i] * _value_at(starts[i], offsets[i], rates[i], t)
            else:
                acc += coeffs[i] * starts[i]
        return acc

    tie_tol = 1e-12 * max(1.0, abs(target))
    reached = total(t_freeze)
    if reached < target - tie_tol:
        t_star = t_freeze
        event = PhaseEvent(EventKind.FROZEN, t_freeze, freeze_var)
    elif reached <= target + tie_tol:
        t_star = t_freeze
        event = PhaseEvent(EventKind.HALF_SATISFIED, t_freeze)
    else:
        lo, hi = 0.0, t_freeze
        for _ in range(BISECT_MAX_ITER):
            if hi - lo <= BISECT_TOL:
                break
            mid = 0.5 * (lo + hi)
            if total(mid) >= target:
                hi = mid
            else:
                lo = mid
        t_star = hi
        event = PhaseEvent(EventKind.HALF_SATISFIED, hi)

    ends = {}
    for i in order:
        if starts[i] + offsets[i] > 0.0:
            v = _value_at(starts[i], offsets[i], rates[i], t_star)
            ends[i] = min(HALF, max(starts[i], v))
        else:
            ends[i] = starts[i]
    if event.kind is EventKind.FROZEN:
        ends[freeze_var] = HALF
    return t_star, event, ends


def grow_until_half(state: CoveringState, constraint: SparseConstraint,
                    offsets: Mapping[int, float]) -> list[PhaseRecord]:
    """Run phases until the constraint value reaches 1/2.

    Shared by the suggestion-driven engine and the suggestion-free baseline,
    which differ only in the per-variable offsets.
    """
    coeffs = constraint.coeff_map()
    support = constraint.support
    if support and support[-1] >= state.n:
        raise ValueError(
            f"constraint {constraint.step} references variable {support[-1]} but n={state.n}"
        )
    coeff_sum = sum(coeffs.values())
    if coeff_sum < 1.0 - 1e-12:
        raise UnsatisfiableConstraint(
            f"constraint {constraint.step}: coefficients sum to {coeff_sum} < 1, "
            "so no assignment with variables at most 1 can satisfy it"
        )

    phases: list[PhaseRecord] = []
    val = state.constraint_value(constraint)
    while val < HALF - EPS_SAT:
        active = [i for i in support if state.x[i] < HALF]
        if not active:
            raise UnsatisfiableConstraint(
                f"constraint {constraint.step}: every supported variable is frozen at 1/2 "
                f"while the value is {val} < 1/2"
            )
        frozen_part = sum(coeffs[i] * state.x[i] for i in support if state.x[i] >= HALF)
        target = HALF - frozen_part
        rates = {i: coeffs[i] / state.costs[i] for i in active}
        starts = {i: state.x[i] for i in active}
        t_star, event, ends = phase_advance(active, rates, offsets, starts, coeffs, target)

        x_before = tuple(state.x)
        increment = 0.0
        for i in active:
            new = ends[i]
            if new > state.x[i]:
                increment += state.costs[i] * (new - state.x[i])
                state.x[i] = new
        state.internal_cost += increment
        phases.append(PhaseRecord(constraint.step, len(phases), t_star, tuple(active),
                                  x_before, tuple(state.x), increment, event))
        if event.kind is EventKind.HALF_SATISFIED:
            break
        val = state.constraint_value(constraint)
    return phases


def process_constraint(state: CoveringState, constraint: SparseConstraint,
                       suggestions: SuggestionSet,
                       trace: RunTrace | None = None) -> list[PhaseRecord]:
    """Satisfy one constraint along the suggestion-weighted growth law.

    The offset of variable i is delta * Gamma_i, the scaled aggregate of its
    suggested values. Mutates `state`; returns the phases (empty when the
    constraint was already half-satisfied on entry).
    """
    delta = suggestions.delta
    gamma = suggestions.aggregate
    offsets = {i: delta * gamma.get(i, 0.0) for i in constraint.support}
    if state.constraint_value(constraint) >= HALF - EPS_SAT:
        phases: list[PhaseRecord] = []
    else:
        phases = grow_until_half(state, constraint, offsets)
    if trace is not None:
        trace.steps.append(StepRecord(constraint, suggestions, tuple(phases),
                                      output_solution(state)))
    return phases
