"""Engine for covering rows coupled to global facility variables by box
constraints x_ij <= y_i.

Each step brings fresh assignment variables x_ij (initialized to 0) and a
cost row d_ij; the facility variables y_i persist across steps and never
decrease. While x_ij < y_i the assignment grows alone at rate
(a_ij/d_ij)(x_ij + delta*Gamma_ij); once it catches y_i the pair is tied and
grows together at rate (a_ij/(d_ij+c_i))(x_ij + delta*Gamma_ij). Both cap at
1/2 and the step ends when the covering row reaches value 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .constraints import EPS_TIGHT, SparseConstraint, as_pairs, tighten
from .covering import (BISECT_MAX_ITER, BISECT_TOL, EPS_SAT, HALF, EventKind,
                       PhaseEvent, _value_at)
from .errors import StalledPhase, UnsatisfiableConstraint


@dataclass(frozen=True)
class BoxSuggestionSet:
    """k suggested (assignment, facility) pairs for one step, tightened.

    The x part of each suggestion is tightened like a plain covering
    suggestion; the y part is clamped into [x'_i, 1] so the box invariant
    x_ij(s) <= y_i(j, s) holds after tightening.
    """

    suggestions: tuple[tuple[dict[int, float], dict[int, float]], ...]

    def __post_init__(self):
        if not self.suggestions:
            raise ValueError("a suggestion set needs at least one suggestion")

    @classmethod
    def tightened(cls, constraint: SparseConstraint, raw: Iterable,
                  eps_tight: float = EPS_TIGHT) -> "BoxSuggestionSet":
        out = []
        for x_raw, y_raw in raw:
            x = tighten(constraint, x_raw, eps_tight)
            y_in = dict(as_pairs(y_raw))
            y = {}
            for i in sorted(set(x) | set(y_in)):
                y[i] = max(min(y_in.get(i, 0.0), 1.0), x.get(i, 0.0))
            out.append((x, y))
        return cls(tuple(out))

    @property
    def k(self) -> int:
        return len(self.suggestions)

    @property
    def delta(self) -> float:
        return 1.0 / len(self.suggestions)

    @cached_property
    def aggregate(self) -> dict[int, float]:
        gamma: dict[int, float] = {}
        for x, _ in self.suggestions:
            for i, v in x.items():
                gamma[i] = gamma.get(i, 0.0) + v
        return {i: gamma[i] for i in sorted(gamma)}


@dataclass
class BoxStepState:
    constraint: SparseConstraint
    d: dict[int, float]
    x: dict[int, float]
    tied: set[int]


class BoxState:
    """Global monotone facility variables plus per-step assignment variables."""

    __slots__ = ("n", "facility_costs", "y", "steps", "internal_cost")

    def __init__(self, facility_costs: Sequence[float]):
        costs = tuple(float(c) for c in facility_costs)
        for i, c in enumerate(costs):
            if not (c > 0.0) or not math.isfinite(c):
                raise ValueError(f"facility cost {i} must be positive and finite, got {c}")
        self.n = len(costs)
        self.facility_costs = costs
        self.y = [0.0] * self.n
        self.steps: list[BoxStepState] = []
        self.internal_cost = 0.0


@dataclass(frozen=True)
class BoxPhaseRecord:
    step: int
    phase: int
    duration: float
    active: tuple[int, ...]
    x_start: tuple[tuple[int, float], ...]
    x_end: tuple[tuple[int, float], ...]
    y_start: tuple[float, ...]
    y_end: tuple[float, ...]
    cost_increment: float
    event: PhaseEvent


@dataclass(frozen=True)
class BoxStepRecord:
    constraint: SparseConstraint
    d: tuple[tuple[int, float], ...]
    suggestions: BoxSuggestionSet
    phases: tuple[BoxPhaseRecord, ...]
    x_final: tuple[tuple[int, float], ...]
    y_after: tuple[float, ...]


@dataclass
class BoxRunTrace:
    n: int
    facility_costs: tuple[float, ...]
    k: int | None = None
    steps: list[BoxStepRecord] = field(default_factory=list)

    def phases(self):
        for rec in self.steps:
            yield from rec.phases

    @property
    def total_cost(self) -> float:
        return sum(p.cost_increment for p in self.phases())


@dataclass
class BoxSuggestionHistory:
    """Per-step (constraint, assignment costs, tightened suggestions)."""

    n: int
    facility_costs: tuple[float, ...]
    k: int
    steps: list[tuple[SparseConstraint, dict[int, float], BoxSuggestionSet]] = field(
        default_factory=list)

    def append(self, constraint, d, suggestions):
        if suggestions.k != self.k:
            raise ValueError(f"expected {self.k} suggestions, got {suggestions.k}")
        self.steps.append((constraint, dict(d), suggestions))


def process_box_constraint(state: BoxState, constraint: SparseConstraint,
                           d: Mapping[int, float], suggestions: BoxSuggestionSet,
                           trace: BoxRunTrace | None = None) -> list[BoxPhaseRecord]:
    """Grow the step's assignment variables, and the facility variables tied
    to them, until the covering row reaches value 1/2.

    Assignment variables with d_ij = 0 first jump instantaneously up to
    min(y_i, the half-satisfaction point); the jump is the limit of the
    untied dynamics and costs nothing. An untied variable that catches its
    facility variable ties to it for the rest of the step.
    """
    coeffs = constraint.coeff_map()
    support = constraint.support
    if support and support[-1] >= state.n:
        raise ValueError(
            f"constraint {constraint.step} references facility {support[-1]} but n={state.n}"
        )
    d = {i: float(d[i]) for i in support}
    for i, v in d.items():
        if v < 0.0 or not math.isfinite(v):
            raise ValueError(f"assignment cost d[{i}] must be nonnegative, got {v}")
    coeff_sum = sum(coeffs.values())
    if coeff_sum < 1.0 - 1e-12:
        raise UnsatisfiableConstraint(
            f"constraint {constraint.step}: coefficients sum to {coeff_sum} < 1"
        )

    delta = suggestions.delta
    gamma = suggestions.aggregate
    offsets = {i: delta * gamma.get(i, 0.0) for i in support}

    x = {i: 0.0 for i in support}
    tied = {i for i in support if state.y[i] <= 0.0}
    state.steps.append(BoxStepState(constraint, d, x, tied))
    step_idx = constraint.step
    phases: list[BoxPhaseRecord] = []

    def val() -> float:
        return sum(coeffs[i] * x[i] for i in support)

    def snap_x():
        return tuple(sorted(x.items()))

    def record(duration, active, xs, ys, inc, event):
        phases.append(BoxPhaseRecord(step_idx, len(phases), duration, tuple(active),
                                     xs, snap_x(), ys, tuple(state.y), inc, event))

    v = val()
    # Instantaneous moves for zero-cost untied assignments.
    for i in support:
        if v >= HALF - EPS_SAT:
            break
        if d[i] != 0.0 or i in tied or x[i] >= state.y[i]:
            continue
        xs, ys = snap_x(), tuple(state.y)
        new = min(state.y[i], x[i] + (HALF - v) / coeffs[i])
        if new <= x[i]:
            continue
        x[i] = new
        v = val()
        if v >= HALF - EPS_SAT:
            record(0.0, (i,), xs, ys, 0.0, PhaseEvent(EventKind.HALF_SATISFIED, 0.0))
        elif new >= HALF:
            tied.add(i)
            record(0.0, (i,), xs, ys, 0.0, PhaseEvent(EventKind.FROZEN, 0.0, i))
        else:
            tied.add(i)
            record(0.0, (i,), xs, ys, 0.0, PhaseEvent(EventKind.TIED, 0.0, i))

    while v < HALF - EPS_SAT:
        active = [i for i in support if x[i] < HALF]
        if not active:
            raise UnsatisfiableConstraint(
                f"constraint {step_idx}: every supported assignment is frozen at 1/2 "
                f"while the value is {v} < 1/2"
            )
        growing = [i for i in active if x[i] + offsets[i] > 0.0]
        if not growing:
            raise StalledPhase(
                f"constraint {step_idx}: every active assignment has zero value "
                "and zero suggested mass"
            )
        rates = {}
        for i in active:
            rates[i] = (coeffs[i] / (d[i] + state.facility_costs[i]) if i in tied
                        else coeffs[i] / d[i])

        best = None  # (time, var, kind)
        for i in growing:
            base = x[i] + offsets[i]
            t_f = math.log((HALF + offsets[i]) / base) / rates[i]
            if best is None or (t_f, i) < (best[0], best[1]):
                best = (t_f, i, EventKind.FROZEN)
            if i not in tied and state.y[i] < HALF:
                t_c = math.log((state.y[i] + offsets[i]) / base) / rates[i]
                if (t_c, i) < (best[0], best[1]):
                    best = (t_c, i, EventKind.TIED)
        t_event, event_var, event_kind = best

        def total(t: float) -> float:
            acc = 0.0
            for i in support:
                if x[i] < HALF and x[i] + offsets[i] > 0.0:
                    acc += coeffs[i] * _value_at(x[i], offsets[i], rates[i], t)
                else:
                    acc += coeffs[i] * x[i]
            return acc

        tie_tol = 1e-12
        reached = total(t_event)
        if reached < HALF - tie_tol:
            t_star = t_event
            event = PhaseEvent(event_kind, t_event, event_var)
        elif reached <= HALF + tie_tol:
            t_star = t_event
            event = PhaseEvent(EventKind.HALF_SATISFIED, t_event)
        else:
            lo, hi = 0.0, t_event
            for _ in range(BISECT_MAX_ITER):
                if hi - lo <= BISECT_TOL:
                    break
                mid = 0.5 * (lo + hi)
                if total(mid) >= HALF:
                    hi = mid
                else:
                    lo = mid
            t_star = hi
            event = PhaseEvent(EventKind.HALF_SATISFIED, hi)

        ends = {}
        for i in growing:
            ends[i] = min(HALF, max(x[i], _value_at(x[i], offsets[i], rates[i], t_star)))
        if event.kind is EventKind.FROZEN:
            ends[event_var] = HALF
        elif event.kind is EventKind.TIED:
            ends[event_var] = state.y[event_var]

        xs, ys = snap_x(), tuple(state.y)
        increment = 0.0
        for i in growing:
            dx = ends[i] - x[i]
            if dx <= 0.0:
                continue
            increment += d[i] * dx
            if i in tied:
                increment += state.facility_costs[i] * dx
                state.y[i] = ends[i]
            x[i] = ends[i]
        if event.kind is EventKind.TIED:
            tied.add(event_var)
        state.internal_cost += increment
        record(t_star, active, xs, ys, increment, event)
        v = val()
        if event.kind is EventKind.HALF_SATISFIED:
            break

    if trace is not None:
        trace.steps.append(BoxStepRecord(constraint, tuple(sorted(d.items())),
                                         suggestions, tuple(phases),
                                         snap_x(), tuple(state.y)))
    return phases


def output_box_solution(state: BoxState):
    """Double every variable; box rows survive because x and y double together.

    Returns (facility vector, one assignment map per processed step).
    """
    y_out = tuple(min(1.0, 2.0 * v) for v in state.y)
    x_out = [{i: min(1.0, 2.0 * v) for i, v in sorted(st.x.items())} for st in state.steps]
    return y_out, x_out
