"""Sparse covering constraints and per-step suggestion bundles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from .errors import InfeasibleSuggestion

EPS_TIGHT = 1e-9


def as_pairs(entries) -> list[tuple[int, float]]:
    """Normalize a mapping or an iterable of (index, value) to sorted pairs."""
    items = entries.items() if isinstance(entries, Mapping) else entries
    return sorted((int(i), float(v)) for i, v in items)


@dataclass(frozen=True)
class SparseConstraint:
    """One covering row, normalized to right-hand side 1.

    Only strictly positive coefficients are stored; variable indices are
    distinct and kept sorted.
    """

    step: int
    coeffs: tuple[tuple[int, float], ...]

    def __post_init__(self):
        pairs = as_pairs(self.coeffs)
        seen = set()
        for i, a in pairs:
            if i < 0:
                raise ValueError(f"negative variable index {i}")
            if i in seen:
                raise ValueError(f"duplicate variable index {i}")
            if not (a > 0.0) or not math.isfinite(a):
                raise ValueError(f"coefficient of variable {i} must be positive, got {a}")
            seen.add(i)
        object.__setattr__(self, "coeffs", tuple(pairs))

    @classmethod
    def normalized(cls, step: int, coeffs, rhs: float = 1.0) -> "SparseConstraint":
        """Build from a raw row sum(a*x) >= rhs by dividing through by rhs.

        Zero coefficients are dropped.
        """
        rhs = float(rhs)
        if not (rhs > 0.0):
            raise ValueError(f"right-hand side must be positive, got {rhs}")
        pairs = [(i, a / rhs) for i, a in as_pairs(coeffs) if a != 0.0]
        return cls(step, tuple(pairs))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.coeffs)

    def coeff_map(self) -> dict[int, float]:
        return dict(self.coeffs)

    def value(self, x) -> float:
        """Constraint value sum(a_i * x_i) against a dense vector."""
        return sum(a * x[i] for i, a in self.coeffs)

    def value_sparse(self, values: Mapping[int, float]) -> float:
        return sum(a * values.get(i, 0.0) for i, a in self.coeffs)


def tighten(constraint: SparseConstraint, suggestion, eps_tight: float = EPS_TIGHT) -> dict[int, float]:
    """Scale a feasible suggestion down so the constraint holds with equality.

    The whole assignment is multiplied by 1/sum(a*x), which preserves
    pointwise dominance by the original suggestion. A sum already within
    eps_tight of 1 is returned unchanged. Entries outside the constraint
    support scale along with the rest.
    """
    values = dict(as_pairs(suggestion))
    for i, v in values.items():
        if v < -1e-15 or v > 1.0 + 1e-12 or not math.isfinite(v):
            raise InfeasibleSuggestion(f"suggested value x[{i}]={v} outside [0, 1]")
    total = constraint.value_sparse(values)
    if total < 1.0 - eps_tight:
        raise InfeasibleSuggestion(
            f"suggestion covers constraint {constraint.step} to {total}, needs at least 1"
        )
    if total <= 1.0:
        return values
    factor = 1.0 / total
    return {i: v * factor for i, v in values.items()}


@dataclass(frozen=True)
class SuggestionSet:
    """The k tightened suggestions for one step.

    `aggregate` holds the per-variable sum over suggestions and `delta` is
    1/k, the two quantities the growth law actually consumes.
    """

    suggestions: tuple[dict[int, float], ...]

    def __post_init__(self):
        if not self.suggestions:
            raise ValueError("a suggestion set needs at least one suggestion")

    @classmethod
    def tightened(cls, constraint: SparseConstraint, raw_suggestions: Iterable,
                  eps_tight: float = EPS_TIGHT) -> "SuggestionSet":
        return cls(tuple(tighten(constraint, s, eps_tight) for s in raw_suggestions))

    @property
    def k(self) -> int:
        return len(self.suggestions)

    @property
    def delta(self) -> float:
        return 1.0 / len(self.suggestions)

    @cached_property
    def aggregate(self) -> dict[int, float]:
        gamma: dict[int, float] = {}
        for s in self.suggestions:
            for i, v in s.items():
                gamma[i] = gamma.get(i, 0.0) + v
        return {i: gamma[i] for i in sorted(gamma)}


@dataclass
class SuggestionHistory:
    """Ordered (constraint, tightened suggestions) pairs for a whole run."""

    n: int
    costs: tuple[float, ...]
    k: int
    steps: list[tuple[SparseConstraint, SuggestionSet]] = field(default_factory=list)

    def append(self, constraint: SparseConstraint, suggestions: SuggestionSet) -> None:
        if suggestions.k != self.k:
            raise ValueError(f"expected {self.k} suggestions, got {suggestions.k}")
        if constraint.support and constraint.support[-1] >= self.n:
            raise ValueError(
                f"constraint {constraint.step} references variable {constraint.support[-1]} "
                f"but n={self.n}"
            )
        self.steps.append((constraint, suggestions))
