"""Online set cover: constraint transcription and randomized online rounding."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

from .constraints import SparseConstraint
from .errors import UncoverableElement


@dataclass
class SetCoverInstance:
    """Weighted sets, the element arrival order, and an a-priori bound M on
    the number of elements (the rounding thresholds depend on it)."""

    weights: list[float]
    memberships: list[list[int]]  # per arriving element, its containing sets
    m_bound: int

    def __post_init__(self):
        for s, w in enumerate(self.weights):
            if not (w > 0.0):
                raise ValueError(f"set {s} has nonpositive weight {w}")
        if self.m_bound < len(self.memberships):
            raise ValueError(
                f"m_bound={self.m_bound} below the {len(self.memberships)} elements present"
            )


def setcover_constraint(containing_sets: Sequence[int], step: int) -> SparseConstraint:
    """Unit-coefficient covering row over the element's containing sets."""
    sets = sorted(set(int(s) for s in containing_sets))
    if not sets:
        raise UncoverableElement(f"element at step {step} belongs to no set")
    return SparseConstraint(step, tuple((s, 1.0) for s in sets))


@dataclass
class RoundingResult:
    bought: list[int]  # purchase order
    cost: float
    fallback_buys: int
    thresholds: list[float]

    def covers(self, memberships) -> bool:
        owned = set(self.bought)
        return all(any(s in owned for s in members) for members in memberships)


def round_setcover_online(weights: Sequence[float], m_bound: int,
                          memberships: Sequence[Sequence[int]],
                          fractional: Sequence[Sequence[float]],
                          seed: int) -> RoundingResult:
    """Round a monotone fractional stream to an integral set selection online.

    Each set draws ceil(2 ln(M+1)) independent uniform thresholds up front
    and is bought as soon as its fractional value reaches the minimum of
    them; if an arriving element is still uncovered, its cheapest containing
    set is bought. `fractional[t]` is the (doubled, monotone) vector right
    after element t was processed.
    """
    n_sets = len(weights)
    rng = random.Random(seed)
    draws = max(1, math.ceil(2.0 * math.log(m_bound + 1.0)))
    thresholds = [min(rng.random() for _ in range(draws)) for _ in range(n_sets)]

    owned: set[int] = set()
    bought: list[int] = []
    cost = 0.0
    fallback = 0
    prev = [0.0] * n_sets
    for t, members in enumerate(memberships):
        frac = fractional[t]
        for s in range(n_sets):
            if frac[s] < prev[s] - 1e-12:
                raise ValueError(f"fractional value of set {s} decreased at step {t}")
            prev[s] = frac[s]
        for s in range(n_sets):
            if s not in owned and frac[s] >= thresholds[s]:
                owned.add(s)
                bought.append(s)
                cost += weights[s]
        if not any(s in owned for s in members):
            cheapest = min(members, key=lambda s: (weights[s], s))
            owned.add(cheapest)
            bought.append(cheapest)
            cost += weights[cheapest]
            fallback += 1
    return RoundingResult(bought, cost, fallback, thresholds)


def random_instance(n_sets: int, n_elements: int, rng: random.Random,
                    max_frequency: int = 4) -> SetCoverInstance:
    """Random weighted instance; every element lands in at least one set."""
    weights = [rng.uniform(0.5, 2.0) for _ in range(n_sets)]
    memberships = []
    for _ in range(n_elements):
        freq = rng.randint(1, min(max_frequency, n_sets))
        memberships.append(sorted(rng.sample(range(n_sets), freq)))
    return SetCoverInstance(weights, memberships, n_elements)
