"""Suggestion stream generators.

Oracle projections of a reference solution, noisy multiplicative variants
with feasibility repair, and the adversarial nested-rounds instance whose
best expert costs exactly T.
"""

from __future__ import annotations

import math
import random
from typing import Sequence

from .constraints import SparseConstraint, tighten
from .errors import InfeasibleReference, RepairFailed


def oracle_predictor(reference: Sequence[float], constraint: SparseConstraint,
                     eps_tight: float = 1e-9) -> dict[int, float]:
    """Project a feasible reference solution onto the constraint support and
    tighten it."""
    total = sum(a * reference[i] for i, a in constraint.coeffs)
    if total < 1.0 - eps_tight:
        raise InfeasibleReference(
            f"reference covers constraint {constraint.step} to {total}, needs at least 1"
        )
    projected = {i: float(reference[i]) for i, _ in constraint.coeffs if reference[i] > 0.0}
    return tighten(constraint, projected, eps_tight)


def repair_to_feasible(constraint: SparseConstraint,
                       values: dict[int, float]) -> dict[int, float]:
    """Raise a sub-feasible assignment on the constraint support to value 1.

    First a uniform upscale (when the current value is positive), then a
    clamp to [0, 1], then any remaining deficit is spread across unclamped
    entries in proportion to their headroom, which lands on value 1 exactly.
    """
    coeffs = constraint.coeff_map()
    vals = {i: min(1.0, max(0.0, values.get(i, 0.0))) for i in constraint.support}
    total = sum(coeffs[i] * vals[i] for i in constraint.support)
    if 0.0 < total < 1.0:
        scale = 1.0 / total
        vals = {i: min(1.0, v * scale) for i, v in vals.items()}
        total = sum(coeffs[i] * vals[i] for i in constraint.support)
    deficit = 1.0 - total
    if deficit > 1e-12:
        headroom = {i: 1.0 - vals[i] for i in constraint.support if vals[i] < 1.0}
        capacity = sum(coeffs[i] * h for i, h in headroom.items())
        if capacity < deficit - 1e-12:
            raise RepairFailed(
                f"constraint {constraint.step}: support cannot reach value 1 "
                f"even with every entry at 1 (capacity {capacity} < deficit {deficit})"
            )
        frac = deficit / capacity
        for i, h in headroom.items():
            vals[i] = min(1.0, vals[i] + frac * h)
    return vals


def noisy_predictor(reference: Sequence[float], constraint: SparseConstraint,
                    sigma: float, rng: random.Random,
                    eps_tight: float = 1e-9) -> dict[int, float]:
    """Multiplicatively perturb the reference on the constraint support, then
    repair feasibility and tighten.

    Each supported entry is multiplied by exp(sigma * g) with g standard
    normal; one gaussian is drawn per supported entry regardless of its
    value, so the stream of draws only depends on the support.
    """
    if sigma < 0.0:
        raise ValueError(f"noise level must be nonnegative, got {sigma}")
    noised = {}
    for i, _ in constraint.coeffs:
        g = rng.gauss(0.0, 1.0)
        v = float(reference[i])
        if sigma > 0.0:
            v *= math.exp(sigma * g)
        noised[i] = min(1.0, v)
    repaired = repair_to_feasible(constraint, noised)
    return tighten(constraint, repaired, eps_tight)


def gen_lower_bound(k: int, rounds_length: int, seed: int):
    """Adversarial nested-rounds instance: k rounds of T constraints over kT
    unit-cost variables.

    Constraint (i, j) of round i is covered by the variables (i', j) for
    i' >= i; the expert of level i' suggests its own variable (i', j), while
    already-dropped experts (level < i) suggest the current round's variable
    (i, j), a fixed deterministic choice. Expert levels are assigned to
    suggestion slots by a seeded uniform permutation. Following the level-k
    expert costs exactly T, and no supported solution does better.

    Returns (constraints, per-step suggestion lists in slot order, n).
    """
    if k < 1 or rounds_length < 1:
        raise ValueError("need k >= 1 and T >= 1")
    T = rounds_length
    rng = random.Random(seed)
    levels = list(range(1, k + 1))
    rng.shuffle(levels)  # slot s carries the expert of level levels[s]

    def var(level: int, t: int) -> int:
        return (level - 1) * T + t

    constraints = []
    suggestions = []
    step = 0
    for rnd in range(1, k + 1):
        for t in range(T):
            support = tuple((var(lv, t), 1.0) for lv in range(rnd, k + 1))
            constraints.append(SparseConstraint(step, support))
            per_slot = []
            for s in range(k):
                level = levels[s]
                target = var(level, t) if level >= rnd else var(rnd, t)
                per_slot.append({target: 1.0})
            suggestions.append(per_slot)
            step += 1
    return constraints, suggestions, k * T
