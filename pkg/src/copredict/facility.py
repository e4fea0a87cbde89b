"""Metric facility location mapped onto the box-constrained engine.

A client arrival becomes a unit-coefficient covering row over all facilities
with assignment costs equal to the client-facility distances; facility
opening costs become the global variable costs.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .constraints import SparseConstraint
from .errors import MetricError


def validate_metric(dist, tol: float = 1e-9) -> None:
    """Reject distance data that is not a metric: square shape, nonnegative,
    zero diagonal, symmetric, triangle inequality within tol."""
    n = len(dist)
    for a, row in enumerate(dist):
        if len(row) != n:
            raise MetricError(f"row {a} has length {len(row)}, expected {n}")
        if abs(row[a]) > tol:
            raise MetricError(f"nonzero self-distance d({a},{a}) = {row[a]}")
        for b, v in enumerate(row):
            if v < -tol or not math.isfinite(v):
                raise MetricError(f"d({a},{b}) = {v} is negative or not finite")
            if abs(v - dist[b][a]) > tol:
                raise MetricError(f"asymmetric pair d({a},{b}) != d({b},{a})")
    for a in range(n):
        for b in range(n):
            dab = dist[a][b]
            for c in range(n):
                if dab > dist[a][c] + dist[c][b] + tol:
                    raise MetricError(
                        f"triangle inequality fails: d({a},{b}) = {dab} > "
                        f"d({a},{c}) + d({c},{b}) = {dist[a][c] + dist[c][b]}"
                    )


@dataclass
class FacilityInstance:
    """Square metric over facility points (first) and client points, opening
    costs per facility, and the client arrival order (point indices)."""

    dist: list[list[float]]
    opening_costs: list[float]
    clients: list[int]

    def __post_init__(self):
        validate_metric(self.dist)
        n_points = len(self.dist)
        for i, c in enumerate(self.opening_costs):
            if not (c > 0.0):
                raise ValueError(f"facility {i} has nonpositive opening cost {c}")
        if len(self.opening_costs) > n_points:
            raise ValueError("more facilities than points in the metric")
        for j in self.clients:
            if not (0 <= j < n_points):
                raise ValueError(f"client point index {j} outside the metric")

    @property
    def n_facilities(self) -> int:
        return len(self.opening_costs)


def client_step(instance: FacilityInstance, t: int):
    """Constraint and assignment-cost row for the t-th arriving client."""
    client = instance.clients[t]
    n_fac = instance.n_facilities
    constraint = SparseConstraint(t, tuple((i, 1.0) for i in range(n_fac)))
    d = {i: float(instance.dist[client][i]) for i in range(n_fac)}
    return constraint, d


def random_instance(n_facilities: int, n_clients: int, rng: random.Random) -> FacilityInstance:
    """Random Euclidean instance on the unit square (a metric by construction)."""
    points = [(rng.random(), rng.random()) for _ in range(n_facilities + n_clients)]
    dist = [[math.hypot(px - qx, py - qy) for (qx, qy) in points] for (px, py) in points]
    opening = [rng.uniform(0.5, 2.0) for _ in range(n_facilities)]
    clients = list(range(n_facilities, n_facilities + n_clients))
    return FacilityInstance(dist, opening, clients)
