"""Benchmark oracles, potential functions, and trace verifiers.

The oracles are exact at desk scale: STATIC scans the k expert slots,
DYNAMIC enumerates the k^m per-step choice sequences depth-first with a
monotone lower-bound prune. Leaf costs are recomputed non-incrementally so
the pruned search returns bit-identical minima to a plain enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .box import BoxRunTrace, BoxSuggestionHistory
from .constraints import SuggestionHistory
from .covering import RunTrace
from .errors import BoundViolation, BudgetExceeded, LedgerViolation

DEFAULT_BUDGET = 10_000_000


@dataclass(frozen=True)
class DynamicCertificate:
    """The optimal per-step choices, the vector they support, and its cost."""

    choices: tuple[int, ...]
    x_dyn: tuple[float, ...]
    cost: float


@dataclass(frozen=True)
class BoxDynamicCertificate:
    choices: tuple[int, ...]
    y_dyn: tuple[float, ...]
    x_dyn: tuple[dict[int, float], ...]
    cost: float


def static_benchmark(history: SuggestionHistory) -> tuple[float, int]:
    """Cheapest pointwise-max solution of a single expert slot: (cost, slot)."""
    n, costs = history.n, history.costs
    best_cost, best_slot = math.inf, 0
    for s in range(history.k):
        x = [0.0] * n
        for _, sugg in history.steps:
            for i, v in sugg.suggestions[s].items():
                if v > x[i]:
                    x[i] = v
        cost = sum(costs[i] * x[i] for i in range(n))
        if cost < best_cost:
            best_cost, best_slot = cost, s
    return best_cost, best_slot


def dynamic_benchmark(history: SuggestionHistory,
                      budget: int = DEFAULT_BUDGET) -> DynamicCertificate:
    """Exact DYNAMIC oracle: the cheapest vector dominating one suggestion in
    every step.

    Raises BudgetExceeded (carrying the STATIC value as a certified upper
    bound) when k^m exceeds the enumeration budget.
    """
    m = len(history.steps)
    k = history.k
    if k ** m > budget:
        static_cost, slot = static_benchmark(history)
        raise BudgetExceeded(k ** m, budget, static_cost, slot)

    n, costs = history.n, history.costs
    step_suggs = [[sorted(sugg.suggestions[s].items()) for s in range(k)]
                  for _, sugg in history.steps]
    cur = [0.0] * n
    choice = [0] * m
    best_cost = math.inf
    best_choices: tuple[int, ...] = ()
    best_x: tuple[float, ...] = tuple(cur)

    def dfs(t: int, partial: float) -> None:
        nonlocal best_cost, best_choices, best_x
        # partial accumulates the same telescoping increments as the exact
        # cost, so a small slack keeps the prune safe against roundoff
        if partial > best_cost + 1e-9 * max(1.0, abs(best_cost)):
            return
        if t == m:
            exact = sum(costs[i] * cur[i] for i in range(n))
            if exact < best_cost:
                best_cost = exact
                best_choices = tuple(choice)
                best_x = tuple(cur)
            return
        for s in range(k):
            undo = []
            inc = 0.0
            for i, v in step_suggs[t][s]:
                if v > cur[i]:
                    undo.append((i, cur[i]))
                    inc += costs[i] * (v - cur[i])
                    cur[i] = v
            choice[t] = s
            dfs(t + 1, partial + inc)
            for i, old in undo:
                cur[i] = old

    dfs(0, 0.0)
    return DynamicCertificate(best_choices, best_x, best_cost)


def dynamic_benchmark_box(history: BoxSuggestionHistory,
                          budget: int = DEFAULT_BUDGET) -> BoxDynamicCertificate:
    """DYNAMIC oracle for the box engine.

    Per choice sequence, y_dyn is the pointwise max of the chosen facility
    suggestions and each step keeps its chosen assignment; the cost is
    sum(c_i y_dyn_i) + sum_j sum_i d_ij x_dyn_ij.
    """
    m = len(history.steps)
    k = history.k
    if k ** m > budget:
        upper, slot = _box_static(history)
        raise BudgetExceeded(k ** m, budget, upper, slot)

    n = history.n
    costs = history.facility_costs
    # assignment cost of suggestion s at step t is a constant
    x_cost = []
    step_data = []
    for constraint, d, sugg in history.steps:
        per_slot_cost = []
        per_slot = []
        for s in range(k):
            x_part, y_part = sugg.suggestions[s]
            per_slot_cost.append(sum(d.get(i, 0.0) * v for i, v in sorted(x_part.items())))
            per_slot.append((dict(x_part), sorted(y_part.items())))
        x_cost.append(per_slot_cost)
        step_data.append(per_slot)

    y_cur = [0.0] * n
    choice = [0] * m
    best_cost = math.inf
    best_choices: tuple[int, ...] = ()
    best_y: tuple[float, ...] = tuple(y_cur)
    best_x: tuple[dict[int, float], ...] = ()

    def leaf_cost() -> float:
        total = sum(costs[i] * y_cur[i] for i in range(n))
        for t in range(m):
            total += x_cost[t][choice[t]]
        return total

    def dfs(t: int, partial: float) -> None:
        nonlocal best_cost, best_choices, best_y, best_x
        if partial > best_cost + 1e-9 * max(1.0, abs(best_cost)):
            return
        if t == m:
            exact = leaf_cost()
            if exact < best_cost:
                best_cost = exact
                best_choices = tuple(choice)
                best_y = tuple(y_cur)
                best_x = tuple(dict(step_data[j][choice[j]][0]) for j in range(m))
            return
        for s in range(k):
            undo = []
            inc = x_cost[t][s]
            for i, v in step_data[t][s][1]:
                if v > y_cur[i]:
                    undo.append((i, y_cur[i]))
                    inc += costs[i] * (v - y_cur[i])
                    y_cur[i] = v
            choice[t] = s
            dfs(t + 1, partial + inc)
            for i, old in undo:
                y_cur[i] = old

    dfs(0, 0.0)
    return BoxDynamicCertificate(best_choices, best_y, best_x, best_cost)


def _box_static(history: BoxSuggestionHistory) -> tuple[float, int]:
    """Best constant-slot cost; certified upper bound for the box DYNAMIC."""
    n, costs = history.n, history.facility_costs
    best_cost, best_slot = math.inf, 0
    for s in range(history.k):
        y = [0.0] * n
        total_x = 0.0
        for constraint, d, sugg in history.steps:
            x_part, y_part = sugg.suggestions[s]
            total_x += sum(d.get(i, 0.0) * v for i, v in sorted(x_part.items()))
            for i, v in y_part.items():
                if v > y[i]:
                    y[i] = v
        cost = sum(costs[i] * y[i] for i in range(n)) + total_x
        if cost < best_cost:
            best_cost, best_slot = cost, s
    return best_cost, best_slot


def _pot_term(weight: float, dyn: float, cur: float, delta: float) -> float:
    if dyn <= 0.0 or dyn < cur:
        return 0.0
    return weight * dyn * math.log((1.0 + delta) * dyn / (cur + delta * dyn))


def potential(x, x_dyn, costs, delta: float) -> float:
    """Logarithmic-gap potential against a benchmark vector.

    Sums c_i * x_dyn_i * ln((1+delta) x_dyn_i / (x_i + delta x_dyn_i)) over
    the indices where the benchmark still dominates; terms with x_dyn_i = 0
    contribute nothing, and a term vanishes continuously as x_i crosses
    x_dyn_i.
    """
    return sum(_pot_term(costs[i], x_dyn[i], x[i], delta) for i in range(len(costs)))


def potential_box(step_x, step_x_dyn, step_d, y, y_dyn, facility_costs,
                  delta: float) -> float:
    """Box-engine potential: per-assignment terms weighted by d_ij plus
    facility terms weighted by c_i, with the same domination rule."""
    phi = 0.0
    for x_cur, x_dyn_j, d in zip(step_x, step_x_dyn, step_d):
        for i, dyn in sorted(x_dyn_j.items()):
            phi += _pot_term(d.get(i, 0.0), dyn, x_cur.get(i, 0.0), delta)
    for i in range(len(facility_costs)):
        phi += _pot_term(facility_costs[i], y_dyn[i], y[i], delta)
    return phi


@dataclass
class LedgerReport:
    passed: bool
    phases_checked: int
    worst_margin: float
    phi_initial: float
    total_cost: float
    failures: tuple[str, ...]

    def raise_if_failed(self) -> None:
        if not self.passed:
            raise LedgerViolation(self.failures[0])


def verify_ledger(trace: RunTrace, certificate: DynamicCertificate,
                  rel_tol: float = 1e-6, abs_tol: float = 1e-9) -> LedgerReport:
    """Check the cost-vs-potential ledger of a covering trace.

    With the benchmark vector fixed to the certificate's final values, every
    phase must satisfy cost increment <= 3 * potential drop, the potential
    must stay nonnegative at phase boundaries, and the whole run must cost at
    most 3 times the starting potential.
    """
    if trace.k is None:
        raise ValueError("trace has no suggestion count; the ledger needs delta = 1/k")
    delta = 1.0 / trace.k
    x_dyn, costs = certificate.x_dyn, trace.costs
    failures: list[str] = []
    worst = math.inf
    checked = 0
    prev_end: tuple[float, ...] | None = None

    phi_initial = potential([0.0] * trace.n, x_dyn, costs, delta)
    for rec in trace.steps:
        for ph in rec.phases:
            if prev_end is not None and ph.x_start != prev_end:
                failures.append(
                    f"step {ph.step} phase {ph.phase}: start state does not chain "
                    "from the previous phase"
                )
            prev_end = ph.x_end
            phi_before = potential(ph.x_start, x_dyn, costs, delta)
            phi_after = potential(ph.x_end, x_dyn, costs, delta)
            if phi_before < -1e-12 or phi_after < -1e-12:
                failures.append(f"step {ph.step} phase {ph.phase}: negative potential")
            drop = phi_before - phi_after
            margin = 3.0 * drop - ph.cost_increment
            tol = abs_tol + rel_tol * max(abs(ph.cost_increment), abs(3.0 * drop))
            worst = min(worst, margin)
            checked += 1
            if margin < -tol:
                failures.append(
                    f"step {ph.step} phase {ph.phase}: cost increment "
                    f"{ph.cost_increment:.12g} exceeds 3x potential drop {3.0 * drop:.12g}"
                )
    total = trace.total_cost
    tol_total = abs_tol + rel_tol * max(abs(total), abs(3.0 * phi_initial))
    if total > 3.0 * phi_initial + tol_total:
        failures.append(
            f"total internal cost {total} exceeds 3x initial potential {3.0 * phi_initial}"
        )
    if not math.isfinite(worst):
        worst = 0.0
    return LedgerReport(not failures, checked, worst, phi_initial, total, tuple(failures))


def verify_ledger_box(trace: BoxRunTrace, certificate: BoxDynamicCertificate,
                      rel_tol: float = 1e-6, abs_tol: float = 1e-9) -> LedgerReport:
    """Box analogue of verify_ledger.

    Assignment variables of steps not yet arrived count as 0, so their
    potential terms are constants that cancel inside every phase difference.
    """
    if trace.k is None:
        raise ValueError("trace has no suggestion count; the ledger needs delta = 1/k")
    delta = 1.0 / trace.k
    m = len(trace.steps)
    costs = trace.facility_costs
    step_d = [dict(rec.d) for rec in trace.steps]
    x_dyn = list(certificate.x_dyn)
    y_dyn = certificate.y_dyn

    def phi(step_idx, x_now, y_now):
        xs = [dict(trace.steps[t].x_final) for t in range(step_idx)]
        xs.append(x_now)
        xs.extend({} for _ in range(step_idx + 1, m))
        return potential_box(xs, x_dyn, step_d, y_now, y_dyn, costs, delta)

    failures: list[str] = []
    worst = math.inf
    checked = 0
    phi_initial = potential_box([{} for _ in range(m)], x_dyn, step_d,
                                [0.0] * trace.n, y_dyn, costs, delta)
    for t, rec in enumerate(trace.steps):
        for ph in rec.phases:
            phi_before = phi(t, dict(ph.x_start), ph.y_start)
            phi_after = phi(t, dict(ph.x_end), ph.y_end)
            if phi_before < -1e-12 or phi_after < -1e-12:
                failures.append(f"step {ph.step} phase {ph.phase}: negative potential")
            drop = phi_before - phi_after
            margin = 3.0 * drop - ph.cost_increment
            tol = abs_tol + rel_tol * max(abs(ph.cost_increment), abs(3.0 * drop))
            worst = min(worst, margin)
            checked += 1
            if margin < -tol:
                failures.append(
                    f"step {ph.step} phase {ph.phase}: cost increment "
                    f"{ph.cost_increment:.12g} exceeds 3x potential drop {3.0 * drop:.12g}"
                )
    total = trace.total_cost
    tol_total = abs_tol + rel_tol * max(abs(total), abs(3.0 * phi_initial))
    if total > 3.0 * phi_initial + tol_total:
        failures.append(
            f"total internal cost {total} exceeds 3x initial potential {3.0 * phi_initial}"
        )
    if not math.isfinite(worst):
        worst = 0.0
    return LedgerReport(not failures, checked, worst, phi_initial, total, tuple(failures))


@dataclass
class BoundReport:
    status: str  # "pass" | "fail" | "not_applicable"
    output_cost: float
    benchmark_cost: float
    bound: float | None

    @property
    def passed(self) -> bool:
        return self.status != "fail"

    def raise_if_failed(self) -> None:
        if self.status == "fail":
            raise BoundViolation(
                f"output cost {self.output_cost} exceeds bound {self.bound} "
                f"(benchmark {self.benchmark_cost})"
            )


def verify_competitive_bound(output_cost: float, certificate, k: int,
                             rel_tol: float = 1e-6) -> BoundReport:
    """Check output cost <= 6 ln(k+1) * DYNAMIC.

    The constant assembles the 3/2 cost rate, the 1/2 potential-drop rate,
    the ln(1 + 1/delta) potential cap, and the final doubling. A zero-cost
    benchmark makes the ratio meaningless and reports not_applicable.
    """
    benchmark = certificate.cost
    if benchmark <= 0.0:
        return BoundReport("not_applicable", output_cost, benchmark, None)
    bound = 6.0 * math.log(k + 1.0) * benchmark
    ok = output_cost <= bound * (1.0 + rel_tol)
    return BoundReport("pass" if ok else "fail", output_cost, benchmark, bound)
