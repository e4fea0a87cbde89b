"""End-to-end orchestration shared by the CLI and the tests.

Builds tightened histories from a parsed instance stream, runs the requested
engine, computes the benchmark oracles, and verifies the ledger and the
competitive bound. Results carry everything the CLI needs to write the trace
CSV, the JSON report, and the figures.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import benchmarks
from .benchmarks import (BoundReport, LedgerReport, dynamic_benchmark,
                         dynamic_benchmark_box, static_benchmark,
                         verify_competitive_bound, verify_ledger,
                         verify_ledger_box)
from .box import (BoxRunTrace, BoxState, BoxSuggestionHistory, BoxSuggestionSet,
                  output_box_solution, process_box_constraint)
from .constraints import SparseConstraint, SuggestionHistory, SuggestionSet
from .covering import CoveringState, RunTrace, output_solution, process_constraint
from .errors import BudgetExceeded, SchemaError
from .facility import validate_metric
from .robust import RobustResult, baseline_step, robust_run
from .setcover import RoundingResult, round_setcover_online
from .stream import StreamInstance


@dataclass
class RunResult:
    kind: str
    n: int
    k: int
    m: int
    output_cost: float
    static_cost: float
    static_slot: int
    certificate: object | None
    dynamic_upper_bound: float | None
    ledger: LedgerReport | None
    bound: BoundReport | None
    trace: object
    robust: RobustResult | None = None
    rounding: RoundingResult | None = None
    rounding_ratio: float | None = None

    @property
    def violated(self) -> bool:
        if self.ledger is not None and not self.ledger.passed:
            return True
        if self.bound is not None and self.bound.status == "fail":
            return True
        if self.robust is not None and not self.robust.bound_holds():
            return True
        return False

    def report(self) -> dict:
        rep: dict = {
            "kind": self.kind,
            "n": self.n,
            "k": self.k,
            "m": self.m,
            "output_cost": self.output_cost,
            "static": {"cost": self.static_cost, "slot": self.static_slot},
            "dynamic": None,
            "dynamic_upper_bound": self.dynamic_upper_bound,
            "bound_check": None,
            "ledger_check": None,
        }
        if self.certificate is not None:
            rep["dynamic"] = {"cost": self.certificate.cost,
                              "choices": list(self.certificate.choices)}
        if self.bound is not None:
            rep["bound_check"] = {
                "status": self.bound.status,
                "output_cost": self.bound.output_cost,
                "benchmark_cost": self.bound.benchmark_cost,
                "bound": self.bound.bound,
            }
        if self.ledger is not None:
            rep["ledger_check"] = {
                "passed": self.ledger.passed,
                "phases": self.ledger.phases_checked,
                "worst_margin": self.ledger.worst_margin,
                "phi_initial": self.ledger.phi_initial,
                "failures": list(self.ledger.failures),
            }
        if self.robust is not None:
            rob = self.robust
            rep["robust"] = {
                "output_cost": rob.output_cost,
                "prediction_cost": rob.prediction_cost,
                "baseline_cost": rob.baseline_cost,
                "bound": rob.bound,
                "status": "pass" if rob.bound_holds() else "fail",
            }
        if self.rounding is not None:
            rep["rounding"] = {
                "cost": self.rounding.cost,
                "ratio": self.rounding_ratio,
                "fallback_buys": self.rounding.fallback_buys,
                "bought": list(self.rounding.bought),
            }
        return rep


def build_history(inst: StreamInstance) -> tuple[list[SparseConstraint], SuggestionHistory]:
    constraints = []
    history = SuggestionHistory(inst.n, tuple(inst.costs), inst.k)
    for t, step in enumerate(inst.steps):
        constraint = SparseConstraint(t, tuple(step.constraint))
        suggestions = SuggestionSet.tightened(constraint, step.suggestions)
        constraints.append(constraint)
        history.append(constraint, suggestions)
    return constraints, history


def build_box_history(inst: StreamInstance) -> BoxSuggestionHistory:
    history = BoxSuggestionHistory(inst.n, tuple(inst.costs), inst.k)
    for t, step in enumerate(inst.steps):
        constraint = SparseConstraint(t, tuple(step.constraint))
        d = dict(step.d)
        raw = [(dict(s["x"]), dict(s["y"])) for s in step.suggestions]
        suggestions = BoxSuggestionSet.tightened(constraint, raw)
        history.append(constraint, d, suggestions)
    return history


def run_covering_instance(inst: StreamInstance, *, robust: bool = False,
                          baseline_only: bool = False,
                          budget: int = benchmarks.DEFAULT_BUDGET,
                          rel_tol: float = 1e-6, abs_tol: float = 1e-9,
                          do_round: bool = False, seed: int = 0) -> RunResult:
    if inst.is_box:
        raise SchemaError(f"kind {inst.kind!r} needs the box engine")
    if robust and baseline_only:
        raise SchemaError("--robust and --baseline-only are mutually exclusive")
    constraints, history = build_history(inst)
    costs = tuple(inst.costs)

    robust_result = None
    if robust:
        raw_steps = [(c, step.suggestions) for c, step in zip(constraints, inst.steps)]
        robust_result = robust_run(costs, raw_steps)
        trace: RunTrace = robust_result.meta_trace
        output = robust_result.output
    else:
        state = CoveringState(costs)
        trace = RunTrace(inst.n, costs, k=None if baseline_only else inst.k)
        for constraint, (_, suggestions) in zip(constraints, history.steps):
            if baseline_only:
                baseline_step(state, constraint, trace=trace)
            else:
                process_constraint(state, constraint, suggestions, trace=trace)
        output = output_solution(state)
    output_cost = sum(c * v for c, v in zip(costs, output))

    static_cost, static_slot = static_benchmark(history)
    certificate = None
    upper = None
    try:
        certificate = dynamic_benchmark(history, budget)
    except BudgetExceeded as exc:
        upper = exc.upper_bound

    ledger = None
    bound = None
    if certificate is not None:
        if not baseline_only and not robust:
            ledger = verify_ledger(trace, certificate, rel_tol=rel_tol, abs_tol=abs_tol)
            bound = verify_competitive_bound(output_cost, certificate, inst.k,
                                             rel_tol=rel_tol)

    rounding = None
    ratio = None
    if do_round:
        if inst.kind != "setcover":
            raise SchemaError("--round only applies to setcover instances")
        m_bound = int(inst.extra.get("m_bound", len(inst.steps)))
        memberships = [c.support for c in constraints]
        fractional = [rec.output for rec in trace.steps]
        rounding = round_setcover_online(costs, m_bound, memberships, fractional, seed)
        ratio = rounding.cost / output_cost if output_cost > 0 else None

    return RunResult(inst.kind, inst.n, inst.k, len(inst.steps), output_cost,
                     static_cost, static_slot, certificate, upper, ledger, bound,
                     trace, robust_result, rounding, ratio)


def run_box_instance(inst: StreamInstance, *,
                     budget: int = benchmarks.DEFAULT_BUDGET,
                     rel_tol: float = 1e-6, abs_tol: float = 1e-9) -> RunResult:
    if not inst.is_box:
        raise SchemaError(f"kind {inst.kind!r} needs the covering engine")
    if inst.kind == "facloc" and "dist" in inst.extra:
        validate_metric(inst.extra["dist"])
    history = build_box_history(inst)
    costs = tuple(inst.costs)

    state = BoxState(costs)
    trace = BoxRunTrace(inst.n, costs, k=inst.k)
    for constraint, d, suggestions in history.steps:
        process_box_constraint(state, constraint, d, suggestions, trace=trace)
    y_out, x_out = output_box_solution(state)
    output_cost = sum(c * v for c, v in zip(costs, y_out))
    for st, x_map in zip(state.steps, x_out):
        output_cost += sum(st.d[i] * v for i, v in sorted(x_map.items()))

    static_cost, static_slot = benchmarks._box_static(history)
    certificate = None
    upper = None
    try:
        certificate = dynamic_benchmark_box(history, budget)
    except BudgetExceeded as exc:
        upper = exc.upper_bound

    ledger = None
    bound = None
    if certificate is not None:
        ledger = verify_ledger_box(trace, certificate, rel_tol=rel_tol, abs_tol=abs_tol)
        bound = verify_competitive_bound(output_cost, certificate, inst.k,
                                         rel_tol=rel_tol)

    return RunResult(inst.kind, inst.n, inst.k, len(inst.steps), output_cost,
                     static_cost, static_slot, certificate, upper, ledger, bound, trace)


def run_instance(inst: StreamInstance, **kwargs) -> RunResult:
    if inst.is_box:
        for flag in ("robust", "baseline_only", "do_round"):
            if kwargs.pop(flag, False):
                raise SchemaError(f"{flag} does not apply to {inst.kind} instances")
        kwargs.pop("seed", None)
        return run_box_instance(inst, **kwargs)
    return run_covering_instance(inst, **kwargs)


def trace_csv_rows(result: RunResult) -> list[tuple]:
    """Rows (step, phase, duration, internal_cost_cum, potential, event_kind);
    the potential column stays blank without an exact certificate."""
    rows = []
    cum = 0.0
    cert = result.certificate
    if result.kind in ("box", "facloc"):
        have_potential = cert is not None
        trace = result.trace
        delta = 1.0 / trace.k if trace.k else None
        m = len(trace.steps)
        step_d = [dict(rec.d) for rec in trace.steps]
        for t, rec in enumerate(trace.steps):
            for ph in rec.phases:
                cum += ph.cost_increment
                pot = ""
                if have_potential and delta is not None:
                    xs = [dict(trace.steps[j].x_final) for j in range(t)]
                    xs.append(dict(ph.x_end))
                    xs.extend({} for _ in range(t + 1, m))
                    pot = benchmarks.potential_box(xs, list(cert.x_dyn), step_d,
                                                   ph.y_end, cert.y_dyn,
                                                   trace.facility_costs, delta)
                rows.append((ph.step, ph.phase, ph.duration, cum, pot, ph.event.kind.value))
    else:
        trace = result.trace
        # the potential column is only meaningful for the plain suggestion
        # engine, whose ledger the certificate actually verifies
        have_potential = (cert is not None and trace.k is not None
                          and result.robust is None)
        delta = 1.0 / trace.k if trace.k else None
        for rec in trace.steps:
            for ph in rec.phases:
                cum += ph.cost_increment
                pot = ""
                if have_potential:
                    pot = benchmarks.potential(ph.x_end, cert.x_dyn, trace.costs, delta)
                rows.append((ph.step, ph.phase, ph.duration, cum, pot, ph.event.kind.value))
    return rows
