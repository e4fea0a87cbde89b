import itertools
import math
import random

import pytest

from copredict import (BoundViolation, BudgetExceeded, DynamicCertificate,
                       RunTrace, SparseConstraint, SuggestionHistory,
                       SuggestionSet, dynamic_benchmark, dynamic_benchmark_box,
                       potential, potential_box, static_benchmark,
                       verify_competitive_bound, verify_ledger)
from copredict.benchmarks import _pot_term

from helpers import random_covering, random_facloc, run_box_stream, run_engine


def _history(costs, constraints, suggestions):
    k = len(suggestions[0]) if suggestions else 1
    h = SuggestionHistory(len(costs), tuple(costs), k)
    for c, raw in zip(constraints, suggestions):
        h.append(c, SuggestionSet.tightened(c, raw))
    return h


def test_static_example():
    c0 = SparseConstraint(0, ((0, 1.0), (1, 1.0)))
    c1 = SparseConstraint(1, ((0, 1.0), (1, 1.0)))
    # expert slot 0: (1,0),(1,0); slot 1: (0,1),(1,0)
    h = _history([1.0, 1.0], [c0, c1], [[{0: 1.0}, {1: 1.0}], [{0: 1.0}, {0: 1.0}]])
    cost, slot = static_benchmark(h)
    assert cost == 1.0 and slot == 0


def test_dynamic_beats_static_example():
    c0 = SparseConstraint(0, ((0, 1.0), (1, 1.0)))
    c1 = SparseConstraint(1, ((0, 1.0), (1, 1.0)))
    # slot 0: (1,0),(0,1); slot 1: (0,1),(1,0)
    h = _history([1.0, 1.0], [c0, c1], [[{0: 1.0}, {1: 1.0}], [{1: 1.0}, {0: 1.0}]])
    static_cost, _ = static_benchmark(h)
    cert = dynamic_benchmark(h)
    assert static_cost == 2.0
    assert cert.cost == 1.0
    assert cert.choices == (0, 1)
    assert cert.x_dyn == (1.0, 0.0)


def test_dynamic_single_step_is_cheapest_suggestion():
    c = SparseConstraint(0, ((0, 1.0), (1, 1.0)))
    h = _history([1.0, 3.0], [c], [[{1: 1.0}, {0: 1.0}]])
    cert = dynamic_benchmark(h)
    assert cert.cost == 1.0 and cert.choices == (1,)


def test_identical_experts_collapse():
    rng = random.Random(0)
    costs, constraints, suggestions = random_covering(rng, k_max=1)
    cloned = [[dict(raw[0]), dict(raw[0]), dict(raw[0])] for raw in suggestions]
    h = _history(costs, constraints, cloned)
    static_cost, _ = static_benchmark(h)
    cert = dynamic_benchmark(h)
    assert cert.cost == static_cost


def test_dynamic_never_exceeds_static_and_matches_at_k1():
    rng = random.Random(21)
    for _ in range(120):
        costs, constraints, suggestions = random_covering(rng, m_max=6)
        h = _history(costs, constraints, suggestions)
        static_cost, _ = static_benchmark(h)
        cert = dynamic_benchmark(h)
        assert cert.cost <= static_cost
        if h.k == 1:
            assert cert.cost == static_cost


def test_dynamic_agrees_with_plain_enumeration():
    rng = random.Random(33)
    for _ in range(40):
        costs, constraints, suggestions = random_covering(rng, n_max=6, m_max=5, k_max=3)
        h = _history(costs, constraints, suggestions)
        cert = dynamic_benchmark(h)
        n, k, m = h.n, h.k, len(h.steps)
        best = math.inf
        for seq in itertools.product(range(k), repeat=m):
            x = [0.0] * n
            for (_, sugg), s in zip(h.steps, seq):
                for i, v in sugg.suggestions[s].items():
                    if v > x[i]:
                        x[i] = v
            cost = sum(h.costs[i] * x[i] for i in range(n))
            if cost < best:
                best = cost
        assert cert.cost == best


def test_budget_exceeded_carries_static_upper_bound():
    rng = random.Random(3)
    costs, constraints, suggestions = random_covering(rng, n_max=5, m_max=5, k_max=3)
    h = _history(costs, constraints, suggestions)
    while h.k ** len(h.steps) <= 1:
        costs, constraints, suggestions = random_covering(rng, n_max=5, m_max=5, k_max=3)
        h = _history(costs, constraints, suggestions)
    static_cost, slot = static_benchmark(h)
    with pytest.raises(BudgetExceeded) as err:
        dynamic_benchmark(h, budget=1)
    assert err.value.upper_bound == static_cost
    assert err.value.slot == slot


def test_certificate_supports_every_constraint():
    rng = random.Random(8)
    for _ in range(60):
        costs, constraints, suggestions = random_covering(rng, m_max=5)
        h = _history(costs, constraints, suggestions)
        cert = dynamic_benchmark(h)
        for constraint, _ in h.steps:
            assert constraint.value(cert.x_dyn) >= 1.0 - 1e-9


def test_potential_direct_substitution():
    assert potential([0.0], (1.0,), (1.0,), 1.0) == pytest.approx(math.log(2.0))


def test_potential_zero_when_caught_up():
    rng = random.Random(2)
    for _ in range(50):
        n = rng.randint(1, 6)
        x = [rng.uniform(0.0, 1.0) for _ in range(n)]
        costs = [rng.uniform(0.1, 2.0) for _ in range(n)]
        assert potential(x, tuple(x), tuple(costs), 0.5) == pytest.approx(0.0, abs=1e-12)


def test_potential_capped_by_log_term():
    rng = random.Random(14)
    for _ in range(300):
        delta = 1.0 / rng.randint(1, 8)
        c = rng.uniform(0.1, 2.0)
        dyn = rng.uniform(0.0, 1.0)
        cur = rng.uniform(0.0, 1.0)
        term = _pot_term(c, dyn, cur, delta)
        assert term <= c * dyn * math.log(1.0 + 1.0 / delta) + 1e-12
        assert term >= 0.0


def test_potential_continuous_at_membership_boundary():
    h = 1e-12
    below = potential([0.3 - h], (0.3,), (1.0,), 0.5)
    above = potential([0.3 + h], (0.3,), (1.0,), 0.5)
    assert abs(below - above) <= 1e-9


def test_verify_ledger_on_single_variable_run():
    c = SparseConstraint(0, ((0, 2.0),))
    ss = SuggestionSet.tightened(c, [{0: 0.5}])
    from copredict import CoveringState, process_constraint
    state = CoveringState([1.0])
    trace = RunTrace(1, (1.0,), k=1)
    process_constraint(state, c, ss, trace=trace)
    h = _history([1.0], [c], [[{0: 0.5}]])
    cert = dynamic_benchmark(h)
    report = verify_ledger(trace, cert)
    assert report.passed
    assert report.worst_margin > 0.0  # strict inequality on this run


def test_verify_ledger_empty_trace():
    trace = RunTrace(2, (1.0, 1.0), k=2)
    cert = DynamicCertificate((), (0.0, 0.0), 0.0)
    report = verify_ledger(trace, cert)
    assert report.passed and report.phases_checked == 0


def test_verify_ledger_random_suite():
    rng = random.Random(55)
    for _ in range(120):
        costs, constraints, suggestions = random_covering(rng, m_max=6)
        _, trace, history = run_engine(costs, constraints, suggestions)
        cert = dynamic_benchmark(history)
        report = verify_ledger(trace, cert)
        assert report.passed, report.failures


def test_bound_example_and_failure_paths():
    cert = DynamicCertificate((0,), (0.5,), 0.5)
    report = verify_competitive_bound(0.5, cert, 1)
    assert report.status == "pass"
    assert report.bound == pytest.approx(6.0 * math.log(2.0) * 0.5)

    report = verify_competitive_bound(100.0, cert, 1)
    assert report.status == "fail"
    with pytest.raises(BoundViolation):
        report.raise_if_failed()

    degenerate = DynamicCertificate((), (0.0,), 0.0)
    assert verify_competitive_bound(0.0, degenerate, 2).status == "not_applicable"


def test_dynamic_box_single_step():
    rng = random.Random(1)
    inst, steps, _ = random_facloc(rng, max_fac=2, max_clients=1, k_max=1)
    _, _, history = run_box_stream(inst.opening_costs, steps)
    cert = dynamic_benchmark_box(history)
    constraint, d, sugg = history.steps[0]
    x, y = sugg.suggestions[0]
    expected = (sum(inst.opening_costs[i] * v for i, v in sorted(y.items()))
                + sum(d[i] * v for i, v in sorted(x.items())))
    assert cert.cost == pytest.approx(expected)


def test_dynamic_box_matches_hand_enumeration():
    rng = random.Random(17)
    for _ in range(25):
        inst, steps, k = random_facloc(rng, max_fac=2, max_clients=2, k_max=2)
        _, _, history = run_box_stream(inst.opening_costs, steps)
        cert = dynamic_benchmark_box(history)
        n = len(inst.opening_costs)
        best = math.inf
        for seq in itertools.product(range(k), repeat=len(history.steps)):
            y = [0.0] * n
            x_costs = []
            for (constraint, d, sugg), s in zip(history.steps, seq):
                x_part, y_part = sugg.suggestions[s]
                x_costs.append(sum(d.get(i, 0.0) * v for i, v in sorted(x_part.items())))
                for i, v in y_part.items():
                    if v > y[i]:
                        y[i] = v
            cost = sum(inst.opening_costs[i] * y[i] for i in range(n))
            for xc in x_costs:
                cost += xc
            if cost < best:
                best = cost
        assert cert.cost == best
        # certificate is box-feasible
        for x_map, (constraint, d, sugg) in zip(cert.x_dyn, history.steps):
            for i, v in x_map.items():
                assert v <= cert.y_dyn[i] + 1e-12


def test_potential_box_zero_and_nonnegative():
    step_x = [{0: 0.3}, {1: 0.2}]
    step_d = [{0: 1.0}, {1: 2.0}]
    y = [0.4, 0.2]
    phi = potential_box(step_x, step_x, step_d, y, tuple(y), (1.0, 1.0), 0.5)
    assert phi == pytest.approx(0.0, abs=1e-12)
    phi2 = potential_box([{0: 0.0}, {1: 0.0}], step_x, step_d, [0.0, 0.0],
                         tuple(y), (1.0, 1.0), 0.5)
    assert phi2 > 0.0


def test_box_initial_potential_capped_by_log_term():
    # from all-zero variables every term carries the full ln(1 + 1/delta) gap,
    # so the starting potential equals ln(k+1) times the benchmark cost
    rng = random.Random(71)
    for _ in range(40):
        inst, steps, k = random_facloc(rng)
        _, trace, history = run_box_stream(inst.opening_costs, steps)
        cert = dynamic_benchmark_box(history)
        m = len(history.steps)
        step_d = [dict(d) for _, d, _ in history.steps]
        phi0 = potential_box([{} for _ in range(m)], list(cert.x_dyn), step_d,
                             [0.0] * history.n, cert.y_dyn,
                             history.facility_costs, 1.0 / k)
        assert phi0 <= math.log(k + 1.0) * cert.cost + 1e-9
