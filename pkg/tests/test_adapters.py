import random

import pytest

from copredict import (CacheModel, CoveringState, FacilityInstance, MetricError,
                       SuggestionSet, UncoverableElement,
                       output_solution, process_constraint,
                       round_setcover_online, setcover_constraint,
                       validate_metric)
from copredict import facility, setcover
from copredict.facility import client_step

from helpers import run_box_stream


# ---------------------------------------------------------------- set cover

def test_setcover_constraint_transcription():
    c = setcover_constraint([5, 2], 0)
    assert c.coeffs == ((2, 1.0), (5, 1.0))
    single = setcover_constraint([3], 1)
    assert single.coeffs == ((3, 1.0),)
    with pytest.raises(UncoverableElement):
        setcover_constraint([], 2)


def test_rounding_buys_fully_fractional_sets():
    # fractional value 1.0 clears any threshold: bought with probability 1
    weights = [1.0, 1.0]
    for seed in range(20):
        result = round_setcover_online(weights, 5, [[0]], [[1.0, 0.0]], seed)
        assert 0 in result.bought


def test_rounding_all_zero_stream_uses_fallback_only():
    weights = [3.0, 1.0, 2.0]
    memberships = [[0, 1], [2]]
    fractional = [[0.0, 0.0, 0.0]] * 2
    result = round_setcover_online(weights, 10, memberships, fractional, seed=0)
    assert result.fallback_buys == 2
    assert result.bought == [1, 2]  # cheapest containing set each time
    assert result.cost == pytest.approx(3.0)
    assert result.covers(memberships)


def test_rounding_rejects_decreasing_stream():
    with pytest.raises(ValueError):
        round_setcover_online([1.0], 2, [[0], [0]], [[0.5], [0.2]], seed=0)


def test_rounding_monotone_and_covering():
    rng = random.Random(6)
    inst = setcover.random_instance(8, 12, rng)
    # synthetic monotone fractional stream
    frac = []
    cur = [0.0] * 8
    for members in inst.memberships:
        for s in members:
            cur[s] = min(1.0, cur[s] + rng.uniform(0.0, 0.4))
        frac.append(list(cur))
    owned_before = 0
    for seed in range(30):
        result = round_setcover_online(inst.weights, inst.m_bound,
                                       inst.memberships, frac, seed)
        assert result.covers(inst.memberships)
        assert len(set(result.bought)) == len(result.bought)  # never re-bought


# ------------------------------------------------------------------ caching

def test_caching_hand_trace_two_pages():
    model = CacheModel({"p1": 1.0, "p2": 1.0}, cache_size=1)
    assert model.request("p1") is None
    c = model.request("p2")
    # evict p1's first epoch: coefficient 1 on variable 0
    assert c is not None
    assert c.coeffs == ((0, 1.0),)
    assert model.var_names[0] == ("p1", 1)


def test_caching_hand_trace_reopens_epoch():
    model = CacheModel({"p1": 1.0, "p2": 1.0}, cache_size=1)
    model.request("p1")
    model.request("p2")
    c = model.request("p1")
    # p1 moved to epoch 2; the row covers p2's current epoch only
    assert c.coeffs == ((1, 1.0),)
    assert model.var_names[1] == ("p2", 1)
    assert model.var_names[2] == ("p1", 2)


def test_caching_no_constraint_inside_cache_capacity():
    model = CacheModel({"a": 1.0, "b": 1.0, "c": 1.0}, cache_size=3)
    assert model.request("a") is None
    assert model.request("b") is None
    assert model.request("c") is None


def test_caching_rows_reference_current_epochs_and_normalize():
    rng = random.Random(9)
    pages = {f"p{i}": rng.uniform(0.5, 2.0) for i in range(5)}
    model = CacheModel(pages, cache_size=2)
    for _ in range(40):
        page = rng.choice(sorted(pages))
        c = model.request(page)
        if c is None:
            continue
        current = set(model.current_epoch_vars().values())
        overflow = len(model.request_counts) - model.cache_size
        for i, a in c.coeffs:
            assert i in current
            assert a == pytest.approx(1.0 / overflow)
        assert sum(a for _, a in c.coeffs) >= 1.0 - 1e-12


def test_caching_fractional_solution_covers_hand_trace():
    model = CacheModel({"p1": 1.0, "p2": 1.0}, cache_size=1)
    model.request("p1")
    rows = [model.request("p2"), model.request("p1")]
    state = CoveringState(model.var_costs)
    for row, target in zip(rows, ({0: 1.0}, {1: 1.0})):
        ss = SuggestionSet.tightened(row, [target])
        process_constraint(state, row, ss)
    out = output_solution(state)
    for row in rows:
        assert row.value(out) >= 1.0 - 2e-9


# ---------------------------------------------------------- facility location

def test_validate_metric_rejects_bad_inputs():
    with pytest.raises(MetricError):
        validate_metric([[0.0, 1.0], [2.0, 0.0]])  # asymmetric
    with pytest.raises(MetricError):
        validate_metric([[0.0, 5.0, 1.0], [5.0, 0.0, 1.0], [1.0, 1.0, 0.0]])  # triangle
    with pytest.raises(MetricError):
        validate_metric([[0.0, -1.0], [-1.0, 0.0]])
    validate_metric([[0.0, 1.0], [1.0, 0.0]])


def test_facility_instance_checks_costs_and_clients():
    dist = [[0.0, 1.0], [1.0, 0.0]]
    with pytest.raises(ValueError):
        FacilityInstance(dist, [0.0], [1])
    with pytest.raises(ValueError):
        FacilityInstance(dist, [1.0], [5])


def test_colocated_client_rides_the_zero_cost_jump():
    # facility and client at the same point: d = 0
    dist = [[0.0, 0.0], [0.0, 0.0]]
    inst = FacilityInstance(dist, [1.0], [1, 1])
    steps = []
    for t in range(2):
        constraint, d = client_step(inst, t)
        assert d == {0: 0.0}
        steps.append((constraint, d, [({0: 1.0}, {0: 1.0})]))
    state, trace, _ = run_box_stream(inst.opening_costs, steps)
    # first client ties x to y at 0 and grows the pair; second jumps for free
    assert state.y[0] == pytest.approx(0.5, abs=1e-9)
    assert trace.steps[1].phases[0].duration == 0.0
    assert trace.steps[1].phases[0].cost_increment == 0.0


def test_two_facility_oracle_suggestion_bound():
    # opening costs (1, 10); client at distances (1, 0); oracle opens facility 0
    dist = [
        [0.0, 1.0, 1.0],
        [1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
    ]
    inst = FacilityInstance(dist, [1.0, 10.0], [2])
    constraint, d = client_step(inst, 0)
    assert d == {0: 1.0, 1: 0.0}
    steps = [(constraint, d, [({0: 1.0}, {0: 1.0})])]
    state, trace, history = run_box_stream(inst.opening_costs, steps)
    from copredict import dynamic_benchmark_box, verify_competitive_bound
    cert = dynamic_benchmark_box(history)
    out_cost = 2.0 * sum(c * v for c, v in zip(inst.opening_costs, state.y))
    out_cost += 2.0 * sum(d[i] * v for i, v in state.steps[0].x.items())
    report = verify_competitive_bound(out_cost, cert, 1)
    assert report.status == "pass"


def test_lower_bound_rows_are_setcover_rows():
    # the adversarial instance is a unit-cost 0/1 cover: transcribing its
    # membership lists through the set-cover adapter reproduces every row
    from copredict.predictors import gen_lower_bound
    constraints, _, _ = gen_lower_bound(3, 2, seed=5)
    for c in constraints:
        again = setcover_constraint(list(c.support), c.step)
        assert again.coeffs == c.coeffs


def test_distinct_facility_suggestions_spread_aggregate():
    # k suggestions each fully opening a different facility: the aggregate
    # spreads over all of them and the bound still holds against DYNAMIC
    rng = random.Random(23)
    inst = facility.random_instance(3, 3, rng)
    steps = []
    for t in range(3):
        constraint, d = client_step(inst, t)
        raw = [({f: 1.0}, {f: 1.0}) for f in range(3)]
        steps.append((constraint, d, raw))
    state, trace, history = run_box_stream(inst.opening_costs, steps)
    _, _, sugg = history.steps[0]
    assert sugg.aggregate == {0: 1.0, 1: 1.0, 2: 1.0}
    from copredict import dynamic_benchmark_box, verify_competitive_bound
    cert = dynamic_benchmark_box(history)
    out_cost = 2.0 * state.internal_cost
    assert verify_competitive_bound(out_cost, cert, 3).status == "pass"
