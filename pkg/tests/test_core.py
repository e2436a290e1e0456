from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _suite import game_suite, strategies
from tngames.core import (
    Affine,
    AtomicConstraint,
    Congestion,
    CostSharing,
    Edge,
    Guard,
    ModelError,
    Op,
    TimedNetwork,
    TimedPath,
    Tng,
    as_rational,
    check_legal,
    cost_of,
    decompose,
    eval_guard,
    normalize,
    potential,
    replace_strategy,
)
from tngames.oracle import slice_costs, slice_potential

S, V1, V2, U1, U2 = range(5)


def path(*steps, final):
    return TimedPath.of(steps, final)


# --------------------------------------------------------------- guards


def test_guard_boundary_is_inclusive():
    g = Guard.of((0, ">=", 1), (0, "<=", 2))
    assert eval_guard(g, [2])
    assert eval_guard(g, [1])
    assert not eval_guard(g, [F(5, 2)])


def test_empty_guard_is_true():
    assert eval_guard(Guard(), [])
    assert eval_guard(Guard(), [F(7, 3), 100])


def test_equality_and_lower_bound():
    g = Guard.of((0, "==", 3), (1, ">=", 4))
    assert eval_guard(g, [3, 4])
    assert not eval_guard(g, [3, F(7, 2)])


def test_unknown_clock_is_a_model_error():
    with pytest.raises(ModelError):
        eval_guard(Guard.of((2, "<=", 1)), [0, 0])


def test_guard_rejects_two_equalities_on_one_clock():
    with pytest.raises(ModelError):
        Guard.of((0, "==", 1), (0, "==", 1))


def test_guard_rejects_empty_interval():
    with pytest.raises(ModelError):
        Guard.of((0, ">=", 3), (0, "<=", 2))


@pytest.mark.parametrize("op", ["<", ">"])
def test_strict_operators_are_refused(op):
    with pytest.raises(ModelError, match="strict"):
        Op.parse(op)


def test_negative_bound_refused():
    with pytest.raises(ModelError):
        AtomicConstraint(0, Op.LE, -1)


def test_floats_never_enter():
    with pytest.raises(TypeError):
        as_rational(0.5)
    assert as_rational("3/4") == F(3, 4)


def test_network_checks_references():
    with pytest.raises(ModelError):
        TimedNetwork.build(["x"], ["a"], [Edge(0, Guard(), frozenset({3}), 0)])
    with pytest.raises(ModelError):
        TimedNetwork.build([], ["a", "a"], [])


# --------------------------------------------------------------- legality


def test_example_strategy_is_legal(ex1):
    net = ex1.tng.network
    verdict = check_legal(net, path((S, 2), (V1, 1), final=U1))
    assert verdict
    assert verdict.edges == (0, 1)
    # valuation right before the second edge: x was reset at time 2, y is global
    assert verdict.valuations[1] == (1, 3)


def test_empty_path_is_legal(ex1):
    assert check_legal(ex1.tng.network, TimedPath((), S))


def test_spurious_path_is_illegal(fig2):
    verdict = check_legal(fig2.tng.network, fig2.paths["spurious"])
    assert not verdict
    assert verdict.step == 3
    assert "x==2" in verdict.reason


def test_missing_edge_reported(ex1):
    verdict = check_legal(ex1.tng.network, path((S, 1), final=U1))
    assert not verdict and "no edge" in verdict.reason


def test_first_edge_sequence_and_all_candidates():
    net = TimedNetwork.build(
        ["x"],
        ["a", "b", "c"],
        [
            Edge(0, Guard.of((0, ">=", 1)), frozenset(), 1),
            Edge(0, Guard.of((0, "<=", 5)), frozenset({0}), 1),
            Edge(1, Guard(), frozenset(), 2),
        ],
    )
    p = path((0, 2), (1, 0), final=2)
    verdict = check_legal(net, p, all_candidates=True)
    assert verdict.edges == (0, 2)
    assert set(verdict.candidates) == {(0, 2), (1, 2)}


def test_legality_depends_on_the_edge_choice():
    # only the resetting parallel edge lets the path continue
    net = TimedNetwork.build(
        ["x"],
        ["a", "b", "c"],
        [
            Edge(0, Guard(), frozenset(), 1),
            Edge(0, Guard(), frozenset({0}), 1),
            Edge(1, Guard.of((0, "==", 1)), frozenset(), 2),
        ],
    )
    verdict = check_legal(net, path((0, 3), (1, 1), final=2))
    assert verdict.edges == (1, 2)


# --------------------------------------------------------------- periods and costs


def test_example_decomposition(ex1):
    dec = decompose(ex1.profiles["p1"])
    assert dec.periods == ((0, 2), (2, 3), (3, 4), (4, 5))
    assert dec.load(S, 0) == 2
    assert dec.load(V1, 1) == 2
    assert dec.load(V1, 2) == 1
    assert dec.load(V2, 3) == 1
    assert dec.arrivals == (3, 5)


def test_single_player_periods_are_its_stays(ex1):
    p = path((S, 2), (V1, 1), final=U1)
    assert decompose([p]).periods == ((0, 2), (2, 3))


def test_zero_dwells_leave_no_empty_periods(ex1):
    p = path((0, 1), (1, 0), (2, 0), (1, 2), final=0)
    assert decompose([p]).periods == ((0, 1), (1, 3))


def test_example_costs(ex1):
    costs = cost_of(ex1.tng, ex1.profiles["p1"])
    assert costs.per_player == (10, 14)
    assert costs.total == 24


def test_example_potential(ex1):
    assert potential(ex1.tng, ex1.profiles["p1"]) == 19


def test_zero_latency_costs_nothing():
    net = TimedNetwork.build([], ["a", "b"], [Edge(0, Guard(), frozenset(), 1)])
    tng = Tng(net, (Affine(0, 0), Affine(0, 0)), ((0, 1),))
    assert cost_of(tng, [path((0, F(7, 2)), final=1)]).total == 0


def test_arrived_players_do_not_load_their_target():
    # a arrives in t at time 1; b then stays in t for [1, 2] and is alone there
    net = TimedNetwork.build([], ["a", "t", "z"], [Edge(0, Guard(), frozenset(), 1), Edge(1, Guard(), frozenset(), 2)])
    tng = Tng(net, (Affine(0, 0), Affine(1, 0), Affine(0, 0)), ((0, 1), (0, 2)))
    prof = (path((0, 1), final=1), path((0, 1), (1, 1), final=2))
    assert cost_of(tng, prof).per_player == (0, 1)
    assert decompose(prof).load(1, 1) == 1


def test_single_player_potential_is_cost():
    for tng, prof in game_suite(40, seed=11):
        if tng.k == 1:
            assert potential(tng, prof) == cost_of(tng, prof).total


def test_costs_match_unit_slicing():
    for tng, prof in game_suite(60):
        assert cost_of(tng, prof).per_player == slice_costs(tng, prof)
        assert potential(tng, prof) == slice_potential(tng, prof)


def test_decomposition_matches_unit_slicing():
    for tng, prof in game_suite(40):
        dec = decompose(prof)
        for (a, b), load in zip(dec.periods, dec.loads):
            t = a + F(1, 2) * (b - a)
            where = []
            for p in prof:
                clock, here = F(0), None
                for v, d in p.steps:
                    if clock < t < clock + d:
                        here = v
                    clock += d
                where.append(here)
            assert {v: where.count(v) for v in set(where) - {None}} == dict(load)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 59), st.lists(st.fractions(min_value=0, max_value=8, max_denominator=7), max_size=4))
def test_refinement_leaves_costs_and_potential_unchanged(idx, points):
    tng, prof = game_suite(60)[idx]
    assert cost_of(tng, prof, points) == cost_of(tng, prof)
    assert potential(tng, prof, points) == potential(tng, prof)


def test_cost_sharing_conservation():
    for tng, prof in game_suite(40, seed=5, family="cost-sharing"):
        dec = decompose(prof)
        for (a, b), row in zip(dec.periods, dec.visits):
            for v in set(row) - {None}:
                n = row.count(v)
                assert n * tng.latency(v, n) * (b - a) == tng.latencies[v].c * (b - a)


def test_congestion_prices_never_drop_when_a_player_joins():
    for tng, prof in game_suite(40, seed=6, family="congestion"):
        if tng.k < 2:
            continue
        fewer = prof[:-1]
        cuts = set(decompose(prof).boundaries)
        full, part = decompose(prof, cuts), decompose(fewer, cuts)
        for p, (row, load) in enumerate(zip(part.visits, part.loads)):
            for i, v in enumerate(row):
                if v is not None:
                    q = full.periods.index(part.periods[p])
                    assert tng.latency(v, full.loads[q][v]) >= tng.latency(v, load[v])


def test_potential_identity_on_a_sample():
    for tng, prof in game_suite(30, seed=9):
        for i in range(tng.k):
            for dev in strategies(tng, i)[:5]:
                new = replace_strategy(prof, i, dev)
                lhs = potential(tng, prof) - potential(tng, new)
                rhs = cost_of(tng, prof).per_player[i] - cost_of(tng, new).per_player[i]
                assert lhs == rhs


# --------------------------------------------------------------- normalization


def test_integer_latencies_normalize_to_themselves(ex1):
    tng, lcm = normalize(ex1.tng)
    assert lcm == 1 and tng is ex1.tng


def test_cost_sharing_two_players_has_multiplier_two():
    net = TimedNetwork.build([], ["a", "b"], [Edge(0, Guard(), frozenset(), 1)])
    tng = Tng(net, (CostSharing(1), Affine(0, 0)), ((0, 1), (0, 1)))
    scaled, lcm = normalize(tng)
    assert lcm == 2
    assert scaled.latency(0, 2) == 1


def test_normalization_scales_costs_exactly():
    for tng, prof in game_suite(40, seed=3):
        scaled, lcm = normalize(tng)
        assert cost_of(scaled, prof).per_player == tuple(lcm * c for c in cost_of(tng, prof).per_player)
        for v in range(tng.network.n_vertices):
            for load in range(1, tng.k + 1):
                assert scaled.latency(v, load).denominator == 1


def test_normalized_integral_profiles_have_integer_costs():
    for tng, prof in game_suite(40, seed=4, normalized=True):
        assert all(c.denominator == 1 for c in cost_of(tng, prof).per_player)
        assert potential(tng, prof).denominator == 1


def test_latency_invariants():
    with pytest.raises(ModelError):
        Congestion((2, 1))
    with pytest.raises(ModelError):
        Affine(-1, 0)
    assert CostSharing(3)(2) == F(3, 2)
