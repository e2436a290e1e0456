from fractions import Fraction as F

import pytest

from _suite import gadget, game_suite, strategies
from tngames.core import (
    Affine,
    BudgetExceeded,
    Edge,
    Guard,
    ModelError,
    TimedNetwork,
    TimedPath,
    Tng,
    check_legal,
    check_profile,
    cost_of,
    decompose,
    replace_strategy,
)
from tngames.pta import Pta, cor
from tngames.reductions import (
    DONE,
    br_pta,
    eliminate_self_loops,
    embed_self_loops,
    path_from_strategy,
    profile_from_path,
    restore_self_loops,
    so_pta,
    strategy_from_path,
    without_self_loops,
)

S, V1, V2, U1, U2 = range(5)


def others(profile, i):
    return [p for j, p in enumerate(profile) if j != i]


# --------------------------------------------------------------- best response


def test_best_response_automaton_shape(ex1):
    tng, prof = ex1.tng, ex1.profiles["p1"]
    pta, src, tgt, back = br_pta(tng, others(prof, 0), 0)
    assert pta.network.n_clocks == tng.network.n_clocks + 1
    # player 2 alone crosses at 2, 4 and 5: three periods plus the tail
    assert back.copies.periods == ((0, 2), (2, 4), (4, 5))
    assert back.copies.n_copies == 4
    assert pta.network.n_vertices == 4 * 5 + 1
    assert src == back.vertex(S, 0) and tgt == back.target


def test_rates_follow_the_other_players_loads():
    for tng, prof in game_suite(40, seed=21):
        for i in range(tng.k):
            rest = others(prof, i)
            pta, _, _, back = br_pta(tng, rest, i)
            loads = decompose(rest).loads if rest else ()
            for d in range(back.copies.n_copies):
                for v in range(tng.network.n_vertices):
                    load = loads[d][v] if d < len(loads) else 0
                    assert pta.rates[back.vertex(v, d)] == tng.latency(v, load + 1)


def test_single_player_automaton_is_one_copy(ex1):
    tng = Tng(ex1.tng.network, ex1.tng.latencies, ex1.tng.objectives[:1])
    pta, src, tgt, back = br_pta(tng, [], 0)
    assert back.copies.n_copies == 1
    assert pta.rates[: tng.network.n_vertices] == tuple(tng.latency(v, 1) for v in range(5))
    assert cor(pta, src, tgt).price == 4


def test_example_best_response_price(ex1):
    # brute force over every integral deviation pins this at 7, not 10
    tng, prof = ex1.tng, ex1.profiles["p1"]
    pta, src, tgt, back = br_pta(tng, others(prof, 0), 0)
    w = cor(pta, src, tgt)
    assert w.price == 7
    assert strategy_from_path(back, w) == TimedPath.of([(S, 1), (V1, 2)], U1)


def test_the_example_strategy_prices_at_its_cost(ex1):
    tng, prof = ex1.tng, ex1.profiles["p1"]
    pta, _, _, back = br_pta(tng, others(prof, 0), 0)
    embedded = path_from_strategy(back, prof[0])
    assert check_legal(pta.network, embedded)
    assert pta.price_of(embedded) == 10


def test_runs_across_copies_collapse(ex1):
    tng, prof = ex1.tng, ex1.profiles["p1"]
    _, _, _, back = br_pta(tng, others(prof, 0), 0)
    witness = TimedPath.of([(back.vertex(S, 0), 2), (back.vertex(S, 1), 3), (back.vertex(U1, 1), 0)], back.target)
    assert strategy_from_path(back, witness) == TimedPath.of([(S, 5)], U1)


def test_dwelling_in_the_target_copy_is_malformed(ex1):
    tng, prof = ex1.tng, ex1.profiles["p1"]
    _, _, _, back = br_pta(tng, others(prof, 0), 0)
    witness = TimedPath.of([(back.vertex(U1, 0), 1)], back.target)
    with pytest.raises(ModelError):
        strategy_from_path(back, witness)


def test_fractional_fixed_strategies_are_rejected(ex1):
    tng = ex1.tng
    half = TimedPath.of([(S, F(3, 2)), (V1, F(3, 2)), (V2, 1)], U2)
    with pytest.raises(ModelError):
        br_pta(tng, [half], 0)


def test_strategy_and_automaton_paths_correspond():
    for tng, prof in game_suite(40, seed=22):
        for i in range(tng.k):
            rest = others(prof, i)
            pta, src, tgt, back = br_pta(tng, rest, i)
            for strat in strategies(tng, i)[:15]:
                embedded = path_from_strategy(back, strat)
                assert check_legal(pta.network, embedded)
                assert embedded.source == src and embedded.final == tgt
                cost = cost_of(tng, replace_strategy(prof, i, strat)).per_player[i]
                assert pta.price_of(embedded) == cost
                assert strategy_from_path(back, embedded) == strat


def test_witness_round_trip_on_random_games():
    for tng, prof in game_suite(200):
        for i in range(tng.k):
            pta, src, tgt, back = br_pta(tng, others(prof, i), i)
            w = cor(pta, src, tgt)
            strat = strategy_from_path(back, w)
            new = replace_strategy(prof, i, strat)
            check_profile(tng, new)
            assert cost_of(tng, new).per_player[i] == w.price


# --------------------------------------------------------------- self loops


def test_loop_free_network_is_untouched(ex1):
    net, info = eliminate_self_loops(ex1.tng.network)
    assert net is ex1.tng.network and not info.loop_vertices


def test_one_self_loop_changes_the_counts():
    net = TimedNetwork.build(
        ["x"], ["a", "b"], [Edge(0, Guard.of((0, "==", 2)), frozenset({0}), 0), Edge(0, Guard(), frozenset(), 1)]
    )
    out, info = eliminate_self_loops(net)
    assert out.n_vertices == 3 and out.n_clocks == 2 and len(out.edges) == 3
    assert not out.has_self_loops()
    assert info.loop_vertices == {2}


def test_loop_strategies_keep_their_cost():
    for tng, prof in game_suite(60, seed=23):
        if not tng.network.has_self_loops():
            continue
        free, info = without_self_loops(tng)
        moved = tuple(embed_self_loops(p, tng.network, info) for p in prof)
        check_profile(free, moved)
        assert cost_of(free, moved) == cost_of(tng, prof)
        assert tuple(restore_self_loops(p, info) for p in moved) == prof


# --------------------------------------------------------------- social optimum


def test_product_has_one_clock_copy_per_player(ex1):
    pta, s, u, back = so_pta(ex1.tng)
    assert pta.network.n_clocks == ex1.tng.k * ex1.tng.network.n_clocks
    assert back.coords[s] == (S, S)
    assert back.coords[u] == (DONE, DONE)


def test_single_player_product_is_the_game(ex1):
    tng = Tng(ex1.tng.network, ex1.tng.latencies, ex1.tng.objectives[1:])
    pta, s, u, back = so_pta(tng)
    solo = Pta(tng.network, tuple(tng.latency(v, 1) for v in range(5)))
    assert cor(pta, s, u).price == cor(solo, S, U2).price


def test_product_rates_weigh_each_player():
    net = TimedNetwork.build([], ["a", "b"], [Edge(0, Guard(), frozenset(), 1)])
    tng = Tng(net, (Affine(1, 1), Affine(0, 0)), ((0, 1), (0, 1)))
    pta, s, _, _ = so_pta(tng)
    # two players in a: each pays 1*2+1 = 3
    assert pta.rates[s] == 6


def test_product_witness_round_trip():
    for tng, _ in game_suite(200):
        free, info = without_self_loops(tng)
        pta, s, u, back = so_pta(free)
        w = cor(pta, s, u)
        prof = profile_from_path(back, w)
        check_profile(free, prof)
        assert cost_of(free, prof).total == w.price
        restored = tuple(restore_self_loops(p, info) for p in prof)
        check_profile(tng, restored)
        assert cost_of(tng, restored).total == w.price


def test_constant_coordinate_is_one_dwell():
    net = TimedNetwork.build(
        ["x"], ["a", "b", "c"], [Edge(0, Guard.of((0, "==", 3)), frozenset(), 2), Edge(1, Guard.of((0, "==", 1)), frozenset(), 2)]
    )
    tng = Tng(net, (Affine(1, 0), Affine(1, 0), Affine(0, 0)), ((0, 2), (1, 2)))
    pta, s, u, back = so_pta(tng)
    prof = profile_from_path(back, cor(pta, s, u))
    assert prof[0] == TimedPath.of([(0, 3)], 2)
    assert prof[1] == TimedPath.of([(1, 1)], 2)


def test_prime_gadget_players_share_the_paid_vertex():
    inst = gadget("cs-prime", k=2, primes=(2, 3))
    free, info = without_self_loops(inst.tng)
    pta, s, u, back = so_pta(free)
    w = cor(pta, s, u)
    prof = tuple(restore_self_loops(p, info) for p in profile_from_path(back, w))
    v = inst.tng.network.vertex_id("v")
    for p in prof:
        assert p.segments()[-1] == (6, 7, v)


def test_product_refuses_loops_and_oversize(ex1):
    inst = gadget("cs-prime", k=2, primes=(2, 3))
    with pytest.raises(ModelError):
        so_pta(inst.tng)
    with pytest.raises(BudgetExceeded) as info:
        so_pta(ex1.tng, max_states=10)
    assert info.value.report["product_bound"] == 36
