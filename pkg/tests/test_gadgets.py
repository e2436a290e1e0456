import random
from fractions import Fraction as F

import pytest

from _suite import gadget
from tngames.core import ModelError, cost_of
from tngames.equilibria import best_response, is_ne, social_optimum
from tngames.gadgets import FAMILIES, gen, random_pta, random_tng
from tngames.oracle import EnumerationBudget, oracle_so
from tngames.pta import clock_ceilings


def arrival_in(inst, profile, name):
    v = inst.tng.network.vertex_id(name)
    return [next(a for a, _, w in p.segments() if w == v) for p in profile]


@pytest.mark.parametrize("k,primes,sync", [(2, (2, 3), 6), (3, (2, 3, 5), 30)])
def test_prime_gadget_synchronises_at_the_product(k, primes, sync):
    inst = gadget("cs-prime", k=k, primes=primes)
    so = social_optimum(inst.tng)
    assert arrival_in(inst, so.profile, "v") == [sync] * k
    assert so.cost == 1 and so.end_time == sync + 1


def test_prime_gadget_oracle_agrees():
    inst = gadget("cs-prime", k=2, primes=(2, 3))
    assert oracle_so(inst.tng, EnumerationBudget(horizon=12)) == 1


def test_polygon_optimum_is_free():
    inst = gadget("congestion-polygon", k=2, primes=(2, 3))
    so = social_optimum(inst.tng)
    assert so.cost == 0
    assert is_ne(inst.tng, so.profile)


@pytest.mark.parametrize("A,mu,cs,con", [((1, 2), 3, F(1, 2), 1), ((2, 4), 3, 1, 2)])
def test_subset_sum_best_responses(A, mu, cs, con):
    inst = gadget("subset-sum-cs", A=A, mu=mu)
    assert best_response(inst.tng, inst.profiles["unsynced"], 0).cost == cs
    inst = gadget("subset-sum-con", A=A, mu=mu)
    assert best_response(inst.tng, inst.profiles["unsynced"], 0).cost == con


def test_subset_sum_profiles_start_unsynchronised():
    inst = gadget("subset-sum-cs", A=(1, 2), mu=3)
    assert cost_of(inst.tng, inst.profiles["unsynced"]).per_player[0] == 1


def test_gadget_parameter_errors():
    with pytest.raises(ModelError):
        gen("cs-prime", k=3, primes=(2, 3))
    with pytest.raises(ModelError):
        gen("subset-sum-con", A=(1, 2), mu=4)
    with pytest.raises(ModelError):
        gen("nope")


def test_random_games_stay_small():
    rng = random.Random(3)
    for family in FAMILIES:
        for _ in range(30):
            tng = random_tng(rng, family)
            net = tng.network
            assert 1 <= tng.k <= 3 and net.n_vertices <= 4 and net.n_clocks <= 2
            assert net.max_constant() <= 3


def test_random_automata_stay_small():
    rng = random.Random(4)
    for _ in range(50):
        pta, s, u = random_pta(rng)
        assert pta.network.n_vertices <= 3 and pta.network.n_clocks <= 2
        assert all(c <= 3 for c in clock_ceilings(pta.network))
