"""Seeded random instance suites shared by several test modules."""

from __future__ import annotations

import random
from functools import lru_cache

from tngames.gadgets import random_pta, random_tng
from tngames.io import load_instance
from tngames.gadgets import gen
from tngames.oracle import EnumerationBudget, enum_strategies

ORACLE = EnumerationBudget()


def strategies(tng, i, step=1):
    return list(enum_strategies(tng, i, EnumerationBudget(step=step), by_signature=True))


@lru_cache(maxsize=None)
def game_suite(n: int, seed: int = 2024, family: str | None = None, normalized: bool = False):
    """``n`` random games, each with one random integral profile."""
    from tngames.core import normalize

    rng = random.Random(seed)
    out = []
    while len(out) < n:
        tng = random_tng(rng, family)
        if normalized:
            tng, _ = normalize(tng)
        cands = [strategies(tng, i) for i in range(tng.k)]
        if not all(cands):
            continue
        profile = tuple(rng.choice(c) for c in cands)
        out.append((tng, profile))
    return tuple(out)


@lru_cache(maxsize=None)
def pta_suite(n: int, seed: int = 7):
    rng = random.Random(seed)
    return tuple(random_pta(rng) for _ in range(n))


def gadget(name, **params):
    return load_instance(gen(name, **params))


GADGETS = (
    ("example1", {}),
    ("fig2", {}),
    ("cs-prime", {"k": 2, "primes": (2, 3)}),
    ("congestion-polygon", {"k": 2, "primes": (2, 3)}),
    ("subset-sum-cs", {"A": (1, 2), "mu": 3}),
    ("subset-sum-cs", {"A": (2, 4), "mu": 3}),
    ("subset-sum-con", {"A": (1, 2), "mu": 3}),
    ("subset-sum-con", {"A": (2, 4), "mu": 3}),
)

# oracle horizons that cover every optimum of the gadgets above
GADGET_HORIZON = {"cs-prime": 12, "congestion-polygon": 12}


@lru_cache(maxsize=None)
def efficiency_suite(n: int, family: str, seed: int = 10, starts: int = 3):
    """Games with at least two players and a positive optimum, each with random starting profiles."""
    from tngames.equilibria import social_optimum

    rng = random.Random(seed)
    out = []
    while len(out) < n:
        tng = random_tng(rng, family)
        if tng.k < 2:
            continue
        so = social_optimum(tng)
        if so.cost == 0:
            continue
        cands = [strategies(tng, i) for i in range(tng.k)]
        seeds = tuple(tuple(rng.choice(c) for c in cands) for _ in range(starts))
        out.append((tng, so, seeds))
    return tuple(out)
