"""Fixture generators and random instance families.

``gen`` returns instance documents (plain JSON-compatible dicts, see
``tngames.io``). The random generators return core objects directly and are
tuned so the brute-force oracle stays fast.
"""

from __future__ import annotations

import math
import random
import warnings
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .core import (
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
)
from .pta import Pta, reachable

# --------------------------------------------------------------------------
# document helpers


def _lat(kind: str, **params) -> dict:
    out = {"kind": kind}
    for key, value in params.items():
        out[key] = [str(Fraction(x)) for x in value] if isinstance(value, (list, tuple)) else str(Fraction(value))
    return out


ZERO = _lat("affine", a=0, b=0)


def _g(clock: str, op: str, bound: int) -> dict:
    return {"clock": clock, "op": op, "bound": int(bound)}


def _e(src: str, dst: str, guard=(), resets=()) -> dict:
    return {"src": src, "dst": dst, "guard": list(guard), "resets": list(resets)}


def _strategy(steps, final) -> dict:
    return {"steps": [{"vertex": v, "dwell": str(Fraction(t))} for v, t in steps], "final": final}


def _check_coprime(primes: Sequence[int]):
    for a, b in combinations(primes, 2):
        if math.gcd(a, b) != 1:
            warnings.warn(f"periods {a} and {b} are not coprime; the synchronisation time is their lcm, not the product", stacklevel=4)


# --------------------------------------------------------------------------
# fixtures


def example1() -> dict:
    """Two messages routed from ``s`` with per-router stay limits and arrival windows."""
    window = [_g("x", ">=", 1), _g("x", "<=", 2)]
    return {
        "name": "example1",
        "clocks": ["x", "y"],
        "vertices": [
            {"name": "s", "latency": _lat("affine", a=2, b=0)},
            {"name": "v1", "latency": _lat("affine", a=1, b=0)},
            {"name": "v2", "latency": _lat("affine", a=3, b=0)},
            {"name": "u1", "latency": ZERO},
            {"name": "u2", "latency": ZERO},
        ],
        "edges": [
            _e("s", "v1", window, ["x"]),
            _e("v1", "u1", window + [_g("y", ">=", 3), _g("y", "<=", 4)], ["x"]),
            _e("v1", "v2", window, ["x"]),
            _e("v2", "u2", window + [_g("y", ">=", 4), _g("y", "<=", 5)], ["x"]),
        ],
        "players": [{"source": "s", "target": "u1"}, {"source": "s", "target": "u2"}],
        "profiles": [
            {
                "name": "p1",
                "strategies": [
                    _strategy([("s", 2), ("v1", 1)], "u1"),
                    _strategy([("s", 2), ("v1", 2), ("v2", 1)], "u2"),
                ],
            }
        ],
    }


def fig2() -> dict:
    """Two routes into ``v2``; only the one from ``s2`` arrives with the clock value ``u`` needs."""
    unit = _lat("affine", a=1, b=0)
    return {
        "name": "fig2",
        "clocks": ["x", "y"],
        "vertices": [
            {"name": "s1", "latency": ZERO},
            {"name": "s2", "latency": ZERO},
            {"name": "v1", "latency": unit},
            {"name": "v2", "latency": unit},
            {"name": "u", "latency": ZERO},
        ],
        "edges": [
            _e("s1", "v1"),
            _e("v1", "v2", [_g("x", ">=", 2)], ["x"]),
            _e("s2", "v2"),
            _e("v2", "u", [_g("x", "==", 2), _g("y", "<=", 2)]),
        ],
        "players": [{"source": "s2", "target": "u"}],
        "paths": {
            "spurious": _strategy([("s1", 0), ("v1", 2), ("v2", 0)], "u"),
            "direct": _strategy([("s2", 0), ("v2", 2)], "u"),
        },
    }


def cs_prime(k: int = 2, primes: Sequence[int] = (2, 3)) -> dict:
    """Player ``i`` can enter the shared vertex ``v`` only at multiples of ``primes[i]``."""
    primes = list(primes)[:k]
    if len(primes) != k:
        raise ModelError(f"need {k} periods, got {len(primes)}")
    _check_coprime(primes)
    vertices = [{"name": f"s{i + 1}", "latency": ZERO} for i in range(k)]
    vertices += [{"name": "v", "latency": _lat("cost-sharing", c=1)}, {"name": "u", "latency": ZERO}]
    edges = []
    for i, p in enumerate(primes):
        s = f"s{i + 1}"
        edges.append(_e(s, s, [_g("x", "==", p)], ["x"]))
        edges.append(_e(s, "v", [_g("x", "==", p)], ["x"]))
    edges.append(_e("v", "u", [_g("x", "==", 1)]))
    return {
        "name": f"cs-prime-{k}",
        "clocks": ["x"],
        "vertices": vertices,
        "edges": edges,
        "players": [{"source": f"s{i + 1}", "target": "u"} for i in range(k)],
    }


def congestion_polygon(k: int = 2, primes: Sequence[int] = (2, 3)) -> dict:
    """Players circle a ``k``-gon of congestible vertices; leaving ``s_j`` needs ``x == p_j``."""
    primes = list(primes)[:k]
    if len(primes) != k or k < 2:
        raise ModelError("congestion-polygon needs k >= 2 and k periods")
    _check_coprime(primes)
    table = [0] + [1] * (k - 1)
    vertices = [{"name": f"s{j + 1}", "latency": _lat("congestion", table=table)} for j in range(k)]
    vertices += [{"name": f"u{i + 1}", "latency": ZERO} for i in range(k)]
    edges = []
    for j, p in enumerate(primes):
        s, nxt = f"s{j + 1}", f"s{(j + 1) % k + 1}"
        tick = [_g("x", "==", p)]
        edges.append(_e(s, s, tick, ["x"]))
        edges.append(_e(s, nxt, tick, ["x"]))
        # player (j+2) mod k finishes its tour at s_{j+1}
        edges.append(_e(s, f"u{(j + 1) % k + 1}", tick, ["x"]))
    return {
        "name": f"congestion-polygon-{k}",
        "clocks": ["x"],
        "vertices": vertices,
        "edges": edges,
        "players": [{"source": f"s{i + 1}", "target": f"u{i + 1}"} for i in range(k)],
    }


def _subset_chain(A: Sequence[int]) -> tuple[list, list]:
    n = len(A)
    vertices = [{"name": f"v{i + 1}", "latency": ZERO} for i in range(n + 1)]
    edges = []
    for i, a in enumerate(A):
        src, dst = f"v{i + 1}", f"v{i + 2}"
        edges.append(_e(src, dst, [_g("x", "==", a)], ["x"]))
        edges.append(_e(src, dst, [_g("x", "==", 0)], ["x"]))
    return vertices, edges


def _chain_strategy(A: Sequence[int], chosen: Sequence[bool], final_dwell=1) -> dict:
    steps = [(f"v{i + 1}", a if pick else 0) for i, (a, pick) in enumerate(zip(A, chosen))]
    steps.append((f"v{len(A) + 1}", final_dwell))
    return _strategy(steps, "u")


def subset_sum_cs(A: Sequence[int] = (1, 2), mu: int = 3) -> dict:
    """Player 1 pays 1/2 in ``v_{n+1}`` iff the elements it waits through sum to ``mu``."""
    A = [int(a) for a in A]
    n = len(A)
    vertices, edges = _subset_chain(A)
    last = f"v{n + 1}"
    vertices[-1]["latency"] = _lat("cost-sharing", c=1)
    vertices += [{"name": "u", "latency": ZERO}, {"name": "w2", "latency": ZERO}, {"name": "u2", "latency": ZERO}]
    edges.append(_e(last, "u", [_g("x", "==", 1)]))
    edges.append(_e("w2", last, [_g("x", "==", mu)]))
    edges.append(_e(last, "u2", [_g("x", "==", mu + 1)]))
    p2 = _strategy([("w2", mu), (last, 1)], "u2")
    return {
        "name": "subset-sum-cs",
        "clocks": ["x"],
        "vertices": vertices,
        "edges": edges,
        "players": [{"source": "v1", "target": "u"}, {"source": "w2", "target": "u2"}],
        "profiles": [{"name": "unsynced", "strategies": [_chain_strategy(A, [False] * n), p2]}],
    }


def subset_sum_con(A: Sequence[int] = (1, 2), mu: int = 3) -> dict:
    """Congestion variant: player 1 is alone in ``v_{n+1}`` only during ``[mu, mu+1]``."""
    A = [int(a) for a in A]
    n, total = len(A), sum(A)
    if mu > total:
        raise ModelError("mu must not exceed the sum of A in the congestion variant")
    vertices, edges = _subset_chain(A)
    last = f"v{n + 1}"
    vertices[-1]["latency"] = _lat("affine", a=1, b=0)
    for name in ("u", "w2", "u2", "w3", "u3"):
        vertices.append({"name": name, "latency": ZERO})
    edges.append(_e(last, "u", [_g("x", "==", 1)]))
    edges.append(_e("w2", last, [_g("x", "==", 0)]))
    edges.append(_e(last, "u2", [_g("x", "==", mu)]))
    edges.append(_e("w3", last, [_g("x", "==", mu + 1)]))
    edges.append(_e(last, "u3", [_g("x", "==", total + 1)]))
    p2 = _strategy([("w2", 0), (last, mu)], "u2")
    p3 = _strategy([("w3", mu + 1), (last, total - mu)], "u3")
    return {
        "name": "subset-sum-con",
        "clocks": ["x"],
        "vertices": vertices,
        "edges": edges,
        "players": [
            {"source": "v1", "target": "u"},
            {"source": "w2", "target": "u2"},
            {"source": "w3", "target": "u3"},
        ],
        "profiles": [{"name": "unsynced", "strategies": [_chain_strategy(A, [False] * n), p2, p3]}],
    }


def big_product(k: int = 9, length: int = 6) -> dict:
    """Many players on one unguarded chain: the product automaton is far too large."""
    unit = _lat("affine", a=1, b=0)
    names = [f"c{j}" for j in range(length)]
    return {
        "name": "big-product",
        "clocks": ["x"],
        "vertices": [{"name": v, "latency": unit} for v in names],
        "edges": [_e(a, b, [_g("x", "<=", 1)], ["x"]) for a, b in zip(names, names[1:])],
        "players": [{"source": names[0], "target": names[-1]} for _ in range(k)],
    }


FIXTURES = {
    "example1": example1,
    "fig2": fig2,
    "cs-prime": cs_prime,
    "congestion-polygon": congestion_polygon,
    "subset-sum-cs": subset_sum_cs,
    "subset-sum-con": subset_sum_con,
    "big-product": big_product,
}


def gen(name: str, **params) -> dict:
    """Instance document for a named fixture; ``params`` go to its generator."""
    try:
        builder = FIXTURES[name]
    except KeyError:
        raise ModelError(f"unknown fixture {name!r}; known: {', '.join(FIXTURES)}") from None
    return builder(**params)


# --------------------------------------------------------------------------
# random families


FAMILIES = ("cost-sharing", "affine", "congestion")
_SMALL = [Fraction(x) for x in (0, 1, 2, 3)] + [Fraction(1, 2), Fraction(3, 2)]


def random_latency(rng: random.Random, family: str, k: int):
    if family == "cost-sharing":
        return CostSharing(rng.choice([0, 1, 2, 3, Fraction(1, 2)]))
    if family == "affine":
        return Affine(rng.choice([0, 1, 2, Fraction(1, 2)]), rng.choice([0, 0, 1, 2]))
    if family == "congestion":
        table, cur = [], Fraction(0)
        for _ in range(k):
            cur += rng.choice(_SMALL[:4] + [Fraction(1, 2)])
            table.append(cur)
        return Congestion(tuple(table))
    raise ValueError(f"unknown family {family!r}")


def _random_guard(rng: random.Random, x: int | None, y: int, deadline: int, chi: int) -> Guard:
    atoms = [AtomicConstraint(y, Op.LE, deadline)]
    if x is not None and rng.random() < 0.7:
        op = rng.choice([Op.LE, Op.EQ, Op.GE])
        bound = rng.randint(0 if op is not Op.GE else 1, chi)
        atoms.append(AtomicConstraint(x, op, bound))
        if op is Op.GE and rng.random() < 0.3 and bound < chi:
            atoms.append(AtomicConstraint(x, Op.LE, rng.randint(bound, chi)))
    if rng.random() < 0.2:
        atoms.append(AtomicConstraint(y, Op.GE, rng.randint(1, deadline)))
    return Guard(tuple(atoms))


def random_network(
    rng: random.Random,
    n_vertices: int | None = None,
    two_clocks: bool | None = None,
    chi: int = 3,
    self_loops: bool = True,
) -> TimedNetwork:
    """Small network whose never-reset clock ``y`` caps every path by a deadline."""
    n = n_vertices or rng.randint(2, 4)
    two = rng.random() < 0.7 if two_clocks is None else two_clocks
    deadline = rng.randint(2, min(3, chi))
    clocks = ["y", "x"] if two else ["y"]
    y, x = 0, (1 if two else None)
    edges = []
    for _ in range(rng.randint(n, n + 3)):
        a = rng.randrange(n)
        b = rng.randrange(n)
        if a == b and (not self_loops or rng.random() < 0.6):
            b = (a + 1) % n
        resets = frozenset({x}) if x is not None and rng.random() < 0.5 else frozenset()
        edges.append(Edge(a, _random_guard(rng, x, y, deadline, chi), resets, b))
    return TimedNetwork.build(clocks, [f"n{j}" for j in range(n)], edges)


def random_tng(
    rng: random.Random,
    family: str | None = None,
    k: int | None = None,
    n_vertices: int | None = None,
    self_loops: bool = True,
    attempts: int = 200,
) -> Tng:
    """Random small game in which every player has at least one strategy."""
    family = family or rng.choice(FAMILIES)
    for _ in range(attempts):
        kk = k or rng.randint(1, 3)
        net = random_network(rng, n_vertices, self_loops=self_loops)
        n = net.n_vertices
        objectives = []
        for _ in range(kk):
            pairs = [(s, u) for s in range(n) for u in range(n) if s != u and reachable(net, s, u)]
            if not pairs:
                break
            objectives.append(rng.choice(pairs))
        if len(objectives) != kk:
            continue
        lats = tuple(random_latency(rng, family, kk) for _ in range(n))
        return Tng(net, lats, tuple(objectives))
    raise RuntimeError("could not sample a game in which every player has a strategy")


def random_pta(rng: random.Random, attempts: int = 200) -> tuple[Pta, int, int]:
    """Random automaton with at most 3 vertices, 2 clocks and constants up to 3."""
    for _ in range(attempts):
        n = rng.randint(1, 3)
        m = rng.randint(0, 2)
        edges = []
        for _ in range(rng.randint(1, 5)):
            atoms = []
            used_eq = set()
            for x in range(m):
                if rng.random() < 0.6:
                    op = rng.choice([Op.LE, Op.EQ, Op.GE])
                    if op is Op.EQ:
                        if x in used_eq:
                            continue
                        used_eq.add(x)
                    atoms.append(AtomicConstraint(x, op, rng.randint(0, 3)))
            try:
                guard = Guard(tuple(atoms))
            except ModelError:
                continue
            resets = frozenset(x for x in range(m) if rng.random() < 0.4)
            edges.append(Edge(rng.randrange(n), guard, resets, rng.randrange(n)))
        net = TimedNetwork.build([f"x{j}" for j in range(m)], [f"q{j}" for j in range(n)], edges)
        rates = tuple(rng.choice(_SMALL) for _ in range(n))
        s, u = rng.randrange(n), rng.randrange(n)
        if reachable(net, s, u):
            return Pta(net, rates), s, u
    raise RuntimeError("could not sample a PTA with a reachable target")


def random_profile(tng: Tng, rng: random.Random, candidates: Sequence[Sequence[TimedPath]]) -> tuple[TimedPath, ...]:
    return tuple(rng.choice(list(c)) for c in candidates)


__all__ = [
    "FAMILIES",
    "FIXTURES",
    "big_product",
    "congestion_polygon",
    "cs_prime",
    "example1",
    "fig2",
    "gen",
    "random_latency",
    "random_network",
    "random_profile",
    "random_pta",
    "random_tng",
    "subset_sum_con",
    "subset_sum_cs",
]
