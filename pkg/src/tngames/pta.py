"""Priced timed automata and integral cost-optimal reachability.

The search runs over ``(vertex, abstract valuation)`` states. Each clock keeps
an integer value up to its own ceiling (the largest constant any guard compares
it against); anything larger collapses to ``TOP``, stored as ``ceiling + 1``.
Two moves exist: wait one time unit (price = vertex rate) or cross an edge
(price 0). Integrality of optimal paths makes unit waits complete.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Sequence

from .core import BudgetExceeded, Guard, ModelError, TimedNetwork, TimedPath, Unreachable, as_rational, check_legal

DEFAULT_MAX_STATES = 5_000_000


class _Top:
    def __repr__(self):
        return "TOP"


TOP = _Top()


@dataclass(frozen=True)
class Pta:
    network: TimedNetwork
    rates: tuple[Fraction, ...]

    def __post_init__(self):
        rates = tuple(as_rational(r) for r in self.rates)
        object.__setattr__(self, "rates", rates)
        if len(rates) != self.network.n_vertices:
            raise ModelError(f"expected {self.network.n_vertices} rates, got {len(rates)}")
        if any(r < 0 for r in rates):
            raise ModelError("rates must be nonnegative")

    def price_of(self, path: TimedPath) -> Fraction:
        return sum((self.rates[v] * t for v, t in path.steps), Fraction(0))


@dataclass(frozen=True)
class PricedPath:
    path: TimedPath
    price: Fraction
    end_time: int
    edges: tuple[int, ...] = ()


def max_constant(p: Pta | TimedNetwork) -> int:
    net = p.network if isinstance(p, Pta) else p
    return net.max_constant()


def clock_ceilings(net: TimedNetwork) -> tuple[int, ...]:
    ceil = [0] * net.n_clocks
    for e in net.edges:
        for c in e.guard.constraints:
            ceil[c.clock] = max(ceil[c.clock], c.bound)
    return tuple(ceil)


def abstract_guard_sat(guard: Guard, beta: Sequence, chi: int | Sequence[int]) -> bool:
    """Evaluate ``guard`` on an abstract valuation whose entries are ints or ``TOP``.

    ``chi`` is the saturation ceiling, either one global value or one per clock.
    """
    for c in guard.constraints:
        ceiling = chi if isinstance(chi, int) else chi[c.clock]
        if c.bound > ceiling:
            raise AssertionError(f"guard bound {c.bound} exceeds saturation ceiling {ceiling}")
        b = beta[c.clock]
        if b is TOP or b > ceiling:
            if c.op.value != ">=":
                return False
        elif not c.holds(b):
            return False
    return True


def horizon(p: Pta | TimedNetwork) -> int:
    """``|V| * (chi + 2) ** |C|``: some optimal integral path ends by this time."""
    net = p.network if isinstance(p, Pta) else p
    return net.n_vertices * (net.max_constant() + 2) ** net.n_clocks


class _Expansion:
    """Shared successor generation for both search front-ends."""

    def __init__(self, pta: Pta):
        net = pta.network
        self.net = net
        self.ceil = clock_ceilings(net)
        self.top = tuple(c + 1 for c in self.ceil)
        scale = reduce(math.lcm, (r.denominator for r in pta.rates), 1)
        self.scale = scale
        self.irates = tuple(int(r * scale) for r in pta.rates)
        # per edge: (index, dst, lows, highs, reset mask) with guards unrolled
        self.out: list[list[tuple]] = [[] for _ in net.vertices]
        m = net.n_clocks
        for j, e in enumerate(net.edges):
            checks = tuple((c.clock, c.op.value, c.bound) for c in e.guard.constraints)
            keep = tuple(x not in e.resets for x in range(m))
            self.out[e.src].append((j, e.dst, checks, keep))

    def tick(self, val: tuple) -> tuple:
        return tuple(v + 1 if v < t else t for v, t in zip(val, self.top))

    def edges_from(self, v: int, val: tuple):
        for j, dst, checks, keep in self.out[v]:
            ok = True
            for x, op, b in checks:
                cur = val[x]
                if op == "<=":
                    ok = cur <= b
                elif op == ">=":
                    ok = cur >= b
                else:
                    ok = cur == b
                if not ok:
                    break
            if ok:
                yield j, dst, tuple(c if k else 0 for c, k in zip(val, keep))


def _check_endpoints(pta: Pta, s: int, u: int):
    n = pta.network.n_vertices
    if not (0 <= s < n and 0 <= u < n):
        raise ModelError("source or target is not a vertex of the automaton")


def cor(pta: Pta, s: int, u: int, max_states: int | None = DEFAULT_MAX_STATES) -> PricedPath:
    """Cheapest integral path from ``s`` to ``u``.

    Ties are broken by earlier end time, then by the order in which states were
    discovered (waits before edges, edges in edge-list order).
    """
    _check_endpoints(pta, s, u)
    ex = _Expansion(pta)
    start = (s, tuple(0 for _ in ex.ceil))
    counter = 0
    heap = [(0, 0, counter, start)]
    parent: dict = {start: None}
    best = {start: (0, 0)}
    closed: set = set()
    while heap:
        cost, time, _, state = heapq.heappop(heap)
        if state in closed:
            continue
        closed.add(state)
        if max_states is not None and len(closed) > max_states:
            raise BudgetExceeded(
                f"cost-optimal search exceeded {max_states} states",
                {"max_states": max_states, "vertices": ex.net.n_vertices, "clocks": ex.net.n_clocks},
            )
        v, val = state
        if v == u:
            return _rebuild(pta, ex, parent, state, cost, time)
        moves = [((v, ex.tick(val)), cost + ex.irates[v], time + 1, None)]
        moves.extend(((dst, nval), cost, time, j) for j, dst, nval in ex.edges_from(v, val))
        for nxt, c2, t2, j in moves:
            if nxt in closed:
                continue
            old = best.get(nxt)
            if old is None or (c2, t2) < old:
                best[nxt] = (c2, t2)
                parent[nxt] = (state, j)
                counter += 1
                heapq.heappush(heap, (c2, t2, counter, nxt))
    raise Unreachable(f"{pta.network.vertices[u]!r} is unreachable from {pta.network.vertices[s]!r}")


def _rebuild(pta: Pta, ex: _Expansion, parent: dict, state, cost: int, time: int) -> PricedPath:
    moves = []
    while parent[state] is not None:
        prev, j = parent[state]
        moves.append(j)
        state = prev
    moves.reverse()
    v = state[0]
    steps, edges, dwell = [], [], 0
    for j in moves:
        if j is None:
            dwell += 1
            continue
        steps.append((v, Fraction(dwell)))
        edges.append(j)
        v = pta.network.edges[j].dst
        dwell = 0
    path = TimedPath(tuple(steps), v)
    return PricedPath(path, Fraction(cost, ex.scale), time, tuple(edges))


def cor_price_only(pta: Pta, s: int, u: int, max_states: int | None = DEFAULT_MAX_STATES) -> Fraction:
    """Optimal price without witness bookkeeping (plain Dijkstra on price)."""
    _check_endpoints(pta, s, u)
    ex = _Expansion(pta)
    start = (s, tuple(0 for _ in ex.ceil))
    dist = {start: 0}
    heap = [(0, 0, start)]
    seen = 0
    tie = 0
    while heap:
        cost, _, state = heapq.heappop(heap)
        if cost > dist[state]:
            continue
        v, val = state
        if v == u:
            return Fraction(cost, ex.scale)
        seen += 1
        if max_states is not None and seen > max_states:
            raise BudgetExceeded(f"cost-optimal search exceeded {max_states} states", {"max_states": max_states})
        succ = [((v, ex.tick(val)), cost + ex.irates[v])]
        succ.extend(((dst, nval), cost) for _, dst, nval in ex.edges_from(v, val))
        for nxt, c2 in succ:
            if c2 < dist.get(nxt, math.inf):
                dist[nxt] = c2
                tie += 1
                heapq.heappush(heap, (c2, tie, nxt))
    raise Unreachable(f"{pta.network.vertices[u]!r} is unreachable from {pta.network.vertices[s]!r}")


def reachable(net: TimedNetwork, s: int, u: int, max_states: int | None = DEFAULT_MAX_STATES) -> bool:
    try:
        cor_price_only(Pta(net, (0,) * net.n_vertices), s, u, max_states)
    except Unreachable:
        return False
    return True


def verify_witness(pta: Pta, witness: PricedPath) -> None:
    """Raise if ``witness`` is illegal or mispriced."""
    verdict = check_legal(pta.network, witness.path)
    if not verdict:
        raise AssertionError(f"witness is illegal: {verdict.reason}")
    if pta.price_of(witness.path) != witness.price:
        raise AssertionError("witness price does not match its dwells")


__all__ = [
    "Pta",
    "PricedPath",
    "TOP",
    "abstract_guard_sat",
    "clock_ceilings",
    "cor",
    "cor_price_only",
    "horizon",
    "max_constant",
    "reachable",
    "verify_witness",
]
