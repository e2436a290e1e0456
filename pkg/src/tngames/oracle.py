"""Brute-force ground truth for small instances.

Nothing here reuses the search engine or the period decomposition: strategies
are enumerated explicitly, costs are recomputed by slicing time into
equal-width pieces, and the half-grid PTA optimum is a time-layered dynamic
program.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import product as cartesian
from typing import Iterator, Sequence

from .core import BudgetExceeded, ModelError, TimedNetwork, TimedPath, Tng, Unreachable, check_legal, replace_strategy
from .pta import Pta, clock_ceilings

INF = math.inf


@dataclass(frozen=True)
class EnumerationBudget:
    horizon: Fraction | int | None = None
    max_steps: int | None = None
    max_paths: int = 200_000
    max_nodes: int = 2_000_000
    step: Fraction = Fraction(1)

    def __post_init__(self):
        if self.horizon is not None and self.horizon < 0:
            raise ValueError("horizon must be nonnegative")
        if (self.max_steps is not None and self.max_steps < 0) or self.max_paths <= 0 or self.max_nodes <= 0:
            raise ValueError("budget limits must be positive")
        object.__setattr__(self, "step", Fraction(self.step))
        if self.step <= 0:
            raise ValueError("grid step must be positive")

    def with_horizon(self, h) -> "EnumerationBudget":
        return EnumerationBudget(h, self.max_steps, self.max_paths, self.max_nodes, self.step)


def single_player_horizon(net: TimedNetwork) -> int:
    return net.n_vertices * (net.max_constant() + 2) ** net.n_clocks


# --------------------------------------------------------------------------
# enumeration


def _dwell_window(guard, kappa, room: Fraction):
    lo, hi = Fraction(0), room
    for c in guard.constraints:
        gap = c.bound - kappa[c.clock]
        if c.op.value == "<=":
            hi = min(hi, gap)
        elif c.op.value == ">=":
            lo = max(lo, gap)
        else:
            lo, hi = max(lo, gap), min(hi, gap)
    return lo, hi


def enum_paths(
    net: TimedNetwork, s: int, u: int, budget: EnumerationBudget, by_signature: bool = False
) -> Iterator[TimedPath]:
    """Every legal grid path ``s -> u`` within the budget, earliest-ending first.

    Paths are ordered by (end time, number of steps). Identical vertex/dwell
    sequences realized by parallel edges are reported once.

    With ``by_signature`` only one path per sequence of positive-length stays
    is reported, and partial paths that agree on vertex, valuation, elapsed
    time and that sequence are explored once. Costs depend on nothing else,
    so this keeps every cost attainable while terminating without a step cap.
    """
    H = Fraction(budget.horizon if budget.horizon is not None else single_player_horizon(net))
    step = budget.step
    cap = budget.max_steps
    m = net.n_clocks
    seen: set = set()
    expanded: set = set()
    counter = 0
    heap = [(Fraction(0), 0, counter, s, tuple(Fraction(0) for _ in range(m)), (), ())]
    nodes = yielded = 0
    partial: list[TimedPath] = []
    while heap:
        tau, n, _, v, kappa, steps, sig = heapq.heappop(heap)
        if by_signature:
            node = (v, kappa, tau, sig)
            if node in expanded:
                continue
            expanded.add(node)
        nodes += 1
        if nodes > budget.max_nodes:
            raise BudgetExceeded(f"enumeration visited more than {budget.max_nodes} nodes", {"max_nodes": budget.max_nodes}, partial)
        if v == u:
            key = sig if by_signature else steps
            if key not in seen:
                seen.add(key)
                path = TimedPath(steps, v)
                verdict = check_legal(net, path)
                if not verdict:
                    raise AssertionError(f"enumerated an illegal path: {verdict.reason}")
                yielded += 1
                if yielded > budget.max_paths:
                    raise BudgetExceeded(f"more than {budget.max_paths} paths", {"max_paths": budget.max_paths}, partial)
                partial.append(path)
                yield path
        if cap is not None and n >= cap:
            continue
        for j in net.out_edges[v]:
            e = net.edges[j]
            lo, hi = _dwell_window(e.guard, kappa, H - tau)
            if lo > hi:
                continue
            t = math.ceil(lo / step) * step
            while t <= hi:
                after = tuple(Fraction(0) if x in e.resets else kappa[x] + t for x in range(m))
                nsig = sig + ((v, tau, tau + t),) if t > 0 else sig
                counter += 1
                heapq.heappush(heap, (tau + t, n + 1, counter, e.dst, after, steps + ((v, t),), nsig))
                t += step


def enum_strategies(tng: Tng, i: int, budget: EnumerationBudget, by_signature: bool = False) -> Iterator[TimedPath]:
    s, u = tng.objectives[i]
    return enum_paths(tng.network, s, u, budget, by_signature)


# --------------------------------------------------------------------------
# slicing re-cost


def _slice_width(paths: Sequence[TimedPath]) -> Fraction:
    den = reduce(math.lcm, (t.denominator for p in paths for _, t in p.steps), 1)
    return Fraction(1, den)


def _where(path: TimedPath, mid: Fraction):
    clock = Fraction(0)
    for v, t in path.steps:
        if clock < mid < clock + t:
            return v
        clock += t
    return None


def _slices(paths: Sequence[TimedPath]):
    w = _slice_width(paths)
    end = max((sum((t for _, t in p.steps), Fraction(0)) for p in paths), default=Fraction(0))
    count = int(end / w)
    for q in range(count):
        mid = w * q + w / 2
        yield w, [_where(p, mid) for p in paths]


def slice_costs(tng: Tng, profile: Sequence[TimedPath]) -> tuple[Fraction, ...]:
    """Per-player costs recomputed slice by slice."""
    out = [Fraction(0)] * len(profile)
    for w, where in _slices(profile):
        for i, v in enumerate(where):
            if v is not None:
                out[i] += w * tng.latency(v, where.count(v))
    return tuple(out)


def slice_potential(tng: Tng, profile: Sequence[TimedPath]) -> Fraction:
    total = Fraction(0)
    for w, where in _slices(profile):
        for v in set(where) - {None}:
            total += w * sum((tng.latency(v, j) for j in range(1, where.count(v) + 1)), Fraction(0))
    return total


# --------------------------------------------------------------------------
# best response / social optimum


def _br_budget(tng: Tng, others: Sequence[TimedPath], budget: EnumerationBudget) -> EnumerationBudget:
    if budget.horizon is not None:
        return budget
    t_max = max((p.arrival_time for p in others), default=Fraction(0))
    return budget.with_horizon(single_player_horizon(tng.network) + t_max)


def oracle_br_strategy(tng: Tng, profile: Sequence[TimedPath], i: int, budget: EnumerationBudget | None = None):
    """Cheapest enumerated deviation of player ``i``: ``(cost, strategy)``."""
    budget = _br_budget(tng, [p for j, p in enumerate(profile) if j != i], budget or EnumerationBudget())
    best = None
    for path in enum_strategies(tng, i, budget, by_signature=True):
        c = slice_costs(tng, replace_strategy(profile, i, path))[i]
        if best is None or c < best[0]:
            best = (c, path)
    if best is None:
        raise Unreachable(f"player {i + 1} has no strategy within the enumeration budget")
    return best


def oracle_br(tng: Tng, profile: Sequence[TimedPath], i: int, budget: EnumerationBudget | None = None) -> Fraction:
    return oracle_br_strategy(tng, profile, i, budget)[0]


def _occupancy(path: TimedPath, w: Fraction, slots: int) -> tuple:
    return tuple(_where(path, w * q + w / 2) for q in range(slots))


def oracle_so_profile(tng: Tng, budget: EnumerationBudget | None = None, max_profiles: int = 2_000_000):
    """Cheapest profile over the cartesian product of enumerated strategies."""
    budget = budget or EnumerationBudget()
    per_player: list[list[TimedPath]] = []
    for i in range(tng.k):
        paths = list(enum_strategies(tng, i, budget, by_signature=True))
        if not paths:
            raise Unreachable(f"player {i + 1} has no strategy within the enumeration budget")
        per_player.append(paths)
    size = math.prod(len(p) for p in per_player)
    if size > max_profiles:
        raise BudgetExceeded(f"{size} candidate profiles exceed {max_profiles}", {"profiles": size})
    all_paths = [p for group in per_player for p in group]
    w = _slice_width(all_paths)
    slots = int(max((p.arrival_time for p in all_paths), default=0) / w)
    occ = [[_occupancy(p, w, slots) for p in group] for group in per_player]
    lat = {}

    def price(v, n):
        if (v, n) not in lat:
            lat[v, n] = n * tng.latency(v, n)
        return lat[v, n]

    best = None
    for idx in cartesian(*(range(len(g)) for g in per_player)):
        rows = [occ[i][j] for i, j in enumerate(idx)]
        total = Fraction(0)
        for q in range(slots):
            col = [r[q] for r in rows if r[q] is not None]
            for v in set(col):
                total += price(v, col.count(v))
            if best is not None and total * w >= best[0]:
                break
        total *= w
        if best is None or total < best[0]:
            best = (total, tuple(per_player[i][j] for i, j in enumerate(idx)))
    return best


def oracle_so(tng: Tng, budget: EnumerationBudget | None = None, max_profiles: int = 2_000_000) -> Fraction:
    return oracle_so_profile(tng, budget, max_profiles)[0]


def deviation_scan(tng: Tng, profile: Sequence[TimedPath], budget: EnumerationBudget | None = None):
    """First player with a strictly cheaper enumerated deviation, or ``None``."""
    current = slice_costs(tng, profile)
    for i in range(tng.k):
        c, path = oracle_br_strategy(tng, profile, i, budget)
        if c < current[i]:
            return i, c, path
    return None


# --------------------------------------------------------------------------
# half-grid PTA optimum


def grid_cor(pta: Pta, s: int, u: int, horizon: int | Fraction | None = None, step: Fraction = Fraction(1, 2)) -> Fraction:
    """Cheapest ``s -> u`` path whose dwells are multiples of ``step``, ending by ``horizon``.

    Time-layered dynamic program over clock values measured in grid units and
    clamped just above each clock's largest guard constant.
    """
    net = pta.network
    step = Fraction(step)
    H = Fraction(horizon if horizon is not None else single_player_horizon(net))
    units = 1 / step
    if units.denominator != 1:
        raise ValueError("step must be 1/n")
    units = int(units)
    cap = tuple(c * units + 1 for c in clock_ceilings(net))
    edges = [
        (e.src, e.dst, tuple((c.clock, c.op.value, c.bound * units) for c in e.guard.constraints), e.resets)
        for e in net.edges
    ]
    by_src: dict[int, list] = {}
    for e in edges:
        by_src.setdefault(e[0], []).append(e)

    def ok(checks, val):
        for x, op, b in checks:
            if op == "<=" and not val[x] <= b:
                return False
            if op == ">=" and not val[x] >= b:
                return False
            if op == "==" and val[x] != b:
                return False
        return True

    layer = {(s, tuple(0 for _ in cap)): Fraction(0)}
    best = INF
    for _ in range(int(H / step) + 1):
        work = list(layer)
        while work:
            state = work.pop()
            v, val = state
            p = layer[state]
            for _, dst, checks, resets in by_src.get(v, ()):
                if ok(checks, val):
                    nxt = (dst, tuple(0 if x in resets else c for x, c in enumerate(val)))
                    if p < layer.get(nxt, INF):
                        layer[nxt] = p
                        work.append(nxt)
        for (v, _), p in layer.items():
            if v == u and p < best:
                best = p
        nxt_layer: dict = {}
        for (v, val), p in layer.items():
            moved = (v, tuple(min(c + 1, top) for c, top in zip(val, cap)))
            q = p + pta.rates[v] * step
            if q < nxt_layer.get(moved, INF):
                nxt_layer[moved] = q
        layer = nxt_layer
    if best == INF:
        raise Unreachable("target not reached within the horizon")
    return best


__all__ = [
    "EnumerationBudget",
    "deviation_scan",
    "enum_paths",
    "enum_strategies",
    "grid_cor",
    "oracle_br",
    "oracle_br_strategy",
    "oracle_so",
    "oracle_so_profile",
    "single_player_horizon",
    "slice_costs",
    "slice_potential",
]
