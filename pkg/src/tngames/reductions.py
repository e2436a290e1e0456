"""Reductions from timed network games to priced timed automata.

``br_pta`` turns a best-response question into a single-source PTA query by
copying the network once per period of the other players' profile and adding
one never-reset clock that tracks global time. ``so_pta`` builds the product
automaton whose cheapest path is a social optimum.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as cartesian
from typing import Sequence

from .core import (
    AtomicConstraint,
    BudgetExceeded,
    Edge,
    Guard,
    ModelError,
    Op,
    TimedNetwork,
    TimedPath,
    Tng,
    ZERO_LATENCY,
    check_legal,
    decompose,
)
from .pta import PricedPath, Pta

DEFAULT_PRODUCT_BUDGET = 10**7
DONE = -1


# --------------------------------------------------------------------------
# best response


@dataclass(frozen=True)
class IntervalCopyIndex:
    """Periods of the fixed players plus the unbounded tail ``[t_max, inf)``."""

    periods: tuple[tuple[Fraction, Fraction], ...]

    @property
    def t_max(self) -> Fraction:
        return self.periods[-1][1] if self.periods else Fraction(0)

    @property
    def n_copies(self) -> int:
        return len(self.periods) + 1

    def tau(self, d: int) -> Fraction | None:
        """Right end of copy ``d``; ``None`` for the unbounded last copy."""
        return self.periods[d][1] if d < len(self.periods) else None

    def interval(self, d: int) -> tuple[Fraction, Fraction | None]:
        if d < len(self.periods):
            return self.periods[d]
        return (self.t_max, None)


@dataclass(frozen=True)
class BrBackMap:
    tng: Tng
    player: int
    copies: IntervalCopyIndex
    n: int  # vertices of the original network
    target: int  # the extra sink of the PTA
    global_clock: int

    def split(self, w: int) -> tuple[int, int]:
        """PTA vertex -> (network vertex, copy index)."""
        return w % self.n, w // self.n

    def vertex(self, v: int, d: int) -> int:
        return d * self.n + v


def br_pta(tng: Tng, others: Sequence[TimedPath], player: int) -> tuple[Pta, int, int, BrBackMap]:
    """PTA whose cheapest ``src -> tgt`` path prices a best response of ``player``.

    ``others`` are the fixed strategies of every other player, in player order
    with ``player`` left out. Returns ``(pta, src, tgt, back_map)``.
    """
    if not 0 <= player < tng.k:
        raise ModelError(f"player index {player} out of range")
    if len(others) != tng.k - 1:
        raise ModelError(f"expected {tng.k - 1} fixed strategies, got {len(others)}")
    if not all(p.is_integral() for p in others):
        raise ModelError("best responses are only computed against integral strategies")
    net = tng.network
    n, nc = net.n_vertices, net.n_clocks
    if others:
        dec = decompose(others)
        periods, loads = dec.periods, dec.loads
    else:
        periods, loads = (), ()
    copies = IntervalCopyIndex(periods)
    m = len(periods)
    z = nc
    target = (m + 1) * n
    src_i, dst_i = tng.objectives[player]

    vertices = [f"{name}@{d}" for d in range(m + 1) for name in net.vertices] + ["target*"]
    rates: list[Fraction] = []
    for d in range(m + 1):
        for v in range(n):
            load = loads[d][v] if d < m else 0
            rates.append(tng.latency(v, load + 1))
    rates.append(Fraction(0))

    edges: list[Edge] = []
    for d in range(m + 1):
        base = d * n
        for e in net.edges:
            edges.append(Edge(base + e.src, e.guard, e.resets, base + e.dst))
        if d < m:
            tau = int(copies.tau(d))
            g = Guard((AtomicConstraint(z, Op.EQ, tau),))
            for v in range(n):
                edges.append(Edge(base + v, g, frozenset(), base + n + v))
            tg = Guard((AtomicConstraint(z, Op.LE, tau),))
        else:
            tg = Guard((AtomicConstraint(z, Op.GE, int(copies.t_max)),))
        edges.append(Edge(base + dst_i, tg, frozenset(), target))

    clock_names = [c.name for c in net.clocks] + ["global*"]
    pnet = TimedNetwork.build(clock_names, vertices, edges)
    back = BrBackMap(tng, player, copies, n, target, z)
    return Pta(pnet, tuple(rates)), src_i, target, back


def strategy_from_path(back: BrBackMap, witness: PricedPath | TimedPath) -> TimedPath:
    """Collapse a BR-automaton path into a strategy of the deviating player."""
    path = witness.path if isinstance(witness, PricedPath) else witness
    if path.final != back.target or not path.steps:
        raise ModelError("witness does not end in the target of the best-response automaton")
    runs: list[list] = []  # [vertex, dwell, copy]
    for w, t in path.steps:
        if w == back.target:
            raise ModelError("witness passes through the target before its end")
        v, d = back.split(w)
        if runs and runs[-1][0] == v and d == runs[-1][2] + 1:
            runs[-1][1] += t
            runs[-1][2] = d
        else:
            if runs and d != runs[-1][2]:
                raise ModelError("witness changes interval copy along an internal edge")
            runs.append([v, t, d])
    last_v, last_t, _ = runs[-1]
    if last_v != back.tng.objectives[back.player][1]:
        raise ModelError("witness leaves the player's target copy into the sink from a wrong vertex")
    if last_t != 0:
        raise ModelError("witness dwells in the target before finishing")
    return TimedPath(tuple((v, t) for v, t, _ in runs[:-1]), last_v)


def path_from_strategy(back: BrBackMap, strategy: TimedPath) -> TimedPath:
    """Embed a strategy of the deviating player into the BR automaton."""
    copies = back.copies
    m = copies.n_copies - 1
    d, now = 0, Fraction(0)
    steps: list[tuple[int, Fraction]] = []

    def advance(v: int, until: Fraction):
        nonlocal d, now
        while d < m and copies.tau(d) <= until:
            steps.append((back.vertex(v, d), copies.tau(d) - now))
            now = copies.tau(d)
            d += 1
        steps.append((back.vertex(v, d), until - now))
        now = until

    for v, t in strategy.steps:
        advance(v, now + t)
    advance(strategy.final, now)
    return TimedPath(tuple(steps), back.target)


# --------------------------------------------------------------------------
# self-loop elimination


@dataclass(frozen=True)
class LoopInfo:
    original_vertices: int
    loop_vertices: frozenset[int]
    detour: tuple[tuple[int, int], ...] = ()  # (original loop edge, detour vertex)


def eliminate_self_loops(net: TimedNetwork) -> tuple[TimedNetwork, LoopInfo]:
    """Replace each self-loop by a detour through a fresh vertex left at once."""
    if not net.has_self_loops():
        return net, LoopInfo(net.n_vertices, frozenset())
    vertices = list(net.vertices)
    clocks = [c.name for c in net.clocks]
    edges: list[Edge] = []
    back_edges: list[Edge] = []
    loop_vertices = set()
    detour = []
    for j, e in enumerate(net.edges):
        if e.src != e.dst:
            edges.append(e)
            continue
        x = len(clocks)
        clocks.append(f"loop{j}*")
        w = len(vertices)
        vertices.append(f"{net.vertices[e.src]}~{j}*")
        loop_vertices.add(w)
        detour.append((j, w))
        edges.append(Edge(e.src, e.guard, e.resets | {x}, w))
        back_edges.append(Edge(w, Guard((AtomicConstraint(x, Op.EQ, 0),)), frozenset(), e.src))
    out = TimedNetwork.build(clocks, vertices, edges + back_edges)
    return out, LoopInfo(net.n_vertices, frozenset(loop_vertices), tuple(detour))


def without_self_loops(tng: Tng) -> tuple[Tng, LoopInfo]:
    net, info = eliminate_self_loops(tng.network)
    if not info.loop_vertices:
        return tng, info
    lat = tng.latencies + (ZERO_LATENCY,) * len(info.loop_vertices)
    return Tng(net, lat, tng.objectives), info


def restore_self_loops(path: TimedPath, info: LoopInfo) -> TimedPath:
    steps = []
    for v, t in path.steps:
        if v in info.loop_vertices:
            if t != 0:
                raise ModelError("detour vertex must be left immediately")
            continue
        steps.append((v, t))
    return TimedPath(tuple(steps), path.final)


def embed_self_loops(path: TimedPath, original: TimedNetwork, info: LoopInfo) -> TimedPath:
    """Map a strategy of the looped network onto the loop-free one."""
    if not info.loop_vertices:
        return path
    verdict = check_legal(original, path)
    if not verdict:
        raise ModelError(f"cannot embed an illegal path: {verdict.reason}")
    detour = dict(info.detour)
    steps = []
    for (v, t), j in zip(path.steps, verdict.edges):
        steps.append((v, t))
        if j in detour:
            steps.append((detour[j], Fraction(0)))
    return TimedPath(tuple(steps), path.final)


# --------------------------------------------------------------------------
# social optimum


@dataclass(frozen=True)
class SoBackMap:
    tng: Tng
    coords: tuple[tuple[int, ...], ...]  # product vertex -> coordinate tuple
    movers: tuple[frozenset[int], ...]  # product edge -> moving players


def _product_rate(tng: Tng, coords: tuple[int, ...]) -> Fraction:
    loads: dict[int, int] = {}
    for v in coords:
        if v != DONE:
            loads[v] = loads.get(v, 0) + 1
    return sum((n * tng.latency(v, n) for v, n in loads.items()), Fraction(0))


def so_pta(tng: Tng, max_states: int | None = DEFAULT_PRODUCT_BUDGET) -> tuple[Pta, int, int, SoBackMap]:
    """Product automaton over player coordinates; its cheapest path is a social optimum.

    Each coordinate holds a vertex or ``DONE`` (the player has arrived and no
    longer loads the network). Several players may move in one product edge.
    Only product vertices structurally reachable from the start are built.
    """
    net = tng.network
    if net.has_self_loops():
        raise ModelError("so_pta needs a loop-free network; apply eliminate_self_loops first")
    k, nc = tng.k, net.n_clocks
    bound = (net.n_vertices + 1) ** k
    if max_states is not None and bound > max_states:
        raise BudgetExceeded(
            f"product automaton may reach {bound} vertices, above the budget of {max_states}",
            {"players": k, "vertices": net.n_vertices, "clocks": k * nc, "product_bound": bound, "max_states": max_states},
        )
    start =tuple(DONE if s == u else s for s, u in tng.objectives)
    goal = tuple(DONE for _ in range(k))

    def options(i: int, v: int):
        if v == DONE:
            return
        for j in net.out_edges[v]:
            e = net.edges[j]
            yield j, e.dst
            if e.dst == tng.objectives[i][1]:
                yield j, DONE

    index = {start: 0}
    order = [start]
    raw_edges: list[tuple[int, tuple, int, frozenset]] = []
    frontier = 0
    while frontier < len(order):
        cur = order[frontier]
        frontier += 1
        per_player = [[(None, cur[i])] + list(options(i, cur[i])) for i in range(k)]
        for choice in cartesian(*per_player):
            moved = frozenset(i for i, (j, _) in enumerate(choice) if j is not None)
            if not moved:
                continue
            nxt = tuple(c for _, c in choice)
            if nxt not in index:
                if max_states is not None and len(order) >= max_states:
                    raise BudgetExceeded(
                        f"product automaton exceeds {max_states} vertices",
                        {
                            "players": k,
                            "vertices": net.n_vertices,
                            "clocks": k * nc,
                            "product_bound": (net.n_vertices + 1) ** k,
                            "max_states": max_states,
                        },
                    )
                index[nxt] = len(order)
                order.append(nxt)
            raw_edges.append((index[cur], tuple(j for j, _ in choice), index[nxt], moved))
    if goal not in index:
        index[goal] = len(order)
        order.append(goal)

    edges: list[Edge] = []
    movers: list[frozenset[int]] = []
    for src, picks, dst, moved in raw_edges:
        atoms: list[AtomicConstraint] = []
        resets: set[int] = set()
        for i, j in enumerate(picks):
            if j is None:
                continue
            e = net.edges[j]
            off = i * nc
            atoms.extend(AtomicConstraint(c.clock + off, c.op, c.bound) for c in e.guard.constraints)
            resets.update(x + off for x in e.resets)
        edges.append(Edge(src, Guard(tuple(atoms)), frozenset(resets), dst))
        movers.append(moved)

    names = []
    for coords in order:
        names.append("(" + ",".join("done" if v == DONE else net.vertices[v] for v in coords) + ")")
    clocks = [f"{c.name}#{i + 1}" for i in range(k) for c in net.clocks]
    rates = tuple(_product_rate(tng, c) for c in order)
    pnet = TimedNetwork.build(clocks, names, edges)
    back = SoBackMap(tng, tuple(order), tuple(movers))
    return Pta(pnet, rates), index[start], index[goal], back


def profile_from_path(back: SoBackMap, witness: PricedPath | TimedPath) -> tuple[TimedPath, ...]:
    """Project a product path onto one strategy per player."""
    path = witness.path if isinstance(witness, PricedPath) else witness
    tng = back.tng
    k = tng.k
    steps: list[list[tuple[int, Fraction]]] = [[] for _ in range(k)]
    dwell = [Fraction(0)] * k
    finals: list[int | None] = [None] * k
    verts = path.vertices
    if any(c != DONE for c in back.coords[verts[-1]]):
        raise ModelError("witness does not end with every player done")
    for i in range(k):
        if back.coords[verts[0]][i] == DONE:
            finals[i] = tng.objectives[i][0]
    for j, (w, t) in enumerate(path.steps):
        here, there = back.coords[w], back.coords[verts[j + 1]]
        for i in range(k):
            if here[i] == DONE:
                continue
            dwell[i] += t
            if there[i] != here[i]:
                steps[i].append((here[i], dwell[i]))
                dwell[i] = Fraction(0)
                if there[i] == DONE:
                    finals[i] = tng.objectives[i][1]
    return tuple(TimedPath(tuple(steps[i]), finals[i]) for i in range(k))


__all__ = [
    "BrBackMap",
    "DONE",
    "IntervalCopyIndex",
    "LoopInfo",
    "SoBackMap",
    "br_pta",
    "eliminate_self_loops",
    "embed_self_loops",
    "path_from_strategy",
    "profile_from_path",
    "restore_self_loops",
    "so_pta",
    "strategy_from_path",
    "without_self_loops",
]
