"""Timed networks, timed network games and their exact cost semantics.

Times, costs and potentials are ``fractions.Fraction`` throughout; nothing in
this module touches floating point.
"""

from __future__ import annotations

import enum
import math
from bisect import bisect_right
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from typing import Iterable, Mapping, NamedTuple, Sequence, Union

Rational = Union[int, Fraction, str]


class ModelError(ValueError):
    """An instance, path or profile violates the model's rules."""


class Unreachable(ModelError):
    """No timed path connects the requested vertices."""


class BudgetExceeded(RuntimeError):
    """A size or enumeration budget was exhausted.

    ``report`` carries the sizes that triggered the refusal; ``partial`` holds
    whatever was produced before the budget ran out (enumerations only).
    """

    def __init__(self, message: str, report: dict | None = None, partial=None):
        super().__init__(message)
        self.report = dict(report or {})
        self.partial = partial


def as_rational(value: Rational) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"refusing inexact value {value!r}; pass int, Fraction or 'p/q'")
    return Fraction(value)


# --------------------------------------------------------------------------
# clocks, guards, networks


@dataclass(frozen=True)
class Clock:
    id: int
    name: str


class Op(enum.Enum):
    LE = "<="
    EQ = "=="
    GE = ">="

    @classmethod
    def parse(cls, text: str) -> "Op":
        for op in cls:
            if op.value == text:
                return op
        if text == "=":
            return cls.EQ
        if text in ("<", ">"):
            raise ModelError(
                f"strict guard operator {text!r} is not supported: only <=, == and >= "
                "are allowed (strict guards need epsilon-equilibria, which are out of scope)"
            )
        raise ModelError(f"unknown guard operator {text!r}")


@dataclass(frozen=True)
class AtomicConstraint:
    clock: int
    op: Op
    bound: int

    def __post_init__(self):
        if isinstance(self.bound, bool) or not isinstance(self.bound, int) or self.bound < 0:
            raise ModelError(f"guard bound must be a natural number, got {self.bound!r}")

    def holds(self, value) -> bool:
        if self.op is Op.LE:
            return value <= self.bound
        if self.op is Op.GE:
            return value >= self.bound
        return value == self.bound


@dataclass(frozen=True)
class Guard:
    """Conjunction of non-strict clock constraints; the empty guard is ``true``."""

    constraints: tuple[AtomicConstraint, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        lo: dict[int, int] = {}
        hi: dict[int, float] = {}
        eqs: set[int] = set()
        for c in self.constraints:
            if c.op is Op.EQ:
                if c.clock in eqs:
                    raise ModelError(f"guard has two equality constraints on clock {c.clock}")
                eqs.add(c.clock)
            if c.op in (Op.GE, Op.EQ):
                lo[c.clock] = max(lo.get(c.clock, 0), c.bound)
            if c.op in (Op.LE, Op.EQ):
                hi[c.clock] = min(hi.get(c.clock, math.inf), c.bound)
        for clock, low in lo.items():
            if low > hi.get(clock, math.inf):
                raise ModelError(f"guard is unsatisfiable on clock {clock}: {self}")

    @classmethod
    def of(cls, *triples: tuple[int, str, int]) -> "Guard":
        return cls(tuple(AtomicConstraint(c, Op.parse(op), b) for c, op, b in triples))

    @property
    def clocks(self) -> set[int]:
        return {c.clock for c in self.constraints}

    def max_bound(self) -> int:
        return max((c.bound for c in self.constraints), default=0)

    def __str__(self):
        if not self.constraints:
            return "true"
        return " & ".join(f"c{c.clock}{c.op.value}{c.bound}" for c in self.constraints)


TRUE = Guard()


def eval_guard(guard: Guard, valuation: Sequence | Mapping) -> bool:
    """Whether the clock valuation satisfies every constraint of ``guard``."""
    for c in guard.constraints:
        try:
            value = valuation[c.clock]
        except (IndexError, KeyError):
            raise ModelError(f"valuation has no value for clock {c.clock}") from None
        if not c.holds(value):
            return False
    return True


@dataclass(frozen=True)
class Edge:
    src: int
    guard: Guard
    resets: frozenset[int]
    dst: int

    def __post_init__(self):
        object.__setattr__(self, "resets", frozenset(self.resets))


@dataclass(frozen=True)
class TimedNetwork:
    clocks: tuple[Clock, ...]
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "clocks", tuple(self.clocks))
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        if [c.id for c in self.clocks] != list(range(len(self.clocks))):
            raise ModelError("clock ids must be dense 0..|C|-1")
        if len(set(self.vertices)) != len(self.vertices):
            raise ModelError("vertex names must be unique")
        n, m = len(self.vertices), len(self.clocks)
        for j, e in enumerate(self.edges):
            if not (0 <= e.src < n and 0 <= e.dst < n):
                raise ModelError(f"edge {j} refers to an unknown vertex")
            if any(not 0 <= x < m for x in e.resets | e.guard.clocks):
                raise ModelError(f"edge {j} refers to an unknown clock")

    @classmethod
    def build(cls, clock_names: Iterable[str], vertex_names: Iterable[str], edges: Iterable[Edge]):
        return cls(tuple(Clock(i, n) for i, n in enumerate(clock_names)), tuple(vertex_names), tuple(edges))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_clocks(self) -> int:
        return len(self.clocks)

    @cached_property
    def out_edges(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in self.vertices]
        for j, e in enumerate(self.edges):
            out[e.src].append(j)
        return tuple(tuple(x) for x in out)

    def vertex_id(self, name: str) -> int:
        try:
            return self.vertices.index(name)
        except ValueError:
            raise ModelError(f"unknown vertex {name!r}") from None

    def clock_id(self, name: str) -> int:
        for c in self.clocks:
            if c.name == name:
                return c.id
        raise ModelError(f"unknown clock {name!r}")

    def max_constant(self) -> int:
        return max((e.guard.max_bound() for e in self.edges), default=0)

    def has_self_loops(self) -> bool:
        return any(e.src == e.dst for e in self.edges)


# --------------------------------------------------------------------------
# latency functions


@dataclass(frozen=True)
class CostSharing:
    """``c / load``: the players in a vertex split its per-unit cost."""

    c: Fraction

    def __post_init__(self):
        object.__setattr__(self, "c", as_rational(self.c))
        if self.c < 0:
            raise ModelError("cost-sharing cost must be nonnegative")

    def __call__(self, load: int) -> Fraction:
        return self.c / load

    def scaled(self, factor) -> "CostSharing":
        return CostSharing(self.c * factor)


@dataclass(frozen=True)
class Congestion:
    """Explicit non-decreasing table; ``table[l - 1]`` is the price at load ``l``."""

    table: tuple[Fraction, ...]

    def __post_init__(self):
        table = tuple(as_rational(x) for x in self.table)
        object.__setattr__(self, "table", table)
        if not table:
            raise ModelError("congestion table must not be empty")
        if table[0] < 0 or any(b < a for a, b in zip(table, table[1:])):
            raise ModelError("congestion table must be nonnegative and non-decreasing")

    def __call__(self, load: int) -> Fraction:
        return self.table[load - 1]

    def scaled(self, factor) -> "Congestion":
        return Congestion(tuple(x * factor for x in self.table))


@dataclass(frozen=True)
class Affine:
    """``a * load + b`` with ``a, b >= 0``."""

    a: Fraction
    b: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "a", as_rational(self.a))
        object.__setattr__(self, "b", as_rational(self.b))
        if self.a < 0 or self.b < 0:
            raise ModelError("affine coefficients must be nonnegative")

    def __call__(self, load: int) -> Fraction:
        return self.a * load + self.b

    def scaled(self, factor) -> "Affine":
        return Affine(self.a * factor, self.b * factor)


LatencyFunction = Union[CostSharing, Congestion, Affine]
ZERO_LATENCY = Affine(0, 0)


# --------------------------------------------------------------------------
# games, paths, profiles


@dataclass(frozen=True)
class Tng:
    network: TimedNetwork
    latencies: tuple[LatencyFunction, ...]
    objectives: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "latencies", tuple(self.latencies))
        object.__setattr__(self, "objectives", tuple(tuple(o) for o in self.objectives))
        n = self.network.n_vertices
        if len(self.latencies) != n:
            raise ModelError(f"expected {n} latency functions, got {len(self.latencies)}")
        if not self.objectives:
            raise ModelError("a game needs at least one player")
        for i, (s, u) in enumerate(self.objectives):
            if not (0 <= s < n and 0 <= u < n):
                raise ModelError(f"player {i + 1} has an unknown source or target")
        for v, lat in enumerate(self.latencies):
            if isinstance(lat, Congestion) and len(lat.table) < self.k:
                raise ModelError(
                    f"latency table of {self.network.vertices[v]!r} covers loads up to "
                    f"{len(lat.table)} but the game has {self.k} players"
                )

    @property
    def k(self) -> int:
        return len(self.objectives)

    def latency(self, v: int, load: int) -> Fraction:
        return Fraction(self.latencies[v](load))


@dataclass(frozen=True)
class TimedPath:
    """``(v_0, t_0), ..., (v_{n-1}, t_{n-1}), v_n``: dwell ``t_j`` in ``v_j``, then cross."""

    steps: tuple[tuple[int, Fraction], ...]
    final: int

    def __post_init__(self):
        steps = tuple((int(v), as_rational(t)) for v, t in self.steps)
        if any(t < 0 for _, t in steps):
            raise ModelError("dwell times must be nonnegative")
        object.__setattr__(self, "steps", steps)

    @classmethod
    def of(cls, steps: Iterable[tuple[int, Rational]], final: int) -> "TimedPath":
        return cls(tuple(steps), final)

    @property
    def source(self) -> int:
        return self.steps[0][0] if self.steps else self.final

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.steps) + (self.final,)

    @property
    def crossing_times(self) -> tuple[Fraction, ...]:
        out, tau = [], Fraction(0)
        for _, t in self.steps:
            tau += t
            out.append(tau)
        return tuple(out)

    @property
    def arrival_time(self) -> Fraction:
        return sum((t for _, t in self.steps), Fraction(0))

    def is_integral(self) -> bool:
        return all(t.denominator == 1 for _, t in self.steps)

    def segments(self) -> list[tuple[Fraction, Fraction, int]]:
        """Positive-length stays as ``(start, end, vertex)``."""
        out, tau = [], Fraction(0)
        for v, t in self.steps:
            if t > 0:
                out.append((tau, tau + t, v))
            tau += t
        return out


Profile = tuple  # one TimedPath per player


def replace_strategy(profile: Sequence[TimedPath], i: int, path: TimedPath) -> tuple:
    out = list(profile)
    out[i] = path
    return tuple(out)


# --------------------------------------------------------------------------
# legality


@dataclass(frozen=True)
class Legality:
    legal: bool
    edges: tuple[int, ...] = ()
    valuations: tuple[tuple[Fraction, ...], ...] = ()
    step: int | None = None
    reason: str = ""
    candidates: tuple[tuple[int, ...], ...] = ()

    def __bool__(self):
        return self.legal


def check_legal(net: TimedNetwork, path: TimedPath, all_candidates: bool = False) -> Legality:
    """Decide legality of a timed path and return the witnessing edge sequence.

    ``valuations[j - 1]`` is the valuation right before edge ``e_j`` is crossed.
    Among several realizing edge sequences the first in edge-list order is
    returned; ``all_candidates=True`` also collects every one of them.
    """
    n = net.n_vertices
    for v in path.vertices:
        if not 0 <= v < n:
            raise ModelError(f"path visits unknown vertex id {v}")
    verts = path.vertices
    dwells = [t for _, t in path.steps]
    m = net.n_clocks
    if not path.steps:
        return Legality(True, candidates=((),) if all_candidates else ())

    failure = {"step": 0, "reason": ""}
    found: list[tuple[tuple[int, ...], tuple]] = []
    dead: set = set()

    def note(j: int, reason: str):
        if j > failure["step"] or not failure["reason"]:
            failure.update(step=j, reason=reason)

    def search(j: int, before: tuple, chosen: list, vals: list) -> bool:
        # j: 1-based index of the next edge; before: valuation on entering v_{j-1}
        if j > len(dwells):
            found.append((tuple(chosen), tuple(vals)))
            return not all_candidates
        key = (j, before)
        if key in dead and not all_candidates:
            return False
        kappa = tuple(x + dwells[j - 1] for x in before)
        src, dst = verts[j - 1], verts[j]
        candidates = [ei for ei in net.out_edges[src] if net.edges[ei].dst == dst]
        if not candidates:
            note(j, f"no edge from {net.vertices[src]!r} to {net.vertices[dst]!r}")
        for ei in candidates:
            e = net.edges[ei]
            if not eval_guard(e.guard, kappa):
                note(j, f"guard {_guard_text(net, e.guard)} of edge {ei} fails under valuation {_fmt(net, kappa)}")
                continue
            after = tuple(Fraction(0) if x in e.resets else kappa[x] for x in range(m))
            chosen.append(ei)
            vals.append(kappa)
            if search(j + 1, after, chosen, vals):
                return True
            chosen.pop()
            vals.pop()
        dead.add(key)
        return False

    search(1, tuple(Fraction(0) for _ in range(m)), [], [])
    if found:
        edges, vals = found[0]
        return Legality(True, edges, vals, candidates=tuple(f[0] for f in found) if all_candidates else ())
    return Legality(False, step=failure["step"], reason=failure["reason"])


def _fmt(net: TimedNetwork, vals) -> str:
    return "(" + ", ".join(f"{c.name}={v}" for c, v in zip(net.clocks, vals)) + ")"


def _guard_text(net: TimedNetwork, guard: Guard) -> str:
    if not guard.constraints:
        return "true"
    return " & ".join(f"{net.clocks[c.clock].name}{c.op.value}{c.bound}" for c in guard.constraints)


def check_profile(tng: Tng, profile: Sequence[TimedPath]) -> None:
    """Raise ``ModelError`` unless ``profile`` is a legal profile of ``tng``."""
    if len(profile) != tng.k:
        raise ModelError(f"profile has {len(profile)} strategies for {tng.k} players")
    for i, (path, (s, u)) in enumerate(zip(profile, tng.objectives)):
        if path.source != s or path.final != u:
            raise ModelError(f"strategy of player {i + 1} does not lead from its source to its target")
        verdict = check_legal(tng.network, path)
        if not verdict:
            raise ModelError(f"strategy of player {i + 1} is illegal at step {verdict.step}: {verdict.reason}")


# --------------------------------------------------------------------------
# periods, loads, costs


@dataclass(frozen=True)
class PeriodDecomposition:
    boundaries: tuple[Fraction, ...]
    periods: tuple[tuple[Fraction, Fraction], ...]
    visits: tuple[tuple[int | None, ...], ...]  # visits[p][i]; None once player i has arrived
    loads: tuple[Counter, ...]
    arrivals: tuple[Fraction, ...]

    def load(self, v: int, p: int) -> int:
        return self.loads[p][v]


def decompose(paths: Sequence[TimedPath], extra_points: Iterable[Rational] = ()) -> PeriodDecomposition:
    """Coarsest partition of ``[0, t_max]`` in which nobody crosses an edge.

    A player counts toward loads only while travelling: after reaching its
    target it is absent from every vertex. ``extra_points`` refines the
    partition further (costs and potentials are invariant under refinement).
    """
    points = {Fraction(0)}
    for p in paths:
        points.update(p.crossing_times)
    t_max = max(points)
    points.update(x for x in map(as_rational, extra_points) if 0 <= x <= t_max)
    bounds = tuple(sorted(points))
    periods = tuple(zip(bounds, bounds[1:]))
    segs = [p.segments() for p in paths]
    starts = [[s for s, _, _ in sg] for sg in segs]
    visits, loads = [], []
    for a, b in periods:
        row = []
        for sg, st in zip(segs, starts):
            j = bisect_right(st, a) - 1
            row.append(sg[j][2] if j >= 0 and sg[j][1] >= b else None)
        visits.append(tuple(row))
        loads.append(Counter(v for v in row if v is not None))
    return PeriodDecomposition(bounds, periods, tuple(visits), tuple(loads), tuple(p.arrival_time for p in paths))


class Costs(NamedTuple):
    per_player: tuple[Fraction, ...]
    total: Fraction


def cost_of(tng: Tng, profile: Sequence[TimedPath], extra_points: Iterable[Rational] = ()) -> Costs:
    dec = decompose(profile, extra_points)
    per = [Fraction(0)] * len(profile)
    for (a, b), row, load in zip(dec.periods, dec.visits, dec.loads):
        for i, v in enumerate(row):
            if v is not None:
                per[i] += tng.latency(v, load[v]) * (b - a)
    return Costs(tuple(per), sum(per, Fraction(0)))


def potential(tng: Tng, profile: Sequence[TimedPath], extra_points: Iterable[Rational] = ()) -> Fraction:
    """Rosenthal-style potential summed over periods and vertices."""
    dec = decompose(profile, extra_points)
    total = Fraction(0)
    for (a, b), load in zip(dec.periods, dec.loads):
        for v, n in load.items():
            total += (b - a) * sum((tng.latency(v, j) for j in range(1, n + 1)), Fraction(0))
    return total


# --------------------------------------------------------------------------
# normalization


def latency_lcm(tng: Tng) -> int:
    dens = [tng.latency(v, l).denominator for v in range(tng.network.n_vertices) for l in range(1, tng.k + 1)]
    return reduce(math.lcm, dens, 1)


def normalize(tng: Tng) -> tuple[Tng, int]:
    """Scale latencies by the lcm of their denominators so every value is a natural number."""
    lcm = latency_lcm(tng)
    if lcm == 1:
        return tng, 1
    scaled = tuple(lat.scaled(lcm) for lat in tng.latencies)
    return Tng(tng.network, scaled, tng.objectives), lcm


def with_player_removed(tng: Tng, i: int) -> Tng:
    return Tng(tng.network, tng.latencies, tng.objectives[:i] + tng.objectives[i + 1 :])


__all__ = [
    "Affine",
    "AtomicConstraint",
    "BudgetExceeded",
    "Clock",
    "Congestion",
    "CostSharing",
    "Costs",
    "Edge",
    "Guard",
    "Legality",
    "ModelError",
    "Op",
    "PeriodDecomposition",
    "Profile",
    "TRUE",
    "TimedNetwork",
    "TimedPath",
    "Tng",
    "Unreachable",
    "ZERO_LATENCY",
    "as_rational",
    "check_legal",
    "check_profile",
    "cost_of",
    "decompose",
    "eval_guard",
    "latency_lcm",
    "normalize",
    "potential",
    "replace_strategy",
]
