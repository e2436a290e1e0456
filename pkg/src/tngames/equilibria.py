"""Best responses, Nash equilibria, social optima and inefficiency measures."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .core import (
    Affine,
    Congestion,
    CostSharing,
    ModelError,
    TimedPath,
    Tng,
    check_profile,
    cost_of,
    latency_lcm,
    potential,
    replace_strategy,
)
from .pta import DEFAULT_MAX_STATES, cor, horizon
from .reductions import (
    DEFAULT_PRODUCT_BUDGET,
    br_pta,
    profile_from_path,
    restore_self_loops,
    so_pta,
    strategy_from_path,
    without_self_loops,
)


@dataclass(frozen=True)
class BestResponse:
    player: int
    strategy: TimedPath
    cost: Fraction
    current_cost: Fraction

    @property
    def already_best(self) -> bool:
        return self.cost == self.current_cost

    @property
    def gain(self) -> Fraction:
        return self.current_cost - self.cost


def best_response(tng: Tng, profile: Sequence[TimedPath], i: int, max_states: int | None = DEFAULT_MAX_STATES) -> BestResponse:
    """Cheapest integral strategy of player ``i`` against the others in ``profile``."""
    if not all(p.is_integral() for p in profile):
        raise ModelError("best responses are defined for integral profiles")
    current = cost_of(tng, profile).per_player[i]
    others = [p for j, p in enumerate(profile) if j != i]
    pta, s, u, back = br_pta(tng, others, i)
    witness = cor(pta, s, u, max_states=max_states)
    strategy = strategy_from_path(back, witness)
    if witness.price > current:
        raise AssertionError("best-response search missed the current strategy")
    if witness.price == current:
        return BestResponse(i, profile[i], current, current)
    return BestResponse(i, strategy, witness.price, current)


@dataclass(frozen=True)
class NashCheck:
    is_ne: bool
    deviation: BestResponse | None = None

    def __bool__(self):
        return self.is_ne


def is_ne(tng: Tng, profile: Sequence[TimedPath], max_states: int | None = DEFAULT_MAX_STATES) -> NashCheck:
    """Whether no player has a strictly cheaper integral deviation."""
    check_profile(tng, profile)
    for i in range(tng.k):
        br = best_response(tng, profile, i, max_states)
        if not br.already_best:
            return NashCheck(False, br)
    return NashCheck(True)


@dataclass(frozen=True)
class DynamicsStep:
    player: int
    old_cost: Fraction
    new_cost: Fraction
    psi_before: Fraction
    psi_after: Fraction
    profile: tuple[TimedPath, ...]

    @property
    def delta_psi(self) -> Fraction:
        return self.psi_before - self.psi_after

    @property
    def delta_cost(self) -> Fraction:
        return self.old_cost - self.new_cost


@dataclass(frozen=True)
class DynamicsTrace:
    seed: tuple[TimedPath, ...]
    steps: tuple[DynamicsStep, ...]
    terminal: tuple[TimedPath, ...]

    @property
    def n_steps(self) -> int:
        return len(self.steps)


class SocialOptimum(tuple):
    """``(profile, cost)`` pair that also remembers the product witness end time."""

    def __new__(cls, profile, cost, end_time=0, product_vertices=0, product_horizon=0):
        obj = super().__new__(cls, (tuple(profile), cost))
        obj.end_time = end_time
        obj.product_vertices = product_vertices
        obj.product_horizon = product_horizon
        return obj

    @property
    def profile(self) -> tuple[TimedPath, ...]:
        return self[0]

    @property
    def cost(self) -> Fraction:
        return self[1]


def social_optimum(
    tng: Tng,
    max_product: int | None = DEFAULT_PRODUCT_BUDGET,
    max_states: int | None = DEFAULT_MAX_STATES,
) -> SocialOptimum:
    """Integral profile of minimum total cost via the product automaton."""
    loop_free, info = without_self_loops(tng)
    pta, s, u, back = so_pta(loop_free, max_product)
    witness = cor(pta, s, u, max_states=max_states)
    profile = tuple(restore_self_loops(p, info) for p in profile_from_path(back, witness))
    total = cost_of(tng, profile).total
    if total != witness.price:
        raise AssertionError("product witness price differs from the profile cost")
    return SocialOptimum(profile, total, witness.end_time, pta.network.n_vertices, horizon(pta))


def find_ne(
    tng: Tng,
    seed: Sequence[TimedPath] | None = None,
    max_states: int | None = DEFAULT_MAX_STATES,
    max_product: int | None = DEFAULT_PRODUCT_BUDGET,
) -> tuple[tuple[TimedPath, ...], DynamicsTrace]:
    """Round-robin best-response dynamics from ``seed`` (the social optimum by default).

    Players are polled cyclically starting after the last mover; the first one
    with a strictly cheaper best response switches to it. Stops after a full
    round without an improvement.
    """
    if seed is None:
        seed = social_optimum(tng, max_product, max_states).profile
    profile = tuple(seed)
    check_profile(tng, profile)
    if not all(p.is_integral() for p in profile):
        raise ModelError("dynamics start from an integral profile")
    steps: list[DynamicsStep] = []
    psi = potential(tng, profile)
    i, quiet = 0, 0
    while quiet < tng.k:
        br = best_response(tng, profile, i, max_states)
        if br.already_best:
            quiet += 1
        else:
            nxt = replace_strategy(profile, i, br.strategy)
            psi_after = potential(tng, nxt)
            steps.append(DynamicsStep(i, br.current_cost, br.cost, psi, psi_after, nxt))
            profile, psi, quiet = nxt, psi_after, 1
        i = (i + 1) % tng.k
    return profile, DynamicsTrace(tuple(seed), tuple(steps), profile)


# --------------------------------------------------------------------------
# inefficiency


def _is_zero(lat) -> bool:
    if isinstance(lat, CostSharing):
        return lat.c == 0
    if isinstance(lat, Affine):
        return lat.a == 0 and lat.b == 0
    return all(x == 0 for x in lat.table)


def latency_family(tng: Tng) -> str:
    """``cost-sharing``, ``affine``, ``congestion`` or ``mixed``; zero latencies fit any family."""
    kinds = {type(lat) for lat in tng.latencies if not _is_zero(lat)}
    if not kinds or kinds == {Affine}:
        return "affine"
    if kinds == {CostSharing}:
        return "cost-sharing"
    if CostSharing not in kinds:
        return "congestion"
    return "mixed"


def harmonic(k: int) -> Fraction:
    return sum((Fraction(1, j) for j in range(1, k + 1)), Fraction(0))


AFFINE_POS = 1 + math.sqrt(3) / 3
AFFINE_POA = Fraction(5, 2)


@dataclass(frozen=True)
class InefficiencyReport:
    so_cost: Fraction
    ne_cost: Fraction
    ratio: Fraction | float
    family: str
    poa_bound: Fraction | None
    pos_bound: Fraction | float | None
    bound_satisfied: bool | None
    within_pos: bool | None = field(default=None)


def inefficiency(
    tng: Tng,
    ne: Sequence[TimedPath],
    so_cost: Fraction | None = None,
    check: bool = True,
    max_states: int | None = DEFAULT_MAX_STATES,
) -> InefficiencyReport:
    """Compare an equilibrium against the social optimum.

    Only the anarchy bound is asserted through ``bound_satisfied``; the
    stability bound concerns the best equilibrium and is reported as
    ``within_pos`` for information.
    """
    if check:
        verdict = is_ne(tng, ne, max_states)
        if not verdict:
            raise ModelError(f"profile is not an equilibrium: player {verdict.deviation.player + 1} can improve")
    if so_cost is None:
        so_cost = social_optimum(tng, max_states=max_states).cost
    ne_cost = cost_of(tng, ne).total
    family = latency_family(tng)
    if family == "cost-sharing":
        poa, pos = Fraction(tng.k), harmonic(tng.k)
    elif family == "affine":
        poa, pos = AFFINE_POA, AFFINE_POS
    else:
        poa, pos = None, None
    if so_cost == 0:
        ratio = Fraction(1) if ne_cost == 0 else math.inf
    else:
        ratio = ne_cost / so_cost
    finite = ratio != math.inf
    satisfied = (ratio <= poa) if poa is not None and finite else None
    within_pos = (ratio <= pos) if pos is not None and finite else None
    return InefficiencyReport(so_cost, ne_cost, ratio, family, poa, pos, satisfied, within_pos)


# --------------------------------------------------------------------------
# time bounds


def time_bound_formula(phi, n_vertices: int, chi: int, n_clocks: int, k: int, shift: int = 0) -> int:
    """``phi * |V| * (chi+shift)^|C| + |V|^k * (chi+shift)^(k|C|)``, rounded up."""
    base = chi + shift
    return math.ceil(phi * n_vertices * base**n_clocks) + n_vertices**k * base ** (k * n_clocks)


@dataclass(frozen=True)
class NeTimeBound:
    bound: int
    phi: Fraction | float
    phi_log_form: float
    step_term: int
    so_term: int
    family: str


def ne_time_bound(tng: Tng, so: SocialOptimum | None = None, max_states: int | None = DEFAULT_MAX_STATES) -> NeTimeBound:
    """Explicit end-time bound for the equilibrium reached from the social optimum.

    ``phi`` bounds the number of improving steps: ``L * SO`` for congestion
    games, ``L * (ln k + 1) * SO`` for cost-sharing and ``L * Psi(SO)`` when
    the latency kinds are mixed. ``phi_log_form`` reports ``L * log(k) * SO``
    for comparison. Each step adds at most one single-player horizon; the
    seed ends within the product automaton's horizon.
    """
    if so is None:
        so = social_optimum(tng, max_states=max_states)
    lcm = latency_lcm(tng)
    family = latency_family(tng)
    if family == "cost-sharing":
        phi = lcm * (math.log(tng.k) + 1) * so.cost
    elif family in ("affine", "congestion"):
        phi = lcm * so.cost
    else:
        phi = lcm * potential(tng, so.profile)
    net = tng.network
    step_term = net.n_vertices * (net.max_constant() + 2) ** net.n_clocks
    so_term = so.product_horizon
    bound = math.ceil(phi) * step_term + so_term
    return NeTimeBound(bound, phi, lcm * math.log(tng.k) * float(so.cost), step_term, so_term, family)


__all__ = [
    "AFFINE_POA",
    "AFFINE_POS",
    "BestResponse",
    "DynamicsStep",
    "DynamicsTrace",
    "InefficiencyReport",
    "NashCheck",
    "NeTimeBound",
    "SocialOptimum",
    "best_response",
    "find_ne",
    "harmonic",
    "inefficiency",
    "is_ne",
    "latency_family",
    "ne_time_bound",
    "social_optimum",
    "time_bound_formula",
]
