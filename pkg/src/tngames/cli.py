"""Command-line front end: ``tng <command> --instance FILE|FIXTURE [options]``.

``gen`` prints a bare instance document; every other command prints a
report. Exit status is 0 on success, 1 on model or usage errors and 2 when a size
budget is refused.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .core import BudgetExceeded, ModelError, cost_of, potential
from .equilibria import best_response, find_ne, inefficiency, ne_time_bound, social_optimum
from .gadgets import FIXTURES, gen
from .io import InstanceError, Report, _path, format_path, instance_digest, load, path_doc
from .oracle import EnumerationBudget, oracle_br_strategy, oracle_so_profile, single_player_horizon
from .pta import DEFAULT_MAX_STATES
from .reductions import DEFAULT_PRODUCT_BUDGET

COMMANDS = (
    "validate",
    "cost",
    "best-response",
    "nash",
    "social-optimum",
    "potential",
    "inefficiency",
    "oracle",
    "gen",
    "horizon",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tng", description="Solve timed network games exactly.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("name", nargs="?", help="fixture name for 'gen'")
    p.add_argument("--instance", help="instance JSON file or built-in fixture name")
    p.add_argument("--profile", help="profile name inside the instance, or a JSON file with strategies")
    p.add_argument("--player", type=int, help="1-based player index")
    p.add_argument("--seed", help="profile name to start best-response dynamics from (default: social optimum)")
    p.add_argument("--budget", type=int, help="size budget for product and search state counts")
    p.add_argument("--horizon", type=int, help="oracle enumeration horizon")
    p.add_argument("--max-steps", type=int, help="oracle path-length cap (default: horizon only)")
    p.add_argument("--k", type=int, help="player count for 'gen'")
    p.add_argument("--primes", help="comma-separated periods for prime gadgets")
    p.add_argument("--numbers", help="comma-separated set A for subset-sum gadgets")
    p.add_argument("--mu", type=int, help="subset-sum target")
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.add_argument("--output", help="write the report here instead of stdout")
    return p


def _ints(text: str | None) -> list[int] | None:
    if text is None:
        return None
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _profile(inst, ref: str | None, required: bool = True):
    if ref is None:
        if not required:
            return None
        if len(inst.profiles) == 1:
            return next(iter(inst.profiles.values()))
        raise UsageError("--profile is required")
    if ref in inst.profiles:
        return inst.profiles[ref]
    path = Path(ref)
    if not path.exists():
        raise UsageError(f"unknown profile {ref!r}; instance has: {', '.join(inst.profiles) or 'none'}")
    doc = json.loads(path.read_text())
    strategies = doc["strategies"] if isinstance(doc, dict) else doc
    vertices = {v: j for j, v in enumerate(inst.tng.network.vertices)}
    from .core import check_profile

    profile = tuple(_path(sd, vertices, f"{ref}[{j}]") for j, sd in enumerate(strategies))
    check_profile(inst.tng, profile)
    return profile


def _player(args, k: int) -> int:
    if args.player is None:
        raise UsageError("--player is required")
    if not 1 <= args.player <= k:
        raise UsageError(f"--player must be between 1 and {k}")
    return args.player - 1


def _paths(net, profile):
    return [format_path(net, p) for p in profile]


def _gen_params(args) -> dict:
    params = {}
    if args.k is not None:
        params["k"] = args.k
    primes = _ints(args.primes)
    if primes is not None:
        params["primes"] = primes
    numbers = _ints(args.numbers)
    if numbers is not None:
        params["A"] = numbers
    if args.mu is not None:
        params["mu"] = args.mu
    return params


def run(args) -> Report:
    if args.command == "gen":
        if not args.name:
            raise UsageError(f"gen needs a fixture name: {', '.join(FIXTURES)}")
        try:
            doc = gen(args.name, **_gen_params(args))
        except TypeError as exc:
            raise UsageError(str(exc)) from None
        return Report("gen", instance_digest(doc), doc)

    if not args.instance:
        raise UsageError("--instance is required")
    states = args.budget or DEFAULT_MAX_STATES
    product = args.budget or DEFAULT_PRODUCT_BUDGET
    inst = load(args.instance)
    tng, net = inst.tng, inst.tng.network
    cmd = args.command
    result: dict

    if cmd == "validate":
        result = {
            "players": tng.k,
            "vertices": net.n_vertices,
            "clocks": net.n_clocks,
            "edges": len(net.edges),
            "max_constant": net.max_constant(),
            "profiles": sorted(inst.profiles),
            "valid": True,
        }
    elif cmd == "cost":
        profile = _profile(inst, args.profile)
        costs = cost_of(tng, profile)
        result = {"per_player": list(costs.per_player), "total": costs.total}
    elif cmd == "potential":
        profile = _profile(inst, args.profile)
        result = {"potential": potential(tng, profile)}
    elif cmd == "best-response":
        profile = _profile(inst, args.profile)
        i = _player(args, tng.k)
        br = best_response(tng, profile, i, states)
        result = {
            "player": i + 1,
            "current_cost": br.current_cost,
            "best_cost": br.cost,
            "already_best": br.already_best,
            "strategy": format_path(net, br.strategy),
        }
    elif cmd == "nash":
        seed = _profile(inst, args.seed, required=False) if args.seed else None
        ne, trace = find_ne(tng, seed, states, product)
        costs = cost_of(tng, ne)
        result = {
            "profile": _paths(net, ne),
            "per_player": list(costs.per_player),
            "total": costs.total,
            "steps": trace.n_steps,
            "trace": [
                {
                    "player": s.player + 1,
                    "old_cost": s.old_cost,
                    "new_cost": s.new_cost,
                    "potential_before": s.psi_before,
                    "potential_after": s.psi_after,
                }
                for s in trace.steps
            ],
        }
    elif cmd == "social-optimum":
        so = social_optimum(tng, product, states)
        result = {
            "profile": _paths(net, so.profile),
            "strategies": [path_doc(net, p) for p in so.profile],
            "cost": so.cost,
            "end_time": Fraction(so.end_time),
            "product_vertices": so.product_vertices,
        }
    elif cmd == "inefficiency":
        if args.profile:
            ne = _profile(inst, args.profile)
        else:
            ne, _ = find_ne(tng, None, states, product)
        rep = inefficiency(tng, ne, max_states=states)
        result = {
            "so_cost": rep.so_cost,
            "ne_cost": rep.ne_cost,
            "ratio": rep.ratio,
            "family": rep.family,
            "poa_bound": rep.poa_bound,
            "pos_bound": rep.pos_bound,
            "bound_satisfied": rep.bound_satisfied,
        }
    elif cmd == "oracle":
        budget = EnumerationBudget(horizon=args.horizon, max_steps=args.max_steps)
        if args.player is not None:
            profile = _profile(inst, args.profile)
            i = _player(args, tng.k)
            c, path = oracle_br_strategy(tng, profile, i, budget)
            result = {"player": i + 1, "best_cost": c, "strategy": format_path(net, path)}
        else:
            c, profile = oracle_so_profile(tng, budget)
            result = {"so_cost": c, "profile": _paths(net, profile)}
    elif cmd == "horizon":
        result = {"single_player": single_player_horizon(net)}
        try:
            bound = ne_time_bound(tng, max_states=states)
            result.update(ne_time_bound=bound.bound, phi=str(bound.phi), so_term=bound.so_term)
        except BudgetExceeded as exc:
            result["ne_time_bound"] = None
            result["refused"] = str(exc)
    else:  # pragma: no cover - argparse restricts the choices
        raise UsageError(cmd)
    return Report(cmd, inst.digest, result)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        report = run(args)
    except UsageError as exc:
        print(f"tng: usage error: {exc}", file=sys.stderr)
        return 1
    except BudgetExceeded as exc:
        print(f"tng: budget exceeded: {exc}", file=sys.stderr)
        print(json.dumps({"error": "budget", "message": str(exc), "report": exc.report}), file=sys.stderr)
        return 2
    except (ModelError, InstanceError) as exc:
        print(f"tng: {exc}", file=sys.stderr)
        return 1
    if args.command == "gen":
        # the bare document, so the output loads back as an instance
        text = json.dumps(report.result, indent=2)
    else:
        text = report.to_json() if args.format == "json" else report.to_table()
    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        print(text)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
