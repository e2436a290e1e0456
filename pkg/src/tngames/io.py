"""Instance documents, reports and their JSON serialization.

An instance document looks like::

    {"clocks": ["x"],
     "vertices": [{"name": "s", "latency": {"kind": "affine", "a": "1", "b": "0"}}, ...],
     "edges": [{"src": "s", "dst": "u", "guard": [{"clock": "x", "op": "<=", "bound": 2}],
                "resets": ["x"]}],
     "players": [{"source": "s", "target": "u"}],
     "profiles": [{"name": "p1", "strategies": [{"steps": [{"vertex": "s", "dwell": "3/2"}],
                                                 "final": "u"}]}]}

Rationals are integers or ``"p/q"`` strings; floats are refused. A guard
entry may also be written as ``{"clock": "x", "interval": "[1,2]"}``.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping, Sequence

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
    check_profile,
)
from .pta import DEFAULT_MAX_STATES, reachable


class InstanceError(ModelError):
    """Instance document is malformed; ``location`` points at the offending entry."""

    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location


def parse_rational(value: Any, where: str = "value") -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise InstanceError(where, f"rational {value!r} must be an integer or a 'p/q' string")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str) and re.fullmatch(r"\s*-?\d+\s*(/\s*\d+\s*)?", value):
        try:
            return Fraction(value.replace(" ", ""))
        except ZeroDivisionError:
            raise InstanceError(where, "zero denominator") from None
    raise InstanceError(where, f"cannot parse rational {value!r}")


def format_rational(q: Fraction | int) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# --------------------------------------------------------------------------
# parsing


@dataclass(frozen=True)
class Instance:
    tng: Tng
    profiles: dict[str, tuple[TimedPath, ...]] = field(default_factory=dict)
    paths: dict[str, TimedPath] = field(default_factory=dict)
    document: dict = field(default_factory=dict)
    name: str = ""

    @property
    def digest(self) -> str:
        return instance_digest(self.document)


def _latency(doc: Mapping, where: str):
    if not isinstance(doc, Mapping) or "kind" not in doc:
        raise InstanceError(where, "latency needs a 'kind'")
    kind = doc["kind"]
    try:
        if kind == "cost-sharing":
            return CostSharing(parse_rational(doc.get("c", 0), where + ".c"))
        if kind == "affine":
            return Affine(parse_rational(doc.get("a", 0), where + ".a"), parse_rational(doc.get("b", 0), where + ".b"))
        if kind == "congestion":
            table = doc.get("table")
            if not isinstance(table, list):
                raise InstanceError(where, "congestion latency needs a 'table' list")
            return Congestion(tuple(parse_rational(x, f"{where}.table[{j}]") for j, x in enumerate(table)))
    except InstanceError:
        raise
    except ModelError as exc:
        raise InstanceError(where, str(exc)) from None
    raise InstanceError(where, f"unknown latency kind {kind!r}")


_INTERVAL = re.compile(r"\s*\[\s*(\d+)\s*,\s*(\d+)\s*\]\s*")


def _atoms(entry: Mapping, clocks: dict[str, int], where: str) -> list[AtomicConstraint]:
    if not isinstance(entry, Mapping) or "clock" not in entry:
        raise InstanceError(where, "guard entry needs a 'clock'")
    name = entry["clock"]
    if name not in clocks:
        raise InstanceError(where, f"unknown clock {name!r}")
    x = clocks[name]
    if "interval" in entry:
        m = _INTERVAL.fullmatch(str(entry["interval"]))
        if not m:
            raise InstanceError(where, f"interval must look like '[a,b]' with closed brackets, got {entry['interval']!r}")
        lo, hi = int(m.group(1)), int(m.group(2))
        return [AtomicConstraint(x, Op.GE, lo), AtomicConstraint(x, Op.LE, hi)]
    try:
        op = Op.parse(str(entry.get("op")))
    except ModelError as exc:
        raise InstanceError(where, str(exc)) from None
    bound = entry.get("bound")
    if isinstance(bound, bool) or not isinstance(bound, int) or bound < 0:
        raise InstanceError(where, f"bound must be a natural number, got {bound!r}")
    return [AtomicConstraint(x, op, bound)]


def _path(doc: Mapping, vertices: dict[str, int], where: str) -> TimedPath:
    if not isinstance(doc, Mapping) or "final" not in doc:
        raise InstanceError(where, "strategy needs 'steps' and 'final'")
    steps = []
    for j, st in enumerate(doc.get("steps", [])):
        w = f"{where}.steps[{j}]"
        v = st.get("vertex")
        if v not in vertices:
            raise InstanceError(w, f"unknown vertex {v!r}")
        t = parse_rational(st.get("dwell", 0), w + ".dwell")
        if t < 0:
            raise InstanceError(w, "dwell must be nonnegative")
        steps.append((vertices[v], t))
    if doc["final"] not in vertices:
        raise InstanceError(where + ".final", f"unknown vertex {doc['final']!r}")
    return TimedPath(tuple(steps), vertices[doc["final"]])


def load_instance(doc: Mapping, check_strategies: bool = True, max_states: int | None = DEFAULT_MAX_STATES) -> Instance:
    """Validate an instance document and build the game it describes."""
    if not isinstance(doc, Mapping):
        raise InstanceError("$", "instance must be an object")
    clock_names = doc.get("clocks", [])
    if len(set(clock_names)) != len(clock_names):
        raise InstanceError("clocks", "clock names must be unique")
    clocks = {c: j for j, c in enumerate(clock_names)}
    vdocs = doc.get("vertices")
    if not vdocs:
        raise InstanceError("vertices", "at least one vertex is required")
    vertices: dict[str, int] = {}
    latencies = []
    for j, vd in enumerate(vdocs):
        where = f"vertices[{j}]"
        name = vd.get("name") if isinstance(vd, Mapping) else None
        if not isinstance(name, str) or name in vertices:
            raise InstanceError(where, f"vertex name missing or duplicated: {name!r}")
        vertices[name] = j
        latencies.append(_latency(vd.get("latency", {"kind": "affine"}), where + ".latency"))
    edges = []
    for j, ed in enumerate(doc.get("edges", [])):
        where = f"edges[{j}]"
        for end in ("src", "dst"):
            if ed.get(end) not in vertices:
                raise InstanceError(where, f"unknown {end} vertex {ed.get(end)!r}")
        atoms = []
        for q, entry in enumerate(ed.get("guard", [])):
            atoms.extend(_atoms(entry, clocks, f"{where}.guard[{q}]"))
        try:
            guard = Guard(tuple(atoms))
        except ModelError as exc:
            raise InstanceError(where, str(exc)) from None
        resets = set()
        for r in ed.get("resets", []):
            if r not in clocks:
                raise InstanceError(where, f"unknown reset clock {r!r}")
            resets.add(clocks[r])
        edges.append(Edge(vertices[ed["src"]], guard, frozenset(resets), vertices[ed["dst"]]))
    objectives = []
    for j, pd in enumerate(doc.get("players", [])):
        where = f"players[{j}]"
        s, u = pd.get("source"), pd.get("target")
        if s not in vertices or u not in vertices:
            raise InstanceError(where, "unknown source or target vertex")
        objectives.append((vertices[s], vertices[u]))
    try:
        net = TimedNetwork.build(clock_names, list(vertices), edges)
        tng = Tng(net, tuple(latencies), tuple(objectives))
    except ModelError as exc:
        raise InstanceError("$", str(exc)) from None
    if check_strategies:
        for j, (s, u) in enumerate(objectives):
            if not reachable(net, s, u, max_states):
                raise InstanceError(f"players[{j}]", f"player {j + 1} has no strategy from {net.vertices[s]!r} to {net.vertices[u]!r}")
    profiles = {}
    for j, pd in enumerate(doc.get("profiles", [])):
        where = f"profiles[{j}]"
        name = pd.get("name", str(j))
        profile = tuple(_path(sd, vertices, f"{where}.strategies[{q}]") for q, sd in enumerate(pd.get("strategies", [])))
        try:
            check_profile(tng, profile)
        except ModelError as exc:
            raise InstanceError(where, str(exc)) from None
        profiles[name] = profile
    paths = {name: _path(pd, vertices, f"paths.{name}") for name, pd in doc.get("paths", {}).items()}
    return Instance(tng, profiles, paths, dict(doc), str(doc.get("name", "")))


def load(source: str | Path | Mapping, **kwargs) -> Instance:
    """Load an instance from a JSON file, a document, or a built-in fixture name."""
    if isinstance(source, Mapping):
        return load_instance(source, **kwargs)
    path = Path(source)
    if path.exists():
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise InstanceError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from None
        return load_instance(doc, **kwargs)
    from .gadgets import FIXTURES, gen

    name = path.name
    if name in FIXTURES:
        return load_instance(gen(name), **kwargs)
    raise InstanceError(str(source), "no such file or built-in fixture")


# --------------------------------------------------------------------------
# serialization


def _latency_doc(lat) -> dict:
    if isinstance(lat, CostSharing):
        return {"kind": "cost-sharing", "c": format_rational(lat.c)}
    if isinstance(lat, Affine):
        return {"kind": "affine", "a": format_rational(lat.a), "b": format_rational(lat.b)}
    return {"kind": "congestion", "table": [format_rational(x) for x in lat.table]}


def path_doc(net: TimedNetwork, path: TimedPath) -> dict:
    return {
        "steps": [{"vertex": net.vertices[v], "dwell": format_rational(t)} for v, t in path.steps],
        "final": net.vertices[path.final],
    }


def dump_instance(tng: Tng, profiles: Mapping[str, Sequence[TimedPath]] | None = None, name: str = "") -> dict:
    """Document for ``tng`` in normalized form (explicit ops, ``p/q`` rationals)."""
    net = tng.network
    cn = [c.name for c in net.clocks]
    doc: dict = {}
    if name:
        doc["name"] = name
    doc["clocks"] = cn
    doc["vertices"] = [{"name": v, "latency": _latency_doc(lat)} for v, lat in zip(net.vertices, tng.latencies)]
    doc["edges"] = [
        {
            "src": net.vertices[e.src],
            "dst": net.vertices[e.dst],
            "guard": [{"clock": cn[c.clock], "op": c.op.value, "bound": c.bound} for c in e.guard.constraints],
            "resets": sorted(cn[x] for x in e.resets),
        }
        for e in net.edges
    ]
    doc["players"] = [{"source": net.vertices[s], "target": net.vertices[u]} for s, u in tng.objectives]
    if profiles:
        doc["profiles"] = [{"name": n, "strategies": [path_doc(net, p) for p in prof]} for n, prof in profiles.items()]
    return doc


def instance_digest(doc: Mapping) -> str:
    return hashlib.sha256(json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def to_jsonable(obj: Any) -> Any:
    """Make results JSON-safe; rationals become ``p/q`` strings."""
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, float):
        return "inf" if obj == float("inf") else repr(obj)
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    return obj


@dataclass
class Report:
    command: str
    digest: str
    result: dict

    def to_dict(self) -> dict:
        return {"command": self.command, "instance_digest": self.digest, "result": to_jsonable(self.result)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        d = json.loads(text)
        return cls(d["command"], d["instance_digest"], d["result"])

    def to_table(self) -> str:
        lines = [f"command: {self.command}", f"instance: {self.digest[:16]}"]
        lines.extend(_table_lines(to_jsonable(self.result), ""))
        return "\n".join(lines)


def _table_lines(obj, prefix: str) -> list[str]:
    if isinstance(obj, dict):
        out = []
        for k, v in obj.items():
            key = f"{prefix}.{k}" if prefix else str(k)
            if isinstance(v, (dict, list)) and v and any(isinstance(x, (dict, list)) for x in (v.values() if isinstance(v, dict) else v)):
                out.extend(_table_lines(v, key))
            else:
                out.append(f"{key:<28} {_inline(v)}")
        return out
    if isinstance(obj, list):
        out = []
        for j, v in enumerate(obj):
            out.extend(_table_lines(v, f"{prefix}[{j}]") if isinstance(v, (dict, list)) else [f"{prefix}[{j}]  {v}"])
        return out
    return [f"{prefix:<28} {obj}"]


def _inline(v) -> str:
    if isinstance(v, list):
        return " | ".join(_inline(x) for x in v) if v else "-"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_inline(x)}" for k, x in v.items()) + "}"
    return str(v)


def format_path(net: TimedNetwork, path: TimedPath) -> str:
    parts = [f"({net.vertices[v]},{format_rational(t)})" for v, t in path.steps]
    return ", ".join(parts + [net.vertices[path.final]])


__all__ = [
    "Instance",
    "InstanceError",
    "Report",
    "dump_instance",
    "format_path",
    "format_rational",
    "instance_digest",
    "load",
    "load_instance",
    "parse_rational",
    "path_doc",
    "to_jsonable",
]
