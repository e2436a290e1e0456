"""Exact solvers for timed network games.

Costs, best responses, social optima and equilibria of games whose strategies
are timed paths through a network with clock guards and resets.
"""

from .core import (
    Affine,
    AtomicConstraint,
    BudgetExceeded,
    Clock,
    Congestion,
    CostSharing,
    Edge,
    Guard,
    ModelError,
    Op,
    TimedNetwork,
    TimedPath,
    Tng,
    Unreachable,
    check_legal,
    cost_of,
    decompose,
    eval_guard,
    normalize,
    potential,
)
from .equilibria import best_response, find_ne, inefficiency, is_ne, ne_time_bound, social_optimum
from .io import dump_instance, load, load_instance
from .pta import Pta, cor, cor_price_only, horizon
from .reductions import br_pta, so_pta

__version__ = "0.1.0"

__all__ = [
    "Affine",
    "AtomicConstraint",
    "BudgetExceeded",
    "Clock",
    "Congestion",
    "CostSharing",
    "Edge",
    "Guard",
    "ModelError",
    "Op",
    "Pta",
    "TimedNetwork",
    "TimedPath",
    "Tng",
    "Unreachable",
    "best_response",
    "br_pta",
    "check_legal",
    "cor",
    "cor_price_only",
    "cost_of",
    "decompose",
    "dump_instance",
    "eval_guard",
    "find_ne",
    "horizon",
    "inefficiency",
    "is_ne",
    "load",
    "load_instance",
    "ne_time_bound",
    "normalize",
    "potential",
    "social_optimum",
    "so_pta",
]
