"""schsym: symbolic and numeric verification of conditional symmetries of
semilinear Schrodinger/diffusion equations with a dimensionful coupling."""

from .ratfunc import Q2, RatFunc
from .expr import Expr, diff, substitute, eval_exact, eval_num, collect_unknowns, is_zero
from .parser import Context, default_context, parse

__version__ = "0.1.0"

__all__ = [
    "Q2",
    "RatFunc",
    "Expr",
    "diff",
    "substitute",
    "eval_exact",
    "eval_num",
    "collect_unknowns",
    "is_zero",
    "Context",
    "default_context",
    "parse",
    "__version__",
]
