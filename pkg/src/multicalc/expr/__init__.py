"""Symbolic expressions: parsing, printing, simplification, evaluation and
differentiation."""

from multicalc.expr.diff import diff_symbolic
from multicalc.expr.evaluate import compile_expr, evaluate, evaluate_grid
from multicalc.expr.parse import parse
from multicalc.expr.printer import format_expr
from multicalc.expr.tree import (
    FUNCTIONS,
    BinOp,
    Call,
    Const,
    Expr,
    Neg,
    Scalar,
    Var,
    combine,
    demote,
    free_vars,
    is_symbolic,
    num,
    simplify_zero,
    substitute,
    to_expr,
    to_scalar,
)

__all__ = [
    "FUNCTIONS",
    "BinOp",
    "Call",
    "Const",
    "Expr",
    "Neg",
    "Scalar",
    "Var",
    "combine",
    "compile_expr",
    "demote",
    "diff_symbolic",
    "evaluate",
    "evaluate_grid",
    "format_expr",
    "free_vars",
    "is_symbolic",
    "num",
    "parse",
    "simplify_zero",
    "substitute",
    "to_expr",
    "to_scalar",
]
