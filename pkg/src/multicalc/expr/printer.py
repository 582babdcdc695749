"""Text output for expressions.

Parentheses are emitted from operator precedence only where needed for
``parse(format_expr(e)) == e`` to hold structurally.
"""

from __future__ import annotations

from multicalc.expr.tree import BinOp, Call, Const, Expr, Neg, Var

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}
_NEG = 3
_POW = 4
_ATOM = 5


def format_number(v: float) -> str:
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _POW if e.op == "^" else _PREC[e.op]
    if isinstance(e, Neg):
        return _NEG
    return _ATOM


def _wrap(e: Expr, need: bool) -> str:
    s = format_expr(e)
    return f"({s})" if need else s


def format_expr(e: Expr) -> str:
    if isinstance(e, Const):
        return format_number(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Call):
        return f"{e.func}({', '.join(format_expr(a) for a in e.args)})"
    if isinstance(e, Neg):
        return "-" + _wrap(e.child, _prec(e.child) < _NEG)
    if e.op == "^":
        left = _wrap(e.left, _prec(e.left) < _ATOM)
        right = _wrap(e.right, _prec(e.right) < _NEG)
        return f"{left}^{right}"
    p = _PREC[e.op]
    left = _wrap(e.left, _prec(e.left) < p)
    right = _wrap(e.right, _prec(e.right) <= p)
    if p == 1:
        return f"{left} {e.op} {right}"
    return f"{left}{e.op}{right}"
