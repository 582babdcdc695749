"""Symbolic differentiation by the usual rule set."""

from __future__ import annotations

from multicalc.errors import DomainError
from multicalc.expr.tree import (
    ONE,
    ZERO,
    BinOp,
    Call,
    Expr,
    Neg,
    Var,
    CONSTANTS,
    add,
    call,
    depends_on,
    div,
    mul,
    neg,
    num,
    power,
    simplify_zero,
    sub,
    to_expr,
)


def _d(e: Expr, var: str) -> Expr:
    if not depends_on(e, var):
        return ZERO
    if isinstance(e, Var):
        return ONE
    if isinstance(e, Neg):
        return neg(_d(e.child, var))
    if isinstance(e, BinOp):
        u, v = e.left, e.right
        if e.op == "+":
            return add(_d(u, var), _d(v, var))
        if e.op == "-":
            return sub(_d(u, var), _d(v, var))
        if e.op == "*":
            return add(mul(_d(u, var), v), mul(u, _d(v, var)))
        if e.op == "/":
            du = _d(u, var)
            if not depends_on(v, var):
                return div(du, v)
            return div(sub(mul(du, v), mul(u, _d(v, var))), power(v, num(2)))
        # power
        if not depends_on(v, var):
            return mul(mul(v, power(u, sub(v, ONE))), _d(u, var))
        if not depends_on(u, var):
            return mul(mul(e, call("log", u)), _d(v, var))
        return mul(e, add(mul(_d(v, var), call("log", u)), div(mul(v, _d(u, var)), u)))
    return _d_call(e, var)


def _d_call(e: Call, var: str) -> Expr:
    u = e.args[0]
    du = _d(u, var)
    f = e.func
    if f == "sin":
        return mul(call("cos", u), du)
    if f == "cos":
        return neg(mul(call("sin", u), du))
    if f == "tan":
        return div(du, power(call("cos", u), num(2)))
    if f == "asin":
        return div(du, call("sqrt", sub(ONE, power(u, num(2)))))
    if f == "acos":
        return neg(div(du, call("sqrt", sub(ONE, power(u, num(2))))))
    if f == "atan":
        return div(du, add(ONE, power(u, num(2))))
    if f == "exp":
        return mul(e, du)
    if f == "log":
        return div(du, u)
    if f == "sqrt":
        return div(du, mul(num(2), e))
    raise DomainError(f"{f} cannot be differentiated symbolically")


def diff_symbolic(e, var: str, order: int = 1) -> Expr:
    """Derivative of ``e`` with respect to ``var``, iterated ``order`` times."""
    if var in CONSTANTS:
        raise ValueError(f"cannot differentiate with respect to the constant {var!r}")
    if order < 0:
        raise ValueError("order must be non-negative")
    out = simplify_zero(to_expr(e))
    for _ in range(order):
        out = _d(out, var)
    return out

