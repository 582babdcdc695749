"""Expression tree nodes, smart constructors and zero simplification.

Nodes are immutable.  Composite nodes carry a ``canonical`` flag (excluded
from equality) recording that the node was built by a smart constructor, so
:func:`simplify_zero` can stop early on already simplified sub-trees.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, field
from typing import Tuple, Union

from multicalc.errors import DomainError

FUNCTIONS = frozenset(
    {"sin", "cos", "tan", "asin", "acos", "atan", "exp", "log", "sqrt", "abs"}
)
CONSTANTS = {"pi": math.pi}
BINARY_OPS = ("+", "-", "*", "/", "^")


class Expr:
    """Base class of all expression nodes."""

    __slots__ = ()

    def __add__(self, other):
        return combine("+", self, other)

    def __radd__(self, other):
        return combine("+", other, self)

    def __sub__(self, other):
        return combine("-", self, other)

    def __rsub__(self, other):
        return combine("-", other, self)

    def __mul__(self, other):
        return combine("*", self, other)

    def __rmul__(self, other):
        return combine("*", other, self)

    def __truediv__(self, other):
        return combine("/", self, other)

    def __rtruediv__(self, other):
        return combine("/", other, self)

    def __pow__(self, other):
        return combine("^", self, other)

    def __rpow__(self, other):
        return combine("^", other, self)

    def __neg__(self):
        return demote(neg(simplify_zero(self)))

    def __str__(self):
        from multicalc.expr.printer import format_expr

        return format_expr(self)


@dataclass(frozen=True, slots=True)
class Const(Expr):
    """Non-negative finite constant.  Negative numbers are ``Neg(Const)``;
    build them with :func:`num`."""

    value: float

    def __post_init__(self):
        v = float(self.value)
        if not math.isfinite(v) or v < 0:
            raise ValueError(f"Const requires a finite non-negative value, got {v!r}")
        object.__setattr__(self, "value", v + 0.0)  # folds -0.0 into 0.0


@dataclass(frozen=True, slots=True)
class Var(Expr):
    name: str


@dataclass(frozen=True, slots=True)
class Neg(Expr):
    child: Expr
    canonical: bool = field(default=False, compare=False, repr=False)


@dataclass(frozen=True, slots=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr
    canonical: bool = field(default=False, compare=False, repr=False)


@dataclass(frozen=True, slots=True)
class Call(Expr):
    func: str
    args: Tuple[Expr, ...]
    canonical: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        if self.func not in FUNCTIONS:
            raise ValueError(f"unknown function {self.func!r}")
        object.__setattr__(self, "args", tuple(self.args))


Scalar = Union[float, Expr]

ZERO = Const(0.0)
ONE = Const(1.0)


def num(value) -> Expr:
    """Expression for a real number; negatives become ``Neg(Const(|v|))``."""
    v = float(value)
    if v < 0:
        return Neg(Const(-v), True)
    return Const(v)


def numeric_value(e: Expr):
    """Return the float value of ``Const`` or ``Neg(Const)``, else None."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Neg) and isinstance(e.child, Const):
        return -e.child.value
    return None


def is_number(x) -> bool:
    return isinstance(x, numbers.Real) and not isinstance(x, Expr)


def free_vars(e: Expr) -> set:
    """Names of all variables in ``e`` excluding named constants."""
    out = set()
    stack = [e]
    while stack:
        n = stack.pop()
        if isinstance(n, Var):
            if n.name not in CONSTANTS:
                out.add(n.name)
        elif isinstance(n, Neg):
            stack.append(n.child)
        elif isinstance(n, BinOp):
            stack.append(n.left)
            stack.append(n.right)
        elif isinstance(n, Call):
            stack.extend(n.args)
    return out


def depends_on(e: Expr, name: str) -> bool:
    stack = [e]
    while stack:
        n = stack.pop()
        if isinstance(n, Var):
            if n.name == name:
                return True
        elif isinstance(n, Neg):
            stack.append(n.child)
        elif isinstance(n, BinOp):
            stack.append(n.left)
            stack.append(n.right)
        elif isinstance(n, Call):
            stack.extend(n.args)
    return False


def substitute(e: Expr, mapping) -> Expr:
    """Replace sub-trees structurally equal to a key of ``mapping``.

    Keys may be variable names (str) or Expr nodes.  The result is
    simplified.
    """
    lookup = {}
    for k, v in mapping.items():
        key = Var(k) if isinstance(k, str) else k
        lookup[key] = to_expr(v)

    def walk(n):
        hit = lookup.get(n) if not isinstance(n, Const) else None
        if hit is not None:
            return hit
        if isinstance(n, Neg):
            return neg(walk(n.child))
        if isinstance(n, BinOp):
            return _BUILD[n.op](walk(n.left), walk(n.right))
        if isinstance(n, Call):
            return call(n.func, *[walk(a) for a in n.args])
        return n

    return walk(simplify_zero(e))


# -- smart constructors -------------------------------------------------------


def _fold(op, a, b):
    from multicalc.expr.evaluate import apply_binary

    try:
        r = apply_binary(op, a, b)
    except (ArithmeticError, ValueError):
        return None
    if isinstance(r, complex) or not math.isfinite(r):
        return None
    return num(r)


def neg(a: Expr) -> Expr:
    va = numeric_value(a)
    if va is not None:
        return num(-va)
    if isinstance(a, Neg):
        return a.child
    return Neg(a, True)


def add(a: Expr, b: Expr) -> Expr:
    va, vb = numeric_value(a), numeric_value(b)
    if va is not None and vb is not None:
        folded = _fold("+", va, vb)
        if folded is not None:
            return folded
    if vb == 0:
        return a
    if va == 0:
        return b
    return BinOp("+", a, b, True)


def sub(a: Expr, b: Expr) -> Expr:
    va, vb = numeric_value(a), numeric_value(b)
    if va is not None and vb is not None:
        folded = _fold("-", va, vb)
        if folded is not None:
            return folded
    if vb == 0:
        return a
    if va == 0:
        return neg(b)
    return BinOp("-", a, b, True)


def mul(a: Expr, b: Expr) -> Expr:
    va, vb = numeric_value(a), numeric_value(b)
    if va is not None and vb is not None:
        folded = _fold("*", va, vb)
        if folded is not None:
            return folded
    if va == 0 or vb == 0:
        return ZERO
    if va == 1:
        return b
    if vb == 1:
        return a
    return BinOp("*", a, b, True)


def div(a: Expr, b: Expr) -> Expr:
    va, vb = numeric_value(a), numeric_value(b)
    if vb == 0:
        raise DomainError("division by zero")
    if va is not None and vb is not None:
        folded = _fold("/", va, vb)
        if folded is not None:
            return folded
    if va == 0:
        return ZERO
    if vb == 1:
        return a
    return BinOp("/", a, b, True)


def power(a: Expr, b: Expr) -> Expr:
    va, vb = numeric_value(a), numeric_value(b)
    if va is not None and vb is not None:
        folded = _fold("^", va, vb)
        if folded is not None:
            return folded
    if vb == 1:
        return a
    if vb == 0:
        return ONE
    return BinOp("^", a, b, True)


def call(func: str, *args: Expr) -> Expr:
    return Call(func, tuple(args), True)


_BUILD = {"+": add, "-": sub, "*": mul, "/": div, "^": power}


def build(op: str, a: Expr, b: Expr) -> Expr:
    """Apply binary ``op`` through its smart constructor."""
    return _BUILD[op](a, b)


def simplify_zero(e: Expr) -> Expr:
    """Rewrite trivial identities (zeros, ones, double negation) to a fixpoint.

    Rules: x+0, x-0, 0-x, x*0, 0/x, x*1, x/1, x^1, x^0, -(-x), plus folding
    of operations whose operands are both literal numbers.
    """
    if isinstance(e, (Const, Var)):
        return e
    if e.canonical:
        return e
    if isinstance(e, Neg):
        return neg(simplify_zero(e.child))
    if isinstance(e, BinOp):
        return _BUILD[e.op](simplify_zero(e.left), simplify_zero(e.right))
    return call(e.func, *[simplify_zero(a) for a in e.args])


# -- scalars ------------------------------------------------------------------


def to_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, str):
        from multicalc.expr.parse import parse

        return parse(x)
    if is_number(x):
        v = float(x)
        if not math.isfinite(v):
            raise DomainError(f"non-finite constant {v!r}")
        return num(v)
    raise TypeError(f"cannot convert {type(x).__name__} to an expression")


def to_scalar(x) -> Scalar:
    """Normalise numbers, strings and Exprs into the Scalar union."""
    if is_number(x):
        return float(x)
    return demote(simplify_zero(to_expr(x)))


def demote(e: Expr) -> Scalar:
    """Return a plain float when ``e`` is a literal number."""
    v = numeric_value(e)
    return v if v is not None else e


def is_symbolic(x) -> bool:
    return isinstance(x, (Expr, str))


def combine(op: str, a, b) -> Scalar:
    """Arithmetic on Scalars.

    Two numbers give a number.  Otherwise each operand becomes a sub-tree of
    the result, so grouping is kept by construction: ``combine("*", "a+b",
    "c+d")`` is ``(a+b)*(c+d)``.
    """
    if op not in _BUILD:
        raise ValueError(f"unknown operator {op!r}")
    if is_number(a) and is_number(b):
        a, b = float(a), float(b)
        if op == "/" and b == 0:
            raise DomainError("division by zero")
        from multicalc.expr.evaluate import apply_binary

        try:
            r = apply_binary(op, a, b)
        except (ArithmeticError, ValueError) as exc:
            raise DomainError(f"{a!r} {op} {b!r}: {exc}") from None
        if isinstance(r, complex):
            raise DomainError(f"{a!r} {op} {b!r} is not real")
        return r
    ea = simplify_zero(to_expr(a))
    eb = simplify_zero(to_expr(b))
    return demote(_BUILD[op](ea, eb))
