"""Numeric evaluation of expressions.

:func:`evaluate` walks the tree and follows IEEE semantics for domain errors
(NaN or infinity plus a :class:`DomainWarning`).  :func:`compile_expr`
generates a Python function for hot loops; both paths perform the same
floating-point operations in the same order.
"""

from __future__ import annotations

import math
import warnings
from typing import Callable, Dict, Iterable, List, Mapping, Sequence

import numpy as np

from multicalc.errors import DomainWarning, UnboundVariableError
from multicalc.expr.tree import CONSTANTS, BinOp, Const, Expr, Neg, Var, free_vars, to_expr

Binding = Mapping[str, float]


def _pow(a, b):
    r = a ** b
    if type(r) is complex:
        raise ValueError("fractional power of a negative number")
    return r


def apply_binary(op: str, a: float, b: float) -> float:
    """Apply ``op`` to two floats; raises on domain errors."""
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        return a / b
    if op == "^":
        return _pow(a, b)
    raise ValueError(f"unknown operator {op!r}")


_MATH = {
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "asin": math.asin,
    "acos": math.acos,
    "atan": math.atan,
    "exp": math.exp,
    "log": math.log,
    "sqrt": math.sqrt,
    "abs": abs,
}

_NUMPY = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "asin": np.arcsin,
    "acos": np.arccos,
    "atan": np.arctan,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
}


def _ieee_binary(op, a, b, flags):
    try:
        return apply_binary(op, a, b)
    except ZeroDivisionError:
        flags.append(op)
        if op == "/":
            if a == 0 or math.isnan(a):
                return math.nan
            return math.copysign(math.inf, a) * math.copysign(1.0, b)
        return math.inf  # 0 ** negative
    except OverflowError:
        flags.append(op)
        return math.inf
    except ValueError:
        flags.append(op)
        return math.nan


def _ieee_call(func, x, flags):
    try:
        return _MATH[func](x)
    except ValueError:
        flags.append(func)
        if func == "log" and x == 0:
            return -math.inf
        return math.nan
    except OverflowError:
        flags.append(func)
        return math.inf


def _walk(e: Expr, env: Binding, flags: list) -> float:
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        if e.name in CONSTANTS:
            return CONSTANTS[e.name]
        try:
            return float(env[e.name])
        except KeyError:
            raise UnboundVariableError(f"variable {e.name!r} is not bound") from None
    if isinstance(e, Neg):
        return -_walk(e.child, env, flags)
    if isinstance(e, BinOp):
        return _ieee_binary(e.op, _walk(e.left, env, flags), _walk(e.right, env, flags), flags)
    return _ieee_call(e.func, _walk(e.args[0], env, flags), flags)


def evaluate(e, env: Binding | None = None) -> float:
    """Evaluate ``e`` (Expr or text) at the binding ``env``.

    Domain errors yield NaN or infinity and emit a :class:`DomainWarning`.
    """
    flags: list = []
    value = _walk(to_expr(e), env or {}, flags)
    if flags:
        warnings.warn(f"domain error in {sorted(set(flags))}", DomainWarning, stacklevel=2)
    return value


def evaluate_grid(e, table: Iterable[Binding]) -> List[float]:
    """Evaluate ``e`` at every binding of ``table``, preserving order."""
    e = to_expr(e)
    names = sorted(free_vars(e))
    fn = compile_expr(e, names)
    out = []
    for row in table:
        try:
            args = [row[n] for n in names]
        except KeyError as exc:
            raise UnboundVariableError(f"variable {exc.args[0]!r} is not bound") from None
        out.append(fn(*args))
    return out


# -- code generation ----------------------------------------------------------


def _source(e: Expr, argmap: Dict[str, str]) -> str:
    if isinstance(e, Const):
        return repr(e.value)
    if isinstance(e, Var):
        if e.name in CONSTANTS:
            return repr(CONSTANTS[e.name])
        try:
            return argmap[e.name]
        except KeyError:
            raise UnboundVariableError(f"variable {e.name!r} is not an argument") from None
    if isinstance(e, Neg):
        return f"(-{_source(e.child, argmap)})"
    if isinstance(e, BinOp):
        left, right = _source(e.left, argmap), _source(e.right, argmap)
        if e.op == "^":
            return f"_pow({left}, {right})"
        return f"({left} {e.op} {right})"
    return f"_f_{e.func}({_source(e.args[0], argmap)})"


def python_source(e: Expr, names: Sequence[str]) -> str:
    """Python source of a function ``_expr(*names)`` computing ``e``."""
    argmap = {n: f"_a{i}" for i, n in enumerate(names)}
    params = ", ".join(argmap[n] for n in names)
    return f"def _expr({params}):\n    return {_source(to_expr(e), argmap)}\n"


def compile_expr(e, names: Sequence[str], vectorized: bool = False) -> Callable[..., float]:
    """Compile ``e`` into a positional function of ``names``.

    With ``vectorized=True`` the function accepts numpy arrays and returns an
    array broadcast against all inputs.
    """
    e = to_expr(e)
    names = list(names)
    src = python_source(e, names)
    if vectorized:
        ns = {f"_f_{k}": v for k, v in _NUMPY.items()}
        ns["_pow"] = np.power
        exec(src, ns)
        raw = ns["_expr"]

        def fn(*args):
            arrays = [np.asarray(a, dtype=float) for a in args]
            with np.errstate(all="ignore"):
                out = raw(*arrays)
            shape = np.broadcast_shapes(*(a.shape for a in arrays)) if arrays else ()
            return np.broadcast_to(np.asarray(out, dtype=float), shape)

        return fn

    ns = {f"_f_{k}": v for k, v in _MATH.items()}
    ns["_pow"] = _pow
    exec(src, ns)
    raw = ns["_expr"]

    def fn(*args):
        args = [float(a) for a in args]
        try:
            return float(raw(*args))
        except (ArithmeticError, ValueError):
            return evaluate(e, dict(zip(names, args)))

    return fn
