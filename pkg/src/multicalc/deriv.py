"""Arbitrary-order derivatives of scalar- or tensor-valued targets.

Symbolic targets (expressions or tensors of expressions) are differentiated
exactly.  Callables are differentiated with central finite differences whose
stencil coefficients come from the moment conditions

    sum_j C_j j^m = [m == n],   m = 0 .. 2i,

solved exactly over the offsets ``-i .. i``.  The derivative is then
``n! / h^n * sum_j C_j f(x + j h)``, one factor per differentiated variable.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Callable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from multicalc.errors import DomainError, ShapeError
from multicalc.expr import diff_symbolic, to_expr
from multicalc.tensor import Tensor, as_tensor, einstein

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Stencil:
    """Central finite-difference stencil for the ``order``-th derivative.

    ``coefficients`` satisfy the moment conditions; ``weights`` are the same
    coefficients times ``order!``, i.e. the familiar form where the
    derivative is ``sum(weights * f(x + offsets * h)) / h**order``.
    """

    order: int
    accuracy: int
    half_width: int
    offsets: Tuple[int, ...]
    exact: Tuple[Fraction, ...]

    @property
    def coefficients(self) -> Tuple[float, ...]:
        return tuple(float(c) for c in self.exact)

    @property
    def weights(self) -> Tuple[float, ...]:
        f = math.factorial(self.order)
        return tuple(float(c * f) for c in self.exact)


def _solve_exact(a, b):
    """Gaussian elimination with partial pivoting over Fractions."""
    n = len(a)
    m = [list(row) + [rhs] for row, rhs in zip(a, b)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(m[r][col]))
        if m[piv][col] == 0:
            raise ArithmeticError("singular moment system")
        m[col], m[piv] = m[piv], m[col]
        for r in range(col + 1, n):
            factor = m[r][col] / m[col][col]
            if factor:
                for c in range(col, n + 1):
                    m[r][c] -= factor * m[col][c]
    x = [Fraction(0)] * n
    for r in reversed(range(n)):
        s = m[r][n] - sum(m[r][c] * x[c] for c in range(r + 1, n))
        x[r] = s / m[r][r]
    return x


@functools.lru_cache(maxsize=None)
def fd_coefficients(n: int, p: int = 4) -> Stencil:
    """Stencil for the ``n``-th derivative with accuracy ``O(h^p)``.

    Parameters
    ----------
    n : int
        Derivative order, ``n >= 0``.  ``n = 0`` gives the trivial stencil.
    p : int
        Accuracy order, a positive even integer.
    """
    if n < 0:
        raise ValueError("derivative order must be non-negative")
    if p < 2 or p % 2:
        raise ValueError(f"accuracy must be a positive even integer, got {p}")
    if n == 0:
        return Stencil(0, p, 0, (0,), (Fraction(1),))
    i = (n + p - 1) // 2
    offsets = tuple(range(-i, i + 1))
    vander = [[Fraction(j) ** m for j in offsets] for m in range(2 * i + 1)]
    rhs = [Fraction(int(m == n)) for m in range(2 * i + 1)]
    return Stencil(n, p, i, offsets, tuple(_solve_exact(vander, rhs)))


def default_step(x: float, n: int, p: int) -> float:
    """Step ``eps^(1/(n+p)) * max(1, |x|)``, adjusted so ``x + h`` is exact."""
    h = EPS ** (1.0 / (n + p)) * max(1.0, abs(x))
    return (x + h) - x


Order = Union[int, Sequence[int], Mapping[str, int]]


@dataclass(frozen=True)
class DerivativeRequest:
    """Normalized derivative request.

    ``orders`` is None for the outer layout (one ``outer``-th derivative per
    variable, stacked on a new last axis); otherwise it holds one order per
    variable.  ``vector_arg`` marks callables taking a single parameter
    vector.
    """

    target: object
    variables: Tuple[str, ...]
    point: Optional[Tuple[float, ...]] = None
    orders: Optional[Tuple[int, ...]] = None
    outer: int = 1
    accuracy: int = 4
    steps: Optional[Tuple[Optional[float], ...]] = None
    vector_arg: bool = False

    @property
    def symbolic(self) -> bool:
        return not callable(self.target)


def _variables(var):
    """Split ``var`` into names, an optional point and the vector flag."""
    if isinstance(var, str):
        return (var,), None, False
    if isinstance(var, Mapping):
        names = tuple(var)
        return names, tuple(float(v) for v in var.values()), False
    seq = list(np.atleast_1d(np.asarray(var, dtype=object)))
    if seq and all(isinstance(v, str) for v in seq):
        return tuple(seq), None, False
    if seq and all(isinstance(v, Real) for v in seq):
        return tuple(f"x{k}" for k in range(len(seq))), tuple(float(v) for v in seq), True
    raise TypeError("var must be a name, a list of names, a name->value mapping or a numeric vector")


def _orders(order: Order, names):
    if isinstance(order, Mapping):
        unknown = set(order) - set(names)
        if unknown:
            raise ValueError(f"orders given for undeclared variables {sorted(unknown)}")
        return tuple(int(order.get(n, 0)) for n in names), 1
    if isinstance(order, Real):
        order = [order]
    order = [int(n) for n in order]
    if len(order) == 1 and len(names) > 1:
        return None, order[0]
    if len(order) != len(names):
        raise ShapeError(f"{len(order)} orders for {len(names)} variables")
    return tuple(order), 1


def _steps(h, names):
    if h is None:
        return None
    if isinstance(h, Mapping):
        return tuple(None if h.get(n) is None else float(h[n]) for n in names)
    if isinstance(h, Real):
        return (float(h),) * len(names)
    h = [float(v) for v in h]
    if len(h) != len(names):
        raise ShapeError(f"{len(h)} step sizes for {len(names)} variables")
    return tuple(h)


def make_request(f, var, order: Order = 1, accuracy: int = 4, h=None) -> DerivativeRequest:
    names, point, vector_arg = _variables(var)
    orders, outer = _orders(order, names)
    if any(n < 0 for n in (orders or (outer,))):
        raise ValueError("derivative orders must be non-negative")
    if accuracy < 2 or accuracy % 2:
        raise ValueError(f"accuracy must be a positive even integer, got {accuracy}")
    if not callable(f):
        if vector_arg:
            raise TypeError("a numeric vector var needs a callable target")
        f = as_tensor(f) if isinstance(f, (list, tuple, np.ndarray, Tensor)) else to_expr(f)
    return DerivativeRequest(f, names, point, orders, outer, accuracy, _steps(h, names), vector_arg)


def _per_variable(req: DerivativeRequest):
    """Order vectors to compute, plus whether to stack them on a new axis."""
    if req.orders is not None:
        return [req.orders], False
    m = len(req.variables)
    return [tuple(req.outer if j == k else 0 for j in range(m)) for k in range(m)], True


def _stack(parts, stacked):
    if not stacked:
        return parts[0]
    arr = np.stack([p.data for p in parts], axis=-1)
    return Tensor(arr)


# -- symbolic ---------------------------------------------------------------


def _diff_all(e, names, orders):
    for name, n in zip(names, orders):
        if n:
            e = diff_symbolic(e, name, n)
    return e


def derivative_symbolic(req: DerivativeRequest) -> Tensor:
    """Exact derivatives of an expression or expression tensor.

    The result is evaluated when the request carries a point.
    """
    t = req.target if isinstance(req.target, Tensor) else Tensor(np.array(req.target, dtype=object))
    parts = []
    for orders in _per_variable(req)[0]:
        out = np.empty(t.shape, dtype=object)
        for idx, e in np.ndenumerate(t.data):
            out[idx] = _diff_all(to_expr(e), req.variables, orders)
        parts.append(Tensor(out))
    res = _stack(parts, _per_variable(req)[1])
    if req.point is not None:
        res = res.evaluate(dict(zip(req.variables, req.point)))
    return res


# -- numeric ----------------------------------------------------------------


def _as_callable(req: DerivativeRequest) -> Callable:
    """Function of a point tuple returning an ndarray."""
    f = req.target
    if req.symbolic:
        t = f if isinstance(f, Tensor) else Tensor(np.array(f, dtype=object))
        names = req.variables
        return lambda pt: t.evaluate(dict(zip(names, pt))).data
    if req.vector_arg:
        return lambda pt: np.asarray(f(np.array(pt)), dtype=float)
    return lambda pt: np.asarray(f(*pt), dtype=float)


def mixed_partial(fn: Callable, point: Sequence[float], orders: Sequence[int], accuracy: int = 4, steps=None) -> np.ndarray:
    """Finite-difference estimate of one mixed partial derivative.

    Parameters
    ----------
    fn : callable
        Maps a tuple of coordinates to an array (any shape).
    point : sequence of float
    orders : sequence of int
        Order per coordinate; zero orders are skipped.
    accuracy : int
    steps : sequence of float or None, optional
        Step per coordinate; ``None`` entries use :func:`default_step`.
    """
    point = tuple(float(v) for v in point)
    active = [k for k, n in enumerate(orders) if n > 0]
    if not active:
        return _checked(fn(point))
    stencils = [fd_coefficients(orders[k], accuracy) for k in active]
    hs = []
    for k in active:
        given = None if steps is None else steps[k]
        hs.append(default_step(point[k], orders[k], accuracy) if given is None else given)
    values = []
    for offs in np.ndindex(*(len(s.offsets) for s in stencils)):
        pt = list(point)
        for k, s, h, o in zip(active, stencils, hs, offs):
            pt[k] = point[k] + s.offsets[o] * h
        values.append(_checked(fn(tuple(pt))))
    fshape = values[0].shape
    grid = np.array(values).reshape([len(s.offsets) for s in stencils] + list(fshape))
    weights = functools.reduce(np.multiply.outer, [np.array(s.weights) for s in stencils])
    jn = [f"j{k}" for k in range(len(active))]
    fn_names = [f"f{k}" for k in range(len(fshape))]
    total = einstein(Tensor(weights, jn), Tensor(grid, jn + fn_names)).data
    scale = math.prod(h ** orders[k] for k, h in zip(active, hs))
    return total / scale


def _checked(v) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("non-finite function value inside the stencil")
    return arr


def derivative_numeric(req: DerivativeRequest) -> Tensor:
    """Central finite-difference derivatives at the request's point."""
    if req.point is None:
        raise ValueError("numeric derivatives need an evaluation point")
    fn = _as_callable(req)
    orders_list, stacked = _per_variable(req)
    parts = [Tensor(mixed_partial(fn, req.point, o, req.accuracy, req.steps)) for o in orders_list]
    return _stack(parts, stacked)


def derivative(f, var, order: Order = 1, accuracy: int = 4, h=None, method: str = "auto") -> Tensor:
    """Derivatives of ``f`` with respect to the variables in ``var``.

    Parameters
    ----------
    f : str, Expr, tensor of those, or callable
        Callables receive the variables positionally, or a single ndarray
        when ``var`` is a numeric vector.
    var : str, list of str, mapping or numeric vector
        Variable names; a mapping also gives the evaluation point.
    order : int, list of int or mapping
        A single order with several variables appends one axis holding the
        derivative with respect to each variable.  One order per variable
        (or a mapping) gives a single mixed partial.
    accuracy : int
        Even accuracy order of the finite-difference stencil.
    h : float, list or mapping, optional
        Step sizes; defaults to :func:`default_step`.
    method : {"auto", "symbolic", "numeric"}
        ``auto`` differentiates expressions symbolically and callables
        numerically.

    Returns
    -------
    Tensor
        Expressions for a symbolic request without a point, numbers
        otherwise.

    Examples
    --------
    >>> derivative("x^2*y^2", ["x", "y"]).tolist()
    ['2*x*y^2', 'x^2*(2*y)']
    >>> derivative(lambda x, y: x * y, {"x": 1, "y": 2}).data.round(8).tolist()
    [2.0, 1.0]
    """
    req = make_request(f, var, order, accuracy, h)
    if method == "numeric" or (method == "auto" and not req.symbolic):
        return derivative_numeric(req)
    if method not in ("auto", "symbolic"):
        raise ValueError(f"unknown method {method!r}")
    if not req.symbolic:
        raise TypeError("symbolic differentiation needs an expression target")
    return derivative_symbolic(req)
