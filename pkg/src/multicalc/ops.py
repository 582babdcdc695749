"""Gradient, Jacobian, Hessian, divergence, curl and Laplacian.

Operators work in any orthogonal coordinate system given by scale factors.
Expression targets are handled symbolically.  Callables get finite
differences for the target while the scale factors and their derivatives
stay symbolic and are evaluated at the point.  Tensor-valued targets keep
their component axes in front; operators act on (or append) the last axis.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from multicalc.coords import CoordinateSystem, at, coordinate_system, scalar_diff
from multicalc.deriv import DerivativeRequest, _as_callable, make_request, mixed_partial
from multicalc.errors import ShapeError
from multicalc.expr import combine, demote, diff_symbolic, to_expr
from multicalc.tensor import Tensor, epsilon


@dataclass
class _Problem:
    req: DerivativeRequest
    coords: CoordinateSystem
    env: Optional[dict]
    numeric: bool
    values: np.ndarray

    @property
    def d(self) -> int:
        return self.coords.dim

    def scalar(self, s):
        """A scale-factor quantity in the working mode (float or Expr)."""
        return at(s, self.env) if self.numeric else s

    def partial(self, orders: Tuple[int, ...]) -> np.ndarray:
        """Object array of one mixed partial of every component."""
        if self.numeric:
            fn = _as_callable(self.req)
            return np.asarray(mixed_partial(fn, self.req.point, orders, self.req.accuracy, self.req.steps)).astype(object)
        out = np.empty(self.values.shape, dtype=object)
        for idx, e in np.ndenumerate(self.values):
            for name, n in zip(self.req.variables, orders):
                if n and not isinstance(e, float):
                    e = demote(diff_symbolic(to_expr(e), name, n))
                elif n:
                    e = 0.0
            out[idx] = e
        return out

    def unit(self, i: int, n: int = 1) -> Tuple[int, ...]:
        return tuple(n if k == i else 0 for k in range(self.d))

    def finish(self, arr: np.ndarray) -> Tensor:
        t = Tensor(arr)
        if not self.numeric and self.env is not None:
            return t.evaluate(self.env)
        return t


def _setup(f, var, coordinates, accuracy, h) -> _Problem:
    req = make_request(f, var, 1, accuracy, h)
    coords = coordinate_system(coordinates, req.variables)
    env = None if req.point is None else dict(zip(req.variables, req.point))
    if env is not None:
        coords.factors_at(env)
    numeric = not req.symbolic
    if numeric:
        if env is None:
            raise ValueError("callables need an evaluation point")
        values = np.asarray(_as_callable(req)(req.point), dtype=float).astype(object)
    else:
        t = req.target
        values = t.data if isinstance(t, Tensor) else np.array(demote(t), dtype=object)
        values = np.array(values, dtype=object)
    return _Problem(req, coords, env, numeric, values)


def _vector_axis(p: _Problem):
    if p.values.ndim == 0 or p.values.shape[-1] != p.d:
        raise ShapeError(f"the last axis must have extent {p.d}, got shape {p.values.shape}")


def gradient(f, var, coordinates="cartesian", accuracy: int = 4, h=None) -> Tensor:
    """Gradient ``(1/h_i) d_i F`` appended as a last axis.

    Parameters
    ----------
    f : expression(s) or callable
        Expression strings, Exprs or nested lists of them; or a callable
        taking the variables positionally (a single vector when ``var`` is
        a numeric vector).
    var : list of str, mapping or numeric vector
        Variables, optionally with the evaluation point.
    coordinates : str, list or CoordinateSystem
        Built-in name or custom scale factors, one per variable.

    Examples
    --------
    >>> gradient("x*y*z", ["x", "y", "z"]).tolist()
    ['y*z', 'x*z', 'x*y']
    """
    p = _setup(f, var, coordinates, accuracy, h)
    out = np.empty(p.values.shape + (p.d,), dtype=object)
    for i in range(p.d):
        hi = p.scalar(p.coords.factors[i])
        di = p.partial(p.unit(i))
        for idx in np.ndindex(p.values.shape):
            out[idx + (i,)] = combine("/", di[idx], hi)
    return p.finish(out)


def jacobian(f, var, coordinates="cartesian", accuracy: int = 4, h=None) -> Tensor:
    """Gradient reshaped to a matrix (one row per flattened component)."""
    g = gradient(f, var, coordinates, accuracy, h)
    return Tensor(g.data.reshape(-1, g.shape[-1]))


def hessian(f, var, coordinates="cartesian", accuracy: int = 4, h=None) -> Tensor:
    """Matrix of second partials per component, Cartesian coordinates only."""
    p = _setup(f, var, coordinates, accuracy, h)
    if not p.coords.is_cartesian:
        raise ValueError("the Hessian is only defined here in Cartesian coordinates")
    out = np.empty(p.values.shape + (p.d, p.d), dtype=object)
    for i, j in itertools.combinations_with_replacement(range(p.d), 2):
        orders = tuple(int(k == i) + int(k == j) for k in range(p.d))
        dij = p.partial(orders)
        for idx in np.ndindex(p.values.shape):
            out[idx + (i, j)] = out[idx + (j, i)] = dij[idx]
    return p.finish(out)


def divergence(f, var, coordinates="cartesian", accuracy: int = 4, h=None) -> Tensor:
    """Divergence over the last axis.

    Uses ``(1/J) sum_i [d_i(J/h_i) F_i + (J/h_i) d_i F_i]`` so the
    scale-factor derivatives are taken symbolically.
    """
    p = _setup(f, var, coordinates, accuracy, h)
    _vector_axis(p)
    cs, names = p.coords, p.req.variables
    lead = p.values.shape[:-1]
    total = np.full(lead, 0.0, dtype=object)
    for i in range(p.d):
        a = cs.cofactor(i)
        da, a = p.scalar(scalar_diff(a, names[i])), p.scalar(a)
        di = p.partial(p.unit(i))
        for idx in np.ndindex(lead):
            term = combine("+", combine("*", da, p.values[idx + (i,)]), combine("*", a, di[idx + (i,)]))
            total[idx] = combine("+", total[idx], term)
    J = p.scalar(cs.jacobian())
    for idx in np.ndindex(lead):
        total[idx] = combine("/", total[idx], J)
    return p.finish(total)


def curl(f, var, coordinates="cartesian", accuracy: int = 4, h=None) -> Tensor:
    """Generalized curl over the last axis.

    In ``d`` dimensions the result carries ``d - 2`` new axes:
    ``sum_ij eps_{i j k...} (d_i(h_j) F_j + h_j d_i F_j) / (h_i h_j)``.
    Two dimensions give a scalar per field and three give a vector.
    """
    p = _setup(f, var, coordinates, accuracy, h)
    if p.d < 2:
        raise ShapeError("curl needs at least two dimensions")
    _vector_axis(p)
    cs, names, d = p.coords, p.req.variables, p.d
    lead = p.values.shape[:-1]
    eps = epsilon(d).data
    hs = [p.scalar(s) for s in cs.factors]
    dh = [[p.scalar(scalar_diff(cs.factors[j], names[i])) for j in range(d)] for i in range(d)]
    dF = [p.partial(p.unit(i)) for i in range(d)]
    out = np.full(lead + (d,) * (d - 2), 0.0, dtype=object)
    for ks in itertools.product(range(d), repeat=d - 2):
        for i, j in itertools.permutations(range(d), 2):
            sign = eps[(i, j) + ks]
            if not sign:
                continue
            for idx in np.ndindex(lead):
                inner = combine("+", combine("*", dh[i][j], p.values[idx + (j,)]), combine("*", hs[j], dF[i][idx + (j,)]))
                term = combine("/", inner, combine("*", hs[i], hs[j]))
                out[idx + ks] = combine("+" if sign > 0 else "-", out[idx + ks], term)
    return p.finish(out)


def laplacian(f, var, coordinates="cartesian", accuracy: int = 4, h=None) -> Tensor:
    """Laplacian of every component.

    Uses ``(1/J) sum_i [d_i(J/h_i^2) d_i F + (J/h_i^2) d_i^2 F]``.
    """
    p = _setup(f, var, coordinates, accuracy, h)
    cs, names = p.coords, p.req.variables
    shape = p.values.shape
    total = np.full(shape, 0.0, dtype=object)
    for i in range(p.d):
        b = cs.cofactor(i, 2)
        db, b = p.scalar(scalar_diff(b, names[i])), p.scalar(b)
        d1 = p.partial(p.unit(i)) if db != 0.0 else None
        d2 = p.partial(p.unit(i, 2))
        for idx in np.ndindex(shape):
            term = combine("*", b, d2[idx])
            if d1 is not None:
                term = combine("+", combine("*", db, d1[idx]), term)
            total[idx] = combine("+", total[idx], term)
    J = p.scalar(cs.jacobian())
    for idx in np.ndindex(shape):
        total[idx] = combine("/", total[idx], J)
    return p.finish(total)
