"""Integration over boxes in orthogonal coordinates.

The integrand is weighted by the volume element ``J``, the product of the
scale factors.  A bound given as a single number fixes that variable: it is
substituted into ``f`` and ``J`` and not integrated over, which is how
surface integrals on coordinate level sets are written.

Both methods evaluate the integrand only at interior points, so chart
singularities on the boundary (``r = 0``, ``theta = 0``) are harmless as
long as ``J*f`` stays finite inside.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping, Optional

import numpy as np

from multicalc.coords import coordinate_system
from multicalc.errors import DomainError
from multicalc.expr import compile_expr, to_expr

MAX_ADAPTIVE_DIM = 6
DEFAULT_MC_SAMPLES = 100_000
DEFAULT_REL_TOL = 1e-6
_CHUNK = 100_000


@dataclass(frozen=True)
class IntegralResult:
    """Estimate with its uncertainty.

    Attributes
    ----------
    value : float
    error : float
        Estimated absolute error (adaptive) or one standard error (MC).
    evaluations : int
        Number of integrand evaluations.
    method : str
    converged : bool
        False when the budget ran out before the tolerance was met.
    seed : int or None
        Seed of the Monte Carlo generator.
    """

    value: float
    error: float
    evaluations: int
    method: str
    converged: bool
    seed: Optional[int] = None


def _split_bounds(bounds: Mapping):
    names, fixed, free = [], {}, {}
    for name, b in bounds.items():
        names.append(name)
        if np.ndim(b) == 0:
            fixed[name] = float(b)
            continue
        lo, hi = (float(v) for v in b)
        if not lo <= hi:
            raise ValueError(f"bound for {name} has lower {lo} > upper {hi}")
        free[name] = (lo, hi)
    if not free:
        raise ValueError("at least one variable must have a (lower, upper) range")
    return names, fixed, free


def _weighted(f, names, coordinates) -> Callable:
    """Vectorized ``J*f`` over all variables, positional in ``names``."""
    cs = coordinate_system(coordinates, names)
    jac = cs.jacobian()
    J = None if isinstance(jac, float) else compile_expr(jac, names, vectorized=True)

    if isinstance(f, (int, float)) and not isinstance(f, bool):
        c = float(f)
        inner = lambda *cols: np.full(cols[0].shape, c)
    elif callable(f):
        inner = _vectorize_callable(f)
    else:
        inner = compile_expr(to_expr(f), names, vectorized=True)

    def fn(*cols):
        vals = np.asarray(inner(*cols), dtype=float)
        if J is not None:
            vals = vals * J(*cols)
        if not np.all(np.isfinite(vals)):
            raise DomainError("integrand is not finite inside the domain")
        return vals

    return fn


def _vectorize_callable(f) -> Callable:
    """Try ``f`` on whole columns; fall back to one call per point."""

    def fn(*cols):
        n = cols[0].shape[0]
        try:
            out = np.asarray(f(*cols), dtype=float)
            if out.shape == (n,):
                return out
            if out.ndim == 0:
                return np.full(n, float(out))
        except (TypeError, ValueError):
            pass
        return np.array([float(f(*row)) for row in zip(*cols)])

    return fn


def _columns(free_pts: np.ndarray, names, fixed, free_names):
    n = free_pts.shape[0]
    pos = {name: k for k, name in enumerate(free_names)}
    return [free_pts[:, pos[name]] if name in pos else np.full(n, fixed[name]) for name in names]


def integral(
    f,
    bounds: Mapping,
    coordinates="cartesian",
    method: Optional[str] = None,
    rel_tol: Optional[float] = None,
    abs_tol: float = 0.0,
    budget: Optional[int] = None,
    seed: Optional[int] = None,
) -> IntegralResult:
    """Integrate ``J*f`` over a box.

    Parameters
    ----------
    f : str, Expr, callable or number
        Integrand.  Callables take every variable in ``bounds`` positionally,
        fixed ones included, and may be vectorized.
    bounds : mapping
        ``name -> (lower, upper)`` to integrate, or ``name -> value`` to fix.
    coordinates : str, list or CoordinateSystem
    method : {"adaptive", "monte-carlo"}, optional
        Defaults to adaptive up to six integrated dimensions.
    rel_tol, abs_tol : float
        Target error.  The adaptive default is ``rel_tol=1e-6``.  Monte
        Carlo always spends its budget and only uses the tolerance to set
        ``converged``.
    budget : int, optional
        Maximum integrand evaluations (adaptive, default 10**7) or samples
        (Monte Carlo, default 10**5).
    seed : int, optional
        Monte Carlo seed; a fresh one is drawn and recorded when omitted.

    Examples
    --------
    >>> integral("x", {"x": (0, 1)}).value
    0.5
    >>> round(integral(1, {"r": (0, 1), "theta": (0, 2 * np.pi)}, "polar").value, 4)
    3.1416
    """
    names, fixed, free = _split_bounds(bounds)
    fn = _weighted(f, names, coordinates)
    free_names = list(free)
    lo = np.array([free[n][0] for n in free_names])
    hi = np.array([free[n][1] for n in free_names])

    def evaluate(pts):
        return fn(*_columns(pts, names, fixed, free_names))

    if method is None:
        method = "adaptive" if len(free) <= MAX_ADAPTIVE_DIM else "monte-carlo"
    if method == "adaptive":
        if len(free) > MAX_ADAPTIVE_DIM:
            raise ValueError(f"adaptive integration supports at most {MAX_ADAPTIVE_DIM} dimensions")
        tol = DEFAULT_REL_TOL if rel_tol is None else rel_tol
        return _adaptive(evaluate, lo, hi, tol, abs_tol, budget or 10**7)
    if method == "monte-carlo":
        return _monte_carlo(evaluate, lo, hi, rel_tol, abs_tol, budget or DEFAULT_MC_SAMPLES, seed)
    raise ValueError(f"unknown method {method!r}")


def surface_integral_fixed(f, bounds: Mapping, coordinates="cartesian", **kwargs) -> IntegralResult:
    """Integral over the level set where exactly one coordinate is fixed.

    This is :func:`integral` with one scalar bound; the fixed coordinate's
    scale factor stays in ``J``.

    Examples
    --------
    >>> b = {"r": 1, "theta": (0, np.pi), "phi": (0, 2 * np.pi)}
    >>> round(surface_integral_fixed(1, b, "spherical").value / np.pi, 6)
    4.0
    """
    n_fixed = sum(np.ndim(b) == 0 for b in bounds.values())
    if n_fixed != 1:
        raise ValueError(f"exactly one coordinate must be fixed, got {n_fixed}")
    return integral(f, bounds, coordinates, **kwargs)


# -- adaptive ------------------------------------------------------------------


@lru_cache(maxsize=None)
def _rule(points: int, dim: int):
    """Tensor-product Gauss-Legendre nodes on [0, 1]^dim and weights."""
    x, w = np.polynomial.legendre.leggauss(points)
    x, w = (x + 1) / 2, w / 2
    grids = np.meshgrid(*([x] * dim), indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=1)
    weights = np.ones(1)
    for _ in range(dim):
        weights = np.multiply.outer(weights, w).ravel()
    return nodes, weights


def _cell(evaluate, lo, hi):
    """Degree-7 estimate, its error against degree 5, evaluation count."""
    width = hi - lo
    vol = float(np.prod(width))
    n7, w7 = _rule(7, len(lo))
    n5, w5 = _rule(5, len(lo))
    q7 = vol * float(w7 @ evaluate(lo + n7 * width))
    q5 = vol * float(w5 @ evaluate(lo + n5 * width))
    return q7, abs(q7 - q5), len(w7) + len(w5)


def _adaptive(evaluate, lo, hi, rel_tol, abs_tol, budget) -> IntegralResult:
    span = np.where(hi > lo, hi - lo, 1.0)
    q, err, evals = _cell(evaluate, lo, hi)
    # heap entries: (-error, tiebreak, value, lo, hi)
    heap = [(-err, 0, q, lo, hi)]
    total, total_err, counter = q, err, 1
    cost = evals
    while total_err > max(abs_tol, rel_tol * abs(total)) and evals + 2 * cost <= budget:
        neg_err, _, q, a, b = heapq.heappop(heap)
        axis = int(np.argmax((b - a) / span))
        mid = (a[axis] + b[axis]) / 2
        b1, a2 = b.copy(), a.copy()
        b1[axis] = a2[axis] = mid
        total -= q
        total_err += neg_err
        for ca, cb in ((a, b1), (a2, b)):
            cq, ce, n = _cell(evaluate, ca, cb)
            evals += n
            total += cq
            total_err += ce
            heapq.heappush(heap, (-ce, counter, cq, ca, cb))
            counter += 1
    value = math.fsum(h[2] for h in heap)
    error = math.fsum(-h[0] for h in heap)
    converged = error <= max(abs_tol, rel_tol * abs(value))
    return IntegralResult(value, error, evals, "adaptive", converged)


# -- Monte Carlo ---------------------------------------------------------------


def _monte_carlo(evaluate, lo, hi, rel_tol, abs_tol, samples, seed) -> IntegralResult:
    if samples < 2:
        raise ValueError("Monte Carlo needs at least two samples")
    if seed is None:
        seed = int(np.random.SeedSequence().entropy % 2**63)
    rng = np.random.Generator(np.random.PCG64(seed))
    vol = float(np.prod(hi - lo))
    count, mean, m2 = 0, 0.0, 0.0
    while count < samples:
        n = min(_CHUNK, samples - count)
        # midpoints of a 2**-53 lattice never touch the boundary
        u = (rng.integers(0, 2**53, size=(n, len(lo))) + 0.5) * 2.0**-53
        vals = evaluate(lo + u * (hi - lo))
        # Chan's parallel update of the running mean and sum of squares
        cm = float(vals.mean())
        cm2 = float(((vals - cm) ** 2).sum())
        delta = cm - mean
        total = count + n
        mean += delta * n / total
        m2 += cm2 + delta**2 * count * n / total
        count = total
    value = vol * mean
    error = vol * math.sqrt(m2 / (count - 1) / count)
    if rel_tol is None and not abs_tol:
        converged = True
    else:
        converged = error <= max(abs_tol, (rel_tol or 0.0) * abs(value))
    return IntegralResult(value, error, count, "monte-carlo", converged, seed)
