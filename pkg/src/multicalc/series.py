"""Integer partitions, multivariate Taylor series and Hermite polynomials."""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from multicalc.deriv import mixed_partial
from multicalc.errors import DomainError, ShapeError
from multicalc.expr import Expr, demote, diff_symbolic, evaluate, format_expr, substitute, to_expr
from multicalc.expr.printer import format_number
from multicalc.expr.tree import ZERO, add, call, mul, neg, num, power, sub, Var

MultiIndex = Tuple[int, ...]


def _partitions_of(m: int, parts: int, largest: Optional[int] = None):
    """Non-increasing tuples of positive integers summing to ``m``."""
    if m == 0:
        yield ()
        return
    if parts == 0:
        return
    largest = m if largest is None else largest
    for first in range(min(m, largest), 0, -1):
        for rest in _partitions_of(m - first, parts - 1, first):
            yield (first,) + rest


def partitions(n: int, length: int, fill: bool = False, perm: bool = False, equal: bool = True) -> List[MultiIndex]:
    """Partitions of ``n`` into at most ``length`` parts.

    Parameters
    ----------
    n : int
    length : int
        Maximum number of parts.
    fill : bool
        Zero-pad every partition to exactly ``length`` components.
    perm : bool
        Include every distinct permutation of each partition.
    equal : bool
        Only partitions of ``n``; otherwise of every ``m`` in ``0..n``.

    Returns
    -------
    list of tuple
        Sorted by total degree, then lexicographically.

    Examples
    --------
    >>> partitions(2, 2)
    [(1, 1), (2,)]
    >>> partitions(1, 2, fill=True, perm=True, equal=False)
    [(0, 0), (0, 1), (1, 0)]
    """
    if n < 0 or length < 1:
        raise ValueError("partitions needs n >= 0 and length >= 1")
    out = set()
    for m in ([n] if equal else range(n + 1)):
        for p in _partitions_of(m, length):
            if fill:
                p = p + (0,) * (length - len(p))
            out.update(set(itertools.permutations(p)) if perm else {p})
    return sorted(out, key=lambda k: (sum(k), k))


def multi_factorial(k: Sequence[int]) -> int:
    return math.prod(math.factorial(v) for v in k)


@dataclass(frozen=True)
class Term:
    label: str
    coef: float
    degree: MultiIndex

    @property
    def total(self) -> int:
        return sum(self.degree)


@dataclass(frozen=True)
class SeriesResult:
    """Polynomial as an expression plus its table of terms.

    Every term of total degree up to ``order`` is listed, zero
    coefficients included; ``expr`` keeps only the nonzero ones.
    """

    expr: Union[Expr, float]
    order: int
    variables: Tuple[str, ...]
    center: Tuple[float, ...]
    terms: Tuple[Term, ...] = field(repr=False)

    def coefficients(self) -> Dict[MultiIndex, float]:
        return {t.degree: t.coef for t in self.terms}

    def evaluate(self, env: Mapping[str, float]) -> float:
        return self.expr if isinstance(self.expr, float) else evaluate(self.expr, env)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", "coef", "degree"])
        for t in self.terms:
            w.writerow([t.label, repr(t.coef), ",".join(map(str, t.degree))])
        return buf.getvalue()

    def __str__(self):
        return format_expr(self.expr) if isinstance(self.expr, Expr) else format_number(self.expr)


def _factor_label(name: str, c: float, k: int) -> str:
    if c == 0:
        return f"{name}^{k}"
    sign = "-" if c > 0 else "+"
    return f"({name}{sign}{format_number(abs(c))})^{k}"


def term_label(names: Sequence[str], center: Sequence[float], k: MultiIndex) -> str:
    parts = [_factor_label(n, c, e) for n, c, e in zip(names, center, k) if e]
    return "*".join(parts) if parts else "1"


def _monomial(names, center, k, coef: float = 1.0) -> Expr:
    out: Expr = num(coef)
    for n, c, e in zip(names, center, k):
        if e:
            base = sub(Var(n), num(c)) if c >= 0 else add(Var(n), num(-c))
            out = mul(out, power(base, num(e)))
    return out


def assemble(names, center, order: int, coefs: Mapping[MultiIndex, float]) -> SeriesResult:
    """Build a SeriesResult from coefficients keyed by multi-index."""
    d = len(names)
    terms, expr = [], None
    for k in partitions(order, d, fill=True, perm=True, equal=False):
        c = float(coefs.get(k, 0.0))
        terms.append(Term(term_label(names, center, k), c, k))
        if c == 0:
            continue
        piece = _monomial(names, center, k, abs(c))
        if expr is None:
            expr = piece if c > 0 else neg(piece)
        else:
            expr = add(expr, piece) if c > 0 else sub(expr, piece)
    expr = 0.0 if expr is None else demote(expr)
    return SeriesResult(expr, order, tuple(names), tuple(center), tuple(terms))


def _split_var(var) -> Tuple[Tuple[str, ...], Tuple[float, ...]]:
    if isinstance(var, str):
        return (var,), (0.0,)
    if isinstance(var, Mapping):
        return tuple(var), tuple(float(v) for v in var.values())
    names = tuple(var)
    return names, (0.0,) * len(names)


def taylor(f, var, order: int = 1, accuracy: int = 4, zero_tol: float = 0.0) -> SeriesResult:
    """Taylor polynomial of ``f`` around a point.

    Parameters
    ----------
    f : str, Expr or callable
        Expressions are differentiated symbolically; callables receive the
        variables positionally and are differentiated numerically.
    var : str, list of str or mapping
        Variables, with the center given by a mapping (default 0).
    order : int
        Maximum total degree.
    accuracy : int
        Finite-difference accuracy for callables.
    zero_tol : float
        Coefficients with magnitude at most this are set to 0.

    Examples
    --------
    >>> [t.coef for t in taylor("exp(x)", "x", order=2).terms]
    [1.0, 1.0, 0.5]
    """
    if order < 0:
        raise ValueError("order must be non-negative")
    names, center = _split_var(var)
    indices = partitions(order, len(names), fill=True, perm=True, equal=False)
    if callable(f):
        fn = lambda pt: np.asarray(f(*pt), dtype=float)
        raw = {k: float(mixed_partial(fn, center, k, accuracy)) for k in indices}
    else:
        raw = _symbolic_derivatives(to_expr(f), names, center, indices)
    coefs = {}
    for k, v in raw.items():
        if not math.isfinite(v):
            raise DomainError(f"derivative {k} is not finite at the center")
        c = v / multi_factorial(k)
        coefs[k] = 0.0 if abs(c) <= zero_tol else c
    return assemble(names, center, order, coefs)


def _symbolic_derivatives(e: Expr, names, center, indices) -> Dict[MultiIndex, float]:
    env = dict(zip(names, center))
    memo: Dict[MultiIndex, Expr] = {(0,) * len(names): e}

    def get(k):
        if k not in memo:
            j = next(i for i, v in enumerate(k) if v)
            parent = k[:j] + (k[j] - 1,) + k[j + 1:]
            memo[k] = diff_symbolic(get(parent), names[j])
        return memo[k]

    return {k: float(evaluate(get(k), env)) for k in indices}


def _kernel(names, sigma: np.ndarray) -> Expr:
    q: Expr = ZERO
    for i, j in itertools.product(range(len(names)), repeat=2):
        s = sigma[i, j]
        if s:
            q = add(q, mul(mul(num(s), Var(names[i])), Var(names[j])))
    return call("exp", mul(num(-0.5), q))


def hermite(order, sigma=None, var: Optional[Sequence[str]] = None) -> Dict[MultiIndex, SeriesResult]:
    """Hermite polynomials of every multi-index up to a total degree.

    ``H_nu(x) = exp(x'Sx/2) (-d/dx)^nu exp(-x'Sx/2)``.  Each polynomial is
    obtained from one of lower degree: multiply by the kernel, differentiate
    once, drop the kernel and re-extract the coefficients.

    Parameters
    ----------
    order : int or sequence of int
        Total degree, or a multi-index whose total degree is used.
    sigma : array_like, optional
        Symmetric matrix; identity by default.
    var : sequence of str, optional
        Variable names; ``x`` in one dimension and ``x1, x2, ...`` otherwise.

    Returns
    -------
    dict
        Multi-index to SeriesResult, in the order of :func:`partitions`.
    """
    total = int(order) if np.ndim(order) == 0 else int(sum(order))
    if sigma is None:
        if var is not None:
            d = len(var)
        else:
            d = 1 if np.ndim(order) == 0 else len(order)
        sigma = np.eye(d)
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    d = sigma.shape[0]
    if sigma.shape != (d, d):
        raise ShapeError("sigma must be square")
    if not np.allclose(sigma, sigma.T, rtol=0, atol=1e-12):
        raise ValueError("sigma must be symmetric")
    if var is None:
        var = ["x"] if d == 1 else [f"x{k + 1}" for k in range(d)]
    names = tuple(var)
    if len(names) != d:
        raise ShapeError(f"{len(names)} variables for a {d}x{d} sigma")
    integral = bool(np.all(sigma == np.round(sigma)))
    kernel = _kernel(names, sigma)
    center = (0.0,) * d

    out: Dict[MultiIndex, SeriesResult] = {}
    for nu in partitions(total, d, fill=True, perm=True, equal=False):
        if not any(nu):
            out[nu] = assemble(names, center, 0, {nu: 1.0})
            continue
        j = next(i for i, v in enumerate(nu) if v)
        parent = out[nu[:j] + (nu[j] - 1,) + nu[j + 1:]]
        p = parent.expr if isinstance(parent.expr, Expr) else num(parent.expr)
        step = diff_symbolic(mul(p, kernel), names[j])
        poly = neg(substitute(step, {kernel: num(1.0)}))
        level = sum(nu)
        series = taylor(poly, dict(zip(names, center)), order=level)
        if integral:
            coefs = {}
            for t in series.terms:
                r = round(t.coef)
                coefs[t.degree] = float(r) if abs(t.coef - r) <= 1e-9 else t.coef
            series = assemble(names, center, level, coefs)
        out[nu] = series
    return out
