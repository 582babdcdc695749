"""Inner, dot, outer, Kronecker and generalized cross products."""

from __future__ import annotations

import numpy as np

from multicalc.errors import ShapeError
from multicalc.expr import Scalar, combine
from multicalc.tensor.core import Tensor, as_tensor, scalar_of
from multicalc.tensor.einstein import einstein


def _axes(prefix: str, n: int):
    return [f"{prefix}{k}" for k in range(n)]


def inner(a, b) -> Scalar:
    """Sum of elementwise products of two equally shaped tensors."""
    a, b = as_tensor(a), as_tensor(b)
    if a.shape != b.shape:
        raise ShapeError(f"inner product needs equal shapes, got {a.shape} and {b.shape}")
    if a.is_numeric and b.is_numeric:
        return float(np.sum(a.data * b.data))
    ix = _axes("i", a.ndim)
    return scalar_of(einstein(a.rename(ix), b.rename(ix), method="generic").item())


def dot(a, b) -> Tensor:
    """Inner product over the trailing axes of ``a`` matching all of ``b``."""
    a, b = as_tensor(a), as_tensor(b)
    lead = a.ndim - b.ndim
    if lead < 0 or a.shape[lead:] != b.shape:
        raise ShapeError(f"dot needs trailing extents of {a.shape} to equal {b.shape}")
    out_ix = _axes("l", lead)
    ix = _axes("s", b.ndim)
    r = einstein(a.rename(out_ix + ix), b.rename(ix))
    return Tensor(r.data, a.names[:lead])


def outer(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    r = einstein(a.rename(_axes("a", a.ndim)), b.rename(_axes("b", b.ndim)), method="generic")
    return Tensor(r.data, a.names + b.names)


def kron(a, b) -> Tensor:
    """Generalized Kronecker product with the usual block layout.

    Ranks are equalized by prepending unit axes; the result has extents
    ``a.shape[k] * b.shape[k]`` and ``a`` indexes the blocks.
    """
    a, b = as_tensor(a), as_tensor(b)
    rank = max(a.ndim, b.ndim)
    ad = a.data.reshape((1,) * (rank - a.ndim) + a.shape)
    bd = b.data.reshape((1,) * (rank - b.ndim) + b.shape)
    o = outer(Tensor(ad), Tensor(bd)).data
    order = [k for pair in zip(range(rank), range(rank, 2 * rank)) for k in pair]
    shape = [ad.shape[k] * bd.shape[k] for k in range(rank)]
    return Tensor(o.transpose(order).reshape(shape))


def cross(*vectors) -> Tensor:
    """Vector perpendicular to ``n-1`` vectors of length ``n``.

    Component ``k`` is the signed cofactor ``(-1)^k det(M_k)``, where ``M_k``
    is the matrix of the input vectors with column ``k`` removed.
    """
    from multicalc.matrix import mxdet

    vs = [as_tensor(v) for v in vectors]
    n = len(vs) + 1
    if n < 2 or any(v.shape != (n,) for v in vs):
        raise ShapeError(f"cross product needs {n - 1} vectors of length {n}")
    rows = np.array([v.data.astype(object) for v in vs], dtype=object).reshape(n - 1, n)
    numeric = all(v.is_numeric for v in vs)
    out = []
    for k in range(n):
        minor = np.delete(rows, k, axis=1)
        d = mxdet(Tensor(minor.astype(float) if numeric else minor))
        out.append(d if k % 2 == 0 else combine("-", 0.0, d))
    return Tensor(np.array(out, dtype=object))
