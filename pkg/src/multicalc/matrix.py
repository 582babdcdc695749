"""Determinant, inverse and product of numeric or symbolic matrices."""

from __future__ import annotations

import numpy as np

from multicalc.errors import ShapeError, SingularMatrixError
from multicalc.expr import Scalar, combine
from multicalc.tensor import Tensor, as_tensor, einstein

MAX_SYMBOLIC_DET = 8


def _square(m) -> Tensor:
    m = as_tensor(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {m.shape}")
    return m


def _laplace(rows) -> Scalar:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total: Scalar = 0.0
    for j in range(n):
        a = rows[0][j]
        if isinstance(a, float) and a == 0:
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = combine("*", a, _laplace(minor))
        total = combine("+" if j % 2 == 0 else "-", total, term)
    return total


def mxdet(m) -> Scalar:
    """Determinant.

    Numeric matrices use LU factorization; symbolic ones a recursive cofactor
    expansion along the first row (size at most 8).
    """
    m = _square(m)
    if m.is_numeric:
        return float(np.linalg.det(m.data))
    n = m.shape[0]
    if n > MAX_SYMBOLIC_DET:
        raise ShapeError(f"symbolic determinant limited to {MAX_SYMBOLIC_DET}x{MAX_SYMBOLIC_DET}")
    return _laplace(m.data.tolist())


def mxinv(m) -> Tensor:
    """Inverse; symbolic matrices use the adjugate over a shared determinant."""
    m = _square(m)
    if m.is_numeric:
        try:
            return Tensor(np.linalg.inv(m.data))
        except np.linalg.LinAlgError:
            raise SingularMatrixError("matrix is singular") from None
    rows = m.data.tolist()
    det = mxdet(m)
    if isinstance(det, float) and det == 0:
        raise SingularMatrixError("determinant simplifies to 0")
    n = len(rows)
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            if n == 1:
                cof: Scalar = 1.0
            else:
                minor = [r[:i] + r[i + 1:] for k, r in enumerate(rows) if k != j]
                cof = _laplace(minor)
                if (i + j) % 2:
                    cof = combine("-", 0.0, cof)
            out[i, j] = combine("/", cof, det)
    return Tensor(out)


def mxprod(a, b) -> Tensor:
    """Matrix product written as the summation ``A_ik B_kj``."""
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply shapes {a.shape} and {b.shape}")
    return einstein(a.rename(["i", "k"]), b.rename(["k", "j"])).rename([None, None])
