"""Dense tensors of Scalars with optional per-axis index names.

Numeric tensors hold a float64 array; a tensor with any symbolic element
holds an object array of Python floats and Exprs.  Flat data handed to or
from the outside world is column-major (first axis fastest).
"""

from __future__ import annotations

from typing import Optional, Sequence, Tuple

import numpy as np

from multicalc.errors import DomainError, ShapeError
from multicalc.expr import Expr, combine, evaluate, format_expr, to_scalar
from multicalc.expr.tree import is_number

Names = Tuple[Optional[str], ...]

_to_scalar = np.frompyfunc(to_scalar, 1, 1)


def _normalize(values) -> np.ndarray:
    arr = np.asarray(values)
    if arr.dtype.kind in "biuf":
        return arr.astype(float)
    if arr.dtype.kind not in "OUS":
        raise TypeError(f"unsupported element type {arr.dtype}")
    if arr.dtype.kind != "O":
        arr = arr.astype(object)
    if arr.ndim == 0:
        arr = np.array(to_scalar(arr.item()), dtype=object)
    else:
        arr = _to_scalar(arr).astype(object)
    if all(isinstance(v, float) for v in arr.flat):
        return arr.astype(float)
    return arr


class Tensor:
    """Immutable dense tensor.

    Parameters
    ----------
    data : array_like
        Nested sequences or an ndarray of numbers, Exprs or expression
        strings.  Indexing follows numpy (``t[i, j]``).
    names : sequence of str or None, optional
        Index name per axis.  Names may repeat.
    """

    __slots__ = ("_data", "_names")

    def __init__(self, data, names: Optional[Sequence[Optional[str]]] = None):
        if isinstance(data, Tensor):
            arr = data._data
            names = data._names if names is None else names
        else:
            arr = _normalize(data)
        if names is None:
            names = (None,) * arr.ndim
        names = tuple(names)
        if len(names) != arr.ndim:
            raise ShapeError(f"{len(names)} index names for a rank-{arr.ndim} tensor")
        arr = arr.view()
        arr.flags.writeable = False
        self._data = arr
        self._names = names

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def names(self) -> Names:
        return self._names

    @property
    def shape(self) -> Tuple[int, ...]:
        return self._data.shape

    @property
    def ndim(self) -> int:
        return self._data.ndim

    @property
    def is_numeric(self) -> bool:
        return self._data.dtype != object

    def __getitem__(self, key):
        v = self._data[key]
        if isinstance(v, np.ndarray):
            return Tensor(v)
        return float(v) if isinstance(v, (float, np.floating)) else v

    def __len__(self):
        return self.shape[0]

    def __repr__(self):
        named = ", ".join(f"{n or '_'}={e}" for n, e in zip(self._names, self.shape))
        return f"Tensor([{named}], {self.tolist()!r})"

    def rename(self, names: Sequence[Optional[str]]) -> "Tensor":
        return Tensor(self._data, names)

    def item(self):
        if self._data.size != 1:
            raise ShapeError("item() needs a single-element tensor")
        return self[(0,) * self.ndim]

    def tolist(self):
        """Nested lists; symbolic elements as strings."""
        if self.is_numeric:
            return self._data.tolist()
        fmt = np.frompyfunc(lambda v: v if isinstance(v, float) else format_expr(v), 1, 1)
        out = fmt(self._data)
        return out.tolist() if isinstance(out, np.ndarray) else out

    def flat(self) -> list:
        """Elements in column-major order."""
        return list(self._data.ravel(order="F"))

    def evaluate(self, env) -> "Tensor":
        """Numeric tensor obtained by evaluating every element at ``env``."""
        if self.is_numeric:
            return self
        out = np.empty(self.shape, dtype=float)
        for idx, v in np.ndenumerate(self._data):
            out[idx] = v if isinstance(v, float) else evaluate(v, env)
        return Tensor(out, self._names)

    def to_record(self) -> dict:
        """Serializable record: extents, names and column-major data."""
        data, kinds = [], []
        for v in self.flat():
            if isinstance(v, Expr):
                data.append(format_expr(v))
                kinds.append("symbolic")
            else:
                data.append(float(v))
                kinds.append("number")
        return {"extents": list(self.shape), "names": list(self._names), "data": data, "kinds": kinds}

    @classmethod
    def from_record(cls, record: dict) -> "Tensor":
        kinds = record.get("kinds") or ["number"] * len(record["data"])
        values = [float(v) if k == "number" else str(v) for v, k in zip(record["data"], kinds)]
        return make_tensor(record["extents"], record.get("names"), values)


def make_tensor(extents: Sequence[int], names=None, data=()) -> Tensor:
    """Build a tensor from column-major flat ``data``."""
    extents = tuple(int(e) for e in extents)
    if any(e < 1 for e in extents):
        raise ShapeError("extents must be positive")
    size = int(np.prod(extents, dtype=int))
    if len(data) != size:
        raise ShapeError(f"{len(data)} elements for extents {extents} (need {size})")
    if names is not None and len(names) == 0:
        names = None
    flat = np.empty(size, dtype=object)
    flat[:] = list(data)
    arr = flat.reshape(extents, order="F") if extents else flat.reshape(())
    return Tensor(arr, names)


def as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def elementwise(op: str, a, b) -> Tensor:
    """Elementwise ``op`` (one of + - * /) between same-shape tensors."""
    a, b = as_tensor(a), as_tensor(b)
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch {a.shape} vs {b.shape}")
    if a.is_numeric and b.is_numeric and op in "+-*/":
        if op == "/" and np.any(b.data == 0):
            raise DomainError("division by zero")
        fn = {"+": np.add, "-": np.subtract, "*": np.multiply, "/": np.divide}[op]
        return Tensor(fn(a.data, b.data), a.names)
    out = np.frompyfunc(lambda u, v: combine(op, u, v), 2, 1)(a.data.astype(object), b.data.astype(object))
    return Tensor(out if isinstance(out, np.ndarray) else np.array(out, dtype=object), a.names)


def scalar_of(v):
    """Float or Expr for an element pulled out of an ndarray."""
    if is_number(v):
        return float(v)
    return v
