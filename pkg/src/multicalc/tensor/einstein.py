"""Contraction and Einstein summation over named indices.

The general summation is a left fold over the operands.  Each operand is
contracted keeping one diagonal axis per repeated name, multiplied into the
accumulator by broadcasting on shared names, and any summation index that no
later operand mentions is summed out right away.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from multicalc.errors import FastPathUnavailable, ShapeError
from multicalc.tensor.core import Tensor, as_tensor

_TRACE = "\0trace"


def _sum_trailing(arr: np.ndarray, count: int) -> np.ndarray:
    for _ in range(count):
        arr = arr.sum(axis=-1)
        if not isinstance(arr, np.ndarray):
            arr = np.array(arr, dtype=object)
    return arr


def _diagonalize(arr: np.ndarray, names: Sequence[Optional[str]]):
    """Collapse every group of equally named axes onto its diagonal.

    Returns the array and its names: unrepeated axes in original order, then
    one axis per repeated name in order of first appearance.
    """
    names = list(names)
    counts = Counter(n for n in names if n is not None)
    groups = [n for n in dict.fromkeys(names) if n is not None and counts[n] > 1]
    for g in groups:
        axes = [i for i, n in enumerate(names) if n == g]
        extents = {arr.shape[i] for i in axes}
        if len(extents) > 1:
            raise ShapeError(f"index {g!r} repeats with unequal extents {sorted(extents)}")
        others = [i for i in range(len(names)) if names[i] != g]
        arr = arr.transpose(others + axes)
        for _ in range(len(axes) - 1):
            arr = np.diagonal(arr, axis1=-2, axis2=-1)
        names = [names[i] for i in others] + [g]
    return arr, names, groups


def contraction(t, drop: bool = True) -> Tensor:
    """Sum over repeated index names.

    A tensor without index names whose extents are all equal is traced over
    every axis.  With ``drop=False`` one diagonal axis per repeated name is
    kept (after the unrepeated axes) instead of being summed.
    """
    t = as_tensor(t)
    names = list(t.names)
    if t.ndim > 1 and all(n is None for n in names):
        if len(set(t.shape)) != 1:
            raise ShapeError("an unnamed tensor is traced only when all extents are equal")
        names = [_TRACE] * t.ndim
    arr, out_names, groups = _diagonalize(t.data, names)
    if drop:
        arr = _sum_trailing(arr, len(groups))
        out_names = out_names[: len(out_names) - len(groups)]
    out_names = [None if n == _TRACE else n for n in out_names]
    return Tensor(np.array(arr), out_names)


@dataclass(frozen=True)
class EinsteinStep:
    """Fold one operand into the running product.

    ``layout`` lists the axis names of the product with the names summed at
    this step (``summed``) moved to the end.
    """

    operand: int
    contracted: Tuple[str, ...]
    layout: Tuple[str, ...]
    summed: Tuple[str, ...]


@dataclass(frozen=True)
class EinsteinPlan:
    operands: Tuple[Tuple[str, ...], ...]
    free: Tuple[str, ...]
    summation: Tuple[str, ...]
    steps: Tuple[EinsteinStep, ...]


def plan_einstein(index_lists: Sequence[Sequence[str]]) -> EinsteinPlan:
    """Plan the fold for operands carrying the given index names."""
    if not index_lists:
        raise ShapeError("einstein needs at least one operand")
    lists = [tuple(ix) for ix in index_lists]
    for ix in lists:
        if any(n is None for n in ix):
            raise ShapeError("every axis of an Einstein operand must be named")
    counts = Counter(n for ix in lists for n in ix)
    free = tuple(n for n in dict.fromkeys(n for ix in lists for n in ix) if counts[n] == 1)
    summation = tuple(n for n in dict.fromkeys(n for ix in lists for n in ix) if counts[n] > 1)

    steps = []
    current: List[str] = []
    for k, ix in enumerate(lists):
        singles = [n for n in ix if ix.count(n) == 1]
        repeated = [n for n in dict.fromkeys(ix) if ix.count(n) > 1]
        contracted = tuple(singles + repeated)
        union = current + [n for n in contracted if n not in current]
        later = {n for rest in lists[k + 1:] for n in rest}
        summed = tuple(n for n in union if n in summation and n not in later)
        layout = tuple([n for n in union if n not in summed] + list(summed))
        steps.append(EinsteinStep(k, contracted, layout, summed))
        current = [n for n in union if n not in summed]
    return EinsteinPlan(tuple(lists), free, summation, tuple(steps))


def _broadcast_to_layout(arr: np.ndarray, names: Sequence[str], layout: Sequence[str]) -> np.ndarray:
    present = [n for n in layout if n in names]
    arr = arr.transpose([list(names).index(n) for n in present])
    shape = []
    it = iter(arr.shape)
    for n in layout:
        shape.append(next(it) if n in names else 1)
    return arr.reshape(shape)


def _check_extents(tensors: Sequence[Tensor]):
    seen = {}
    for t in tensors:
        for n, e in zip(t.names, t.shape):
            if seen.setdefault(n, e) != e:
                raise ShapeError(f"index {n!r} has extents {seen[n]} and {e}")


def _finish(arr: np.ndarray, names: Sequence[str], free: Sequence[str]) -> Tensor:
    arr = arr.transpose([list(names).index(n) for n in free]) if free else arr
    return Tensor(np.array(arr), free)


def einstein_generic(*operands) -> Tensor:
    """Einstein summation by the contract / permute / multiply / sum fold."""
    tensors = [as_tensor(t) for t in _flatten(operands)]
    plan = plan_einstein([t.names for t in tensors])
    _check_extents(tensors)
    acc, acc_names = None, []
    for step, t in zip(plan.steps, tensors):
        c = contraction(t, drop=False)
        arr = c.data
        if not t.is_numeric or (acc is not None and acc.dtype == object):
            arr = arr.astype(object)
            if acc is not None:
                acc = acc.astype(object)
        part = _broadcast_to_layout(arr, c.names, step.layout)
        if acc is None:
            prod = part
        else:
            prod = _broadcast_to_layout(acc, acc_names, step.layout) * part
        acc = _sum_trailing(prod, len(step.summed))
        acc_names = list(step.layout[: len(step.layout) - len(step.summed)])
    return _finish(acc, acc_names, plan.free)


def einstein_pair_fast(a, b) -> Tensor:
    """Two-operand numeric summation as a single dense matrix product.

    Both operands are reshaped to matrices (free x shared) and (shared x
    free) and multiplied.  Raises :class:`FastPathUnavailable` for symbolic
    operands.
    """
    a, b = as_tensor(a), as_tensor(b)
    if not (a.is_numeric and b.is_numeric):
        raise FastPathUnavailable("matrix-product scheme needs numeric operands")
    plan = plan_einstein([a.names, b.names])
    _check_extents([a, b])
    ca, cb = contraction(a, drop=False), contraction(b, drop=False)
    # summation indices private to one operand are summed before the product
    a_arr, a_names = _sum_private(ca, set(cb.names), plan.summation)
    b_arr, b_names = _sum_private(cb, set(a_names), plan.summation)
    shared = [n for n in a_names if n in b_names]
    i_names = [n for n in a_names if n not in shared]
    j_names = [n for n in b_names if n not in shared]
    ext = dict(zip(a_names, a_arr.shape)) | dict(zip(b_names, b_arr.shape))
    size = lambda ns: int(np.prod([ext[n] for n in ns], dtype=int))
    am = a_arr.transpose([a_names.index(n) for n in i_names + shared]).reshape(size(i_names), size(shared))
    bm = b_arr.transpose([b_names.index(n) for n in shared + j_names]).reshape(size(shared), size(j_names))
    c = (am @ bm).reshape([ext[n] for n in i_names + j_names])
    return _finish(c, i_names + j_names, plan.free)


def _sum_private(t: Tensor, other: set, summation):
    names = list(t.names)
    private = [n for n in names if n in summation and n not in other]
    keep = [n for n in names if n not in private]
    arr = t.data.transpose([names.index(n) for n in keep + private])
    return _sum_trailing(arr, len(private)), keep


def einstein(*operands, method: str = "auto") -> Tensor:
    """Einstein summation over named tensors.

    Free indices (appearing exactly once overall) form the result in order
    of first appearance; every other index is summed.

    Parameters
    ----------
    *operands : Tensor
        Operands with every axis named.  A single list of tensors is also
        accepted.
    method : {"auto", "generic", "fast"}
        ``auto`` uses the matrix-product scheme for two numeric operands and
        the general fold otherwise.
    """
    tensors = [as_tensor(t) for t in _flatten(operands)]
    if method == "generic":
        return einstein_generic(*tensors)
    if method == "fast":
        if len(tensors) != 2:
            raise FastPathUnavailable("matrix-product scheme takes exactly two operands")
        return einstein_pair_fast(*tensors)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    if len(tensors) == 2 and all(t.is_numeric for t in tensors):
        return einstein_pair_fast(*tensors)
    return einstein_generic(*tensors)


def _flatten(operands):
    if len(operands) == 1 and isinstance(operands[0], (list, tuple)):
        return list(operands[0])
    return list(operands)
