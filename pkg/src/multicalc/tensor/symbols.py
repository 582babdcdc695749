"""Levi-Civita symbol and generalized Kronecker delta."""

from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np

from multicalc.tensor.core import Tensor


def permutation_parity(perm: Sequence[int]) -> int:
    """Sign (+1 or -1) of a permutation of ``0..n-1`` via cycle decomposition."""
    n = len(perm)
    seen = [False] * n
    transpositions = 0
    for start in range(n):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        transpositions += length - 1
    return -1 if transpositions % 2 else 1


def epsilon(n: int) -> Tensor:
    """Levi-Civita symbol in ``n`` dimensions as a dense rank-``n`` tensor."""
    if n < 1:
        raise ValueError("epsilon needs n >= 1")
    out = np.zeros((n,) * n)
    for perm in itertools.permutations(range(n)):
        out[perm] = permutation_parity(perm)
    return Tensor(out)


def delta(n: int, p: int) -> Tensor:
    """Generalized Kronecker delta of order ``2p`` over ``n`` values.

    The first ``p`` axes are the upper indices and the last ``p`` the lower
    ones.  An entry is the sign of the permutation taking the upper tuple to
    the lower tuple when the upper indices are distinct, otherwise 0.
    """
    if n < 1 or p < 1:
        raise ValueError("delta needs n >= 1 and p >= 1")
    out = np.zeros((n,) * (2 * p))
    for upper in itertools.permutations(range(n), p):
        for perm in itertools.permutations(range(p)):
            lower = tuple(upper[k] for k in perm)
            out[upper + lower] = permutation_parity(perm)
    return Tensor(out)
