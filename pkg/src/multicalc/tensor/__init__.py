"""Named-index tensors, contraction and Einstein summation."""

from multicalc.tensor.core import Tensor, as_tensor, elementwise, make_tensor
from multicalc.tensor.einstein import (
    EinsteinPlan,
    EinsteinStep,
    contraction,
    einstein,
    einstein_generic,
    einstein_pair_fast,
    plan_einstein,
)
from multicalc.tensor.products import cross, dot, inner, kron, outer
from multicalc.tensor.symbols import delta, epsilon, permutation_parity

__all__ = [
    "EinsteinPlan",
    "EinsteinStep",
    "Tensor",
    "as_tensor",
    "contraction",
    "cross",
    "delta",
    "dot",
    "einstein",
    "einstein_generic",
    "einstein_pair_fast",
    "elementwise",
    "epsilon",
    "inner",
    "kron",
    "make_tensor",
    "outer",
    "permutation_parity",
    "plan_einstein",
]
