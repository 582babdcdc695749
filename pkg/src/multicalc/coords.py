"""Orthogonal coordinate systems described by their scale factors."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Mapping, Sequence, Tuple, Union

from multicalc.errors import DomainError, ShapeError
from multicalc.expr import Scalar, Var, combine, demote, diff_symbolic, evaluate, to_scalar
from multicalc.expr.tree import call


def _sqrt_sum_sq(u, v):
    return call("sqrt", Var(u) ** 2 + Var(v) ** 2)


# Built-ins are templates over the caller's variable names, in order.
_BUILTIN: Dict[str, Tuple[int, Callable]] = {
    "cartesian": (0, lambda v: [1.0] * len(v)),
    "polar": (2, lambda v: [1.0, Var(v[0])]),
    "cylindrical": (3, lambda v: [1.0, Var(v[0]), 1.0]),
    "spherical": (3, lambda v: [1.0, Var(v[0]), Var(v[0]) * call("sin", Var(v[1]))]),
    "parabolic": (3, lambda v: [_sqrt_sum_sq(v[0], v[1]), _sqrt_sum_sq(v[0], v[1]), Var(v[0]) * Var(v[1])]),
    "parabolic-cylindrical": (3, lambda v: [_sqrt_sum_sq(v[0], v[1]), _sqrt_sum_sq(v[0], v[1]), 1.0]),
}

BUILTIN_SYSTEMS = tuple(_BUILTIN)


@dataclass(frozen=True)
class CoordinateSystem:
    """Scale factors ``h_i`` over named variables.

    Examples
    --------
    >>> cs = coordinate_system("spherical", ["r", "theta", "phi"])
    >>> [str(h) for h in cs.factors]
    ['1.0', 'r', 'r*sin(theta)']
    """

    name: str
    variables: Tuple[str, ...]
    factors: Tuple[Scalar, ...]

    @property
    def dim(self) -> int:
        return len(self.variables)

    @property
    def is_cartesian(self) -> bool:
        return all(isinstance(h, float) and h == 1.0 for h in self.factors)

    def jacobian(self) -> Scalar:
        """Volume element ``J``, the product of the scale factors."""
        out: Scalar = 1.0
        for h in self.factors:
            out = combine("*", out, h)
        return out

    def cofactor(self, i: int, power: int = 1) -> Scalar:
        """``J / h_i^power`` written without dividing by ``h_i`` when possible."""
        out: Scalar = 1.0
        for j, h in enumerate(self.factors):
            if j != i:
                out = combine("*", out, h)
        for _ in range(power - 1):
            out = combine("/", out, self.factors[i])
        return out

    def factors_at(self, env: Mapping[str, float]) -> Tuple[float, ...]:
        """Scale factors at a point; raises DomainError where one vanishes."""
        vals = tuple(at(h, env) for h in self.factors)
        for k, v in enumerate(vals):
            if v == 0:
                raise DomainError(f"scale factor h_{k + 1} of {self.name} coordinates vanishes at {dict(env)}")
        return vals


def at(s: Scalar, env: Mapping[str, float]) -> float:
    v = s if isinstance(s, float) else evaluate(s, env)
    if not math.isfinite(v):
        raise DomainError(f"non-finite value {v} at {dict(env)}")
    return v


def scalar_diff(s: Scalar, var: str) -> Scalar:
    return 0.0 if isinstance(s, float) else demote(diff_symbolic(s, var))


def coordinate_system(spec: Union[str, Sequence, CoordinateSystem], variables: Sequence[str]) -> CoordinateSystem:
    """Resolve a built-in name or a list of custom scale factors.

    Parameters
    ----------
    spec : str or sequence
        One of ``BUILTIN_SYSTEMS`` or one scale factor (number, expression
        string or Expr) per variable.
    variables : sequence of str
        Variable names; built-ins are applied positionally, so
        ``spherical`` over ``(x, y, z)`` has factors ``(1, x, x*sin(y))``.
    """
    variables = tuple(variables)
    if isinstance(spec, CoordinateSystem):
        if spec.variables != variables:
            raise ShapeError(f"coordinates are over {spec.variables}, got {variables}")
        return spec
    if isinstance(spec, str):
        if spec not in _BUILTIN:
            raise ValueError(f"unknown coordinate system {spec!r}; expected one of {BUILTIN_SYSTEMS}")
        dim, make = _BUILTIN[spec]
        if dim and len(variables) != dim:
            raise ShapeError(f"{spec} coordinates need {dim} variables, got {len(variables)}")
        if not variables:
            raise ShapeError("at least one variable is required")
        factors = make(variables)
        name = spec
    else:
        factors = list(spec)
        if len(factors) != len(variables):
            raise ShapeError(f"{len(factors)} scale factors for {len(variables)} variables")
        name = "custom"
    return CoordinateSystem(name, variables, tuple(to_scalar(h) for h in factors))
