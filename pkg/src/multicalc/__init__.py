"""Numerical and symbolic multivariate calculus."""

from multicalc.coords import BUILTIN_SYSTEMS, CoordinateSystem, coordinate_system
from multicalc.deriv import derivative, fd_coefficients
from multicalc.errors import CalcError, DomainError, ParseError, ShapeError, SingularMatrixError
from multicalc.expr import diff_symbolic, evaluate, format_expr, parse
from multicalc.integrate import IntegralResult, integral, surface_integral_fixed
from multicalc.matrix import mxdet, mxinv, mxprod
from multicalc.ode import OdeSolution, solve_ode
from multicalc.ops import curl, divergence, gradient, hessian, jacobian, laplacian
from multicalc.series import hermite, partitions, taylor
from multicalc.tensor import (
    Tensor,
    contraction,
    cross,
    delta,
    dot,
    einstein,
    epsilon,
    inner,
    kron,
    make_tensor,
    outer,
)

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_SYSTEMS",
    "CalcError",
    "CoordinateSystem",
    "DomainError",
    "IntegralResult",
    "OdeSolution",
    "ParseError",
    "ShapeError",
    "SingularMatrixError",
    "Tensor",
    "contraction",
    "coordinate_system",
    "cross",
    "curl",
    "delta",
    "derivative",
    "diff_symbolic",
    "divergence",
    "dot",
    "einstein",
    "epsilon",
    "evaluate",
    "fd_coefficients",
    "format_expr",
    "gradient",
    "hermite",
    "hessian",
    "inner",
    "integral",
    "jacobian",
    "kron",
    "laplacian",
    "make_tensor",
    "mxdet",
    "mxinv",
    "mxprod",
    "outer",
    "parse",
    "partitions",
    "solve_ode",
    "surface_integral_fixed",
    "taylor",
]
