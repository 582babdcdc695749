"""Fixed-step Euler and Runge-Kutta solvers for first-order ODE systems."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence, Tuple

import numpy as np

from multicalc.errors import DomainError, ShapeError
from multicalc.expr import compile_expr, to_expr


@dataclass(frozen=True)
class OdeSolution:
    """Trajectory with one row per time point and one column per state."""

    times: np.ndarray
    names: Tuple[str, ...]
    states: np.ndarray

    def __getitem__(self, name: str) -> np.ndarray:
        return self.states[:, self.names.index(name)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time", *self.names])
        for t, row in zip(self.times, self.states):
            w.writerow([repr(float(t)), *(repr(float(v)) for v in row)])
        return buf.getvalue()


def _symbolic_rhs(rhs, names: Sequence[str], timevar: str) -> Callable:
    """Compile each component once; the state is bound positionally."""
    funcs = [compile_expr(to_expr(e), list(names) + [timevar]) for e in rhs]

    def f(t, y):
        args = (*y, t)
        return np.array([fn(*args) for fn in funcs])

    return f


def solve_ode(rhs, init: Mapping[str, float], times, timevar: str = "t", method: str = "rk4") -> OdeSolution:
    """Integrate ``dy/dt = f(t, y)`` over a fixed time grid.

    Parameters
    ----------
    rhs : sequence of str or Expr, or callable
        One expression per state variable, written in the state names and
        ``timevar``; or a callable ``f(t, y)`` returning the derivatives for
        the state vector ``y``.
    init : mapping
        Initial value per state variable, in state order.
    times : array_like
        Strictly increasing grid; the step may vary.
    timevar : str
    method : {"rk4", "euler"}

    Returns
    -------
    OdeSolution

    Examples
    --------
    >>> sol = solve_ode(["y"], {"y": 1.0}, np.linspace(0, 1, 1001))
    >>> round(float(sol["y"][-1]), 9)
    2.718281828
    """
    names = tuple(init)
    y = np.array([float(v) for v in init.values()])
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) < 2:
        raise ValueError("the time grid needs at least two points")
    if not np.all(np.diff(times) > 0):
        raise ValueError("the time grid must be strictly increasing")
    if callable(rhs):
        def f(t, s):
            out = np.asarray(rhs(t, s), dtype=float)
            if out.shape != s.shape:
                raise ShapeError(f"right-hand side returned shape {out.shape}, state has {s.shape}")
            return out
    else:
        rhs = list(rhs)
        if len(rhs) != len(names):
            raise ShapeError(f"{len(rhs)} right-hand sides for {len(names)} state variables")
        f = _symbolic_rhs(rhs, names, timevar)
    if method == "rk4":
        step = _rk4
    elif method == "euler":
        step = _euler
    else:
        raise ValueError(f"unknown method {method!r}")

    out = np.empty((len(times), len(y)))
    out[0] = y
    for n in range(len(times) - 1):
        t, h = times[n], times[n + 1] - times[n]
        y = step(f, t, y, h)
        if not np.all(np.isfinite(y)):
            raise DomainError(f"state became non-finite at t={times[n + 1]!r}")
        out[n + 1] = y
    return OdeSolution(times, names, out)


def _euler(f, t, y, h):
    return y + h * f(t, y)


def _rk4(f, t, y, h):
    k1 = f(t, y)
    k2 = f(t + h / 2, y + h / 2 * k1)
    k3 = f(t + h / 2, y + h / 2 * k2)
    k4 = f(t + h, y + h * k3)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
