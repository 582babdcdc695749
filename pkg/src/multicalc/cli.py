"""Command-line interface.

Every subcommand prints one JSON document.  Tensors are written as records
with ``extents``, ``names`` and column-major ``data``, the same layout the
tensor arguments accept, so output can be fed back in.  ``--pretty`` prints
tables instead.

Exit status is 0 on success, 2 for usage errors and 1 when the computation
itself fails.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from typing import List, Optional, Sequence

import numpy as np

from multicalc.errors import CalcError, ParseError
from multicalc.expr import Expr, evaluate, format_expr, parse
from multicalc.tensor import Tensor, contraction, cross, delta, einstein, epsilon, make_tensor

EXIT_USAGE = 2
EXIT_FAILURE = 1


class UsageError(Exception):
    """Malformed command-line input."""


# -- literal parsing -----------------------------------------------------------


def number(text: str) -> float:
    """A constant such as ``1.5``, ``pi``, ``2pi`` or ``-pi/2``."""
    text = text.strip()
    try:
        return float(text)
    except ValueError:
        pass
    try:
        e = parse(re.sub(r"(\d)\s*(pi)\b", r"\1*\2", text))
        return float(evaluate(e, {}))
    except (CalcError, ValueError):
        raise UsageError(f"not a number: {text!r}") from None


def name_list(text: str) -> List[str]:
    names = [n.strip() for n in text.split(",") if n.strip()]
    if not names:
        raise UsageError("empty variable list")
    return names


def assignments(text: str) -> dict:
    """``x=1,y=2`` pairs; a value ``lo:hi`` becomes a range."""
    out = {}
    for part in text.split(","):
        if "=" not in part:
            raise UsageError(f"expected name=value, got {part!r}")
        name, value = (s.strip() for s in part.split("=", 1))
        if ":" in value:
            lo, hi = value.split(":", 1)
            out[name] = (number(lo), number(hi))
        else:
            out[name] = number(value)
    return out


def tensor_literal(text: str) -> Tensor:
    """Parse a tensor argument.

    Accepted forms are a JSON record (``{"extents": ...}``), a JSON nested
    list, or ``i=2,j=3:v1,v2,...`` with named (or bare) extents followed by
    column-major values.  A bare value list is a vector.
    """
    text = text.strip()
    try:
        if text.startswith("{"):
            return Tensor.from_record(json.loads(text))
        if text.startswith("["):
            return Tensor(json.loads(text))
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise UsageError(f"bad tensor literal {text!r}: {exc}") from None
    if ":" in text:
        head, body = text.split(":", 1)
        names, extents = [], []
        for part in head.split(","):
            if "=" in part:
                n, e = part.split("=", 1)
                names.append(n.strip())
            else:
                names.append(None)
                e = part
            try:
                extents.append(int(e))
            except ValueError:
                raise UsageError(f"bad extent {e!r}") from None
    else:
        body, names, extents = text, None, None
    values = [_element(v) for v in body.split(",")]
    if extents is None:
        extents = [len(values)]
    if names is not None and all(n is None for n in names):
        names = None
    return make_tensor(extents, names, values)


def _element(text: str):
    text = text.strip()
    try:
        return float(text)
    except ValueError:
        return text


def coords_arg(text: str):
    """A built-in name or a comma-separated list of scale factors."""
    return [s.strip() for s in text.split(",")] if "," in text else text


def order_arg(text: str):
    parts = [int(p) for p in text.split(",")]
    return parts[0] if len(parts) == 1 else parts


def variables(args):
    """Variable list, or a mapping when ``--at`` gives a point."""
    names = name_list(args.vars) if args.vars else None
    if not args.at:
        if names is None:
            raise UsageError("--vars or --at is required")
        return names
    if "=" in args.at:
        point = assignments(args.at)
        if names is not None and list(point) != names:
            raise UsageError("--at names must match --vars")
        return point
    values = [number(v) for v in args.at.split(",")]
    if names is None or len(names) != len(values):
        raise UsageError("--at needs one value per variable in --vars")
    return dict(zip(names, values))


def field(args):
    if getattr(args, "field", None):
        return tensor_literal(args.field)
    if not args.f:
        raise UsageError("--f or --field is required")
    return args.f[0] if len(args.f) == 1 else list(args.f)


def time_grid(text: str) -> np.ndarray:
    """``a:b:h`` grid from ``a`` in steps of ``h``; ``b`` is always the last point."""
    try:
        a, b, h = (number(p) for p in text.split(":"))
    except ValueError:
        raise UsageError(f"expected --times a:b:h, got {text!r}") from None
    if not (h > 0 and b > a):
        raise UsageError("--times needs a < b and h > 0")
    n = int(math.floor((b - a) / h * (1 + 1e-12)))
    times = a + h * np.arange(n + 1)
    if b - times[-1] > 1e-9 * h:
        times = np.append(times, b)
    else:
        times[-1] = b
    return times


# -- output --------------------------------------------------------------------


def jsonable(value):
    if isinstance(value, Tensor):
        return value.to_record()
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, Expr):
        return format_expr(value)
    return value


def _cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    return format_expr(v) if isinstance(v, Expr) else str(v)


def _table(rows: Sequence[Sequence]) -> str:
    cells = [[_cell(v) for v in row] for row in rows]
    widths = [max(len(r[j]) for r in cells) for j in range(len(cells[0]))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells)


def pretty_tensor(t: Tensor) -> str:
    arr = t.data
    head = ", ".join(f"{n or '_'}={e}" for n, e in zip(t.names, t.shape))
    if arr.ndim == 0:
        return _cell(t.item())
    if arr.ndim == 1:
        return f"[{head}]\n" + _table([list(arr)])
    if arr.ndim == 2:
        return f"[{head}]\n" + _table(arr.tolist())
    blocks = [f"[{head}]"]
    for idx in np.ndindex(arr.shape[2:]):
        label = ", ".join(str(i + 1) for i in idx)
        blocks.append(f"[, , {label}]\n" + _table(arr[(slice(None), slice(None)) + idx].tolist()))
    return "\n".join(blocks)


def pretty(value, indent: str = "") -> str:
    if isinstance(value, Tensor):
        return pretty_tensor(value)
    if isinstance(value, dict):
        lines = []
        for k, v in value.items():
            text = pretty(v, indent + "  ")
            lines.append(f"{indent}{k}:" + (f"\n{text}" if "\n" in text else f" {text}"))
        return "\n".join(lines)
    if isinstance(value, (list, tuple)) and value and isinstance(value[0], (list, tuple)):
        return _table(value)
    if isinstance(value, (list, tuple)):
        return ", ".join(_cell(v) for v in value)
    return _cell(value)


# -- plots ---------------------------------------------------------------------


def write_plot(path: str, x, columns: dict, xlabel: str):
    """Line plot image, or whitespace-separated data for ``.dat``/``.txt``."""
    if path.endswith((".dat", ".txt")):
        with open(path, "w") as fh:
            fh.write("# " + " ".join([xlabel, *columns]) + "\n")
            for i, xv in enumerate(x):
                fh.write(" ".join(repr(float(v)) for v in [xv, *(c[i] for c in columns.values())]) + "\n")
        return
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots()
    for name, ys in columns.items():
        ax.plot(x, ys, label=name)
    ax.set_xlabel(xlabel)
    ax.legend()
    fig.savefig(path)
    plt.close(fig)


# -- commands ------------------------------------------------------------------


def cmd_derive(args):
    from multicalc.deriv import derivative

    return derivative(field(args), variables(args), order_arg(args.order), args.accuracy, method=args.method)


def cmd_taylor(args):
    from multicalc.series import taylor

    var = variables(args)
    s = taylor(field(args), var, args.order, args.accuracy)
    return {
        "expression": s.expr,
        "terms": [{"label": t.label, "coef": t.coef, "degree": list(t.degree)} for t in s.terms],
    }


def cmd_hermite(args):
    from multicalc.series import hermite

    order = order_arg(args.order)
    sigma = json.loads(args.sigma) if args.sigma else None
    names = name_list(args.vars) if args.vars else None
    polys = hermite(tuple(order) if isinstance(order, list) else order, sigma, names)
    return {"polynomials": [{"index": list(k), "expression": s.expr} for k, s in polys.items()]}


def cmd_partitions(args):
    from multicalc.series import partitions

    parts = partitions(args.n, args.length, fill=args.fill, perm=args.perm, equal=not args.unequal)
    return {"partitions": [list(p) for p in parts]}


def cmd_einstein(args):
    return einstein(*[tensor_literal(t) for t in args.tensors], method=args.method)


def cmd_contract(args):
    return contraction(tensor_literal(args.tensor), drop=not args.keep)


def cmd_epsilon(args):
    return epsilon(args.n)


def cmd_delta(args):
    return delta(args.n, args.order)


def cmd_cross(args):
    return cross(*[tensor_literal(v).data for v in args.vectors])


def cmd_det(args):
    from multicalc.matrix import mxdet

    return {"det": mxdet(tensor_literal(args.matrix))}


def cmd_inv(args):
    from multicalc.matrix import mxinv

    return mxinv(tensor_literal(args.matrix))


def cmd_ode(args):
    from multicalc.ode import solve_ode

    sol = solve_ode(args.f, assignments(args.init), time_grid(args.times), args.timevar, args.method)
    if args.plot:
        write_plot(args.plot, sol.times, {n: sol[n] for n in sol.names}, args.timevar)
    return {
        "names": list(sol.names),
        "times": sol.times,
        "states": Tensor(sol.states, ["time", "state"]),
        "final": {n: float(sol[n][-1]) for n in sol.names},
    }


def _operator(fn):
    def run(args):
        return fn(field(args), variables(args), coords_arg(args.coords), args.accuracy)

    return run


def cmd_integrate(args):
    from multicalc.integrate import integral

    bounds = assignments(args.bounds)
    seed = args.seed
    if seed is None and os.environ.get("CALC_SEED"):
        try:
            seed = int(os.environ["CALC_SEED"])
        except ValueError:
            raise UsageError("CALC_SEED must be an integer") from None
    integrand = number(args.f) if _is_constant(args.f) else args.f
    r = integral(integrand, bounds, coords_arg(args.coords), args.method, args.tol, budget=args.budget, seed=seed)
    if args.plot:
        _plot_profile(args.plot, args.f, bounds, coords_arg(args.coords))
    return {
        "value": r.value,
        "error": r.error,
        "evaluations": r.evaluations,
        "method": r.method,
        "converged": r.converged,
        "seed": r.seed,
    }


def _is_constant(text: str) -> bool:
    try:
        number(text)
        return True
    except UsageError:
        return False


def _plot_profile(path, f, bounds, coords):
    """Weighted integrand along the first integrated variable, others at mid-range."""
    from multicalc.integrate import _weighted

    names = list(bounds)
    free = [n for n in names if not np.ndim(bounds[n]) == 0]
    lo, hi = bounds[free[0]]
    x = np.linspace(lo, hi, 202)[1:-1]
    cols = []
    for n in names:
        b = bounds[n]
        if n == free[0]:
            cols.append(x)
        else:
            cols.append(np.full(x.shape, b if np.ndim(b) == 0 else (b[0] + b[1]) / 2))
    integrand = number(f) if _is_constant(f) else f
    write_plot(path, x, {"J*f": _weighted(integrand, names, coords)(*cols)}, free[0])


# -- parser --------------------------------------------------------------------


def _add_target(p, vector=True):
    p.add_argument("--f", action="append", help="expression; repeat for vector components")
    if vector:
        p.add_argument("--field", help="tensor literal of expressions")
    p.add_argument("--vars", help="comma-separated variable names")
    p.add_argument("--at", help="evaluation point, x=1,y=2 or values matching --vars")
    p.add_argument("--accuracy", type=int, default=4)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="multicalc", description="Numerical and symbolic multivariate calculus.")
    parser.add_argument("--pretty", action="store_true", help="print tables instead of JSON")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("derive", help="symbolic or finite-difference derivatives")
    _add_target(p)
    p.add_argument("--order", default="1", help="order, or one order per variable")
    p.add_argument("--method", choices=["auto", "symbolic", "numeric"], default="auto")
    p.set_defaults(run=cmd_derive)

    p = sub.add_parser("taylor", help="Taylor series (center from --at, else 0)")
    _add_target(p, vector=False)
    p.add_argument("--order", type=int, default=1)
    p.set_defaults(run=cmd_taylor)

    p = sub.add_parser("hermite", help="Hermite polynomials")
    p.add_argument("--order", required=True, help="total degree, or a multi-index like 1,1")
    p.add_argument("--sigma", help="covariance as a JSON nested list")
    p.add_argument("--vars", help="variable names")
    p.set_defaults(run=cmd_hermite)

    p = sub.add_parser("partitions", help="integer partitions")
    p.add_argument("n", type=int)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--fill", action="store_true", help="allow zero parts")
    p.add_argument("--perm", action="store_true", help="all orderings")
    p.add_argument("--unequal", action="store_true", help="every total from 0 to n")
    p.set_defaults(run=cmd_partitions)

    p = sub.add_parser("einstein", help="Einstein summation of named tensors")
    p.add_argument("tensors", nargs="+", help="tensor literals such as i=2,j=2:1,2,3,4")
    p.add_argument("--method", choices=["auto", "generic", "fast"], default="auto")
    p.set_defaults(run=cmd_einstein)

    p = sub.add_parser("contract", help="sum over repeated index names")
    p.add_argument("tensor")
    p.add_argument("--keep", action="store_true", help="keep repeated indices as diagonals")
    p.set_defaults(run=cmd_contract)

    p = sub.add_parser("epsilon", help="Levi-Civita symbol")
    p.add_argument("n", type=int, metavar="dimension")
    p.set_defaults(run=cmd_epsilon)

    p = sub.add_parser("delta", help="generalized Kronecker delta")
    p.add_argument("n", type=int, metavar="dimension")
    p.add_argument("--order", type=int, default=1, help="number of upper (and lower) indices")
    p.set_defaults(run=cmd_delta)

    p = sub.add_parser("cross", help="generalized cross product of n-1 vectors")
    p.add_argument("vectors", nargs="+")
    p.set_defaults(run=cmd_cross)

    for name, fn in (("det", cmd_det), ("inv", cmd_inv)):
        p = sub.add_parser(name, help="determinant" if name == "det" else "inverse")
        p.add_argument("matrix", help="matrix literal, e.g. [[1,2],[3,4]] or 2,2:1,3,2,4")
        p.set_defaults(run=fn)

    p = sub.add_parser("ode", help="fixed-step ODE integration")
    p.add_argument("--f", action="append", required=True, help="right-hand side, one per state")
    p.add_argument("--init", required=True, help="initial state, x=1,y=1")
    p.add_argument("--times", required=True, help="a:b:h")
    p.add_argument("--timevar", default="t")
    p.add_argument("--method", choices=["rk4", "euler"], default="rk4")
    p.add_argument("--plot", help="image file, or .dat for plain data")
    p.set_defaults(run=cmd_ode)

    from multicalc import ops

    for name, fn in (
        ("grad", ops.gradient),
        ("jacobian", ops.jacobian),
        ("hessian", ops.hessian),
        ("div", ops.divergence),
        ("curl", ops.curl),
        ("laplacian", ops.laplacian),
    ):
        p = sub.add_parser(name, help=fn.__doc__.strip().splitlines()[0])
        _add_target(p)
        p.add_argument("--coords", default="cartesian", help="built-in name or comma-separated scale factors")
        p.set_defaults(run=_operator(fn))

    p = sub.add_parser("integrate", help="integral over a box")
    p.add_argument("--f", required=True)
    p.add_argument("--bounds", required=True, help="x=0:1,y=2 (a single value fixes the variable)")
    p.add_argument("--coords", default="cartesian")
    p.add_argument("--method", choices=["adaptive", "monte-carlo"])
    p.add_argument("--seed", type=int, help="Monte Carlo seed (default: CALC_SEED)")
    p.add_argument("--tol", type=float, help="relative tolerance")
    p.add_argument("--budget", type=int, help="evaluation or sample budget")
    p.add_argument("--plot", help="image file, or .dat for plain data")
    p.set_defaults(run=cmd_integrate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = args.run(args)
    except (UsageError, ParseError) as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CalcError, ValueError, ArithmeticError, LookupError, TypeError) as exc:
        print(f"{parser.prog} {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    if args.pretty:
        print(pretty(result))
    else:
        print(json.dumps({"command": args.command, "result": jsonable(result)}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
