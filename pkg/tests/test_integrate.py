import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multicalc.errors import DomainError
from multicalc.expr import combine, parse, substitute
from multicalc.integrate import integral, surface_integral_fixed
from multicalc.ops import gradient

PI = math.pi
BALL = {"r": (0, 1), "theta": (0, PI), "phi": (0, 2 * PI)}
SPHERE = {"r": 1, "theta": (0, PI), "phi": (0, 2 * PI)}


def field_radial():
    e = gradient("1/(4*pi*r)", ["r", "theta", "phi"], "spherical")[0]
    return combine("-", 0.0, e)


class TestAdaptive:
    def test_univariate(self):
        assert integral("x", {"x": (0, 1)}).value == pytest.approx(0.5, rel=1e-12)

    def test_callable(self):
        assert integral(lambda x: x, {"x": (0, 1)}).value == pytest.approx(0.5, rel=1e-12)

    def test_scalar_only_callable(self):
        r = integral(lambda x: math.sin(x), {"x": (0, PI)})
        assert r.value == pytest.approx(2, rel=1e-9)

    def test_fixed_variable(self):
        assert integral("y*x", {"x": (0, 1), "y": 2}).value == pytest.approx(1, rel=1e-12)

    def test_bivariate(self):
        assert integral("y*x", {"x": (0, 1), "y": (0, 1)}).value == pytest.approx(0.25, rel=1e-12)

    def test_circle_area(self):
        r = integral(1, {"r": (0, 1), "theta": (0, 2 * PI)}, "polar")
        assert round(r.value, 4) == 3.1416

    def test_ball_volume(self):
        r = integral(1, BALL, "spherical")
        assert round(r.value, 4) == 4.1888
        assert r.value == pytest.approx(4 * PI / 3, rel=1e-6)
        assert r.converged and r.error >= 0

    def test_cylinder_volume(self):
        r = integral(1, {"r": (0, 1), "phi": (0, 2 * PI), "z": (0, 1)}, "cylindrical")
        assert r.value == pytest.approx(PI, rel=1e-6)

    def test_gauss_law(self):
        r = surface_integral_fixed(field_radial(), SPHERE, "spherical")
        assert r.value == pytest.approx(1, rel=1e-3)
        assert r.value == pytest.approx(1, rel=1e-6)

    def test_sphere_area(self):
        assert surface_integral_fixed(1, SPHERE, "spherical").value == pytest.approx(4 * PI, rel=1e-9)

    def test_circumference(self):
        r = surface_integral_fixed(1, {"r": 1, "theta": (0, 2 * PI)}, "polar")
        assert r.value == pytest.approx(2 * PI, rel=1e-12)

    def test_boundary_singularity(self):
        # 1/r^2 diverges at r = 0 but J = r^2 sin(theta) cancels it
        r = integral("1/r^2", BALL, "spherical")
        assert r.value == pytest.approx(4 * PI, rel=1e-9)

    def test_refines_peaked_integrand(self):
        r = integral("exp(-100*(x-0.3)^2)", {"x": (0, 1)}, rel_tol=1e-10)
        assert r.converged
        assert r.value == pytest.approx(math.sqrt(PI) / 20 * (math.erf(7) + math.erf(3)), rel=1e-9)

    def test_budget_flag(self):
        r = integral("sqrt(x)", {"x": (0, 1)}, rel_tol=1e-15, budget=200)
        assert not r.converged
        assert r.evaluations <= 200
        assert r.value == pytest.approx(2 / 3, rel=1e-4)

    def test_six_dimensions(self):
        names = [f"x{i}" for i in range(6)]
        r = integral(" + ".join(names), {n: (0, 1) for n in names})
        assert r.value == pytest.approx(3, rel=1e-12)

    def test_too_many_dimensions(self):
        names = [f"x{i}" for i in range(7)]
        with pytest.raises(ValueError):
            integral(1, {n: (0, 1) for n in names}, method="adaptive")

    def test_default_method_switches(self):
        names = [f"x{i}" for i in range(7)]
        r = integral(1, {n: (0, 1) for n in names}, budget=1000, seed=0)
        assert r.method == "monte-carlo"
        assert r.value == pytest.approx(1, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.integers(-5, 5), min_size=14, max_size=14),
    st.floats(-3, 3),
    st.floats(0.1, 4),
)
def test_polynomial_exactness_1d(coefs, a, width):
    # Gauss-Legendre with 7 points is exact through degree 13
    b = a + width
    expr = " + ".join(f"({c})*x^{k}" for k, c in enumerate(coefs))
    want = math.fsum(c * (b ** (k + 1) - a ** (k + 1)) / (k + 1) for k, c in enumerate(coefs))
    got = integral(expr, {"x": (a, b)}).value
    scale = math.fsum(abs(c) * max(abs(a), abs(b)) ** (k + 1) / (k + 1) for k, c in enumerate(coefs))
    assert abs(got - want) <= 1e-12 * max(abs(want), scale, 1e-300)


def test_polynomial_exactness_3d():
    rng = np.random.default_rng(4)
    for _ in range(20):
        p = rng.integers(0, 14, size=3)
        lo = rng.uniform(-1, 1, 3)
        hi = lo + rng.uniform(0.5, 2, 3)
        expr = f"x^{p[0]}*y^{p[1]}*z^{p[2]}"
        want = np.prod([(hi[i] ** (p[i] + 1) - lo[i] ** (p[i] + 1)) / (p[i] + 1) for i in range(3)])
        got = integral(expr, {"x": (lo[0], hi[0]), "y": (lo[1], hi[1]), "z": (lo[2], hi[2])}).value
        assert got == pytest.approx(want, rel=1e-12)


class TestMonteCarlo:
    def test_unbiased(self):
        vals, errs = [], []
        for seed in range(50):
            r = integral("x", {"x": (0, 1)}, method="monte-carlo", budget=10**4, seed=seed)
            vals.append(r.value)
            errs.append(r.error)
        combined = math.sqrt(sum(e**2 for e in errs)) / len(errs)
        assert abs(np.mean(vals) - 0.5) <= 3 * combined

    def test_gauss_law_within_three_sigma(self):
        r = integral(field_radial(), SPHERE, "spherical", method="monte-carlo", seed=11)
        assert abs(r.value - 1) <= 3 * r.error

    @pytest.mark.parametrize(
        "bounds,coords,want",
        [
            ({"x": (0, 1)}, "cartesian", 0.5),
            ({"x": (0, 1), "y": 2}, "cartesian", 1.0),
            ({"x": (0, 1), "y": (0, 1)}, "cartesian", 0.25),
        ],
    )
    def test_reference_values(self, bounds, coords, want):
        r = integral("y*x" if "y" in bounds else "x", bounds, coords, method="monte-carlo", seed=5)
        assert abs(r.value - want) <= 3 * r.error

    def test_volumes(self):
        r = integral(1, BALL, "spherical", method="monte-carlo", seed=2)
        assert abs(r.value - 4 * PI / 3) <= 3 * r.error
        r = integral(1, {"r": (0, 1), "theta": (0, 2 * PI)}, "polar", method="monte-carlo", seed=2)
        assert abs(r.value - PI) <= 3 * r.error

    def test_reproducible(self):
        a = integral("sin(x*y)", {"x": (0, 1), "y": (0, 2)}, method="monte-carlo", seed=7)
        b = integral("sin(x*y)", {"x": (0, 1), "y": (0, 2)}, method="monte-carlo", seed=7)
        assert a == b
        assert a.seed == 7

    def test_seed_recorded(self):
        r = integral("x", {"x": (0, 1)}, method="monte-carlo", budget=100)
        again = integral("x", {"x": (0, 1)}, method="monte-carlo", budget=100, seed=r.seed)
        assert r.value == again.value

    def test_chunking_consistent(self):
        # more samples than one chunk: running moments stay accurate
        r = integral("x", {"x": (0, 1)}, method="monte-carlo", budget=250_000, seed=1)
        assert r.evaluations == 250_000
        assert r.error == pytest.approx(1 / math.sqrt(12 * 250_000), rel=0.01)

    def test_tolerance_sets_flag(self):
        r = integral("x", {"x": (0, 1)}, method="monte-carlo", budget=100, seed=0, rel_tol=1e-9)
        assert not r.converged


@pytest.mark.parametrize("method", ["adaptive", "monte-carlo"])
def test_fixed_variable_reduction(method):
    f = parse("y*x^2 + sin(y)*x")
    reduced = substitute(f, {"y": 2.0})
    a = integral(f, {"x": (0, 1), "y": 2}, method=method, seed=3)
    b = integral(reduced, {"x": (0, 1)}, method=method, seed=3)
    assert a.value == b.value
    assert a.error == b.error


def test_fixed_variable_reduction_callable():
    a = integral(lambda x, y: y * x, {"x": (0, 1), "y": 2}, method="monte-carlo", seed=9)
    b = integral(lambda x: 2 * x, {"x": (0, 1)}, method="monte-carlo", seed=9)
    assert a.value == b.value


def test_custom_factors_match_builtin():
    a = integral("r", BALL, "spherical")
    b = integral("r", BALL, [1, "r", "r*sin(theta)"])
    assert a.value == b.value


class TestErrors:
    def test_all_fixed(self):
        with pytest.raises(ValueError):
            integral("x", {"x": 1})

    def test_reversed(self):
        with pytest.raises(ValueError):
            integral("x", {"x": (1, 0)})

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            integral("x", {"x": (0, 1)}, method="simpson")

    def test_interior_singularity(self):
        with pytest.raises(DomainError):
            integral(lambda x: np.where(x > 0.5, np.inf, 1.0), {"x": (0, 1)})

    def test_surface_needs_one_fixed(self):
        with pytest.raises(ValueError):
            surface_integral_fixed(1, BALL, "spherical")
