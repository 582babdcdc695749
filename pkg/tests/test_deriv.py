import math
import random
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import ACCURACY_CASES, equivalent
from multicalc.deriv import (
    default_step,
    derivative,
    derivative_numeric,
    derivative_symbolic,
    fd_coefficients,
    make_request,
    mixed_partial,
)
from multicalc.errors import DomainError, ShapeError
from multicalc.expr import evaluate, parse


class TestStencil:
    def test_first_order_second_accuracy(self):
        assert fd_coefficients(1, 2).coefficients == (-0.5, 0.0, 0.5)

    def test_second_order_weights(self):
        s = fd_coefficients(2, 2)
        assert s.weights == (1.0, -2.0, 1.0)
        assert s.coefficients == (0.5, -1.0, 0.5)

    def test_first_order_fourth_accuracy(self):
        c = fd_coefficients(1, 4).coefficients
        assert c == pytest.approx((1 / 12, -2 / 3, 0, 2 / 3, -1 / 12), abs=1e-12)

    def test_trivial(self):
        s = fd_coefficients(0, 4)
        assert s.offsets == (0,) and s.coefficients == (1.0,)

    @pytest.mark.parametrize("p", [0, 3, -2])
    def test_bad_accuracy(self, p):
        with pytest.raises(ValueError):
            fd_coefficients(1, p)

    @pytest.mark.parametrize("n", range(1, 7))
    @pytest.mark.parametrize("p", [2, 4, 6, 8])
    def test_moments(self, n, p):
        s = fd_coefficients(n, p)
        assert s.half_width == (n + p - 1) // 2
        assert len(s.offsets) == 2 * s.half_width + 1
        for m in range(2 * s.half_width + 1):
            total = sum(c * j**m for c, j in zip(s.coefficients, s.offsets))
            assert total == pytest.approx(float(m == n), abs=1e-10)
        # exact arithmetic satisfies them with no error at all
        for m in range(2 * s.half_width + 1):
            assert sum(c * Fraction(j) ** m for c, j in zip(s.exact, s.offsets)) == int(m == n)

    @pytest.mark.parametrize("n", range(1, 7))
    @pytest.mark.parametrize("p", [2, 4, 6, 8])
    def test_weights_match_sympy(self, n, p):
        s = fd_coefficients(n, p)
        ref = sympy.finite_diff_weights(n, list(s.offsets), 0)[n][-1]
        assert [Fraction(str(r)) for r in ref] == [c * math.factorial(n) for c in s.exact]

    @pytest.mark.parametrize("n", range(1, 5))
    @pytest.mark.parametrize("p", [2, 4, 6])
    def test_monomials_exact(self, n, p):
        x0, h = 0.7, 0.125
        for m in range(n + p):
            fn = lambda pt: np.array(pt[0] ** m)
            got = float(mixed_partial(fn, (x0,), (n,), p, steps=(h,)))
            want = math.perm(m, n) * x0 ** (m - n) if m >= n else 0.0
            assert got == pytest.approx(want, abs=1e-10 * max(1.0, abs(want)))


class TestNumeric:
    def test_sin_at_zero(self):
        assert derivative(math.sin, {"x": 0}).item() == pytest.approx(1, abs=1e-10)

    def test_fourth_order(self):
        assert abs(derivative(math.sin, {"x": 0}, order=4).item()) < 1e-6

    def test_mixed(self):
        f = lambda x, y: y**2 * math.sin(x)
        assert derivative(f, {"x": 0, "y": 0}, order=[1, 2], accuracy=6).item() == pytest.approx(2, abs=1e-8)

    def test_gradient(self):
        r = derivative(lambda x, y: x**2 * y**2, {"x": 1, "y": 2})
        assert r.data == pytest.approx([8, 4], abs=1e-8)

    def test_jacobian(self):
        r = derivative(lambda x, y: [x * y, x**2 * y**2], {"x": 1, "y": 2})
        assert r.shape == (2, 2)
        assert np.allclose(r.data, [[2, 1], [8, 4]], atol=1e-8)

    def test_parameter_vector(self):
        r = derivative(lambda v: [v.sum(), v.prod()], [0, 0, 0])
        assert np.allclose(r.data, [[1, 1, 1], [0, 0, 0]], atol=1e-12)

    def test_zero_order_is_noop(self):
        f = lambda x, y: x**2 * y**2
        a = derivative(f, {"x": 1, "y": 2}, order={"x": 1, "y": 0}).item()
        b = derivative(lambda x: f(x, 2), {"x": 1}).item()
        assert a == b

    def test_order_mapping_partial(self):
        f = lambda x, y: x**3 * y
        assert derivative(f, {"x": 1, "y": 2}, order={"x": 2}).item() == pytest.approx(12, rel=1e-7)

    def test_explicit_steps(self):
        f = lambda x: x**2
        assert derivative(f, {"x": 3}, accuracy=2, h=0.5).item() == pytest.approx(6, abs=1e-12)

    def test_non_finite(self):
        with pytest.raises(DomainError):
            derivative(lambda x: math.log(x) if x > 0 else math.inf, {"x": 0.0})

    def test_needs_point(self):
        with pytest.raises(ValueError):
            derivative(math.sin, "x")

    def test_order_length_mismatch(self):
        with pytest.raises(ShapeError):
            derivative("x*y*z", ["x", "y", "z"], order=[1, 2])

    def test_unknown_order_name(self):
        with pytest.raises(ValueError):
            derivative("x*y", ["x", "y"], order={"z": 1})

    def test_odd_accuracy(self):
        with pytest.raises(ValueError):
            derivative(math.sin, {"x": 0}, accuracy=3)

    def test_expression_numeric_path(self):
        r = derivative("x^2*y^2", {"x": 1, "y": 2}, method="numeric")
        assert np.allclose(r.data, [8, 4], atol=1e-8)

    def test_default_step_exact(self):
        for x in (0.0, 0.3, 1.7, -12.5, 1e5):
            h = default_step(x, 1, 4)
            assert (x + h) - x == h
            assert h > 0


class TestSymbolic:
    def test_sin(self):
        assert derivative("sin(x)", "x").item() == parse("cos(x)")

    def test_evaluated(self):
        assert derivative("sin(x)", {"x": 0}).item() == 1.0

    def test_mixed(self):
        assert equivalent(derivative("y^2*sin(x)", ["x", "y"], order=[1, 2]).item(), parse("2*cos(x)"))

    def test_gradient(self):
        r = derivative("x^2*y^2", ["x", "y"])
        assert equivalent(r[0], parse("2*x*y^2"))
        assert equivalent(r[1], parse("2*x^2*y"))

    def test_sixth_order(self):
        r = derivative("x^6*y^6", ["x", "y"], order=6)
        assert equivalent(r[0], parse("720*y^6"))
        assert equivalent(r[1], parse("720*x^6"))

    def test_constant(self):
        assert derivative("3", "x").item() == 0.0

    def test_tensor_target(self):
        r = derivative([["x*y", "x"], ["y", "1"]], ["x", "y"])
        assert r.shape == (2, 2, 2)
        assert r[0, 0, 1] == parse("x")

    def test_request_fields(self):
        req = make_request("x*y", {"x": 1, "y": 2}, order=2)
        assert req.orders is None and req.outer == 2
        assert req.point == (1.0, 2.0)
        assert derivative_symbolic(req).tolist() == [0.0, 0.0]


_ATOMS = ["x", "y", "sin(x)", "cos(y)", "exp(0.3*x)", "x^2", "x*y", "y^3", "sin(x*y)"]


@st.composite
def smooth_expr(draw):
    terms = draw(st.lists(st.tuples(st.sampled_from(_ATOMS), st.sampled_from(_ATOMS), st.integers(-3, 3)), min_size=1, max_size=3))
    return parse(" + ".join(f"({c})*{a}*{b}" for a, b, c in terms))


@settings(max_examples=60, deadline=None)
@given(
    smooth_expr(),
    st.tuples(st.integers(0, 3), st.integers(0, 3)).filter(lambda o: sum(o) <= 3),
    st.floats(-1.5, 1.5),
    st.floats(-1.5, 1.5),
)
def test_symbolic_numeric_agreement(e, orders, x, y):
    point = {"x": x, "y": y}
    sym = derivative_symbolic(make_request(e, point, list(orders)))
    num = derivative_numeric(make_request(e, point, list(orders)))
    s, n = sym.item(), num.item()
    assert abs(n - s) <= 1e-6 * max(1.0, abs(s))


@pytest.mark.parametrize("text", list(ACCURACY_CASES))
def test_accuracy_sample(text):
    f = parse(text)
    fn = lambda x: evaluate(f, {"x": x})
    rng = random.Random(text)
    errs = []
    for _ in range(200):
        x = rng.uniform(0.5, 2)
        exact = ACCURACY_CASES[text](x)
        errs.append(abs(derivative(fn, {"x": x}).item() - exact) / abs(exact))
    assert np.mean(errs) <= 1e-8
    assert max(errs) <= 1e-5
