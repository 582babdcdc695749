import numpy as np
import pytest

from helpers import equivalent
from multicalc.errors import ShapeError, SingularMatrixError
from multicalc.expr import Expr, Var, evaluate, parse
from multicalc.matrix import mxdet, mxinv, mxprod
from multicalc.tensor import Tensor, make_tensor


def symbolic_matrix(n, prefix="m"):
    names = [[f"{prefix}{i}{j}" for j in range(n)] for i in range(n)]
    return Tensor(names), [v for row in names for v in row]


class TestDet:
    def test_numeric(self):
        assert mxdet(make_tensor((2, 2), None, [1, 2, 3, 4])) == pytest.approx(-2)

    def test_symbolic_2x2(self):
        d = mxdet(make_tensor((2, 2), None, ["a", "b", "c", "d"]))
        assert equivalent(d, parse("a*d - b*c"))

    def test_one_by_one(self):
        assert mxdet(Tensor([["x"]])) == Var("x")

    def test_non_square(self):
        with pytest.raises(ShapeError):
            mxdet(Tensor([[1, 2, 3], [4, 5, 6]]))

    def test_size_guard(self):
        m, _ = symbolic_matrix(9)
        with pytest.raises(ShapeError):
            mxdet(m)

    def test_zero_row_gives_zero(self):
        assert mxdet(Tensor([[0, 0], ["a", "b"]])) == 0.0

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_symbolic_matches_numeric(self, n):
        m, names = symbolic_matrix(n)
        d = mxdet(m)
        rng = np.random.default_rng(n)
        for _ in range(5):
            env = dict(zip(names, rng.normal(size=len(names))))
            num = m.evaluate(env).data
            want = np.linalg.det(num)
            assert evaluate(d, env) == pytest.approx(want, rel=1e-9, abs=1e-12)


class TestInverse:
    def test_numeric(self):
        assert np.allclose(mxinv([[1, 2], [3, 4]]).data, [[-2, 1], [1.5, -0.5]])

    def test_symbolic(self):
        r = mxinv([["a", "b"], ["c", "d"]])
        assert equivalent(r[0, 0], parse("d/(a*d - c*b)"))
        assert equivalent(r[0, 1], parse("-b/(a*d - c*b)"))

    def test_identity(self):
        assert np.array_equal(mxinv(np.eye(3)).data, np.eye(3))

    def test_numeric_singular(self):
        with pytest.raises(SingularMatrixError):
            mxinv([[1, 2], [2, 4]])

    def test_symbolic_singular(self):
        with pytest.raises(SingularMatrixError):
            mxinv([["a", "b"], [0, 0]])

    def test_shared_denominator(self):
        r = mxinv([["a", "b"], ["c", "d"]])
        dens = {e.right for e in r.data.flat if isinstance(e, Expr)}
        assert len(dens) == 1

    @pytest.mark.parametrize("n", [2, 3])
    def test_product_with_inverse_is_identity(self, n):
        m, names = symbolic_matrix(n)
        prod = mxprod(m, mxinv(m))
        rng = np.random.default_rng(10 + n)
        for _ in range(10):
            # diagonally dominant bindings keep the evaluation well conditioned
            vals = rng.uniform(-1, 1, size=(n, n)) + 3 * np.eye(n)
            env = dict(zip(names, vals.ravel()))
            assert np.allclose(prod.evaluate(env).data, np.eye(n), atol=1e-9)


class TestProduct:
    def test_mixed(self):
        r = mxprod([[1, 2], [3, 4]], [["a", "b"], ["c", "d"]])
        assert equivalent(r[0, 0], parse("a + 2*c"))
        assert equivalent(r[1, 1], parse("3*b + 4*d"))

    def test_identity(self):
        a = np.arange(6.0).reshape(2, 3)
        assert np.array_equal(mxprod(a, np.eye(3)).data, a)

    def test_triple_loop_oracle(self):
        rng = np.random.default_rng(5)
        a = rng.integers(-9, 10, size=(3, 4)).astype(float)
        b = rng.integers(-9, 10, size=(4, 2)).astype(float)
        want = np.zeros((3, 2))
        for i in range(3):
            for j in range(2):
                for k in range(4):
                    want[i, j] += a[i, k] * b[k, j]
        got = mxprod(a, b)
        assert got.names == (None, None)
        assert np.array_equal(got.data, want)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            mxprod(np.ones((2, 3)), np.ones((2, 3)))
