import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from slicesemi import linalg
from slicesemi.algebra import algebra
from slicesemi.errors import Singular
from slicesemi.operators import OperatorMatrix, left_mult
from slicesemi.slices import exp_slice

H = algebra("H")


class TestRealify:
    def test_left_multiplication_by_i(self):
        R = left_mult(H.basis("i")).realify()
        want = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], dtype=float)
        np.testing.assert_array_equal(R, want)

    def test_identity(self):
        np.testing.assert_array_equal(OperatorMatrix.identity(H, 3).realify(), np.eye(12))

    def test_products(self):
        rng = np.random.default_rng(0)
        for _ in range(5):
            A = OperatorMatrix(H, rng.standard_normal((3, 3, 4)))
            B = OperatorMatrix(H, rng.standard_normal((3, 3, 4)))
            np.testing.assert_allclose((A @ B).realify(), A.realify() @ B.realify(), atol=1e-12)

    def test_round_trip(self):
        A = OperatorMatrix(H, np.random.default_rng(1).standard_normal((2, 2, 4)))
        np.testing.assert_array_equal(linalg.derealify(A.realify(), 4), A.entries)
        assert linalg.block_structure_residual(A.realify(), H) == 0.0


class TestLU:
    def test_identity(self):
        np.testing.assert_allclose(linalg.lu_solve(np.eye(3), np.ones(3)), np.ones(3))

    def test_diagonal(self):
        np.testing.assert_allclose(linalg.lu_solve(np.diag([2.0, 4.0]), np.ones(2)), [0.5, 0.25])

    def test_spd_residual(self):
        rng = np.random.default_rng(3)
        M = rng.standard_normal((8, 8))
        A = M @ M.T + 8 * np.eye(8)
        b = rng.standard_normal(8)
        assert np.linalg.norm(A @ linalg.lu_solve(A, b) - b) <= 1e-12

    def test_det(self):
        rng = np.random.default_rng(4)
        A = rng.standard_normal((6, 6))
        assert linalg.det(A) == pytest.approx(np.linalg.det(A), rel=1e-12)

    def test_singular(self):
        with pytest.raises(Singular):
            linalg.lu_solve(np.array([[1.0, 2.0], [2.0, 4.0]]), np.ones(2))

    def test_inverse(self):
        A = np.random.default_rng(5).standard_normal((5, 5))
        np.testing.assert_allclose(linalg.inv(A) @ A, np.eye(5), atol=1e-12)


class TestNorms:
    def test_simple(self):
        assert linalg.op_norm2(np.eye(3)) == pytest.approx(1.0)
        assert linalg.op_norm2(np.diag([3.0, -5.0])) == pytest.approx(5.0)
        assert linalg.op_norm2(np.zeros((2, 2))) == 0.0

    @pytest.mark.parametrize("n", [1, 2, 4, 8])
    def test_against_jacobi(self, n):
        rng = np.random.default_rng(n)
        for _ in range(10):
            A = rng.standard_normal((n, n))
            assert linalg.op_norm2(A) == pytest.approx(linalg.singular_values(A)[0], rel=1e-12)

    def test_jacobi_against_lapack(self):
        A = np.random.default_rng(7).standard_normal((7, 5))
        np.testing.assert_allclose(linalg.singular_values(A), scipy.linalg.svdvals(A), rtol=1e-12)

    def test_close_leading_singular_values(self):
        A = np.diag([1.00001, 0.99999, 0.5])
        assert linalg.op_norm2(A) == pytest.approx(1.00001, rel=1e-14)


class TestEigenvalues:
    def test_diagonal(self):
        assert linalg.eig_complex(np.diag([1.0, 2.0])) == [(1.0, 0.0), (2.0, 0.0)]

    def test_rotation(self):
        eigs = linalg.eig_complex(np.array([[0.0, -1.0], [1.0, 0.0]]))
        np.testing.assert_allclose(sorted(eigs), [(0.0, -1.0), (0.0, 1.0)], atol=1e-14)

    def test_companion(self):
        eigs = linalg.eig_complex(np.array([[0.0, -5.0], [1.0, 2.0]]))
        np.testing.assert_allclose(sorted(eigs), [(1.0, -2.0), (1.0, 2.0)], atol=1e-13)

    @pytest.mark.parametrize("n", [3, 6, 12, 16])
    def test_against_lapack(self, n):
        A = np.random.default_rng(n).standard_normal((n, n))
        ours = [complex(a, b) for a, b in linalg.eig_complex(A)]
        ref = list(scipy.linalg.eigvals(A))
        for z in ours:
            k = int(np.argmin([abs(z - w) for w in ref]))
            assert abs(z - ref.pop(k)) <= 1e-9
            assert linalg.char_poly_residual(A, z) <= 1e-10


class TestExpm:
    def test_zero_and_scalar(self):
        np.testing.assert_array_equal(linalg.expm(np.zeros((3, 3))), np.eye(3))
        assert linalg.expm(np.array([[1.0]]))[0, 0] == pytest.approx(math.e, rel=1e-15)

    def test_quaternion_rotation(self):
        R = left_mult(H.basis("j")).realify()
        want = left_mult(exp_slice(math.pi, H.basis("j"))).realify()
        np.testing.assert_allclose(linalg.expm(math.pi * R), want, atol=1e-14)
        np.testing.assert_allclose(linalg.expm(math.pi * R), -np.eye(4), atol=1e-14)

    @pytest.mark.parametrize("scale", [0.1, 1.0, 10.0])
    def test_against_scipy(self, scale):
        A = scale * np.random.default_rng(11).standard_normal((8, 8))
        ref = scipy.linalg.expm(A)
        assert np.abs(linalg.expm(A) - ref).max() <= 1e-12 * np.abs(ref).max()


class TestQuadrature:
    def test_gauss_legendre_exact_for_polynomials(self):
        x, w = linalg.gauss_legendre(5)
        assert np.sum(w * x**8) == pytest.approx(2 / 9, rel=1e-14)


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (5, 5), elements=st.floats(-5, 5)))
def test_op_norm_bounds(A):
    n2 = linalg.op_norm2(A)
    # product of roots: the plain product underflows for tiny entries
    assert n2 <= math.sqrt(linalg.norm_1(A)) * math.sqrt(linalg.norm_inf(A)) * (1 + 1e-12) + 1e-300
    assert n2 >= np.abs(A).max() * (1 - 1e-12)
