import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slicesemi.algebra import algebra, random_cone_element, random_imaginary_unit
from slicesemi.errors import NotInCone, OnSphere
from slicesemi.slices import (
    StemFunction,
    cauchy_kernel,
    constant_stem,
    cr_residual,
    eval_slice,
    even_odd_residual,
    exp_series,
    exp_slice,
    exp_stem,
    identity_stem,
    is_real_slice,
    poly_stem,
    slice_product,
    square_stem,
    stem_from_samples,
)

H = algebra("H")
O = algebra("O")
Cl3 = algebra("Cl3")
SAMPLES = [0.3 + 0.7j, -1.2 + 0.4j, 2.0 + 1.5j, 0.5 - 0.9j]


def real_part_stem(desc):
    return StemFunction(lambda z: desc.real(z.real), lambda z: desc.zero(), desc, "re")


class TestEvaluation:
    def test_identity(self):
        q = H.parse_element("2+3j")
        assert eval_slice(identity_stem(H), q) == q

    def test_real_argument(self):
        F = poly_stem(H, [1.0, -2.0, 0.5])
        assert eval_slice(F, H.real(2.0)).allclose(H.real(1 - 4 + 2))

    def test_euler(self):
        assert eval_slice(exp_stem(H), H.basis("j") * math.pi).allclose(H.real(-1.0), atol=1e-15)

    def test_branch_independence(self):
        rng = np.random.default_rng(2)
        F = poly_stem(H, [H.parse_element("1+k"), H.parse_element("i"), 2.0])
        for _ in range(10):
            a = random_cone_element(H, rng)
            assert eval_slice(F, a).allclose(eval_slice(F, a, branch=-1), atol=1e-12)

    def test_off_cone_rejected(self):
        with pytest.raises(NotInCone):
            eval_slice(identity_stem(Cl3), Cl3.basis("e123"))


class TestExponential:
    def test_zero_and_real(self):
        assert exp_slice(1.0, H.zero()) == H.one()
        assert exp_slice(0.7, H.real(-1.3)).allclose(H.real(math.exp(-0.91)))

    @pytest.mark.parametrize("name", ["H", "O", "Cl3", "Cl5"])
    def test_matches_series(self, name):
        desc = algebra(name)
        j = desc.basis(1)
        assert (exp_slice(1.0, j) - exp_series(1.0, j)).norm() <= 1e-14
        assert exp_slice(1.0, j).allclose(desc.real(math.cos(1)) + j * math.sin(1), atol=1e-15)

    def test_random_against_series(self):
        rng = np.random.default_rng(4)
        for desc in (H, O, Cl3):
            for _ in range(5):
                a = random_cone_element(desc, rng)
                assert (exp_slice(0.8, a) - exp_series(0.8, a, terms=60)).norm() <= 1e-12 * max(1, exp_slice(0.8, a).norm())


class TestCauchyKernel:
    def test_reals(self):
        assert cauchy_kernel(H.real(2), H.real(1)).allclose(H.one())

    def test_commuting(self):
        j = H.basis("j")
        q, p = H.real(1) + j * 2, H.real(-0.5) + j * 0.3
        z = complex(1, 2) - complex(-0.5, 0.3)
        assert cauchy_kernel(q, p).allclose(H.real((1 / z).real) + j * (1 / z).imag, atol=1e-14)

    def test_same_sphere(self):
        with pytest.raises(OnSphere):
            cauchy_kernel(H.basis("i"), H.basis("j"))

    def test_left_kernel_identity(self):
        # S^-1(q, p) q - p S^-1(q, p) = 1 for the left kernel in q
        rng = np.random.default_rng(9)
        for _ in range(10):
            q, p = random_cone_element(H, rng), random_cone_element(H, rng)
            S = cauchy_kernel(q, p)
            assert (S * q - p * S).allclose(H.one(), atol=1e-10)


class TestSliceProduct:
    def test_real_factor_is_pointwise(self):
        rng = np.random.default_rng(1)
        F = exp_stem(H)
        G = poly_stem(H, [H.parse_element("k"), H.parse_element("1+i")])
        FG = slice_product(F, G)
        for _ in range(5):
            a = random_cone_element(H, rng)
            assert eval_slice(FG, a).allclose(eval_slice(F, a) * eval_slice(G, a), atol=1e-12)

    def test_square(self):
        q = H.parse_element("0.3+i-2k")
        assert eval_slice(slice_product(identity_stem(H), identity_stem(H)), q).allclose(q * q, atol=1e-13)
        assert eval_slice(square_stem(H), q).allclose(q * q, atol=1e-13)

    def test_non_real_stems_differ_from_pointwise(self):
        F = constant_stem(H.basis("k"))
        G = poly_stem(H, [0.0, H.basis("i")])
        a = H.parse_element("0.5+j")
        slice_val = eval_slice(slice_product(F, G), a)
        pointwise = eval_slice(F, a) * eval_slice(G, a)
        assert (slice_val - pointwise).norm() > 0.1


class TestStemFromSamples:
    @pytest.mark.parametrize("f", [lambda a: a, lambda a: a * a])
    def test_round_trip(self, f):
        j = H.basis("k")
        F = stem_from_samples(f, j)
        q = H.parse_element("0.4-0.2i+j+0.7k")
        assert eval_slice(F, q).allclose(f(q), atol=1e-13)

    def test_exp(self):
        F = stem_from_samples(lambda a: exp_slice(1.0, a), H.basis("i"))
        q = H.parse_element("0.1+2j-k")
        assert eval_slice(F, q).allclose(exp_slice(1.0, q), atol=1e-13)


class TestRegularity:
    @pytest.mark.parametrize("stem", [lambda d: poly_stem(d, [1, 2, -3, 0.5]), exp_stem, square_stem])
    def test_regular_stems(self, stem):
        for z in SAMPLES:
            assert cr_residual(stem(H), z) <= 1e-6

    def test_quadratic_convergence(self):
        r1 = cr_residual(exp_stem(H), 0.4 + 0.9j, h=1e-2)
        r2 = cr_residual(exp_stem(H), 0.4 + 0.9j, h=5e-3)
        assert r1 / r2 == pytest.approx(4.0, rel=0.05)

    def test_real_part_not_regular(self):
        assert cr_residual(real_part_stem(H), 0.5 + 0.5j) == pytest.approx(1.0, rel=1e-6)

    def test_even_odd(self):
        assert even_odd_residual(exp_stem(H), SAMPLES) <= 1e-15

    def test_real_slice(self):
        assert is_real_slice(exp_stem(H), SAMPLES)
        assert is_real_slice(poly_stem(H, [1, 0, 2]), SAMPLES)
        assert not is_real_slice(constant_stem(H.basis("k")), SAMPLES)


@settings(max_examples=50, deadline=None)
@given(
    a=st.floats(-3, 3),
    b=st.floats(0.05, 3),
    seed=st.integers(0, 2**31),
    name=st.sampled_from(["H", "O", "Cl3"]),
)
def test_exp_restricts_to_complex_exponential(a, b, seed, name):
    desc = algebra(name)
    j = random_imaginary_unit(desc, np.random.default_rng(seed))
    w = cmath.exp(complex(a, b))
    got = exp_slice(1.0, desc.real(a) + j * b)
    assert got.allclose(desc.real(w.real) + j * w.imag, atol=1e-12 * max(1.0, abs(w)))
