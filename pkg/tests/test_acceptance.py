"""Acceptance suite: one test per criterion, at the stated tolerances.

Each test records its criterion number, a title and the measured figures as
user properties; ``conftest.py`` prints one pass/fail line per criterion.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from slicesemi.algebra import (
    algebra,
    clifford_op_norm,
    cone_decompose,
    random_cone_element,
    random_imaginary_unit,
)
from slicesemi.contour import (
    QuadratureSpec,
    contour_parameter_independence,
    exp_ray_integral_zero,
    identity_integral,
    random_sectorial,
    resolvent_contour,
    sector_check,
    semigroup_contour,
    slice_cauchy_reconstruct,
)
from slicesemi.operators import (
    C,
    GrowthBound,
    OperatorMatrix,
    commutation_residual,
    delta,
    in_spherical_resolvent,
    left_mult,
    neumann_resolvent,
    random_operator,
    resolvent_equation_residual,
    spherical_spectrum,
)
from slicesemi.semigroup import Violation, check_hille_yosida, evolve_expm, evolve_yosida
from slicesemi.slices import eval_slice, exp_stem, identity_stem, square_stem

H = algebra("H")
EPS = np.finfo(float).eps


@pytest.fixture
def criterion(record_property):
    def record(number: int, title: str, detail: str = "") -> None:
        record_property("criterion", number)
        record_property("title", title)
        record_property("detail", detail)

    return record


# ---------------------------------------------------------------------------
# 1


def _axiom_residuals(desc, x, y):
    mul, conj = desc.mul_coeffs, desc.conj_coeffs
    nx = np.linalg.norm(x, axis=1)
    ny = np.linalg.norm(y, axis=1)
    xx = mul(x, x)
    out = {}

    def rel(diff, scale):
        return float(np.max(np.linalg.norm(diff, axis=1) / scale))

    out["left alternative"] = rel(mul(x, mul(x, y)) - mul(xx, y), nx**2 * ny)
    out["right alternative"] = rel(mul(mul(y, x), x) - mul(y, xx), nx**2 * ny)
    out["conj of product"] = rel(conj(mul(x, y)) - mul(conj(y), conj(x)), nx * ny)
    out["conj involutive"] = rel(conj(conj(x)) - x, nx)
    a, b = 0.7, -1.3
    out["conj linear"] = rel(conj(a * x + b * y) - a * conj(x) - b * conj(y), nx + ny)
    out["power associative"] = rel(mul(xx, x) - mul(x, xx), nx**3)
    out["fourth power"] = rel(mul(xx, xx) - mul(x, mul(x, xx)), nx**4)
    return out


def test_criterion_01_algebra_axioms(criterion):
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    worst = {}
    for name in ("R", "C", "H", "O", "Cl3", "Cl5"):
        desc = algebra(name)
        x, y = rng.standard_normal((2, 10_000, desc.dim))
        res = _axiom_residuals(desc, x, y)
        conj_real = np.abs(desc.conj_coeffs(np.eye(desc.dim)[:1]) - np.eye(desc.dim)[:1]).max()
        worst[name] = max(max(res.values()), float(conj_real))
    elapsed = time.perf_counter() - start
    top = max(worst.values())
    criterion(1, "algebra axioms on 10^4 samples per family", f"max rel residual {top:.2e}, {elapsed:.2f} s")
    assert top <= 1e-11, worst
    assert elapsed < 10.0


# ---------------------------------------------------------------------------
# 2


def test_criterion_02_clifford_zero_divisor_and_norm(criterion):
    Cl3 = algebra("Cl3")
    e123 = Cl3.basis("e123")
    prod = (Cl3.one() - e123) * (Cl3.one() + e123)
    rng = np.random.default_rng(2)
    worst = -math.inf
    for _ in range(1000):
        x, y = Cl3.element(rng.standard_normal(8)), Cl3.element(rng.standard_normal(8))
        lhs = clifford_op_norm(x * y)
        rhs = clifford_op_norm(x) * clifford_op_norm(y)
        worst = max(worst, (lhs - rhs) / rhs)
    criterion(
        2,
        "Clifford zero divisor and submultiplicative norm",
        f"product max |coeff| {np.abs(prod.coeffs).max():.1e}, max (|xy| - |x||y|)/|x||y| {worst:.2e}",
    )
    assert np.all(prod.coeffs == 0.0)
    # op_norm2 is accurate to a few ulps; the inequality is checked with that rounding slack
    assert worst <= 8 * EPS


# ---------------------------------------------------------------------------
# 3


def _delta_terms(nR, a, modulus):
    # for m = 1 Delta vanishes identically on the sphere, so sigma_max alone is rounding noise
    return 1e-8 * (nR**2 + 2 * abs(a) * nR + modulus**2)


def test_criterion_03_spectrum_oracle(criterion):
    rng = np.random.default_rng(3)
    start = time.perf_counter()
    worst_on, best_off = 0.0, math.inf
    checked_on = checked_off = 0
    for trial in range(100):
        m = 1 + trial % 4
        A = random_operator(H, m, rng)
        spec = spherical_spectrum(A, seed=trial)
        nR = float(np.linalg.norm(A.realify(), 2))
        for s in spec:
            for _ in range(10):
                alpha = s.representative(random_imaginary_unit(H, rng))
                sv = np.linalg.svd(delta(A, alpha).realify(), compute_uv=False)
                worst_on = max(worst_on, sv[-1] / max(sv[0], _delta_terms(nR, s.a, s.modulus)))
                checked_on += 1
        nA = A.norm()
        hits = 0
        while hits < 1:
            a, b = rng.uniform(-1.5 * nA, 1.5 * nA), rng.uniform(0, 1.5 * nA)
            if spec.distance(a, b) < 0.25 * max(1.0, nA):
                continue
            alpha = H.real(a) + random_imaginary_unit(H, rng) * b
            sv = np.linalg.svd(delta(A, alpha).realify(), compute_uv=False)
            best_off = min(best_off, sv[-1] / sv[0])
            assert in_spherical_resolvent(A, alpha)
            hits += 1
            checked_off += 1
    elapsed = time.perf_counter() - start
    criterion(
        3,
        "spherical spectrum makes Delta singular, off-sphere Delta invertible",
        f"{checked_on} sphere points max sigma_min / max(sigma_max, term scale) {worst_on:.1e}; "
        f"{checked_off} off-sphere min {best_off:.1e}; {elapsed:.1f} s",
    )
    assert worst_on < 1e-6
    assert best_off >= 1e-6
    assert elapsed < 30.0


# ---------------------------------------------------------------------------
# 4


def test_criterion_04_resolvent_identities(criterion):
    rng = np.random.default_rng(4)
    reseq = lu = comm = 0.0
    for name in ("H", "Cl3"):
        desc = algebra(name)
        for trial in range(20):
            A = random_operator(desc, 1 + trial % 3, rng)
            nb = A.norm()
            lam, mu = nb + rng.uniform(0.2, 2), nb + rng.uniform(0.2, 2)
            reseq = max(reseq, resolvent_equation_residual(A, lam, mu))
            R = A.realify()
            oracle = np.linalg.inv(lam * np.eye(R.shape[0]) - R)
            lu = max(lu, float(np.linalg.norm(C(A, desc.real(lam)).realify() - oracle, 2)))
            alpha = desc.real(rng.normal()) + random_imaginary_unit(desc, rng) * (nb + rng.uniform(0.2, 2))
            comm = max(comm, commutation_residual(A, alpha))
    criterion(
        4,
        "resolvent equation, C_lam = (lam - A)^-1, C alpha - A C = Id on H and Cl(0,3)",
        f"resolvent eq {reseq:.1e}, vs LU {lu:.1e}, commutation {comm:.1e}",
    )
    assert reseq <= 1e-9
    assert lu <= 1e-10
    assert comm <= 1e-9


# ---------------------------------------------------------------------------
# 5


def _frac_matrix(M):
    return [[Fraction(float(v)) for v in row] for row in M]


def _frac_mul(P, Q):
    n, k, m = len(P), len(Q), len(Q[0])
    return [[sum((P[i][t] * Q[t][j] for t in range(k)), Fraction(0)) for j in range(m)] for i in range(n)]


def _frac_inv(M):
    n = len(M)
    aug = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def _exact_neumann_gap(B, alpha, N):
    """Exact ``C_alpha(B) - S_N`` as a float matrix (entries rounded only at the end)."""
    desc, m = B.desc, B.m
    n = m * desc.dim
    d = desc.dim
    R = _frac_matrix(B.realify())
    a = [Fraction(float(c)) for c in alpha.coeffs]
    nsq = sum(c * c for c in a)
    ac = [a[0]] + [-c for c in a[1:]]
    basis_left = desc.left_matrix(np.eye(d))

    def left_of(coeffs):
        blockm = [[sum((coeffs[k] * int(basis_left[k][r][c]) for k in range(d)), Fraction(0)) for c in range(d)] for r in range(d)]
        out = [[Fraction(0)] * n for _ in range(n)]
        for blk in range(m):
            for r in range(d):
                for c in range(d):
                    out[blk * d + r][blk * d + c] = blockm[r][c]
        return out

    def qmul(p, q):
        # structure constants are integers (0, +-1), so the product stays exact
        return [
            sum((p[s] * q[t] * int(desc.structure[s, t, u]) for s in range(d) for t in range(d)), Fraction(0))
            for u in range(d)
        ]

    eye = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    R2 = _frac_mul(R, R)
    Delta = [[R2[i][j] - 2 * a[0] * R[i][j] + nsq * eye[i][j] for j in range(n)] for i in range(n)]
    Qm = _frac_inv(Delta)
    QL = _frac_mul(Qm, left_of(ac))
    RQ = _frac_mul(R, Qm)
    inv_a = [c / nsq for c in ac]
    scal = inv_a
    power = eye
    S = [[Fraction(0)] * n for _ in range(n)]
    for _ in range(N + 1):
        T = _frac_mul(power, left_of(scal))
        S = [[S[i][j] + T[i][j] for j in range(n)] for i in range(n)]
        power = _frac_mul(power, R)
        scal = qmul(inv_a, scal)
    return np.array([[float(QL[i][j] - RQ[i][j] - S[i][j]) for j in range(n)] for i in range(n)])


def test_criterion_05_neumann_series(criterion):
    rng = np.random.default_rng(5)
    N = 60
    # exact arithmetic: the truncation error itself against the analytic tail bound
    exact_ratio = 0.0
    for m in (1, 1, 2):
        B = random_operator(H, m, rng)
        alpha = H.real(rng.normal()) + random_imaginary_unit(H, rng) * rng.uniform(0.5, 1.5)
        alpha = alpha * (2.0 * B.norm() / alpha.norm())
        res = neumann_resolvent(B, alpha, N)
        gap = float(np.linalg.norm(_exact_neumann_gap(B, alpha, N), 2))
        exact_ratio = max(exact_ratio, gap / res.tail_bound)
    # floating point: library sum against the LU resolvent, tail bound plus rounding allowance
    float_ratio = 0.0
    raw = 0.0
    for trial in range(50):
        B = random_operator(H, 1 + trial % 4, rng)
        alpha = H.real(rng.normal()) + random_imaginary_unit(H, rng) * rng.uniform(0.5, 1.5)
        alpha = alpha * (2.0 * B.norm() / alpha.norm())
        res = neumann_resolvent(B, alpha, N)
        err = (res.value - C(B, alpha)).norm()
        nb, na = B.norm(), alpha.norm()
        size = 4 * B.m
        allowance = 16 * size * EPS / (na - nb)
        float_ratio = max(float_ratio, err / (res.tail_bound + allowance))
        raw = max(raw, err)
    criterion(
        5,
        "Neumann series within the analytic tail bound (|alpha| = 2|B|, N = 60)",
        f"exact truncation error / tail bound <= {exact_ratio:.2e}; "
        f"float error {raw:.1e} / (tail + rounding allowance) <= {float_ratio:.2f}",
    )
    assert exact_ratio <= 1.0
    assert float_ratio <= 1.0


# ---------------------------------------------------------------------------
# 6


def test_criterion_06_identity_integral(criterion):
    rng = np.random.default_rng(6)
    worst256 = 0.0
    worst_drop = math.inf
    floor = 1e-12
    for trial in range(10):
        B = random_operator(H, 1 + trial % 3, rng)
        r = 1.25 * max(s.modulus for s in spherical_spectrum(B, verify=False)) + 0.05
        j = random_imaginary_unit(H, rng)
        Id = OperatorMatrix.identity(H, B.m)
        errs = {
            n: (identity_integral(B, j, r, QuadratureSpec(nodes_per_arc=n)) - Id).norm() for n in (16, 32, 64, 128, 256)
        }
        worst256 = max(worst256, errs[256])
        for n in (16, 32, 64, 128):
            if errs[n] > floor:
                worst_drop = min(worst_drop, errs[n] / errs[2 * n])
    criterion(
        6,
        "identity as the resolvent integral over a circle",
        f"max error at 256 nodes {worst256:.1e}; min drop per doubling above {floor:g}: {worst_drop:.1f}x",
    )
    assert worst256 <= 1e-7
    assert worst_drop >= 4.0


# ---------------------------------------------------------------------------
# 7


def test_criterion_07_semigroup_cross_validation(criterion):
    rng = np.random.default_rng(7)
    start = time.perf_counter()
    contour_err = yosida_err = 0.0
    for trial in range(50):
        A = random_sectorial(H, 1 + trial % 3, 0.3, rng)
        report = sector_check(A, 0.3, seed=trial)
        x = rng.standard_normal((A.m, 4))
        x /= np.linalg.norm(x)
        for t in (0.1, 1.0, 5.0):
            T = evolve_expm(A, t)
            res = semigroup_contour(A, t, 0.3, report=report, estimate_error=False)
            contour_err = max(contour_err, (res.value - T).norm())
            y = evolve_yosida(A, t, x, tol=1e-8)
            yosida_err = max(yosida_err, float(np.linalg.norm(y.value - T.apply(x))))
    elapsed = time.perf_counter() - start
    criterion(
        7,
        "contour and Yosida semigroups agree with expm (50 sectorial generators, delta = 0.3)",
        f"contour {contour_err:.1e}, Yosida {yosida_err:.1e}, {elapsed:.1f} s",
    )
    assert contour_err <= 1e-6
    assert yosida_err <= 1e-8
    assert elapsed < 120.0


# ---------------------------------------------------------------------------
# 8


def test_criterion_08_contour_invariances(criterion):
    rng = np.random.default_rng(8)
    j, k = H.basis("j"), H.basis("k")
    worst_ratio = 0.0
    rc = 0.0
    for trial in range(5):
        A = random_sectorial(H, 2, 0.3, rng)
        for t in (0.5, 2.0):
            for p1, p2 in (
                ({"r": 0.5, "eta": 1.65}, {"r": 1.5, "eta": 1.8}),
                ({"j": j}, {"j": k}),
            ):
                diff, tol = contour_parameter_independence(A, t, p1, p2, 0.3)
                worst_ratio = max(worst_ratio, diff / (3 * tol))
        rep = sector_check(A, 0.3)
        res = resolvent_contour(A, 2.0, report=rep)
        rc = max(rc, (res.value - C(A, H.real(2.0))).norm())
    exp_int = max(
        exp_ray_integral_zero(u, r, eta, t).total
        for u in (j, k)
        for r in (0.5, 1.0)
        for eta in (math.pi / 2 + 0.15, 2.0)
        for t in (0.5, 1.0, 5.0)
    )
    criterion(
        8,
        "contour parameter independence, exp integral, resolvent by contour",
        f"max diff / (3 x combined tol) {worst_ratio:.2f}; |int e^(t alpha)| {exp_int:.1e}; resolvent {rc:.1e}",
    )
    assert worst_ratio <= 1.0
    assert exp_int <= 1e-8
    assert rc <= 1e-7


# ---------------------------------------------------------------------------
# 9


def test_criterion_09_slice_cauchy_reconstruction(criterion):
    rng = np.random.default_rng(9)
    O = algebra("O")
    quad = QuadratureSpec(nodes_per_arc=256)
    worst = 0.0
    count = 0
    for desc, n_beta in ((H, 14), (O, 6)):
        loop_j = desc.basis(1)
        for stem in (identity_stem(desc), square_stem(desc), exp_stem(desc)):
            for _ in range(n_beta):
                beta = random_cone_element(desc, rng, scale=1.2)
                d = cone_decompose(beta)
                if abs(complex(d.a, d.b)) > 3.5:
                    beta = beta * (3.0 / abs(complex(d.a, d.b)))
                got = slice_cauchy_reconstruct(stem, beta, loop_j, radius=4.0, quad=quad)
                worst = max(worst, (got - eval_slice(stem, beta)).norm())
                count += 1
    criterion(
        9,
        "slice Cauchy reconstruction of id, alpha^2, exp (H off-plane and O real slice)",
        f"{count} reconstructions, max error {worst:.1e}",
    )
    assert worst <= 1e-7


# ---------------------------------------------------------------------------
# 10


def test_criterion_10_hille_yosida(criterion):
    lambdas = np.linspace(0.1, 10.0, 100)
    good = check_hille_yosida(left_mult(H.basis("j")), lambdas, n_max=8, w=0.0, M=1.0)
    bad = check_hille_yosida(OperatorMatrix.identity(H, 1), lambdas, n_max=8, w=0.0, M=1.0)
    detail = f"L_j -> {good}; +Id -> "
    detail += f"violation at lam={bad.lam:g}, n={bad.n} ({bad.reason})" if isinstance(bad, Violation) else str(bad)
    criterion(10, "Hille-Yosida certificate for L_j and violation for +Id", detail)
    assert good == GrowthBound(1.0, 0.0)
    assert isinstance(bad, Violation)
