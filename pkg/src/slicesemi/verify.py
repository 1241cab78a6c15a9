"""Verification suites exercised by ``slicesemi verify``.

Each suite runs a fixed list of property checks from one seeded generator and
reports the residual of every case against its tolerance.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import asdict, dataclass, field

import numpy as np

from . import linalg
from .algebra import (
    AlgebraDescriptor,
    Kind,
    algebra,
    cone_decompose,
    random_cone_element,
    random_imaginary_unit,
)
from .contour import (
    FAST_QUAD,
    QuadratureSpec,
    exp_ray_integral_zero,
    identity_integral,
    random_sectorial,
    resolvent_contour,
    sector_check,
    semigroup_contour,
    slice_cauchy_reconstruct,
)
from .errors import NonAssociative, UnknownSuite
from .operators import (
    C,
    OperatorMatrix,
    commutation_residual,
    delta,
    left_mult,
    neumann_resolvent,
    q_commutation_residual,
    random_operator,
    resolvent_equation_residual,
    resolvent_real_scalar,
    spherical_spectrum,
)
from .semigroup import (
    GrowthBound,
    check_hille_yosida,
    evolve_expm,
    evolve_yosida,
    laplace_residual,
    semigroup_law_residual,
    trace_expm,
)
from .slices import (
    cauchy_kernel,
    cr_residual,
    eval_slice,
    exp_series,
    exp_slice,
    exp_stem,
    identity_stem,
    square_stem,
)

SUITES = ("algebra", "slice", "resolvent", "semigroup", "contour")
ELEMENT_SUITES = ("algebra", "slice")


@dataclass
class Case:
    name: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tol)


@dataclass
class SuiteReport:
    suite: str
    cases: list[Case] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    @property
    def max_residual(self) -> float:
        return max((c.residual for c in self.cases), default=0.0)

    def add(self, name: str, residual: float, tol: float) -> None:
        self.cases.append(Case(name, float(residual), float(tol)))

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "pass": self.passed,
            "max_residual": self.max_residual,
            "cases": [dict(asdict(c), passed=c.passed) for c in self.cases],
        }


def _rel(x: np.ndarray, ref: np.ndarray) -> float:
    return float(np.abs(x).max() / max(1.0, float(np.abs(ref).max())))


def suite_algebra(desc: AlgebraDescriptor, m: int, rng: np.random.Generator, fast: bool) -> SuiteReport:
    rep = SuiteReport("algebra")
    n = 500 if fast else 5000
    for name in ("R", "C", "H", "O", "Cl3", "Cl5"):
        d = algebra(name)
        x, y = rng.standard_normal((2, n, d.dim))
        mul, conj = d.mul_coeffs, d.conj_coeffs
        xx = mul(x, x)
        scale = np.abs(mul(np.abs(xx), np.abs(y)))
        rep.add(f"{name}: left alternative", _rel(mul(x, mul(x, y)) - mul(xx, y), scale), 1e-12)
        rep.add(f"{name}: right alternative", _rel(mul(mul(y, x), x) - mul(y, xx), scale), 1e-12)
        rep.add(f"{name}: conj of product", _rel(conj(mul(x, y)) - mul(conj(y), conj(x)), xx), 1e-13)
        x3 = mul(x, xx)
        rep.add(f"{name}: power associativity", _rel(mul(xx, xx) - mul(x, x3), mul(xx, xx)), 1e-12)
    return rep


def suite_slice(desc: AlgebraDescriptor, m: int, rng: np.random.Generator, fast: bool) -> SuiteReport:
    rep = SuiteReport("slice")
    if desc.kind is Kind.REAL:
        desc = algebra("C")
    n = 20 if fast else 100
    worst_exp = worst_branch = worst_kernel = worst_cr = 0.0
    F = square_stem(desc)
    for _ in range(n):
        alpha = random_cone_element(desc, rng)
        worst_exp = max(worst_exp, _rel((exp_slice(1.0, alpha) - exp_series(1.0, alpha)).coeffs, alpha.coeffs))
        worst_branch = max(
            worst_branch,
            float(np.abs((eval_slice(F, alpha) - eval_slice(F, alpha, branch=-1)).coeffs).max()),
        )
        d = cone_decompose(alpha)
        if d.j is not None:
            q = desc.real(d.a + 1.5) + d.j * (d.b + 0.7)
            z = complex(q.re, d.b + 0.7) - complex(d.a, d.b)
            want = desc.real((1 / z).real) + d.j * (1 / z).imag
            worst_kernel = max(worst_kernel, float(np.abs((cauchy_kernel(q, alpha) - want).coeffs).max()))
        worst_cr = max(worst_cr, cr_residual(exp_stem(desc), complex(d.a, d.b)))
    rep.add("exp closed form vs series", worst_exp, 1e-12)
    rep.add("branch independence", worst_branch, 1e-12)
    rep.add("Cauchy kernel on a common slice", worst_kernel, 1e-10)
    rep.add("Cauchy-Riemann residual of exp", worst_cr, 1e-6)
    if desc.associative or desc.kind is Kind.OCTONION:
        quad = QuadratureSpec(nodes_per_arc=128 if fast else 256)
        worst = 0.0
        for _ in range(3 if fast else 10):
            beta = random_cone_element(desc, rng, scale=0.8)
            j = random_imaginary_unit(desc, rng)
            got = slice_cauchy_reconstruct(exp_stem(desc), beta, j, radius=4.0, quad=quad)
            worst = max(worst, float(np.abs((got - exp_slice(1.0, beta)).coeffs).max()))
        rep.add("slice Cauchy formula (exp)", worst, 1e-7)
    return rep


def suite_resolvent(desc: AlgebraDescriptor, m: int, rng: np.random.Generator, fast: bool) -> SuiteReport:
    rep = SuiteReport("resolvent")
    trials = 3 if fast else 10
    sing = circ = reseq = clam = comm = qcomm = neu = 0.0
    for _ in range(trials):
        A = random_operator(desc, m, rng)
        spec = spherical_spectrum(A, seed=int(rng.integers(1 << 31)))
        R = A.realify()
        scale = max(1.0, linalg.op_norm2(R)) ** 2
        for s in spec:
            for _ in range(3):
                j = random_imaginary_unit(desc, rng) if desc.dim > 1 else None
                alpha = desc.real(s.a) if j is None else s.representative(j)
                if j is None and s.b > 0:
                    continue
                sv = linalg.singular_values(delta(A, alpha).realify())[-1]
                sing = max(sing, sv / scale)
        nb = A.norm()
        lam, mu = nb + 1.0 + rng.random(), nb + 2.0 + rng.random()
        reseq = max(reseq, resolvent_equation_residual(A, lam, mu))
        clam = max(clam, (C(A, desc.real(lam)) - resolvent_real_scalar(A, lam)).norm())
        if desc.dim > 1:
            alpha = desc.real(nb + 1.0) + random_imaginary_unit(desc, rng) * 2.0
        else:
            alpha = desc.real(nb + 1.5)
        comm = max(comm, commutation_residual(A, alpha))
        qcomm = max(qcomm, q_commutation_residual(A, alpha))
        beta = alpha * (2.0 * nb / alpha.norm())
        res = neumann_resolvent(A, beta, 60)
        neu = max(neu, (res.value - C(A, beta)).norm() - res.tail_bound)
        circ = max(circ, max((s.modulus for s in spec), default=0.0) - nb)
    rep.add("Delta singular on every sphere (relative sigma_min)", sing, 1e-6)
    rep.add("spheres inside the ball of radius |B|", circ, 1e-8)
    rep.add("resolvent equation", reseq, 1e-9)
    rep.add("C_lam equals (lam - A)^-1", clam, 1e-10)
    rep.add("C alpha - A C = Id", comm, 1e-9)
    rep.add("Q commutes with A", qcomm, 1e-10)
    rep.add("Neumann series beyond tail bound", max(neu, 0.0), 1e-12)
    return rep


def suite_semigroup(desc: AlgebraDescriptor, m: int, rng: np.random.Generator, fast: bool) -> SuiteReport:
    rep = SuiteReport("semigroup")
    trials = 2 if fast else 5
    yos = law = lap = 0.0
    for _ in range(trials):
        A = random_operator(desc, m, rng, scale=0.5)
        x = rng.standard_normal((m, desc.dim))
        for t in (0.5, 1.0):
            y = evolve_yosida(A, t, x, tol=1e-8)
            yos = max(yos, float(np.linalg.norm(y.value - evolve_expm(A, t).apply(x))))
        law = max(law, semigroup_law_residual(trace_expm(A, np.linspace(0, 1, 11))))
        shift = max(s.a for s in spherical_spectrum(A, verify=False)) + 1.0
        Ad = A - OperatorMatrix.scalar(desc, m, shift)
        bound = check_hille_yosida(Ad, np.linspace(0.5, 5.0, 4), n_max=4, M=None)
        if isinstance(bound, GrowthBound):
            tr = trace_expm(Ad, np.linspace(0.0, 30.0, 1201 if fast else 3001))
            gb = GrowthBound(max(bound.M, max(T.norm() for T in tr.values)), 0.0)
            lap = max(lap, laplace_residual(Ad, 1.0, tr, x, bound=gb, tol=1e-8).residual)
    rep.add("Yosida limit vs expm", yos, 1e-8)
    rep.add("semigroup law (expm)", law, 1e-10)
    rep.add("Laplace transform of T equals C_lam", lap, 1e-4 if fast else 1e-6)
    H = algebra("H")
    hy = check_hille_yosida(left_mult(H.basis("j")), np.linspace(0.1, 10, 100), n_max=8)
    rep.add("contraction certificate for L_j", 0.0 if hy == GrowthBound(1.0, 0.0) else 1.0, 0.0)
    bad = check_hille_yosida(left_mult(H.real(1.0)), np.linspace(0.1, 10, 100), n_max=8)
    rep.add("violation reported for +Id", 0.0 if not isinstance(bad, GrowthBound) else 1.0, 0.0)
    return rep


def suite_contour(desc: AlgebraDescriptor, m: int, rng: np.random.Generator, fast: bool) -> SuiteReport:
    rep = SuiteReport("contour")
    if desc.dim == 1:
        # contours live in a complex slice; over R use its complexification
        desc = algebra("C")
    quad = FAST_QUAD if fast else QuadratureSpec()
    tol = 1e-5 if fast else 1e-7
    trials = 2 if fast else 5
    sg = ident = rc = 0.0
    for _ in range(trials):
        A = random_sectorial(desc, m, 0.3, rng)
        report = sector_check(A, 0.3, seed=int(rng.integers(1 << 31)))
        for t in (0.1, 1.0, 5.0):
            res = semigroup_contour(A, t, 0.3, quad=quad, report=report, estimate_error=False)
            sg = max(sg, (res.value - evolve_expm(A, t)).norm())
        rc = max(rc, (resolvent_contour(A, 2.0, quad=quad, report=report).value - C(A, desc.real(2.0))).norm())
        B = random_operator(desc, m, rng)
        r = 1.5 * max(s.modulus for s in spherical_spectrum(B, verify=False)) + 0.1
        iq = QuadratureSpec(nodes_per_arc=128 if fast else 256)
        ident = max(ident, (identity_integral(B, r=r, quad=iq) - OperatorMatrix.identity(desc, m)).norm())
    j = desc.basis(1)
    rep.add("contour semigroup vs expm", sg, tol * 10)
    rep.add("resolvent by contour vs LU", rc, tol)
    rep.add("identity as resolvent integral", ident, tol)
    rep.add("integral of e^(t alpha) over the keyhole", exp_ray_integral_zero(j, 1.0, math.pi / 2 + 0.15, 1.0, quad).total, 1e-8)
    return rep


_RUNNERS: dict[str, Callable] = {
    "algebra": suite_algebra,
    "slice": suite_slice,
    "resolvent": suite_resolvent,
    "semigroup": suite_semigroup,
    "contour": suite_contour,
}


def verify_suite(name: str, algebra_name: str = "H", m: int = 2, seed: int = 0, fast: bool = False) -> list[SuiteReport]:
    """Run one suite (or ``"all"``) and return the reports.

    Operator suites need an associative algebra; over the octonions ``"all"``
    runs only the element-level suites.

    Raises:
        UnknownSuite: for an unrecognized suite name.
        NonAssociative: for an operator suite over the octonions.
    """
    names = SUITES if name == "all" else (name,)
    for n in names:
        if n not in _RUNNERS:
            raise UnknownSuite(f"unknown suite {name!r}; choose from {', '.join(SUITES + ('all',))}")
    desc = algebra(algebra_name)
    if not desc.associative:
        if name == "all":
            names = ELEMENT_SUITES
        elif name not in ELEMENT_SUITES:
            raise NonAssociative(f"suite {name!r} needs an associative algebra, got {desc.name}")
    out = []
    for n in names:
        rng = np.random.default_rng(seed)
        out.append(_RUNNERS[n](desc, m, rng, fast))
    return out
