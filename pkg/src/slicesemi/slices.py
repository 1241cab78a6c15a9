"""Stem functions, slice functions and the noncommutative Cauchy kernel.

A stem function is a pair ``(F1, F2)`` of maps ``C -> A`` with ``F1`` even and
``F2`` odd in the imaginary part.  It induces the slice function
``f(a + b j) = F1(a + b i) + j F2(a + b i)`` on the quadratic cone.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .algebra import (
    AlgebraDescriptor,
    AlgebraElement,
    cone_decompose,
    cone_inverse,
    conj,
    euclid_norm,
    in_quadratic_cone,
    is_imaginary_unit,
)
from .errors import DescriptorMismatch, NotImaginaryUnit, NotInCone, OnSphere

Component = Callable[[complex], AlgebraElement]
SPHERE_TOL = 1e-10


@dataclass(frozen=True)
class StemFunction:
    f1: Component
    f2: Component
    desc: AlgebraDescriptor
    label: str = "stem"

    def __call__(self, alpha: AlgebraElement) -> AlgebraElement:
        return eval_slice(self, alpha)

    def __mul__(self, other: StemFunction) -> StemFunction:
        return slice_product(self, other)


@dataclass(frozen=True)
class SliceSample:
    point: AlgebraElement
    value: AlgebraElement

    def __post_init__(self):
        if not in_quadratic_cone(self.point):
            raise NotInCone("slice samples must lie in the quadratic cone")


def eval_slice(F: StemFunction, alpha: AlgebraElement, branch: int = 1) -> AlgebraElement:
    """Evaluate ``I(F)`` at ``alpha``.

    ``branch=-1`` uses the representation ``alpha = a + (-b)(-j)`` instead of the
    canonical ``b >= 0`` one; both must agree for a genuine stem function.
    """
    if alpha.desc != F.desc:
        raise DescriptorMismatch(f"{F.label} is {F.desc.name}-valued, point is {alpha.desc.name}")
    d = cone_decompose(alpha)
    if d.j is None:
        return F.f1(complex(d.a, 0.0))
    b, j = (d.b, d.j) if branch >= 0 else (-d.b, -d.j)
    z = complex(d.a, b)
    return F.f1(z) + j * F.f2(z)


def _real(desc: AlgebraDescriptor, x: float) -> AlgebraElement:
    return desc.real(float(x))


def identity_stem(desc: AlgebraDescriptor) -> StemFunction:
    return StemFunction(lambda z: _real(desc, z.real), lambda z: _real(desc, z.imag), desc, "id")


def constant_stem(c: AlgebraElement) -> StemFunction:
    zero = c.desc.zero()
    return StemFunction(lambda z: c, lambda z: zero, c.desc, "const")


def exp_stem(desc: AlgebraDescriptor, t: float = 1.0) -> StemFunction:
    """Stem of ``alpha -> e^(t alpha)``: ``(e^(ta) cos(tb), e^(ta) sin(tb))``."""

    def f1(z: complex) -> AlgebraElement:
        return _real(desc, math.exp(t * z.real) * math.cos(t * z.imag))

    def f2(z: complex) -> AlgebraElement:
        return _real(desc, math.exp(t * z.real) * math.sin(t * z.imag))

    return StemFunction(f1, f2, desc, f"exp({t:g}*)")


def poly_stem(desc: AlgebraDescriptor, coeffs: Sequence[AlgebraElement | float]) -> StemFunction:
    """Stem of ``alpha -> sum_n alpha^n c_n`` (coefficients on the right)."""
    cs = [c if isinstance(c, AlgebraElement) else _real(desc, c) for c in coeffs]

    def parts(z: complex) -> tuple[AlgebraElement, AlgebraElement]:
        u = desc.zero()
        v = desc.zero()
        zn = complex(1.0, 0.0)
        for c in cs:
            u = u + c * zn.real
            v = v + c * zn.imag
            zn *= z
        return u, v

    return StemFunction(lambda z: parts(z)[0], lambda z: parts(z)[1], desc, "poly")


def square_stem(desc: AlgebraDescriptor) -> StemFunction:
    return poly_stem(desc, [0.0, 0.0, 1.0])


def exp_slice(t: float, alpha: AlgebraElement) -> AlgebraElement:
    """``e^(t alpha) = e^(ta) (cos(tb) + j sin(tb))`` for ``alpha = a + b j``."""
    d = cone_decompose(alpha)
    scale = math.exp(t * d.a)
    if d.j is None:
        return alpha.desc.real(scale)
    return alpha.desc.real(scale * math.cos(t * d.b)) + d.j * (scale * math.sin(t * d.b))


def exp_series(t: float, alpha: AlgebraElement, terms: int = 40) -> AlgebraElement:
    """Truncated power series ``sum_{n<terms} (t alpha)^n / n!``."""
    x = alpha * t
    term = alpha.desc.one()
    total = term
    for n in range(1, terms):
        term = (x * term) / n
        total = total + term
    return total


def cauchy_kernel(q: AlgebraElement, p: AlgebraElement) -> AlgebraElement:
    """``C_q(p) = Delta_q(p)^-1 (q^c - p)`` with ``Delta_q(p) = p^2 - t(q) p + n(q)``.

    Raises:
        NotInCone: if ``p`` or ``q`` is outside the quadratic cone.
        OnSphere: if ``p`` lies (numerically) on the sphere of ``q``.
    """
    if q.desc != p.desc:
        raise DescriptorMismatch(f"{q.desc.name} vs {p.desc.name}")
    for name, x in (("q", q), ("p", p)):
        if not in_quadratic_cone(x):
            raise NotInCone(f"{name} = {x!r} is not in the quadratic cone")
    dq = cone_decompose(q)
    delta = p * p - p * (2.0 * dq.a) + (dq.a**2 + dq.b**2)
    size = euclid_norm(delta)
    if size < SPHERE_TOL * (1.0 + euclid_norm(p) ** 2 + euclid_norm(q) ** 2):
        raise OnSphere(f"{p!r} lies on the sphere of {q!r}")
    return cone_inverse(delta) * (conj(q) - p)


def slice_product(F: StemFunction, G: StemFunction) -> StemFunction:
    """Stem ``(F1 G1 - F2 G2, F1 G2 + F2 G1)``."""
    if F.desc != G.desc:
        raise DescriptorMismatch(f"{F.desc.name} vs {G.desc.name}")

    def h1(z: complex) -> AlgebraElement:
        return F.f1(z) * G.f1(z) - F.f2(z) * G.f2(z)

    def h2(z: complex) -> AlgebraElement:
        return F.f1(z) * G.f2(z) + F.f2(z) * G.f1(z)

    return StemFunction(h1, h2, F.desc, f"({F.label})*({G.label})")


def stem_from_samples(
    f: Callable[[AlgebraElement], AlgebraElement], j: AlgebraElement, label: str = "sampled"
) -> StemFunction:
    """Recover the stem of a slice function from its values on ``C_j``.

    ``F1(z) = (f(alpha) + f(alpha^c)) / 2`` and ``F2(z) = -j (f(alpha) - f(alpha^c)) / 2``
    with ``alpha = a + b j``.
    """
    if not is_imaginary_unit(j):
        raise NotImaginaryUnit(f"{j!r} is not a square root of -1 in the quadratic cone")
    desc = j.desc

    def point(z: complex) -> AlgebraElement:
        return desc.real(z.real) + j * z.imag

    def f1(z: complex) -> AlgebraElement:
        a = point(z)
        return (f(a) + f(conj(a))) / 2

    def f2(z: complex) -> AlgebraElement:
        a = point(z)
        return -(j * ((f(a) - f(conj(a))) / 2))

    return StemFunction(f1, f2, desc, label)


def cr_residual(F: StemFunction, z: complex, h: float = 1e-4) -> float:
    """Max norm of the two Cauchy-Riemann residuals by central differences."""
    if h <= 0:
        raise ValueError("h must be positive")
    ea, eb = complex(h, 0.0), complex(0.0, h)

    def d(comp: Component, step: complex) -> np.ndarray:
        return (comp(z + step).coeffs - comp(z - step).coeffs) / (2 * h)

    r1 = d(F.f1, ea) - d(F.f2, eb)
    r2 = d(F.f1, eb) + d(F.f2, ea)
    return float(max(np.linalg.norm(r1), np.linalg.norm(r2)))


def even_odd_residual(F: StemFunction, samples: Iterable[complex]) -> float:
    """Max of ``|F1(conj z) - F1(z)|`` and ``|F2(conj z) + F2(z)|`` over the samples."""
    worst = 0.0
    for z in samples:
        zc = z.conjugate()
        worst = max(
            worst,
            euclid_norm(F.f1(zc) - F.f1(z)),
            euclid_norm(F.f2(zc) + F.f2(z)),
        )
    return worst


def is_real_slice(F: StemFunction, samples: Iterable[complex], tol: float = 1e-12) -> bool:
    """True if both components are real-valued at every sample."""
    for z in samples:
        for comp in (F.f1, F.f2):
            c = comp(z).coeffs
            if np.linalg.norm(c[1:]) > tol * max(1.0, float(np.linalg.norm(c))):
                return False
    return True
