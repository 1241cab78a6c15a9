"""Right-linear operators on ``A^m`` and their spherical spectral calculus.

An operator is an ``m x m`` matrix ``M`` over an algebra acting by left matrix
multiplication ``x -> M x``; in an associative algebra this is automatically
right-linear.  Scalars act on operators through the argument:
``(M alpha)(u) = M(alpha u)``, which on matrices right-multiplies every entry
by ``alpha``.

Internally most computations go through the realification, the real
``(m d, m d)`` matrix of ``x -> M x``.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .algebra import (
    AlgebraDescriptor,
    AlgebraElement,
    Kind,
    algebra,
    clifford_op_norm,
    cone_decompose,
    cone_inverse,
    in_quadratic_cone,
    norm,
    random_imaginary_unit,
)
from .errors import (
    DescriptorMismatch,
    NoConvergence,
    NonAssociative,
    NormConditionViolated,
    NotConvergent,
    NotInCone,
    OnSpectrum,
    Singular,
)

RESOLVENT_PIVOT_TOL = 1e-10
SPHERE_MERGE_TOL = 1e-8
SPECTRUM_MAX_DIM = 256


class OperatorMatrix:
    """Immutable ``m x m`` matrix over an algebra; entries have shape ``(m, m, dim)``."""

    __slots__ = ("desc", "entries")

    def __init__(self, desc: AlgebraDescriptor, entries):
        arr = np.array(entries, dtype=float)
        if arr.ndim != 3 or arr.shape[0] != arr.shape[1] or arr.shape[2] != desc.dim:
            raise ValueError(f"entries must have shape (m, m, {desc.dim}), got {arr.shape}")
        arr.flags.writeable = False
        object.__setattr__(self, "desc", desc)
        object.__setattr__(self, "entries", arr)

    def __setattr__(self, key, value):
        raise AttributeError("OperatorMatrix is immutable")

    # -- constructors ----------------------------------------------------------

    @classmethod
    def identity(cls, desc: AlgebraDescriptor, m: int) -> OperatorMatrix:
        return cls.scalar(desc, m, desc.one())

    @classmethod
    def zeros(cls, desc: AlgebraDescriptor, m: int) -> OperatorMatrix:
        return cls(desc, np.zeros((m, m, desc.dim)))

    @classmethod
    def scalar(cls, desc: AlgebraDescriptor, m: int, alpha: AlgebraElement | float) -> OperatorMatrix:
        """Diagonal matrix ``alpha Id``, i.e. left multiplication by ``alpha``."""
        if not isinstance(alpha, AlgebraElement):
            alpha = desc.real(float(alpha))
        e = np.zeros((m, m, desc.dim))
        e[np.arange(m), np.arange(m)] = alpha.coeffs
        return cls(desc, e)

    @classmethod
    def from_elements(cls, rows: Sequence[Sequence[AlgebraElement]]) -> OperatorMatrix:
        desc = rows[0][0].desc
        for row in rows:
            for x in row:
                if x.desc != desc:
                    raise DescriptorMismatch("all entries must share one algebra")
        return cls(desc, [[x.coeffs for x in row] for row in rows])

    @classmethod
    def from_real(cls, R: np.ndarray, desc: AlgebraDescriptor) -> OperatorMatrix:
        """Inverse of :meth:`realify` for matrices with the realified block structure."""
        return cls(desc, linalg.derealify(R, desc.dim))

    # -- basic structure ---------------------------------------------------------

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    def __getitem__(self, ik: tuple[int, int]) -> AlgebraElement:
        i, k = ik
        return AlgebraElement(self.desc, self.entries[i, k])

    def _check(self, other: OperatorMatrix):
        if other.desc != self.desc:
            raise DescriptorMismatch(f"{self.desc.name} vs {other.desc.name}")
        if other.m != self.m:
            raise ValueError(f"rank mismatch {self.m} vs {other.m}")

    def __add__(self, other: OperatorMatrix) -> OperatorMatrix:
        self._check(other)
        return OperatorMatrix(self.desc, self.entries + other.entries)

    def __sub__(self, other: OperatorMatrix) -> OperatorMatrix:
        self._check(other)
        return OperatorMatrix(self.desc, self.entries - other.entries)

    def __neg__(self) -> OperatorMatrix:
        return OperatorMatrix(self.desc, -self.entries)

    def __mul__(self, r: float) -> OperatorMatrix:
        if isinstance(r, AlgebraElement):
            return self.rmul(r)
        return OperatorMatrix(self.desc, self.entries * float(r))

    def __rmul__(self, r: float) -> OperatorMatrix:
        return OperatorMatrix(self.desc, self.entries * float(r))

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            self._check(other)
            prod = self.desc.mul_coeffs(self.entries[:, :, None, :], other.entries[None, :, :, :])
            out = prod[:, 0]
            for k in range(1, self.m):
                out = out + prod[:, k]
            return OperatorMatrix(self.desc, out)
        return self.apply(other)

    def apply(self, x: np.ndarray) -> np.ndarray:
        """``(M x)_i = sum_k M_ik x_k`` for a module vector of shape ``(m, dim)``."""
        x = np.asarray(x, dtype=float)
        prod = self.desc.mul_coeffs(self.entries, x[None, :, :])
        out = prod[:, 0]
        for k in range(1, self.m):
            out = out + prod[:, k]
        return out

    def rmul(self, alpha: AlgebraElement) -> OperatorMatrix:
        """``M alpha``: the operator ``u -> M(alpha u)``."""
        if alpha.desc != self.desc:
            raise DescriptorMismatch(f"{self.desc.name} vs {alpha.desc.name}")
        return OperatorMatrix(self.desc, self.desc.mul_coeffs(self.entries, alpha.coeffs))

    def realify(self, allow_nonassociative: bool = False) -> np.ndarray:
        if not self.desc.associative and not allow_nonassociative:
            raise NonAssociative("octonionic matrices are not right-linear; pass allow_nonassociative")
        return linalg.realify(self.entries, self.desc)

    def norm(self) -> float:
        """Operator norm of the realification (euclidean norm on coefficients)."""
        return linalg.op_norm2(self.realify(allow_nonassociative=True))

    def allclose(self, other: OperatorMatrix, atol: float = 1e-12) -> bool:
        self._check(other)
        return bool(np.allclose(self.entries, other.entries, rtol=0.0, atol=atol))

    def __eq__(self, other):
        if not isinstance(other, OperatorMatrix):
            return NotImplemented
        return self.desc == other.desc and bool(np.array_equal(self.entries, other.entries))

    __hash__ = None

    def to_dict(self) -> dict:
        return {
            "algebra": self.desc.name,
            "m": self.m,
            "entries": [[[float(c) for c in e] for e in row] for row in self.entries],
        }

    @classmethod
    def from_dict(cls, data: dict) -> OperatorMatrix:
        desc = algebra(data["algebra"])
        op = cls(desc, data["entries"])
        if "m" in data and int(data["m"]) != op.m:
            raise ValueError(f"declared m={data['m']} but entries are {op.m}x{op.m}")
        return op

    def __repr__(self):
        return f"OperatorMatrix({self.desc.name}, m={self.m})"


def left_mult(alpha: AlgebraElement, m: int = 1) -> OperatorMatrix:
    """``L_alpha`` on ``A^m``."""
    return OperatorMatrix.scalar(alpha.desc, m, alpha)


def random_operator(
    desc: AlgebraDescriptor, m: int, rng: np.random.Generator, scale: float = 1.0
) -> OperatorMatrix:
    return OperatorMatrix(desc, scale * rng.standard_normal((m, m, desc.dim)))


# ---------------------------------------------------------------------------
# Module vectors (arrays of shape (m, dim))


def module_rmul(x: np.ndarray, alpha: AlgebraElement) -> np.ndarray:
    return alpha.desc.mul_coeffs(np.asarray(x, dtype=float), alpha.coeffs)


def module_lmul(alpha: AlgebraElement, x: np.ndarray) -> np.ndarray:
    return alpha.desc.mul_coeffs(alpha.coeffs, np.asarray(x, dtype=float))


def bimodule_norm(x: np.ndarray, desc: AlgebraDescriptor) -> float:
    """``(sum_k |x_k|^2)^(1/2)`` with the algebra norm; Clifford operator norm on Cl(0,n)."""
    x = np.asarray(x, dtype=float)
    if desc.kind is Kind.CLIFFORD:
        return math.sqrt(sum(clifford_op_norm(AlgebraElement(desc, row)) ** 2 for row in x))
    return float(np.linalg.norm(x))


# ---------------------------------------------------------------------------
# Spherical spectral calculus


def _require_associative(A: OperatorMatrix):
    if not A.desc.associative:
        raise NonAssociative("spectral calculus needs an associative algebra")


def _polar(alpha: AlgebraElement) -> tuple[float, float]:
    """``(Re alpha, |alpha|^2)`` for ``alpha`` in the quadratic cone."""
    if not in_quadratic_cone(alpha):
        raise NotInCone(f"{alpha!r} is not in the quadratic cone")
    d = cone_decompose(alpha)
    return d.a, d.a * d.a + d.b * d.b


def _delta_real(R: np.ndarray, a, nsq) -> np.ndarray:
    """Batched ``R^2 - 2 a R + nsq I`` for arrays ``a``, ``nsq``."""
    a = np.asarray(a, dtype=float)
    nsq = np.asarray(nsq, dtype=float)
    n = R.shape[0]
    R2 = R @ R
    return R2 - 2.0 * a[..., None, None] * R + nsq[..., None, None] * np.eye(n)


def _delta_scale(R: np.ndarray, a, nsq) -> np.ndarray:
    """Magnitude of the terms building ``Delta``; pivots are measured against it.

    ``Delta`` itself can cancel to rounding level on the spectrum, so its own
    entries are no usable reference.
    """
    r = float(np.abs(R).max(initial=0.0))
    return r * r * R.shape[0] + 2.0 * np.abs(np.asarray(a, dtype=float)) * r + np.asarray(nsq, dtype=float)


def _blockdiag_left(desc: AlgebraDescriptor, m: int, coeffs: np.ndarray) -> np.ndarray:
    """Realification of right multiplication of entries by ``alpha`` (batched)."""
    L = desc.left_matrix(coeffs)  # (..., d, d)
    d = desc.dim
    out = np.zeros(L.shape[:-2] + (m * d, m * d))
    for k in range(m):
        out[..., k * d : (k + 1) * d, k * d : (k + 1) * d] = L
    return out


def delta(A: OperatorMatrix, alpha: AlgebraElement) -> OperatorMatrix:
    """``Delta_alpha(A) = A^2 - 2 Re(alpha) A + |alpha|^2 Id``."""
    _require_associative(A)
    a, nsq = _polar(alpha)
    A2 = A @ A
    return A2 - A * (2.0 * a) + OperatorMatrix.scalar(A.desc, A.m, nsq)


def in_spherical_resolvent(A: OperatorMatrix, alpha: AlgebraElement, tol: float = RESOLVENT_PIVOT_TOL) -> bool:
    """Smallest LU pivot of the realified ``Delta_alpha(A)`` above ``tol`` times its largest entry."""
    _require_associative(A)
    a, nsq = _polar(alpha)
    R = A.realify()
    D = _delta_real(R, a, nsq)
    return linalg.min_pivot_ratio(D, _delta_scale(R, a, nsq)) >= tol


def Q(A: OperatorMatrix, alpha: AlgebraElement) -> OperatorMatrix:
    """``Q_alpha(A) = Delta_alpha(A)^-1``.

    Raises:
        OnSpectrum: if ``alpha`` lies in the spherical spectrum.
    """
    _require_associative(A)
    a, nsq = _polar(alpha)
    R = A.realify()
    D = _delta_real(R, a, nsq)
    try:
        Qr = linalg.inv(D, RESOLVENT_PIVOT_TOL, _delta_scale(R, a, nsq))
    except Singular:
        raise OnSpectrum(f"{alpha!r} is in the spherical spectrum", alpha) from None
    return OperatorMatrix.from_real(Qr, A.desc)


def resolvent_real(A: OperatorMatrix, alphas: np.ndarray) -> np.ndarray:
    """Realified ``C_alpha(A)`` for a batch of cone coefficient vectors ``alphas`` (k, d).

    Raises:
        OnSpectrum: if any ``alpha`` lies in the spherical spectrum.
    """
    _require_associative(A)
    desc = A.desc
    alphas = np.atleast_2d(np.asarray(alphas, dtype=float))
    a = alphas[:, 0]
    nsq = np.einsum("kd,kd->k", alphas, alphas)
    R = A.realify()
    D = _delta_real(R, a, nsq)
    try:
        Qr = linalg.inv(D, RESOLVENT_PIVOT_TOL, _delta_scale(R, a, nsq))
    except Singular:
        raise OnSpectrum("a point of the batch is in the spherical spectrum") from None
    Lc = _blockdiag_left(desc, A.m, desc.conj_coeffs(alphas))
    return Qr @ Lc - R @ Qr


def C(A: OperatorMatrix, alpha: AlgebraElement) -> OperatorMatrix:
    """Spherical resolvent ``C_alpha(A) = Q_alpha(A) alpha^c - A Q_alpha(A)``."""
    _require_associative(A)
    _polar(alpha)
    try:
        Cr = resolvent_real(A, alpha.coeffs[None, :])[0]
    except OnSpectrum:
        raise OnSpectrum(f"{alpha!r} is in the spherical spectrum", alpha) from None
    return OperatorMatrix.from_real(Cr, A.desc)


def resolvent_real_scalar(A: OperatorMatrix, lam: float) -> OperatorMatrix:
    """``(lam Id - A)^-1`` by a direct LU solve, as an independent route."""
    R = A.realify()
    try:
        Rinv = linalg.inv(lam * np.eye(R.shape[0]) - R, RESOLVENT_PIVOT_TOL)
    except Singular:
        raise OnSpectrum(f"{lam} is in the spectrum", lam) from None
    return OperatorMatrix.from_real(Rinv, A.desc)


@dataclass(frozen=True)
class Sphere:
    a: float
    b: float
    multiplicity: int

    def representative(self, j: AlgebraElement) -> AlgebraElement:
        return j.desc.real(self.a) + j * self.b

    @property
    def modulus(self) -> float:
        return math.hypot(self.a, self.b)


@dataclass(frozen=True)
class SphereSpectrum:
    spheres: tuple[Sphere, ...]

    def __iter__(self):
        return iter(self.spheres)

    def __len__(self):
        return len(self.spheres)

    def pairs(self) -> list[tuple[float, float]]:
        return [(s.a, s.b) for s in self.spheres]

    def to_csv(self) -> str:
        return "".join(f"{s.a:.12g},{s.b:.12g},{s.multiplicity}\n" for s in self.spheres)

    def distance(self, a: float, b: float) -> float:
        """Distance in the half plane from ``a + b i`` to the nearest sphere."""
        return min((math.hypot(a - s.a, abs(b) - s.b) for s in self.spheres), default=math.inf)


def _cluster(eigs: list[tuple[float, float]], tol: float, scale: float) -> list[Sphere]:
    # components at rounding level are reported as exact zeros
    tiny = 1e-13 * scale
    points = sorted(
        (0.0 if abs(re) < tiny else re, abs(im), im) for re, im in eigs
    )
    clusters: list[list[tuple[float, float, float]]] = []
    for p in points:
        for c in clusters:
            if math.hypot(p[0] - c[0][0], p[1] - c[0][1]) <= tol:
                c.append(p)
                break
        else:
            clusters.append([p])
    spheres = []
    for c in clusters:
        a = float(np.mean([p[0] for p in c]))
        b = float(np.mean([p[1] for p in c]))
        if b == 0.0 or all(p[2] == 0.0 for p in c):
            mult = len(c)
            b = 0.0
        else:
            mult = sum(1 for p in c if p[2] > 0)
        spheres.append(Sphere(a + 0.0, b + 0.0, mult))
    return sorted(spheres, key=lambda s: (s.a, s.b))


def spherical_spectrum(
    A: OperatorMatrix, verify: bool = True, seed: int = 0, n_units: int = 3
) -> SphereSpectrum:
    """Spheres ``(a, b)`` with ``Delta_{a+bj}(A)`` singular.

    In finite dimension these are exactly the eigenvalues ``a +- b i`` of the
    realification.  Conjugate pairs are merged; a sphere with ``b > 0`` reports
    the number of eigenvalues with positive imaginary part as its multiplicity,
    a real sphere the number of real eigenvalues.

    When ``verify`` is set, ``Delta`` is checked to be numerically singular at
    each sphere for ``n_units`` random imaginary units.

    Raises:
        NoConvergence: if the eigenvalue iteration or the verification fails.
    """
    _require_associative(A)
    R = A.realify()
    if R.shape[0] > SPECTRUM_MAX_DIM:
        raise ValueError(f"spectrum extraction supports dim*m <= {SPECTRUM_MAX_DIM}")
    eigs = linalg.eig_complex(R)
    scale = max(1.0, float(np.abs(R).max(initial=0.0)))
    spec = SphereSpectrum(tuple(_cluster(eigs, SPHERE_MERGE_TOL * scale, scale)))
    if verify:
        rng = np.random.default_rng(seed)
        units = [random_imaginary_unit(A.desc, rng) for _ in range(n_units)] if A.desc.dim > 1 else []
        for s in spec:
            points = [s.representative(j) for j in units] if s.b > 0 else [A.desc.real(s.a)]
            for alpha in points:
                D = delta(A, alpha).realify()
                if linalg.min_pivot_ratio(D, _delta_scale(R, s.a, s.a**2 + s.b**2)) > 1e-6:
                    raise NoConvergence(f"Delta is not singular at sphere ({s.a}, {s.b}) for {alpha!r}")
    return spec


# ---------------------------------------------------------------------------
# Resolvent identities


def resolvent_equation_residual(A: OperatorMatrix, lam: float, mu: float) -> float:
    """``|R_lam - R_mu - (mu - lam) R_lam R_mu|`` for real ``lam, mu``."""
    desc = A.desc
    Rl = C(A, desc.real(lam)).realify()
    Rm = C(A, desc.real(mu)).realify()
    return linalg.op_norm2(Rl - Rm - (mu - lam) * (Rl @ Rm))


def commutation_residual(A: OperatorMatrix, alpha: AlgebraElement) -> float:
    """``|C_alpha(A) alpha - A C_alpha(A) - Id|``."""
    Cop = C(A, alpha)
    res = Cop.rmul(alpha) - A @ Cop - OperatorMatrix.identity(A.desc, A.m)
    return res.norm()


def q_commutation_residual(A: OperatorMatrix, alpha: AlgebraElement) -> float:
    Qop = Q(A, alpha)
    return (Qop @ A - A @ Qop).norm()


@dataclass(frozen=True)
class NeumannResult:
    value: OperatorMatrix
    tail_bound: float
    terms: int


def neumann_resolvent(B: OperatorMatrix, alpha: AlgebraElement, N: int) -> NeumannResult:
    """``sum_{n=0}^{N} B^n alpha^-(n+1)`` with the geometric tail bound.

    Raises:
        NotConvergent: if ``|alpha| <= |B|``.
    """
    _require_associative(B)
    if not in_quadratic_cone(alpha):
        raise NotInCone(f"{alpha!r} is not in the quadratic cone")
    nb = B.norm()
    na = norm(alpha)
    if na <= nb:
        raise NotConvergent(f"|alpha| = {na:.6g} does not exceed |B| = {nb:.6g}")
    inv_a = cone_inverse(alpha)
    R = B.realify()
    n = R.shape[0]
    power = np.eye(n)
    scalar = inv_a
    total = np.zeros((n, n))
    for k in range(N + 1):
        total = total + power @ _blockdiag_left(B.desc, B.m, scalar.coeffs)
        power = power @ R
        scalar = inv_a * scalar
    q = nb / na
    tail = q ** (N + 1) / na / (1.0 - q)
    return NeumannResult(OperatorMatrix.from_real(total, B.desc), tail, N + 1)


def neumann_inverse(A: OperatorMatrix, B: OperatorMatrix, max_terms: int = 100_000) -> OperatorMatrix:
    """``(A + B)^-1 = sum_n (-A^-1 B)^n A^-1`` when ``|B| < 1 / |A^-1|``.

    Raises:
        NormConditionViolated: if the perturbation is too large.
    """
    _require_associative(A)
    A._check(B)
    Ra = A.realify()
    try:
        Ainv = linalg.inv(Ra)
    except Singular:
        raise NormConditionViolated("A is not invertible") from None
    nb = B.norm()
    ninv = linalg.op_norm2(Ainv)
    if nb * ninv >= 1.0:
        raise NormConditionViolated(f"|B| |A^-1| = {nb * ninv:.6g} >= 1")
    K = -Ainv @ B.realify()
    term = Ainv
    total = Ainv.copy()
    for _ in range(max_terms):
        term = K @ term
        total = total + term
        if np.abs(term).max(initial=0.0) <= 1e-17 * np.abs(total).max():
            break
    else:
        raise NotConvergent("Neumann series did not reach machine precision")
    return OperatorMatrix.from_real(total, A.desc)


@dataclass(frozen=True)
class MobiusBridge:
    """``B = -C_lam(A) = (A - lam)^-1`` and ``Phi(alpha) = (alpha - lam)^-1``."""

    A: OperatorMatrix
    lam: float
    B: OperatorMatrix = field(repr=False)

    def phi(self, alpha: AlgebraElement) -> AlgebraElement:
        return cone_inverse(alpha - self.lam)

    def phi_sphere(self, a: float, b: float) -> tuple[float, float]:
        w = 1.0 / complex(a - self.lam, b)
        return w.real, abs(w.imag)

    def spectrum_residual(self) -> float:
        """Hausdorff distance between ``Phi(sigma_S(A))`` and ``sigma_S(B)`` in the half plane."""
        sa = spherical_spectrum(self.A, verify=False)
        sb = spherical_spectrum(self.B, verify=False)
        mapped = [self.phi_sphere(s.a, s.b) for s in sa]
        there = max((sb.distance(a, b) for a, b in mapped), default=0.0)
        back = SphereSpectrum(tuple(Sphere(a, b, 1) for a, b in mapped))
        again = max((back.distance(s.a, s.b) for s in sb), default=0.0)
        return max(there, again)

    def resolvent_residual(self, alpha: AlgebraElement) -> float:
        """``|C_alpha(A) + B C_Phi(alpha)(B) Phi(alpha)|``."""
        p = self.phi(alpha)
        lhs = C(self.A, alpha)
        rhs = -((self.B @ C(self.B, p)).rmul(p))
        return (lhs - rhs).norm()


def mobius_bridge(A: OperatorMatrix, lam: float) -> MobiusBridge:
    """Bounded operator ``B = (A - lam)^-1`` tied to ``A`` by the Mobius map.

    Raises:
        OnSpectrum: if ``lam`` is in the spectrum of ``A``.
    """
    _require_associative(A)
    if not lam > 0:
        raise ValueError("the bridge needs lam > 0")
    B = -C(A, A.desc.real(lam))
    return MobiusBridge(A, float(lam), B)


def cr_residual_resolvent(
    B: OperatorMatrix, alpha: AlgebraElement, h: float = 1e-4, j: AlgebraElement | None = None
) -> float:
    """Central-difference residual of ``d_a C + (d_b C) j = 0`` at ``alpha = a + b j``."""
    d = cone_decompose(alpha)
    if j is None:
        if d.j is None:
            raise ValueError("a real point needs an explicit imaginary unit j")
        j = d.j
    desc = B.desc
    jh = j * h
    hr = desc.real(h)
    da = (C(B, alpha + hr) - C(B, alpha - hr)) * (1.0 / (2 * h))
    db = (C(B, alpha + jh) - C(B, alpha - jh)) * (1.0 / (2 * h))
    return (da + db.rmul(j)).norm()


@dataclass(frozen=True)
class GrowthBound:
    """Constants with ``|T(t)| <= M e^(w t)``."""

    M: float
    w: float

    def __post_init__(self):
        if not self.M >= 1.0:
            raise ValueError(f"growth constant M must be >= 1, got {self.M}")

    def at(self, t: float) -> float:
        return self.M * math.exp(self.w * t)
