"""Line integrals over paths in a slice ``C_j`` and the keyhole contour engine.

Every path lives in one complex plane ``C_j``, so its nodes are produced as
complex numbers ``z`` and mapped to ``Re z + (Im z) j``.  Integrands follow the
Bochner convention ``int F(alpha) d(alpha) f(alpha) = sum F(gamma) gamma' f(gamma) w``
with the three factors multiplied strictly left to right.

The keyhole contour ``Gamma(j; r; eta)`` runs in along the ray at angle
``-eta`` from infinity to radius ``r``, around the arc ``r e^(theta j)`` for
``theta`` in ``[-eta, eta]``, and out along the ray at angle ``eta``.  Rays are
truncated at a length ``s`` derived from an analytic tail bound.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .algebra import (
    AlgebraDescriptor,
    AlgebraElement,
    cone_decompose,
    is_imaginary_unit,
    random_imaginary_unit,
)
from .errors import (
    LambdaInsideKeyhole,
    LoopHitsSpectrum,
    NonAssociative,
    NotImaginaryUnit,
    NotSectorial,
    SphereNotEnclosed,
    SpectrumOutsideCircle,
    TailNotCertifiable,
)
from .operators import (
    OperatorMatrix,
    _blockdiag_left,
    _require_associative,
    random_operator,
    resolvent_real,
    spherical_spectrum,
)
from .semigroup import Method, SemigroupTrace
from .slices import StemFunction, cauchy_kernel, eval_slice, is_real_slice

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class QuadratureSpec:
    """Quadrature configuration.

    Args:
        nodes_per_arc: Gauss-Legendre nodes on an arc or full circle.
        ray_panels: cap on the number of geometric panels ``[r 2^k, r 2^(k+1)]`` per ray.
        gauss_order: Gauss-Legendre nodes per ray panel.
        tail_tol: target for the analytic bound on the truncated ray tails.
        max_panel_periods: panels are further split so that none spans more
            than this many periods of an oscillating ``e^(t alpha)`` factor.
    """

    nodes_per_arc: int = 64
    ray_panels: int = 64
    gauss_order: int = 16
    tail_tol: float = 1e-10
    max_panel_periods: float = 1.0

    def __post_init__(self):
        if min(self.nodes_per_arc, self.ray_panels, self.gauss_order) <= 0:
            raise ValueError("quadrature counts must be positive")
        if not self.tail_tol > 0 or not self.max_panel_periods > 0:
            raise ValueError("tail_tol and max_panel_periods must be positive")

    def coarse(self) -> QuadratureSpec:
        """Half the nodes everywhere, used for a posteriori error estimates."""
        return QuadratureSpec(
            max(2, self.nodes_per_arc // 2),
            self.ray_panels,
            max(2, self.gauss_order // 2),
            self.tail_tol,
            self.max_panel_periods,
        )


FAST_QUAD = QuadratureSpec(nodes_per_arc=32, gauss_order=10, tail_tol=1e-8)


# ---------------------------------------------------------------------------
# Paths


@dataclass(frozen=True)
class PathNodes:
    """Quadrature nodes ``z`` and weighted derivatives ``w gamma'(z)`` in ``C_j``."""

    z: np.ndarray
    dz: np.ndarray

    def __add__(self, other: PathNodes) -> PathNodes:
        return PathNodes(np.concatenate([self.z, other.z]), np.concatenate([self.dz, other.dz]))

    def __len__(self):
        return len(self.z)


def _gauss(a: float, b: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = linalg.gauss_legendre(order)
    half = (b - a) / 2.0
    return a + half * (x + 1.0), half * w


@dataclass(frozen=True)
class Arc:
    """``center + radius e^(theta j)`` for ``theta`` from ``theta0`` to ``theta1``."""

    radius: float
    theta0: float
    theta1: float
    center: complex = 0j

    def nodes(self, quad: QuadratureSpec) -> PathNodes:
        th, w = _gauss(self.theta0, self.theta1, quad.nodes_per_arc)
        e = np.exp(1j * th)
        return PathNodes(self.center + self.radius * e, w * self.radius * 1j * e)

    def start(self) -> complex:
        return self.center + self.radius * np.exp(1j * self.theta0)

    def end(self) -> complex:
        return self.center + self.radius * np.exp(1j * self.theta1)


def Circle(radius: float, center: complex = 0j) -> Arc:
    """Positively oriented circle."""
    return Arc(radius, 0.0, TWO_PI, center)


@dataclass(frozen=True)
class Ray:
    """``rho e^(angle j)`` for ``rho`` in ``[r, s]``; ``inward`` reverses the orientation."""

    angle: float
    r: float
    s: float
    inward: bool = False
    # set to the oscillation frequency of the integrand along the ray, if any
    omega: float = 0.0

    def panels(self, quad: QuadratureSpec) -> list[tuple[float, float]]:
        out = []
        a = self.r
        cap = math.inf
        if self.omega > 0:
            cap = quad.max_panel_periods * TWO_PI / self.omega
        while a < self.s * (1 - 1e-15):
            b = min(2.0 * a, self.s)
            pieces = max(1, math.ceil((b - a) / cap))
            edges = np.linspace(a, b, pieces + 1)
            out.extend(zip(edges[:-1], edges[1:]))
            a = b
        return out

    def nodes(self, quad: QuadratureSpec) -> PathNodes:
        e = np.exp(1j * self.angle)
        zs, dzs = [], []
        for a, b in self.panels(quad):
            rho, w = _gauss(a, b, quad.gauss_order)
            zs.append(rho * e)
            dzs.append(w * e * (-1.0 if self.inward else 1.0))
        if not zs:
            return PathNodes(np.zeros(0, complex), np.zeros(0, complex))
        return PathNodes(np.concatenate(zs), np.concatenate(dzs))

    def start(self) -> complex:
        rho = self.s if self.inward else self.r
        return rho * np.exp(1j * self.angle)

    def end(self) -> complex:
        rho = self.r if self.inward else self.s
        return rho * np.exp(1j * self.angle)


@dataclass(frozen=True)
class KeyholeContour:
    """The truncated keyhole path ``Gamma(j; r, s; eta)`` in ``C_j``."""

    j: AlgebraElement
    r: float
    eta: float
    s: float
    omega: float = 0.0

    def __post_init__(self):
        if not is_imaginary_unit(self.j):
            raise NotImaginaryUnit(f"{self.j!r} is not an imaginary unit")
        if not self.r > 0 or not self.s > self.r:
            raise ValueError("need 0 < r < s")
        if not math.pi / 2 < self.eta < math.pi:
            raise ValueError("eta must lie in (pi/2, pi)")

    @property
    def segments(self) -> tuple:
        return (
            Ray(-self.eta, self.r, self.s, inward=True, omega=self.omega),
            Arc(self.r, -self.eta, self.eta),
            Ray(self.eta, self.r, self.s, omega=self.omega),
        )

    def junction_gap(self) -> float:
        """Largest mismatch between consecutive segment endpoints."""
        seg = self.segments
        return max(abs(seg[k].end() - seg[k + 1].start()) for k in range(len(seg) - 1))

    def nodes(self, quad: QuadratureSpec) -> PathNodes:
        out = PathNodes(np.zeros(0, complex), np.zeros(0, complex))
        for seg in self.segments:
            out = out + seg.nodes(quad)
        return out


@dataclass(frozen=True)
class PlanarPath:
    """Any sequence of :class:`Arc` / :class:`Ray` segments in ``C_j``."""

    j: AlgebraElement
    segments: tuple

    def nodes(self, quad: QuadratureSpec) -> PathNodes:
        out = PathNodes(np.zeros(0, complex), np.zeros(0, complex))
        for seg in self.segments:
            out = out + seg.nodes(quad)
        return out


def _to_algebra(z: np.ndarray, j: AlgebraElement) -> np.ndarray:
    """Coefficients ``(k, dim)`` of ``Re z + (Im z) j``."""
    c = np.outer(np.imag(z), j.coeffs)
    c[:, 0] += np.real(z)
    return c


def _unit(desc: AlgebraDescriptor, j: AlgebraElement | None) -> AlgebraElement:
    if j is None:
        if desc.dim == 1:
            raise NotImaginaryUnit("the real field has no imaginary unit; contours need a complex slice")
        j = desc.basis(1)
    if j.desc != desc or not is_imaginary_unit(j):
        raise NotImaginaryUnit(f"{j!r} is not an imaginary unit of {desc.name}")
    return j


# ---------------------------------------------------------------------------
# Generic line integral


def line_integral(
    F: Callable[[AlgebraElement], OperatorMatrix | AlgebraElement],
    f: Callable[[AlgebraElement], AlgebraElement] | None,
    path,
    quad: QuadratureSpec = QuadratureSpec(),
):
    """``int_path F(alpha) d(alpha) f(alpha)`` by Gauss-Legendre quadrature.

    The integrand at each node is ``(F(gamma) gamma') f(gamma)``, associated
    left to right.  ``F`` may return operators or algebra elements; ``f=None``
    means the constant 1.
    """
    j = path.j
    desc = j.desc
    nodes = path.nodes(quad)
    alphas = _to_algebra(nodes.z, j)
    dalphas = _to_algebra(nodes.dz, j)
    total = None
    for ca, cd in zip(alphas, dalphas):
        alpha = AlgebraElement(desc, ca)
        dalpha = AlgebraElement(desc, cd)
        Fa = F(alpha)
        if isinstance(Fa, OperatorMatrix):
            term = Fa.rmul(dalpha)
            if f is not None:
                term = term.rmul(f(alpha))
        else:
            term = Fa * dalpha
            if f is not None:
                term = term * f(alpha)
        total = term if total is None else total + term
    return total


def _resolvent_integral(
    A: OperatorMatrix,
    j: AlgebraElement,
    nodes: PathNodes,
    fvals: np.ndarray | None,
) -> OperatorMatrix:
    """``(1/2pi) sum (C_alpha(A) j^-1) gamma' f(alpha)`` over the nodes, batched.

    ``fvals`` holds complex values of a function on ``C_j`` (mapped to ``C_j``).
    """
    desc = A.desc
    alphas = _to_algebra(nodes.z, j)
    Cr = resolvent_real(A, alphas)
    jinv = -j.coeffs
    L_jinv = _blockdiag_left(desc, A.m, jinv)
    L_d = _blockdiag_left(desc, A.m, _to_algebra(nodes.dz, j))
    terms = (Cr @ L_jinv) @ L_d
    if fvals is not None:
        terms = terms @ _blockdiag_left(desc, A.m, _to_algebra(fvals, j))
    return OperatorMatrix.from_real(terms.sum(axis=0) / TWO_PI, desc)


# ---------------------------------------------------------------------------
# Closed-loop identities


def identity_integral(
    B: OperatorMatrix, j: AlgebraElement | None = None, r: float = 1.0, quad: QuadratureSpec = QuadratureSpec()
) -> OperatorMatrix:
    """``(1/2pi) int_{|alpha| = r} C_alpha(B) j^-1 d(alpha)``, which equals ``Id``.

    Raises:
        SpectrumOutsideCircle: if a spectral sphere is not strictly inside radius ``r``.
    """
    _require_associative(B)
    j = _unit(B.desc, j)
    spec = spherical_spectrum(B)
    worst = max((s.modulus for s in spec), default=0.0)
    if worst >= r:
        raise SpectrumOutsideCircle(f"spectral sphere of modulus {worst:.6g} is not inside r = {r:g}")
    return _resolvent_integral(B, j, Circle(r).nodes(quad), None)


def vanishing_integral(
    A: OperatorMatrix,
    f: StemFunction | Callable[[complex], complex] | None,
    center: complex,
    radius: float,
    j: AlgebraElement | None = None,
    quad: QuadratureSpec = QuadratureSpec(),
    margin: float = 0.05,
) -> float:
    """Norm of ``(1/2pi) int_{dU} C_alpha(A) j^-1 f(alpha) d(alpha)`` over a circle in ``C_j``.

    ``f`` is a real slice function, given either as a stem or directly as its
    complex restriction ``z -> F1(z) + i F2(z)``.

    Raises:
        LoopHitsSpectrum: if the closed disc comes within ``margin * scale`` of the spectrum.
    """
    _require_associative(A)
    j = _unit(A.desc, j)
    spec = spherical_spectrum(A)
    scale = max(1.0, max((s.modulus for s in spec), default=0.0))
    for s in spec:
        for z in (complex(s.a, s.b), complex(s.a, -s.b)):
            if abs(z - center) <= radius + margin * scale:
                raise LoopHitsSpectrum(f"sphere ({s.a:.6g}, {s.b:.6g}) meets the loop's disc")
    nodes = Circle(radius, center).nodes(quad)
    fvals = _complex_values(f, nodes.z, A.desc)
    return _resolvent_integral(A, j, nodes, fvals).norm()


def _complex_values(f, z: np.ndarray, desc: AlgebraDescriptor) -> np.ndarray | None:
    if f is None:
        return None
    if isinstance(f, StemFunction):
        out = []
        for zk in z:
            a, b = f.f1(complex(zk)), f.f2(complex(zk))
            if not (np.allclose(a.coeffs[1:], 0.0, atol=1e-12) and np.allclose(b.coeffs[1:], 0.0, atol=1e-12)):
                raise ValueError("the integrand must be a real slice function")
            out.append(complex(a.coeffs[0], b.coeffs[0]))
        return np.array(out)
    return np.array([complex(f(complex(zk))) for zk in z])


# ---------------------------------------------------------------------------
# Sectorial operators


@dataclass(frozen=True)
class SectorReport:
    """Sampled sector constant: ``pass_`` iff every ``|C_alpha| |alpha|`` is at most ``M``."""

    delta: float
    M: float
    samples: tuple[tuple[AlgebraElement, float], ...] = field(repr=False)
    pass_: bool = True

    @property
    def sup(self) -> float:
        return max((v for _, v in self.samples), default=0.0)


def sector_check(
    A: OperatorMatrix,
    delta: float,
    n_radii: int = 16,
    n_angles: int = 8,
    seed: int = 0,
    M: float | None = None,
    radii: tuple[float, float] = (1e-3, 1e3),
) -> SectorReport:
    """Check that ``Sigma_delta = {arg alpha < pi/2 + delta}`` avoids the spectrum and sample ``M``.

    Spectral spheres are tested exactly through their arguments; the constant
    ``sup |C_alpha(A)| |alpha|`` is estimated on a log-radial by angular grid
    with a random imaginary unit per sample.  Without a user ``M`` the sampled
    supremum becomes ``M`` (floored at 1).

    Raises:
        NotSectorial: with a witness point of the sector that lies on the spectrum.
    """
    _require_associative(A)
    if not 0 < delta < math.pi / 2:
        raise ValueError("delta must lie in (0, pi/2)")
    desc = A.desc
    spec = spherical_spectrum(A, seed=seed)
    edge = math.pi / 2 + delta
    for s in spec:
        if s.a == 0.0 and s.b == 0.0:
            continue
        if math.atan2(s.b, s.a) < edge:
            j = desc.basis(1) if desc.dim > 1 else None
            witness = desc.real(s.a) if j is None or s.b == 0 else s.representative(j)
            raise NotSectorial(
                f"spectral sphere ({s.a:.6g}, {s.b:.6g}) lies inside the sector", witness=witness
            )
    rng = np.random.default_rng(seed)
    rho = np.geomspace(radii[0], radii[1], n_radii)
    theta = np.linspace(0.0, edge * (1 - 1e-3), n_angles)
    points = []
    for rr in rho:
        for th in theta:
            j = random_imaginary_unit(desc, rng) if desc.dim > 1 else None
            if j is None:
                if abs(th) > 1e-12:
                    continue
                points.append(desc.real(rr))
            else:
                points.append(desc.real(rr * math.cos(th)) + j * (rr * math.sin(th)))
    coeffs = np.array([p.coeffs for p in points])
    Cr = resolvent_real(A, coeffs)
    samples = []
    for p, Ck in zip(points, Cr):
        samples.append((p, linalg.op_norm2(Ck) * float(np.linalg.norm(p.coeffs))))
    sup = max(v for _, v in samples)
    if M is None:
        return SectorReport(delta, max(1.0, sup), tuple(samples), True)
    return SectorReport(delta, M, tuple(samples), sup <= M)


def random_sectorial(
    desc: AlgebraDescriptor, m: int, delta: float, rng: np.random.Generator, margin: float = 0.5
) -> OperatorMatrix:
    """Random operator shifted so every sphere has ``arg >= pi/2 + delta`` with some room."""
    B = random_operator(desc, m, rng)
    spec = spherical_spectrum(B, verify=False)
    shift = max(s.a + s.b * math.tan(delta) for s in spec) + margin
    return B - OperatorMatrix.scalar(desc, m, shift)


# ---------------------------------------------------------------------------
# Keyhole integrals


@dataclass(frozen=True)
class ContourResult:
    """A contour-integral value together with its certificate."""

    value: OperatorMatrix
    tail_bound: float
    quad_error: float
    quad_nodes: int
    M: float
    delta: float | None
    r: float
    eta: float
    s: float
    j: AlgebraElement

    @property
    def tolerance(self) -> float:
        return self.tail_bound + self.quad_error

    def certificate(self) -> dict:
        return {
            "tail_bound": self.tail_bound,
            "quad_error_estimate": self.quad_error,
            "quad_nodes": self.quad_nodes,
            "M": self.M,
            "delta": self.delta,
            "r": self.r,
            "eta": self.eta,
            "s": self.s,
            "j": [float(c) for c in self.j.coeffs],
        }


def _truncation(tail: Callable[[float], float], r: float, quad: QuadratureSpec) -> tuple[float, float]:
    """Smallest ``s = r 2^k`` with ``tail(s) <= tail_tol``, then doubled once."""
    s = 2.0 * r
    for _ in range(quad.ray_panels - 1):
        if tail(s) <= quad.tail_tol:
            s *= 2.0
            return s, tail(s)
        s *= 2.0
    raise TailNotCertifiable(
        f"ray tail {tail(s):.3g} still above {quad.tail_tol:g} after {quad.ray_panels} panels"
    )


def _keyhole_params(t_scale: float | None, delta: float, r, eta):
    if eta is None:
        eta = math.pi / 2 + delta / 2
    if not math.pi / 2 < eta < math.pi / 2 + delta:
        raise ValueError(f"eta must lie in (pi/2, pi/2 + delta) = (1.5708, {math.pi / 2 + delta:.6g})")
    if r is None:
        r = 1.0 / t_scale if t_scale else 1.0
    if not r > 0:
        raise ValueError("r must be positive")
    return r, eta


def semigroup_contour(
    A: OperatorMatrix,
    t: float,
    delta: float = 0.3,
    j: AlgebraElement | None = None,
    r: float | None = None,
    eta: float | None = None,
    quad: QuadratureSpec = QuadratureSpec(),
    report: SectorReport | None = None,
    estimate_error: bool = True,
) -> ContourResult:
    """``T(t) = (1/2pi) int_Gamma C_alpha(A) j^-1 e^(t alpha) d(alpha)`` for sectorial ``A``.

    Defaults: ``eta = pi/2 + delta/2`` and ``r = 1/t``.  Each ray is cut at
    ``s`` with ``M e^(t s cos eta) / (2 pi s t |cos eta|) <= tail_tol`` and
    then doubled; the returned ``tail_bound`` covers both rays.

    Raises:
        NotSectorial: if the sector check fails.
        TailNotCertifiable: if no admissible ``s`` is found within the panel cap.
    """
    if not t > 0:
        raise ValueError("the contour representation needs t > 0")
    _require_associative(A)
    j = _unit(A.desc, j)
    if report is None:
        report = sector_check(A, delta)
    if not report.pass_:
        raise NotSectorial(f"sampled sector constant exceeds M = {report.M}")
    r, eta = _keyhole_params(t, delta, r, eta)
    M = report.M
    c = abs(math.cos(eta))

    def tail_one(s: float) -> float:
        return M * math.exp(t * s * math.cos(eta)) / (TWO_PI * s * t * c)

    s, tail = _truncation(tail_one, r, quad)
    path = KeyholeContour(j, r, eta, s, omega=t * math.sin(eta))

    def integrate(q: QuadratureSpec) -> tuple[OperatorMatrix, int]:
        nodes = path.nodes(q)
        return _resolvent_integral(A, j, nodes, np.exp(t * nodes.z)), len(nodes)

    value, count = integrate(quad)
    err = (value - integrate(quad.coarse())[0]).norm() if estimate_error else 0.0
    return ContourResult(value, 2.0 * tail, err, count, M, delta, r, eta, s, j)


def trace_contour(
    A: OperatorMatrix, times: Sequence[float], delta: float = 0.3, quad: QuadratureSpec = QuadratureSpec(), **kw
) -> SemigroupTrace:
    """Contour semigroup on a grid; ``T(0)`` is the identity by definition."""
    report = sector_check(A, delta)
    vals = []
    for t in times:
        if t == 0:
            vals.append(OperatorMatrix.identity(A.desc, A.m))
        else:
            vals.append(semigroup_contour(A, t, delta, quad=quad, report=report, estimate_error=False, **kw).value)
    return SemigroupTrace(np.asarray(times, float), tuple(vals), Method.CONTOUR)


def contour_parameter_independence(
    A: OperatorMatrix, t: float, params1: dict, params2: dict, delta: float = 0.3, quad: QuadratureSpec = QuadratureSpec()
) -> tuple[float, float]:
    """``|T_1(t) - T_2(t)|`` for two parameter sets (keys ``r``, ``eta``, ``j``) and the combined tolerance."""
    report = sector_check(A, delta)
    one = semigroup_contour(A, t, delta, quad=quad, report=report, **params1)
    two = semigroup_contour(A, t, delta, quad=quad, report=report, **params2)
    return (one.value - two.value).norm(), one.tolerance + two.tolerance


def resolvent_contour(
    A: OperatorMatrix,
    lam: float,
    delta: float = 0.3,
    j: AlgebraElement | None = None,
    r: float = 0.5,
    eta: float | None = None,
    quad: QuadratureSpec = QuadratureSpec(),
    report: SectorReport | None = None,
) -> ContourResult:
    """``C_lam(A) = (1/2pi) int_Gamma C_alpha(A) j^-1 (lam - alpha)^-1 d(alpha)`` for real ``lam > r``.

    Along the rays ``|lam - rho e^(eta j)| >= rho`` since ``cos eta < 0``, so each
    ray tail is at most ``M / (2 pi s)``.

    Raises:
        LambdaInsideKeyhole: if ``lam <= r``.
    """
    if not lam > r:
        raise LambdaInsideKeyhole(f"lam = {lam} must exceed r = {r}")
    _require_associative(A)
    j = _unit(A.desc, j)
    if report is None:
        report = sector_check(A, delta)
    r, eta = _keyhole_params(None, delta, r, eta)
    M = report.M
    s, tail = _truncation(lambda s: M / (TWO_PI * s), r, quad)
    path = KeyholeContour(j, r, eta, s)

    def integrate(q: QuadratureSpec) -> tuple[OperatorMatrix, int]:
        nodes = path.nodes(q)
        return _resolvent_integral(A, j, nodes, 1.0 / (lam - nodes.z)), len(nodes)

    value, count = integrate(quad)
    err = (value - integrate(quad.coarse())[0]).norm()
    return ContourResult(value, 2.0 * tail, err, count, M, delta, r, eta, s, j)


@dataclass(frozen=True)
class ExpRayResult:
    value: float
    tail_bound: float

    @property
    def total(self) -> float:
        return self.value + self.tail_bound


def exp_ray_integral_zero(
    j: AlgebraElement,
    r: float,
    eta: float,
    t: float,
    quad: QuadratureSpec = QuadratureSpec(),
) -> ExpRayResult:
    """``|int_Gamma e^(t alpha) d(alpha)|`` over the truncated keyhole plus the tail bound.

    Each ray tail is at most ``e^(t s cos eta) / (t |cos eta|)``.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    c = math.cos(eta)
    if c >= -1e-8:
        raise ValueError("eta must exceed pi/2: cos(eta) must be negative for the rays to decay")
    s, tail = _truncation(lambda s: math.exp(t * s * c) / (t * abs(c)), r, quad)
    path = KeyholeContour(j, r, eta, s, omega=t * math.sin(eta))
    nodes = path.nodes(quad)
    # scalar integrand: e^(t alpha) in C_j, integrated as complex numbers
    total = np.sum(nodes.dz * np.exp(t * nodes.z))
    val = float(np.linalg.norm(_to_algebra(np.array([total]), j)))
    return ExpRayResult(val, 2.0 * tail)


def slice_cauchy_reconstruct(
    f: StemFunction,
    beta: AlgebraElement,
    j: AlgebraElement | None = None,
    radius: float = 4.0,
    center: float = 0.0,
    quad: QuadratureSpec = QuadratureSpec(nodes_per_arc=256),
    margin: float = 1e-3,
) -> AlgebraElement:
    """``f(beta) = (1/2pi) int_{dD_j} C_alpha(beta) j^-1 d(alpha) f(alpha)``.

    The loop is the circle of ``radius`` around the real point ``center`` in
    ``C_j``; ``beta`` may lie off that plane.  In a non-associative algebra
    ``f`` must be real slice.

    Raises:
        SphereNotEnclosed: if the sphere of ``beta`` meets the closed disc's complement.
        NonAssociative: for a non-real-slice ``f`` over the octonions.
    """
    desc = f.desc
    j = _unit(desc, j)
    d = cone_decompose(beta)
    for z in (complex(d.a, d.b), complex(d.a, -d.b)):
        if abs(z - center) >= radius * (1 - margin):
            raise SphereNotEnclosed(f"the sphere of {beta!r} is not inside the loop")
    path = PlanarPath(j, (Circle(radius, complex(center, 0.0)),))
    if not desc.associative:
        probe = path.nodes(QuadratureSpec(nodes_per_arc=8)).z
        if not is_real_slice(f, probe):
            raise NonAssociative("over a non-associative algebra the formula needs a real slice f")
    jinv = -j
    total = line_integral(lambda alpha: cauchy_kernel(alpha, beta) * jinv, lambda a: eval_slice(f, a), path, quad)
    return total / TWO_PI
