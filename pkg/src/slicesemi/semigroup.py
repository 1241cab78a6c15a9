"""Semigroups ``T(t) = e^(tA)`` generated by right-linear operators.

Three constructions are available: the matrix exponential of the
realification, the Yosida approximation ``T(t) x = lim e^(t A_n) x`` with
``A_n = n A C_n(A)``, and (in :mod:`slicesemi.contour`) a keyhole Cauchy integral.
The residual helpers cross-check any of them against the defining properties.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import GridTooShort, NotCauchy, OnSpectrum, Singular
from .operators import C, GrowthBound, OperatorMatrix, module_rmul


class Method(enum.Enum):
    EXPM = "expm"
    YOSIDA = "yosida"
    CONTOUR = "contour"


@dataclass(frozen=True)
class SemigroupTrace:
    """``T(t_k)`` on an increasing time grid starting at 0."""

    times: np.ndarray
    values: tuple[OperatorMatrix, ...]
    method: Method
    bound: GrowthBound | None = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or len(t) != len(self.values) or len(t) == 0:
            raise ValueError("times and values must be non-empty and of equal length")
        if t[0] != 0.0 or np.any(np.diff(t) <= 0):
            raise ValueError("times must start at 0 and increase strictly")
        object.__setattr__(self, "times", t)

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Array ``(len(times), m, dim)`` of ``T(t_k) x``."""
        return np.stack([T.apply(x) for T in self.values])

    def step(self) -> float:
        """Uniform step of the grid.

        Raises:
            ValueError: if the grid is not uniform.
        """
        d = np.diff(self.times)
        if d.size == 0:
            raise ValueError("a single-point grid has no step")
        h = float(d.mean())
        if np.max(np.abs(d - h)) > 1e-9 * max(1.0, h):
            raise ValueError("the time grid is not uniform")
        return h


def _vec_norm(x: np.ndarray) -> float:
    return float(np.linalg.norm(x))


# ---------------------------------------------------------------------------
# Exponential


def evolve_expm(A: OperatorMatrix, t: float) -> OperatorMatrix:
    """``e^(tA)`` via the realification."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return OperatorMatrix.from_real(linalg.expm(t * A.realify()), A.desc)


def expm_block_residual(A: OperatorMatrix, t: float) -> float:
    """How far ``expm(t realify(A))`` is from being the realification of an A-matrix."""
    return linalg.block_structure_residual(linalg.expm(t * A.realify()), A.desc)


def trace_expm(A: OperatorMatrix, times: Sequence[float]) -> SemigroupTrace:
    return SemigroupTrace(np.asarray(times, float), tuple(evolve_expm(A, t) for t in times), Method.EXPM)


# ---------------------------------------------------------------------------
# Yosida approximation


def yosida_approximant(A: OperatorMatrix, n: float) -> OperatorMatrix:
    """``A_n = n A C_n(A)``.

    Raises:
        OnSpectrum: if ``n`` is in the spectrum of ``A``.
    """
    return (A @ C(A, A.desc.real(float(n)))) * float(n)


@dataclass(frozen=True)
class YosidaResult:
    """Outcome of :func:`evolve_yosida`.

    ``achieved`` is the last Cauchy difference, a heuristic error estimate.
    """

    value: np.ndarray
    achieved: float
    n: float
    iterations: int
    extrapolated: bool


def _yosida_limit(
    A: OperatorMatrix,
    t: float,
    X: np.ndarray,
    tol: float,
    n0: float | None,
    cap_doublings: int,
    extrapolate: bool,
) -> YosidaResult:
    if t < 0:
        raise ValueError("t must be non-negative")
    if n0 is None:
        n0 = max(2.0 * A.norm(), 1.0)
    R = A.realify()
    eye = np.eye(R.shape[0])
    table: list[np.ndarray] = []
    prev = None
    diff = math.inf
    n = n0
    for k in range(cap_doublings + 1):
        n = n0 * 2.0**k
        try:
            Rn = n * R @ linalg.inv(n * eye - R)
        except Singular:
            raise OnSpectrum(f"{n} is in the spectrum", n) from None
        y = linalg.expm(t * Rn) @ X
        if extrapolate:
            # Romberg table in the variable 1/n: A_n is analytic in 1/n
            row = [y]
            for p, old in enumerate(table, start=1):
                row.append(row[-1] + (row[-1] - old) / (2.0**p - 1.0))
            table = row
            cur = row[-1]
        else:
            cur = y
        if prev is not None:
            diff = _vec_norm(cur - prev)
            if diff < tol:
                return YosidaResult(cur, diff, n, k + 1, extrapolate)
        prev = cur
    raise NotCauchy(
        f"Yosida iteration did not reach tol={tol:g} by n={n:g} (last difference {diff:.3g})",
        value=prev,
        achieved=diff,
    )


def evolve_yosida(
    A: OperatorMatrix,
    t: float,
    x: np.ndarray,
    tol: float = 1e-8,
    n0: float | None = None,
    cap_doublings: int = 14,
    extrapolate: bool = True,
) -> YosidaResult:
    """``T(t) x`` as the limit of ``e^(t A_n) x`` over ``n = n0 2^k``.

    With ``extrapolate`` the doubling sequence is Richardson-extrapolated in
    ``1/n`` before the Cauchy stopping rule is applied; without it the plain
    sequence is used, whose ``O(1/n)`` error rarely meets tight tolerances.
    ``n0`` defaults to ``max(2 |A|, 1)``.

    Raises:
        NotCauchy: if successive iterates never differ by less than ``tol``.
    """
    x = np.asarray(x, dtype=float)
    res = _yosida_limit(A, t, x.reshape(-1), tol, n0, cap_doublings, extrapolate)
    return YosidaResult(res.value.reshape(x.shape), res.achieved, res.n, res.iterations, res.extrapolated)


def yosida_operator(
    A: OperatorMatrix, t: float, tol: float = 1e-8, n0: float | None = None
) -> OperatorMatrix:
    """The operator ``T(t)`` through the Yosida limit applied to the identity."""
    res = _yosida_limit(A, t, np.eye(A.m * A.desc.dim), tol, n0, 14, True)
    return OperatorMatrix.from_real(res.value, A.desc)


def trace_yosida(A: OperatorMatrix, times: Sequence[float], tol: float = 1e-8) -> SemigroupTrace:
    vals = tuple(yosida_operator(A, t, tol) for t in times)
    return SemigroupTrace(np.asarray(times, float), vals, Method.YOSIDA)


# ---------------------------------------------------------------------------
# Generation condition


@dataclass(frozen=True)
class Violation:
    """A point ``(lam, n)`` where ``|C_lam^n| (lam - w)^n`` exceeds the bound."""

    lam: float
    n: int
    value: float
    bound: float
    reason: str


def check_hille_yosida(
    A: OperatorMatrix,
    lambdas: Sequence[float],
    n_max: int = 8,
    w: float = 0.0,
    M: float | None = 1.0,
) -> GrowthBound | Violation:
    """Check ``|C_lam(A)^n| <= M / (lam - w)^n`` for ``lam`` in the grid and ``n <= n_max``.

    With a given ``M`` the result is ``GrowthBound(M, w)`` once every grid
    point passes (with a relative slack of 1e-9 for rounding).  With ``M=None``
    no bound is imposed and the tightest admissible constant
    ``max(1, sup |C_lam^n| (lam - w)^n)`` is returned.  A grid point on the
    spectrum is reported as a violation, since no finite constant works there.
    """
    sup = 0.0
    for lam in lambdas:
        if not lam > w:
            raise ValueError(f"grid point {lam} is not above w = {w}")
        try:
            Cl = C(A, A.desc.real(float(lam))).realify()
        except OnSpectrum:
            return Violation(float(lam), 1, math.inf, M if M is not None else math.inf, "on spectrum")
        P = np.eye(Cl.shape[0])
        for n in range(1, n_max + 1):
            P = P @ Cl
            value = linalg.op_norm2(P) * (lam - w) ** n
            if M is not None and value > M * (1.0 + 1e-9):
                return Violation(float(lam), n, value, M, "norm bound exceeded")
            sup = max(sup, float(value))
    # a passing check certifies the requested M; only a fit reports the sampled sup
    return GrowthBound(float(M) if M is not None else max(1.0, sup), float(w))


# ---------------------------------------------------------------------------
# Residuals


def _simpson(values: np.ndarray, h: float) -> np.ndarray:
    n = values.shape[0] - 1
    if n < 2 or n % 2:
        raise ValueError("composite Simpson needs an even number of intervals")
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return h / 3.0 * np.tensordot(w, values, axes=1)


@dataclass(frozen=True)
class LaplaceResult:
    residual: float
    tail_bound: float
    quadrature: np.ndarray


def laplace_residual(
    A: OperatorMatrix,
    lam: float,
    trace: SemigroupTrace,
    x: np.ndarray,
    bound: GrowthBound | None = None,
    tol: float = 1e-6,
) -> LaplaceResult:
    """Compare ``C_lam(A) x`` with Simpson's rule for ``int_0^t_end e^(-t lam) T(t) x dt``.

    Raises:
        GridTooShort: if the analytic truncation tail exceeds ``tol``.
    """
    bound = bound or trace.bound or GrowthBound(1.0, 0.0)
    if not lam > bound.w:
        raise ValueError("lam must exceed the growth rate w")
    x = np.asarray(x, dtype=float)
    t_end = float(trace.times[-1])
    tail = bound.M * math.exp((bound.w - lam) * t_end) / (lam - bound.w) * _vec_norm(x)
    if tail > tol:
        raise GridTooShort(f"truncation tail {tail:.3g} exceeds {tol:g}; extend the trace")
    h = trace.step()
    samples = np.exp(-lam * trace.times)[:, None, None] * trace.apply(x)
    quad = _simpson(samples, h)
    exact = C(A, A.desc.real(lam)).apply(x)
    return LaplaceResult(_vec_norm(quad - exact), tail, quad)


def cauchy_problem_residual(A: OperatorMatrix, trace: SemigroupTrace, x: np.ndarray) -> float:
    """``max_k |(u_{k+1} - u_{k-1}) / 2h - A u_k|`` for ``u_k = T(t_k) x``."""
    h = trace.step()
    u = trace.apply(x)
    worst = 0.0
    for k in range(1, len(u) - 1):
        worst = max(worst, _vec_norm((u[k + 1] - u[k - 1]) / (2 * h) - A.apply(u[k])))
    return worst


def semigroup_law_residual(trace: SemigroupTrace, max_pairs: int = 64, seed: int = 0) -> float:
    """Max ``|T(t_p + t_q) - T(t_p) T(t_q)|`` over grid pairs whose sum is on the grid."""
    times = trace.times
    index = {round(t, 12): k for k, t in enumerate(times)}
    pairs = [
        (p, q, index[round(times[p] + times[q], 12)])
        for p in range(len(times))
        for q in range(p, len(times))
        if round(times[p] + times[q], 12) in index
    ]
    if len(pairs) > max_pairs:
        rng = np.random.default_rng(seed)
        pick = np.sort(rng.choice(len(pairs), size=max_pairs, replace=False))
        pairs = [pairs[i] for i in pick]
    V = trace.values
    return max(((V[s] - V[p] @ V[q]).norm() for p, q, s in pairs), default=0.0)


def growth_residual(trace: SemigroupTrace, bound: GrowthBound) -> float:
    """``max_k (|T(t_k)| - M e^(w t_k)) / (M e^(w t_k))``; non-positive when the bound holds."""
    return max((T.norm() - bound.at(t)) / bound.at(t) for t, T in zip(trace.times, trace.values))


def right_linearity_residual(T: OperatorMatrix, x: np.ndarray, alpha) -> float:
    """``|T(x alpha) - (T x) alpha|``."""
    return _vec_norm(T.apply(module_rmul(x, alpha)) - module_rmul(T.apply(x), alpha))
