"""Dense real linear algebra used as substrate and as an independent oracle.

Matrices are plain 2-D ``float64`` numpy arrays; numpy supplies storage and
vectorized row operations, while the factorizations themselves (LU with
partial pivoting, power iteration, Householder-Hessenberg plus shifted QR,
Taylor scaling-and-squaring, one-sided Jacobi SVD) are written out here.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NoConvergence, Singular

SINGULAR_PIVOT_TOL = 1e-13
IMAG_SNAP_TOL = 1e-9
EIG_MAX_DIM = 256


def as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {A.shape}")
    return A


def to_csv(A: np.ndarray) -> str:
    return "\n".join(",".join(f"{v:.17g}" for v in row) for row in as_matrix(A)) + "\n"


# ---------------------------------------------------------------------------
# Realification of algebra-valued matrices


def realify(entries: np.ndarray, desc) -> np.ndarray:
    """Real ``(m*d, m*d)`` matrix of ``x -> M x`` for entries of shape ``(m, m, d)``.

    Block ``(i, k)`` is the left-multiplication matrix of ``M[i, k]``.
    """
    entries = np.asarray(entries, dtype=float)
    m, _, d = entries.shape
    blocks = desc.left_matrix(entries)  # (m, m, d, d)
    return blocks.transpose(0, 2, 1, 3).reshape(m * d, m * d)


def derealify(R: np.ndarray, d: int) -> np.ndarray:
    """Recover ``(m, m, d)`` entries from a realified matrix (column 0 of each block)."""
    R = as_matrix(R)
    m = R.shape[0] // d
    blocks = R.reshape(m, d, m, d)
    return blocks[:, :, :, 0].transpose(0, 2, 1).copy()


def block_structure_residual(R: np.ndarray, desc) -> float:
    """Distance of ``R`` from the set of realified ``desc``-matrices, relative to ``|R|``."""
    back = realify(derealify(R, desc.dim), desc)
    scale = max(1.0, float(np.abs(R).max(initial=0.0)))
    return float(np.abs(back - R).max(initial=0.0)) / scale


# ---------------------------------------------------------------------------
# LU


def lu_factor(A: np.ndarray, scale=None):
    """LU with partial pivoting, vectorized over leading batch axes.

    Returns ``(LU, perm, sign, min_pivot_ratio)`` where ``min_pivot_ratio`` is the
    smallest ``|pivot| / scale`` encountered (per batch element).  ``scale``
    defaults to ``max|A|``.
    """
    LU = np.array(A, dtype=float, copy=True)
    if LU.shape[-1] != LU.shape[-2]:
        raise ValueError("LU needs a square matrix")
    n = LU.shape[-1]
    batch = LU.shape[:-2]
    LU = LU.reshape((-1, n, n))
    nb = LU.shape[0]
    perm = np.tile(np.arange(n), (nb, 1))
    sign = np.ones(nb)
    if scale is None:
        scale = np.abs(LU).reshape(nb, -1).max(axis=1, initial=0.0)
    else:
        scale = np.broadcast_to(np.asarray(scale, dtype=float), batch).reshape(nb).copy()
    scale[scale == 0.0] = 1.0
    min_ratio = np.full(nb, np.inf)
    rows = np.arange(nb)
    for k in range(n):
        p = k + np.argmax(np.abs(LU[:, k:, k]), axis=1)
        swap = p != k
        if np.any(swap):
            r = rows[swap]
            pk = p[swap]
            LU[r, k], LU[r, pk] = LU[r, pk].copy(), LU[r, k].copy()
            perm[r, k], perm[r, pk] = perm[r, pk], perm[r, k].copy()
            sign[r] = -sign[r]
        piv = LU[:, k, k]
        min_ratio = np.minimum(min_ratio, np.abs(piv) / scale)
        safe = np.where(piv == 0.0, 1.0, piv)
        LU[:, k + 1 :, k] /= safe[:, None]
        LU[:, k + 1 :, k + 1 :] -= LU[:, k + 1 :, k, None] * LU[:, k, None, k + 1 :]
    if n == 0:
        min_ratio[:] = 1.0
    return (
        LU.reshape(batch + (n, n)),
        perm.reshape(batch + (n,)),
        sign.reshape(batch),
        min_ratio.reshape(batch),
    )


def _lu_substitute(LU: np.ndarray, perm: np.ndarray, B: np.ndarray) -> np.ndarray:
    n = LU.shape[-1]
    X = np.take_along_axis(B, perm[..., None], axis=-2).copy()
    for k in range(n):
        X[..., k + 1 :, :] -= LU[..., k + 1 :, k, None] * X[..., k, None, :]
    for k in range(n - 1, -1, -1):
        X[..., k, :] /= LU[..., k, k, None]
        X[..., :k, :] -= LU[..., :k, k, None] * X[..., k, None, :]
    return X


def lu_solve(
    A: np.ndarray, B: np.ndarray, pivot_tol: float = SINGULAR_PIVOT_TOL, scale=None
) -> np.ndarray:
    """Solve ``A X = B``; batch axes of ``A`` and ``B`` must agree.

    Raises:
        Singular: if a pivot falls below ``pivot_tol * scale`` (default scale ``max|A|``).
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    vector = B.ndim == A.ndim - 1
    if vector:
        B = B[..., None]
    LU, perm, _, ratio = lu_factor(A, scale)
    if np.any(ratio < pivot_tol):
        raise Singular(f"matrix is singular to working precision (pivot ratio {np.min(ratio):.3g})")
    X = _lu_substitute(LU, perm, B)
    return X[..., 0] if vector else X


def inv(A: np.ndarray, pivot_tol: float = SINGULAR_PIVOT_TOL, scale=None) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    eye = np.broadcast_to(np.eye(A.shape[-1]), A.shape)
    return lu_solve(A, eye, pivot_tol, scale)


def det(A: np.ndarray) -> float:
    LU, _, sign, _ = lu_factor(as_matrix(A))
    return float(sign * np.prod(np.diag(LU)))


def min_pivot_ratio(A: np.ndarray, scale=None) -> float:
    """Smallest pivot of the partially pivoted LU relative to ``scale`` (default ``max|A|``)."""
    return float(np.min(lu_factor(A, scale)[3]))


# ---------------------------------------------------------------------------
# Norms and singular values


def op_norm2(A: np.ndarray, rtol: float = 1e-8, max_iter: int = 10_000) -> float:
    """Largest singular value by power iteration on ``A^T A``.

    ``G = A^T A`` is squared with normalization until the powers settle, which
    separates the dominant singular subspace even when the two leading
    singular values are close.  Power steps on that high power then run from
    two starts (a fixed vector and a seeded random one), and the Rayleigh
    quotient is taken against ``G``.
    """
    A = as_matrix(A)
    if A.size == 0:
        return 0.0
    amax = float(np.abs(A).max())
    if amax == 0.0:
        return 0.0
    A = A / amax
    G = A.T @ A
    H = G / max(float(np.abs(G).max()), 1e-300)
    for _ in range(_MAX_SQUARINGS):
        H2 = H @ H
        H2 /= max(float(np.abs(H2).max()), 1e-300)
        settled = float(np.abs(H2 - H).max()) <= 1e-15
        H = H2
        if settled:
            break
    n = G.shape[0]
    rng = np.random.default_rng(12345)
    starts = [np.ones(n) + np.arange(n) / (7.0 * n), rng.standard_normal(n)]
    best = 0.0
    for x in starts:
        best = max(best, _power(G, H, x, rtol, max_iter))
    return amax * math.sqrt(best)


# G^(2^60) suppresses any singular value gap above about 1e-16
_MAX_SQUARINGS = 60


def _power(G, H, x, rtol, max_iter) -> float:
    x = x / np.linalg.norm(x)
    rho = float(x @ G @ x)
    # the Rayleigh quotient error is quadratic in the vector error
    qtol = min(rtol, 1e-6) ** 2 if rtol < 1 else 1e-16
    for _ in range(max_iter):
        y = H @ x
        ny = float(np.linalg.norm(y))
        if ny == 0.0:
            return rho
        x = y / ny
        new = float(x @ G @ x)
        if abs(new - rho) <= max(qtol, 1e-15) * abs(new):
            return new
        rho = new
    return rho


def norm_inf(A: np.ndarray) -> float:
    return float(np.abs(A).sum(axis=-1).max(initial=0.0))


def norm_1(A: np.ndarray) -> float:
    return float(np.abs(A).sum(axis=-2).max(initial=0.0))


def singular_values(A: np.ndarray, tol: float = 1e-15, max_sweeps: int = 60) -> np.ndarray:
    """All singular values (descending) by one-sided Jacobi rotations."""
    U = np.array(as_matrix(A), dtype=float, copy=True)
    if U.shape[0] < U.shape[1]:
        U = U.T.copy()
    n = U.shape[1]
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                a = float(U[:, p] @ U[:, p])
                b = float(U[:, q] @ U[:, q])
                c = float(U[:, p] @ U[:, q])
                if abs(c) <= tol * math.sqrt(a * b) or c == 0.0:
                    continue
                rotated = True
                zeta = (b - a) / (2.0 * c)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                cs = 1.0 / math.sqrt(1.0 + t * t)
                sn = cs * t
                up = U[:, p].copy()
                U[:, p] = cs * up - sn * U[:, q]
                U[:, q] = sn * up + cs * U[:, q]
        if not rotated:
            break
    else:
        raise NoConvergence("Jacobi SVD did not converge")
    return np.sort(np.linalg.norm(U, axis=0))[::-1]


# ---------------------------------------------------------------------------
# Eigenvalues


def hessenberg(A: np.ndarray) -> np.ndarray:
    """Upper Hessenberg form by Householder similarity transforms."""
    H = np.array(as_matrix(A), dtype=float, copy=True)
    n = H.shape[0]
    for k in range(n - 2):
        x = H[k + 1 :, k]
        alpha = float(np.linalg.norm(x))
        if alpha == 0.0:
            continue
        v = x.copy()
        v[0] += math.copysign(alpha, x[0]) if x[0] != 0 else alpha
        v /= np.linalg.norm(v)
        H[k + 1 :, k:] -= 2.0 * np.outer(v, v @ H[k + 1 :, k:])
        H[:, k + 1 :] -= 2.0 * np.outer(H[:, k + 1 :] @ v, v)
        H[k + 2 :, k] = 0.0
    return H


def _eig2(B: np.ndarray) -> tuple[complex, complex]:
    a, b, c, d = B[0, 0], B[0, 1], B[1, 0], B[1, 1]
    half = (a + d) / 2
    disc = np.sqrt(complex(((a - d) / 2) ** 2 + b * c))
    return complex(half + disc), complex(half - disc)


def eig_complex(A: np.ndarray, max_iter_per_eig: int = 200) -> list[tuple[float, float]]:
    """Eigenvalues of a real square matrix as ``(re, im)`` pairs, sorted.

    Hessenberg reduction followed by single-shift complex QR with Wilkinson
    shifts and deflation.  Imaginary parts below ``1e-9 * scale`` are set to 0.

    Raises:
        NoConvergence: if an eigenvalue is not isolated within the iteration cap.
    """
    A = as_matrix(A)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("eig_complex needs a square matrix")
    if n > EIG_MAX_DIM:
        raise ValueError(f"eig_complex supports n <= {EIG_MAX_DIM}")
    if n == 0:
        return []
    H = hessenberg(A).astype(complex)
    eps = np.finfo(float).eps
    eigs: list[complex] = []
    hi = n - 1
    its = 0
    while hi >= 0:
        if hi == 0:
            eigs.append(H[0, 0])
            break
        lo = hi
        while lo > 0:
            off = abs(H[lo, lo - 1])
            if off <= eps * (abs(H[lo - 1, lo - 1]) + abs(H[lo, lo])) or off < 1e-300:
                H[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            eigs.append(H[hi, hi])
            hi -= 1
            its = 0
            continue
        if lo == hi - 1:
            eigs.extend(_eig2(H[lo : hi + 1, lo : hi + 1]))
            hi -= 2
            its = 0
            continue
        its += 1
        if its > max_iter_per_eig:
            raise NoConvergence(f"QR iteration stalled with {hi + 1} eigenvalues left")
        if its % 10 == 0:
            mu = H[hi, hi] + abs(H[hi, hi - 1]) + abs(H[hi - 1, hi - 2])
        else:
            mu = _wilkinson(H[hi - 1 : hi + 1, hi - 1 : hi + 1])
        _qr_step(H, lo, hi, mu)
    scale = max(1.0, float(np.abs(A).max()))
    out = []
    for z in eigs:
        im = z.imag if abs(z.imag) > IMAG_SNAP_TOL * scale else 0.0
        out.append((float(z.real), float(im)))
    return sorted(out)


def _wilkinson(B: np.ndarray) -> complex:
    a, b, c, d = B[0, 0], B[0, 1], B[1, 0], B[1, 1]
    half = (a - d) / 2
    disc = np.sqrt(half * half + b * c)
    e1, e2 = (a + d) / 2 + disc, (a + d) / 2 - disc
    return e1 if abs(e1 - d) < abs(e2 - d) else e2


def _qr_step(H: np.ndarray, lo: int, hi: int, mu: complex) -> None:
    """One explicit shifted QR step on the active block ``H[lo:hi+1, lo:hi+1]``."""
    blk = H[lo : hi + 1, lo : hi + 1]
    k = blk.shape[0]
    blk -= mu * np.eye(k)
    rots = []
    for i in range(k - 1):
        a, b = blk[i, i], blk[i + 1, i]
        r = math.hypot(abs(a), abs(b))
        if r == 0.0:
            c, s = 1.0 + 0j, 0j
        else:
            c, s = a / r, b / r
        G = np.array([[np.conj(c), np.conj(s)], [-s, c]])
        blk[i : i + 2, i:] = G @ blk[i : i + 2, i:]
        rots.append(G)
    for i, G in enumerate(rots):
        top = min(i + 2, k - 1) + 1
        blk[:top, i : i + 2] = blk[:top, i : i + 2] @ G.conj().T
    blk += mu * np.eye(k)


def char_poly_residual(A: np.ndarray, z: complex) -> float:
    """``|det(A - z I)|`` relative to ``prod(|A| + |z|)``, by complex LU."""
    A = as_matrix(A)
    n = A.shape[0]
    M = A.astype(complex) - z * np.eye(n)
    piv_prod = 1.0
    scale = 1.0
    for k in range(n):
        p = k + int(np.argmax(np.abs(M[k:, k])))
        M[[k, p]] = M[[p, k]]
        if M[k, k] == 0:
            return 0.0
        M[k + 1 :, k:] -= np.outer(M[k + 1 :, k] / M[k, k], M[k, k:])
        piv_prod *= abs(M[k, k])
        scale *= max(float(np.abs(A[k]).sum()) + abs(z), 1e-300)
    return piv_prod / scale


# ---------------------------------------------------------------------------
# Matrix exponential


def expm(A: np.ndarray, tol: float = 1e-14) -> np.ndarray:
    """``exp(A)`` by scaling and squaring with a truncated Taylor series.

    The matrix is scaled by ``2^-s`` until ``max(|A|_1, |A|_inf) <= 0.5`` and the
    Taylor degree is the smallest whose remainder bound is below ``tol``.
    """
    A = as_matrix(A)
    n = A.shape[0]
    nrm = max(norm_1(A), norm_inf(A))
    s = 0 if nrm <= 0.5 else int(math.ceil(math.log2(nrm / 0.5)))
    B = A / 2.0**s
    x = nrm / 2.0**s
    degree = 1
    while True:
        rem = x ** (degree + 1) / math.factorial(degree + 1) / max(1e-300, 1.0 - x / (degree + 2))
        if rem < tol or x == 0.0:
            break
        degree += 1
    E = np.eye(n)
    for k in range(degree, 0, -1):
        E = np.eye(n) + (B @ E) / k
    for _ in range(s):
        E = E @ E
    return E


def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on ``[-1, 1]``."""
    return np.polynomial.legendre.leggauss(order)
