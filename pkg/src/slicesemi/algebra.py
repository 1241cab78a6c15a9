"""Finite-dimensional real alternative *-algebras: R, C, H, O and Cl(0,n).

Elements are real coefficient vectors over a fixed basis.  Each algebra
family is described by an :class:`AlgebraDescriptor` whose signed
multiplication table is built once and shared read-only.

Basis conventions
-----------------
* ``H``: ``1, i, j, k`` with ``ij = k``, ``jk = i``, ``ki = j``.
* ``O``: ``o0..o7`` = ``1, i, j, k, l, il, jl, kl`` built from ``H`` by the
  Cayley-Dickson product ``(p + q l)(r + s l) = (pr - s^c q) + (q r^c + s p) l``.
* ``Cl(0,n)``: ``e_K`` for subsets ``K`` of ``{1..n}`` ordered by
  cardinality, then lexicographically; ``e_k^2 = -1``, generators anticommute.
"""

from __future__ import annotations

import enum
import functools
import itertools
import math
import re
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DescriptorMismatch, NotImaginaryUnit, NotInCone, WrongAlgebra, ZeroElement

CONE_TOL = 1e-10
MAX_CLIFFORD_N = 12
# Dense (dim, dim, dim) structure tensors are only materialized up to this size.
_DENSE_TENSOR_MAX_DIM = 128


class Kind(enum.Enum):
    REAL = "R"
    COMPLEX = "C"
    QUATERNION = "H"
    OCTONION = "O"
    CLIFFORD = "Cl"


@dataclass(frozen=True)
class AlgebraDescriptor:
    """Identifies one of the supported algebra families.

    ``n`` is the number of Clifford generators and must be 0 for the other kinds.
    """

    kind: Kind
    n: int = 0

    def __post_init__(self):
        if self.kind is Kind.CLIFFORD:
            if not 1 <= self.n <= MAX_CLIFFORD_N:
                raise ValueError(f"Cl(0,n) needs 1 <= n <= {MAX_CLIFFORD_N}, got n={self.n}")
        elif self.n != 0:
            raise ValueError(f"{self.kind.name} takes no generator count")

    @classmethod
    def parse(cls, name: str) -> AlgebraDescriptor:
        """Parse ``"R"``, ``"C"``, ``"H"``, ``"O"`` or ``"Cl<n>"``."""
        name = name.strip()
        m = re.fullmatch(r"Cl\(?0?,?(\d+)\)?", name)
        if m:
            return cls(Kind.CLIFFORD, int(m.group(1)))
        try:
            return cls(Kind(name))
        except ValueError:
            raise ValueError(f"unknown algebra {name!r}") from None

    @property
    def name(self) -> str:
        return f"Cl{self.n}" if self.kind is Kind.CLIFFORD else self.kind.value

    @property
    def dim(self) -> int:
        return {
            Kind.REAL: 1,
            Kind.COMPLEX: 2,
            Kind.QUATERNION: 4,
            Kind.OCTONION: 8,
        }.get(self.kind) or 2**self.n

    @property
    def associative(self) -> bool:
        return self.kind is not Kind.OCTONION

    @property
    def basis_names(self) -> tuple[str, ...]:
        return _tables(self.kind, self.n).names

    @property
    def index(self) -> np.ndarray:
        """``index[a, b]`` is the basis index of ``e_a e_b``."""
        return _tables(self.kind, self.n).index

    @property
    def sign(self) -> np.ndarray:
        """``sign[a, b]`` is the sign of ``e_a e_b``."""
        return _tables(self.kind, self.n).sign

    @property
    def conj_sign(self) -> np.ndarray:
        return _tables(self.kind, self.n).conj_sign

    @property
    def structure(self) -> np.ndarray | None:
        """Dense structure tensor ``T[a, b, c]`` or None for large Clifford algebras."""
        return _structure_tensor(self.kind, self.n)

    def __repr__(self):
        return f"AlgebraDescriptor({self.name})"

    # -- coefficient-level kernels (vectorized over leading axes) ---------

    def mul_coeffs(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        T = self.structure
        if T is not None:
            return np.einsum("...a,...b,abc->...c", x, y, T)
        shape = np.broadcast_shapes(x.shape, y.shape)
        xb = np.broadcast_to(x, shape).reshape(-1, self.dim)
        yb = np.broadcast_to(y, shape).reshape(-1, self.dim)
        flat_idx = self.index.ravel()
        out = np.empty_like(xb)
        for r in range(xb.shape[0]):
            w = (self.sign * np.outer(xb[r], yb[r])).ravel()
            out[r] = np.bincount(flat_idx, weights=w, minlength=self.dim)
        return out.reshape(shape)

    def conj_coeffs(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=float) * self.conj_sign

    def left_matrix(self, x: np.ndarray) -> np.ndarray:
        """Real matrix of ``a -> x a`` (vectorized over leading axes of ``x``)."""
        x = np.asarray(x, dtype=float)
        T = self.structure
        if T is not None:
            return np.einsum("...a,abc->...cb", x, T)
        out = np.zeros(x.shape[:-1] + (self.dim, self.dim))
        cols = np.arange(self.dim)
        for a in range(self.dim):
            out[..., self.index[a], cols] += x[..., a, None] * self.sign[a]
        return out

    def right_matrix(self, x: np.ndarray) -> np.ndarray:
        """Real matrix of ``a -> a x``."""
        x = np.asarray(x, dtype=float)
        T = self.structure
        if T is not None:
            return np.einsum("...b,abc->...ca", x, T)
        out = np.zeros(x.shape[:-1] + (self.dim, self.dim))
        rows = np.arange(self.dim)
        for b in range(self.dim):
            out[..., self.index[:, b], rows] += x[..., b, None] * self.sign[:, b]
        return out

    # -- element constructors ----------------------------------------------

    def element(self, coeffs) -> AlgebraElement:
        return AlgebraElement(self, coeffs)

    def zero(self) -> AlgebraElement:
        return AlgebraElement(self, np.zeros(self.dim))

    def one(self) -> AlgebraElement:
        return self.real(1.0)

    def real(self, r: float) -> AlgebraElement:
        c = np.zeros(self.dim)
        c[0] = r
        return AlgebraElement(self, c)

    def basis(self, which: int | str) -> AlgebraElement:
        if isinstance(which, str):
            which = self.basis_index(which)
        c = np.zeros(self.dim)
        c[which] = 1.0
        return AlgebraElement(self, c)

    def basis_index(self, name: str) -> int:
        aliases = _ALIASES.get(self.kind, {})
        name = aliases.get(name, name)
        try:
            return self.basis_names.index(name)
        except ValueError:
            raise ValueError(f"{name!r} is not a basis element of {self.name}") from None

    def parse_element(self, text: str) -> AlgebraElement:
        """Parse strings such as ``"1 + 2k"``, ``"-j"`` or ``"0.5*e12 - 3"``."""
        return parse_element(self, text)


@functools.lru_cache(maxsize=None)
def algebra(name: str) -> AlgebraDescriptor:
    """Cached descriptor lookup by name, e.g. ``algebra("H")``."""
    return AlgebraDescriptor.parse(name)


# ---------------------------------------------------------------------------
# Multiplication tables


@dataclass(frozen=True)
class _Tables:
    names: tuple[str, ...]
    index: np.ndarray
    sign: np.ndarray
    conj_sign: np.ndarray


_ALIASES = {
    Kind.COMPLEX: {"e1": "i"},
    Kind.QUATERNION: {"e1": "i", "e2": "j", "e12": "k"},
    Kind.OCTONION: {
        "o0": "1", "i": "o1", "j": "o2", "k": "o3", "l": "o4", "il": "o5", "jl": "o6", "kl": "o7",
    },
}


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def _quaternion_table():
    # e_a e_b for 1, i, j, k
    idx = np.array([[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]])
    sgn = np.array(
        [[1, 1, 1, 1], [1, -1, 1, -1], [1, -1, -1, 1], [1, 1, -1, -1]], dtype=float
    )
    return idx, sgn


def _octonion_table():
    qidx, qsgn = _quaternion_table()

    def hmul(p, q):
        out = np.zeros(4)
        for a in range(4):
            for b in range(4):
                out[qidx[a, b]] += qsgn[a, b] * p[a] * q[b]
        return out

    def hconj(p):
        return p * np.array([1.0, -1.0, -1.0, -1.0])

    def cd_mul(x, y):
        p, q, r, s = x[:4], x[4:], y[:4], y[4:]
        return np.concatenate([hmul(p, r) - hmul(hconj(s), q), hmul(q, hconj(r)) + hmul(s, p)])

    idx = np.zeros((8, 8), dtype=int)
    sgn = np.zeros((8, 8))
    eye = np.eye(8)
    for a in range(8):
        for b in range(8):
            prod = cd_mul(eye[a], eye[b])
            c = int(np.flatnonzero(prod)[0])
            idx[a, b] = c
            sgn[a, b] = prod[c]
    return idx, sgn


def _clifford_subsets(n: int) -> list[tuple[int, ...]]:
    return [K for size in range(n + 1) for K in itertools.combinations(range(1, n + 1), size)]


def _clifford_table(n: int):
    subsets = _clifford_subsets(n)
    masks = [sum(1 << (k - 1) for k in K) for K in subsets]
    pos = {mask: i for i, mask in enumerate(masks)}
    d = len(subsets)
    idx = np.zeros((d, d), dtype=int)
    sgn = np.zeros((d, d))
    for a, K in enumerate(subsets):
        for b, L in enumerate(subsets):
            # moving each generator of L left past the larger generators of K
            swaps = sum(1 for l in L for k in K if k > l)
            squares = len(set(K) & set(L))
            idx[a, b] = pos[masks[a] ^ masks[b]]
            sgn[a, b] = (-1.0) ** (swaps + squares)
    sep = "" if n <= 9 else "_"
    names = tuple("1" if not K else "e" + sep.join(str(k) for k in K) for K in subsets)
    conj = np.array([(-1.0) ** (len(K) * (len(K) + 1) // 2) for K in subsets])
    return names, idx, sgn, conj


@functools.lru_cache(maxsize=None)
def _tables(kind: Kind, n: int) -> _Tables:
    if kind is Kind.REAL:
        names, idx, sgn = ("1",), np.zeros((1, 1), dtype=int), np.ones((1, 1))
    elif kind is Kind.COMPLEX:
        names = ("1", "i")
        idx = np.array([[0, 1], [1, 0]])
        sgn = np.array([[1.0, 1.0], [1.0, -1.0]])
    elif kind is Kind.QUATERNION:
        names = ("1", "i", "j", "k")
        idx, sgn = _quaternion_table()
    elif kind is Kind.OCTONION:
        names = ("1",) + tuple(f"o{h}" for h in range(1, 8))
        idx, sgn = _octonion_table()
    else:
        names, idx, sgn, conj = _clifford_table(n)
        return _Tables(names, _readonly(idx), _readonly(sgn), _readonly(conj))
    conj = -np.ones(len(names))
    conj[0] = 1.0
    return _Tables(names, _readonly(idx), _readonly(sgn), _readonly(conj))


@functools.lru_cache(maxsize=None)
def _structure_tensor(kind: Kind, n: int) -> np.ndarray | None:
    t = _tables(kind, n)
    d = len(t.names)
    if d > _DENSE_TENSOR_MAX_DIM:
        return None
    T = np.zeros((d, d, d))
    a, b = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    T[a, b, t.index] = t.sign
    return _readonly(T)


# ---------------------------------------------------------------------------
# Elements


class AlgebraElement:
    """Immutable element of a descriptor's algebra."""

    __slots__ = ("desc", "coeffs")

    def __init__(self, desc: AlgebraDescriptor, coeffs):
        arr = np.array(coeffs, dtype=float)
        if arr.shape != (desc.dim,):
            raise ValueError(f"{desc.name} needs {desc.dim} coefficients, got shape {arr.shape}")
        arr.flags.writeable = False
        object.__setattr__(self, "desc", desc)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, key, value):
        raise AttributeError("AlgebraElement is immutable")

    def _check(self, other: AlgebraElement):
        if other.desc != self.desc:
            raise DescriptorMismatch(f"{self.desc.name} vs {other.desc.name}")

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = self.desc.real(other)
        self._check(other)
        return AlgebraElement(self.desc, self.coeffs + other.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            other = self.desc.real(other)
        self._check(other)
        return AlgebraElement(self.desc, self.coeffs - other.coeffs)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return AlgebraElement(self.desc, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating)):
            return AlgebraElement(self.desc, self.coeffs * float(other))
        return mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.floating)):
            return AlgebraElement(self.desc, self.coeffs * float(other))
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.floating)):
            return AlgebraElement(self.desc, self.coeffs / float(other))
        return NotImplemented

    def __pow__(self, n: int):
        return power(self, n)

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.desc == other.desc and bool(np.array_equal(self.coeffs, other.coeffs))

    __hash__ = None

    def allclose(self, other: AlgebraElement, atol: float = 1e-12) -> bool:
        self._check(other)
        return bool(np.allclose(self.coeffs, other.coeffs, rtol=0.0, atol=atol))

    @property
    def re(self) -> float:
        return float(self.coeffs[0])

    @property
    def im(self) -> AlgebraElement:
        return AlgebraElement(self.desc, (self.coeffs - self.desc.conj_coeffs(self.coeffs)) / 2)

    def conj(self) -> AlgebraElement:
        return conj(self)

    def norm(self) -> float:
        return norm(self)

    def is_real(self, tol: float = CONE_TOL) -> bool:
        return float(np.linalg.norm(self.coeffs[1:])) <= tol * max(1.0, abs(self.coeffs[0]))

    def to_dict(self) -> dict:
        return {"algebra": self.desc.name, "coeffs": [float(c) for c in self.coeffs]}

    @classmethod
    def from_dict(cls, data: dict) -> AlgebraElement:
        return cls(algebra(data["algebra"]), data["coeffs"])

    def __repr__(self):
        terms = []
        for c, name in zip(self.coeffs, self.desc.basis_names):
            if c == 0:
                continue
            terms.append(f"{c:g}" if name == "1" else f"{c:g}*{name}")
        body = " + ".join(terms).replace("+ -", "- ") or "0"
        return f"{self.desc.name}({body})"


def _coerce(desc: AlgebraDescriptor, x) -> AlgebraElement:
    if isinstance(x, AlgebraElement):
        return x
    return desc.real(float(x))


def mul(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    if x.desc != y.desc:
        raise DescriptorMismatch(f"cannot multiply {x.desc.name} by {y.desc.name}")
    return AlgebraElement(x.desc, x.desc.mul_coeffs(x.coeffs, y.coeffs))


def power(x: AlgebraElement, n: int) -> AlgebraElement:
    """``x^0 = 1`` and ``x^n = x x^(n-1)``."""
    if n < 0:
        return power(cone_inverse(x), -n)
    out = x.desc.one()
    for _ in range(n):
        out = mul(x, out)
    return out


def conj(x: AlgebraElement) -> AlgebraElement:
    return AlgebraElement(x.desc, x.desc.conj_coeffs(x.coeffs))


def trace(x: AlgebraElement) -> AlgebraElement:
    """``t(x) = x + x^c``."""
    return x + conj(x)


def normsq(x: AlgebraElement) -> AlgebraElement:
    """``n(x) = x x^c``."""
    return mul(x, conj(x))


def euclid_norm(x: AlgebraElement) -> float:
    return float(np.linalg.norm(x.coeffs))


def clifford_op_norm(x: AlgebraElement) -> float:
    """``sup |x a|`` over unit ``a``: the 2-norm of the left-multiplication matrix."""
    if x.desc.kind is not Kind.CLIFFORD:
        raise WrongAlgebra(f"Clifford operator norm is defined on Cl(0,n), not {x.desc.name}")
    return linalg.op_norm2(x.desc.left_matrix(x.coeffs))


def norm(x: AlgebraElement) -> float:
    """The algebra's chosen norm: Clifford operator norm on Cl(0,n), euclidean otherwise."""
    if x.desc.kind is Kind.CLIFFORD and x.desc.n >= 3:
        return clifford_op_norm(x)
    # for n <= 2 Cl(0,n) is C or H and both norms agree
    return euclid_norm(x)


def in_quadratic_cone(x: AlgebraElement, tol: float = CONE_TOL) -> bool:
    c = x.coeffs
    scale = float(np.linalg.norm(c))
    if scale == 0.0 or float(np.linalg.norm(c[1:])) <= tol * scale:
        return True
    t = c + x.desc.conj_coeffs(c)
    n = x.desc.mul_coeffs(c, x.desc.conj_coeffs(c))
    if np.linalg.norm(t[1:]) > tol * scale or np.linalg.norm(n[1:]) > tol * scale**2:
        return False
    return t[0] ** 2 - 4.0 * n[0] < -4.0 * (tol * scale) ** 2


def is_imaginary_unit(x: AlgebraElement, tol: float = CONE_TOL) -> bool:
    if not in_quadratic_cone(x, tol):
        return False
    sq = x.desc.mul_coeffs(x.coeffs, x.coeffs)
    target = np.zeros(x.desc.dim)
    target[0] = -1.0
    return float(np.linalg.norm(sq - target)) <= 100 * tol


@dataclass(frozen=True)
class ConeDecomposition:
    """``x = a + b j`` with ``b >= 0``; ``j`` is None exactly when ``x`` is real."""

    a: float
    b: float
    j: AlgebraElement | None

    def reconstruct(self, desc: AlgebraDescriptor) -> AlgebraElement:
        if self.j is None:
            return desc.real(self.a)
        return desc.real(self.a) + self.j * self.b

    @property
    def z(self) -> complex:
        return complex(self.a, self.b)


def cone_decompose(x: AlgebraElement, tol: float = CONE_TOL) -> ConeDecomposition:
    if not in_quadratic_cone(x, tol):
        raise NotInCone(f"{x!r} is not in the quadratic cone")
    c = x.coeffs
    scale = float(np.linalg.norm(c))
    im = (c - x.desc.conj_coeffs(c)) / 2
    b = float(np.linalg.norm(im))
    if scale == 0.0 or b <= tol * scale:
        return ConeDecomposition(float(c[0]), 0.0, None)
    return ConeDecomposition(float(c[0]), b, AlgebraElement(x.desc, im / b))


def cone_inverse(x: AlgebraElement) -> AlgebraElement:
    """``x^-1 = n(x)^-1 x^c`` for nonzero ``x`` in the quadratic cone."""
    if not np.any(x.coeffs):
        raise ZeroElement("zero has no inverse")
    if not in_quadratic_cone(x):
        raise NotInCone(f"{x!r} is not in the quadratic cone")
    n0 = float(x.desc.mul_coeffs(x.coeffs, x.desc.conj_coeffs(x.coeffs))[0])
    return conj(x) / n0


def arg(x: AlgebraElement) -> float:
    """Angle ``theta`` in ``[0, pi]`` of the polar form ``rho e^(theta j)``."""
    if not np.any(x.coeffs):
        raise ZeroElement("arg(0) is undefined")
    d = cone_decompose(x)
    return math.atan2(d.b, d.a)


def from_complex(z: complex, j: AlgebraElement) -> AlgebraElement:
    """The point ``Re z + (Im z) j`` of the slice ``C_j``."""
    return j.desc.real(z.real) + j * z.imag


def random_imaginary_unit(desc: AlgebraDescriptor, rng: np.random.Generator) -> AlgebraElement:
    """Sample ``j`` with ``j^2 = -1``.

    For Cl(0,n) the sample is a unit 1-vector, a subset of the imaginary units
    that always lies in the quadratic cone.
    """
    if desc.kind is Kind.REAL:
        raise NotImaginaryUnit("R has no square roots of -1")
    c = np.zeros(desc.dim)
    if desc.kind is Kind.CLIFFORD:
        gens = [desc.basis_index(f"e{k}") for k in range(1, desc.n + 1)]
        v = rng.standard_normal(len(gens))
        c[gens] = v / np.linalg.norm(v)
    else:
        v = rng.standard_normal(desc.dim - 1)
        c[1:] = v / np.linalg.norm(v)
    return AlgebraElement(desc, c)


def random_cone_element(
    desc: AlgebraDescriptor, rng: np.random.Generator, scale: float = 1.0
) -> AlgebraElement:
    if desc.kind is Kind.REAL:
        return desc.real(scale * rng.standard_normal())
    j = random_imaginary_unit(desc, rng)
    a, b = scale * rng.standard_normal(2)
    return desc.real(a) + j * abs(b)


def table_csv(desc: AlgebraDescriptor) -> str:
    """Signed multiplication table as CSV; row ``a``, column ``b`` holds ``e_a e_b``."""
    names = desc.basis_names
    lines = ["," + ",".join(names)]
    for a, row_name in enumerate(names):
        cells = []
        for b in range(desc.dim):
            prefix = "-" if desc.sign[a, b] < 0 else ""
            cells.append(prefix + names[desc.index[a, b]])
        lines.append(row_name + "," + ",".join(cells))
    return "\n".join(lines) + "\n"


_NUMBER = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"


def parse_element(desc: AlgebraDescriptor, text: str) -> AlgebraElement:
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty element")
    # split at +/- that are not exponent signs
    terms, start = [], 0
    for i in range(1, len(s)):
        if s[i] in "+-" and not (s[i - 1] in "eE" and i >= 2 and (s[i - 2].isdigit() or s[i - 2] == ".")):
            terms.append(s[start:i])
            start = i
    terms.append(s[start:])
    names = list(desc.basis_names) + list(_ALIASES.get(desc.kind, {}))
    names.sort(key=len, reverse=True)
    coeffs = np.zeros(desc.dim)
    for term in terms:
        sign = -1.0 if term.startswith("-") else 1.0
        body = term.lstrip("+-")
        for name in names:
            if name != "1" and body.endswith(name):
                coef_txt = body[: -len(name)].rstrip("*")
                if coef_txt == "" or re.fullmatch(_NUMBER, coef_txt):
                    coeffs[desc.basis_index(name)] += sign * (float(coef_txt) if coef_txt else 1.0)
                    break
        else:
            if not re.fullmatch(_NUMBER, body):
                raise ValueError(f"cannot parse term {term!r} of {text!r} in {desc.name}")
            coeffs[0] += sign * float(body)
    return AlgebraElement(desc, coeffs)
