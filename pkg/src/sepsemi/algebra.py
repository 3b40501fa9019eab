"""Homogeneous forms in four variables and univariate root solving.

Monomials of a degree-d form are stored in the order produced by
``itertools.combinations_with_replacement(range(4), d)``, i.e. graded
lexicographic with x0 first: for d = 2 the order is
x0^2, x0x1, x0x2, x0x3, x1^2, x1x2, x1x3, x2^2, x2x3, x3^2.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MONOMIAL_ORDER = "grlex x0<x1<x2<x3"


@lru_cache(maxsize=None)
def monomials(degree: int) -> tuple[tuple[int, int, int, int], ...]:
    """Exponent vectors of all degree-``degree`` monomials in x0..x3."""
    out = []
    for idx in itertools.combinations_with_replacement(range(4), degree):
        e = [0, 0, 0, 0]
        for i in idx:
            e[i] += 1
        out.append(tuple(e))
    return tuple(out)


@lru_cache(maxsize=None)
def _exponents(degree: int) -> np.ndarray:
    return np.array(monomials(degree), dtype=int).reshape(-1, 4)


@lru_cache(maxsize=None)
def _index(degree: int) -> dict:
    return {e: k for k, e in enumerate(monomials(degree))}


def _powers(p: np.ndarray, degree: int) -> np.ndarray:
    # p[..., i]**k for k = 0..degree, shape (..., 4, degree+1)
    pw = np.ones(p.shape + (degree + 1,), dtype=p.dtype)
    for k in range(1, degree + 1):
        pw[..., k] = pw[..., k - 1] * p
    return pw


def monomial_values(p, degree: int) -> np.ndarray:
    """Values of every degree-``degree`` monomial at points ``p[..., 4]``."""
    p = np.asarray(p)
    if not np.iscomplexobj(p):
        p = p.astype(float)
    E = _exponents(degree)
    pw = _powers(p, degree)
    vals = np.ones(p.shape[:-1] + (len(E),), dtype=p.dtype)
    for i in range(4):
        vals = vals * pw[..., i, :][..., E[:, i]]
    return vals


@dataclass(frozen=True, eq=False)
class MultiForm:
    """A homogeneous polynomial of degree 1, 2 or 3 in x0..x3."""

    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).reshape(-1)
        if len(c) != len(monomials(self.degree)):
            raise ValueError(
                f"degree {self.degree} form needs {len(monomials(self.degree))} "
                f"coefficients, got {len(c)}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    # construction ---------------------------------------------------------
    @classmethod
    def from_terms(cls, degree: int, terms: dict) -> "MultiForm":
        idx = _index(degree)
        c = np.zeros(len(idx))
        for e, v in terms.items():
            c[idx[tuple(e)]] += v
        return cls(degree, c)

    @classmethod
    def linear(cls, a) -> "MultiForm":
        return cls(1, np.asarray(a, dtype=float))

    @classmethod
    def variable(cls, i: int) -> "MultiForm":
        a = np.zeros(4)
        a[i] = 1.0
        return cls(1, a)

    @classmethod
    def quadratic(cls, matrix) -> "MultiForm":
        """The form x^T M x for a (symmetrised) 4x4 matrix."""
        M = np.asarray(matrix, dtype=float)
        M = (M + M.T) / 2
        terms = {}
        for i in range(4):
            for j in range(4):
                e = [0, 0, 0, 0]
                e[i] += 1
                e[j] += 1
                terms[tuple(e)] = terms.get(tuple(e), 0.0) + M[i, j]
        return cls.from_terms(2, terms)

    def terms(self) -> dict:
        return {e: float(c) for e, c in zip(monomials(self.degree), self.coeffs) if c != 0}

    def to_matrix(self) -> np.ndarray:
        if self.degree != 2:
            raise ValueError("only quadratic forms have a Gram matrix")
        M = np.zeros((4, 4))
        for e, c in zip(monomials(2), self.coeffs):
            i, j = [k for k in range(4) for _ in range(e[k])]
            if i == j:
                M[i, i] = c
            else:
                M[i, j] = M[j, i] = c / 2
        return M

    # arithmetic -----------------------------------------------------------
    def __mul__(self, other):
        if isinstance(other, MultiForm):
            deg = self.degree + other.degree
            terms: dict = {}
            for e1, c1 in zip(monomials(self.degree), self.coeffs):
                if c1 == 0:
                    continue
                for e2, c2 in zip(monomials(other.degree), other.coeffs):
                    if c2 == 0:
                        continue
                    e = tuple(a + b for a, b in zip(e1, e2))
                    terms[e] = terms.get(e, 0.0) + c1 * c2
            return MultiForm.from_terms(deg, terms)
        return MultiForm(self.degree, self.coeffs * float(other))

    __rmul__ = __mul__

    def __add__(self, other: "MultiForm") -> "MultiForm":
        if other.degree != self.degree:
            raise ValueError("cannot add forms of different degree")
        return MultiForm(self.degree, self.coeffs + other.coeffs)

    def __sub__(self, other: "MultiForm") -> "MultiForm":
        return self + (-1.0) * other

    def __neg__(self):
        return (-1.0) * self

    def __repr__(self):
        return f"MultiForm(degree={self.degree}, coeffs={self.coeffs.tolist()})"

    # evaluation -----------------------------------------------------------
    def __call__(self, p):
        return evaluate_form(self, p)

    def gradient(self, p):
        return form_gradient(self, p)

    def derivative(self, i: int) -> "MultiForm":
        """Partial derivative d/dx_i as a form of degree one less."""
        if self.degree == 0:
            return MultiForm(0, [0.0])
        terms = {}
        for e, c in zip(monomials(self.degree), self.coeffs):
            if e[i] and c:
                e2 = list(e)
                e2[i] -= 1
                terms[tuple(e2)] = terms.get(tuple(e2), 0.0) + e[i] * c
        return MultiForm.from_terms(self.degree - 1, terms)

    def hessian(self, p):
        """Second derivatives at p; shape (..., 4, 4)."""
        rows = [form_gradient(self.derivative(i), p) if self.degree >= 2
                else np.zeros(np.shape(p)) for i in range(4)]
        return np.stack(rows, axis=-2)

    def transform(self, M) -> "MultiForm":
        """The form x -> f(M x)."""
        M = np.asarray(M, dtype=float)
        rows = [MultiForm.linear(M[i]) for i in range(4)]
        out = MultiForm(self.degree, np.zeros(len(self.coeffs)))
        for e, c in zip(monomials(self.degree), self.coeffs):
            if c == 0:
                continue
            term = None
            for i in range(4):
                for _ in range(e[i]):
                    term = rows[i] if term is None else term * rows[i]
            out = out + c * term
        return out

    def normalized(self) -> "MultiForm":
        n = np.linalg.norm(self.coeffs)
        if n == 0:
            raise ValueError("zero form")
        return MultiForm(self.degree, self.coeffs / n)

    def to_json(self) -> dict:
        return {"degree": self.degree, "coeffs": [float(c) for c in self.coeffs],
                "order": MONOMIAL_ORDER}

    @classmethod
    def from_json(cls, d) -> "MultiForm":
        if isinstance(d, dict):
            coeffs = d["coeffs"]
            degree = d.get("degree")
        else:
            coeffs, degree = d, None
        if degree is None:
            degree = {1: 0, 4: 1, 10: 2, 20: 3}[len(coeffs)]
        return cls(int(degree), coeffs)


def evaluate_form(f: MultiForm, p):
    """Value of ``f`` at ``p`` (shape (..., 4), real or complex)."""
    p = np.asarray(p)
    if p.shape[-1] != 4:
        raise ValueError("points must have 4 homogeneous coordinates")
    if p.ndim == 1 and not np.any(p):
        raise ValueError("zero vector is not a projective point")
    return monomial_values(p, f.degree) @ f.coeffs


@lru_cache(maxsize=None)
def _derivative_tables(degree: int):
    # For d/dx_i: coefficient multiplier and target index in degree-1 monomials.
    src = monomials(degree)
    tgt = _index(degree - 1) if degree > 1 else {(0, 0, 0, 0): 0}
    tables = []
    for i in range(4):
        mult, where, origin = [], [], []
        for k, e in enumerate(src):
            if e[i] == 0:
                continue
            e2 = list(e)
            e2[i] -= 1
            mult.append(e[i])
            where.append(tgt[tuple(e2)])
            origin.append(k)
        tables.append((np.array(mult, float), np.array(where, int), np.array(origin, int)))
    return tables


def form_gradient(f: MultiForm, p):
    """The four partial derivatives of ``f`` at ``p``; shape (..., 4)."""
    p = np.asarray(p)
    if f.degree == 0:
        return np.zeros(p.shape, dtype=complex if np.iscomplexobj(p) else float)
    if f.degree == 1:
        g = np.broadcast_to(f.coeffs, p.shape).astype(p.dtype if np.iscomplexobj(p) else float)
        return g.copy()
    vals = monomial_values(p, f.degree - 1)
    out = []
    for mult, where, origin in _derivative_tables(f.degree):
        c = np.zeros(len(monomials(f.degree - 1)))
        np.add.at(c, where, mult * f.coeffs[origin])
        out.append(vals @ c)
    return np.stack(out, axis=-1)


# ---------------------------------------------------------------------------
# univariate polynomials


@dataclass(frozen=True, eq=False)
class UniPoly:
    """Univariate polynomial, coefficients in ascending degree."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.array(self.coeffs))
        if not np.iscomplexobj(c):
            c = c.astype(float)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        nz = np.nonzero(self.coeffs)[0]
        return int(nz[-1]) if len(nz) else -1

    def trimmed(self, rtol: float = 0.0) -> "UniPoly":
        c = self.coeffs
        scale = np.max(np.abs(c)) if len(c) else 0.0
        n = len(c)
        while n > 1 and abs(c[n - 1]) <= rtol * scale:
            n -= 1
        return UniPoly(c[:n])

    def __call__(self, t):
        return np.polynomial.polynomial.polyval(t, self.coeffs)

    def __mul__(self, other: "UniPoly") -> "UniPoly":
        return UniPoly(np.convolve(self.coeffs, other.coeffs))

    def __add__(self, other: "UniPoly") -> "UniPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = np.zeros(n, dtype=np.result_type(self.coeffs, other.coeffs))
        a[: len(self.coeffs)] += self.coeffs
        a[: len(other.coeffs)] += other.coeffs
        return UniPoly(a)

    def __repr__(self):
        return f"UniPoly({self.coeffs.tolist()})"


@dataclass(frozen=True)
class RootPartition:
    real: np.ndarray
    pairs: list  # list of (z, conj z) with Im z > 0

    @property
    def all_roots(self) -> np.ndarray:
        extra = [z for pair in self.pairs for z in pair]
        return np.concatenate([self.real.astype(complex), np.array(extra, dtype=complex)])


def poly_roots(coeffs) -> np.ndarray:
    """All complex roots of an ascending-coefficient polynomial.

    Companion-matrix eigenvalues followed by one Newton step per root.
    """
    c = np.atleast_1d(np.asarray(coeffs))
    nz = np.nonzero(c)[0]
    if len(nz) == 0:
        raise ValueError("zero polynomial")
    c = c[: nz[-1] + 1]
    if len(c) == 1:
        return np.zeros(0, dtype=complex)
    lead = c[-1]
    n = len(c) - 1
    comp = np.zeros((n, n), dtype=complex)
    comp[1:, :-1] = np.eye(n - 1)
    comp[:, -1] = -c[:-1] / lead
    z = np.linalg.eigvals(comp)
    if not np.all(np.isfinite(z)):
        raise np.linalg.LinAlgError("eigenvalue solve did not converge")
    dc = np.polynomial.polynomial.polyder(c)
    pv = np.polynomial.polynomial.polyval(z, c)
    dv = np.polynomial.polynomial.polyval(z, dc)
    ok = np.abs(dv) > 1e-300
    step = np.zeros_like(z)
    step[ok] = pv[ok] / dv[ok]
    # keep the polish only where it does not move the root far
    small = np.abs(step) < 1e-3 * (1 + np.abs(z))
    z = np.where(small, z - step, z)
    return z


def univariate_roots(p, tol_im: float = 1e-7) -> RootPartition:
    """Split the roots of a real polynomial into real roots and conjugate pairs."""
    c = p.coeffs if isinstance(p, UniPoly) else np.asarray(p)
    nz = np.nonzero(c)[0]
    if len(nz) == 0:
        raise ValueError("zero polynomial")
    if nz[-1] < 1:
        raise ValueError("polynomial must have degree >= 1")
    z = poly_roots(c)
    is_real = np.abs(z.imag) < tol_im * (1 + np.abs(z))
    real = np.sort(z[is_real].real)
    rest = list(z[~is_real])
    pairs = []
    upper = sorted([w for w in rest if w.imag > 0], key=lambda w: (w.real, w.imag))
    lower = [w for w in rest if w.imag <= 0]
    for w in upper:
        if lower:
            k = int(np.argmin([abs(w.conjugate() - v) for v in lower]))
            lower.pop(k)
        pairs.append((complex(w), complex(w.conjugate())))
    # unmatched lower-half roots only happen for complex-coefficient input
    for v in lower:
        pairs.append((complex(v.conjugate()), complex(v)))
    return RootPartition(real, pairs)


def restrict_to_curve(f: MultiForm, gamma) -> UniPoly:
    """Compose ``f`` with a parametrised curve given by four UniPolys."""
    gamma = [g if isinstance(g, UniPoly) else UniPoly(g) for g in gamma]
    if len(gamma) != 4:
        raise ValueError("curve needs four coordinate polynomials")
    k = max(g.degree for g in gamma)
    if k < 0:
        raise ValueError("all four components vanish identically")
    if k >= 1 and _have_common_root(gamma):
        raise ValueError("parametrisation components share a common root")
    n = f.degree * max(k, 0) + 1
    dtype = complex if any(np.iscomplexobj(g.coeffs) for g in gamma) else float
    # powers of each component
    pw = []
    for g in gamma:
        row = [np.ones(1, dtype=dtype)]
        for _ in range(f.degree):
            row.append(np.convolve(row[-1], g.coeffs))
        pw.append(row)
    out = np.zeros(n, dtype=dtype)
    for e, c in zip(monomials(f.degree), f.coeffs):
        if c == 0:
            continue
        term = np.ones(1, dtype=dtype)
        for i in range(4):
            if e[i]:
                term = np.convolve(term, pw[i][e[i]])
        out[: len(term)] += c * term[:n]
    return UniPoly(out)


def _have_common_root(gamma) -> bool:
    nonconst = [g for g in gamma if g.degree >= 1]
    if len(nonconst) < sum(1 for g in gamma if g.degree >= 0):
        return False  # a nonzero constant component never vanishes
    base = min(nonconst, key=lambda g: g.degree)
    for r in poly_roots(base.coeffs):
        vals = [abs(g(r)) / (1 + np.max(np.abs(g.coeffs))) for g in gamma]
        if max(vals) < 1e-9:
            return True
    return False


def generalized_cross(a, b, c) -> np.ndarray:
    """Vector orthogonal to a, b, c in 4-space (cofactor expansion); batched."""
    M = np.stack([np.asarray(a), np.asarray(b), np.asarray(c)], axis=-2)
    out = []
    for i in range(4):
        cols = [j for j in range(4) if j != i]
        out.append((-1) ** i * np.linalg.det(M[..., cols]))
    return np.stack(out, axis=-1)
