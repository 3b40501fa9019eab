"""Intersections of a curve Q = K = 0 with a further form, by elimination.

The (complexified) quadric is swept by a one-parameter family of lines
x(s, tau) = A(s) + tau * B(s): one ruling for smooth quadrics, the generators
for the cone.  Restricting K and F to the line through s and eliminating tau
with a Sylvester resultant leaves a univariate polynomial in s of degree
6 * deg F.  Its coefficients are recovered from values on a circle by FFT.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

from .algebra import MultiForm, evaluate_form, form_gradient, poly_roots
from .quadric import Quadric


@dataclass(frozen=True, eq=False)
class LineFamily:
    """x(s, tau) = T @ phi(s, tau) with phi linear in tau."""

    kind: str
    T: np.ndarray          # complex 4x4, maps split coordinates to user coordinates
    ms: np.ndarray         # Mobius matrix acting on (1, s)
    mu: np.ndarray         # Mobius matrix acting on (1, tau) (smooth quadrics)

    def line(self, s):
        """A(s), B(s) for an array of s values; shapes (n, 4)."""
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        s0 = self.ms[0, 0] + self.ms[0, 1] * s
        s1 = self.ms[1, 0] + self.ms[1, 1] * s
        if self.kind == "cone":
            a = np.stack([np.zeros_like(s), s0 * s0, s1 * s1, s0 * s1], axis=-1)
            b = np.zeros_like(a)
            b[:, 0] = 1.0
        else:
            u_a = self.mu[:, 0]
            u_b = self.mu[:, 1]
            a = np.stack([s0 * u_a[0], s0 * u_a[1], s1 * u_a[0], s1 * u_a[1]], axis=-1)
            b = np.stack([s0 * u_b[0], s0 * u_b[1], s1 * u_b[0], s1 * u_b[1]], axis=-1)
        return a @ self.T.T, b @ self.T.T


def _split_matrix(X: Quadric) -> np.ndarray:
    """Complex W with Y = W x satisfying Y0 Y3 - Y1 Y2 ~ Q (or Y1 Y2 - Y3^2 for the cone)."""
    N = X.normalizer.astype(complex)
    if X.kind == "cone":
        # normal form y1^2 + y2^2 - y3^2
        W = np.array([[1, 0, 0, 0],
                      [0, 1, 1j, 0],
                      [0, 1, -1j, 0],
                      [0, 0, 0, 1]], dtype=complex)
        return W @ N
    sig = {"ellipsoid": [-1, 1, 1, 1], "hyperboloid": [-1, 1, 1, -1]}[X.kind]
    Z = np.diag(np.sqrt(np.array(sig, dtype=complex)))  # z = Z y, sum z^2 = Q
    W = np.array([[1, 1j, 0, 0],
                  [0, 0, 1, 1j],
                  [0, 0, -1, 1j],
                  [1, -1j, 0, 0]], dtype=complex)
    return W @ Z @ N


def line_family(X: Quadric, seed: int = 7) -> LineFamily:
    rng = np.random.default_rng(seed)

    def mobius():
        M = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        return M / np.sqrt(abs(np.linalg.det(M)))

    W = _split_matrix(X)
    T = np.linalg.inv(W)
    T = T / np.abs(T).max()
    return LineFamily(X.kind, T, mobius(), mobius() if X.kind != "cone" else np.eye(2, dtype=complex))


def _restricted_coeffs(f: MultiForm, A, B) -> np.ndarray:
    """Coefficients in tau of f(A + tau B), ascending; shape (n, deg+1)."""
    d = f.degree
    m = d + 1
    nodes = np.exp(2j * np.pi * np.arange(m) / m)
    pts = A[:, None, :] + nodes[None, :, None] * B[:, None, :]
    vals = evaluate_form(f, pts)                      # (n, m)
    # vals[k] = sum_j c_j w^(jk), w = exp(2 pi i/m)  =>  c = fft(vals)/m
    return np.fft.fft(vals, axis=1) / m


def _sylvester(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Batched Sylvester matrices for descending-order coefficient arrays."""
    n, dp = p.shape
    dq = q.shape[1]
    deg_p, deg_q = dp - 1, dq - 1
    size = deg_p + deg_q
    S = np.zeros((n, size, size), dtype=complex)
    for i in range(deg_q):
        S[:, i, i:i + dp] = p
    for i in range(deg_p):
        S[:, deg_q + i, i:i + dq] = q
    return S


def _newton_polish(forms, x, iters: int = 6):
    """Newton on forms(x) = 0 with the affine normalisation conj(x0).x = 1."""
    x = x / np.linalg.norm(x, axis=-1, keepdims=True)
    a = x.conj()
    for _ in range(iters):
        r = np.stack([evaluate_form(f, x) for f in forms] + [np.sum(a * x, axis=-1) - 1], axis=-1)
        J = np.stack([form_gradient(f, x) for f in forms] + [a], axis=-2)
        try:
            dx = np.linalg.solve(J, r[..., None])[..., 0]
        except np.linalg.LinAlgError:
            break
        x = x - dx
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


@dataclass(frozen=True)
class Intersection:
    points: np.ndarray      # (n, 4) complex, unit norm
    resultant_tail: float   # relative size of discarded FFT coefficients


def _quality(forms, pts):
    """(max normalized residual, min pairwise projective distance)."""
    if not len(pts):
        return 0.0, 1.0
    res = max(float(np.abs(evaluate_form(f.normalized(), pts)).max()) for f in forms)
    if len(pts) < 2:
        return res, 1.0
    g = np.abs(pts.conj() @ pts.T)
    np.fill_diagonal(g, 0.0)
    return res, float(np.sqrt(max(0.0, 1 - g.max() ** 2)))


def intersect_with_form(X: Quadric, K: MultiForm, F: MultiForm,
                        family: LineFamily | None = None, nodes: int = 64,
                        polish: bool = True, retries: int = 4) -> Intersection:
    """All 6 * deg(F) complex points of {Q = 0, K = 0, F = 0}.

    When two points collapse under polishing or residuals stay large (two
    points on nearly the same line of the family), the elimination is
    repeated with fresh random families and the best result is kept.
    """
    fam = family or line_family(X)
    best = None
    for k in range(retries + 1):
        out = _intersect_once(X, K, F, fam, nodes, polish)
        if not polish:
            return out
        res, sep = _quality((X.form, K, F), out.points)
        score = (res > 1e-9) + (sep < 1e-6)
        if best is None or (score, res) < best[0]:
            best = ((score, res), out)
        if score == 0:
            break
        fam = line_family(X, seed=1000 + k)
    return best[1]


def _intersect_once(X, K, F, fam, nodes, polish) -> Intersection:
    n_expected = 2 * K.degree * F.degree
    s = np.exp(2j * np.pi * np.arange(nodes) / nodes)
    A, B = fam.line(s)
    ck = _restricted_coeffs(K, A, B)[:, ::-1]       # descending in tau
    cf = _restricted_coeffs(F, A, B)[:, ::-1]
    res = np.linalg.det(_sylvester(ck, cf))
    coeffs = np.fft.fft(res) / nodes                   # ascending powers of s
    head = coeffs[: n_expected + 1]
    tail = np.abs(coeffs[n_expected + 1:]).max() / max(np.abs(head).max(), 1e-300)
    roots = poly_roots(head)
    if len(roots) == 0:
        return Intersection(np.zeros((0, 4), complex), tail)
    A, B = fam.line(roots)
    cfr = _restricted_coeffs(F, A, B)
    pts = []
    for k in range(len(roots)):
        taus = poly_roots(cfr[k]) if np.any(np.abs(cfr[k, 1:]) > 0) else np.zeros(0)
        if len(taus) == 0:
            pts.append(B[k])
            continue
        cand = A[k][None, :] + taus[:, None] * B[k][None, :]
        cand = cand / np.linalg.norm(cand, axis=-1, keepdims=True)
        kv = np.abs(evaluate_form(K, cand))
        pts.append(cand[int(np.argmin(kv))])
    pts = np.array(pts)
    if polish:
        pts = _newton_polish([X.form, K, F], pts)
    return Intersection(pts, float(tail))


def real_representative(x, tol: float = 1e-7):
    """(is_real, real point, imaginary size) for a complex projective point."""
    x = np.asarray(x)
    k = np.argmax(np.abs(x), axis=-1)
    piv = np.take_along_axis(x, k[..., None], axis=-1)
    y = x / piv
    im = np.linalg.norm(y.imag, axis=-1)
    re = y.real / np.linalg.norm(y.real, axis=-1, keepdims=True)
    return im < tol, re, im
