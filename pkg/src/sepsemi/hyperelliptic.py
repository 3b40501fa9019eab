"""Morphisms on hyperelliptic curves y^2 = F(x) with F > 0 on the real line.

A rational function is stored as f = (a + b y) / c with a, b, c real
polynomials (ascending coefficients).  The real locus has two affine
branches y > 0 and y < 0 and two real points at infinity, written +inf
and -inf after the sign of y / x^(g+1).  For odd g each branch closes up
through its own point at infinity (two components); for even g the
upper branch at x = +inf runs into the lower branch at x = -inf (one
component).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from .models import HyperellipticCurve, ModelError
from .morphisms import MorphismError, SeparatingCertificate, TOL_IM, interlacing_positions, sample_thetas


def _trim(c, rtol=1e-11):
    c = np.atleast_1d(np.asarray(c, dtype=float))
    scale = np.max(np.abs(c)) if len(c) else 0.0
    k = len(c)
    while k > 1 and abs(c[k - 1]) <= rtol * scale:
        k -= 1
    return c[:k]


@dataclass(eq=False)
class HyperMorphism:
    H: HyperellipticCurve
    kind: str                   # "projection" or "alternating"
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    P: np.ndarray | None = None          # (n, 2) pole divisor for alternating pencils
    certificate: SeparatingCertificate | None = None
    meta: dict = field(default_factory=dict)

    @property
    def reduced(self) -> bool:
        """c divides a^2 - b^2 F, so the conjugates of the poles are not poles."""
        N = npoly.polysub(npoly.polymul(self.a, self.a),
                          npoly.polymul(npoly.polymul(self.b, self.b), self.H.F.coeffs))
        rem = npoly.polydiv(N, self.c)[1]
        return bool(np.max(np.abs(rem)) <= 1e-8 * max(1.0, np.max(np.abs(N))))

    @property
    def degree(self) -> int:
        if self.kind == "projection":
            return 2
        d = len(_trim(self.c)) - 1
        return d if self.reduced else 2 * d

    @property
    def degree_vector(self):
        c = self.certificate
        return c.degree_vector if c is not None and c.ok else None

    def __call__(self, x, y):
        x = np.asarray(x)
        return (npoly.polyval(x, self.a) + npoly.polyval(x, self.b) * y) / npoly.polyval(x, self.c)

    def derivative_x(self, x, y):
        """df/dx along the curve (dy/dx = F'/(2y))."""
        x, y = np.asarray(x), np.asarray(y)
        F = self.H.F.coeffs
        dy = npoly.polyval(x, npoly.polyder(F)) / (2 * y)
        a, b, c = (npoly.polyval(x, p) for p in (self.a, self.b, self.c))
        da, db, dc = (npoly.polyval(x, npoly.polyder(p)) if len(p) > 1 else 0 * x
                      for p in (self.a, self.b, self.c))
        num = a + b * y
        dnum = da + db * y + b * dy
        return (dnum * c - num * dc) / c ** 2

    def to_json(self) -> dict:
        out = {"kind": "hyperelliptic", "map": self.kind,
               "a": [float(v) for v in self.a], "b": [float(v) for v in self.b],
               "c": [float(v) for v in self.c], "degree": self.degree}
        if self.P is not None:
            out["P"] = [[float(v) for v in p] for p in self.P]
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        return out


def projection(H: HyperellipticCurve) -> HyperMorphism:
    """The hyperelliptic projection (x, y) -> x."""
    return HyperMorphism(H, "projection", np.array([0.0, 1.0]), np.array([0.0]), np.array([1.0]))


def alternating_divisor(H: HyperellipticCurve, xs=None) -> np.ndarray:
    """Points (x_i, y_i), i = 1..g+1, with sign(y_i) = (-1)^i."""
    if xs is None:
        xs = np.array(H.spread, dtype=float)
        if len(xs) != H.g + 1:
            # real parts of the conjugate root pairs of F
            xs = np.unique(np.round(np.roots(H.F.coeffs[::-1]).real, 9))
        if len(xs) != H.g + 1:
            xs = np.arange(H.g + 1) - H.g / 2
    xs = np.sort(np.asarray(xs, dtype=float))
    signs = np.array([(-1) ** (i + 1) for i in range(len(xs))], dtype=float)
    return np.stack([xs, signs * np.sqrt(H.F(xs))], axis=1)


def hyper_pencil_from_divisor(H: HyperellipticCurve, P) -> HyperMorphism:
    """The pencil |P| for n = g + 1 real points, as f = (a + y) / c.

    c = prod (x - x_i) gives the poles; a interpolates the y_i so that the
    numerator vanishes at the conjugates (x_i, -y_i).  Since deg a <= g and
    deg c = g + 1, f stays finite at both points at infinity.
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    g = H.g
    if len(P) != g + 1:
        raise MorphismError(f"need g + 1 = {g + 1} points, got {len(P)}")
    xs, ys = P[:, 0], P[:, 1]
    if len(np.unique(np.round(xs, 12))) != len(xs):
        raise MorphismError("repeated x-values: the divisor is not reduced")
    if np.max(np.abs(ys ** 2 - H.F(xs))) > 1e-8 * max(1.0, np.max(ys ** 2)):
        raise MorphismError("points are not on the curve")
    V = np.vander(xs, g + 1, increasing=True)
    if np.linalg.cond(V) > 1e12:
        raise MorphismError("interpolation system is rank-deficient")
    a = np.linalg.solve(V, ys)
    c = np.array([1.0])
    for x in xs:
        c = npoly.polymul(c, [-x, 1.0])
    return HyperMorphism(H, "alternating", a, np.array([1.0]), c, P.copy())


# ---------------------------------------------------------------------------
# fibers


@dataclass(eq=False)
class HyperFiber:
    theta: float
    x: np.ndarray               # complex x of the finite points
    y: np.ndarray               # y of the finite points (complex)
    n_infinite: int             # points at infinity (+inf or -inf)
    infinity_sign: int          # sign of y / x^(g+1) at those points
    real: np.ndarray
    components: np.ndarray
    positions: np.ndarray
    max_im: float
    min_im: float
    min_sep: float

    @property
    def t(self) -> float:
        return float(np.tan(self.theta)) if abs(np.cos(self.theta)) > 1e-15 else float("inf")

    @property
    def degree(self) -> int:
        return len(self.x) + self.n_infinite

    @property
    def all_real(self) -> bool:
        return bool(np.all(self.real))

    def counts(self, r: int) -> tuple:
        return tuple(int(np.sum(self.components == k)) for k in range(1, r + 1))

    def real_xy(self):
        m = self.real[: len(self.x)]
        return self.x[m].real, self.y[m].real

    def to_json(self) -> dict:
        return {"theta": round(float(self.theta), 12), "all_real": self.all_real,
                "n_infinite": self.n_infinite,
                "components": [int(c) for c in self.components],
                "positions": [round(float(p), 6) for p in self.positions]}


def arc_position(H: HyperellipticCurve, x, y) -> tuple:
    """(component, cyclic position in [0, 1)) of real affine points."""
    x = np.asarray(x, dtype=float)
    up = np.asarray(y, dtype=float) > 0
    ang = np.arctan(x)
    if H.g % 2:
        return np.where(up, 1, 2), (ang + np.pi / 2) / np.pi % 1.0
    return np.ones(len(x), int), np.where(up, ang, np.pi + ang) % (2 * np.pi) / (2 * np.pi)


def infinity_position(H: HyperellipticCurve, sign: int) -> tuple:
    if H.g % 2:
        return (1 if sign > 0 else 2), 0.0
    return 1, 0.25 if sign > 0 else 0.75


def hyper_fiber_at(f: HyperMorphism, theta: float, tol_im: float = TOL_IM) -> HyperFiber:
    """Fiber of f over tan(theta); theta = pi/2 is the pole divisor."""
    H = f.H
    F = H.F.coeffs
    s, k = np.sin(theta), np.cos(theta)
    if f.kind == "projection":
        if abs(k) < 1e-15:
            return _assemble(H, theta, np.zeros(0), np.zeros(0), 2, 0, tol_im)
        x0 = s / k
        yv = np.sqrt(H.F(x0))
        return _assemble(H, theta, np.array([x0, x0], complex), np.array([yv, -yv], complex), 0, 0, tol_im)
    if abs(k) < 1e-15:
        return _assemble(H, theta, f.P[:, 0].astype(complex), f.P[:, 1].astype(complex), 0, 0, tol_im)
    # b y = t c - a with b = 1, squared: (t c - a)^2 - F = c h_t
    t = s / k
    lin = npoly.polysub(t * f.c, f.a)
    E = npoly.polysub(npoly.polymul(lin, lin), F)
    nominal = f.degree
    h = npoly.polydiv(E, f.c)[0] if nominal < 2 * (len(f.c) - 1) else E
    h = np.concatenate([h, np.zeros(max(0, nominal + 1 - len(h)))])[: nominal + 1]
    ht = _trim(h, 1e-10)
    n_inf = nominal - (len(ht) - 1)
    x = _polish(ht, npoly.polyroots(ht)) if len(ht) > 1 else np.zeros(0, complex)
    y = npoly.polyval(x, lin)
    return _assemble(H, theta, x.astype(complex), y.astype(complex), n_inf, int(np.sign(t)), tol_im)


def _polish(h, x, iters: int = 3):
    dh = npoly.polyder(h)
    x = x.astype(complex)
    for _ in range(iters):
        d = npoly.polyval(x, dh)
        ok = np.abs(d) > 1e-300
        x = np.where(ok, x - npoly.polyval(x, h) / np.where(ok, d, 1), x)
    return x


def _assemble(H, theta, x, y, n_inf, inf_sign, tol_im):
    rel = np.abs(x.imag) / (1 + np.abs(x))
    real = np.concatenate([rel < tol_im, np.ones(n_inf, bool)])
    comps, pos = arc_position(H, x.real, y.real)
    comps, pos = list(comps), list(pos)
    if n_inf == 2:                      # projection at t = infinity
        for sgn in (1, -1):
            c, p = infinity_position(H, sgn)
            comps.append(c)
            pos.append(p)
    else:
        for _ in range(n_inf):
            c, p = infinity_position(H, inf_sign)
            comps.append(c)
            pos.append(p)
    comps = np.array(comps, dtype=int)[real]
    pos = np.array(pos, dtype=float)[real]
    max_im = float(rel[rel < tol_im].max()) if np.any(rel < tol_im) else 0.0
    min_im = float(rel[rel >= tol_im].min()) if np.any(rel >= tol_im) else float("inf")
    min_sep = float("inf")
    if len(pos) > 1:
        for kk in set(comps.tolist()):
            q = np.sort(pos[comps == kk])
            if len(q) > 1:
                gaps = np.diff(np.append(q, q[0] + 1))
                min_sep = min(min_sep, float(gaps.min()))
    return HyperFiber(float(theta), x, y, n_inf, inf_sign, real, comps, pos, max_im, min_im, min_sep)


def hyper_certificate(f: HyperMorphism, n_samples: int = 200, tol_im: float = TOL_IM):
    """Sampling certificate; returns (degree vector or None, certificate)."""
    r = f.H.r
    counts = None
    max_im, min_im, min_sep = 0.0, float("inf"), float("inf")
    witness, reason = None, ""
    for th in sample_thetas(n_samples):
        fb = hyper_fiber_at(f, th, tol_im)
        max_im = max(max_im, fb.max_im)
        min_im = min(min_im, fb.min_im)
        min_sep = min(min_sep, fb.min_sep)
        if fb.degree != f.degree:
            witness, reason = th, f"fiber has {fb.degree} points, expected {f.degree}"
            break
        if not fb.all_real:
            witness, reason = th, "fiber contains a pair of conjugate points"
            break
        if fb.min_sep < 1e-9:
            witness, reason = th, "fiber has a double point"
            break
        c = fb.counts(r)
        if counts is None:
            counts = c
        elif c != counts:
            witness, reason = th, f"component counts changed from {counts} to {c}"
            break
    ok = witness is None
    cert = SeparatingCertificate(ok, n_samples, counts if ok else None, max_im, min_im,
                                 min_sep, None if ok else float(witness), reason)
    f.certificate = cert
    return (counts if ok else None), cert


def hyper_interlacing(A: HyperFiber, B: HyperFiber, r: int) -> bool:
    if not (A.all_real and B.all_real):
        raise MorphismError("both fibers must be all-real")
    return interlacing_positions(list(zip(A.components, A.positions)),
                                 list(zip(B.components, B.positions)), r)


# ---------------------------------------------------------------------------
# Abel sums


def abel_sum_residual(f: HyperMorphism, theta: float, q, fiber: HyperFiber | None = None) -> tuple:
    """(|sum_j q(x_j) / (y_j f'(x_j))|, sum of absolute terms) over the fiber at theta.

    The sum is the derivative in t of the Abel sum of q dx / y over the
    fiber, which is constant along a pencil.
    """
    fb = hyper_fiber_at(f, theta) if fiber is None else fiber
    if fb.n_infinite:
        raise MorphismError("fiber must be affine")
    x, y = fb.x, fb.y
    d = f.derivative_x(x, y)
    if np.min(np.abs(d)) < 1e-12:
        raise MorphismError("critical fiber")
    terms = npoly.polyval(x, np.atleast_1d(np.asarray(q, dtype=float))) / (y * d)
    return float(abs(terms.sum())), float(np.abs(terms).sum())


def q_basis(g: int) -> list:
    return [np.eye(g)[i] for i in range(g)]


def realize_hyper(H: HyperellipticCurve, n_samples: int = 200):
    """Projection and alternating pencil, both certified. Returns (proj, alt)."""
    if not isinstance(H, HyperellipticCurve):
        raise ModelError("expected a hyperelliptic curve")
    p = projection(H)
    hyper_certificate(p, n_samples)
    alt = hyper_pencil_from_divisor(H, alternating_divisor(H))
    hyper_certificate(alt, n_samples)
    return p, alt


# ---------------------------------------------------------------------------
# chess-board coloring of the affine (x, y) plane


@dataclass(eq=False)
class AffineColoring:
    xs: np.ndarray
    ys: np.ndarray
    color: np.ndarray           # (nx, ny) +-1 at grid vertices
    violations: int
    edges_checked: int

    def to_grid(self, x, y):
        gx = (np.asarray(x, dtype=float) - self.xs[0]) / (self.xs[1] - self.xs[0])
        gy = np.interp(y, self.ys, np.arange(len(self.ys)))
        return gx, gy

    def y_spacing(self, y):
        return np.interp(y, self.ys[:-1], np.diff(self.ys))

    def color_at_grid(self, gx, gy):
        i = np.clip(np.rint(gx).astype(int), 0, len(self.xs) - 1)
        j = np.clip(np.rint(gy).astype(int), 0, len(self.ys) - 1)
        return self.color[i, j]


def affine_chessboard(H: HyperellipticCurve, xrange, ymax: float, n: int = 400,
                      fine: float = 0.01, nx: int | None = None) -> AffineColoring:
    """Two-coloring of grid vertices by crossing parity with the real curve.

    The grid is uniform in x over ``xrange`` and graded in y (spacing about
    ``fine`` near y = 0, reaching +-ymax), since |y| ranges over orders of
    magnitude along the curve.  By default the x spacing resolves the
    narrowest bend of the branches.
    Crossings are counted from the branch values +-sqrt(F(x)) on vertical
    edges and from the real roots of F(x) = y^2 on horizontal edges.
    """
    from scipy.optimize import brentq
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components

    x0, x1 = xrange
    if nx is None:
        # sqrt(F) changes by its own size over 2 F / |F'|
        xx = np.linspace(x0, x1, 4000)
        dF = np.abs(npoly.polyval(xx, npoly.polyder(H.F.coeffs)))
        width = np.min(2 * H.F(xx) / np.maximum(dF, 1e-300))
        nx = int(min(max(n, 4 * (x1 - x0) / width), 20000))
    xs = np.linspace(x0, x1, nx)
    ratio = fine * n / (2 * ymax)
    if ratio >= 1:
        ys = np.linspace(-ymax, ymax, n)
    else:
        # y = s sinh(u): spacing s * 2A / n near 0, s sinh(A) = ymax
        A = brentq(lambda A: A / np.sinh(A) - ratio, 1e-9, 200)
        ys = ymax * np.sinh(np.linspace(-A, A, n)) / np.sinh(A)
    ny = len(ys)
    root = np.sqrt(H.F(xs))
    lo, hi = ys[:-1][None, :], ys[1:][None, :]
    vflip = (((lo < root[:, None]) & (root[:, None] <= hi)).astype(int)
             + ((lo < -root[:, None]) & (-root[:, None] <= hi)).astype(int)) % 2      # (nx, ny-1)
    hflip = np.zeros((nx - 1, ny), int)
    F = H.F.coeffs
    for j, y in enumerate(ys):
        r = npoly.polyroots(npoly.polysub(F, [y * y]))
        r = np.sort(r[np.abs(r.imag) < 1e-9].real)
        cnt = np.searchsorted(r, xs[1:], side="right") - np.searchsorted(r, xs[:-1], side="right")
        hflip[:, j] = cnt % 2
    idx = np.arange(nx * ny).reshape(nx, ny)
    e_a = np.concatenate([idx[:, :-1].ravel(), idx[:-1, :].ravel()])
    e_b = np.concatenate([idx[:, 1:].ravel(), idx[1:, :].ravel()])
    flips = np.concatenate([vflip.ravel(), hflip.ravel()]).astype(bool)
    keep = ~flips
    G = coo_matrix((np.ones(keep.sum()), (e_a[keep], e_b[keep])), shape=(nx * ny, nx * ny))
    n_reg, region = connected_components(G, directed=False)
    # two-color the region adjacency graph through the crossing edges
    ra, rb = region[e_a[flips]], region[e_b[flips]]
    adj = {}
    for u, v in set(zip(ra.tolist(), rb.tolist())):
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    rc = np.zeros(n_reg, int)
    for start in range(n_reg):
        if rc[start]:
            continue
        rc[start] = 1
        stack = [start]
        while stack:
            u = stack.pop()
            for v in adj.get(u, ()):
                if not rc[v]:
                    rc[v] = -rc[u]
                    stack.append(v)
    col = rc[region]
    viol = int(np.sum((col[e_a] != col[e_b]) != flips))
    return AffineColoring(xs, ys, col.reshape(nx, ny), viol, len(e_a))


def chart_d_orientation(H: HyperellipticCurve, col: AffineColoring, x, y, dx, offset: float = 2.0):
    """Orientation sign from the color on the left of the motion (x, y) + s (dx, dy)."""
    x, y, dx = (np.asarray(v, dtype=float) for v in (x, y, dx))
    dy = npoly.polyval(x, npoly.polyder(H.F.coeffs)) * dx / (2 * y)
    gx, gy = col.to_grid(x, y)
    tx = dx / (col.xs[1] - col.xs[0])
    ty = dy / col.y_spacing(y)
    nrm = np.hypot(tx, ty)
    return col.color_at_grid(gx - offset * ty / nrm, gy + offset * tx / nrm)
