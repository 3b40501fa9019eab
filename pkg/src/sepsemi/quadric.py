"""The ambient quadric: classification, global chart, real lines, H_1 arithmetic.

Normal forms (coordinates y = normalizer @ x):

* ellipsoid    -y0^2 + y1^2 + y2^2 + y3^2
* hyperboloid  -y0^2 + y1^2 + y2^2 - y3^2
* cone          y1^2 + y2^2 - y3^2          (apex y = (1, 0, 0, 0))

Charts (all in normal coordinates):

* ellipsoid: y = (1, sin v cos u, sin v sin u, cos v), u in [0, 2pi), v in [0, pi].
  Seams: u = 0 ~ 2pi; the poles v = 0, pi.
* hyperboloid: with alpha = (u + v)/2, beta = (u - v)/2,
  y = (cos beta, cos alpha, sin alpha, sin beta).  (u, v) is a torus
  [0, 2pi)^2.  The loops v = const are lines of ruling A (class a = (1, 0)),
  u = const lines of ruling B (class b = (0, 1)).  The section y3 = 0 is the
  diagonal u = v (class a + b), y2 = 0 the antidiagonal (class a - b).
* cone: y = (sin v, cos v cos u, cos v sin u, cos v), v in (-pi/2, pi/2);
  v = +-pi/2 is the apex.  u is the generator angle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import MultiForm

KINDS = ("ellipsoid", "hyperboloid", "cone")

NORMAL_FORMS = {
    "ellipsoid": np.diag([-1.0, 1.0, 1.0, 1.0]),
    "hyperboloid": np.diag([-1.0, 1.0, 1.0, -1.0]),
    "cone": np.diag([0.0, 1.0, 1.0, -1.0]),
}

SURFACE_TOL = 1e-8


class NotASurfaceError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Quadric:
    matrix: np.ndarray
    kind: str
    normalizer: np.ndarray

    @property
    def form(self) -> MultiForm:
        return MultiForm.quadratic(self.matrix)

    @property
    def inverse_normalizer(self) -> np.ndarray:
        return np.linalg.inv(self.normalizer)

    def to_normal(self, x) -> np.ndarray:
        return np.asarray(x) @ self.normalizer.T

    def from_normal(self, y) -> np.ndarray:
        return np.asarray(y) @ self.inverse_normalizer.T

    def residual(self, x) -> np.ndarray:
        """|Q| at unit-normalised normal coordinates of x."""
        y = self.to_normal(x)
        y = y / np.linalg.norm(y, axis=-1, keepdims=True)
        return np.abs(np.einsum("...i,ij,...j->...", y, NORMAL_FORMS[self.kind], y))

    @property
    def apex(self):
        if self.kind != "cone":
            return None
        return self.from_normal(np.array([1.0, 0, 0, 0]))

    def to_json(self) -> dict:
        return {"matrix": self.matrix.tolist(), "kind": self.kind}

    @classmethod
    def from_json(cls, d) -> "Quadric":
        return classify_quadric(np.array(d["matrix"], dtype=float))


def classify_quadric(M, rtol: float = 1e-9) -> Quadric:
    M = np.asarray(M, dtype=float)
    if M.shape != (4, 4):
        raise ValueError("quadric matrix must be 4x4")
    if not np.allclose(M, M.T, atol=1e-12 * max(1.0, np.abs(M).max())):
        raise ValueError("quadric matrix must be symmetric")
    if not np.any(M):
        raise ValueError("zero matrix")
    lam, V = np.linalg.eigh(M)
    tol = rtol * np.abs(lam).max()
    pos = [k for k in range(4) if lam[k] > tol]
    neg = [k for k in range(4) if lam[k] < -tol]
    zero = [k for k in range(4) if abs(lam[k]) <= tol]
    if len(neg) > len(pos):
        pos, neg = neg, pos
    sig = (len(pos), len(neg))
    if sig == (3, 1):
        kind, order = "ellipsoid", [neg[0], pos[0], pos[1], pos[2]]
    elif sig == (2, 2):
        kind, order = "hyperboloid", [neg[0], pos[0], pos[1], neg[1]]
    elif sig == (2, 1) and len(zero) == 1:
        kind, order = "cone", [zero[0], pos[0], pos[1], neg[0]]
    else:
        raise NotASurfaceError(f"real locus not a surface (signature {sig}, rank {4 - len(zero)})")
    N = np.zeros((4, 4))
    for row, k in enumerate(order):
        s = np.sqrt(abs(lam[k])) if k not in zero else 1.0
        N[row] = s * V[:, k]
    return Quadric(M.copy(), kind, N)


def normal_quadric(kind: str) -> Quadric:
    return classify_quadric(NORMAL_FORMS[kind])


# ---------------------------------------------------------------------------
# charts


@dataclass(frozen=True, eq=False)
class Chart:
    quadric: Quadric

    @property
    def kind(self) -> str:
        return self.quadric.kind

    @property
    def domain(self) -> tuple:
        if self.kind == "ellipsoid":
            return (0.0, 2 * np.pi), (0.0, np.pi)
        if self.kind == "hyperboloid":
            return (0.0, 2 * np.pi), (0.0, 2 * np.pi)
        return (0.0, 2 * np.pi), (-np.pi / 2, np.pi / 2)

    @property
    def periodic_v(self) -> bool:
        return self.kind == "hyperboloid"

    @property
    def apex_v(self):
        return (-np.pi / 2, np.pi / 2) if self.kind == "cone" else None

    def normal_point(self, u, v) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        if self.kind == "ellipsoid":
            y = [np.ones_like(u), np.sin(v) * np.cos(u), np.sin(v) * np.sin(u), np.cos(v)]
        elif self.kind == "hyperboloid":
            a, b = (u + v) / 2, (u - v) / 2
            y = [np.cos(b), np.cos(a), np.sin(a), np.sin(b)]
        else:
            y = [np.sin(v), np.cos(v) * np.cos(u), np.cos(v) * np.sin(u), np.cos(v)]
        y = np.stack(np.broadcast_arrays(*y), axis=-1)
        return y / np.linalg.norm(y, axis=-1, keepdims=True)

    def __call__(self, u, v) -> np.ndarray:
        x = self.quadric.from_normal(self.normal_point(u, v))
        return x / np.linalg.norm(x, axis=-1, keepdims=True)

    def coords(self, x) -> np.ndarray:
        """Chart coordinates (u, v) of points x (user coordinates); shape (..., 2)."""
        y = self.quadric.to_normal(np.asarray(x, dtype=float))
        two_pi = 2 * np.pi
        if self.kind == "ellipsoid":
            y = y / y[..., :1]
            u = np.mod(np.arctan2(y[..., 2], y[..., 1]), two_pi)
            r = np.linalg.norm(y[..., 1:], axis=-1)
            v = np.arccos(np.clip(y[..., 3] / r, -1, 1))
        elif self.kind == "hyperboloid":
            a = np.arctan2(y[..., 2], y[..., 1])
            b = np.arctan2(y[..., 3], y[..., 0])
            u = np.mod(a + b, two_pi)
            v = np.mod(a - b, two_pi)
        else:
            s = np.where(y[..., 3] >= 0, 1.0, -1.0)
            u = np.mod(np.arctan2(s * y[..., 2], s * y[..., 1]), two_pi)
            v = np.arctan2(s * y[..., 0], np.abs(y[..., 3]))
        return np.stack([u, v], axis=-1)


def chart_map(X: Quadric) -> Chart:
    return Chart(X)


# ---------------------------------------------------------------------------
# lines


@dataclass(frozen=True, eq=False)
class Line:
    """Projective line spanned by two real points."""

    p: np.ndarray
    q: np.ndarray

    def points(self, n: int = 64) -> np.ndarray:
        t = np.linspace(0, np.pi, n, endpoint=False)
        pts = np.cos(t)[:, None] * self.p + np.sin(t)[:, None] * self.q
        return pts / np.linalg.norm(pts, axis=-1, keepdims=True)

    def basis(self) -> np.ndarray:
        Qm, _ = np.linalg.qr(np.stack([self.p, self.q], axis=1))
        return Qm.T

    def distance(self, x) -> np.ndarray:
        """Sine of the angle between unit x and the 2-plane of the line."""
        x = np.asarray(x, dtype=float)
        x = x / np.linalg.norm(x, axis=-1, keepdims=True)
        B = self.basis()
        proj = (x @ B.T) @ B
        return np.linalg.norm(x - proj, axis=-1)

    def to_json(self) -> dict:
        return {"p": self.p.tolist(), "q": self.q.tolist()}


def on_surface(X: Quadric, p, tol: float = SURFACE_TOL) -> bool:
    return bool(X.residual(np.asarray(p, dtype=float)) < tol)


def rulings(X: Quadric, p) -> list:
    """Real lines contained in X through the real point p."""
    p = np.asarray(p, dtype=float)
    if not on_surface(X, p):
        raise ValueError("point is not on the quadric")
    if X.kind == "ellipsoid":
        return []
    chart = chart_map(X)
    if X.kind == "hyperboloid":
        u, v = chart.coords(p)
        # ruling A: v fixed; ruling B: u fixed
        a = Line(chart(u, v), chart(u + np.pi / 2, v))
        b = Line(chart(u, v), chart(u, v + np.pi / 2))
        return [a, b]
    apex = X.apex / np.linalg.norm(X.apex)
    pn = p / np.linalg.norm(p)
    if np.linalg.norm(pn - np.dot(pn, apex) * apex) < 1e-9:
        raise ValueError("apex lies on every generator; use cone_generator(angle)")
    return [Line(apex, pn)]


def cone_generator(X: Quadric, angle: float) -> Line:
    chart = chart_map(X)
    return Line(X.apex / np.linalg.norm(X.apex), chart(angle, 0.0))


def ruling_line(X: Quadric, family: str, value: float) -> Line:
    """Hyperboloid line of ruling 'A' (v = value) or 'B' (u = value)."""
    if X.kind != "hyperboloid":
        raise ValueError("rulings by family exist only on the hyperboloid")
    chart = chart_map(X)
    if family == "A":
        return Line(chart(0.0, value), chart(np.pi / 2, value))
    return Line(chart(value, 0.0), chart(value, np.pi / 2))


# ---------------------------------------------------------------------------
# homology


@dataclass(frozen=True)
class HomologyClass:
    kind: str
    a: int = 0
    b: int = 0

    def __neg__(self):
        return HomologyClass(self.kind, -self.a, -self.b)

    def __add__(self, other):
        if other.kind != self.kind:
            raise ValueError("classes live on different surfaces")
        return HomologyClass(self.kind, self.a + other.a, self.b + other.b)

    @property
    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def as_tuple(self):
        if self.kind == "hyperboloid":
            return (self.a, self.b)
        if self.kind == "cone":
            return (self.a,)
        return (0, 0)

    def up_to_sign(self):
        t = self.as_tuple()
        neg = tuple(-x for x in t)
        return max(t, neg)


def homology_pairing(alpha: HomologyClass, beta: HomologyClass) -> int:
    if alpha.kind != beta.kind:
        raise ValueError("classes live on different surfaces")
    if alpha.kind != "hyperboloid":
        return 0
    return alpha.a * beta.b - alpha.b * beta.a


def _wrap(d):
    return (d + np.pi) % (2 * np.pi) - np.pi


def loop_class(chart: Chart, path, closed_tol: float = 1e-6) -> HomologyClass:
    """Winding numbers of a closed chart polyline around the periodic directions."""
    path = np.asarray(path, dtype=float)
    if len(path) < 3:
        raise ValueError("path too short")
    du = _wrap(np.diff(np.append(path[:, 0], path[0, 0])))
    if chart.kind == "hyperboloid":
        dv = _wrap(np.diff(np.append(path[:, 1], path[0, 1])))
    else:
        dv = np.diff(np.append(path[:, 1], path[0, 1]))
    gap_u = _wrap(path[-1, 0] - path[0, 0])
    gap_v = _wrap(path[-1, 1] - path[0, 1]) if chart.kind == "hyperboloid" else path[-1, 1] - path[0, 1]
    step = np.median(np.hypot(du, dv)[:-1]) if len(du) > 1 else 0.0
    if np.hypot(gap_u, gap_v) > max(closed_tol, 10 * step):
        raise ValueError("path is not closed")
    wu = int(np.round(du.sum() / (2 * np.pi)))
    wv = int(np.round(dv.sum() / (2 * np.pi))) if chart.kind == "hyperboloid" else 0
    if chart.kind == "ellipsoid":
        return HomologyClass("ellipsoid", 0, 0)
    if chart.kind == "cone":
        return HomologyClass("cone", wu, 0)
    return HomologyClass("hyperboloid", wu, wv)
