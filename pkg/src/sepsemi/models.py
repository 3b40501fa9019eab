"""Model curves: separating genus-4 sextics on quadrics and hyperelliptic curves.

Every sextic recipe lives in the normal-form coordinates of its quadric.
Three-plane recipes perturb a product of three plane sections, tube recipes
perturb (plane section) x (thin tube around a line meeting the quadric twice).
The perturbation always contains the fixed generic cubic ``GENERIC`` so that
the nonreal singular points of the unperturbed union are smoothed.

Component numbering follows anchor points stored in the provenance: c_k is
the traced loop closest to ``anchors[k-1]``.  For tube recipes c_2 is the
plane-section component and c_1, c_3 the two small ovals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import MultiForm, UniPoly, evaluate_form, form_gradient, univariate_roots
from .intersect import intersect_with_form, line_family
from .quadric import Quadric, normal_quadric

NON_M_ROWS = (
    ("ellipsoid", 3, 3),
    ("cone", 3, 0),
    ("cone", 3, 2),
    ("hyperboloid", 1, 0),
    ("hyperboloid", 3, 0),
    ("hyperboloid", 3, 2),
)
M_ROWS = (("ellipsoid", 5, 5), ("cone", 5, 4), ("hyperboloid", 5, 4))


class ModelError(ValueError):
    pass


def _x(i):
    return MultiForm.variable(i)


GENERIC = MultiForm(3, np.cos(1.7 * np.arange(20) + 0.3)).normalized()


def tube(origin, direction, radius: float, w: int) -> MultiForm:
    """Quadric of points at distance ``radius`` from a line, in the affine chart x_w = 1."""
    sp = [i for i in range(4) if i != w]
    d = np.asarray(direction, float)
    d = d / np.linalg.norm(d)
    lin = [_x(sp[k]) - origin[k] * _x(w) for k in range(3)]
    S = lin[0] * lin[0] + lin[1] * lin[1] + lin[2] * lin[2]
    along = d[0] * lin[0] + d[1] * lin[1] + d[2] * lin[2]
    return S - along * along - (radius * radius) * (_x(w) * _x(w))


@dataclass(frozen=True)
class Recipe:
    kind: str
    r: int
    l: int
    style: str                 # "three-plane" or "plane+tube"
    epsilon: float             # default perturbation size
    epsilon_max: float         # validated upper bound
    anchors: tuple             # approximate points of c_1..c_r (normal coordinates)

    def unperturbed(self) -> MultiForm:
        x0, x1, x2, x3 = (_x(i) for i in range(4))
        h = 0.5
        if (self.kind, self.r, self.l) in (("ellipsoid", 3, 3), ("hyperboloid", 3, 0)):
            return (x3 + h * x0) * x3 * (x3 - h * x0)
        if (self.kind, self.r, self.l) == ("cone", 3, 0):
            return (x0 + x3) * x0 * (x0 - x3)
        if (self.kind, self.r, self.l) == ("hyperboloid", 1, 0):
            return (x3 + h * x0) * (x3 - h * x0) * x2
        if (self.kind, self.r, self.l) == ("hyperboloid", 3, 2):
            return x3 * tube((0, 0, 0), (1, 0, 0.5), 0.25, w=0)
        if (self.kind, self.r, self.l) == ("cone", 3, 2):
            return x0 * tube((0, 0, 0), (1, 0.5, 0), 0.25, w=3)
        raise ModelError(f"no recipe for {(self.kind, self.r, self.l)}")

    def perturbation(self) -> MultiForm:
        if (self.kind, self.r, self.l) == ("hyperboloid", 1, 0):
            # smooths the four real nodes coherently (one component of class 3a+b)
            return MultiForm.from_terms(3, {(1, 1, 0, 1): 1.0}) + 0.2 * GENERIC
        if self.style == "three-plane":
            return 0.5 * GENERIC
        return GENERIC

    def cubic(self, eps: float) -> MultiForm:
        return self.unperturbed() - eps * self.perturbation()


_S = 1 / np.sqrt(2)
RECIPES = {
    ("ellipsoid", 3, 3): Recipe(
        "ellipsoid", 3, 3, "three-plane", 0.05, 0.07,
        ((1, 0.866, 0, -0.5), (1, 1, 0, 0), (1, 0.866, 0, 0.5))),
    ("hyperboloid", 3, 0): Recipe(
        "hyperboloid", 3, 0, "three-plane", 0.05, 0.07,
        ((1, 1.118, 0, -0.5), (1, 1, 0, 0), (1, 1.118, 0, 0.5))),
    ("cone", 3, 0): Recipe(
        "cone", 3, 0, "three-plane", 0.05, 0.1,
        ((-1, 1, 0, 1), (0, 1, 0, 1), (1, 1, 0, 1))),
    ("hyperboloid", 1, 0): Recipe(
        "hyperboloid", 1, 0, "three-plane", 0.05, 0.1,
        ((1, 1.118, 0, 0.5),)),
    ("hyperboloid", 3, 2): Recipe(
        "hyperboloid", 3, 2, "plane+tube", 0.005, 0.01,
        ((1, 0, 1.155, 0.577), (1, 1, 0, 0), (1, 0, -1.155, -0.577))),
    ("cone", 3, 2): Recipe(
        "cone", 3, 2, "plane+tube", 0.01, 0.02,
        ((2, 1, 0, 1), (0, 1, 0, 1), (-2, -1, 0, 1))),
}


@dataclass(frozen=True, eq=False)
class SmoothnessCertificate:
    ok: bool
    grid: int
    tol: float
    n_seeds: int
    singular_points: list = field(default_factory=list)
    reason: str = ""

    def to_json(self) -> dict:
        return {"ok": self.ok, "grid": self.grid, "tol": self.tol, "n_seeds": self.n_seeds,
                "singular_points": [[[float(z.real), float(z.imag)] for z in p]
                                    for p in self.singular_points],
                "reason": self.reason}


@dataclass(frozen=True, eq=False)
class SpaceSextic:
    quadric: Quadric
    cubic: MultiForm
    provenance: dict = field(default_factory=dict)
    smoothness: SmoothnessCertificate | None = None

    @property
    def forms(self):
        return (self.quadric.form, self.cubic)

    def residual(self, x) -> np.ndarray:
        x = np.asarray(x)
        x = x / np.linalg.norm(x, axis=-1, keepdims=True)
        Qn = self.quadric.form.normalized()
        Kn = self.cubic.normalized()
        return np.maximum(np.abs(Qn(x)), np.abs(Kn(x)))

    def with_certificate(self, cert) -> "SpaceSextic":
        return SpaceSextic(self.quadric, self.cubic, self.provenance, cert)

    def to_json(self) -> dict:
        return {"surface": self.quadric.to_json(),
                "cubic": self.cubic.to_json(),
                "provenance": _plain(self.provenance)}

    @classmethod
    def from_json(cls, d) -> "SpaceSextic":
        return cls(Quadric.from_json(d["surface"]), MultiForm.from_json(d["cubic"]),
                   dict(d.get("provenance", {})))


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


# ---------------------------------------------------------------------------
# smoothness


def _singular_newton(Q: MultiForm, K: MultiForm, p0: np.ndarray, iters: int = 30):
    """Gauss-Newton on Q = 0, grad K = lam grad Q, a.p = 1; batched over seeds."""
    p = p0 / np.linalg.norm(p0, axis=-1, keepdims=True)
    a = p.conj()
    gQ = form_gradient(Q, p)
    gK = form_gradient(K, p)
    lam = np.sum(gQ.conj() * gK, axis=-1) / np.maximum(np.sum(np.abs(gQ) ** 2, axis=-1), 1e-300)
    HQ = Q.hessian(np.zeros(4))
    n = len(p)
    for _ in range(iters):
        gQ = form_gradient(Q, p)
        gK = form_gradient(K, p)
        HK = K.hessian(p)
        r = np.concatenate([evaluate_form(Q, p)[:, None], gK - lam[:, None] * gQ,
                            (np.sum(a * p, axis=-1) - 1)[:, None]], axis=1)
        J = np.zeros((n, 6, 5), dtype=complex)
        J[:, 0, :4] = gQ
        J[:, 1:5, :4] = HK - lam[:, None, None] * HQ
        J[:, 1:5, 4] = -gQ
        J[:, 5, :4] = a
        JH = np.conj(np.swapaxes(J, 1, 2))
        A = JH @ J + 1e-14 * np.eye(5)
        step = np.linalg.solve(A, (JH @ r[..., None]))[..., 0]
        p = p - step[:, :4]
        lam = lam - step[:, 4]
    gQ = form_gradient(Q, p)
    gK = form_gradient(K, p)
    res = np.concatenate([np.abs(evaluate_form(Q, p))[:, None], np.abs(evaluate_form(K, p))[:, None],
                          np.abs(gK - lam[:, None] * gQ)], axis=1).max(axis=1)
    return p / np.linalg.norm(p, axis=-1, keepdims=True), res


def _minors(Q, K, p):
    G = np.stack([form_gradient(Q, p), form_gradient(K, p)], axis=-2)
    out = []
    for i in range(4):
        for j in range(i + 1, 4):
            out.append(G[..., 0, i] * G[..., 1, j] - G[..., 0, j] * G[..., 1, i])
    return np.abs(np.stack(out, axis=-1)).max(axis=-1)


def validate_smoothness(C: SpaceSextic, grid: int = 24, tol: float = 1e-8,
                        seed: int = 3) -> SmoothnessCertificate:
    """Heuristic search for singular points of C (real grid + complex curve seeds)."""
    from .quadric import chart_map

    X = C.quadric
    Q = X.form.normalized()
    K = C.cubic.normalized()
    rng = np.random.default_rng(seed)
    fam = line_family(X)
    # K must not vanish on X
    probe_s = np.exp(2j * np.pi * rng.random(8))
    A, B = fam.line(probe_s)
    probe = A + rng.normal(size=(8, 1)) * B
    probe = probe / np.linalg.norm(probe, axis=-1, keepdims=True)
    if np.abs(evaluate_form(K, probe)).max() < 1e-10:
        return SmoothnessCertificate(False, grid, tol, 0, [], "cubic vanishes on the quadric")
    if X.kind == "cone":
        apex = X.apex / np.linalg.norm(X.apex)
        if abs(evaluate_form(K, apex)) < tol:
            return SmoothnessCertificate(False, grid, tol, 1, [apex.astype(complex)],
                                         "curve passes through the apex")
    chart = chart_map(X)
    (u0, u1), (v0, v1) = chart.domain
    uu, vv = np.meshgrid(np.linspace(u0, u1, grid, endpoint=False),
                         np.linspace(v0, v1, grid + 2)[1:-1])
    real_seeds = chart(uu.ravel(), vv.ravel()).astype(complex)
    curve_seeds = []
    for _ in range(12):
        H = MultiForm.linear(rng.normal(size=4))
        curve_seeds.append(intersect_with_form(X, K, H, family=fam, polish=False).points)
    curve_seeds = np.concatenate(curve_seeds)
    seeds = np.concatenate([real_seeds, curve_seeds])
    with np.errstate(all="ignore"):
        p, res = _singular_newton(Q, K, seeds)
    hit = np.isfinite(res) & (res < tol)
    if X.kind == "cone":
        apex = X.apex / np.linalg.norm(X.apex)
        hit &= np.abs(p @ apex) < 1 - 1e-6
    found = []
    for q in p[hit]:
        if _minors(Q, K, q) > 10 * tol:
            continue
        if all(abs(abs(np.vdot(q, f)) - 1) > 1e-8 for f in found):
            found.append(q)
    if found:
        return SmoothnessCertificate(False, grid, tol, len(seeds), found, "singular points found")
    return SmoothnessCertificate(True, grid, tol, len(seeds))


# ---------------------------------------------------------------------------
# construction


def recipe_for(kind: str, r: int, l: int) -> Recipe:
    key = (kind, int(r), int(l))
    if key in M_ROWS:
        raise ModelError(f"{key} is an M-curve row; only non-M rows have model recipes")
    if key not in RECIPES:
        raise ModelError(f"{key} is not a row of the genus-4 table")
    return RECIPES[key]


def build_sextic(kind: str, r: int, l: int, eps: float | None = None) -> SpaceSextic:
    """The recipe's curve, without validation."""
    rec = recipe_for(kind, r, l)
    eps = rec.epsilon if eps is None else float(eps)
    X = normal_quadric(kind)
    prov = {"kind": kind, "target": [r, l], "epsilon": eps, "style": rec.style,
            "anchors": [list(map(float, a)) for a in rec.anchors]}
    return SpaceSextic(X, rec.cubic(eps), prov)


def model_sextic(kind: str, r: int, l: int, eps: float | None = None,
                 step: float = 0.01, check: bool = True):
    """Build and validate a model curve; returns (curve, traced locus)."""
    from .topology import trace_real_locus

    rec = recipe_for(kind, r, l)
    eps = rec.epsilon if eps is None else float(eps)
    if eps == 0:
        raise ModelError("epsilon = 0 is the unperturbed (singular) union")
    if eps < 0:
        raise ModelError("epsilon must be positive")
    C = build_sextic(kind, r, l, eps)
    cert = validate_smoothness(C)
    C = C.with_certificate(cert)
    if not cert.ok:
        raise ModelError(f"model is not smooth at epsilon={eps}: {cert.reason}")
    if not check:
        return C, None
    locus = trace_real_locus(C, step=step)
    if (locus.r, locus.l) != (r, l):
        raise ModelError(
            f"epsilon={eps} too large: traced topology (r, l)=({locus.r}, {locus.l}), "
            f"expected ({r}, {l})")
    return C, locus


def max_epsilon(kind: str, r: int, l: int, lo: float = 1e-3, hi: float = 0.5,
                iters: int = 8, step: float = 0.02) -> float:
    """Bisection for the largest epsilon at which the recipe keeps its topology."""
    def good(e):
        try:
            model_sextic(kind, r, l, e, step=step)
            return True
        except Exception:
            return False

    if not good(lo):
        raise ModelError("recipe fails even at the lower bisection bound")
    if good(hi):
        return hi
    for _ in range(iters):
        mid = np.sqrt(lo * hi)
        lo, hi = (mid, hi) if good(mid) else (lo, mid)
    return lo


# ---------------------------------------------------------------------------
# hyperelliptic


@dataclass(frozen=True, eq=False)
class HyperellipticCurve:
    g: int
    F: UniPoly
    spread: tuple = ()
    delta: float = 0.0

    @property
    def parity(self) -> str:
        return "odd" if self.g % 2 else "even"

    @property
    def r(self) -> int:
        return 2 if self.g % 2 else 1

    def y(self, x, branch: int):
        return branch * np.sqrt(self.F(x))

    def to_json(self) -> dict:
        return {"genus": self.g, "F": [float(c) for c in self.F.coeffs],
                "parity": self.parity, "spread": list(self.spread), "delta": self.delta}

    @classmethod
    def from_json(cls, d) -> "HyperellipticCurve":
        H = cls(int(d["genus"]), UniPoly(np.array(d["F"], dtype=float)),
                tuple(float(v) for v in d.get("spread", ())), float(d.get("delta", 0.0)))
        check_hyperelliptic(H)
        return H


def check_hyperelliptic(H: HyperellipticCurve) -> None:
    if H.g < 1:
        raise ModelError("genus must be at least 1")
    if H.F.degree != 2 * H.g + 2:
        raise ModelError("deg F must be 2g + 2")
    roots = univariate_roots(H.F)
    if len(roots.real):
        raise ModelError("F has real roots; it must be positive on the real line")
    if H.F(0.0) <= 0:
        raise ModelError("F must be positive on the real line")
    z = roots.all_roots
    d = np.abs(z[:, None] - z[None, :]) + np.eye(len(z))
    if d.min() < 1e-9:
        raise ModelError("F is not square-free")


def model_hyperelliptic(g: int, spread=None, delta: float = 0.1) -> HyperellipticCurve:
    """F = prod (x - a_i)^2 + delta."""
    g = int(g)
    if g < 1:
        raise ModelError("genus must be at least 1")
    a = np.arange(g + 1, dtype=float) - g / 2 if spread is None else np.asarray(spread, dtype=float)
    if len(a) != g + 1:
        raise ModelError(f"need {g + 1} spread values")
    if len(np.unique(a)) != len(a):
        raise ModelError("spread values must be distinct")
    if delta <= 0:
        raise ModelError("delta must be positive")
    a = np.sort(a)
    P = UniPoly([1.0])
    for ai in a:
        P = P * UniPoly([-ai, 1.0]) * UniPoly([-ai, 1.0])
    F = P + UniPoly([float(delta)])
    H = HyperellipticCurve(g, F, tuple(float(v) for v in a), float(delta))
    check_hyperelliptic(H)
    return H
