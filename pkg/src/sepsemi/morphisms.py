"""Pencils of plane and quadric sections on sextics, their fibers and certificates.

A morphism is stored as two forms S0, S1 of equal degree; the point p goes
to [S0(p) : S1(p)], i.e. t = S1/S0.  The fiber over the angle theta
(t = tan theta) is cut by the member cos(theta) S1 - sin(theta) S0 after
removing the base divisor.  Sampling theta over [0, pi) covers the real
projective line once, t = infinity included.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import (MultiForm, UniPoly, evaluate_form, form_gradient, monomial_values,
                      restrict_to_curve, univariate_roots)
from .intersect import intersect_with_form, line_family, real_representative
from .quadric import Line, on_surface
from .topology import RealLocus

TOL_IM = 1e-6


class MorphismError(ValueError):
    pass


def _unit(x):
    x = np.asarray(x)
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


def projective_distance(x, y) -> np.ndarray:
    """sin of the angle between complex lines x and y (broadcasting)."""
    x = _unit(x)
    y = _unit(y)
    c = np.abs(np.sum(np.conj(x) * y, axis=-1))
    return np.sqrt(np.clip(1 - c * c, 0, None))


@dataclass(eq=False)
class Divisor:
    points: np.ndarray                 # (n, 4) complex
    mult: tuple = ()

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=complex))
        if not self.mult:
            self.mult = (1,) * len(self.points)

    @property
    def degree(self) -> int:
        return int(sum(self.mult))

    def real_mask(self, tol: float = TOL_IM) -> np.ndarray:
        return real_representative(self.points, tol)[0] if len(self.points) else np.zeros(0, bool)

    def expanded(self) -> np.ndarray:
        return np.repeat(self.points, self.mult, axis=0) if len(self.points) else self.points

    def is_conj_invariant(self, tol: float = 1e-6) -> bool:
        pts = self.expanded()
        if not len(pts):
            return True
        d = projective_distance(pts[:, None, :], np.conj(pts)[None, :, :])
        used = set()
        for i in range(len(pts)):
            cand = [j for j in np.argsort(d[i]) if j not in used and d[i, j] < tol]
            if not cand:
                return False
            used.add(cand[0])
        return True

    def to_json(self) -> dict:
        is_real, re, _ = real_representative(self.points) if len(self.points) else ([], [], [])
        pts = []
        for k, p in enumerate(self.points):
            if is_real[k]:
                pts.append({"real": np.round(re[k], 8).tolist(), "mult": int(self.mult[k])})
            else:
                q = p / p[np.argmax(np.abs(p))]
                pts.append({"re": np.round(q.real, 8).tolist(), "im": np.round(q.imag, 8).tolist(),
                            "mult": int(self.mult[k])})
        return {"degree": self.degree, "points": pts}


@dataclass(eq=False)
class Fiber:
    theta: float
    points: np.ndarray                  # (n, 4) complex, base removed
    real: np.ndarray                    # bool mask
    real_points: np.ndarray             # (m, 4) real unit representatives
    components: np.ndarray              # component ids of the real points (1-based)
    indices: np.ndarray                 # nearest loop sample of each real point
    positions: np.ndarray               # arc positions in [0, 1)
    max_im: float                       # largest imaginary size among real points
    min_im: float                       # smallest imaginary size among non-real points
    min_sep: float                      # minimal distance between real points

    @property
    def t(self) -> float:
        return float(np.tan(self.theta)) if abs(np.cos(self.theta)) > 1e-15 else float("inf")

    @property
    def all_real(self) -> bool:
        return bool(np.all(self.real))

    @property
    def degree(self) -> int:
        return len(self.points)

    def counts(self, r: int) -> tuple:
        return tuple(int(np.sum(self.components == k)) for k in range(1, r + 1))

    def to_json(self) -> dict:
        return {"theta": round(float(self.theta), 12), "all_real": self.all_real,
                "components": [int(c) for c in self.components],
                "positions": [round(float(p), 6) for p in self.positions]}


@dataclass(eq=False)
class SeparatingCertificate:
    ok: bool
    n_samples: int
    degree_vector: tuple | None
    max_im: float
    min_im_nonreal: float
    min_sep: float
    witness_theta: float | None = None
    reason: str = ""

    def to_json(self) -> dict:
        return {"ok": self.ok, "n_samples": self.n_samples,
                "degree_vector": list(self.degree_vector) if self.degree_vector else None,
                "max_im": float(f"{self.max_im:.3g}"),
                "min_sep": float(f"{self.min_sep:.3g}"),
                "witness_theta": None if self.witness_theta is None else round(self.witness_theta, 12),
                "reason": self.reason,
                "kind": "numerical sampling certificate"}


@dataclass(eq=False)
class MorphismRep:
    kind: str                           # "plane-pencil" or "quadric-pencil"
    curve: object                       # SpaceSextic
    S0: MultiForm
    S1: MultiForm
    base: Divisor
    degree: int
    meta: dict = field(default_factory=dict)
    certificate: SeparatingCertificate | None = None

    def member(self, theta: float) -> MultiForm:
        return np.cos(theta) * self.S1 - np.sin(theta) * self.S0

    def theta_of(self, p) -> np.ndarray:
        """Parameter angle in [0, pi) of curve points p."""
        p = np.atleast_2d(p)
        return np.mod(np.arctan2(evaluate_form(self.S1, p), evaluate_form(self.S0, p)), np.pi)

    def reparametrized(self, M) -> "MorphismRep":
        """Same map composed with the real Mobius transformation M acting on [S0 : S1]."""
        M = np.asarray(M, dtype=float)
        if abs(np.linalg.det(M)) < 1e-12:
            raise MorphismError("Mobius matrix is singular")
        S0 = M[0, 0] * self.S0 + M[0, 1] * self.S1
        S1 = M[1, 0] * self.S0 + M[1, 1] * self.S1
        return MorphismRep(self.kind, self.curve, S0, S1, self.base, self.degree, dict(self.meta))

    @property
    def degree_vector(self):
        c = self.certificate
        return c.degree_vector if c is not None and c.ok else None

    def to_json(self) -> dict:
        out = {"kind": self.kind, "S0": self.S0.to_json(), "S1": self.S1.to_json(),
               "base": self.base.to_json(), "degree": self.degree}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        return out


# ---------------------------------------------------------------------------
# construction


def _plane_complement(vectors) -> np.ndarray:
    """Orthonormal basis (2, 4) of real linear forms vanishing on a real 2-plane."""
    V = np.atleast_2d(np.asarray(vectors, dtype=float))
    _, s, vt = np.linalg.svd(V)
    if s[1] < 1e-10 * s[0]:
        raise MorphismError("base points do not span a line")
    return vt[2:]


def _line_on_curve(C, p, q) -> Divisor:
    """Points of C on the line through real p, q (a line lying on X)."""
    K = C.cubic.normalized()
    gamma = [UniPoly([p[i], q[i]]) for i in range(4)]
    poly = restrict_to_curve(K, gamma).trimmed(1e-12)
    pts = []
    if poly.degree >= 1:
        for t in univariate_roots(poly, 1e-9).all_roots:
            pts.append(np.asarray(p) + t * np.asarray(q))
    pts += [np.asarray(q, dtype=complex)] * (3 - max(poly.degree, 0))
    return Divisor(_unit(np.array(pts, dtype=complex)))


def plane_pencil(C, line: Line | None = None, points=None, conjugate=None) -> MorphismRep:
    """Pencil of plane sections through a real line.

    Give exactly one of: ``line`` (a real line, usually lying on X),
    ``points`` (two real points of C) or ``conjugate`` (a nonreal point p of
    C, the pencil then passes through p and its conjugate).
    """
    X = C.quadric
    given = [line is not None, points is not None, conjugate is not None]
    if sum(given) != 1:
        raise MorphismError("give exactly one base description")
    if line is not None:
        p, q = _unit(line.p), _unit(line.q)
        inside = all(on_surface(X, x) for x in line.points(5))
        if not inside:
            raise MorphismError("base line does not lie on the quadric; give base points instead")
        base = _line_on_curve(C, p, q)
        meta = {"base": "line", "line": [p.tolist(), q.tolist()]}
    elif points is not None:
        p, q = (np.asarray(x, dtype=float) for x in points)
        p, q = _unit(p), _unit(q)
        for x in (p, q):
            if np.max(C.residual(x)) > 1e-7:
                raise MorphismError("base point is not on the curve")
        mid = Line(p, q).points(7)[1:]
        if all(on_surface(X, x) for x in mid):
            raise MorphismError("the line through the base points lies on the quadric; "
                                "a line of the quadric cannot serve as this base")
        base = Divisor(np.array([p, q], dtype=complex))
        meta = {"base": "points", "points": [p.tolist(), q.tolist()]}
    else:
        z = np.asarray(conjugate, dtype=complex)
        z = z / z[np.argmax(np.abs(z))]
        if np.linalg.norm(z.imag) < 1e-8:
            raise MorphismError("conjugate base point must be nonreal")
        p, q = _unit(z.real), _unit(z.imag)
        base = Divisor(np.array([z, np.conj(z)]))
        meta = {"base": "conjugate-pair"}
    comp = _plane_complement([p, q])
    S0 = MultiForm.linear(comp[0])
    S1 = MultiForm.linear(comp[1])
    return MorphismRep("plane-pencil", C, S0, S1, base, 6 - base.degree, meta)


def quadric_forms_through(points, tol: float = 1e-8) -> np.ndarray:
    """Real basis (k, 10) of quadric forms vanishing at the given (conj-invariant) points."""
    pts = _unit(np.atleast_2d(points))
    A = monomial_values(pts, 2)
    A = np.vstack([A.real, A.imag])
    _, s, vt = np.linalg.svd(A)
    rank = int(np.sum(s > tol * s[0]))
    return vt[rank:], s


def quadric_pencil_through(C, P, seed: int = 0, tol: float = 1e-8) -> MorphismRep:
    """Pencil of quadric sections whose fiber at t = infinity is P (five real points).

    S0 is a generic real quadric through P, R = (S0 . C) - P the residual
    7 points, and S1 the quadric through R orthogonal to Q and S0.
    """
    X = C.quadric
    P = _unit(np.atleast_2d(np.asarray(P, dtype=float)))
    if len(P) != 5:
        raise MorphismError("P must have five points")
    if np.max(C.residual(P)) > 1e-7:
        raise MorphismError("points of P are not on the curve")
    for i in range(5):
        for j in range(i + 1, 5):
            mid = Line(P[i], P[j]).points(7)[1:]
            if all(on_surface(X, x) for x in mid):
                raise MorphismError("a line of the quadric passes through two points of P")
    rng = np.random.default_rng(seed)
    Qc = X.form.normalized().coeffs
    basis, _ = quadric_forms_through(P, tol)
    if len(basis) != 5:
        raise MorphismError("P in special position (rank deficiency); retry with jittered P")
    w = rng.normal(size=len(basis)) @ basis
    w = w - (w @ Qc) * Qc / (Qc @ Qc)
    S0 = MultiForm(2, w).normalized()
    cut = intersect_with_form(X, C.cubic.normalized(), S0).points
    R = _remove(cut, P.astype(complex), [1] * 5)
    if len(R) != 7:
        raise MorphismError("residual divisor has wrong degree; retry with jittered P")
    Rdiv = Divisor(R)
    if not Rdiv.is_conj_invariant(1e-5):
        raise MorphismError("residual divisor is not conjugation invariant; residual solve failed")
    basis, s = quadric_forms_through(R, 1e-7)
    if len(basis) != 3:
        raise MorphismError("residual divisor in special position; retry with jittered P")
    span = np.stack([Qc, S0.coeffs])
    proj = basis - (basis @ np.linalg.pinv(span)) @ span
    u, sv, vt = np.linalg.svd(proj)
    S1 = MultiForm(2, vt[0]).normalized()
    if np.min(np.abs(evaluate_form(S1, P))) < 1e-8:
        raise MorphismError("pencil member passes through P; retry with jittered P")
    return MorphismRep("quadric-pencil", C, S0, S1, Rdiv, 12 - 7,
                       {"P": P.tolist(), "seed": seed})


def _remove(points, base, mult) -> np.ndarray:
    """Remove base points (with multiplicity) by nearest matching."""
    pts = list(points)
    for b, m in zip(base, mult):
        for _ in range(m):
            if not pts:
                break
            d = projective_distance(np.array(pts), b)
            pts.pop(int(np.argmin(d)))
    return np.array(pts).reshape(-1, 4)


# ---------------------------------------------------------------------------
# fibers


def _residual_line_points(f: MorphismRep, theta: float) -> np.ndarray:
    """Fiber of a pencil through a line L of X: the residual line of each plane meets C."""
    C = f.curve
    H = f.member(theta)
    e1, e2 = (np.asarray(v) for v in f.meta["line"])
    B = np.linalg.svd(np.stack([e1, e2]), full_matrices=True)[2]
    # third basis vector of the plane: in H = 0, orthogonal to L
    n = H.coeffs
    e3 = B[2:].T @ np.linalg.svd((n @ B[2:].T)[None, :], full_matrices=True)[2][1]
    # Q(a e1 + b e2 + c e3) = c * (alpha a + beta b + gamma c)
    Qf = C.quadric.form.normalized()
    g = form_gradient(Qf, e3)
    alpha, beta = g @ e1, g @ e2
    gamma = evaluate_form(Qf, e3)
    # residual line: alpha a + beta b + gamma c = 0
    if abs(alpha) + abs(beta) < 1e-12:
        raise MorphismError("plane is tangent along the base line")
    d1 = beta * e1 - alpha * e2
    d2 = gamma * e1 - alpha * e3 if abs(alpha) > abs(beta) else gamma * e2 - beta * e3
    d1, d2 = _unit(d1), _unit(d2)
    poly = restrict_to_curve(C.cubic.normalized(), [UniPoly([d1[i], d2[i]]) for i in range(4)])
    poly = poly.trimmed(1e-13)
    pts = []
    if poly.degree >= 1:
        pts = [d1 + t * d2 for t in univariate_roots(poly, 1e-9).all_roots]
    pts += [d2.astype(complex)] * (3 - max(poly.degree, 0))
    return _unit(np.array(pts, dtype=complex))


def fiber_at(f: MorphismRep, theta: float, locus: RealLocus | None = None,
             tol_im: float = TOL_IM, family=None) -> Fiber:
    C = f.curve
    if f.meta.get("base") == "line":
        pts = _residual_line_points(f, theta)
    else:
        cut = intersect_with_form(C.quadric, C.cubic.normalized(), f.member(theta), family=family).points
        pts = _remove(cut, f.base.points, f.base.mult)
    is_real, re, im = real_representative(pts, tol_im)
    rp = re[is_real]
    if locus is not None and len(rp):
        comp, idx, pos, _ = locus.locate(rp)
    else:
        comp = idx = np.zeros(len(rp), int)
        pos = np.zeros(len(rp))
    if len(rp) > 1:
        d = projective_distance(rp[:, None, :], rp[None, :, :]) + np.eye(len(rp))
        min_sep = float(d.min())
    else:
        min_sep = 1.0
    return Fiber(float(theta), pts, is_real, rp, np.asarray(comp), np.asarray(idx), np.asarray(pos),
                 float(im[is_real].max()) if np.any(is_real) else 0.0,
                 float(im[~is_real].min()) if np.any(~is_real) else float("inf"),
                 min_sep)


def sample_thetas(n: int) -> np.ndarray:
    return np.arange(n) * np.pi / n


def separating_certificate(f: MorphismRep, locus: RealLocus, n_samples: int = 200,
                           tol_im: float = TOL_IM):
    """Sample fibers over the real line; certify all-real fibers with constant counts.

    Returns (degree vector or None, certificate) and stores the certificate on f.
    """
    fam = line_family(f.curve.quadric)
    counts = None
    max_im, min_im, min_sep = 0.0, float("inf"), float("inf")
    witness, reason = None, ""
    for th in sample_thetas(n_samples):
        fb = fiber_at(f, th, locus, tol_im, family=fam)
        max_im = max(max_im, fb.max_im)
        min_im = min(min_im, fb.min_im)
        min_sep = min(min_sep, fb.min_sep)
        if fb.degree != f.degree:
            witness, reason = th, f"fiber has {fb.degree} points, expected {f.degree}"
            break
        if not fb.all_real:
            witness, reason = th, "fiber contains a pair of conjugate points"
            break
        c = fb.counts(locus.r)
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


# ---------------------------------------------------------------------------
# speciality and interlacing


@dataclass(frozen=True)
class SpecialityReport:
    special: bool
    rank: int
    plane: tuple | None
    singular_values: tuple

    def to_json(self) -> dict:
        return {"special": self.special, "rank": self.rank,
                "sigma_min_ratio": float(f"{self.singular_values[-1] / self.singular_values[0]:.3g}")}


def is_special_divisor(points, tol: float = 1e-8) -> SpecialityReport:
    """A divisor of at most 6 points on a canonical genus-4 curve is special iff coplanar."""
    pts = _unit(np.atleast_2d(np.asarray(points)))
    if len(pts) <= 3:
        pl = _plane_through(pts)
        return SpecialityReport(True, int(np.linalg.matrix_rank(pts)), pl, tuple(np.zeros(1)))
    A = np.vstack([pts.real, pts.imag]) if np.iscomplexobj(pts) else pts
    s = np.linalg.svd(A, compute_uv=False)
    rank = int(np.sum(s > tol * s[0]))
    special = rank <= 3
    return SpecialityReport(special, rank, _plane_through(pts) if special else None,
                            tuple(float(x) for x in s))


def _plane_through(pts):
    A = np.vstack([np.real(pts), np.imag(pts)])
    vt = np.linalg.svd(A, full_matrices=True)[2]
    return tuple(float(x) for x in vt[-1])


def base_point_free(points, tol: float = 1e-8) -> bool:
    """Every 4-point subdivisor spans the whole space (rank 4)."""
    from itertools import combinations

    pts = _unit(np.atleast_2d(np.asarray(points, dtype=float)))
    for sub in combinations(range(len(pts)), 4):
        if is_special_divisor(pts[list(sub)], tol).special:
            return False
    return True


class InterlacingError(ValueError):
    pass


def interlacing_check(P: Fiber, P2: Fiber, r: int, tol: float = 1e-9) -> bool:
    """True iff on every component the points of P2 separate the points of P."""
    if not (P.all_real and P2.all_real):
        raise InterlacingError("both fibers must be all-real")
    if len(P.real_points) and len(P2.real_points):
        d = projective_distance(P.real_points[:, None, :], P2.real_points[None, :, :])
        if d.min() < tol:
            raise InterlacingError("fibers share a point")
    return interlacing_positions([(c, x) for c, x in zip(P.components, P.positions)],
                                 [(c, x) for c, x in zip(P2.components, P2.positions)], r)


def interlacing_positions(A, B, r: int) -> bool:
    """Interlacing test on (component, cyclic position) pairs."""
    for k in range(1, r + 1):
        a = np.sort([x for c, x in A if c == k])
        b = np.sort([x for c, x in B if c == k])
        if len(a) != len(b):
            return False
        if len(a) == 0:
            continue
        for lo, hi in zip(a, np.append(a[1:], a[0] + 1)):
            inside = np.sum(((b - lo) % 1.0) < (hi - lo))
            if inside != 1:
                return False
    return True


# ---------------------------------------------------------------------------
# velocities (level-set motion of fiber points)


def fiber_velocities(f: MorphismRep, points) -> np.ndarray:
    """Tangent vectors v_j with d(S1/S0)(v_j) = 1 at real fiber points."""
    Qf, Kf = f.curve.quadric.form.normalized(), f.curve.cubic.normalized()
    from .tracing import tangent

    p = _unit(np.atleast_2d(points))
    t = tangent((Qf, Kf), p)
    S0, S1 = evaluate_form(f.S0, p), evaluate_form(f.S1, p)
    d = (S0 * np.sum(form_gradient(f.S1, p) * t, axis=1)
         - S1 * np.sum(form_gradient(f.S0, p) * t, axis=1)) / S0 ** 2
    return t / d[:, None]


def kappa(forms, p, v) -> np.ndarray:
    """det[p, a, b, v] with [a b] dual to the gradients of the curve at p."""
    p = np.atleast_2d(p)
    v = np.atleast_2d(v)
    G = np.stack([form_gradient(forms[0], p), form_gradient(forms[1], p)], axis=1)
    AB = np.swapaxes(G, 1, 2) @ np.linalg.inv(G @ np.swapaxes(G, 1, 2))
    return np.linalg.det(np.stack([p, AB[:, :, 0], AB[:, :, 1], v], axis=1))


def abel_residual_space(f: MorphismRep, fiber: Fiber) -> float:
    """|sum_j kappa(p_j, v_j) p_j| relative to the sum of sizes (zero by Abel)."""
    C = f.curve
    forms = (C.quadric.form.normalized(), C.cubic.normalized())
    p = fiber.real_points
    v = fiber_velocities(f, p)
    k = kappa(forms, p, v)
    terms = k[:, None] * p
    return float(np.linalg.norm(terms.sum(axis=0)) / np.sum(np.linalg.norm(terms, axis=1)))
