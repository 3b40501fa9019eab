"""Real topology of curves on quadrics: components, colorings, orientations, linking.

Orientations are stored relative to the traversal direction of each traced
loop and are only meaningful up to one simultaneous flip on all components.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .algebra import MultiForm, evaluate_form, form_gradient
from .quadric import HomologyClass, Quadric, chart_map, loop_class
from .tracing import TracingError, trace_all


class TopologyError(ValueError):
    pass


def _unit(x):
    x = np.asarray(x, dtype=float)
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


def _wrap(d):
    return (d + np.pi) % (2 * np.pi) - np.pi


@dataclass(eq=False)
class TracedLoop:
    points: np.ndarray          # (n, 4) unit vectors, a continuous lift
    chart: np.ndarray           # (n, 2) chart coordinates
    antipodal: bool
    homology: HomologyClass
    is_oval: bool
    component: int = 0
    arclength: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.arclength is None:
            seg = np.linalg.norm(np.diff(np.vstack([self.points, self.closing_point()]), axis=0), axis=1)
            self.arclength = np.concatenate([[0.0], np.cumsum(seg)])

    def closing_point(self):
        return -self.points[0] if self.antipodal else self.points[0]

    @property
    def length(self) -> float:
        return float(self.arclength[-1])

    def tangents(self) -> np.ndarray:
        nxt = np.vstack([self.points[1:], self.closing_point()])
        prv = np.vstack([-self.points[-1] if self.antipodal else self.points[-1], self.points[:-1]])
        return _unit(nxt - prv)

    def to_json(self) -> dict:
        return {"component": self.component,
                "class": list(self.homology.up_to_sign()),
                "oval": self.is_oval,
                "samples": np.round(self.points, 6).tolist()}


@dataclass(eq=False)
class RealLocus:
    quadric: Quadric
    forms: tuple
    loops: list
    step: float

    @property
    def r(self) -> int:
        return len(self.loops)

    @property
    def l(self) -> int:
        return sum(lp.is_oval for lp in self.loops)

    def loop(self, k: int) -> TracedLoop:
        """Component c_k (1-based)."""
        return self.loops[k - 1]

    def _tree(self):
        if not hasattr(self, "_kd"):
            pts = np.concatenate([lp.points for lp in self.loops])
            self._owner = np.concatenate([[i] * len(lp.points) for i, lp in enumerate(self.loops)])
            self._index = np.concatenate([np.arange(len(lp.points)) for lp in self.loops])
            self._kd = cKDTree(np.vstack([pts, -pts]))
        return self._kd

    def locate(self, x):
        """(component (1-based), sample index, arc position in [0,1), distance) for real points."""
        x = _unit(np.atleast_2d(x))
        tree = self._tree()
        d, j = tree.query(x)
        n = len(self._owner)
        j = j % n
        comp = self._owner[j] + 1
        idx = self._index[j]
        pos = np.array([self._refine(self.loops[c - 1], i, p) for c, i, p in zip(comp, idx, x)])
        return comp, idx, pos, d

    @staticmethod
    def _refine(lp, i, x) -> float:
        """Arc position of x, projected onto the polyline segments next to sample i."""
        n = len(lp.points)
        pts = lp.points
        x = x if x @ pts[i] >= 0 else -x
        nxt = pts[i + 1] if i + 1 < n else lp.closing_point()
        best = (np.inf, lp.arclength[i])
        for a, b, s0 in ((pts[i - 1] if i > 0 else None, pts[i], lp.arclength[i - 1] if i > 0 else None),
                         (pts[i], nxt, lp.arclength[i])):
            if a is None:
                continue
            seg = b - a
            L2 = seg @ seg
            if L2 == 0:
                continue
            s = np.clip((x - a) @ seg / L2, 0.0, 1.0)
            dist = np.linalg.norm(a + s * seg - x)
            if dist < best[0]:
                best = (dist, s0 + s * np.sqrt(L2))
        return float(best[1] / lp.length % 1.0)

    def summary(self) -> dict:
        return {"r": self.r, "l": self.l,
                "classes": [list(lp.homology.up_to_sign()) for lp in self.loops],
                "ovals": [lp.is_oval for lp in self.loops]}

    def to_json(self) -> dict:
        out = self.summary()
        out["loops"] = [lp.to_json() for lp in self.loops]
        return out


def _make_loop(X: Quadric, pts: np.ndarray, anti: bool) -> TracedLoop:
    chart = chart_map(X)
    uv = chart.coords(pts)
    cls = loop_class(chart, uv)
    if X.kind == "ellipsoid":
        oval = True
    else:
        oval = cls.is_zero
    return TracedLoop(pts, uv, anti, cls, oval)


def trace_real_locus(C, step: float = 0.01, tol_trace: float = 1e-12,
                     n_planes: int | None = None) -> RealLocus:
    """Trace every component of the real locus and number them.

    Components are numbered by the provenance anchors when present
    (c_k is the loop nearest to anchor k); otherwise in tracing order.
    """
    if getattr(C, "smoothness", None) is not None and not C.smoothness.ok:
        raise TopologyError("curve is singular; tracing requires a smooth curve")
    X = C.quadric
    n_planes = n_planes or max(48, int(0.5 / step))
    try:
        raw = trace_all(X, C.cubic, step=step, tol=tol_trace, n_planes=n_planes)
    except TracingError:
        raise
    loops = [_make_loop(X, pts, anti) for pts, anti in raw]
    anchors = (C.provenance or {}).get("anchors")
    if anchors and len(anchors) == len(loops):
        A = _unit(X.from_normal(np.array(anchors, dtype=float)))
        dist = np.array([[min(np.linalg.norm(lp.points - a, axis=1).min(),
                              np.linalg.norm(lp.points + a, axis=1).min())
                          for lp in loops] for a in A])
        order = []
        for k in range(len(A)):
            cand = [i for i in np.argsort(dist[k]) if i not in order]
            order.append(int(cand[0]))
        loops = [loops[i] for i in order]
    for k, lp in enumerate(loops):
        lp.component = k + 1
    Qn = X.form.normalized()
    return RealLocus(X, (Qn, C.cubic.normalized()), loops, step)


def trace_section(X: Quadric, H: MultiForm, step: float = 0.01) -> list:
    """Real loops of a plane (or any) section of X, as TracedLoop objects."""
    raw = trace_all(X, H, step=step)
    return [_make_loop(X, pts, anti) for pts, anti in raw]


# ---------------------------------------------------------------------------
# chess-board coloring


@dataclass(eq=False)
class Coloring:
    quadric: Quadric
    nu: int
    nv: int
    u_range: tuple
    v_range: tuple
    color: np.ndarray            # (nu, nv) entries +1 / -1
    region: np.ndarray           # (nu, nv) region ids
    n_regions: int
    violations: int
    edges_checked: int
    edges_flipping: int

    def cell(self, uv):
        uv = np.atleast_2d(uv)
        du = (self.u_range[1] - self.u_range[0]) / self.nu
        dv = (self.v_range[1] - self.v_range[0]) / self.nv
        i = np.floor((uv[:, 0] - self.u_range[0]) / du).astype(int) % self.nu
        j = np.floor((uv[:, 1] - self.v_range[0]) / dv).astype(int)
        if self.quadric.kind == "hyperboloid":
            j = j % self.nv
        else:
            j = np.clip(j, 0, self.nv - 1)
        return i, j

    def color_at(self, uv) -> np.ndarray:
        i, j = self.cell(uv)
        return self.color[i, j]

    def color_of_points(self, x) -> np.ndarray:
        return self.color_at(chart_map(self.quadric).coords(x))

    @property
    def cell_size(self) -> float:
        return max((self.u_range[1] - self.u_range[0]) / self.nu,
                   (self.v_range[1] - self.v_range[0]) / self.nv)


def _arc_segments(chart_paths, periodic_v: bool):
    """Unwrapped chart segments (start, delta) of closed chart polylines."""
    starts, deltas = [], []
    for uv in chart_paths:
        nxt = np.roll(uv, -1, axis=0)
        d = nxt - uv
        d[:, 0] = _wrap(d[:, 0])
        if periodic_v:
            d[:, 1] = _wrap(d[:, 1])
        starts.append(uv)
        deltas.append(d)
    return np.concatenate(starts), np.concatenate(deltas)


def _line_crossings(a, d, centers0, spacing):
    """Crossings of segments (a, a+d) with lines x = centers0 + k*spacing.

    Returns (k, t) for every crossing, t in [0, 1) the segment parameter.
    """
    lo = np.minimum(a, a + d)
    hi = np.maximum(a, a + d)
    kmin = np.ceil((lo - centers0) / spacing).astype(int)
    kmax = np.floor((hi - centers0) / spacing).astype(int)
    cnt = np.maximum(kmax - kmin + 1, 0)
    seg = np.repeat(np.arange(len(a)), cnt)
    offs = np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt)
    k = kmin[seg] + offs
    line = centers0 + k * spacing
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (line - a[seg]) / d[seg]
    ok = np.isfinite(t) & (t >= 0) & (t < 1)
    return seg[ok], k[ok], t[ok]


def chessboard_coloring(X: Quadric, arcs, n: int = 360, max_n: int = 1440,
                        sections=()) -> Coloring:
    """Two-coloring of the chart complement of a union of closed real loops.

    ``arcs`` is a list of TracedLoop (or (m, 2) chart polylines).  On the cone
    the two ends of the chart meet at the apex; they are joined unless one of
    the plane ``sections`` passes through the apex.  Cells of a
    grid are joined across dual edges; the color changes exactly when the
    dual edge crosses an odd number of arcs.  The grid is refined until
    the parity is globally consistent; remaining inconsistency means the
    union has nonzero mod-2 class and raises TopologyError.
    """
    chart = chart_map(X)
    paths = [a.chart if isinstance(a, TracedLoop) else np.asarray(a, dtype=float) for a in arcs]
    (u0, u1), (v0, v1) = chart.domain
    periodic_v = X.kind == "hyperboloid"
    join_apex = X.kind == "cone" and not any(
        abs(evaluate_form(H.normalized(), X.apex / np.linalg.norm(X.apex))) < 1e-9 for H in sections)
    a, d = _arc_segments(paths, periodic_v) if paths else (np.zeros((0, 2)), np.zeros((0, 2)))
    while True:
        col = _color_grid(X, a, d, n, (u0, u1), (v0, v1), periodic_v, join_apex)
        if col.violations == 0 or n >= max_n:
            break
        n *= 2
    if col.violations:
        raise TopologyError("not chessboard-colorable: the union of arcs has nonzero mod-2 class")
    return col


def _color_grid(X, a, d, n, ur, vr, periodic_v, join_apex) -> Coloring:
    nu = nv = n
    du = (ur[1] - ur[0]) / nu
    dv = (vr[1] - vr[0]) / nv
    cu0 = ur[0] + 0.5 * du
    cv0 = vr[0] + 0.5 * dv
    # crossings of horizontal dual edges (v = cv_j, between cells i and i+1)
    ph = np.zeros((nu, nv), dtype=np.int8)
    seg, k, t = _line_crossings(a[:, 1], d[:, 1], cv0, dv)
    if len(seg):
        j = k
        uc = a[seg, 0] + t * d[seg, 0]
        i = np.floor((uc - cu0) / du).astype(int) % nu
        if periodic_v:
            j = j % nv
        ok = (j >= 0) & (j < nv)
        np.add.at(ph, (i[ok], j[ok]), 1)
    # crossings of vertical dual edges (u = cu_i, between cells j and j+1)
    pv = np.zeros((nu, nv), dtype=np.int8)
    seg, k, t = _line_crossings(a[:, 0], d[:, 0], cu0, du)
    if len(seg):
        i = k % nu
        vc = a[seg, 1] + t * d[seg, 1]
        j = np.floor((vc - cv0) / dv).astype(int)
        if periodic_v:
            j = j % nv
            ok = np.ones(len(j), bool)
        else:
            ok = (j >= 0) & (j < nv - 1)
        np.add.at(pv, (i[ok], j[ok]), 1)
    ph %= 2
    pv %= 2
    # adjacency lists as arrays: (cell a, cell b, parity)
    idx = np.arange(nu * nv).reshape(nu, nv)
    ea = [idx.ravel(), idx[:, : nv if periodic_v else nv - 1].ravel()]
    eb = [np.roll(idx, -1, axis=0).ravel(), np.roll(idx, -1, axis=1)[:, : nv if periodic_v else nv - 1].ravel()]
    ep = [ph.ravel(), pv[:, : nv if periodic_v else nv - 1].ravel()]
    if join_apex:
        # both ends of the v-range are the apex
        ea.append(np.array([idx[0, 0]]))
        eb.append(np.array([idx[0, nv - 1]]))
        ep.append(np.array([0], dtype=np.int8))
    ea = np.concatenate(ea)
    eb = np.concatenate(eb)
    ep = np.concatenate(ep).astype(np.int8)
    N = nu * nv
    # regions: components of the graph of non-crossing dual edges
    same = ep == 0
    g0 = coo_matrix((np.ones(same.sum()), (ea[same], eb[same])), shape=(N, N))
    n_regions, region = connected_components(g0, directed=False)
    # two-color the (small) region graph along crossing edges
    ra, rb = region[ea[~same]], region[eb[~same]]
    nbr = [[] for _ in range(n_regions)]
    for x, y in set(zip(ra.tolist(), rb.tolist())):
        nbr[x].append(y)
        nbr[y].append(x)
    rcolor = np.zeros(n_regions, dtype=np.int8)
    for s0 in range(n_regions):
        if rcolor[s0]:
            continue
        rcolor[s0] = 1
        dq = deque([s0])
        while dq:
            x = dq.popleft()
            for y in nbr[x]:
                if not rcolor[y]:
                    rcolor[y] = -rcolor[x]
                    dq.append(y)
    color = rcolor[region]
    flip = color[ea] * color[eb] < 0
    violations = int(np.sum(flip != (ep == 1)))
    return Coloring(X, nu, nv, tuple(ur), tuple(vr), color.reshape(nu, nv),
                    region.reshape(nu, nv), n_regions, violations, len(ea), int(ep.sum()))


# ---------------------------------------------------------------------------
# orientations


@dataclass(eq=False)
class OrientationAssignment:
    """Per-sample signs on each loop, relative to the loop's traversal direction."""

    kind: str
    signs: list                  # list of int arrays, one per loop (0 = undefined)
    samples: list = field(default_factory=list)     # per loop: raw per-sample signs before arc voting
    crossings: list = field(default_factory=list)   # per loop: sample indices of sign changes of D
    arc_signs: list = field(default_factory=list)   # per loop: sign on each arc between crossings

    def loop_sign(self, k: int) -> int:
        """Majority sign on component c_k (1-based)."""
        s = self.signs[k - 1]
        tot = int(np.sign(np.sum(s)))
        return tot

    def sign_at(self, comp, idx) -> np.ndarray:
        return np.array([self.signs[c - 1][i] for c, i in zip(np.atleast_1d(comp), np.atleast_1d(idx))])

    def flipped(self) -> "OrientationAssignment":
        return OrientationAssignment(self.kind, [-s for s in self.signs],
                                     [-s for s in self.samples], self.crossings,
                                     [[-x for x in a] for a in self.arc_signs])

    def equal_up_to_flip(self, other: "OrientationAssignment") -> bool:
        prod = np.concatenate([a * b for a, b in zip(self.signs, other.signs)])
        prod = prod[prod != 0]
        return bool(len(prod)) and (np.all(prod == 1) or np.all(prod == -1))

    def to_json(self) -> dict:
        return {"kind": self.kind,
                "loop_signs": [self.loop_sign(k + 1) for k in range(len(self.signs))],
                "arc_signs": [list(map(int, a)) for a in self.arc_signs]}


def _anchor(signs: list) -> list:
    """Fix the global flip: the first defined sample of the lowest component is +1."""
    for s in signs:
        nz = s[s != 0]
        if len(nz):
            if nz[0] < 0:
                return [-x for x in signs]
            return signs
    return signs


def d_orientation(locus: RealLocus, D: MultiForm, coloring: Coloring,
                  D0: MultiForm | None = None, guard: float = 0.5) -> OrientationAssignment:
    """Boundary orientation of the positively colored side, along every loop.

    D is the full plane-section form; D0 (optional) is the linear form whose
    square divides D on X (the even-multiplicity part).  Samples within
    ``guard`` grid cells of the section are left undefined and get the sign
    of their arc.
    """
    X = locus.quadric
    chart = chart_map(X)
    Dn = D.normalized()
    offset = 1.5 * coloring.cell_size
    signs, samples, crossings, arc_signs = [], [], [], []
    for lp in locus.loops:
        uv = lp.chart
        nxt = np.roll(uv, -1, axis=0)
        prv = np.roll(uv, 1, axis=0)
        tan = nxt - prv
        tan[:, 0] = _wrap(tan[:, 0])
        if X.kind == "hyperboloid":
            tan[:, 1] = _wrap(tan[:, 1])
        tan /= np.linalg.norm(tan, axis=1, keepdims=True)
        left = np.stack([-tan[:, 1], tan[:, 0]], axis=1)
        raw = coloring.color_at(uv + offset * left).astype(int)
        right = coloring.color_at(uv - offset * left).astype(int)
        raw = np.where(raw == right, 0, raw)      # offset landed across another arc
        # sign of D along the loop (for D0-type sections, of the linear factor)
        lin = D0.normalized() if D0 is not None else Dn
        hv = evaluate_form(lin, lp.points)
        sgn = np.sign(hv)
        closing = -sgn[0] if (lp.antipodal and lin.degree % 2) else sgn[0]
        change = np.nonzero(sgn != np.append(sgn[1:], closing))[0]
        # samples near a crossing are undefined
        dist = np.abs(hv) / np.maximum(np.linalg.norm(form_gradient(lin, lp.points), axis=1), 1e-300)
        guarded = np.where(dist < guard * coloring.cell_size, 0, raw)
        cross = [] if D0 is not None else change.tolist()
        arcs = _split_arcs(len(uv), cross)
        s = np.zeros(len(uv), dtype=int)
        arc_s = []
        for arc in arcs:
            tot = int(np.sign(guarded[arc].sum())) or int(np.sign(raw[arc].sum()))
            arc_s.append(tot)
            s[arc] = tot
        signs.append(s)
        samples.append(guarded)
        crossings.append(cross)
        arc_signs.append(arc_s)
    anchored = _anchor(signs)
    if signs and anchored[0] is not signs[0]:
        samples = [-x for x in samples]
    arc_signs = [[int(x) for x in _arcs_from(s, c)] for s, c in zip(anchored, crossings)]
    return OrientationAssignment("D", anchored, samples, crossings, arc_signs)


def _split_arcs(n: int, cross: list) -> list:
    """Index arrays of the cyclic arcs between crossing samples."""
    if not cross:
        return [np.arange(n)]
    cross = sorted(cross)
    arcs = []
    for a, b in zip(cross, cross[1:] + [cross[0] + n]):
        arcs.append(np.arange(a + 1, b + 1) % n)
    return arcs


def _arcs_from(s, cross):
    return [s[arc[len(arc) // 2]] for arc in _split_arcs(len(s), cross)]


def residue_sign(forms, H: MultiForm, p, v) -> np.ndarray:
    """sign(H(p) det[p, a, b, v]) with [a b] dual to the gradients of the curve.

    This is the sign of the residue form H/(Q K) along the velocity v.
    """
    p = np.atleast_2d(p)
    v = np.atleast_2d(v)
    G = np.stack([form_gradient(forms[0], p), form_gradient(forms[1], p)], axis=1)
    AB = np.swapaxes(G, 1, 2) @ np.linalg.inv(G @ np.swapaxes(G, 1, 2))
    M = np.stack([p, AB[:, :, 0], AB[:, :, 1], v], axis=1)
    return np.sign(evaluate_form(H, p) * np.linalg.det(M))


def morphism_velocity_sign(S0: MultiForm, S1: MultiForm, p, v) -> np.ndarray:
    """sign of d(S1/S0)(v) at p, invariant under (p, v) -> (-p, -v)."""
    p = np.atleast_2d(p)
    v = np.atleast_2d(v)
    num = (evaluate_form(S0, p) * np.sum(form_gradient(S1, p) * v, axis=1)
           - evaluate_form(S1, p) * np.sum(form_gradient(S0, p) * v, axis=1))
    return np.sign(num)


def complex_orientation(locus: RealLocus, f) -> OrientationAssignment:
    """Orientation along which the certified separating morphism f increases."""
    if getattr(f, "certificate", None) is None or not f.certificate.ok:
        raise TopologyError("complex orientation needs a certified separating morphism")
    signs = []
    for lp in locus.loops:
        s = morphism_velocity_sign(f.S0, f.S1, lp.points, lp.tangents()).astype(int)
        maj = int(np.sign(s.sum()))
        signs.append(np.full(len(s), maj))
    return OrientationAssignment("complex", _anchor(signs))


def hyper_d_orientation(H, xbar, x, y, dx) -> np.ndarray:
    """Sign of prod (x - xbar_j)^2 dx / y at curve points (x, y) moving by dx."""
    xbar = np.asarray(xbar, dtype=float)
    if len(np.unique(xbar)) != len(xbar):
        raise TopologyError("repeated fiber x-values")
    x = np.asarray(x, dtype=float)
    w = np.prod((x[..., None] - xbar) ** 2, axis=-1) if len(xbar) else np.ones_like(x)
    return np.sign(w * np.asarray(dx, dtype=float) / np.asarray(y, dtype=float)).astype(int)


def hyper_complex_orientation(f, x, y, dx) -> np.ndarray:
    """Sign of df along (dx, dy) on y^2 = F for f = (a + y)/c."""
    return np.sign(f.derivative_x(x, y) * np.asarray(dx, dtype=float)).astype(int)


# ---------------------------------------------------------------------------
# linking


def is_linked(line, loop: TracedLoop, tol: float = 1e-6) -> bool:
    """Mod-2 linking of a real projective line with a null-homologous loop.

    The loop (lifted to the sphere) winds n times around the great circle
    over the line; in projection to the plane orthogonal to the line this
    is the crossing parity.  Linked iff n is odd.
    """
    B = line.basis()
    comp = np.linalg.svd(B, full_matrices=True)[2][2:]
    pts = loop.points
    z = pts @ comp.T
    rad = np.linalg.norm(z, axis=1)
    if rad.min() < tol:
        raise TopologyError("line meets the loop")
    if loop.antipodal:
        raise TopologyError("loop is not null-homologous in RP^3")
    ang = np.arctan2(z[:, 1], z[:, 0])
    dang = _wrap(np.diff(np.append(ang, ang[0])))
    n = int(np.round(dang.sum() / (2 * np.pi)))
    return bool(n % 2)


# ---------------------------------------------------------------------------
# orientation obstruction


def obstruction_check(d_signs, c_signs, on_D=None, D_values=None, tol: float = 1e-9) -> str:
    """Compare D- and complex orientations at the points of P outside D.

    Returns "consistent" when the two agree everywhere up to one global flip
    (the forbidden configuration), "obstructed-ok" otherwise and "vacuous"
    when no point of P lies off D.
    """
    d = np.asarray(d_signs, dtype=int)
    c = np.asarray(c_signs, dtype=int)
    on = np.zeros(len(d), bool) if on_D is None else np.asarray(on_D, bool)
    if D_values is not None:
        near = np.abs(np.asarray(D_values)) < tol
        if np.any(near & ~on):
            raise TopologyError("a point of P lies on D but is not declared in D")
    keep = ~on
    if not np.any(keep):
        return "vacuous"
    prod = d[keep] * c[keep]
    if np.any(prod == 0):
        raise TopologyError("orientation undefined at a point of P outside D")
    if np.all(prod == prod[0]):
        return "consistent"
    return "obstructed-ok"
