"""Per-row realization recipes: which pencils realize which degree vectors.

Every recipe is a deterministic search over a small candidate list; the
first candidate whose separating certificate reports the target degree
vector is kept.  Nothing is trusted without the sampling certificate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from .algebra import MultiForm, evaluate_form, form_gradient
from .intersect import intersect_with_form, real_representative
from .morphisms import (MorphismError, MorphismRep, base_point_free, fiber_at, is_special_divisor,
                        kappa, plane_pencil, quadric_pencil_through, separating_certificate)
from .quadric import Line, chart_map, cone_generator, loop_class, ruling_line
from .topology import RealLocus, trace_section


@dataclass(eq=False)
class Realization:
    name: str
    target: tuple
    morphism: MorphismRep | None
    degree_vector: tuple | None
    non_special: bool = False
    speciality: dict = field(default_factory=dict)
    attempts: int = 0
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.degree_vector is not None and tuple(self.degree_vector) == tuple(self.target)

    def to_json(self) -> dict:
        out = {"name": self.name, "target": list(self.target),
               "degree_vector": list(self.degree_vector) if self.degree_vector else None,
               "certified": self.ok, "non_special": self.non_special,
               "speciality": self.speciality, "attempts": self.attempts}
        if self.morphism is not None and self.morphism.certificate is not None:
            out["certificate"] = self.morphism.certificate.to_json()
            out["morphism_kind"] = self.morphism.kind
            out["degree"] = self.morphism.degree
        if self.note:
            out["note"] = self.note
        return out


def _certify(f, locus, n_samples):
    dv, cert = separating_certificate(f, locus, n_samples)
    return dv


def _speciality(f: MorphismRep, locus, thetas=(np.pi / 2, 0.3, 1.1, 2.2)) -> tuple[bool, dict]:
    """Non-special iff sampled fibers have rank-4 point matrices (and P is base-point free)."""
    ranks, ratios = [], []
    for th in thetas:
        fb = fiber_at(f, th, locus)
        rep = is_special_divisor(fb.real_points if fb.all_real else fb.points)
        ranks.append(rep.rank)
        sv = rep.singular_values
        ratios.append(sv[-1] / sv[0] if len(sv) > 1 else 0.0)
    ns = min(ranks) == 4
    info = {"ranks": ranks, "min_sigma_ratio": float(f"{min(ratios):.3g}")}
    if ns and "P" in f.meta:
        info["base_point_free"] = base_point_free(np.array(f.meta["P"]))
        ns = ns and info["base_point_free"]
    return ns, info


def _finish(name, target, f, locus, attempts, note=""):
    ns, info = _speciality(f, locus)
    return Realization(name, tuple(target), f, f.degree_vector, ns, info, attempts, note)


def _failed(name, target, attempts, note):
    return Realization(name, tuple(target), None, None, False, {}, attempts, note)


def _arc_index(loop, pos):
    return int(np.searchsorted(loop.arclength[:-1] / loop.length, pos % 1.0, side="right") - 1)


# ---------------------------------------------------------------------------
# plane pencils


def realize_point_pencil(C, locus: RealLocus, i: int, j: int, target, n_samples=200,
                         anchor_line=None, grid: int = 8):
    """Pencil of planes through a point of c_i and a point of c_j."""
    li, lj = locus.loop(i), locus.loop(j)
    cands = []
    if anchor_line is not None:
        a, b = anchor_line
        line = Line(np.asarray(a, float), np.asarray(b, float))
        cands.append((int(np.argmin(line.distance(li.points))), int(np.argmin(line.distance(lj.points)))))
    for s in range(grid):
        for t in range(grid):
            cands.append((_arc_index(li, s / grid), _arc_index(lj, (t + 0.5) / grid)))
    for n, (a, b) in enumerate(cands):
        try:
            f = plane_pencil(C, points=[li.points[a], lj.points[b]])
        except MorphismError:
            continue
        if _certify(f, locus, n_samples) == tuple(target):
            f.meta["recipe"] = f"points on c{i}, c{j}"
            return _finish(f"plane pencil through points of c{i}, c{j}", target, f, locus, n + 1)
    return _failed(f"plane pencil through points of c{i}, c{j}", target, len(cands),
                   "no candidate certified")


def realize_line_pencil(C, locus, family: str, target, n_samples=200, values=None):
    """Pencil of planes through a real line of X (a ruling line or a cone generator)."""
    values = np.linspace(0.1, 2 * np.pi + 0.1, 12, endpoint=False) if values is None else values
    X = C.quadric
    for n, v in enumerate(values):
        line = cone_generator(X, v) if family == "generator" else ruling_line(X, family, v)
        try:
            f = plane_pencil(C, line=line)
        except MorphismError:
            continue
        if _certify(f, locus, n_samples) == tuple(target):
            name = "generator pencil" if family == "generator" else f"ruling-{family} projection"
            return _finish(name, target, f, locus, n + 1)
    return _failed(f"{family} line pencil", target, len(values), "no candidate certified")


def section_points(C, H: MultiForm) -> np.ndarray:
    """Real points of C on the plane H, in cyclic order along the section."""
    pts = intersect_with_form(C.quadric, C.cubic.normalized(), H).points
    is_real, re, _ = real_representative(pts, 1e-6)
    re = re[is_real]
    # order by angle in the plane around the section's centre direction
    X = C.quadric
    loops = trace_section(X, H, step=0.02)
    if len(loops) != 1:
        return re
    lp = loops[0]
    d = np.minimum(np.linalg.norm(lp.points[None] - re[:, None], axis=2),
                   np.linalg.norm(lp.points[None] + re[:, None], axis=2))
    order = np.argsort(np.argmin(d, axis=1))
    return re[order]


def realize_section_pairs(C, locus, H: MultiForm, targets, n_samples=200):
    """Pencils through consecutive real points of C on the section H (class a - b)."""
    pts = section_points(C, H)
    comps = locus.locate(pts)[0]
    found = {}
    n = len(pts)
    for k in range(n):
        p, q = pts[k], pts[(k + 1) % n]
        try:
            f = plane_pencil(C, points=[p, q])
        except MorphismError:
            continue
        dv = _certify(f, locus, n_samples)
        if dv is not None and dv in targets and dv not in found:
            f.meta["recipe"] = f"consecutive section points on c{comps[k]}, c{comps[(k + 1) % n]}"
            found[dv] = _finish(f"section pencil c{comps[k]}-c{comps[(k + 1) % n]}", dv, f, locus, k + 1)
    out = []
    for t in targets:
        out.append(found.get(tuple(t)) or _failed("section pencil", t, n, "no consecutive pair certified"))
    return out


def realize_conjugate_pencil(C, locus, target=(4,), n_samples=200):
    """Pencil through a conjugate pair of a class (a - b) section with four real points.

    The section is a small perturbation of the tangent plane along a
    line A0 of X meeting the real curve once and a line B0 of the other
    ruling.
    """
    X = C.quadric
    chart = chart_map(X)
    attempts = 0
    for fam_a, fam_b in (("B", "A"), ("A", "B")):
        for v0 in np.linspace(0.05, 2 * np.pi + 0.05, 16, endpoint=False):
            lineA = ruling_line(X, fam_a, v0)
            if np.sum(real_representative(_line_points_on_curve(C, lineA), 1e-7)[0]) != 1:
                continue
            for u0 in np.linspace(0.3, 2 * np.pi + 0.3, 4, endpoint=False):
                x0 = chart(u0, v0) if fam_a == "A" else chart(v0, u0)
                T = form_gradient(X.form, x0)
                for delta in (0.05, -0.05, 0.1, -0.1):
                    attempts += 1
                    n = T / np.linalg.norm(T) + delta * x0
                    H = MultiForm.linear(n)
                    sec = trace_section(X, H, step=0.02)
                    if len(sec) != 1:
                        continue
                    if loop_class(chart, sec[0].chart).up_to_sign() != (1, -1):
                        continue
                    pts = intersect_with_form(X, C.cubic.normalized(), H).points
                    is_real, _, _ = real_representative(pts, 1e-6)
                    if is_real.sum() != 4:
                        continue
                    z = pts[~is_real][0]
                    try:
                        f = plane_pencil(C, conjugate=z)
                    except MorphismError:
                        continue
                    if _certify(f, locus, n_samples) == tuple(target):
                        f.meta["recipe"] = "conjugate pair of a class a-b section"
                        return _finish("conjugate-pair pencil", target, f, locus, attempts)
    return _failed("conjugate-pair pencil", target, attempts, "no candidate certified")


def _line_points_on_curve(C, line):
    from .morphisms import _line_on_curve

    return _line_on_curve(C, line.p / np.linalg.norm(line.p), line.q / np.linalg.norm(line.q)).points


# ---------------------------------------------------------------------------
# quadric pencils


def abel_directions_consistent(locus: RealLocus, P, comps, idx) -> bool:
    """Necessary condition for |P| to be separating.

    By Abel's theorem the velocities of a deformation in |P| satisfy
    sum_j kappa(p_j, v_j) p_j = 0, so kappa_j s_j spans the kernel of the
    point matrix.  Points on one component must move the same way.
    """
    T = np.array([locus.loop(c).tangents()[i] for c, i in zip(comps, idx)])
    w = np.linalg.svd(np.asarray(P).T)[2][-1]
    s = w / kappa(locus.forms, P, T)
    return all(len(set(np.sign(s[comps == k]))) == 1 for k in set(comps.tolist()))


def realize_quadric_pencil(C, locus: RealLocus, target, n_samples=200, seed: int = 0,
                           max_tries: int = 400):
    """Degree-5 separating pencil of quadric sections with fiber distribution ``target``."""
    rng = np.random.default_rng(seed)
    certified_tries = 0
    for it in range(max_tries):
        P, comps, idx = [], [], []
        for k, n in enumerate(target):
            lp = locus.loop(k + 1)
            off = rng.random()
            for j, x in enumerate((off + (np.arange(n) + 0.6 * rng.random(n)) / n) if n else []):
                i = _arc_index(lp, x)
                P.append(lp.points[i])
                comps.append(k + 1)
                idx.append(i)
        P = np.array(P)
        comps = np.array(comps)
        if not abel_directions_consistent(locus, P, comps, idx):
            continue
        if is_special_divisor(P).special:
            continue
        try:
            f = quadric_pencil_through(C, P, seed=it)
        except MorphismError:
            continue
        certified_tries += 1
        if _certify(f, locus, n_samples) == tuple(target):
            f.meta["recipe"] = "quadric pencil through five real points"
            return _finish("quadric pencil", target, f, locus, it + 1)
    return _failed("quadric pencil", target, max_tries, f"no candidate certified ({certified_tries} built)")


# ---------------------------------------------------------------------------
# plans


def _perms(v):
    return sorted(set(permutations(v)))


PLANS = {
    ("ellipsoid", 3, 3): [("point", (1, 2, 1)), ("quadric", (1, 3, 1)), ("quadric", (1, 2, 2)),
                          ("quadric", (2, 2, 1))],
    ("cone", 3, 0): [("generator", (1, 1, 1)), ("point", (1, 2, 1)), ("quadric", (1, 3, 1)),
                     ("quadric", (1, 2, 2)), ("quadric", (2, 2, 1))],
    ("cone", 3, 2): [("point", (1, 2, 1)), ("quadric", (1, 3, 1)), ("quadric", (1, 2, 2)),
                     ("quadric", (2, 2, 1))],
    ("hyperboloid", 3, 2): [("point", (1, 2, 1)), ("quadric", (1, 3, 1)), ("quadric", (1, 2, 2)),
                            ("quadric", (2, 2, 1))],
    ("hyperboloid", 3, 0): [("ruling", (1, 1, 1)), ("section", _perms((1, 1, 2)))]
    + [("quadric", v) for v in _perms((1, 1, 3)) + _perms((1, 2, 2))],
    ("hyperboloid", 1, 0): [("ruling", (3,)), ("conjugate", (4,)), ("quadric", (5,))],
}


def realize_row(C, locus: RealLocus, kind: str, r: int, l: int, n_samples: int = 200,
                seed: int = 0) -> list:
    """Run the planned realizations of a table row; returns a list of Realization."""
    key = (kind, r, l)
    if key not in PLANS:
        raise ValueError(f"no realization plan for {key}")
    out = []
    anchors = (C.provenance or {}).get("anchors")
    for method, target in PLANS[key]:
        if method == "point":
            line = None
            if anchors:
                A = C.quadric.from_normal(np.array(anchors, dtype=float))
                line = (A[0], A[-1])
            out.append(realize_point_pencil(C, locus, 1, 3, target, n_samples, anchor_line=line))
        elif method == "generator":
            out.append(realize_line_pencil(C, locus, "generator", target, n_samples))
        elif method == "ruling":
            out.append(realize_line_pencil(C, locus, "A", target, n_samples))
        elif method == "section":
            H = MultiForm.linear(C.quadric.normalizer[2])          # y2 = 0: class a - b
            out.extend(realize_section_pairs(C, locus, H, [tuple(t) for t in target], n_samples))
        elif method == "conjugate":
            out.append(realize_conjugate_pencil(C, locus, target, n_samples))
        elif method == "quadric":
            out.append(realize_quadric_pencil(C, locus, target, n_samples, seed=seed))
    return out


def realize_target(C, locus: RealLocus, target, n_samples: int = 200, seed: int = 0):
    """Try every applicable recipe for a single degree vector."""
    target = tuple(int(x) for x in target)
    if len(target) != locus.r:
        raise ValueError(f"target has {len(target)} entries, curve has {locus.r} components")
    deg = sum(target)
    if min(target) < 1:
        raise ValueError("every entry must be at least 1")
    X = C.quadric
    if deg == 5:
        return realize_quadric_pencil(C, locus, target, n_samples, seed=seed)
    if deg == 3 and X.kind == "cone":
        return realize_line_pencil(C, locus, "generator", target, n_samples)
    if deg == 3 and X.kind == "hyperboloid":
        res = realize_line_pencil(C, locus, "A", target, n_samples)
        return res if res.ok else realize_line_pencil(C, locus, "B", target, n_samples)
    if deg == 4 and locus.r == 1:
        return realize_conjugate_pencil(C, locus, target, n_samples)
    if deg == 4:
        if X.kind == "hyperboloid":
            H = MultiForm.linear(X.normalizer[2])
            res = realize_section_pairs(C, locus, H, [target], n_samples)[0]
            if res.ok:
                return res
        i, j = [k + 1 for k in range(locus.r) if target[k] == 1][:2] if target.count(1) >= 2 else (1, 3)
        return realize_point_pencil(C, locus, i, j, target, n_samples)
    if deg == 3:
        return _failed("no recipe", target, 0, "degree 3 needs a real line on the surface")
    return _failed("no recipe", target, 0, "only degrees 3, 4 and 5 are constructed")
