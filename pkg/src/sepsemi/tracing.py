"""Predictor-corrector tracing of real space curves {Q = 0, F = 0} in RP^3.

Points are kept as unit vectors of R^4; a closed real loop either closes up
(p -> p) or comes back antipodally (p -> -p).
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

from .algebra import MultiForm, evaluate_form, form_gradient, generalized_cross
from .intersect import intersect_with_form, line_family, real_representative
from .quadric import Quadric


class TracingError(RuntimeError):
    def __init__(self, message, seed=None):
        super().__init__(message)
        self.seed = seed


def tangent(forms, p) -> np.ndarray:
    """Unit tangent of the curve at unit points p (orthogonal to p)."""
    g1 = form_gradient(forms[0], p)
    g2 = form_gradient(forms[1], p)
    t = generalized_cross(p, g1, g2)
    return t / np.linalg.norm(t, axis=-1, keepdims=True)


def correct(forms, p, tol: float = 1e-12, iters: int = 8):
    """Minimum-norm Newton projection of p back onto the curve."""
    p = p / np.linalg.norm(p)
    for _ in range(iters):
        r = np.array([evaluate_form(f, p) for f in forms])
        if np.max(np.abs(r)) < tol:
            return p, True
        J = np.array([form_gradient(f, p) for f in forms])
        J = J - np.outer(J @ p, p)
        try:
            d = J.T @ np.linalg.solve(J @ J.T, r)
        except np.linalg.LinAlgError:
            return p, False
        p = p - d
        p = p / np.linalg.norm(p)
    r = np.array([evaluate_form(f, p) for f in forms])
    return p, bool(np.max(np.abs(r)) < tol * 100)


def trace_loop(forms, seed, step: float = 0.01, tol: float = 1e-12,
               max_steps: int = 200_000) -> tuple[np.ndarray, bool]:
    """Trace the closed real loop through ``seed``.

    Returns (samples, antipodal) where antipodal means the lift ends at -start.
    """
    p, ok = correct(forms, np.asarray(seed, dtype=float), tol)
    if not ok:
        raise TracingError("corrector diverged at seed", seed)
    start = p.copy()
    t = tangent(forms, p)
    pts = [p]
    h = step
    travelled = 0.0
    for _ in range(max_steps):
        q, ok = correct(forms, p + h * t, tol)
        if ok:
            tq = tangent(forms, q)
            if np.dot(tq, t) < 0:
                tq = -tq
            dist = np.linalg.norm(q - p)
            if dist < 2 * h and np.dot(tq, t) > np.cos(0.3):
                p, t = q, tq
                travelled += dist
                h = min(step, h * 1.5)
                d_same = np.linalg.norm(p - start)
                d_anti = np.linalg.norm(p + start)
                if travelled > 4 * step and min(d_same, d_anti) < 0.75 * step:
                    return np.array(pts), bool(d_anti < d_same)
                pts.append(p)
                continue
        h /= 2
        if h < step * 1e-4:
            raise TracingError("step size underflow while tracing", seed)
    raise TracingError("loop did not close within the step budget", seed)


def slice_seeds(X: Quadric, F: MultiForm, n_planes: int = 48, seed: int = 11,
                tol_im: float = 1e-7) -> np.ndarray:
    """Real points of {Q = F = 0} on a pencil of planes through a random line."""
    rng = np.random.default_rng(seed)
    L = rng.normal(size=(2, 4))
    comp = np.linalg.svd(L)[2][2:]          # orthonormal complement of the line
    fam = line_family(X, seed=seed)
    out = []
    for th in np.linspace(0, np.pi, n_planes, endpoint=False):
        H = MultiForm.linear(np.cos(th) * comp[0] + np.sin(th) * comp[1])
        pts = intersect_with_form(X, F, H, family=fam).points
        is_real, re, _ = real_representative(pts, tol_im)
        out.extend(re[is_real])
    return np.array(out).reshape(-1, 4)


def trace_all(X: Quadric, F: MultiForm, step: float = 0.01, tol: float = 1e-12,
              seeds=None, n_planes: int = 48):
    """All real loops of {Q = 0, F = 0}, deduplicated."""
    Qn = X.form.normalized()
    Fn = F.normalized()
    forms = (Qn, Fn)
    if seeds is None:
        seeds = slice_seeds(X, Fn, n_planes=n_planes)
    loops = []
    trees = []
    for s in seeds:
        s = s / np.linalg.norm(s)
        if any(min(tr.query(s)[0], tr.query(-s)[0]) < 3 * step for tr in trees):
            continue
        pts, anti = trace_loop(forms, s, step, tol)
        loops.append((pts, anti))
        trees.append(cKDTree(pts))
    return loops
