"""End-to-end verification pipelines and deterministic JSON reports."""

from __future__ import annotations

import json
import os
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .checks import check_morphism, random_sections
from .hyperelliptic import (abel_sum_residual, affine_chessboard, alternating_divisor,
                            chart_d_orientation, hyper_certificate, hyper_fiber_at,
                            hyper_interlacing, hyper_pencil_from_divisor, projection, q_basis)
from .models import model_hyperelliptic, model_sextic
from .morphisms import sample_thetas
from .realizations import realize_row
from .semigroups import (RealizationLedger, closure_up_to_bound, compare_up_to_bound,
                         table1_description, theorem2_description)
from .topology import hyper_d_orientation


def default_seed() -> int:
    return int(os.environ.get("SEPSEMI_SEED", "0"))


@dataclass
class VerifyParams:
    seed: int = field(default_factory=default_seed)
    samples: int = 200
    step: float = 0.01
    tol_im: float = 1e-6
    epsilon: float | None = None
    n_sections: int = 10
    abel_samples: int = 20


@dataclass
class VerificationReport:
    subject: dict
    body: dict
    verdict: bool
    runtime: float = 0.0            # kept out of the JSON so reruns are byte-identical

    def to_json(self) -> dict:
        return {"subject": self.subject, **self.body, "verdict": "pass" if self.verdict else "fail"}

    def dumps(self) -> str:
        return json.dumps(_plain(self.to_json()), indent=2, sort_keys=True) + "\n"


def _plain(x):
    """JSON-ready copy with floats rounded to 10 significant digits."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not np.isfinite(x):
            return str(x)
        return float(f"{x:.10g}")
    return x


def run_verify_table(kind: str, r: int, l: int, bound: int = 8,
                     params: VerifyParams | None = None) -> VerificationReport:
    """Model, realizations, runtime checks and closure against the table row."""
    params = params or VerifyParams()
    t0 = time.perf_counter()
    oracle = table1_description(kind, r, l)
    C, locus = model_sextic(kind, r, l, eps=params.epsilon, step=params.step)
    reals = realize_row(C, locus, kind, r, l, n_samples=params.samples, seed=params.seed)
    sections = random_sections(C, locus, params.n_sections, seed=params.seed)
    ledger = RealizationLedger(locus.r)
    checks = []
    for k, R in enumerate(reals):
        if ledger.add_realization(R, certificate=f"R{k}"):
            checks.append(check_morphism(R.morphism, locus, sections))
    closure = closure_up_to_bound(ledger, bound) if ledger.entries else set()
    diff = compare_up_to_bound(closure, oracle, bound)
    ok = all(R.ok for R in reals) and diff["equal"] and all(c.ok for c in checks)
    body = {
        "curve": {"epsilon": C.provenance.get("epsilon"),
                  "smoothness": C.smoothness.to_json() if C.smoothness else None},
        "topology": locus.summary(),
        "realizations": [R.to_json() for R in reals],
        "ledger": ledger.to_json(),
        "oracle": {"description": str(oracle), **oracle.to_json()},
        "comparison": diff,
        "checks": {"n_sections": len(sections),
                   "per_morphism": [c.to_json() for c in checks]},
        "params": asdict(params) | {"bound": bound},
    }
    return VerificationReport({"kind": kind, "r": r, "l": l}, body, ok, time.perf_counter() - t0)


def hyper_speciality_rank(H, xs) -> int:
    """Rank of the conditions q(x_j) = 0 on q of degree < g (h^0(K - D) = g - rank)."""
    xs = np.unique(np.round(np.asarray(xs, dtype=float), 12))
    if H.g == 0:
        return 0
    return int(np.linalg.matrix_rank(np.vander(xs, H.g, increasing=True), tol=1e-9))


def run_verify_hyper(g: int, bound: int = 10, params: VerifyParams | None = None,
                     delta: float = 0.1) -> VerificationReport:
    """Projection, alternating pencil, Abel sums, interlacing and closure for genus g."""
    params = params or VerifyParams()
    t0 = time.perf_counter()
    oracle = theorem2_description(g)
    H = model_hyperelliptic(g, delta=delta)
    proj = projection(H)
    hyper_certificate(proj, params.samples, params.tol_im)
    alt = hyper_pencil_from_divisor(H, alternating_divisor(H))
    hyper_certificate(alt, params.samples, params.tol_im)
    rng = np.random.default_rng(params.seed)

    # Abel sums at random regular values (away from t = +-1 and the poles)
    abel = 0.0
    ths = []
    while len(ths) < params.abel_samples:
        th = rng.uniform(0, np.pi)
        if min(abs(th - np.pi / 4), abs(th - 3 * np.pi / 4), abs(th - np.pi / 2)) > 1e-3:
            ths.append(th)
    for th in ths:
        for q in q_basis(g):
            res, scale = abel_sum_residual(alt, th, q)
            abel = max(abel, res / scale)

    # interlacing of sampled fiber pairs
    grid = sample_thetas(24) + 0.01
    fibers = [hyper_fiber_at(alt, th) for th in grid]
    pairs = fails = 0
    for i in range(len(fibers)):
        for j in range(i + 1, len(fibers)):
            pairs += 1
            fails += not hyper_interlacing(fibers[i], fibers[j], H.r)

    # D-orientation against the affine chess-board coloring
    sp = np.array(H.spread)
    xr = (sp[0] - 1.0, sp[-1] + 1.0)
    col = affine_chessboard(H, xr, 1.2 * float(np.sqrt(H.F(np.array(xr))).max()))
    x = rng.uniform(sp[0] - 0.5, sp[-1] + 0.5, 50)
    y = rng.choice([-1.0, 1.0], 50) * np.sqrt(H.F(x))
    dx = rng.choice([-1.0, 1.0], 50)
    xbar = np.sort(rng.uniform(sp[0], sp[-1], max(g - 1, 0)))
    a = hyper_d_orientation(H, xbar, x, y, dx)
    b = chart_d_orientation(H, col, x, y, dx)
    d_match = bool(np.all(a == b) or np.all(a == -b))

    ledger = RealizationLedger(H.r)
    proj_rank = hyper_speciality_rank(H, [0.0])
    alt_rank = hyper_speciality_rank(H, alt.P[:, 0])
    if proj.degree_vector is not None:
        ledger.add(proj.degree_vector, "projection", proj_rank == g, proj_rank, full_rank=g)
    if alt.degree_vector is not None:
        ledger.add(alt.degree_vector, "alternating", alt_rank == g, alt_rank, full_rank=g)
    closure = closure_up_to_bound(ledger, bound) if ledger.entries else set()
    diff = compare_up_to_bound(closure, oracle, bound)
    m = (g + 1) // 2
    want_proj = (1, 1) if g % 2 else (2,)
    want_alt = (m, m) if g % 2 else (g + 1,)
    ok = (proj.degree_vector == want_proj and alt.degree_vector == want_alt and abel < 1e-6
          and fails == 0 and d_match and diff["equal"])
    body = {
        "curve": H.to_json(),
        "projection": proj.to_json() | {"speciality_rank": proj_rank},
        "alternating": alt.to_json() | {"speciality_rank": alt_rank},
        "abel": {"max_relative_residual": float(f"{abel:.2g}"), "samples": len(ths),
                 "q_basis_size": g},
        "interlacing": {"pairs": pairs, "failures": int(fails)},
        "d_orientation": {"samples": 50, "matches_coloring": d_match,
                          "coloring_violations": col.violations},
        "ledger": ledger.to_json(),
        "oracle": {"description": str(oracle), **oracle.to_json()},
        "comparison": diff,
        "params": asdict(params) | {"bound": bound, "delta": delta},
    }
    return VerificationReport({"genus": g}, body, ok, time.perf_counter() - t0)
