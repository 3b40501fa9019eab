"""Runtime assertions on certified morphisms: orientation obstruction, interlacing, Abel sums."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import MultiForm, evaluate_form
from .morphisms import (InterlacingError, MorphismError, abel_residual_space, fiber_at,
                        interlacing_check)
from .topology import (TopologyError, chessboard_coloring, complex_orientation, d_orientation,
                       obstruction_check, trace_section)


@dataclass(eq=False)
class SectionData:
    D: MultiForm
    coloring: object
    orientation: object
    n_real_loops: int


def random_sections(C, locus, n: int = 10, seed: int = 0, max_draws: int = 60) -> list:
    """Real plane sections D with their colorings and D-orientations.

    Planes whose real part is tangent to the curve at grid resolution are
    skipped; draws are deterministic in ``seed``.
    """
    X = C.quadric
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(max_draws):
        if len(out) >= n:
            break
        D = MultiForm.linear(rng.normal(size=4)).normalized()
        try:
            sec = trace_section(X, D, step=0.01)
            col = chessboard_coloring(X, list(locus.loops) + sec, sections=[D])
            ori = d_orientation(locus, D, col)
        except TopologyError:
            continue
        if any(0 in a for a in ori.arc_signs):
            continue
        out.append(SectionData(D, col, ori, len(sec)))
    return out


@dataclass
class CheckReport:
    obstruction: dict = field(default_factory=dict)
    interlacing_pairs: int = 0
    interlacing_failures: int = 0
    abel_max: float = 0.0
    errors: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (self.obstruction.get("consistent", 0) == 0 and self.interlacing_failures == 0
                and self.abel_max < 1e-6 and not self.errors)

    def to_json(self) -> dict:
        return {"obstruction": dict(sorted(self.obstruction.items())),
                "interlacing_pairs": self.interlacing_pairs,
                "interlacing_failures": self.interlacing_failures,
                "abel_max": float(f"{self.abel_max:.2g}"), "errors": list(self.errors), "ok": self.ok}


def check_morphism(f, locus, sections, thetas=(0.2, 0.9, 1.7, 2.6), delta: float = 0.05) -> CheckReport:
    """Orientation obstruction on sampled fibers, interlacing and Abel residuals."""
    rep = CheckReport()
    co = complex_orientation(locus, f)
    fibers = {}
    for th in thetas:
        for t in (th, th + delta, th + np.pi / 2):
            fibers[t] = fiber_at(f, t % np.pi, locus)
    for th in thetas:
        P = fibers[th]
        for S in sections:
            Dv = evaluate_form(S.D, P.real_points)
            on = np.abs(Dv) < 1e-9
            try:
                res = obstruction_check(S.orientation.sign_at(P.components, P.indices),
                                        co.sign_at(P.components, P.indices), on_D=on)
            except TopologyError as e:
                rep.errors.append(str(e))
                continue
            rep.obstruction[res] = rep.obstruction.get(res, 0) + 1
        for t2 in (th + delta, th + np.pi / 2):
            rep.interlacing_pairs += 1
            try:
                if not interlacing_check(P, fibers[t2], locus.r):
                    rep.interlacing_failures += 1
            except InterlacingError as e:
                rep.errors.append(str(e))
        try:
            rep.abel_max = max(rep.abel_max, abel_residual_space(f, P))
        except (MorphismError, np.linalg.LinAlgError) as e:
            rep.errors.append(f"abel: {e}")
    return rep
