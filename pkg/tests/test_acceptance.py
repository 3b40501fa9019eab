"""Acceptance criteria 1-7, each recorded as one pass/fail line in the run summary."""

import time

import numpy as np
import pytest

from sepsemi.checks import random_sections
from sepsemi.models import model_sextic
from sepsemi.reports import VerifyParams, run_verify_hyper, run_verify_table
from sepsemi.topology import complex_orientation

from conftest import ACCEPTANCE, ROWS

CLASSES = {("hyperboloid", 3, 0): [(1, 1)] * 3, ("hyperboloid", 3, 2): [(0, 0), (0, 0), (1, 1)],
           ("hyperboloid", 1, 0): [(3, 1)]}


def _record(k, ok, detail):
    ACCEPTANCE[k] = (bool(ok), detail)
    print(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def table_reports():
    """Two independent runs of every row's verification pipeline."""
    runs = {}
    for key in ROWS:
        a = run_verify_table(*key, bound=8, params=VerifyParams(seed=0))
        b = run_verify_table(*key, bound=8, params=VerifyParams(seed=0))
        runs[key] = (a, b)
    return runs


@pytest.fixture(scope="module")
def hyper_reports():
    runs = {}
    for g in (2, 3, 4, 5):
        runs[g] = (run_verify_hyper(g, bound=10), run_verify_hyper(g, bound=10))
    return runs


def test_criterion_1_model_topology():
    worst, bad = 0.0, []
    for key in ROWS:
        t0 = time.perf_counter()
        _, L = model_sextic(*key)
        dt = time.perf_counter() - t0
        worst = max(worst, dt)
        classes = sorted(tuple(sorted(map(abs, lp.homology.up_to_sign()), reverse=True))
                         for lp in L.loops)
        if (L.r, L.l) != key[1:] or dt > 60 or (key in CLASSES and classes != sorted(CLASSES[key])):
            bad.append(key)
    _record(1, not bad, f"6 rows, slowest {worst:.1f} s, failing {bad}")


def test_criterion_2_certificates(table_reports):
    n, bad = 0, []
    for key, (rep, _) in table_reports.items():
        for R in rep.body["realizations"]:
            n += 1
            c = R.get("certificate", {})
            if not (R["certified"] and c.get("n_samples") == 200 and c.get("max_im", 1) < 1e-6):
                bad.append((key, R["name"], R["target"]))
    _record(2, not bad and n > 0, f"{n} certificates at 200 samples, failing {bad}")


def test_criterion_3_oracle_agreement(table_reports):
    bad = [key for key, (rep, _) in table_reports.items() if not rep.body["comparison"]["equal"]]
    cone = table_reports[("cone", 3, 0)][0].body
    vecs = {tuple(e["vector"]) for e in cone["ledger"]["entries"]}
    lone = (1, 1, 1) in vecs and not any(v in vecs for v in [(1, 1, 2), (2, 1, 1), (1, 1, 3)])
    _record(3, not bad and lone, f"bound 8 diffs empty except {bad}; cone (3,0) has (1,1,1): {lone}")


def test_criterion_4_hyperelliptic(hyper_reports):
    bad = []
    for g, (rep, _) in hyper_reports.items():
        b = rep.body
        m = (g + 1) // 2
        ok = (b["projection"]["certificate"]["degree_vector"] == ([1, 1] if g % 2 else [2])
              and b["alternating"]["certificate"]["degree_vector"] == ([m, m] if g % 2 else [g + 1])
              and b["abel"]["max_relative_residual"] < 1e-6 and b["abel"]["samples"] == 20
              and b["interlacing"]["failures"] == 0 and b["comparison"]["equal"]
              and rep.runtime <= 60)
        if not ok:
            bad.append(g)
    slow = max(r.runtime for r, _ in hyper_reports.values())
    _record(4, not bad, f"g = 2..5, slowest {slow:.1f} s, failing {bad}")


def test_criterion_5_orientations(model, realized, sections, hyper_reports):
    keys = [("ellipsoid", 3, 3), ("cone", 3, 2), ("hyperboloid", 3, 0), ("hyperboloid", 3, 2)]
    complex_ok = flip_ok = d1_ok = 0
    for key in keys:
        _, L = model(*key)
        fs = [R.morphism for R in realized(*key) if R.ok]
        base = complex_orientation(L, fs[0])
        complex_ok += all(base.equal_up_to_flip(complex_orientation(L, f)) for f in fs[1:])
        secs = sections(*key)
        flip_ok += bool(secs) and all(S.coloring.violations == 0 for S in secs)
        good = True
        for S in secs:
            for arcs in S.orientation.arc_signs:
                if len(arcs) > 1 and not all(a == -b for a, b in zip(arcs, arcs[1:] + arcs[:1])):
                    good = False
        d1_ok += good
    d0_ok = _double_generator_models(model)
    hyper_ok = sum(r.body["d_orientation"]["matches_coloring"] for r, _ in hyper_reports.values())
    ok = min(complex_ok, flip_ok, d1_ok, d0_ok, hyper_ok) >= 3
    _record(5, ok, f"models passing: complex {complex_ok}, coloring {flip_ok}, D1 {d1_ok}, "
                   f"D0 {d0_ok}, hyperelliptic {hyper_ok}")


def _double_generator_models(model):
    """Models on which D = D0^2 never flips the side along any loop."""
    from sepsemi.algebra import MultiForm, evaluate_form
    from sepsemi.quadric import chart_map
    from sepsemi.topology import chessboard_coloring, d_orientation

    good = 0
    rng = np.random.default_rng(3)
    for key in [("ellipsoid", 3, 3), ("cone", 3, 0), ("cone", 3, 2)]:
        C, L = model(*key)
        X = C.quadric
        ok, met = True, 0
        for _ in range(4):
            if X.kind == "cone":
                (u0, u1), (v0, v1) = chart_map(X).domain
                p = chart_map(X)(np.array([rng.uniform(u0, u1)]), np.array([0.5 * (v0 + v1) + 0.3]))[0]
                D0 = MultiForm.linear(X.form.to_matrix() @ p).normalized()
            else:
                D0 = MultiForm.linear(rng.normal(size=4)).normalized()
            col = chessboard_coloring(X, L.loops, sections=[D0])
            ori = d_orientation(L, D0 * D0, col, D0=D0)
            for lp, s in zip(L.loops, ori.samples):
                if np.abs(evaluate_form(D0, lp.points)).min() > 0.02:
                    continue
                met += 1
                ok &= len(set(s[s != 0].tolist())) == 1
        good += ok and met > 0
    return good


def test_criterion_6_obstruction(table_reports):
    consistent = checked = 0
    for rep, _ in table_reports.values():
        for c in rep.body["checks"]["per_morphism"]:
            consistent += c["obstruction"].get("consistent", 0)
            checked += sum(c["obstruction"].values())
    _record(6, consistent == 0 and checked > 0,
            f"{checked} fiber/section comparisons, {consistent} consistent")


def test_criterion_7_determinism(table_reports, hyper_reports):
    diff = [k for k, (a, b) in table_reports.items() if a.dumps() != b.dumps()]
    diff += [g for g, (a, b) in hyper_reports.items() if a.dumps() != b.dumps()]
    verdicts = all(a.verdict for a, _ in table_reports.values()) and all(
        a.verdict for a, _ in hyper_reports.values())
    _record(7, not diff and verdicts, f"10 reports rerun, differing {diff}, all verdicts pass: {verdicts}")
