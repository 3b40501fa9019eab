import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sepsemi.algebra import MultiForm, evaluate_form
from sepsemi.quadric import HomologyClass, Line, chart_map
from sepsemi.topology import (TopologyError, TracedLoop, chessboard_coloring, complex_orientation,
                              d_orientation, is_linked, obstruction_check, trace_section)

COLOR_ROWS = [("ellipsoid", 3, 3), ("cone", 3, 2), ("hyperboloid", 3, 0), ("hyperboloid", 3, 2)]


def _surface_samples(X, n, rng):
    chart = chart_map(X)
    (u0, u1), (v0, v1) = chart.domain
    pad = 0.02 * (v1 - v0)
    uv = rng.uniform([u0, v0 + pad], [u1, v1 - pad], size=(n, 2))
    return chart(uv[:, 0], uv[:, 1]), uv


@pytest.mark.parametrize("key", COLOR_ROWS)
def test_coloring_matches_sign_oracle(model, sections, key, rng):
    """K * D has even degree, so its sign is a valid chess-board coloring."""
    C, L = model(*key)
    S = sections(*key)[0]
    X = C.quadric
    pts, uv = _surface_samples(X, 4000, rng)
    oracle = np.sign(evaluate_form(C.cubic.normalized(), pts) * evaluate_form(S.D, pts))
    got = S.coloring.color_at(uv)
    # stay away from the curves, where the grid cannot resolve the side
    far = np.abs(evaluate_form(C.cubic.normalized(), pts)) > 0.02
    far &= np.abs(evaluate_form(S.D, pts)) > 0.02
    agree = np.mean(got[far] == oracle[far])
    assert agree in (0.0, 1.0)


@pytest.mark.parametrize("key", COLOR_ROWS)
def test_coloring_flips_on_every_crossing_edge(sections, key):
    for S in sections(*key):
        col = S.coloring
        assert col.violations == 0
        assert col.edges_flipping > 0


def test_curve_alone_on_ellipsoid_is_colorable(model):
    C, L = model("ellipsoid", 3, 3)
    col = chessboard_coloring(C.quadric, L.loops)
    assert col.violations == 0


def test_odd_class_is_not_colorable(model):
    _, L = model("hyperboloid", 1, 0)
    with pytest.raises(TopologyError):
        chessboard_coloring(L.quadric, L.loops)


@pytest.mark.parametrize("key", COLOR_ROWS)
def test_d_orientation_flips_exactly_at_crossings(sections, key):
    seen = 0
    for S in sections(*key):
        ori = S.orientation
        for s, cross, arcs in zip(ori.samples, ori.crossings, ori.arc_signs):
            if len(cross) < 2:
                continue
            seen += 1
            # consecutive arcs have opposite sides
            assert all(a == -b for a, b in zip(arcs, arcs[1:] + arcs[:1]))
            # inside one arc the raw (guarded) samples never disagree
            n = len(s)
            cs = sorted(cross)
            for a, b in zip(cs, cs[1:] + [cs[0] + n]):
                vals = s[np.arange(a + 1, b + 1) % n]
                vals = vals[vals != 0]
                assert len(set(vals.tolist())) <= 1
    assert seen > 0


@pytest.mark.parametrize("key", [("ellipsoid", 3, 3), ("cone", 3, 2), ("cone", 3, 0)])
def test_d_orientation_constant_across_double_plane(model, key, rng):
    """D = D0^2 adds no arcs: the side never changes where the curve meets D0.

    On the cone D0 is tangent along a generator (a double generator)."""
    C, L = model(*key)
    X = C.quadric
    checked = 0
    for _ in range(6):
        if X.kind == "cone":
            p, _ = _surface_samples(X, 1, rng)
            D0 = MultiForm.linear(X.form.to_matrix() @ p[0]).normalized()
        else:
            D0 = MultiForm.linear(rng.normal(size=4)).normalized()
        col = chessboard_coloring(X, L.loops, sections=[D0])
        ori = d_orientation(L, D0 * D0, col, D0=D0)
        for lp, s in zip(L.loops, ori.samples):
            # the loop meets D0 (a sign change, or a touch for a tangent plane)
            if np.abs(evaluate_form(D0, lp.points)).min() > 0.02:
                continue
            checked += 1
            vals = s[s != 0]
            assert len(set(vals.tolist())) == 1
    assert checked > 0


def test_complex_orientations_agree_up_to_flip(model, realized):
    models_checked = 0
    for key in [("ellipsoid", 3, 3), ("cone", 3, 0), ("cone", 3, 2), ("hyperboloid", 3, 2),
                ("hyperboloid", 3, 0)]:
        _, L = model(*key)
        oks = [R.morphism for R in realized(*key) if R.ok]
        assert len(oks) >= 2
        base = complex_orientation(L, oks[0])
        for f in oks[1:]:
            assert base.equal_up_to_flip(complex_orientation(L, f))
        models_checked += 1
    assert models_checked >= 3


def test_complex_orientation_needs_certificate(model, realized):
    _, L = model("ellipsoid", 3, 3)
    f = realized("ellipsoid", 3, 3)[0].morphism.reparametrized(np.eye(2))
    with pytest.raises(TopologyError):
        complex_orientation(L, f)


def _circle(center, radius, n=400):
    t = np.linspace(0, 2 * np.pi, n, endpoint=False)
    pts = np.stack([np.ones(n), center[0] + radius * np.cos(t), center[1] + radius * np.sin(t),
                    np.zeros(n)], axis=1)
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return TracedLoop(pts, np.zeros((n, 2)), False, HomologyClass("ellipsoid"), True)


def test_linking_of_line_and_circle():
    loop = _circle((0.0, 0.0), 1.0)
    through = Line(np.array([1.0, 0.2, 0.1, 0.0]), np.array([0.0, 0.0, 0.0, 1.0]))
    outside = Line(np.array([1.0, 3.0, 0.0, 0.0]), np.array([0.0, 0.0, 0.0, 1.0]))
    assert is_linked(through, loop)
    assert not is_linked(outside, loop)
    with pytest.raises(TopologyError):
        is_linked(Line(np.array([1.0, 1.0, 0.0, 0.0]), np.array([0.0, 0.0, 0.0, 1.0])), loop)


def test_obstruction_cases():
    assert obstruction_check([1, -1, 1], [1, -1, 1]) == "consistent"
    assert obstruction_check([1, -1, 1], [-1, 1, -1]) == "consistent"
    assert obstruction_check([1, 1, 1], [1, -1, 1]) == "obstructed-ok"
    assert obstruction_check([1, 1], [1, -1], on_D=[True, True]) == "vacuous"
    # a point on D is excluded from the comparison
    assert obstruction_check([1, 1, -1], [1, 1, 1], on_D=[False, False, True]) == "consistent"
    with pytest.raises(TopologyError):
        obstruction_check([1, 0], [1, 1])
    with pytest.raises(TopologyError):
        obstruction_check([1, 1], [1, 1], D_values=[0.0, 1.0])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.sampled_from([-1, 1]), min_size=1, max_size=12), st.sampled_from([-1, 1]))
def test_obstruction_invariant_under_global_flip(d, s):
    c = [x * s for x in d]
    assert obstruction_check(d, c) == "consistent"
    assert obstruction_check(d, [-x for x in c]) == "consistent"


@pytest.mark.parametrize("key", [("ellipsoid", 3, 3), ("hyperboloid", 3, 0)])
def test_section_loops_lie_on_the_plane(model, sections, key):
    C, _ = model(*key)
    S = sections(*key)[0]
    for lp in trace_section(C.quadric, S.D):
        assert np.abs(evaluate_form(S.D, lp.points)).max() < 1e-9
