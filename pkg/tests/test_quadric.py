import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sepsemi.quadric import (HomologyClass, NotASurfaceError, chart_map, classify_quadric,
                             homology_pairing, loop_class, normal_quadric, on_surface, rulings)


@pytest.mark.parametrize("diag, kind", [
    ((1, 1, 1, -1), "ellipsoid"),
    ((1, 1, -1, -1), "hyperboloid"),
    ((1, 1, -1, 0), "cone"),
    ((-1, -1, -1, 1), "ellipsoid"),
])
def test_classify_normal_forms(diag, kind):
    assert classify_quadric(np.diag(diag)).kind == kind


@pytest.mark.parametrize("diag", [(1, 1, 1, 1), (1, 1, 0, 0), (1, -1, 0, 0), (1, 0, 0, 0)])
def test_classify_rejects_non_surfaces(diag):
    with pytest.raises(NotASurfaceError):
        classify_quadric(np.diag(diag))


def test_classify_rejects_asymmetric():
    M = np.diag([1.0, 1.0, -1.0, -1.0])
    M[0, 1] = 1.0
    with pytest.raises(ValueError):
        classify_quadric(M)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["ellipsoid", "hyperboloid", "cone"]),
       st.lists(st.floats(-2, 2, allow_nan=False), min_size=16, max_size=16),
       st.floats(0.1, 10))
def test_kind_invariant_under_coordinate_change(kind, entries, scale):
    A = np.array(entries).reshape(4, 4) + 3 * np.eye(4)
    if abs(np.linalg.det(A)) < 1e-2 or np.linalg.cond(A) > 1e4:
        return
    M = normal_quadric(kind).matrix
    X = classify_quadric(scale * A.T @ M @ A)
    assert X.kind == kind
    # the normalizer takes the matrix to a multiple of the normal form
    N = np.linalg.inv(X.normalizer)
    D = N.T @ X.matrix @ N
    assert np.allclose(D / np.abs(D).max(), M / np.abs(M).max(), atol=1e-6) or \
        np.allclose(D / np.abs(D).max(), -M / np.abs(M).max(), atol=1e-6)


@pytest.mark.parametrize("kind", ["ellipsoid", "hyperboloid", "cone"])
def test_chart_points_lie_on_surface(kind, rng):
    X = normal_quadric(kind)
    chart = chart_map(X)
    (u0, u1), (v0, v1) = chart.domain
    uv = rng.uniform([u0, v0 + 0.01], [u1, v1 - 0.01], size=(50, 2))
    pts = chart(uv[:, 0], uv[:, 1])
    assert all(on_surface(X, p) for p in pts)
    assert np.allclose(chart.coords(pts), uv, atol=1e-9) or kind == "ellipsoid"


def test_hyperboloid_has_two_lines_through_each_point():
    X = normal_quadric("hyperboloid")
    p = np.array([1.0, 0.0, 1.0, 0.0])
    lines = rulings(X, p)
    assert len(lines) == 2
    for L in lines:
        assert all(on_surface(X, q) for q in L.points(5))


def test_cone_has_one_line_and_ellipsoid_none():
    assert len(rulings(normal_quadric("cone"), np.array([0.3, 1.0, 0.0, 1.0]))) == 1
    assert rulings(normal_quadric("ellipsoid"), np.array([1.0, 1.0, 0.0, 0.0])) == []


def test_constant_v_loop_has_class_a():
    chart = chart_map(normal_quadric("hyperboloid"))
    u = np.linspace(0, 2 * np.pi, 200, endpoint=False)
    assert loop_class(chart, np.stack([u, np.full_like(u, 0.7)], 1)).as_tuple() == (1, 0)
    assert loop_class(chart, np.stack([np.full_like(u, 0.7), u], 1)).as_tuple() == (0, 1)


def test_pairing_of_rulings():
    a = HomologyClass("hyperboloid", 1, 0)
    b = HomologyClass("hyperboloid", 0, 1)
    c = HomologyClass("hyperboloid", 3, 1)
    assert abs(homology_pairing(a, b)) == 1
    assert homology_pairing(a, a) == 0
    assert abs(homology_pairing(a, c)) == 1
    assert abs(homology_pairing(b, c)) == 3
