import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sepsemi.algebra import evaluate_form
from sepsemi.morphisms import (MorphismError, base_point_free, fiber_at, interlacing_check,
                               interlacing_positions, is_special_divisor, plane_pencil,
                               projective_distance, separating_certificate)
from sepsemi.quadric import Line


def test_fiber_points_lie_on_curve_and_member(model, realized):
    C, L = model("ellipsoid", 3, 3)
    f = realized("ellipsoid", 3, 3)[0].morphism
    for th in (0.3, 1.2, 2.9):
        P = fiber_at(f, th, L)
        assert P.degree == f.degree
        assert C.residual(P.points).max() < 1e-9
        assert np.abs(evaluate_form(f.member(th).normalized(), P.points)).max() < 1e-9
        assert np.allclose(f.theta_of(P.real_points), th, atol=1e-7)


@pytest.mark.parametrize("M", [[[2.0, 1.0], [0.0, 1.0]], [[0.0, 1.0], [-1.0, 0.0]],
                               [[1.0, -3.0], [2.0, 0.5]]])
def test_degree_vector_invariant_under_mobius(model, realized, M):
    C, L = model("cone", 3, 2)
    R = realized("cone", 3, 2)[0]
    g = R.morphism.reparametrized(M)
    dv, cert = separating_certificate(g, L, n_samples=60)
    assert cert.ok
    assert dv == R.degree_vector


def test_singular_mobius_rejected(realized):
    with pytest.raises(MorphismError):
        realized("cone", 3, 2)[0].morphism.reparametrized([[1, 2], [2, 4]])


def test_non_separating_pencil_fails_certificate(model):
    """A generic pencil of planes through a non-real pair has non-real fibers on an M-less curve."""
    C, L = model("ellipsoid", 3, 3)
    p, q = L.loops[0].points[0], L.loops[0].points[len(L.loops[0].points) // 2]
    f = plane_pencil(C, points=(p, q))
    dv, cert = separating_certificate(f, L, n_samples=100)
    if not cert.ok:
        assert dv is None and cert.witness_theta is not None and cert.reason


def test_pencil_base_checks(model):
    C, L = model("ellipsoid", 3, 3)
    with pytest.raises(MorphismError):
        plane_pencil(C)
    with pytest.raises(MorphismError):
        plane_pencil(C, points=(np.array([1.0, 5.0, 0.0, 0.0]), L.loops[0].points[0]))
    with pytest.raises(MorphismError):
        plane_pencil(C, line=Line(np.array([1.0, 0.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0, 0.0])))


def test_speciality_of_coplanar_points(rng):
    B = rng.normal(size=(3, 4))
    coplanar = rng.normal(size=(5, 3)) @ B
    assert is_special_divisor(coplanar).special
    assert not is_special_divisor(rng.normal(size=(5, 4))).special
    assert is_special_divisor(rng.normal(size=(3, 4))).special
    assert base_point_free(rng.normal(size=(5, 4)))
    assert not base_point_free(np.vstack([coplanar[:4], rng.normal(size=(1, 4))]))


@pytest.mark.parametrize("key", [("ellipsoid", 3, 3), ("hyperboloid", 1, 0), ("hyperboloid", 3, 0)])
def test_nearby_fibers_interlace(model, realized, key):
    _, L = model(*key)
    for R in realized(*key):
        if not R.ok:
            continue
        A = fiber_at(R.morphism, 0.4, L)
        B = fiber_at(R.morphism, 0.45, L)
        assert interlacing_check(A, B, L.r)


def test_interlacing_examples():
    A = [(1, 0.1), (1, 0.5), (2, 0.3)]
    assert interlacing_positions(A, [(1, 0.3), (1, 0.7), (2, 0.9)], 2)
    assert not interlacing_positions(A, [(1, 0.2), (1, 0.3), (2, 0.9)], 2)
    assert not interlacing_positions(A, [(1, 0.3), (2, 0.7), (2, 0.9)], 2)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.floats(0, 1, exclude_max=True), min_size=2, max_size=8, unique=True),
       st.floats(0, 1, exclude_max=True))
def test_interlacing_of_shifted_midpoints(pos, shift):
    a = np.sort(pos)
    if np.min(np.diff(np.append(a, a[0] + 1))) < 1e-6:
        return
    mids = (a + np.diff(np.append(a, a[0] + 1)) / 2) % 1.0
    A = [(1, (x + shift) % 1.0) for x in a]
    B = [(1, (x + shift) % 1.0) for x in mids]
    assert interlacing_positions(A, B, 1)
    assert interlacing_positions(B, A, 1)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-2, 2, allow_nan=False), min_size=4, max_size=4),
       st.floats(0.1, 5), st.floats(0, 6.28))
def test_projective_distance_ignores_scaling(v, s, phase):
    x = np.array(v)
    if np.linalg.norm(x) < 1e-3:
        return
    assert projective_distance(x, s * np.exp(1j * phase) * x) < 1e-7
