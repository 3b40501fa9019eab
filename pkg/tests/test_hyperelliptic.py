import numpy as np
import pytest

from sepsemi.hyperelliptic import (abel_sum_residual, affine_chessboard, alternating_divisor,
                                   chart_d_orientation, hyper_certificate, hyper_fiber_at,
                                   hyper_interlacing, hyper_pencil_from_divisor, projection, q_basis,
                                   realize_hyper)
from sepsemi.morphisms import MorphismError
from sepsemi.topology import TopologyError, hyper_complex_orientation, hyper_d_orientation


@pytest.mark.parametrize("g", range(1, 7))
def test_fiber_points_take_the_value(hyper, g):
    H = hyper(g)
    f = hyper_pencil_from_divisor(H, alternating_divisor(H))
    for th in (0.3, 1.0, 2.0):
        fb = hyper_fiber_at(f, th)
        assert fb.degree == g + 1 and fb.all_real
        assert np.allclose(fb.y ** 2, H.F(fb.x), rtol=1e-9)
        assert np.allclose(f(fb.x, fb.y), np.tan(th), rtol=1e-8, atol=1e-8)


@pytest.mark.parametrize("g, proj, alt", [(1, (1, 1), (1, 1)), (2, (2,), (3,)), (3, (1, 1), (2, 2)),
                                          (4, (2,), (5,)), (5, (1, 1), (3, 3))])
def test_degree_vectors(hyper, g, proj, alt):
    p, f = realize_hyper(hyper(g))
    assert p.degree_vector == proj
    assert f.degree_vector == alt
    assert f.degree == g + 1 and f.reduced


@pytest.mark.parametrize("g", [2, 3, 4, 5])
def test_abel_sums_vanish(hyper, g):
    H = hyper(g)
    f = hyper_pencil_from_divisor(H, alternating_divisor(H))
    rng = np.random.default_rng(g)
    for th in rng.uniform(0.05, 1.5, 20):
        for q in q_basis(g):
            res, scale = abel_sum_residual(f, th, q)
            assert res < 1e-6 * scale


def test_abel_sum_detects_a_corrupted_map(hyper):
    H = hyper(3)
    P = alternating_divisor(H)
    f = hyper_pencil_from_divisor(H, P)
    bad = hyper_pencil_from_divisor(H, P)
    bad.a = bad.a + np.array([0.0, 0.05, 0.0, 0.0])
    worst = 0.0
    for th in (0.2, 0.6, 1.1):
        fb = hyper_fiber_at(f, th)
        for q in q_basis(3):
            res, scale = abel_sum_residual(bad, th, q, fiber=fb)
            worst = max(worst, res / scale)
    assert worst > 1e-2


@pytest.mark.parametrize("g", [2, 3, 4])
def test_fibers_interlace(hyper, g):
    H = hyper(g)
    f = hyper_pencil_from_divisor(H, alternating_divisor(H))
    fibers = [hyper_fiber_at(f, th) for th in np.linspace(0.05, 3.05, 13)]
    for i, A in enumerate(fibers):
        for B in fibers[i + 1:]:
            assert hyper_interlacing(A, B, H.r)


@pytest.mark.parametrize("g", [2, 3, 4, 5])
def test_complex_orientation_constant_per_component(hyper, g):
    H = hyper(g)
    f = hyper_pencil_from_divisor(H, alternating_divisor(H))
    x = np.linspace(-6, 6, 301)
    x = x[np.min(np.abs(x[:, None] - f.P[:, 0]), axis=1) > 1e-3]
    for branch in (1, -1):
        s = hyper_complex_orientation(f, x, H.y(x, branch), np.ones_like(x))
        assert len(set(s.tolist())) == 1
    if g % 2 == 0:
        # one component, and the upper branch at +inf continues as the lower
        # branch at -inf: the cyclic sense is dx > 0 on both branches
        up = hyper_complex_orientation(f, x[:1], H.y(x[:1], 1), [1.0])
        lo = hyper_complex_orientation(f, x[:1], H.y(x[:1], -1), [1.0])
        assert up[0] == lo[0]


@pytest.mark.parametrize("g", [2, 3, 4])
def test_d_orientation_matches_coloring(hyper, g):
    H = hyper(g)
    sp = np.array(H.spread)
    xr = (sp[0] - 1.0, sp[-1] + 1.0)
    col = affine_chessboard(H, xr, 1.2 * float(np.sqrt(H.F(np.array(xr))).max()))
    assert col.violations == 0
    rng = np.random.default_rng(7)
    x = rng.uniform(sp[0] - 0.5, sp[-1] + 0.5, 50)
    y = rng.choice([-1.0, 1.0], 50) * np.sqrt(H.F(x))
    dx = rng.choice([-1.0, 1.0], 50)
    xbar = np.sort(rng.uniform(sp[0], sp[-1], g - 1))
    a = hyper_d_orientation(H, xbar, x, y, dx)
    b = chart_d_orientation(H, col, x, y, dx)
    assert np.all(a == b) or np.all(a == -b)


def test_d_orientation_reverses_with_motion(hyper):
    H = hyper(3)
    x = np.array([-0.3, 0.4])
    y = H.y(x, 1)
    xbar = np.array([0.1, 0.9])
    assert np.all(hyper_d_orientation(H, xbar, x, y, [1, 1]) == -hyper_d_orientation(H, xbar, x, y, [-1, -1]))
    with pytest.raises(TopologyError):
        hyper_d_orientation(H, [0.1, 0.1], x, y, [1, 1])


def test_divisor_errors(hyper):
    H = hyper(3)
    P = alternating_divisor(H)
    with pytest.raises(MorphismError):
        hyper_pencil_from_divisor(H, P[:3])
    Q = P.copy()
    Q[1] = Q[0]
    with pytest.raises(MorphismError):
        hyper_pencil_from_divisor(H, Q)
    Q = P.copy()
    Q[0, 1] += 1.0
    with pytest.raises(MorphismError):
        hyper_pencil_from_divisor(H, Q)


def test_same_sign_divisor_is_not_separating(hyper):
    H = hyper(2)
    P = alternating_divisor(H)
    P[:, 1] = np.abs(P[:, 1])
    f = hyper_pencil_from_divisor(H, P)
    hyper_certificate(f, 100)
    assert not f.certificate.ok


def test_projection_fiber_is_a_conjugate_pair(hyper):
    H = hyper(2)
    fb = hyper_fiber_at(projection(H), 0.7)
    assert fb.degree == 2 and fb.all_real
    assert np.allclose(fb.x, np.tan(0.7)) and np.isclose(fb.y[0], -fb.y[1])
