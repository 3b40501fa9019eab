import numpy as np
import pytest

from sepsemi.algebra import MultiForm, evaluate_form
from sepsemi.intersect import intersect_with_form, real_representative
from sepsemi.models import build_sextic
from sepsemi.morphisms import Divisor


@pytest.mark.parametrize("kind, r, l", [("ellipsoid", 3, 3), ("cone", 3, 2), ("hyperboloid", 1, 0)])
@pytest.mark.parametrize("deg", [1, 2])
def test_bezout_count_and_residuals(kind, r, l, deg):
    C = build_sextic(kind, r, l)
    rng = np.random.default_rng(deg)
    F = MultiForm(deg, rng.normal(size=len(MultiForm(deg, np.zeros(4 if deg == 1 else 10)).coeffs))).normalized()
    out = intersect_with_form(C.quadric, C.cubic.normalized(), F)
    assert len(out.points) == 6 * deg
    for form in (C.quadric.form.normalized(), C.cubic.normalized(), F):
        assert np.abs(evaluate_form(form, out.points)).max() < 1e-9
    # real forms: the point set is closed under conjugation
    assert Divisor(out.points).is_conj_invariant(1e-6)


def test_plane_through_a_traced_point(model):
    C, L = model("ellipsoid", 3, 3)
    p = L.loops[0].points[17]
    n = np.linalg.svd(np.vstack([p, np.random.default_rng(1).normal(size=(2, 4))]))[2][-1]
    out = intersect_with_form(C.quadric, C.cubic.normalized(), MultiForm.linear(n))
    is_real, re, _ = real_representative(out.points)
    d = np.min(np.minimum(np.linalg.norm(re[is_real] - p, axis=1), np.linalg.norm(re[is_real] + p, axis=1)))
    assert d < 1e-8


def test_real_representative_scaling_invariant():
    x = np.array([1.0, 2.0, -0.5, 0.3])
    ok, re, im = real_representative((2 - 3j) * x)
    assert ok and im < 1e-12
    assert np.allclose(np.abs(re), np.abs(x) / np.linalg.norm(x))
