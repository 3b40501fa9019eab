import json

import numpy as np
import pytest

from sepsemi.models import (M_ROWS, ModelError, SpaceSextic, build_sextic, check_hyperelliptic,
                            model_hyperelliptic, model_sextic, validate_smoothness)
from sepsemi.algebra import UniPoly
from sepsemi.models import HyperellipticCurve

from conftest import ROWS

EXPECTED_CLASSES = {
    ("hyperboloid", 1, 0): [(3, 1)],
    ("hyperboloid", 3, 0): [(1, 1), (1, 1), (1, 1)],
    ("hyperboloid", 3, 2): [(0, 0), (1, 1), (0, 0)],
}


@pytest.mark.parametrize("key", ROWS)
def test_model_topology(model, key):
    C, L = model(*key)
    assert (L.r, L.l) == key[1:]
    assert C.smoothness.ok
    if key in EXPECTED_CLASSES:
        got = sorted(tuple(map(abs, lp.homology.up_to_sign())) for lp in L.loops)
        assert got == sorted(EXPECTED_CLASSES[key]) or sorted(
            tuple(reversed(c)) for c in got) == sorted(EXPECTED_CLASSES[key])


@pytest.mark.parametrize("key", [("cone", 3, 2), ("hyperboloid", 3, 2)])
def test_middle_component_is_the_non_oval(model, key):
    _, L = model(*key)
    assert [lp.is_oval for lp in L.loops] == [True, False, True]


@pytest.mark.parametrize("key", ROWS)
def test_traced_points_lie_on_curve(model, key):
    C, L = model(*key)
    for lp in L.loops:
        assert C.residual(lp.points).max() < 1e-9


@pytest.mark.parametrize("key", M_ROWS)
def test_maximal_rows_rejected(key):
    with pytest.raises(ModelError):
        model_sextic(*key)


def test_unknown_row_rejected():
    with pytest.raises(ModelError):
        model_sextic("ellipsoid", 2, 2)


@pytest.mark.parametrize("eps", [0.0, -0.01])
def test_degenerate_epsilon_rejected(eps):
    with pytest.raises(ModelError):
        model_sextic("ellipsoid", 3, 3, eps=eps)


def test_unperturbed_union_is_singular():
    C = build_sextic("cone", 3, 2, eps=1e-14)
    assert not validate_smoothness(C).ok


def test_curve_json_roundtrip(tmp_path):
    C = build_sextic("hyperboloid", 3, 0)
    path = tmp_path / "c.json"
    path.write_text(json.dumps(C.to_json()))
    D = SpaceSextic.from_json(json.loads(path.read_text()))
    assert D.quadric.kind == C.quadric.kind
    assert np.allclose(D.cubic.coeffs, C.cubic.coeffs)
    x = np.random.default_rng(0).normal(size=(5, 4))
    assert np.allclose(D.residual(x), C.residual(x))


@pytest.mark.parametrize("g", range(1, 8))
def test_hyperelliptic_model(g):
    H = model_hyperelliptic(g)
    assert H.F.degree == 2 * g + 2
    assert H.r == (2 if g % 2 else 1)
    xs = np.linspace(-10, 10, 2001)
    assert H.F(xs).min() > 0
    assert HyperellipticCurve.from_json(H.to_json()).g == g


def test_hyperelliptic_rejects_real_roots():
    H = HyperellipticCurve(1, UniPoly([-1.0, 0.0, 0.0, 0.0, 1.0]))
    with pytest.raises(ModelError):
        check_hyperelliptic(H)


@pytest.mark.parametrize("kw", [{"g": 0}, {"g": 2, "delta": 0.0}, {"g": 2, "spread": [0, 0, 1]},
                                {"g": 2, "spread": [0, 1]}])
def test_hyperelliptic_bad_input(kw):
    with pytest.raises(ModelError):
        model_hyperelliptic(**kw)
