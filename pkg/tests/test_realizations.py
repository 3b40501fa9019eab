import numpy as np
import pytest

from sepsemi.morphisms import fiber_at, is_special_divisor
from sepsemi.realizations import PLANS, realize_target

from conftest import ROWS


@pytest.mark.parametrize("key", ROWS)
def test_every_planned_vector_is_certified(realized, key):
    reals = realized(*key)
    planned = set()
    for method, target in PLANS[key]:
        planned |= set(target) if method == "section" else {target}
    got = {R.degree_vector for R in reals if R.ok}
    assert got == planned
    for R in reals:
        assert R.morphism.certificate.n_samples == 200
        assert R.morphism.certificate.max_im < 1e-6


@pytest.mark.parametrize("key", ROWS)
def test_non_special_flags_are_backed_by_rank(model, realized, key):
    _, L = model(*key)
    for R in realized(*key):
        if not R.non_special:
            continue
        assert min(R.speciality["ranks"]) == 4
        P = fiber_at(R.morphism, 0.77, L)
        assert not is_special_divisor(P.real_points).special


def test_generator_pencil_on_cone_is_special(realized):
    R = next(R for R in realized("cone", 3, 0) if R.target == (1, 1, 1))
    assert R.ok and not R.non_special
    assert R.morphism.degree == 3


def test_ruling_pencil_degree(realized):
    R = next(R for R in realized("hyperboloid", 1, 0) if R.target == (3,))
    assert R.ok and R.morphism.degree == 3


def test_conjugate_pencil_has_non_real_base(realized):
    R = next(R for R in realized("hyperboloid", 1, 0) if R.target == (4,))
    assert R.ok
    assert not np.any(R.morphism.base.real_mask())
    assert R.morphism.base.is_conj_invariant()


def test_unrealizable_target_fails_cleanly(model):
    C, L = model("ellipsoid", 3, 3)
    R = realize_target(C, L, (1, 1, 1), n_samples=40)
    assert not R.ok and R.note


@pytest.mark.parametrize("target", [(1, 2), (0, 2, 1)])
def test_malformed_target(model, target):
    C, L = model("ellipsoid", 3, 3)
    with pytest.raises(ValueError):
        realize_target(C, L, target)
