import numpy as np
import pytest

from sepsemi.checks import random_sections
from sepsemi.models import model_hyperelliptic, model_sextic
from sepsemi.realizations import realize_row

ROWS = [("ellipsoid", 3, 3), ("cone", 3, 0), ("cone", 3, 2),
        ("hyperboloid", 1, 0), ("hyperboloid", 3, 0), ("hyperboloid", 3, 2)]


class _Cache:
    def __init__(self, build):
        self.build = build
        self.store = {}

    def __call__(self, *key):
        if key not in self.store:
            self.store[key] = self.build(*key)
        return self.store[key]


@pytest.fixture(scope="session")
def model():
    """model(kind, r, l) -> (curve, locus), built once per session."""
    return _Cache(lambda *key: model_sextic(*key))


@pytest.fixture(scope="session")
def realized(model):
    def build(*key):
        C, L = model(*key)
        return realize_row(C, L, *key)
    return _Cache(build)


@pytest.fixture(scope="session")
def sections(model):
    def build(*key):
        C, L = model(*key)
        return random_sections(C, L, 10, seed=0)
    return _Cache(build)


@pytest.fixture(scope="session")
def hyper():
    return _Cache(lambda g: model_hyperelliptic(g))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance criteria record their outcome here; printed at the end of the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
