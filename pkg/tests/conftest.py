import random

import pytest

from mframe import catalog
from mframe.catalog.suite import frame_for


@pytest.fixture(scope="session")
def conformal():
    return catalog.get("conformal")


@pytest.fixture(scope="session")
def projective():
    return catalog.get("projective")


@pytest.fixture(scope="session")
def hyperbolic():
    return frame_for("conformal-hyperbolic")


@pytest.fixture(scope="session")
def degenerate():
    return frame_for("conformal-degenerate")


@pytest.fixture(scope="session")
def tresse():
    return frame_for("projective")


@pytest.fixture
def rng():
    return random.Random(20240611)
