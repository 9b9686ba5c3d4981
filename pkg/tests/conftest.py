"""
Shared fixtures: ambient rings and the named ideals used across suites
"""

import pytest

from config.modules_config import apply_overrides
from modules.monomial_core.engine import AmbientRing, minimal_generators


def ideal_of(ring, *monomials):
    """Ideal from exponent tuples"""
    return minimal_generators(monomials, ring)


@pytest.fixture(autouse=True)
def clear_overrides():
    apply_overrides()
    yield
    apply_overrides()


@pytest.fixture
def line():
    return AmbientRing(('x',))


@pytest.fixture
def plane():
    return AmbientRing(('x', 'y'))


@pytest.fixture
def space():
    return AmbientRing(('x', 'y', 'z'))


@pytest.fixture
def narita_ring():
    return AmbientRing(('x1', 'x2', 'x3', 'x4'), ((0, 0, 0, 3),), asserted_cohen_macaulay=True)


@pytest.fixture
def plane_m(plane):
    return ideal_of(plane, (1, 0), (0, 1))


@pytest.fixture
def space_m(space):
    return ideal_of(space, (1, 0, 0), (0, 1, 0), (0, 0, 1))


@pytest.fixture
def gap_ideal(plane):
    """(x^4, x^3y, xy^3, y^4): Ratliff-Rush closure adds x^2y^2"""
    return ideal_of(plane, (4, 0), (3, 1), (1, 3), (0, 4))


@pytest.fixture
def marley_ideal(space):
    return ideal_of(space, (3, 0, 0), (0, 3, 0), (0, 0, 3), (2, 1, 0), (1, 2, 0), (0, 1, 2), (1, 1, 1))


@pytest.fixture
def narita_ideal(narita_ring):
    return ideal_of(narita_ring, (1, 0, 0, 0), (0, 2, 0, 0), (0, 0, 2, 0), (0, 1, 0, 1), (0, 0, 1, 1))
