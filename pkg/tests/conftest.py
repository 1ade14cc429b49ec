from fractions import Fraction

import pytest

from shadowlp.geometry import Polyhedron
from shadowlp.harness import cube, pyramid


@pytest.fixture
def square():
    return cube(2)


@pytest.fixture
def cube3():
    return cube(3)


@pytest.fixture
def pyr():
    return pyramid()


@pytest.fixture
def triangle():
    # x >= 0, y >= 0, x + y <= 1
    return Polyhedron([[-1, 0], [0, -1], [1, 1]], [0, 0, 1])


def F(*args):
    return Fraction(*args)
