import random
from fractions import Fraction

import pytest

from fermifields.algebra import Algebra, GeneratorId
from fermifields.lattice import FieldLattice, Lattice


@pytest.fixture
def rng():
    return random.Random(20240817)


@pytest.fixture
def alg6():
    """Six plain rational generators."""
    return Algebra([GeneratorId(0, 1, i, 0) for i in range(6)], mode="rational")


@pytest.fixture
def alg6f():
    return Algebra([GeneratorId(0, 1, i, 0) for i in range(6)], mode="float")


@pytest.fixture
def fl_rat():
    """4x2 rational field lattice, unit spacings."""
    return FieldLattice(Lattice(4, 2, 1, 1), 1, "rational")


@pytest.fixture
def fl_float():
    return FieldLattice(Lattice(4, 2, 0.5, 1.0), 1, "float")


@pytest.fixture
def mass():
    return Fraction(1)
