from fractions import Fraction

import numpy as np
import pytest
from hypothesis import settings

from hilbertlab import HPoint, make_standard, product_domain

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def triangle():
    return make_standard("simplex", 3)


@pytest.fixture(scope="session")
def square():
    return make_standard("square")


@pytest.fixture(scope="session")
def interval():
    return make_standard("interval")


@pytest.fixture(scope="session")
def simplex3():
    return make_standard("simplex", 4)


@pytest.fixture(scope="session")
def klein():
    return make_standard("klein_ball", 3)


@pytest.fixture(scope="session")
def star():
    """The cone product over the triangle."""
    return product_domain(make_standard("simplex", 3))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def frac_point(*coords):
    return HPoint([Fraction(c) for c in coords])
