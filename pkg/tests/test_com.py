from fractions import Fraction

import pytest

from hilbertlab import HPoint, ProjMap, center_of_mass
from hilbertlab.errors import DegenerateHull, NotInterior


def test_interval_center(interval):
    c = center_of_mass(interval, [HPoint([1, Fraction(-1, 2)]), HPoint([1, Fraction(1, 2)])])
    assert c == HPoint([1, 0])


def test_single_point(triangle):
    x = HPoint([1, 2, 3])
    assert center_of_mass(triangle, [x]) == x


def test_symmetric_set_has_symmetric_center(triangle):
    K = [HPoint([1, 2, 5]), HPoint([5, 1, 2]), HPoint([2, 5, 1])]
    c = center_of_mass(triangle, K)
    assert triangle.hilbert_distance(c, HPoint([1, 1, 1])).value < 1e-6


def test_center_is_equivariant(triangle):
    K = [HPoint([1, 2, 3]), HPoint([3, 1, 1]), HPoint([1, 5, 2])]
    g = ProjMap.diagonal([2, 3, 5])
    c = center_of_mass(triangle, K)
    c2 = center_of_mass(triangle, [g(k) for k in K])
    assert triangle.hilbert_distance(g(c), c2).value < 1e-6


def test_center_balances_radii(triangle):
    K = [HPoint([1, 2, 3]), HPoint([3, 1, 1]), HPoint([1, 5, 2])]
    c = center_of_mass(triangle, K)
    radii = sorted(triangle.hilbert_distance(c, k).value for k in K)
    assert radii[-1] - radii[-2] < 1e-6


def test_errors(triangle):
    with pytest.raises(DegenerateHull):
        center_of_mass(triangle, [])
    with pytest.raises(NotInterior):
        center_of_mass(triangle, [HPoint([1, 1, 0])])
