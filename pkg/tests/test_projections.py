import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from hilbertlab import (HPoint, build_projection, closest_point, coarse_gap, project, recognize,
                        supporting_sets)
from hilbertlab.errors import DirectSumFailure, InKernel
from hilbertlab.projections import SampleSpec, SupportingSet, default_projection, grid_gap
from hilbertlab.sampling import random_in_face, random_interior


@pytest.fixture(scope="module")
def flat3(simplex3):
    return recognize(simplex3, [HPoint([1, 0, 0, 0]), HPoint([0, 1, 0, 0]), HPoint([0, 0, 1, 1])])


def test_two_supporting_sets(simplex3, flat3):
    sets = supporting_sets(simplex3, flat3)
    assert len(sets) == 2
    kernels = sorted(build_projection(simplex3, flat3, H).kernel.basis for H in sets)
    assert kernels == [((0, 0, 0, 1),), ((0, 0, 1, 0),)]


def test_projection_matrices(simplex3, flat3):
    x = HPoint([1, 2, 3, 5])
    images = sorted(project(build_projection(simplex3, flat3, H), x).key()
                    for H in supporting_sets(simplex3, flat3))
    # [x1 : x2 : x4 : x4] and [x1 : x2 : x3 : x3]
    assert images == [(1, 2, 3, 3), (1, 2, 5, 5)]


def test_projection_is_idempotent(simplex3, flat3, rng):
    for H in supporting_sets(simplex3, flat3):
        L = build_projection(simplex3, flat3, H)
        for x in random_interior(simplex3, rng, 20):
            y = project(L, x)
            assert flat3.contains(y)
            assert project(L, y) == y


def test_boundary_faces_are_respected(simplex3, flat3, rng):
    projs = [build_projection(simplex3, flat3, H) for H in supporting_sets(simplex3, flat3)]
    for r in range(1, 3):
        for J in itertools.combinations(range(3), r):
            bary = flat3.point([1 if j in J else 0 for j in range(3)])
            G = simplex3.face_containing(bary)
            for x in random_in_face(G, rng, 5):
                for L in projs:
                    assert simplex3.locate(project(L, x)).face == G


def test_direct_sum_failure(simplex3, flat3):
    good = supporting_sets(simplex3, flat3)[0]
    bad = SupportingSet(good.functionals[:2] + (good.functionals[0],), good.facet_ids)
    with pytest.raises(DirectSumFailure):
        build_projection(simplex3, flat3, bad)


def test_kernel_point_rejected(simplex3, flat3):
    L = default_projection(simplex3, flat3)
    with pytest.raises(InKernel):
        project(L, HPoint(L.kernel.basis[0]))


def test_closest_point_worked_value(simplex3, flat3):
    res = closest_point(simplex3, flat3, HPoint([1, 2, 3, 5]))
    assert res.radius == pytest.approx(0.5 * math.log(5 / 3), abs=1e-9)
    assert res.flat_diameter == pytest.approx(math.log(5 / 3), abs=1e-6)
    assert flat3.contains(res.point)


def test_closest_point_on_simplex_is_itself(simplex3, flat3):
    x = flat3.point([1, 2, 3])
    res = closest_point(simplex3, flat3, x)
    assert res.point == x and res.radius == 0.0


def test_linear_projection_is_a_closest_point(simplex3, flat3):
    # for this simplex L(x) lies in pi_S(x), so the grid gap is zero
    x = HPoint([1, 2, 3, 5])
    L = default_projection(simplex3, flat3)
    y = project(L, x)
    logs = np.log([float(c) for c in flat3.barycentric(y)])
    r, gap = grid_gap(simplex3, flat3, x, y, logs)
    assert gap < 1e-9
    assert r == pytest.approx(0.5 * math.log(5 / 3), abs=1e-3)


def test_coarse_gap_small(simplex3, flat3):
    rep = coarse_gap(simplex3, flat3, SampleSpec(n=10, seed=1), method="lp")
    assert 0.0 <= rep.delta1 < 1e-3
    assert len(rep.per_set) == 2
    assert set(rep.to_json()) >= {"delta1", "delta2", "delta4", "samples", "witness"}


def test_triangle_projection_is_identity(triangle):
    S = recognize(triangle, triangle.vertices)
    L = default_projection(triangle, S)
    x = HPoint([Fraction(1, 3), 2, 7])
    assert project(L, x) == x
