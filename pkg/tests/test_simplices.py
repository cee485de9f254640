from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hilbertlab import (HPoint, are_parallel, contained_after_sliding, enumerate_max_simplices,
                        flat_coords, flat_distance, join_opposite, make_standard, recognize,
                        simplex_distance, slide)
from hilbertlab.errors import (BudgetExceeded, CrossSegmentInBoundary, DependentVertices,
                               InteriorLeak, NotInFace, NotInSimplex)
from hilbertlab.sampling import random_in_face, random_interior
from hilbertlab.simplices import sampled_hausdorff

pos = st.fractions(min_value=Fraction(1, 40), max_value=40)


@pytest.fixture(scope="module")
def flat3(simplex3):
    """The 2-simplex spanned by e1, e2 and e3 + e4 in the 3-simplex."""
    return recognize(simplex3, [HPoint([1, 0, 0, 0]), HPoint([0, 1, 0, 0]), HPoint([0, 0, 1, 1])])


def test_recognize_whole_triangle(triangle):
    S = recognize(triangle, triangle.vertices)
    assert S.dim == 2
    assert S.contains(HPoint([1, 2, 3]))


def test_recognize_rejects_interior_vertex(triangle):
    with pytest.raises(InteriorLeak):
        recognize(triangle, [HPoint([1, 0, 0]), HPoint([1, 1, 1])])


def test_recognize_rejects_dependent(triangle):
    with pytest.raises(DependentVertices):
        recognize(triangle, [HPoint([1, 0, 0]), HPoint([2, 0, 0])])


def test_barycentric_rejects_outside(flat3):
    with pytest.raises(NotInSimplex):
        flat3.barycentric(HPoint([1, 1, 1, 2]))


@given(st.lists(pos, min_size=3, max_size=3), st.lists(pos, min_size=3, max_size=3))
def test_closed_form_matches_metric(a, b):
    dom = make_standard("simplex", 4)
    S = recognize(dom, [HPoint([1, 0, 0, 0]), HPoint([0, 1, 0, 0]), HPoint([0, 0, 1, 1])])
    x, y = S.point(a), S.point(b)
    assert simplex_distance(S, x, y) == dom.hilbert_distance(x, y)
    assert flat_distance(flat_coords(S, x), flat_coords(S, y)) == simplex_distance(S, x, y)


def test_flat_distance_float_agrees(flat3):
    x, y = flat3.point([1, 2, 7]), flat3.point([3, 1, 1])
    exact = flat_distance(flat_coords(flat3, x), flat_coords(flat3, y))
    approx = flat_distance(flat_coords(flat3, x).logs, flat_coords(flat3, y).logs)
    assert approx.value == pytest.approx(exact.value)


def test_enumeration_small_domains(triangle, interval, square):
    assert len(enumerate_max_simplices(triangle)) == 1
    assert len(enumerate_max_simplices(interval)) == 1
    # regression value: sixteen maximal lines in the square
    fam = enumerate_max_simplices(square)
    assert len(fam) == 16
    assert all(S.dim == 1 for S in fam)


def test_enumeration_budget(square):
    with pytest.raises(BudgetExceeded):
        enumerate_max_simplices(square, candidate_budget=5)
    with pytest.raises(BudgetExceeded):
        enumerate_max_simplices(square, max_candidates=3)


def test_family_members_are_maximal(square):
    fam = enumerate_max_simplices(square)
    for i, S in enumerate(fam):
        for j, T in enumerate(fam):
            if i != j:
                assert not (contained_after_sliding(S, T) and contained_after_sliding(T, S))


def test_parallel_relation(star):
    from hilbertlab.examples import parallel_family
    fam = parallel_family(star, star.base.vertices, 1.0)
    ok, perm = are_parallel(fam[0], fam[3])
    assert ok and sorted(perm) == [0, 1, 2]
    T = make_standard("simplex", 3)
    S = recognize(T, T.vertices)
    line = recognize(T, [HPoint([1, 0, 0]), HPoint([0, 1, 1])])
    assert not are_parallel(S, line)[0]


def test_slide_bound_holds(star, rng):
    S = recognize(star.domain, [star.face_point(v, 1) for v in star.base.vertices])
    repl = {}
    for j, F in enumerate(S.faces):
        repl[j] = random_in_face(F, rng, 1, 1.0)[0]
    res = slide(S, repl, hausdorff_samples=100)
    assert res.hausdorff_estimate <= res.bound.value + 1e-6


def test_slide_rejects_wrong_face(star):
    S = recognize(star.domain, [star.face_point(v, 1) for v in star.base.vertices])
    with pytest.raises(NotInFace):
        slide(S, {0: star.face_point(star.base.vertices[1], 2)})


def _in_face(dom, indices, points):
    return recognize(dom.face(indices).domain, points)


def test_join_opposite_dimension(simplex3):
    S1 = _in_face(simplex3, {0, 1}, [HPoint([1, 0, 0, 0]), HPoint([0, 1, 0, 0])])
    S2 = _in_face(simplex3, {2, 3}, [HPoint([0, 0, 1, 0]), HPoint([0, 0, 0, 1])])
    J = join_opposite(simplex3, S1, S2)
    assert J.dim == S1.dim + S2.dim + 1


def test_join_needs_disjoint_faces(simplex3):
    S1 = _in_face(simplex3, {0, 1}, [HPoint([1, 0, 0, 0]), HPoint([0, 1, 0, 0])])
    S2 = _in_face(simplex3, {1, 2}, [HPoint([0, 1, 0, 0]), HPoint([0, 0, 1, 0])])
    with pytest.raises(CrossSegmentInBoundary):
        join_opposite(simplex3, S1, S2)


def test_sampled_hausdorff_of_same_simplex(flat3):
    assert sampled_hausdorff(flat3, flat3, n=50) < 1e-6


def test_sampling_is_interior(square, rng):
    for p in random_interior(square, rng, 10):
        assert square.locate(p).is_interior


def test_vertex_values_shape(flat3, simplex3):
    assert flat3.vertex_values.shape == (len(simplex3.facets), 3)
    P = flat3.sample(np.zeros((1, 3)))
    assert P.shape == (1, len(simplex3.facets))
