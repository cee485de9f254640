import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hilbertlab import HPoint, HilbertLength, PolytopeDomain, QuadricDomain
from hilbertlab.errors import (DegenerateConfiguration, EmptyAfterRestriction, NotInterior,
                               OutOfRange)
from hilbertlab.scene import load_polytope

weights = st.lists(st.fractions(min_value=Fraction(1, 50), max_value=50), min_size=3, max_size=3)


def test_worked_triangle_distance(triangle):
    d = triangle.hilbert_distance(HPoint([1, 1, 1]), HPoint([1, 2, 4]))
    assert d.q == 4
    assert d.value == pytest.approx(0.5 * math.log(4))


def test_interval_distance(interval):
    # H(0, 1/2) = log(3) / 2 on (-1, 1)
    d = interval.hilbert_distance(HPoint([1, 0]), HPoint([1, Fraction(1, 2)]))
    assert d.q == 3


def test_klein_ball_matches_artanh(klein):
    for r in (0.1, 0.5, 0.9):
        assert klein.hilbert_distance([1, r, 0], [1, 0, 0]).value == pytest.approx(np.arctanh(r))


def test_distance_to_self_is_zero(square):
    x = HPoint([3, 1, -1])
    assert square.hilbert_distance(x, x) == HilbertLength.zero()


def test_locate(triangle):
    assert triangle.locate(HPoint([1, 1, 1])).is_interior
    loc = triangle.locate(HPoint([1, 1, 0]))
    assert loc.is_boundary and loc.face.vertex_set == frozenset({0, 1})
    assert triangle.locate(HPoint([1, -1, 1])).is_outside
    with pytest.raises(NotInterior):
        triangle.hilbert_distance(HPoint([1, 1, 0]), HPoint([1, 1, 1]))


def test_square_face_lattice(square):
    faces = square.faces()
    dims = sorted(F.dim for F in faces)
    assert dims.count(0) == 4 and dims.count(1) == 4
    assert len(square.facets) == 4


def test_chord_endpoints(triangle):
    ch = triangle.chord(HPoint([1, 1, 1]), HPoint([1, 2, 4]))
    assert triangle.locate(ch.a).is_boundary and triangle.locate(ch.b).is_boundary


def test_geodesic_point_exact_midpoint(triangle):
    x, y = HPoint([1, 1, 1]), HPoint([1, 2, 4])
    total = triangle.hilbert_distance(x, y)
    m = triangle.geodesic_point(x, y, total / 2)
    assert triangle.hilbert_distance(x, m).q == 2
    assert triangle.hilbert_distance(m, y).q == 2
    with pytest.raises(OutOfRange):
        triangle.geodesic_point(x, y, HilbertLength(q=5))


def test_not_properly_convex():
    # a cone containing a line
    with pytest.raises(DegenerateConfiguration):
        PolytopeDomain([[1, 0], [-1, 0], [0, 1]])


def test_non_extreme_vertex():
    pts = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]]
    with pytest.raises(DegenerateConfiguration):
        PolytopeDomain(pts)
    assert len(PolytopeDomain.from_points(pts).vertices) == 3


def test_hausdorff_exact(triangle):
    A = [HPoint([1, 1, 1]), HPoint([1, 2, 4])]
    assert triangle.hausdorff_distance(A, A).q == 1
    assert triangle.hausdorff_distance(A, A[:1]).q == 4
    with pytest.raises(EmptyAfterRestriction):
        triangle.hausdorff_distance(A, A, restrict=(HPoint([1, 9, 9]), HilbertLength(q=2)))


def test_half_triangle(triangle):
    assert triangle.half_triangle(HPoint([1, 1, 0]), HPoint([1, 0, 0]), HPoint([1, 0, 1]))
    assert not triangle.half_triangle(HPoint([0, 1, 0]), HPoint([1, 0, 0]), HPoint([1, 1, 0]))


def test_quadric_float_lengths(klein):
    d = klein.hilbert_distance([1, 0.2, 0.1], [1, -0.3, 0.4])
    assert not d.is_exact and d.value > 0


def test_face_lattice_cache(tmp_path):
    verts = [HPoint(v) for v in ([1, 1, 1], [1, -1, 1], [1, 1, -1], [1, -1, -1])]
    first = load_polytope(verts, str(tmp_path))
    files = list(tmp_path.glob("*.faces.json"))
    assert len(files) == 1
    second = load_polytope(verts, str(tmp_path))
    assert second.facets == first.facets and second.incidence == first.incidence
    # a tampered sidecar is ignored and rebuilt
    data = json.loads(files[0].read_text())
    data["facets"][0] = [1, 0, 0]
    files[0].write_text(json.dumps(data))
    third = load_polytope(verts, str(tmp_path))
    assert third.facets == first.facets


def test_bad_cached_facets_rejected():
    verts = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    with pytest.raises(DegenerateConfiguration):
        PolytopeDomain(verts, facet_data=([[1, 1, 0]], [[2]]))


@given(weights, weights, weights)
def test_exact_metric_axioms_triangle(a, b, c):
    T = PolytopeDomain([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    x, y, z = HPoint(a), HPoint(b), HPoint(c)
    dxy = T.hilbert_distance(x, y)
    assert dxy == T.hilbert_distance(y, x)
    assert T.hilbert_distance(x, z) <= dxy + T.hilbert_distance(y, z)
    assert (dxy.q == 1) == (x == y)


@given(weights, weights, st.sampled_from([(4, 2, 1), (1, 3, 5), (2, 2, 7)]))
def test_diagonal_invariance(a, b, diag):
    T = PolytopeDomain([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    x, y = HPoint(a), HPoint(b)
    gx = HPoint([d * c for d, c in zip(diag, x.coords)])
    gy = HPoint([d * c for d, c in zip(diag, y.coords)])
    assert T.hilbert_distance(gx, gy) == T.hilbert_distance(x, y)


def test_float_layer_agrees_with_exact(square, rng):
    from hilbertlab.sampling import random_interior
    pts = random_interior(square, rng, 20)
    P = square.embed(pts)
    D = square.dist(P[:10], P[10:])
    exact = [square.hilbert_distance(a, b).value for a, b in zip(pts[:10], pts[10:])]
    assert np.allclose(D, exact, rtol=1e-9, atol=1e-12)


def test_length_arithmetic():
    a, b = HilbertLength(q=2), HilbertLength(q=3)
    assert (a + b).q == 6
    assert (HilbertLength(q=9) / 2).q == 3
    assert HilbertLength(q=2) < HilbertLength(h=0.5)
    with pytest.raises(ValueError):
        HilbertLength(q=Fraction(1, 2))


def test_klein_requires_dimension():
    with pytest.raises(DegenerateConfiguration):
        QuadricDomain([[1.0, 0.0], [0.0, 1.0]])
