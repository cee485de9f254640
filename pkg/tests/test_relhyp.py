import numpy as np
import pytest

from hilbertlab import (HPoint, aps_check, isolation_diameter, morse_check, parallel_family,
                        recognize, thin_certify, transverse_measure)
from hilbertlab.errors import DegenerateConfiguration, EmptyFamily, NotQuasiGeodesic
from hilbertlab.relhyp import (check_quasi_geodesic, float_projector, penetration_constant,
                               perturbed_geodesic, projection_constants)


def klein_triangle(R):
    r = np.tanh(R)
    return [[1, r * np.cos(a), r * np.sin(a)] for a in (0, 2 * np.pi / 3, 4 * np.pi / 3)]


def flat_triangle(R):
    e = np.exp(2 * R)
    return [[1, e, 1], [1, 1, e], [1, 1 / e, 1 / e]]


def test_degenerate_triangle_is_thin(triangle):
    res = 1e-2
    c = thin_certify(triangle, HPoint([1, 1, 1]), HPoint([1, 2, 4]), HPoint([1, 1, 1]), res)
    assert c.delta <= 2 * res


def test_exhaustive_dominates_one_side(triangle):
    pts = flat_triangle(1.0)
    one = thin_certify(triangle, *pts, resolution=2e-2)
    allsides = thin_certify(triangle, *pts, resolution=2e-2, method="exhaustive")
    assert allsides.R >= one.R - 1e-9


def test_klein_thinness_saturates(klein):
    d = [thin_certify(klein, *klein_triangle(R), resolution=2e-2).delta for R in (2, 4)]
    assert abs(d[0] - d[1]) <= 0.1 * max(d)


def test_flat_thinness_grows(triangle):
    d = [thin_certify(triangle, *flat_triangle(R), resolution=2e-2).delta for R in (1, 2)]
    assert d[1] > 1.5 * d[0]


def test_unknown_method(triangle):
    with pytest.raises(ValueError):
        thin_certify(triangle, [1, 1, 1], [1, 2, 3], [1, 3, 2], method="guess")


def test_aps_needs_members(square):
    with pytest.raises(EmptyFamily):
        aps_check(square, [])


def test_aps_on_triangle(triangle):
    S = recognize(triangle, triangle.vertices)
    rep = aps_check(triangle, [S], n=10)
    # the projection to the whole domain is the identity
    assert rep.C_hat[0] < 1e-6 and rep.C_hat[2] < 1e-6


def test_closest_projector_fixes_simplex_points(simplex3):
    S = recognize(simplex3, [HPoint([1, 0, 0, 0]), HPoint([0, 1, 0, 0]), HPoint([0, 0, 1, 1])])
    P = S.sample(np.array([[0.0, 0.3, -0.2], [0.0, -1.0, 1.0]]))
    proj = float_projector(simplex3, S)
    assert np.allclose(simplex3.dist(P, proj(P)), 0.0, atol=1e-7)


def test_isolation_growth_on_parallel_pair(star):
    fam = parallel_family(star, star.base.vertices, 1.0)
    rep = isolation_diameter(star.domain, fam[0], fam[7], budgets=(2, 4, 8), n=60)
    assert rep.growth
    csv = rep.to_csv().splitlines()
    assert csv[0] == "r,budget,D_hat" and len(csv) == 10


def test_isolation_needs_distinct(star):
    fam = parallel_family(star, star.base.vertices, 1.0)
    with pytest.raises(DegenerateConfiguration):
        isolation_diameter(star.domain, fam[0], fam[0])


def test_transverse(square):
    from hilbertlab import enumerate_max_simplices
    fam = list(enumerate_max_simplices(square))
    tri = [HPoint([1, 0, 0]), HPoint([2, 1, 0]), HPoint([2, 0, 1])]
    chk = transverse_measure(square, fam, tri, kappa=0.5)
    assert len(chk.per_edge) == 3 and chk.Delta == max(chk.per_edge)
    with pytest.raises(DegenerateConfiguration):
        transverse_measure(square, fam, tri, kappa=0.0)


def test_morse_on_geodesic(triangle):
    rng = np.random.default_rng(0)
    P, T = perturbed_geodesic(triangle, HPoint([1, 1, 1]), HPoint([1, 2, 4]), 0.0, 30, rng)
    res = morse_check(triangle, P, T, 0.0, 0.0)
    assert res.passed and res.gap < 1e-8


def test_morse_on_perturbed_path(klein):
    rng = np.random.default_rng(1)
    x, y = [1, -0.6, 0.1], [1, 0.7, -0.2]
    P, T = perturbed_geodesic(klein, x, y, 1.0, 40, rng)
    res = morse_check(klein, P, T, 1.0, 0.6, C=0.5, Delta=1.0)
    assert res.passed
    assert res.penetration["sigma0"] == 5.0


def test_not_quasi_geodesic(triangle):
    P = triangle.embed([HPoint([1, 1, 1]), HPoint([1, 8, 8])])
    with pytest.raises(NotQuasiGeodesic):
        check_quasi_geodesic(triangle, P, np.array([0.0, 0.1]), 0.5)


def test_penetration_constant():
    out = penetration_constant(0.05, 2.0, 1.0)
    assert out["sigma0"] == 1.0 and out["bound"] == 2.0 + 10.0 + 18.0


def test_projection_constants_finite(simplex3):
    S = recognize(simplex3, [HPoint([1, 0, 0, 0]), HPoint([0, 1, 0, 0]), HPoint([0, 0, 1, 1])])
    out = projection_constants(simplex3, S, n=12, resolution=5e-2)
    assert np.isfinite(out["delta2"]) and np.isfinite(out["delta4"])
