"""Standard domains and the constructions built from them.

* :func:`make_standard` gives simplices, the interval, the square and Klein
  balls.
* :func:`product_domain` builds the doubled-cone domain ``Ω★ = P(C × C)``
  with its diagonal copy ``C★`` of the base domain.
* :func:`thicken` samples neighbourhoods of ``C★`` and checks the sandwich
  bound; :func:`parallel_family` builds the simplices ``S_σ``.
* :func:`benzecri_rescale`, :func:`orbit_sample` and
  :func:`stabilizer_lattice` cover rescaling, orbits and stabilisers.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import nnls

from . import _exact as ex
from .domain import HilbertLength, PolytopeDomain, QuadricDomain, _log_fraction
from .errors import (
    DegenerateConfiguration,
    DegenerateInterval,
    FrameFailure,
    NonPreserving,
    NotFixingVertices,
    NotHalfTriangle,
)
from .floatgeom import hull_distances
from .projective import HPoint, ProjMap
from .simplices import SimplexFamily, are_parallel, recognize

_DEN = 10 ** 12


# ---------------------------------------------------------------------------
# standard domains


def make_standard(kind: str, d: int | None = None):
    """Build a standard domain.

    Parameters
    ----------
    kind
        ``"simplex"`` (vertices e_1..e_d of P(R^d)), ``"interval"`` (the
        segment (-1, 1) of the chart x_0 = 1), ``"square"`` (vertices
        [1 : ±1 : ±1]) or ``"klein_ball"`` (unit ball of P(R^d)).
    d
        Ambient vector-space dimension for simplices and Klein balls.
    """
    if kind == "simplex":
        if d is None or d < 2:
            raise DegenerateConfiguration("simplex(d) needs d >= 2")
        return PolytopeDomain([[int(i == j) for j in range(d)] for i in range(d)])
    if kind == "interval":
        return PolytopeDomain([[1, -1], [1, 1]])
    if kind == "square":
        return PolytopeDomain([[1, 1, 1], [1, -1, 1], [1, -1, -1], [1, 1, -1]])
    if kind == "klein_ball":
        if d is None or d < 2:
            raise DegenerateConfiguration("klein_ball(d) needs d >= 2")
        return QuadricDomain.klein_ball(d)
    raise DegenerateConfiguration(f"unknown standard domain {kind!r}")


def preserves(domain: PolytopeDomain, g: ProjMap) -> bool:
    """Exact test that g maps the vertex cone onto itself (up to one sign)."""
    index = {tuple(v): i for i, v in enumerate(domain.lifts)}
    hit = set()
    signs = set()
    for v in domain.lifts:
        p = ex.primitive(ex.matvec(g.matrix, v))
        neg = tuple(-c for c in p)
        if p in index:
            hit.add(index[p])
            signs.add(1)
        elif neg in index:
            hit.add(index[neg])
            signs.add(-1)
        else:
            return False
    return len(hit) == len(index) and len(signs) == 1


@dataclass
class GroupGens:
    """Generators of a group of projective maps and a word-length budget."""

    generators: list
    word_budget: int = 8

    def check(self, domain: PolytopeDomain) -> None:
        for i, g in enumerate(self.generators):
            if not preserves(domain, g):
                raise NonPreserving(f"generator {i} does not preserve the domain")

    def to_json(self) -> list:
        return [g.to_json() for g in self.generators]


def triangle_group() -> GroupGens:
    """Default divisible group on the triangle: <diag(4,2,1), diag(1,4,2)>."""
    return GroupGens([ProjMap.diagonal([4, 2, 1]), ProjMap.diagonal([1, 4, 2])])


def direct_sum(g: ProjMap) -> ProjMap:
    """The block-diagonal map g ⊕ g."""
    n = g.dim
    m = [[0] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            m[i][j] = g.matrix[i][j]
            m[n + i][n + j] = g.matrix[i][j]
    return ProjMap(m)


# ---------------------------------------------------------------------------
# product domain


@dataclass
class ConeProduct:
    """The domain Ω★ = P(C × C) over a polytope Ω = P(C), with C★ its diagonal."""

    base: PolytopeDomain
    domain: PolytopeDomain

    def lift(self, x: HPoint) -> tuple:
        """Rational lift in the closed cone with first nonzero entry of size one."""
        v = self.base.normalized_lift(x)
        first = next(c for c in v if c != 0)
        return tuple(Fraction(c, abs(first)) for c in v)

    def star(self, x: HPoint) -> HPoint:
        """x★ = [(x̄, x̄)]."""
        v = self.lift(x)
        return HPoint(v + v)

    def face_point(self, x: HPoint, s) -> HPoint:
        """[(s x̄, x̄)], a point of the face of x★ for extreme x."""
        v = self.lift(x)
        s = ex.as_fraction(s)
        return HPoint(tuple(s * c for c in v) + v)

    def core_generators(self) -> list[tuple]:
        """Lifts (v, v) generating the cone of C★."""
        return [tuple(v) + tuple(v) for v in self.base.lifts]

    def core_values(self) -> np.ndarray:
        return np.array([[ex.dot(f, v) for v in self.core_generators()]
                         for f in self.domain.facets], dtype=float)

    def distance_to_core(self, P: np.ndarray) -> np.ndarray:
        """Float H(y, C★) for chart rows of Ω★ (by linear programming)."""
        d, _ = hull_distances(P, self.core_values())
        return d


def product_domain(base: PolytopeDomain) -> ConeProduct:
    """Ω★ with vertices (v, 0) and (0, v) for the vertices v of Ω."""
    if not isinstance(base, PolytopeDomain):
        raise DegenerateConfiguration("product_domain needs a polytope")
    n = base.ambient
    z = (0,) * n
    verts = [tuple(v) + z for v in base.lifts] + [z + tuple(v) for v in base.lifts]
    return ConeProduct(base, PolytopeDomain(verts))


# ---------------------------------------------------------------------------
# thickening


def _rational_below(x: float) -> Fraction:
    """A rational no larger than x (and within about 1e-12 of it)."""
    f = Fraction(x).limit_denominator(_DEN)
    while float(f) > x or f > Fraction(x):
        f -= Fraction(1, _DEN)
    return f


@dataclass
class Thickening:
    R: float
    samples: list
    hull_vertices: list
    inner_max_q: Fraction
    inner_ok: bool
    outer_bound: float
    outer_max: float
    outer_ok: bool
    combination_max: float
    combination_ok: bool

    def to_json(self) -> dict:
        return {"R": self.R, "samples": len(self.samples),
                "hull_vertices": len(self.hull_vertices),
                "inner": {"max_q": str(self.inner_max_q), "ok": self.inner_ok},
                "outer": {"bound": self.outer_bound, "max": self.outer_max, "ok": self.outer_ok},
                "combinations": {"max": self.combination_max, "ok": self.combination_ok}}


def thicken(cp: ConeProduct, R: float, n: int = 60, seed: int = 0,
            combinations: int = 200) -> Thickening:
    """Sample C★^(R) and check its sandwich bounds.

    Inner samples are exact points y on segments [x★, w] at exact length
    at most R from x★, so H(y, C★) <= R holds exactly.  Hull vertices, pair
    midpoints and random convex combinations of hull vertices are checked
    against 2^{d-1} R with d the ambient dimension of the base.
    """
    if R <= 0:
        raise DegenerateConfiguration("thicken needs R > 0")
    from .sampling import random_interior

    rng = np.random.default_rng(seed)
    dom = cp.domain
    qmax = _rational_below(math.exp(2 * R))
    base_pts = random_interior(cp.base, rng, n, 1.5)
    targets = random_interior(dom, rng, n, 2.0)
    samples = []
    worst_q = Fraction(1)
    for x, w in zip(base_pts, targets):
        xs = cp.star(x)
        if xs == w:
            samples.append(xs)
            continue
        total = dom.hilbert_distance(xs, w)
        frac = Fraction(int(rng.integers(1, 1001)), 1000)
        q = 1 + (qmax - 1) * frac
        y = w if total.q <= q else dom.geodesic_point(xs, w, HilbertLength(q=q))
        samples.append(y)
        worst_q = max(worst_q, dom.hilbert_distance(xs, y).q)
    inner_ok = worst_q <= qmax
    P = dom.embed(samples)
    hull = []
    for i in range(len(P)):
        others = [j for j in range(len(P)) if j != i]
        d, _ = hull_distances(P[i:i + 1], P[others].T, refine=0)
        if d[0] > 1e-9:
            hull.append(i)
    bound = 2 ** (cp.base.ambient - 1) * R
    HV = P[hull]
    outer = cp.distance_to_core(HV)
    mids = []
    for _ in range(combinations):
        i, j = rng.integers(0, len(HV), size=2)
        mids.append(0.5 * (HV[i] + HV[j]))
        w = rng.dirichlet(np.ones(len(HV)))
        mids.append(w @ HV)
    comb = cp.distance_to_core(np.array(mids))
    return Thickening(R, samples, [samples[i] for i in hull], worst_q, inner_ok,
                      bound, float(outer.max()), bool((outer <= bound).all()),
                      float(comb.max()), bool((comb <= bound).all()))


# ---------------------------------------------------------------------------
# parallel families


def face_interval(cp: ConeProduct, R: float) -> tuple[Fraction, Fraction]:
    """Parameters s± of the endpoints [(s± x̄, x̄)] used for S_σ.

    s+ is a rational close to e^{2R}, at face distance about R from x★, and
    s- = 1 / s+.
    """
    s = Fraction(math.exp(2 * R)).limit_denominator(10 ** 6)
    return s, 1 / s


def parallel_family(cp: ConeProduct, vertices: Sequence[HPoint], R: float = 1.0,
                    s_plus: Fraction | None = None,
                    s_minus: Fraction | None = None) -> SimplexFamily:
    """The simplices S_σ spanned by one endpoint x^{σ_j} per vertex face.

    Raises
    ------
    DegenerateInterval
        If the two endpoints coincide.
    """
    verts = [v if isinstance(v, HPoint) else HPoint(v) for v in vertices]
    if s_plus is None or s_minus is None:
        sp, sm = face_interval(cp, R)
        s_plus = sp if s_plus is None else s_plus
        s_minus = sm if s_minus is None else s_minus
    if Fraction(s_plus) == Fraction(s_minus):
        raise DegenerateInterval("the face interval endpoints coincide")
    members = []
    for sigma in itertools.product((1, -1), repeat=len(verts)):
        pts = [cp.face_point(v, s_plus if sg > 0 else s_minus) for v, sg in zip(verts, sigma)]
        members.append(recognize(cp.domain, pts))
    fam = SimplexFamily(members)
    fam.flags["parallel"] = "verified" if all(
        are_parallel(members[0], m)[0] for m in members) else "refuted"
    return fam


def core_face_samples(cp: ConeProduct, vertices: Sequence[HPoint], R: float) -> list[HPoint]:
    """Boundary samples of a thickened core inside the faces of the x★.

    The closure of C★^(R) meets the face of x★ in a symmetric interval
    around x★; its two endpoints [(s± x̄, x̄)] are returned for each vertex.
    """
    sp, sm = face_interval(cp, R)
    out = []
    for v in vertices:
        out.append(cp.face_point(v, sp))
        out.append(cp.face_point(v, sm))
    return out


# ---------------------------------------------------------------------------
# Fubini-Study helpers


def fs_distance(p, q) -> float:
    """Fubini-Study angle between the lines through p and q."""
    a = np.asarray(p, dtype=float)
    b = np.asarray(q, dtype=float)
    c = abs(a @ b) / (np.linalg.norm(a) * np.linalg.norm(b))
    return float(math.acos(min(1.0, c)))


def fs_to_cone(p, generators: np.ndarray) -> tuple[float, np.ndarray]:
    """Fubini-Study distance from [p] to the projectivised cone on the columns."""
    p = np.asarray(p, dtype=float)
    p = p / np.linalg.norm(p)
    best = (math.pi / 2, None)
    for s in (1.0, -1.0):
        lam, res = nnls(generators, s * p)
        if res < 1.0:
            ang = math.asin(res)
            if ang < best[0]:
                best = (ang, lam)
    return best


def fs_hausdorff_cones(A: np.ndarray, B: np.ndarray, n: int = 200, seed: int = 0) -> float:
    """Sampled Fubini-Study Hausdorff distance between two closed cone hulls."""
    rng = np.random.default_rng(seed)
    best = 0.0
    for X, Y in ((A, B), (B, A)):
        W = rng.dirichlet(np.ones(X.shape[1]), size=n)
        pts = np.vstack([X.T, W @ X.T])
        for p in pts:
            best = max(best, fs_to_cone(p, Y)[0])
    return best


# ---------------------------------------------------------------------------
# rescaling


@dataclass
class RescaleElement:
    n: int
    g: ProjMap
    frame: ProjMap
    vertices: list
    gap: float

    def to_json(self) -> dict:
        return {"n": self.n, "g": self.g.to_json(), "frame": self.frame.to_json(),
                "vertices": [v.to_json() for v in self.vertices], "gap": self.gap}


def _frame(domain: PolytopeDomain, a: HPoint, b: HPoint, c: HPoint) -> ProjMap:
    phi = domain.chart.functional
    lifts = []
    for p in (a, b, c):
        v = domain.normalized_lift(p)
        s = ex.dot(phi, v)
        lifts.append(tuple(Fraction(x, s) for x in v))
    ah, bh, ch = lifts
    cols = [bh, tuple(x - y for x, y in zip(ah, bh)), tuple(x - y for x, y in zip(ch, bh))]
    if ex.rank(cols) < 3:
        raise FrameFailure("the half triangle does not span a projective plane")
    d = domain.ambient
    for i in range(d):
        if len(cols) == d:
            break
        e = tuple(int(i == j) for j in range(d))
        if ex.rank(cols + [e]) == len(cols) + 1:
            cols.append(e)
    try:
        return ProjMap([[cols[j][i] for j in range(d)] for i in range(d)])
    except DegenerateConfiguration as exc:
        raise FrameFailure(str(exc)) from exc


def benzecri_rescale(domain: PolytopeDomain, a: HPoint, b: HPoint, c: HPoint,
                     n: int, samples: int = 100) -> RescaleElement:
    """The n-th diagonal rescaling map along a half triangle a, b, c.

    In the frame E0 = b̂, E1 = â - b̂, E2 = ĉ - b̂ (hats are chart-normalised
    lifts) the half triangle is [1:1:0], [1:0:0], [1:0:1].  With
    p_n = [1 : 2^-n : 2^-n] the map is g_n = diag(1, 2^n, 2^n, 1, ...) in
    that frame.  ``gap`` is a sampled Fubini-Study Hausdorff distance
    between g_n of the closed domain and the closed limit simplex T.

    Raises
    ------
    NotHalfTriangle
        If a, b, c is not a half triangle.
    FrameFailure
        If the frame cannot be completed to a basis.
    """
    if not domain.half_triangle(a, b, c):
        raise NotHalfTriangle("a, b, c do not form a half triangle")
    P = _frame(domain, a, b, c)
    d = domain.ambient
    scale = [1] + [2 ** n, 2 ** n] + [1] * (d - 3)
    g = P @ ProjMap.diagonal(scale) @ P.inverse()
    verts = [HPoint(ex.matvec(g.matrix, v)) for v in domain.lifts]
    img = np.array([ex.matvec(g.matrix, v) for v in domain.lifts], dtype=float).T
    T = np.array([[float(P.matrix[i][j]) for j in range(3)] for i in range(d)])
    gap = fs_hausdorff_cones(img, T, samples)
    return RescaleElement(n, g, P, verts, gap)


# ---------------------------------------------------------------------------
# orbits


@dataclass
class OrbitSample:
    orbit: list
    limit: list
    core: list
    word_length: int
    eps: float

    def to_json(self) -> dict:
        return {"word_length": self.word_length, "eps": self.eps,
                "orbit_size": len(self.orbit),
                "limit": [{"point": p.to_json(), "face": sorted(f), "fs": d}
                          for p, f, d in self.limit],
                "core": [p.to_json() for p in self.core]}


def _nearest_face(domain: PolytopeDomain, p: HPoint, eps: float):
    """Fubini-Study distance from p to the boundary and the face attained.

    Weights below ``eps`` of the total are treated as zero when reading off
    the face of the nearest boundary point.
    """
    x = np.array(p.to_float())
    best = (math.inf, frozenset())
    for inc in domain.incidence:
        idx = sorted(inc)
        G = np.array([domain.lifts[i] for i in idx], dtype=float).T
        dist, lam = fs_to_cone(x, G)
        if lam is not None and dist < best[0]:
            support = frozenset(i for i, l in zip(idx, lam) if l > eps * lam.sum())
            best = (dist, domain.closure_face(support).vertex_set)
    return best


def orbit_sample(domain: PolytopeDomain, gens: GroupGens, basepoint: HPoint | None = None,
                 max_word_length: int | None = None, eps: float = 1e-3) -> OrbitSample:
    """Orbit points up to a word length, with those near the boundary.

    Raises
    ------
    NonPreserving
        If a generator does not preserve the domain.
    """
    gens.check(domain)
    L = gens.word_budget if max_word_length is None else max_word_length
    x0 = basepoint if basepoint is not None else domain.barycenter()
    letters = []
    for g in gens.generators:
        letters.append(g.matrix)
        letters.append(g.inverse().matrix)
    seen = {x0.key(): x0}
    frontier = [x0]
    for _ in range(L):
        nxt = []
        for p in frontier:
            for m in letters:
                q = HPoint(ex.primitive(ex.matvec(m, p.coords)))
                k = q.key()
                if k not in seen:
                    seen[k] = q
                    nxt.append(q)
        frontier = nxt
    orbit = [seen[k] for k in sorted(seen)]
    limit = []
    core = []
    for p in orbit:
        dist, face = _nearest_face(domain, p, eps)
        if dist <= eps:
            limit.append((p, face, dist))
            core.append(p)
    return OrbitSample(orbit, limit, core, L, eps)


# ---------------------------------------------------------------------------
# stabilisers


@dataclass
class LatticeReport:
    rank: int
    log_vectors: list
    basis: list

    def to_json(self) -> dict:
        return {"rank": self.rank, "log_vectors": self.log_vectors, "basis": self.basis}


def stabilizer_lattice(gens: Sequence[ProjMap], vertices: Sequence[HPoint],
                       tol: float = 1e-9) -> LatticeReport:
    """Rank of the lattice of log-eigenvalue vectors of maps fixing the vertices.

    For each generator g with g v_i = λ_i v_i the vector
    (log|λ_1/λ_0|, ..., log|λ_k/λ_0|) is recorded; the rank is the numerical
    rank (relative tolerance ``tol``) of these vectors.

    Raises
    ------
    NotFixingVertices
        If a generator moves a vertex.
    """
    verts = [v if isinstance(v, HPoint) else HPoint(v) for v in vertices]
    vecs = []
    for gi, g in enumerate(gens):
        lams = []
        for v in verts:
            w = ex.matvec(g.matrix, v.coords)
            if not ex.proportional(w, v.coords):
                raise NotFixingVertices(f"generator {gi} moves vertex {v!r}")
            i = next(j for j, c in enumerate(v.coords) if c != 0)
            lams.append(Fraction(w[i]) / Fraction(v.coords[i]))
        base = lams[0]
        vecs.append([_log_fraction(abs(l / base)) for l in lams[1:]])
    if not vecs or not vecs[0]:
        return LatticeReport(0, vecs, [])
    M = np.array(vecs)
    scale = max(np.abs(M).max(), 1.0)
    rank = int(np.linalg.matrix_rank(M, tol=tol * scale))
    basis = []
    for row in vecs:
        trial = basis + [row]
        if np.linalg.matrix_rank(np.array(trial), tol=tol * scale) == len(trial):
            basis.append(row)
    return LatticeReport(rank, vecs, basis)
