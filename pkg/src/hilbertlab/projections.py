"""Projections of a polytope domain onto a properly embedded simplex.

Two kinds are provided.  A :class:`LinearProjection` is built from one
supporting facet per codimension-one face of the simplex; it is the linear
idempotent with image the span of the simplex and kernel the common zero set
of the chosen facets.  The closest-point projection sends x to the set of
points of S at minimal Hilbert distance; it is computed by linear programming
on facet values.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from . import _exact as ex
from .domain import PolytopeDomain
from .errors import DirectSumFailure, InKernel, ToleranceNotReached
from .floatgeom import HIGHS_OPTIONS, hull_distances
from .projective import HPoint, LinSubspace, span_vectors
from .sampling import random_interior
from .simplices import EmbeddedSimplex

_DEN = 10 ** 12


@dataclass(frozen=True)
class SupportingSet:
    """One facet functional per codimension-one face of a simplex.

    ``functionals[j]`` supports the face opposite vertex j; ``facet_ids[j]``
    is its index among the domain facets.
    """

    functionals: tuple
    facet_ids: tuple

    def to_json(self) -> dict:
        return {"facets": list(self.facet_ids),
                "functionals": [[str(c) for c in f] for f in self.functionals]}


def supporting_sets(domain: PolytopeDomain, S: EmbeddedSimplex) -> list[SupportingSet]:
    """All S-supporting sets made of domain facets, in lexicographic order.

    For a 0-dimensional simplex the only set is empty.
    """
    if S.dim == 0:
        return [SupportingSet((), ())]
    zero = [domain.locate(v).zero_facets for v in S.vertices]
    choices = []
    for j in range(len(S.vertices)):
        common = None
        for i, z in enumerate(zero):
            if i != j:
                common = z if common is None else common & z
        choices.append(sorted(common))
    out = []
    for combo in itertools.product(*choices):
        out.append(SupportingSet(tuple(domain.facets[i] for i in combo), tuple(combo)))
    return out


@dataclass(frozen=True)
class LinearProjection:
    """Exact linear idempotent with image Span S and kernel the common zeros of H."""

    matrix: tuple
    kernel: LinSubspace
    image: LinSubspace
    supporting: SupportingSet

    def __call__(self, x: HPoint) -> HPoint:
        return project(self, x)

    def float_matrix(self) -> np.ndarray:
        return np.array([[float(c) for c in row] for row in self.matrix])

    def to_json(self) -> dict:
        return {"matrix": [[str(c) for c in row] for row in self.matrix],
                "supporting": self.supporting.to_json(),
                "kernel_dim": self.kernel.dim, "image_dim": self.image.dim}


def build_projection(domain: PolytopeDomain, S: EmbeddedSimplex,
                     H: SupportingSet) -> LinearProjection:
    """L = V (H V)^{-1} H for vertex lifts V and functionals H.

    H V is diagonal because each functional vanishes on every vertex but its
    own, so L(x) = sum_j h_j(x) / h_j(v_j) v_j.

    Raises
    ------
    DirectSumFailure
        If Span S and the common kernel are not complementary, or the kernel
        meets the open domain.  Neither can happen for valid input.
    """
    d = domain.ambient
    V = S.lifts
    if S.dim == 0:
        # the only supporting set is empty; L projects onto the single line
        hs = [tuple(domain.chart.functional)]
    else:
        hs = list(H.functionals)
    diag = [ex.dot(h, v) for h, v in zip(hs, V)]
    if any(c == 0 for c in diag):
        raise DirectSumFailure("a supporting functional vanishes on its own vertex")
    for j, h in enumerate(hs):
        for i, v in enumerate(V):
            if i != j and ex.dot(h, v) != 0:
                raise DirectSumFailure("a supporting functional misses its face")
    M = [[sum(Fraction(V[j][r] * hs[j][c], diag[j]) for j in range(len(V)))
          for c in range(d)] for r in range(d)]
    image = span_vectors(V, d)
    kernel = span_vectors(ex.nullspace(hs, d), d)
    if ex.rank(list(image.basis) + list(kernel.basis)) != d:
        raise DirectSumFailure("span of S and the kernel are not complementary")
    # each functional is positive on the open domain, so the kernel misses it
    bary = domain.barycenter().coords
    if any(ex.dot(h, bary) <= 0 for h in hs):
        raise DirectSumFailure("the kernel meets the open domain")
    return LinearProjection(tuple(tuple(r) for r in M), kernel, image, H)


def project(L: LinearProjection, x: HPoint) -> HPoint:
    """Exact image L(x).

    Raises
    ------
    InKernel
        If x lies in the projectivised kernel.
    """
    y = ex.matvec(L.matrix, x.coords)
    if all(c == 0 for c in y):
        raise InKernel(f"{x!r} lies in the kernel of the projection")
    return HPoint(y)


def default_projection(domain: PolytopeDomain, S: EmbeddedSimplex) -> LinearProjection:
    """Projection for the lexicographically first supporting set."""
    return build_projection(domain, S, supporting_sets(domain, S)[0])


# ---------------------------------------------------------------------------
# closest points


@dataclass
class ClosestPoint:
    point: HPoint
    radius: float
    flat_diameter: float
    weights: tuple = field(repr=False, default=())


def _point_from_weights(S: EmbeddedSimplex, lam) -> HPoint:
    lam = np.maximum(np.asarray(lam, dtype=float), 0.0)
    lam = lam / lam.max()
    w = [Fraction(float(c)).limit_denominator(_DEN) for c in lam]
    w = [c if c > 0 else Fraction(1, _DEN * _DEN) for c in w]
    return S.point(w)


def _ratio_extreme(A: np.ndarray, T: float, i: int, j: int) -> float:
    """max lam_i / lam_j over lam >= 0 with c <= A lam <= c T for some c."""
    m, k = A.shape
    # variables (lam, c); lam_j = 1
    ub = np.hstack([np.vstack([-A, A]), np.concatenate([np.ones(m), -T * np.ones(m)])[:, None]])
    eq = np.zeros((1, k + 1))
    eq[0, j] = 1.0
    cost = np.zeros(k + 1)
    cost[i] = -1.0
    res = linprog(cost, A_ub=ub, b_ub=np.zeros(2 * m), A_eq=eq, b_eq=[1.0],
                  bounds=(0, None), method="highs", options=HIGHS_OPTIONS)
    if res.status != 0:
        return math.inf
    return float(res.x[i])


def _flat_diameter(A: np.ndarray, T: float) -> float:
    k = A.shape[1]
    best = 0.0
    for i, j in itertools.combinations(range(k), 2):
        a = _ratio_extreme(A, T, i, j)
        b = _ratio_extreme(A, T, j, i)
        if not (a > 0 and b > 0):
            continue
        best = max(best, 0.5 * (math.log(a) + math.log(b)))
    return best


def closest_point(domain: PolytopeDomain, S: EmbeddedSimplex, x: HPoint,
                  tol: float = 1e-9, diameter: bool = True) -> ClosestPoint:
    """A point of S nearest to x, the distance r, and the diameter of pi_S(x).

    The distance comes from the program min t s.t. 1 <= (A lam)_i <= t with
    A = diag(1 / f(x)) V.  The minimiser set is the convex set of points of
    S within r of x; its Hilbert diameter is computed from the extreme
    weight ratios over that set.

    Raises
    ------
    ToleranceNotReached
        If the programs fail.
    """
    if S.contains(x):
        return ClosestPoint(x, 0.0, 0.0, ())
    P = domain.embed([x])
    V = S.vertex_values
    if S.dim == 0:
        d = float(domain.dist(P, domain.normalize(V[:, 0])[None, :])[0])
        return ClosestPoint(S.vertices[0], d, 0.0, (1.0,))
    dists, W = hull_distances(P, V)
    lam = W[0]
    p = _point_from_weights(S, lam)
    r = domain.hilbert_distance(x, p).value
    if r > dists[0] + max(tol, 1e-9) * (1 + dists[0]):
        raise ToleranceNotReached("rationalised minimiser drifted from the optimum")
    diam = 0.0
    if diameter:
        A = V / P[0][:, None]
        A = A / A.max()
        diam = _flat_diameter(A, math.exp(2 * float(dists[0])) * (1 + 1e-9))
    return ClosestPoint(p, r, diam, tuple(lam))


def nearest_in_projection(domain: PolytopeDomain, S: EmbeddedSimplex, x: HPoint,
                          y: HPoint, slack: float = 1e-7) -> tuple[float, np.ndarray]:
    """H(y, pi_S(x)) by one linear program.

    Variables (lam, t, c): minimise t subject to f(y) <= V lam <= t f(y) and
    c f(x) <= V lam <= c T f(x), where T = exp(2 r) (1 + slack) and r is the
    distance from x to S.  Returns the distance and the chart coordinates of
    the minimiser.
    """
    V = S.vertex_values
    X = domain.embed([x])[0]
    Y = domain.embed([y])[0]
    if S.dim == 0:
        Q = domain.normalize(V[:, 0])
        return float(domain.dist(Y[None], Q[None])[0]), Q
    r, _ = hull_distances(X[None, :], V)
    T = math.exp(2 * float(r[0])) * (1 + slack)
    m, k = V.shape
    sc = 1.0 / V.max()
    Vs = V * sc
    z = np.zeros((m, 1))
    rows = [
        np.hstack([-Vs, z, z]),                 # V lam >= f(y)
        np.hstack([Vs, -Y[:, None], z]),        # V lam <= t f(y)
        np.hstack([-Vs, z, X[:, None]]),        # V lam >= c f(x)
        np.hstack([Vs, z, -T * X[:, None]]),    # V lam <= c T f(x)
    ]
    A = np.vstack(rows)
    b = np.concatenate([-Y, np.zeros(3 * m)])
    cost = np.zeros(k + 2)
    cost[k] = 1.0
    res = linprog(cost, A_ub=A, b_ub=b, bounds=(0, None), method="highs",
                  options=HIGHS_OPTIONS)
    if res.status != 0:
        raise ToleranceNotReached(f"nearest-point program failed: {res.message}")
    lam = np.maximum(res.x[:k], 0.0)
    Q = domain.normalize(Vs @ lam)
    return float(domain.dist(Y[None], Q[None])[0]), Q


def grid_gap(domain: PolytopeDomain, S: EmbeddedSimplex, x: HPoint, y: HPoint,
             center: np.ndarray, step: float = 1e-3, halfwidth: float = 0.05):
    """Grid oracle for H(y, pi_S(x)) on a flat-coordinate window of S.

    The window has the given half-width around ``center`` (log-weights of a
    point of S, first entry zero) and spacing ``step`` in each flat
    coordinate.  pi_S(x) is approximated by the grid points within ``step``
    of the grid minimum.  Returns ``(radius, gap)``.
    """
    k = S.dim
    ticks = np.arange(-halfwidth, halfwidth + step / 2, step)
    mesh = np.meshgrid(*([ticks] * k), indexing="ij")
    U = np.zeros((ticks.size ** k, k + 1))
    for i in range(k):
        U[:, i + 1] = center[i + 1] - center[0] + mesh[i].ravel()
    G = S.sample(U)
    X = domain.embed([x])
    Y = domain.embed([y])
    dx = domain.dist(X, G)
    r = float(dx.min())
    near = dx <= r + step
    gap = float(domain.dist(Y, G[near]).min())
    return r, gap


# ---------------------------------------------------------------------------
# coarse comparison


@dataclass
class ProjectionReport:
    """Empirical constants comparing linear and closest-point projections.

    All values are maxima over the samples, so they are lower estimates of
    the true constants.
    """

    delta1: float
    samples: int
    witness: dict
    per_set: list
    delta2: float | None = None
    delta4: float | None = None
    method: str = "lp"

    def to_json(self) -> dict:
        return {"delta1": self.delta1, "delta2": self.delta2, "delta4": self.delta4,
                "samples": self.samples, "method": self.method,
                "per_set": self.per_set, "witness": self.witness}


@dataclass(frozen=True)
class SampleSpec:
    n: int = 1000
    radius: float = 2.0
    seed: int = 0


def _log_weights(S: EmbeddedSimplex, p: HPoint) -> np.ndarray:
    b = S.barycentric(p)
    return np.array([math.log(float(c)) for c in b])


def coarse_gap(domain: PolytopeDomain, S: EmbeddedSimplex, spec: SampleSpec = SampleSpec(),
               method: str = "lp", step: float = 1e-3, points: Sequence[HPoint] | None = None,
               all_sets: bool = True) -> ProjectionReport:
    """delta1 = max over samples x and supporting sets of H(L(x), pi_S(x)).

    ``method="lp"`` measures the distance from L(x) to pi_S(x) with one
    linear program; ``method="grid"`` uses :func:`grid_gap` at spacing
    ``step`` around L(x).
    """
    rng = np.random.default_rng(spec.seed)
    pts = list(points) if points is not None else random_interior(domain, rng, spec.n, spec.radius)
    sets = supporting_sets(domain, S)
    if not all_sets:
        sets = sets[:1]
    projs = [build_projection(domain, S, H) for H in sets]
    best = 0.0
    witness: dict = {}
    per_set = []
    for L in projs:
        worst = 0.0
        for x in pts:
            y = project(L, x)
            if method == "grid":
                _, g = grid_gap(domain, S, x, y, _log_weights(S, y), step=step)
            else:
                g, _ = nearest_in_projection(domain, S, x, y)
            g = max(g, 0.0)
            if g > worst:
                worst = g
            if g > best:
                best = g
                witness = {"x": x.to_json(), "L(x)": y.to_json(),
                           "facets": list(L.supporting.facet_ids)}
        per_set.append({"facets": list(L.supporting.facet_ids), "delta1": worst})
    return ProjectionReport(best, len(pts), witness, per_set, method=method)
