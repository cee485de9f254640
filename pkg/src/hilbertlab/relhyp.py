"""Sampled certification of coarse-geometric conditions.

Every estimator here works on finite samples, so its output is a lower
estimate of the quantity it names (a diameter, a thinness constant, an
axiom constant).  Reports carry their sample counts and resolutions.
"""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .domain import PolytopeDomain
from .errors import DegenerateConfiguration, EmptyFamily, NotQuasiGeodesic
from .floatgeom import (
    hull_distances,
    move_toward,
    pairwise_diameter,
    point_polyline_distance,
    point_segment_distance,
    random_chart_points,
    sample_segment,
)
from .projective import HPoint
from .simplices import EmbeddedSimplex, distance_to_simplex, sample_log_weights


def _chart(domain, p) -> np.ndarray:
    if isinstance(p, HPoint):
        return domain.embed([p])[0]
    return domain.embed(np.asarray(p, dtype=float)[None, :])[0]


# ---------------------------------------------------------------------------
# thin triangles


@dataclass
class ThinCert:
    """Thinness of one triangle.

    With ``method == "one_side"`` every sample of [x, y] lies within ``R`` of
    [x, z] ∪ [z, y] and ``delta = 2 R``.  With ``"exhaustive"`` all three
    sides are sampled and ``delta`` is the largest distance from a side to
    the union of the other two.
    """

    method: str
    R: float
    delta: float
    resolution: float
    samples: int

    def to_json(self) -> dict:
        return asdict(self)


def _side_to_union(domain, A, B, C, resolution):
    """sup over samples of [A, B] of the distance to [A, C] ∪ [C, B]."""
    pts, _ = sample_segment(domain, A, B, resolution)
    d1, _ = point_segment_distance(domain, pts, A, C)
    d2, _ = point_segment_distance(domain, pts, C, B)
    return float(np.minimum(d1, d2).max()), len(pts)


def thin_certify(domain, x, y, z, resolution: float = 1e-2,
                 method: str = "one_side") -> ThinCert:
    """Certify a thinness constant for the triangle x, y, z.

    Parameters
    ----------
    domain
        A polytope or quadric domain.
    x, y, z
        Interior points (HPoints or ambient float vectors).
    resolution
        Hilbert spacing of the side samples.
    method
        ``"one_side"`` samples [x, y] only; ``"exhaustive"`` samples all sides.
    """
    X, Y, Z = (_chart(domain, p) for p in (x, y, z))
    R, n = _side_to_union(domain, X, Y, Z, resolution)
    if method == "one_side":
        return ThinCert(method, R, 2 * R, resolution, n)
    if method != "exhaustive":
        raise ValueError(f"unknown method {method!r}")
    worst = R
    for A, B, C in ((Y, Z, X), (Z, X, Y)):
        r, m = _side_to_union(domain, A, B, C, resolution)
        worst = max(worst, r)
        n += m
    return ThinCert(method, worst, worst, resolution, n)


# ---------------------------------------------------------------------------
# float projections


def _pinv_facets(domain: PolytopeDomain) -> np.ndarray:
    return np.linalg.pinv(domain.facet_matrix)


def float_projector(domain: PolytopeDomain, S: EmbeddedSimplex, kind: str = "closest",
                    projection=None):
    """A function mapping chart rows to chart rows of their projections to S.

    ``kind`` is ``"closest"`` (a minimiser of the distance, by linear
    programming) or ``"linear"`` (the given :class:`LinearProjection`).
    """
    V = S.vertex_values
    if kind == "linear":
        if projection is None:
            from .projections import default_projection
            projection = default_projection(domain, S)
        Lf = projection.float_matrix()
        Fp = _pinv_facets(domain)
        F = domain.facet_matrix

        def proj(P):
            amb = np.atleast_2d(P) @ Fp.T
            return domain.normalize((amb @ Lf.T) @ F.T)
        return proj

    def proj(P):
        P = np.atleast_2d(P)
        if S.dim == 0:
            return np.repeat(domain.normalize(V[:, 0])[None, :], len(P), 0)
        _, W = hull_distances(P, V)
        W = np.maximum(W, 1e-15 * W.max(axis=1, keepdims=True))
        return domain.normalize(W @ V.T)
    return proj


def sample_ball(domain, center: np.ndarray, R: float, n: int, rng) -> np.ndarray:
    """Points of the closed ball of radius R, spread along random rays."""
    W = random_chart_points(domain, rng, n)
    s = R * rng.uniform(0.0, 1.0, size=n)
    s[: min(n, 1)] = R
    return move_toward(domain, center[None, :], W, s)


# ---------------------------------------------------------------------------
# almost-projection systems


@dataclass
class APSReport:
    C_hat: tuple
    samples: int
    projection: str
    witnesses: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"C_hat": list(self.C_hat), "samples": self.samples,
                "projection": self.projection, "witnesses": self.witnesses}


def aps_check(domain: PolytopeDomain, family: Sequence[EmbeddedSimplex],
              projection: str = "closest", n: int = 50, radius: float = 2.0,
              seed: int = 0) -> APSReport:
    """Estimate the three axiom constants of an almost-projection system.

    Axiom 1: max over x and p in S of d(x, πx) + d(πx, p) - d(x, p).
    Axiom 2: max over S != S' of the diameter of π_S of samples of S'.
    Axiom 3: max over x of the diameter of π_S of the ball B(x; d(x, S)).

    Raises
    ------
    EmptyFamily
        If the family is empty.
    """
    fam = list(family)
    if not fam:
        raise EmptyFamily("aps_check needs a nonempty family")
    rng = np.random.default_rng(seed)
    X = random_chart_points(domain, rng, n, radius)
    c1 = c2 = c3 = 0.0
    wit: dict = {}
    for a, S in enumerate(fam):
        proj = float_projector(domain, S, projection)
        PX = proj(X)
        Ps = S.sample(sample_log_weights(S.dim, n, radius, rng))
        dxp = domain.dist(X[:, None, :], Ps[None, :, :])
        dxpi = domain.dist(X, PX)
        dpip = domain.dist(PX[:, None, :], Ps[None, :, :])
        viol = dxpi[:, None] + dpip - dxp
        v = float(viol.max())
        if v > c1:
            c1 = v
            wit["axiom1"] = {"simplex": a}
        for b, T in enumerate(fam):
            if b == a:
                continue
            Pt = T.sample(sample_log_weights(T.dim, n, radius, rng))
            dm = pairwise_diameter(domain, proj(Pt))
            if dm > c2:
                c2 = dm
                wit["axiom2"] = {"simplex": a, "other": b}
        rs = distance_to_simplex(S, X)
        for i in range(min(n, 10)):
            B = sample_ball(domain, X[i], float(rs[i]), 20, rng)
            dm = pairwise_diameter(domain, proj(B))
            if dm > c3:
                c3 = dm
                wit["axiom3"] = {"simplex": a, "sample": i}
    return APSReport((max(c1, 0.0), c2, c3), n, projection, wit)


# ---------------------------------------------------------------------------
# isolation


@dataclass
class IsolationReport:
    """Sampled diameters of N(S1; r) ∩ N(S2; r) for growing sample budgets."""

    table: list
    growth: bool
    slopes: dict
    samples: int

    def to_json(self) -> dict:
        return {"table": self.table, "growth": self.growth,
                "slopes": {str(k): v for k, v in self.slopes.items()}, "samples": self.samples}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "budget", "D_hat"])
        for row in self.table:
            w.writerow([repr(row["r"]), repr(row["budget"]), repr(row["D_hat"])])
        return buf.getvalue()


def _flat_samples(S: EmbeddedSimplex, budget: float, n: int, rng) -> np.ndarray:
    if S.dim == 1:
        u = np.linspace(-budget, budget, n)
        U = np.stack([-u, u], axis=1)
    else:
        U = sample_log_weights(S.dim, n, budget, rng)
    return U


def isolation_diameter(domain: PolytopeDomain, S1: EmbeddedSimplex, S2: EmbeddedSimplex,
                       r_list: Sequence[float] = (0.5, 1.0, 2.0),
                       budgets: Sequence[float] = (10.0, 20.0, 40.0),
                       n: int = 200, seed: int = 0,
                       growth_slope: float = 0.5) -> IsolationReport:
    """Sampled diam(N(S1; r) ∩ N(S2; r)) per (r, budget).

    Points of either simplex within 2r of the other are collected from flat
    samples out to radius ``budget``; the diameter of the collected set is
    reported.  Growth is flagged when the least-squares slope of the
    diameter against the budget reaches ``growth_slope`` for some r.
    """
    if S1.key() == S2.key():
        raise DegenerateConfiguration("isolation needs two distinct simplices")
    rng = np.random.default_rng(seed)
    table = []
    slopes = {}
    for budget in budgets:
        U1 = _flat_samples(S1, budget, n, rng)
        U2 = _flat_samples(S2, budget, n, rng)
        P1, P2 = S1.sample(U1), S2.sample(U2)
        d12 = distance_to_simplex(S2, P1, width=budget + 10.0)
        d21 = distance_to_simplex(S1, P2, width=budget + 10.0)
        for r in r_list:
            pts = np.vstack([P1[d12 <= 2 * r], P2[d21 <= 2 * r]])
            table.append({"r": float(r), "budget": float(budget),
                          "D_hat": pairwise_diameter(domain, pts)})
    growth = False
    for r in r_list:
        rows = [t for t in table if t["r"] == float(r)]
        b = np.array([t["budget"] for t in rows])
        D = np.array([t["D_hat"] for t in rows])
        slope = float(np.polyfit(b, D, 1)[0]) if len(b) > 1 else 0.0
        slopes[float(r)] = slope
        growth = growth or slope >= growth_slope
    table.sort(key=lambda t: (t["r"], t["budget"]))
    return IsolationReport(table, growth, slopes, n)


# ---------------------------------------------------------------------------
# transverse triangles


@dataclass
class TransverseCheck:
    kappa: float
    Delta: float
    per_edge: list
    resolution: float

    def to_json(self) -> dict:
        return asdict(self)


def transverse_measure(domain: PolytopeDomain, family: Sequence[EmbeddedSimplex], triangle,
                       kappa: float, resolution: float = 1e-2) -> TransverseCheck:
    """Delta = max over edges and members of diam(N(S; kappa) ∩ edge samples)."""
    if kappa <= 0:
        raise DegenerateConfiguration("kappa must be positive")
    X = [_chart(domain, p) for p in triangle]
    per_edge = []
    worst = 0.0
    for a, b in ((0, 1), (1, 2), (2, 0)):
        pts, arc = sample_segment(domain, X[a], X[b], resolution)
        best = 0.0
        for S in family:
            near = distance_to_simplex(S, pts) <= kappa
            if near.any():
                best = max(best, float(arc[near].max() - arc[near].min()))
        per_edge.append(best)
        worst = max(worst, best)
    return TransverseCheck(float(kappa), worst, per_edge, resolution)


# ---------------------------------------------------------------------------
# quasi-geodesics


@dataclass
class MorseResult:
    passed: bool
    gap: float
    bound: float
    c: float
    delta: float
    penetration: dict | None = None

    def to_json(self) -> dict:
        return asdict(self)


def check_quasi_geodesic(domain, P: np.ndarray, times: np.ndarray, c: float,
                         tol: float = 1e-9) -> None:
    """Raise NotQuasiGeodesic unless |t_i - t_j| - c <= d <= |t_i - t_j| + c."""
    D = domain.dist(P[:, None, :], P[None, :, :])
    T = np.abs(times[:, None] - times[None, :])
    if (D < T - c - tol).any():
        raise NotQuasiGeodesic("path violates the lower quasi-geodesic bound")
    if (D > T + c + tol).any():
        raise NotQuasiGeodesic("path violates the upper quasi-geodesic bound")


def penetration_constant(C: float, Delta: float, c: float, sigma_g: float = 1.0) -> dict:
    """sigma0 = max(10 C, 1, sigma_G) and the bound Delta + 10 sigma0 + 18 c sigma0."""
    sigma0 = max(10.0 * C, 1.0, sigma_g)
    return {"sigma0": sigma0, "bound": Delta + 10.0 * sigma0 + 18.0 * c * sigma0}


def morse_check(domain, path, times, c: float, delta: float, resolution: float = 1e-2,
                C: float | None = None, Delta: float | None = None,
                tol: float = 1e-9) -> MorseResult:
    """Compare a sampled (1, c)-quasi-geodesic with the geodesic between its ends.

    The path is read as the piecewise geodesic through its samples.  Passes when the sampled Hausdorff distance is at most 4 delta + 10 c.

    Raises
    ------
    NotQuasiGeodesic
        If the samples violate either quasi-geodesic inequality.
    """
    P = np.array([_chart(domain, p) for p in path])
    t = np.asarray(times, dtype=float)
    check_quasi_geodesic(domain, P, t, c)
    A, B = P[0], P[-1]
    d_path, _ = point_segment_distance(domain, P, A, B)
    G, _ = sample_segment(domain, A, B, resolution)
    d_geo = point_polyline_distance(domain, G, P)
    gap = float(max(d_path.max(), d_geo.max()))
    bound = 4.0 * delta + 10.0 * c
    pen = None
    if C is not None and Delta is not None:
        pen = penetration_constant(C, Delta, c)
    return MorseResult(gap <= bound + tol, gap, bound, float(c), float(delta), pen)


def perturbed_geodesic(domain, x, y, c: float, n: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """Samples of [x, y] at equal arclength, each moved by at most c / 2."""
    X, Y = _chart(domain, x), _chart(domain, y)
    length = float(domain.dist(X[None], Y[None])[0])
    pts, arc = sample_segment(domain, X, Y, max(length / max(n - 1, 1), 1e-12))
    W = random_chart_points(domain, rng, len(pts))
    s = 0.5 * c * rng.uniform(0.0, 1.0, size=len(pts))
    s[0] = s[-1] = 0.0
    return move_toward(domain, pts, W, s), arc


# ---------------------------------------------------------------------------
# projection constants


def projection_constants(domain: PolytopeDomain, S: EmbeddedSimplex, projection=None,
                         n: int = 50, radius: float = 2.0, resolution: float = 2e-2,
                         seed: int = 0) -> dict:
    """Empirical delta2, delta3, delta4 and a penetration check for L.

    delta2 is the largest exhaustive thinness of triangles x, z, L(x) with
    z in S.  delta4 is grown from zero until every sampled pair with
    H(Lx, Ly) >= delta4 has both projections within delta4 of [x, y].
    The penetration check counts pairs where N(S; 2 delta4) ∩ [x, y] is
    shorter than H(Lx, Ly) - 2 delta4 - resolution.
    """
    rng = np.random.default_rng(seed)
    proj = float_projector(domain, S, "linear", projection)
    X = random_chart_points(domain, rng, n, radius)
    LX = proj(X)
    Z = S.sample(sample_log_weights(S.dim, n, radius, rng))
    d2 = 0.0
    for i in range(min(n, 20)):
        if domain.dist(X[i][None], LX[i][None])[0] < 1e-9:
            continue
        d2 = max(d2, thin_certify(domain, X[i], Z[i], LX[i], resolution, "exhaustive").delta)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)][: 4 * n]
    I = np.array([p[0] for p in pairs])
    J = np.array([p[1] for p in pairs])
    dLL = domain.dist(LX[I], LX[J])
    e1, _ = point_segment_distance(domain, LX[I], X[I], X[J])
    e2, _ = point_segment_distance(domain, LX[J], X[I], X[J])
    e = np.maximum(e1, e2)
    d4 = 0.0
    while True:
        bad = (dLL >= d4) & (e > d4)
        if not bad.any():
            break
        d4 = float(e[bad].max())
    violations = 0
    for k in np.flatnonzero(dLL - 2 * d4 > resolution)[:20]:
        pts, arc = sample_segment(domain, X[I[k]], X[J[k]], resolution)
        near = distance_to_simplex(S, pts) <= 2 * d4
        span = float(arc[near].max() - arc[near].min()) if near.any() else 0.0
        if span < dLL[k] - 2 * d4 - resolution:
            violations += 1
    return {"delta2": d2, "delta4": d4, "penetration_violations": violations,
            "pairs": len(pairs)}
