"""Projectively natural centers of finite point sets.

The center of mass of a finite set K of interior points is the Hilbert
Chebyshev center of K restricted to the convex hull of K, made unique by a
lexicographic refinement.

The objective is written through the terms

    tau_{a,i,j}(y) = (f_i(y) / f_i(k_a)) / (f_j(y) / f_j(k_a)),

one for each extreme point k_a of the hull and each ordered pair of facets;
``max_{i,j} tau_{a,i,j}(y) = exp(2 H(y, k_a))``.  Stage one minimises the
largest term.  Terms that are pinned at that level on the whole minimiser set
are then frozen and the largest remaining term is minimised, and so on, until
the frozen terms determine the point.  Frozen terms fix ratios of facet
values, and facets span the dual space, so the process ends at a single
point.  Everything is expressed through facets and extreme points, so the
result commutes with projective maps and ignores extra non-extreme samples.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from . import _exact as ex
from .domain import PolytopeDomain, _exact_root, _log_fraction
from .errors import DegenerateHull, NotInterior
from .floatgeom import HIGHS_OPTIONS, hull_distances
from .projective import HPoint

_DEN = 10 ** 12


def _dedupe(points):
    seen = set()
    out = []
    for p in points:
        k = p.key()
        if k not in seen:
            seen.add(k)
            out.append(p)
    return out


def _interval_center(domain: PolytopeDomain, pts) -> HPoint:
    lifts = [domain._interior_lift(p) for p in pts]
    ratios = [Fraction(fv[1], fv[0]) for _, fv in lifts]
    lo = min(range(len(pts)), key=lambda i: ratios[i])
    hi = max(range(len(pts)), key=lambda i: ratios[i])
    rlo, rhi = ratios[lo], ratios[hi]
    if rlo == rhi:
        return pts[lo]
    rho = _exact_root(rlo * rhi, 2)
    if rho is None:
        rho = Fraction(math.exp(0.5 * (_log_fraction(rlo) + _log_fraction(rhi))))
        rho = min(max(rho.limit_denominator(_DEN), rlo), rhi)
    (la, a), (lb, b) = lifts[lo], lifts[hi]
    alpha = rho * b[0] - b[1]
    beta = a[1] - rho * a[0]
    return HPoint([alpha * u + beta * v for u, v in zip(la, lb)])


class _Terms:
    def __init__(self, V: np.ndarray):
        m, L = V.shape
        num, den, labels = [], [], []
        for a in range(L):
            for i in range(m):
                for j in range(m):
                    if i != j:
                        num.append(V[i] / V[i, a])
                        den.append(V[j] / V[j, a])
                        labels.append((a, i, j))
        self.N = np.array(num)
        self.D = np.array(den)
        self.labels = labels
        self.L = L

    def values(self, mu):
        return (self.N @ mu) / (self.D @ mu)


def _feasible(terms: _Terms, free, levels, T, extra_slack=None):
    """Is there mu in the simplex with free terms <= T and fixed terms <= level?"""
    rows = terms.N - np.where(free[:, None], T, levels[:, None]) * terms.D
    L = terms.L
    res = linprog(np.zeros(L), A_ub=rows, b_ub=np.zeros(len(rows)),
                  A_eq=np.ones((1, L)), b_eq=[1.0], bounds=(0, None),
                  method="highs", options=HIGHS_OPTIONS)
    return res.x if res.status == 0 else None


def _pinned(terms: _Terms, free, levels, T, thresh=1e-9):
    """Free terms that cannot drop below T anywhere on the current minimiser set."""
    cand = np.flatnonzero(free)
    L = terms.L
    while len(cand):
        rows = terms.N - np.where(free[:, None], T, levels[:, None]) * terms.D
        n = len(cand)
        A = np.hstack([rows, np.zeros((len(rows), n))])
        A[cand, L + np.arange(n)] = 1.0
        c = np.concatenate([np.zeros(L), -np.ones(n)])
        bounds = [(0, None)] * L + [(0, 1.0)] * n
        res = linprog(c, A_ub=A, b_ub=np.zeros(len(rows)),
                      A_eq=np.concatenate([np.ones(L), np.zeros(n)])[None, :], b_eq=[1.0],
                      bounds=bounds, method="highs", options=HIGHS_OPTIONS)
        if res.status != 0:
            break
        slack = res.x[L:]
        loose = slack > thresh
        if not loose.any():
            break
        cand = cand[~loose]
    return cand


def _chebyshev_refined(domain: PolytopeDomain, V: np.ndarray, max_stages: int = 12):
    terms = _Terms(V)
    n_terms = len(terms.labels)
    free = np.ones(n_terms, dtype=bool)
    levels = np.full(n_terms, np.inf)
    L = V.shape[1]
    mu = np.full(L, 1.0 / L)
    basis = np.array(domain.span.basis, dtype=float)
    facets = domain.facet_matrix
    k = domain.rank
    for _ in range(max_stages):
        vals = terms.values(mu)
        lo = 0.0
        hi = float(np.log(vals[free].max())) + 1e-12
        x_hi = _feasible(terms, free, levels, math.exp(hi))
        if x_hi is None:
            break
        mu = x_hi
        while hi - lo > 1e-13 * max(1.0, hi):
            mid = 0.5 * (lo + hi)
            x = _feasible(terms, free, levels, math.exp(mid))
            if x is None:
                lo = mid
            else:
                hi, mu = mid, x
        T = math.exp(hi)
        pinned = _pinned(terms, free, levels, T)
        if len(pinned) == 0:
            # numerically nothing is pinned; treat the active maxima as pinned
            vals = terms.values(mu)
            pinned = np.flatnonzero(free & (vals >= vals[free].max() * (1 - 1e-9)))
        free[pinned] = False
        levels[pinned] = T
        if not free.any():
            break
        # linear functionals on y fixed so far: f_i/f_i(k_a) - T f_j/f_j(k_a)
        fixed = np.flatnonzero(~free)
        rows = []
        for t in fixed:
            a, i, j = terms.labels[t]
            rows.append(facets[i] / V[i, a] - levels[t] * facets[j] / V[j, a])
        R = np.array(rows) @ basis.T
        sv = np.linalg.svd(R, compute_uv=False)
        if (sv > 1e-8 * sv.max()).sum() >= k - 1:
            break
    return mu


def center_of_mass(domain: PolytopeDomain, K: Sequence[HPoint]) -> HPoint:
    """Center of mass of a finite set of interior points.

    Returns a point of the convex hull of K with exact rational weights.

    Raises
    ------
    DegenerateHull
        If K is empty.
    NotInterior
        If a point of K is not an interior point of the domain.
    """
    pts = _dedupe(list(K))
    if not pts:
        raise DegenerateHull("center of mass of an empty set")
    for p in pts:
        if not domain.locate(p).is_interior:
            raise NotInterior(f"{p!r} is not an interior point")
    if len(pts) == 1 or domain.rank == 1:
        return pts[0]
    if domain.rank == 2:
        return _interval_center(domain, pts)
    lifts = [domain._interior_lift(p)[0] for p in pts]
    P = domain.embed(pts)
    # keep only extreme points of the hull
    ext = []
    for i in range(len(pts)):
        others = [j for j in range(len(pts)) if j != i]
        d, _ = hull_distances(P[i:i + 1], P[others].T, refine=0)
        if d[0] > 1e-9:
            ext.append(i)
    if not ext:
        ext = list(range(len(pts)))
    V = P[ext].T
    mu = _chebyshev_refined(domain, V)
    mu = np.maximum(mu, 0.0)
    mu = mu / mu.sum()
    weights = [Fraction(float(w)).limit_denominator(_DEN) for w in mu]
    if all(w == 0 for w in weights):
        weights = [Fraction(1)] * len(ext)
    acc = [Fraction(0)] * domain.ambient
    phi = domain.chart.functional
    for w, i in zip(weights, ext):
        if w == 0:
            continue
        lift = lifts[i]
        s = ex.dot(phi, lift)
        for c in range(domain.ambient):
            acc[c] += w * Fraction(lift[c], s)
    return HPoint(acc)
