"""Float estimators shared by the projection and certification code.

Every function takes a domain exposing ``dist``, ``chord_params`` and
``lerp`` on arrays of chart coordinates (see :mod:`hilbertlab.domain`), so
the same code serves polytopes and quadrics.

Segment searches run over the Hilbert arclength parameter of the segment's
chord.  The distance from a point to a moving point of a line has convex
sublevel sets, so along the line it decreases, possibly stays flat at its
minimum value, and then increases; golden-section search is therefore exact
up to its tolerance.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog
from scipy.special import expit

from .errors import ToleranceNotReached

_GOLD = (np.sqrt(5.0) - 1.0) / 2.0

HIGHS_OPTIONS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
}


def _arclength(t, ta, tb):
    return 0.5 * (np.log(t - ta) - np.log(tb - t))


def _from_arclength(u, ta, tb):
    return ta + (tb - ta) * expit(2.0 * u)


def golden_min(f, lo, hi, tol: float = 1e-10, max_iter: int = 200):
    """Vectorised golden-section minimisation of f over [lo, hi] (arrays)."""
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    for _ in range(max_iter):
        if np.all(hi - lo <= tol):
            break
        c = hi - _GOLD * (hi - lo)
        d = lo + _GOLD * (hi - lo)
        left = f(c) <= f(d)
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
    x = 0.5 * (lo + hi)
    return x, f(x)


def point_segment_distance(domain, P, X, Y, tol: float = 1e-10):
    """Distance from each row of P to the closed segment [X, Y] (row-wise).

    Returns ``(distance, point)`` where point is a minimiser on the segment.
    """
    P, X, Y = (np.atleast_2d(np.asarray(a, dtype=float)) for a in (P, X, Y))
    n = max(len(P), len(X), len(Y))
    P, X, Y = (np.broadcast_to(a, (n, a.shape[1])) for a in (P, X, Y))
    seg = domain.dist(X, Y)
    short = seg < 1e-14
    Yb = Y
    ta, tb = domain.chord_params(X, Yb)
    if short.any():
        # degenerate segments: any finite chord keeps the search harmless
        ta = np.where(short, -1.0, ta)
        tb = np.where(short, 2.0, tb)
    u0 = _arclength(0.0, ta, tb)
    u1 = _arclength(1.0, ta, tb)

    def f(u):
        t = _from_arclength(u, ta, tb)
        return domain.dist(P, domain.lerp(X, Yb, t))

    u, fu = golden_min(f, u0, u1, tol=tol)
    d0 = domain.dist(P, X)
    d1 = domain.dist(P, Y)
    best = np.minimum(fu, np.minimum(d0, d1))
    t = _from_arclength(u, ta, tb)
    pt = domain.lerp(X, Yb, t)
    pt = np.where((d0 <= best)[:, None], X, pt)
    pt = np.where((d1 <= best)[:, None] & (d0 > best)[:, None], Y, pt)
    if short.any():
        best = np.where(short, d0, best)
        pt = np.where(short[:, None], X, pt)
    return best, pt


def point_polyline_distance(domain, P, V):
    """Distance from rows of P to the piecewise-geodesic path through rows of V.

    Each row is compared with the two segments at its nearest vertex, so the
    result is an upper bound for the distance to the whole path (exact when
    the nearest vertex lies on a segment that realises the minimum).
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    V = np.atleast_2d(np.asarray(V, dtype=float))
    D = domain.dist(P[:, None, :], V[None, :, :])
    k = D.argmin(axis=1)
    best = D[np.arange(len(P)), k]
    if len(V) == 1:
        return best
    for lo in (np.maximum(k - 1, 0), np.minimum(k, len(V) - 2)):
        d, _ = point_segment_distance(domain, P, V[lo], V[lo + 1])
        best = np.minimum(best, d)
    return best


def line_points(domain_normalize, A, B, u):
    """Points e^{-u} A + e^{u} B of the open line between boundary points A, B.

    ``A`` and ``B`` are nonnegative facet-value vectors; the combination has
    no cancellation, so far-out points stay accurate.
    """
    u = np.asarray(u, dtype=float)
    w = np.stack([-u, u], axis=-1)
    w = np.exp(w - w.max(axis=-1, keepdims=True))
    vals = w[..., :1] * A + w[..., 1:] * B
    return domain_normalize(vals)


def point_line_distance(domain, P, A, B, center=None, width: float = 40.0, tol: float = 1e-10):
    """Distance from rows of P to the full open line with boundary ends A, B."""
    P = np.atleast_2d(P)
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    c = np.zeros(len(P)) if center is None else np.asarray(center, dtype=float)

    def f(u):
        return domain.dist(P, line_points(domain.normalize, A, B, u))

    u, fu = golden_min(f, c - width, c + width, tol=tol)
    return fu, u


def simplex_points(domain, V: np.ndarray, U: np.ndarray) -> np.ndarray:
    """Chart coordinates of sum_j exp(U_j) v_j for generator facet values V.

    ``V`` has shape (n_facets, n_vertices); ``U`` has shape (n, n_vertices).
    """
    U = np.atleast_2d(np.asarray(U, dtype=float))
    W = np.exp(U - U.max(axis=-1, keepdims=True))
    return domain.normalize(W @ V.T)


def _hull_block(A):
    """Rows of one LP block: min t s.t. A lam >= 1, A lam <= t, lam >= 0."""
    m, n = A.shape
    ub = sp.bmat([[-sp.csr_matrix(A), sp.csr_matrix((m, 1))],
                  [sp.csr_matrix(A), -sp.csr_matrix(np.ones((m, 1)))]])
    rhs = np.concatenate([-np.ones(m), np.zeros(m)])
    return ub, rhs, n + 1


def hull_distances(P: np.ndarray, V: np.ndarray, chunk: int = 200, refine: int = 1):
    """Hilbert distance from each row of P to the cone hull of the columns of V.

    Both are facet-value data of one polytope: ``P`` is (n, m) and ``V`` is
    (m, k).  For fixed P the distance is log(t)/2 for the optimum of the linear
    program min t subject to 1 <= (A lam)_i <= t, lam >= 0, with
    A = diag(1/P) V.  Many points are solved at once as one block-diagonal
    program.  ``refine`` extra passes rescale the columns by the previous
    optimum, which repairs badly scaled inputs.

    Returns ``(distances, weights)`` where weights are the optimal lam per
    point (scaled to sum one).
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    V = np.asarray(V, dtype=float)
    n = len(P)
    k = V.shape[1]
    scales = np.ones((n, k))
    weights = np.zeros((n, k))
    for _ in range(refine + 1):
        for s in range(0, n, chunk):
            idx = range(s, min(n, s + chunk))
            blocks, rhss = [], []
            for i in idx:
                A = (V / P[i][:, None]) * scales[i][None, :]
                A = A / A.max()
                ub, rhs, _ = _hull_block(A)
                blocks.append(ub)
                rhss.append(rhs)
            A_ub = sp.block_diag(blocks, format="csr")
            b_ub = np.concatenate(rhss)
            c = np.tile(np.concatenate([np.zeros(k), [1.0]]), len(blocks))
            res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=(0, None), method="highs",
                          options=HIGHS_OPTIONS)
            if res.status != 0:
                raise ToleranceNotReached(f"hull distance program failed: {res.message}")
            x = res.x.reshape(len(blocks), k + 1)
            for j, i in enumerate(idx):
                lam = np.maximum(x[j, :k], 0.0) * scales[i]
                weights[i] = lam / lam.sum()
        scales = np.maximum(weights, 1e-14 * weights.max(axis=1, keepdims=True))
        scales = scales / scales.max(axis=1, keepdims=True)
    Y = weights @ V.T
    Y = Y / Y.sum(axis=1, keepdims=True)
    lr = np.log(Y) - np.log(P / P.sum(axis=1, keepdims=True))
    return 0.5 * (lr.max(axis=1) - lr.min(axis=1)), weights


def pairwise_diameter(domain, X: np.ndarray) -> float:
    """Largest pairwise distance among rows of X (0 for fewer than two rows)."""
    X = np.atleast_2d(X)
    if len(X) < 2:
        return 0.0
    best = 0.0
    for s in range(0, len(X), 256):
        D = domain.dist(X[s:s + 256, None, :], X[None, :, :])
        best = max(best, float(D.max()))
    return best


def sample_segment(domain, X, Y, step: float):
    """Points of [X, Y] at Hilbert spacing at most ``step`` (both ends included)."""
    X = np.asarray(X, dtype=float).reshape(1, -1)
    Y = np.asarray(Y, dtype=float).reshape(1, -1)
    length = float(domain.dist(X, Y)[0])
    n = max(int(np.ceil(length / step)), 1)
    if length < 1e-14:
        return X.copy(), np.zeros(1)
    ta, tb = domain.chord_params(X, Y)
    u0 = _arclength(0.0, ta, tb)[0]
    u1 = _arclength(1.0, ta, tb)[0]
    u = np.linspace(u0, u1, n + 1)
    t = _from_arclength(u, ta[0], tb[0])
    pts = domain.lerp(np.repeat(X, n + 1, 0), np.repeat(Y, n + 1, 0), t)
    return pts, u - u0


def move_toward(domain, P, W, s):
    """Points at Hilbert distance s from rows of P on the rays towards rows of W."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    W = np.atleast_2d(np.asarray(W, dtype=float))
    n = max(len(P), len(W))
    P, W = (np.broadcast_to(a, (n, a.shape[1])) for a in (P, W))
    s = np.broadcast_to(np.asarray(s, dtype=float), (n,))
    ta, tb = domain.chord_params(P, W)
    u0 = _arclength(0.0, ta, tb)
    t = _from_arclength(u0 + s, ta, tb)
    return domain.lerp(P, W, t)


def random_chart_points(domain, rng, n: int, spread: float = 2.0) -> np.ndarray:
    """Random interior chart points with log-uniform facet values (polytopes)
    or uniform in the ball of Hilbert radius ``spread`` about the chart center
    (quadrics)."""
    if hasattr(domain, "facets"):
        U = rng.uniform(-spread, spread, size=(n, domain.vertex_values.shape[1]))
        W = np.exp(U)
        return domain.normalize(W @ domain.vertex_values.T)
    d = domain.ambient
    c = domain.embed([domain.chart_vector])
    dirs = rng.normal(size=(n, d))
    dirs -= np.outer(dirs @ domain.chart_vector, domain.chart_vector)
    radius = rng.uniform(0, spread, size=n)
    return move_toward(domain, c, c + 0.5 * dirs / np.linalg.norm(dirs, axis=1)[:, None] * 1e-3, radius)
