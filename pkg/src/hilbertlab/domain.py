"""Properly convex domains and their Hilbert metric.

Two kinds of domain are provided.

* :class:`PolytopeDomain` is exact.  It is the projectivised open cone over a
  finite set of vertex lifts, described internally by primitive integer facet
  functionals.  Hilbert distances come out as exact rationals ``q`` with
  ``H = log(q) / 2``.
* :class:`QuadricDomain` is the float-mode ball ``{x : x^T M x < 0}`` for a
  form of signature (1, d-1).

Both kinds expose the same small float interface (``embed``, ``dist``,
``chord_params``, ``lerp``) which the estimators in :mod:`hilbertlab.floatgeom`
build on.  For polytopes the float representation of a point is its vector of
facet values scaled to sum one, i.e. affine coordinates in the chart given by
the sum of the facets.
"""

from __future__ import annotations

import enum
import itertools
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import _exact as ex
from .errors import (
    DegenerateConfiguration,
    EmptyAfterRestriction,
    NotInterior,
    NotOnBoundary,
    OutOfRange,
    OutsideDomain,
)
from .projective import Chart, HPoint, LinSubspace, span_vectors


# ---------------------------------------------------------------------------
# lengths


def _log_fraction(q: Fraction) -> float:
    # math.log accepts arbitrarily large ints, unlike float(q)
    return math.log(q.numerator) - math.log(q.denominator)


def _exact_root(q: Fraction, n: int) -> Fraction | None:
    def iroot(a: int) -> int | None:
        r = round(a ** (1.0 / n)) if a < 2 ** 1000 else _int_root(a, n)
        for c in (r - 1, r, r + 1):
            if c >= 0 and c ** n == a:
                return c
        return None

    num, den = iroot(q.numerator), iroot(q.denominator)
    if num is None or den is None:
        return None
    return Fraction(num, den)


def _int_root(a: int, n: int) -> int:
    lo, hi = 0, 1 << (a.bit_length() // n + 1)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid ** n <= a:
            lo = mid
        else:
            hi = mid - 1
    return lo


class HilbertLength:
    """A Hilbert length ``H = log(q) / 2``.

    In exact mode the rational ``q >= 1`` is stored and comparisons and sums
    never take logarithms.  In float mode only the value ``H`` is stored.
    """

    __slots__ = ("q", "_h")

    def __init__(self, q: Fraction | int | None = None, h: float | None = None):
        if q is not None:
            q = Fraction(q)
            if q < 1:
                raise ValueError("a Hilbert length needs q >= 1")
            self.q = q
            self._h = None
        else:
            if h is None or h < 0 or math.isnan(h):
                raise ValueError("a float Hilbert length needs a value >= 0")
            self.q = None
            self._h = float(h)

    @classmethod
    def exact(cls, q) -> "HilbertLength":
        return cls(q=q)

    @classmethod
    def from_float(cls, h: float) -> "HilbertLength":
        return cls(h=max(float(h), 0.0))

    @classmethod
    def zero(cls) -> "HilbertLength":
        return cls(q=1)

    @property
    def is_exact(self) -> bool:
        return self.q is not None

    @property
    def value(self) -> float:
        if self.q is not None:
            return 0.5 * _log_fraction(self.q)
        return self._h

    def __float__(self) -> float:
        return self.value

    def _both_exact(self, other) -> bool:
        return self.q is not None and other.q is not None

    def __eq__(self, other):
        if not isinstance(other, HilbertLength):
            return NotImplemented
        if self._both_exact(other):
            return self.q == other.q
        return self.value == other.value

    def __hash__(self):
        return hash(self.q) if self.q is not None else hash(self._h)

    def __lt__(self, other):
        if self._both_exact(other):
            return self.q < other.q
        return self.value < other.value

    def __le__(self, other):
        if self._both_exact(other):
            return self.q <= other.q
        return self.value <= other.value

    def __gt__(self, other):
        return other < self

    def __ge__(self, other):
        return other <= self

    def __add__(self, other: "HilbertLength") -> "HilbertLength":
        if self._both_exact(other):
            return HilbertLength(q=self.q * other.q)
        return HilbertLength(h=self.value + other.value)

    def __truediv__(self, n: int) -> "HilbertLength":
        if not isinstance(n, int) or n <= 0:
            raise TypeError("lengths divide by positive integers only")
        if self.q is not None:
            root = _exact_root(self.q, n)
            if root is not None:
                return HilbertLength(q=root)
        return HilbertLength(h=self.value / n)

    def __repr__(self):
        if self.q is not None:
            return f"HilbertLength(q={self.q})"
        return f"HilbertLength(h={self._h!r})"

    def to_json(self) -> dict:
        return {"q": None if self.q is None else str(self.q), "H": self.value}


def _as_length(s) -> HilbertLength:
    if isinstance(s, HilbertLength):
        return s
    if isinstance(s, Fraction):
        return HilbertLength(h=float(s))
    return HilbertLength(h=float(s))


# ---------------------------------------------------------------------------
# locations and faces


class Where(enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class Location:
    where: Where
    face: "Face | None" = None
    sign: int = 0
    zero_facets: frozenset = frozenset()

    @property
    def is_interior(self) -> bool:
        return self.where is Where.INTERIOR

    @property
    def is_boundary(self) -> bool:
        return self.where is Where.BOUNDARY

    @property
    def is_outside(self) -> bool:
        return self.where is Where.OUTSIDE


class Face:
    """A relatively open face of a :class:`PolytopeDomain`.

    The face is identified by the set of parent vertex indices lying in its
    closure.  Its own Hilbert geometry is available through :attr:`domain`,
    built lazily on first access.
    """

    def __init__(self, parent: "PolytopeDomain", vertex_set: Iterable[int]):
        self.parent = parent
        self.vertex_set = frozenset(vertex_set)
        self._domain = None

    @property
    def vertex_indices(self) -> tuple[int, ...]:
        return tuple(sorted(self.vertex_set))

    @property
    def vertices(self) -> tuple[HPoint, ...]:
        return tuple(self.parent.vertices[i] for i in self.vertex_indices)

    @property
    def is_whole(self) -> bool:
        return len(self.vertex_set) == len(self.parent.vertices)

    @property
    def domain(self) -> "PolytopeDomain":
        if self._domain is None:
            with self.parent._lock:
                if self._domain is None:
                    if self.is_whole:
                        self._domain = self.parent
                    else:
                        self._domain = PolytopeDomain(self.vertices)
        return self._domain

    @property
    def dim(self) -> int:
        return ex.rank([v.coords for v in self.vertices]) - 1

    @property
    def span(self) -> LinSubspace:
        return self.domain.span

    def barycenter(self) -> HPoint:
        return self.parent.vertex_barycenter(self.vertex_indices)

    def contains(self, x: HPoint) -> bool:
        loc = self.parent.locate(x)
        return loc.face is not None and loc.face.vertex_set == self.vertex_set

    def __eq__(self, other):
        if not isinstance(other, Face):
            return NotImplemented
        return self.parent is other.parent and self.vertex_set == other.vertex_set

    def __hash__(self):
        return hash((id(self.parent), self.vertex_set))

    def __repr__(self):
        return f"Face({list(self.vertex_indices)})"


@dataclass(frozen=True)
class Chord:
    """Boundary points of the line through x and y, ordered a, x, y, b.

    ``ta`` and ``tb`` are the affine parameters of a and b on ``x + t (y - x)``
    for the chart-normalised lifts ``x_lift`` and ``y_lift``.
    """

    a: HPoint
    b: HPoint
    face_a: "Face | None"
    face_b: "Face | None"
    ta: Fraction
    tb: Fraction
    x_lift: tuple
    y_lift: tuple


# ---------------------------------------------------------------------------
# polytopes


class PolytopeDomain:
    """Exact properly convex polytope: the open cone over given vertex lifts.

    Parameters
    ----------
    vertices
        Vertex lifts.  Their signs matter: the domain is the projectivisation
        of the open cone they generate.
    dim
        Optional projective dimension to check the vertex span against.
    prune
        Drop vertices that are not extreme instead of rejecting them.

    Raises
    ------
    DegenerateConfiguration
        If the vertices are repeated, not extreme (without ``prune``), span
        the wrong dimension, or generate a cone containing a line.
    """

    mode = "rational"

    def __init__(self, vertices: Sequence, dim: int | None = None, prune: bool = False,
                 facet_data: tuple | None = None):
        pts = [v if isinstance(v, HPoint) else HPoint(v) for v in vertices]
        if not pts:
            raise DegenerateConfiguration("a domain needs at least one vertex")
        d = pts[0].dim
        if any(p.dim != d for p in pts):
            raise DegenerateConfiguration("vertices live in different ambient spaces")
        if len(set(pts)) != len(pts):
            raise DegenerateConfiguration("repeated vertex")
        self.ambient = d
        self._lock = threading.RLock()
        self._faces: dict[frozenset, Face] = {}
        lifts = [ex.primitive(p.coords) for p in pts]
        self.span = span_vectors(lifts, d)
        k = self.span.dim
        if dim is not None and k != dim + 1:
            raise DegenerateConfiguration(
                f"vertices span projective dimension {k - 1}, expected {dim}")
        self.rank = k
        self.dim = k - 1
        facets, incid = (self._check_facets(lifts, *facet_data) if facet_data is not None
                         else self._facets_of(lifts))
        if k > 1:
            if ex.rank([self._span_coords(f, ambient=True) for f in facets]) < k:
                raise DegenerateConfiguration("vertex cone contains a line; not properly convex")
            extreme = [ex.rank([self._span_coords(facets[j], ambient=True)
                                for j in range(len(facets)) if i in incid[j]]) == k - 1
                       for i in range(len(lifts))]
            if not all(extreme):
                if not prune:
                    bad = [i for i, e in enumerate(extreme) if not e]
                    raise DegenerateConfiguration(f"vertices {bad} are not extreme")
                keep = [i for i, e in enumerate(extreme) if e]
                pts = [pts[i] for i in keep]
                lifts = [lifts[i] for i in keep]
                facets, incid = self._facets_of(lifts)
        self.vertices = tuple(HPoint(v) for v in lifts)
        self.lifts = tuple(lifts)
        self.facets = tuple(facets)
        self.incidence = tuple(frozenset(s) for s in incid)
        self.vertex_facets = tuple(
            frozenset(j for j, s in enumerate(self.incidence) if i in s)
            for i in range(len(lifts)))
        if facets:
            phi = tuple(sum(col) for col in zip(*facets))
        else:
            phi = tuple(lifts[0])
        self.chart = Chart(phi)
        self.full_mask = (1 << len(lifts)) - 1
        self.facet_masks = tuple(sum(1 << i for i in s) for s in self.incidence)
        self._float_cache = None
        self._closure_cache: dict[int, int] = {}

    # -- construction helpers ------------------------------------------------

    @classmethod
    def from_points(cls, points: Sequence, prune: bool = True) -> "PolytopeDomain":
        return cls(points, prune=prune)

    def _span_coords(self, v, ambient: bool = False) -> tuple:
        """Coordinates of a vector (or ambient functional) in the RREF basis."""
        return tuple(v[p] for p in self.span.pivots)

    def _check_facets(self, lifts, facets, incid):
        """Validate cached facet data against the vertices (exact, O(mn))."""
        facets = [tuple(int(c) for c in f) for f in facets]
        incid = [frozenset(s) for s in incid]
        if len(facets) != len(incid):
            raise DegenerateConfiguration("cached facet data is inconsistent")
        for f, inc in zip(facets, incid):
            vals = [ex.dot(f, v) for v in lifts]
            if any(v < 0 for v in vals) or frozenset(i for i, v in enumerate(vals) if v == 0) != inc:
                raise DegenerateConfiguration("cached facet data does not match the vertices")
            if ex.rank([self._span_coords(lifts[i]) for i in inc]) != self.span.dim - 1:
                raise DegenerateConfiguration("cached facet does not support a facet")
        if sorted(facets) != facets:
            raise DegenerateConfiguration("cached facets are not in canonical order")
        return facets, [set(s) for s in incid]

    def facet_data(self) -> dict:
        return {"facets": [list(f) for f in self.facets],
                "incidence": [sorted(s) for s in self.incidence]}

    def _facets_of(self, lifts):
        k = self.span.dim
        if k <= 1:
            return [], []
        coords = [self._span_coords(v) for v in lifts]
        found: dict[tuple, set] = {}
        incid_list: list[frozenset] = []
        n = len(lifts)
        for combo in itertools.combinations(range(n), k - 1):
            cs = set(combo)
            if any(cs <= s for s in incid_list):
                continue
            null = ex.nullspace([coords[i] for i in combo], k)
            if len(null) != 1:
                continue
            g = ex.primitive(null[0])
            vals = [ex.dot(g, c) for c in coords]
            if all(v >= 0 for v in vals):
                pass
            elif all(v <= 0 for v in vals):
                g = tuple(-x for x in g)
                vals = [-v for v in vals]
            else:
                continue
            if g in found:
                continue
            zero = frozenset(i for i, v in enumerate(vals) if v == 0)
            found[g] = zero
            incid_list.append(zero)
        facets = []
        incid = []
        for g in sorted(found):
            f = [0] * self.ambient
            for gi, p in zip(g, self.span.pivots):
                f[p] = gi
            facets.append(tuple(f))
            incid.append(found[g])
        return facets, incid

    # -- exact queries -------------------------------------------------------

    def facet_values(self, x) -> tuple:
        v = x.coords if isinstance(x, HPoint) else x
        return tuple(ex.dot(f, v) for f in self.facets)

    def locate(self, x: HPoint) -> Location:
        """Classify x as interior, boundary (with its open face) or outside."""
        if x.dim != self.ambient:
            raise DegenerateConfiguration("point lives in a different ambient space")
        if not self.span.contains(x):
            return Location(Where.OUTSIDE)
        if self.rank == 1:
            sign = 1 if ex.dot(self.chart.functional, x.coords) > 0 else -1
            return Location(Where.INTERIOR, self.full_face, sign)
        vals = self.facet_values(x)
        if all(v > 0 for v in vals):
            return Location(Where.INTERIOR, self.full_face, 1)
        if all(v < 0 for v in vals):
            return Location(Where.INTERIOR, self.full_face, -1)
        if all(v >= 0 for v in vals):
            sign = 1
        elif all(v <= 0 for v in vals):
            sign = -1
        else:
            return Location(Where.OUTSIDE)
        zeros = frozenset(j for j, v in enumerate(vals) if v == 0)
        verts = frozenset(range(len(self.vertices)))
        for j in zeros:
            verts &= self.incidence[j]
        return Location(Where.BOUNDARY, self.face(verts), sign, zeros)

    @property
    def full_face(self) -> Face:
        return self.face(range(len(self.vertices)))

    def face(self, vertex_set: Iterable[int]) -> Face:
        key = frozenset(vertex_set)
        f = self._faces.get(key)
        if f is None:
            with self._lock:
                f = self._faces.get(key)
                if f is None:
                    f = Face(self, key)
                    self._faces[key] = f
        return f

    def closure_face(self, vertex_set: Iterable[int]) -> Face:
        """Smallest face whose closure contains the given vertices."""
        s = frozenset(vertex_set)
        verts = frozenset(range(len(self.vertices)))
        for inc in self.incidence:
            if s <= inc:
                verts &= inc
        return self.face(verts)

    def closure_mask(self, mask: int) -> int:
        hit = self._closure_cache.get(mask)
        if hit is not None:
            return hit
        out = self.full_mask
        for fm in self.facet_masks:
            if mask & fm == mask:
                out &= fm
        self._closure_cache[mask] = out
        return out

    def is_boundary_mask(self, mask: int) -> bool:
        return any(mask & fm == mask for fm in self.facet_masks)

    def faces(self) -> list[Face]:
        """All proper faces, smallest first (ties broken by vertex index list)."""
        sets = set(self.incidence)
        frontier = set(self.incidence)
        while frontier:
            new = set()
            for a in frontier:
                for b in self.incidence:
                    c = a & b
                    if c and c not in sets:
                        new.add(c)
            sets |= new
            frontier = new
        return [self.face(s) for s in sorted(sets, key=lambda s: (len(s), sorted(s)))]

    def face_of(self, x: HPoint) -> Face:
        loc = self.locate(x)
        if not loc.is_boundary:
            raise NotOnBoundary(f"{x!r} is not on the boundary")
        return loc.face

    def face_containing(self, x: HPoint) -> Face:
        """F(x) for any point of the closed domain (the whole domain if interior)."""
        loc = self.locate(x)
        if loc.is_outside:
            raise OutsideDomain(f"{x!r} is outside the domain")
        return loc.face

    def supporting_data(self, x: HPoint) -> tuple[list[tuple], bool]:
        """Facets containing a boundary point, and whether it is a C^1 point."""
        loc = self.locate(x)
        if not loc.is_boundary:
            raise NotOnBoundary(f"{x!r} is not on the boundary")
        fs = [self.facets[j] for j in sorted(loc.zero_facets)]
        return fs, len(fs) == 1

    def contains(self, x: HPoint) -> bool:
        return self.locate(x).is_interior

    def normalized_lift(self, x: HPoint) -> tuple[int, ...]:
        """Primitive integer lift lying in the closed cone."""
        loc = self.locate(x)
        if loc.is_outside:
            raise OutsideDomain(f"{x!r} is outside the domain")
        p = ex.primitive(x.coords)
        return p if loc.sign >= 0 else tuple(-c for c in p)

    def _interior_lift(self, x: HPoint):
        if x.dim != self.ambient or not self.span.contains(x):
            raise NotInterior(f"{x!r} is not in the domain")
        p = ex.primitive(x.coords)
        if self.rank == 1:
            return p, ()
        vals = [ex.dot(f, p) for f in self.facets]
        if all(v > 0 for v in vals):
            return p, vals
        if all(v < 0 for v in vals):
            return tuple(-c for c in p), [-v for v in vals]
        raise NotInterior(f"{x!r} is not an interior point")

    def vertex_barycenter(self, indices: Iterable[int]) -> HPoint:
        """Sum of the chart-normalised lifts of the chosen vertices."""
        acc = [Fraction(0)] * self.ambient
        for i in indices:
            v = self.lifts[i]
            s = ex.dot(self.chart.functional, v)
            for c in range(self.ambient):
                acc[c] += Fraction(v[c], s)
        return HPoint(acc)

    def barycenter(self) -> HPoint:
        return self.vertex_barycenter(range(len(self.vertices)))

    # -- metric --------------------------------------------------------------

    def hilbert_distance(self, x: HPoint, y: HPoint) -> HilbertLength:
        """Exact Hilbert distance between interior points.

        For facet functionals f_i and ratios r_i = f_i(y)/f_i(x) the cross
        ratio of x, y with their chord endpoints is max r / min r.
        """
        _, fx = self._interior_lift(x)
        _, fy = self._interior_lift(y)
        return HilbertLength(q=self._q_from_values(fx, fy))

    @staticmethod
    def _q_from_values(fx, fy) -> Fraction:
        if not fx:
            return Fraction(1)
        imax = imin = 0
        for i in range(1, len(fx)):
            if fy[i] * fx[imax] > fy[imax] * fx[i]:
                imax = i
            if fy[i] * fx[imin] < fy[imin] * fx[i]:
                imin = i
        return Fraction(fy[imax] * fx[imin], fx[imax] * fy[imin])

    def distance_q(self, x: HPoint, y: HPoint) -> Fraction:
        return self.hilbert_distance(x, y).q

    def chord(self, x: HPoint, y: HPoint) -> Chord:
        """Exact boundary points a, b of the line xy, ordered a, x, y, b."""
        lx, fx = self._interior_lift(x)
        ly, fy = self._interior_lift(y)
        if x == y:
            raise DegenerateConfiguration("chord needs two distinct points")
        # scale to a common chart value so that both endpoints are finite
        sx = sum(fx)
        sy = sum(fy)
        lx = tuple(c * sy for c in lx)
        ly = tuple(c * sx for c in ly)
        fx = [v * sy for v in fx]
        fy = [v * sx for v in fy]
        ta = tb = None
        for a, b in zip(fx, fy):
            if a == b:
                continue
            t = Fraction(a, a - b)
            if b > a:
                ta = t if ta is None or t > ta else ta
            else:
                tb = t if tb is None or t < tb else tb
        pa = HPoint([u + ta * (v - u) for u, v in zip(lx, ly)])
        pb = HPoint([u + tb * (v - u) for u, v in zip(lx, ly)])
        return Chord(pa, pb, self.locate(pa).face, self.locate(pb).face, ta, tb, lx, ly)

    def geodesic_point(self, x: HPoint, y: HPoint, s) -> HPoint:
        """The point p of [x, y] with H(x, p) = s.

        An exact length gives an exact point; a float length gives a point
        whose affine parameter is rounded to a rational within 1e-15.
        """
        s = _as_length(s)
        total = self.hilbert_distance(x, y)
        if s.value < 0 or s > total:
            raise OutOfRange("s exceeds the length of the segment")
        if s.is_exact and s.q == 1 or (not s.is_exact and s.value == 0):
            return x
        if s == total:
            return y
        ch = self.chord(x, y)
        ta, tb = ch.ta, ch.tb
        if s.is_exact:
            q = s.q
            t = ta * tb * (1 - q) / (tb - q * ta)
        else:
            e = math.exp(-2.0 * s.value)
            # t solving tb (t - ta) = q (-ta) (tb - t), written with 1/q
            tf = float(ta) * float(tb) * (e - 1.0) / (float(tb) * e - float(ta))
            t = Fraction(tf).limit_denominator(10 ** 15)
        return HPoint([u + t * (v - u) for u, v in zip(ch.x_lift, ch.y_lift)])

    def half_triangle(self, a: HPoint, b: HPoint, c: HPoint) -> bool:
        """Whether [a,b] and [b,c] lie in the boundary while (a,c) meets the domain."""
        la, lb, lc = (self.locate(p) for p in (a, b, c))
        if any(l.is_outside for l in (la, lb, lc)):
            raise OutsideDomain("half_triangle needs points of the closed domain")
        if a == c:
            return False

        def in_boundary(p, q):
            return bool(p.zero_facets & q.zero_facets)

        return in_boundary(la, lb) and in_boundary(lb, lc) and not (la.zero_facets & lc.zero_facets)

    def hausdorff_distance(self, A: Sequence[HPoint], B: Sequence[HPoint],
                           restrict: tuple | None = None) -> HilbertLength:
        """Exact Hausdorff distance between finite interior point sets.

        ``restrict = (x0, r0)`` first intersects both sets with the closed
        ball of radius r0 about x0.
        """
        if restrict is not None:
            x0, r0 = restrict
            r0 = _as_length(r0)
            A = [p for p in A if self.hilbert_distance(x0, p) <= r0]
            B = [p for p in B if self.hilbert_distance(x0, p) <= r0]
        if not A or not B:
            raise EmptyAfterRestriction("a point set is empty")
        fa = [self._interior_lift(p)[1] for p in A]
        fb = [self._interior_lift(p)[1] for p in B]

        def one_side(P, Q):
            worst = Fraction(1)
            for fp in P:
                best = min(self._q_from_values(fp, fq) for fq in Q)
                worst = max(worst, best)
            return worst

        return HilbertLength(q=max(one_side(fa, fb), one_side(fb, fa)))

    # -- float interface -----------------------------------------------------

    @property
    def facet_matrix(self) -> np.ndarray:
        if self._float_cache is None:
            self._float_cache = np.array(self.facets, dtype=float).reshape(len(self.facets), self.ambient)
        return self._float_cache

    @property
    def vertex_values(self) -> np.ndarray:
        """Facet values of the vertex lifts, shape (n_facets, n_vertices)."""
        return np.array([[ex.dot(f, v) for v in self.lifts] for f in self.facets], dtype=float)

    def embed(self, points) -> np.ndarray:
        """Float chart coordinates (normalised facet values) of points or lifts."""
        if isinstance(points, HPoint):
            points = [points]
        if len(points) and isinstance(points[0], HPoint):
            rows = []
            for p in points:
                vals = self.facet_values(p)
                # exact normalisation before converting keeps tiny values accurate
                s = sum(vals)
                rows.append([float(Fraction(v) / s) for v in vals])
            return np.array(rows, dtype=float)
        arr = np.atleast_2d(np.asarray(points, dtype=float))
        vals = arr @ self.facet_matrix.T
        return self.normalize(vals)

    @staticmethod
    def normalize(vals: np.ndarray) -> np.ndarray:
        vals = np.asarray(vals, dtype=float)
        return vals / vals.sum(axis=-1, keepdims=True)

    def combine(self, generator_values: np.ndarray, weights: np.ndarray) -> np.ndarray:
        """Points sum_j w_j g_j for generator facet values g_j (columns)."""
        return self.normalize(np.asarray(weights) @ np.asarray(generator_values).T)

    @staticmethod
    def dist(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
        """Vectorised Hilbert distance between rows of chart coordinates."""
        lr = np.log(Q) - np.log(P)
        return 0.5 * (lr.max(axis=-1) - lr.min(axis=-1))

    @staticmethod
    def chord_params(P: np.ndarray, Q: np.ndarray):
        """Parameters ta < 0 < 1 < tb of the boundary points on P + t (Q - P)."""
        D = Q - P
        with np.errstate(divide="ignore", invalid="ignore"):
            t = -P / D
        ta = np.where(D > 0, t, -np.inf).max(axis=-1)
        tb = np.where(D < 0, t, np.inf).min(axis=-1)
        return ta, tb

    @staticmethod
    def lerp(P: np.ndarray, Q: np.ndarray, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)[..., None]
        return P + t * (Q - P)

    def to_json(self) -> dict:
        return {"dim": self.dim, "mode": "rational",
                "vertices": [[str(Fraction(c)) for c in v] for v in self.lifts]}

    def __repr__(self):
        return f"PolytopeDomain(dim={self.dim}, vertices={len(self.vertices)}, facets={len(self.facets)})"


# ---------------------------------------------------------------------------
# quadrics


class QuadricDomain:
    """Float-mode domain {x : x^T M x < 0} for a form of signature (1, d-1).

    The chart is the one given by a negative eigenvector of M, in which the
    domain is a bounded ellipsoid.
    """

    mode = "float"

    def __init__(self, matrix, tol: float = 1e-9):
        M = np.asarray(matrix, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or not np.allclose(M, M.T):
            raise DegenerateConfiguration("quadric needs a symmetric square matrix")
        w, V = np.linalg.eigh(M)
        scale = max(abs(w).max(), 1.0)
        neg = int((w < -tol * scale).sum())
        pos = int((w > tol * scale).sum())
        if neg != 1 or pos != len(w) - 1:
            raise DegenerateConfiguration("quadric form must have signature (1, d-1)")
        self.matrix = M
        self.tol = tol
        self.ambient = M.shape[0]
        self.dim = self.ambient - 1
        chart = V[:, 0]
        # prefer a chart functional with a positive leading entry
        self.chart_vector = chart if chart[np.argmax(abs(chart))] > 0 else -chart

    @classmethod
    def klein_ball(cls, d: int) -> "QuadricDomain":
        """Unit ball of the chart x_0 = 1 in P(R^d)."""
        if d < 2:
            raise DegenerateConfiguration("klein_ball needs d >= 2")
        M = np.eye(d)
        M[0, 0] = -1.0
        return cls(M)

    def form(self, X: np.ndarray, Y: np.ndarray | None = None) -> np.ndarray:
        Y = X if Y is None else Y
        return np.einsum("...i,ij,...j->...", X, self.matrix, Y)

    def _arr(self, x) -> np.ndarray:
        if isinstance(x, HPoint):
            return np.array(x.to_float())
        return np.asarray(x, dtype=float)

    def embed(self, points) -> np.ndarray:
        """Chart-normalised lifts (chart functional equal to one)."""
        if isinstance(points, HPoint):
            points = [points]
        if len(points) and isinstance(points[0], HPoint):
            arr = np.array([p.to_float() for p in points])
        else:
            arr = np.atleast_2d(np.asarray(points, dtype=float))
        c = arr @ self.chart_vector
        return arr / c[..., None]

    def locate(self, x) -> Location:
        v = self._arr(x)
        val = float(self.form(v))
        scale = float(v @ v)
        if abs(val) <= self.tol * scale:
            return Location(Where.BOUNDARY)
        return Location(Where.INTERIOR if val < 0 else Where.OUTSIDE)

    def contains(self, x) -> bool:
        return self.locate(x).is_interior

    def _check_interior(self, x):
        if not self.locate(x).is_interior:
            raise NotInterior(f"{x!r} is not an interior point")

    def dist(self, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
        """Vectorised distance via the hyperboloid: 2 asinh(|p - q| / 2)."""
        P = np.asarray(P, dtype=float)
        Q = np.asarray(Q, dtype=float)
        ph = P / np.sqrt(-self.form(P))[..., None]
        qh = Q / np.sqrt(-self.form(Q))[..., None]
        gap = self.form(ph - qh)
        return 2.0 * np.arcsinh(0.5 * np.sqrt(np.maximum(gap, 0.0)))

    def chord_params(self, P: np.ndarray, Q: np.ndarray):
        D = Q - P
        A = self.form(D)
        B = self.form(P, D)
        C = self.form(P)
        disc = np.sqrt(np.maximum(B * B - A * C, 0.0))
        with np.errstate(divide="ignore", invalid="ignore"):
            big = np.where(B >= 0, -B - disc, -B + disc) / A
            small = C / (A * big)
        ta = np.minimum(big, small)
        tb = np.maximum(big, small)
        return ta, tb

    @staticmethod
    def lerp(P, Q, t):
        t = np.asarray(t, dtype=float)[..., None]
        return P + t * (Q - P)

    def hilbert_distance(self, x, y) -> HilbertLength:
        self._check_interior(x)
        self._check_interior(y)
        P = self.embed([self._arr(x)])
        Q = self.embed([self._arr(y)])
        return HilbertLength(h=float(self.dist(P, Q)[0]))

    def chord(self, x, y) -> tuple[np.ndarray, np.ndarray]:
        """Float boundary points (a, b) ordered a, x, y, b."""
        self._check_interior(x)
        self._check_interior(y)
        P = self.embed([self._arr(x)])
        Q = self.embed([self._arr(y)])
        ta, tb = self.chord_params(P, Q)
        return self.lerp(P, Q, ta)[0], self.lerp(P, Q, tb)[0]

    def geodesic_point(self, x, y, s) -> np.ndarray:
        s = _as_length(s).value
        total = self.hilbert_distance(x, y).value
        if s < 0 or s > total + self.tol:
            raise OutOfRange("s exceeds the length of the segment")
        P = self.embed([self._arr(x)])
        Q = self.embed([self._arr(y)])
        if total == 0:
            return P[0]
        ta, tb = self.chord_params(P, Q)
        ta, tb = float(ta[0]), float(tb[0])
        e = math.exp(-2.0 * s)
        t = ta * tb * (e - 1.0) / (tb * e - ta)
        return self.lerp(P, Q, t)[0]

    def hausdorff_distance(self, A, B, restrict=None) -> HilbertLength:
        PA = self.embed([self._arr(a) for a in A]) if len(A) else np.empty((0, self.ambient))
        PB = self.embed([self._arr(b) for b in B]) if len(B) else np.empty((0, self.ambient))
        if restrict is not None:
            x0, r0 = restrict
            X0 = self.embed([self._arr(x0)])
            r = _as_length(r0).value
            PA = PA[self.dist(PA, X0) <= r]
            PB = PB[self.dist(PB, X0) <= r]
        if len(PA) == 0 or len(PB) == 0:
            raise EmptyAfterRestriction("a point set is empty")
        D = self.dist(PA[:, None, :], PB[None, :, :])
        return HilbertLength(h=float(max(D.min(axis=1).max(), D.min(axis=0).max())))

    def to_json(self) -> dict:
        return {"dim": self.dim, "mode": "float", "kind": "quadric",
                "matrix": self.matrix.tolist()}

    def __repr__(self):
        return f"QuadricDomain(dim={self.dim})"


Domain = PolytopeDomain | QuadricDomain


def locate(domain, x):
    return domain.locate(x)


def chord(domain, x, y):
    return domain.chord(x, y)


def hilbert_distance(domain, x, y) -> HilbertLength:
    return domain.hilbert_distance(x, y)


def geodesic_point(domain, x, y, s):
    return domain.geodesic_point(x, y, s)


def face_of(domain: PolytopeDomain, x: HPoint) -> Face:
    return domain.face_of(x)


def supporting_data(domain: PolytopeDomain, x: HPoint):
    return domain.supporting_data(x)


def half_triangle(domain: PolytopeDomain, a, b, c) -> bool:
    return domain.half_triangle(a, b, c)


def hausdorff_distance(domain, A, B, restrict=None) -> HilbertLength:
    return domain.hausdorff_distance(A, B, restrict)
