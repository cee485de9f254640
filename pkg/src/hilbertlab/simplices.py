"""Properly embedded simplices in polytope domains.

A simplex is stored by its ordered vertex lifts, all in the closed cone of
the ambient domain.  Points of the simplex are handled through their
barycentric weights with respect to those lifts.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _exact as ex
from .com import center_of_mass
from .domain import Face, HilbertLength, PolytopeDomain
from .errors import (
    BudgetExceeded,
    CrossSegmentInBoundary,
    DependentVertices,
    EmptyInterior,
    FaceIntersectionUnbounded,
    InteriorLeak,
    NotInFace,
    NotInSimplex,
    OutsideDomain,
)
from .floatgeom import hull_distances, point_line_distance, simplex_points
from .projective import HPoint, span_vectors


class EmbeddedSimplex:
    """A properly embedded simplex S = domain ∩ [Span of vertices].

    Use :func:`recognize` to build one; it validates every invariant.
    """

    def __init__(self, domain: PolytopeDomain, vertices: Sequence[HPoint], lifts, faces):
        self.domain = domain
        self.vertices = tuple(vertices)
        self.lifts = tuple(lifts)
        self.faces: tuple[Face, ...] = tuple(faces)
        self.dim = len(self.vertices) - 1
        self.span = span_vectors(self.lifts, domain.ambient)
        self._values = None

    def key(self) -> tuple:
        """Order-independent identity of the simplex."""
        return tuple(sorted(v.key() for v in self.vertices))

    def __eq__(self, other):
        if not isinstance(other, EmbeddedSimplex):
            return NotImplemented
        return self.domain is other.domain and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"EmbeddedSimplex(dim={self.dim}, vertices={list(self.vertices)})"

    def barycentric(self, x: HPoint) -> tuple[Fraction, ...]:
        """Positive weights w with x = sum w_j v_j, or NotInSimplex."""
        sol = ex.solve(self.lifts, x.coords)
        if sol is None:
            raise NotInSimplex(f"{x!r} is not in the span of the simplex")
        if all(c > 0 for c in sol):
            return sol
        if all(c < 0 for c in sol):
            return tuple(-c for c in sol)
        raise NotInSimplex(f"{x!r} is not in the open simplex")

    def point(self, weights: Sequence) -> HPoint:
        w = [ex.as_fraction(c) for c in weights]
        return HPoint([sum(wj * v[c] for wj, v in zip(w, self.lifts))
                       for c in range(self.domain.ambient)])

    def barycenter(self) -> HPoint:
        return self.point([1] * len(self.lifts))

    def contains(self, x: HPoint) -> bool:
        try:
            self.barycentric(x)
            return True
        except NotInSimplex:
            return False

    @property
    def vertex_values(self) -> np.ndarray:
        """Facet values of the vertex lifts, shape (n_facets, dim + 1)."""
        if self._values is None:
            self._values = np.array(
                [[ex.dot(f, v) for v in self.lifts] for f in self.domain.facets], dtype=float)
        return self._values

    def sample(self, U: np.ndarray) -> np.ndarray:
        """Chart coordinates of the points with log-weights U (rows)."""
        return simplex_points(self.domain, self.vertex_values, U)

    def face_simplex(self, indices: Iterable[int]) -> list[HPoint]:
        return [self.vertices[i] for i in sorted(indices)]

    def to_json(self) -> dict:
        return {"dim": self.dim, "vertices": [[str(Fraction(c)) for c in v] for v in self.lifts]}


def recognize(domain: PolytopeDomain, vertices: Sequence) -> EmbeddedSimplex:
    """Validate and build a properly embedded simplex.

    Raises
    ------
    OutsideDomain
        A vertex is not in the closed domain.
    DependentVertices
        The vertex lifts are linearly dependent.
    EmptyInterior
        The open simplex misses the domain.
    InteriorLeak
        A proper face of the simplex meets the interior of the domain.
    """
    pts = [v if isinstance(v, HPoint) else HPoint(v) for v in vertices]
    locs = [domain.locate(p) for p in pts]
    if any(l.is_outside for l in locs):
        raise OutsideDomain("a vertex lies outside the closed domain")
    lifts = [domain.normalized_lift(p) for p in pts]
    if ex.rank(lifts) < len(lifts):
        raise DependentVertices("vertex lifts are linearly dependent")
    faces = [l.face for l in locs]
    k = len(pts) - 1
    bary = [sum(Fraction(v[c], ex.dot(domain.chart.functional, v)) for v in lifts)
            for c in range(domain.ambient)]
    if not domain.locate(HPoint(bary)).is_interior:
        raise EmptyInterior("the open simplex does not meet the domain")
    if k >= 1:
        for j in range(len(pts)):
            common = None
            for i, l in enumerate(locs):
                if i == j:
                    continue
                common = l.zero_facets if common is None else common & l.zero_facets
            if not common:
                raise InteriorLeak(f"the face opposite vertex {j} meets the interior")
    return EmbeddedSimplex(domain, [HPoint(v) for v in lifts], lifts, faces)


def simplex_distance(S: EmbeddedSimplex, x: HPoint, y: HPoint) -> HilbertLength:
    """Closed form: q = max_{i,j} x_i y_j / (y_i x_j) in barycentric weights."""
    bx = S.barycentric(x)
    by = S.barycentric(y)
    return HilbertLength(q=PolytopeDomain._q_from_values(bx, by))


@dataclass(frozen=True)
class FlatCoords:
    """Flat coordinates of a simplex point.

    ``ratios[i] = x_{i+1} / x_0``; the log of these is the usual vector in
    R^k.  Exact mode keeps the rationals, so distances compare exactly.
    """

    ratios: tuple

    @property
    def logs(self) -> np.ndarray:
        return np.array([math.log(r.numerator) - math.log(r.denominator) for r in self.ratios])


def flat_coords(S: EmbeddedSimplex, x: HPoint) -> FlatCoords:
    b = S.barycentric(x)
    return FlatCoords(tuple(Fraction(c) / b[0] for c in b[1:]))


def flat_distance(u, v) -> HilbertLength:
    """d(u, v) = max{ max|u_i - v_i|, max|(u_i - u_j) - (v_i - v_j)| } / 2.

    With exact ratio tuples the value is returned as an exact length.
    """
    if isinstance(u, FlatCoords) and isinstance(v, FlatCoords):
        best = Fraction(1)
        n = len(u.ratios)
        for i in range(n):
            r = u.ratios[i] / v.ratios[i]
            best = max(best, r, 1 / r)
            for j in range(i + 1, n):
                r2 = (u.ratios[i] * v.ratios[j]) / (u.ratios[j] * v.ratios[i])
                best = max(best, r2, 1 / r2)
        return HilbertLength(q=best)
    a = u.logs if isinstance(u, FlatCoords) else np.asarray(u, dtype=float)
    b = v.logs if isinstance(v, FlatCoords) else np.asarray(v, dtype=float)
    diff = np.concatenate([[0.0], a - b])
    return HilbertLength(h=0.5 * float(diff.max() - diff.min()))


# ---------------------------------------------------------------------------
# families


@dataclass
class SimplexFamily:
    """A list of distinct simplices with tri-state status flags."""

    members: list
    flags: dict = field(default_factory=lambda: {
        "isolated": "unknown", "coarsely_complete": "unknown", "invariant": "unknown"})
    coverage: str = "unknown"

    def __post_init__(self):
        keys = [s.key() for s in self.members]
        if len(set(keys)) != len(keys):
            raise ValueError("family members must be pairwise distinct")

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i):
        return self.members[i]

    def parallel_classes(self) -> list[list[int]]:
        classes: list[list[int]] = []
        for i, s in enumerate(self.members):
            for cl in classes:
                if are_parallel(self.members[cl[0]], s)[0]:
                    cl.append(i)
                    break
            else:
                classes.append([i])
        return classes

    def to_json(self) -> dict:
        return {"members": [s.to_json() for s in self.members],
                "flags": dict(self.flags), "coverage": self.coverage,
                "parallel_classes": self.parallel_classes()}


class _Echelon:
    """Incremental exact independence test (fraction-free, integer rows)."""

    def __init__(self, rows=()):
        self.rows = list(rows)

    def reduce(self, v):
        w = list(ex.primitive(v))
        for p, r in self.rows:
            if w[p] != 0:
                a, b = r[p], w[p]
                w = [a * x - b * y for x, y in zip(w, r)]
                g = 0
                for x in w:
                    g = math.gcd(g, x)
                if g > 1:
                    w = [x // g for x in w]
        for p, c in enumerate(w):
            if c != 0:
                return p, w
        return None

    def extended(self, item):
        return _Echelon(self.rows + [item])


def _candidates(domain: PolytopeDomain):
    cands = [(domain.vertices[i], 1 << i) for i in range(len(domain.vertices))]
    for f in domain.faces():
        if len(f.vertex_set) >= 2:
            cands.append((f.barycenter(), sum(1 << i for i in f.vertex_set)))
    return cands


def _vertex_set(mask: int) -> frozenset:
    return frozenset(i for i in range(mask.bit_length()) if mask >> i & 1)


def _union_without(members, masks, t):
    out = 0
    for s in members:
        if s != t:
            out |= masks[s]
    return out


def _contained_masks(domain: PolytopeDomain, faces1, faces2) -> bool:
    for F in faces1:
        union = 0
        for G in faces2:
            if G & F == G:
                union |= G
        if union == 0 or domain.closure_mask(union) != F:
            return False
    return True


def _mask(F: Face) -> int:
    return sum(1 << i for i in F.vertex_set)


def contained_after_sliding(S1: EmbeddedSimplex, S2: EmbeddedSimplex) -> bool:
    """Whether every vertex face of S1 meets the closure of S2."""
    return _contained_masks(S1.domain, [_mask(F) for F in S1.faces], [_mask(F) for F in S2.faces])


def enumerate_max_simplices(domain: PolytopeDomain, candidate_budget: int = 200000,
                            max_dim: int | None = None,
                            max_candidates: int | None = None) -> SimplexFamily:
    """Maximal properly embedded simplices with vertices among face representatives.

    The candidates are the polytope vertices plus the vertex barycenter of
    every proper face of dimension at least one.  A candidate set spans a
    properly embedded simplex exactly when it is independent, the union of
    its faces lies in no facet, and the same union without any one member
    does lie in a facet.  The search walks independent sets whose face union
    lies in a facet.

    Raises
    ------
    BudgetExceeded
        If more than ``candidate_budget`` subsets are examined or there are
        more than ``max_candidates`` candidates.
    """
    cands = _candidates(domain)
    if max_candidates is not None and len(cands) > max_candidates:
        raise BudgetExceeded(f"{len(cands)} candidates exceed the limit {max_candidates}")
    lifts = [domain.normalized_lift(p) for p, _ in cands]
    masks = [m for _, m in cands]
    n = len(cands)
    found: list[tuple[int, ...]] = []
    counter = [0]
    top = domain.dim if max_dim is None else min(max_dim, domain.dim)

    def walk(members, union, ech):
        start = members[-1] + 1 if members else 0
        for c in range(start, n):
            counter[0] += 1
            if counter[0] > candidate_budget:
                raise BudgetExceeded(f"examined more than {candidate_budget} candidate subsets")
            red = ech.reduce(lifts[c])
            if red is None:
                continue
            new_union = union | masks[c]
            # each vertex face must escape the closed face spanned by the others
            if masks[c] & ~domain.closure_mask(union) == 0:
                continue
            if any(masks[t] & ~domain.closure_mask(_union_without(members, masks, t) | masks[c]) == 0
                   for t in members):
                continue
            if domain.is_boundary_mask(new_union):
                if len(members) + 1 <= top:
                    walk(members + [c], new_union, ech.extended(red))
            elif members:
                ok = True
                for t in members:
                    rest = 0
                    for s in members:
                        if s != t:
                            rest |= masks[s]
                    if not domain.is_boundary_mask(rest | masks[c]):
                        ok = False
                        break
                if ok:
                    found.append(tuple(members + [c]))

    walk([], 0, _Echelon())
    keys = {combo: tuple(sorted(cands[i][0].key() for i in combo)) for combo in found}
    found.sort(key=lambda combo: (-len(combo), keys[combo]))
    kept: list[tuple[int, ...]] = []
    for combo in found:
        fm = [masks[i] for i in combo]
        if any(_contained_masks(domain, fm, [masks[i] for i in t]) for t in kept):
            continue
        kept.append(combo)
    fam = SimplexFamily([recognize(domain, [cands[i][0] for i in combo]) for combo in kept])
    fam.coverage = "maximal among face-representative candidates"
    return fam


# ---------------------------------------------------------------------------
# parallelism, sliding, joins


def are_parallel(S1: EmbeddedSimplex, S2: EmbeddedSimplex):
    """(True, permutation) if vertex faces match pairwise, else (False, None).

    The permutation maps vertex i of S1 to vertex perm[i] of S2 and is the
    lexicographically first witness.
    """
    if S1.dim != S2.dim or S1.domain is not S2.domain:
        return False, None
    f1 = [f.vertex_set for f in S1.faces]
    f2 = [f.vertex_set for f in S2.faces]
    if sorted(map(sorted, f1)) != sorted(map(sorted, f2)):
        return False, None
    for perm in itertools.permutations(range(len(f2))):
        if all(f1[i] == f2[perm[i]] for i in range(len(f1))):
            return True, perm
    return False, None


@dataclass
class SlideResult:
    simplex: EmbeddedSimplex
    bound: HilbertLength
    hausdorff_estimate: float | None = None


def sample_log_weights(k: int, n: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    """Random log-weight rows for a k-simplex, flat radius at most ``radius``."""
    U = rng.uniform(-radius, radius, size=(n, k + 1))
    U[:, 0] = 0.0
    return U


def distance_to_simplex(S: EmbeddedSimplex, P: np.ndarray, centers=None,
                        width: float = 40.0) -> np.ndarray:
    """Float distances from chart-coordinate rows P to the simplex S."""
    V = S.vertex_values
    if S.dim == 0:
        Q = S.domain.normalize(V[:, 0])[None, :]
        return S.domain.dist(P, Q)
    if S.dim == 1:
        d, _ = point_line_distance(S.domain, P, V[:, 0], V[:, 1], center=centers, width=width)
        return d
    d, _ = hull_distances(P, V)
    return d


def sampled_hausdorff(S1: EmbeddedSimplex, S2: EmbeddedSimplex, n: int = 200,
                      radius: float = 3.0, seed: int = 0) -> float:
    """Sampled two-sided Hausdorff distance between simplices (a lower estimate)."""
    rng = np.random.default_rng(seed)
    best = 0.0
    for A, B in ((S1, S2), (S2, S1)):
        U = sample_log_weights(A.dim, n, radius, rng)
        P = A.sample(U)
        centers = 0.5 * (U[:, 1] - U[:, 0]) if B.dim == 1 else None
        best = max(best, float(distance_to_simplex(B, P, centers).max()))
    return best


def slide(S: EmbeddedSimplex, replacements: Mapping[int, HPoint],
          hausdorff_samples: int = 0, radius: float = 3.0, seed: int = 0) -> SlideResult:
    """Move vertices within their open faces.

    Returns the new simplex, the bound sum_j H_{F(v_j)}(v_j, w_j) and, when
    ``hausdorff_samples`` is positive, a sampled Hausdorff distance.

    Raises
    ------
    NotInFace
        If a replacement does not lie in the open face of its vertex.
    """
    dom = S.domain
    new = list(S.vertices)
    bound = HilbertLength.zero()
    for j, w in sorted(replacements.items()):
        F = S.faces[j]
        loc = dom.locate(w)
        if loc.face is None or loc.face.vertex_set != F.vertex_set:
            raise NotInFace(f"replacement for vertex {j} is not in its face")
        new[j] = w
        if w != S.vertices[j]:
            bound = bound + F.domain.hilbert_distance(S.vertices[j], w)
    S2 = recognize(dom, new)
    est = None
    if hausdorff_samples:
        est = sampled_hausdorff(S, S2, hausdorff_samples, radius, seed)
    return SlideResult(S2, bound, est)


def opposite(S: EmbeddedSimplex, F1: Iterable[int], F2: Iterable[int]) -> bool:
    """Whether two faces of S (vertex index sets) are opposite."""
    a, b = frozenset(F1), frozenset(F2)
    allv = frozenset(range(len(S.vertices)))
    if not a or not b or not a < allv or not b < allv:
        return False
    return not (a & b) and (a | b) == allv


def join_opposite(domain: PolytopeDomain, S1: EmbeddedSimplex, S2: EmbeddedSimplex) -> EmbeddedSimplex:
    """Join simplices lying in two opposite open faces of the domain.

    Raises
    ------
    CrossSegmentInBoundary
        If the closures of the two faces meet, or segments between them lie
        in the boundary.
    """
    F1 = domain.face_containing(HPoint(S1.barycenter().coords))
    F2 = domain.face_containing(HPoint(S2.barycenter().coords))
    if F1.vertex_set & F2.vertex_set:
        raise CrossSegmentInBoundary("the closures of the two faces meet")
    if not domain.closure_face(F1.vertex_set | F2.vertex_set).is_whole:
        raise CrossSegmentInBoundary("segments between the faces lie in the boundary")
    return recognize(domain, list(S1.vertices) + list(S2.vertices))


# ---------------------------------------------------------------------------
# canonicalisation


def canonical_vertices(domain: PolytopeDomain, S: EmbeddedSimplex,
                       core_points: Iterable[HPoint]) -> dict[int, HPoint]:
    """w_j = center of mass of the core sample inside the open face F(v_j).

    Raises
    ------
    FaceIntersectionUnbounded
        If the sample meets the relative boundary of a face, or misses it.
    """
    pts = list(core_points)
    locs = [domain.locate(p) for p in pts]
    out = {}
    for j, F in enumerate(S.faces):
        if len(F.vertex_set) == 1:
            out[j] = S.vertices[j]
            continue
        inside = []
        for p, l in zip(pts, locs):
            if l.face is None:
                continue
            vs = l.face.vertex_set
            if vs == F.vertex_set:
                inside.append(p)
            elif vs < F.vertex_set:
                raise FaceIntersectionUnbounded(
                    f"core sample reaches the relative boundary of the face of vertex {j}")
        if not inside:
            raise FaceIntersectionUnbounded(f"core sample misses the face of vertex {j}")
        out[j] = center_of_mass(F.domain, inside)
    return out


def canonicalize_report(domain: PolytopeDomain, S: EmbeddedSimplex,
                        core_points: Iterable[HPoint]) -> SlideResult:
    return slide(S, canonical_vertices(domain, S, core_points))


def canonicalize(domain: PolytopeDomain, S: EmbeddedSimplex,
                 core_points: Iterable[HPoint]) -> EmbeddedSimplex:
    """The canonical simplex parallel to S determined by the core sample."""
    return canonicalize_report(domain, S, core_points).simplex
