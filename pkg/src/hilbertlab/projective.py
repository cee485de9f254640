"""Exact homogeneous-coordinate primitives.

Points of P(R^d) are :class:`HPoint` values holding a nonzero rational vector;
two points are equal when their vectors are proportional.  Nothing in this
module touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import _exact as ex
from .errors import DegenerateConfiguration, NoCommonChart, NonCollinear


def _coerce(coords) -> tuple:
    out = []
    for c in coords:
        f = ex.as_fraction(c)
        out.append(f.numerator if f.denominator == 1 else f)
    return tuple(out)


@dataclass(frozen=True, eq=False)
class HPoint:
    """A point [v] of real projective space with exact rational coordinates."""

    coords: tuple

    def __init__(self, coords):
        coords = _coerce(coords)
        if not coords or all(c == 0 for c in coords):
            raise DegenerateConfiguration("homogeneous coordinates must be nonzero")
        object.__setattr__(self, "coords", coords)

    @property
    def dim(self) -> int:
        """Ambient vector-space dimension d (the point lives in P(R^d))."""
        return len(self.coords)

    def __eq__(self, other):
        if not isinstance(other, HPoint):
            return NotImplemented
        return ex.proportional(self.coords, other.coords)

    def __hash__(self):
        return hash(self.key())

    def key(self) -> tuple[int, ...]:
        """Canonical primitive integer representative, first nonzero entry positive."""
        p = ex.primitive(self.coords)
        first = next(x for x in p if x != 0)
        return p if first > 0 else tuple(-x for x in p)

    def scaled(self, factor) -> tuple:
        return tuple(c * factor for c in self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def to_float(self):
        return [float(c) for c in self.coords]

    def to_json(self) -> list[str]:
        first = next(c for c in self.coords if c != 0)
        sign = 1 if first > 0 else -1
        return [str(Fraction(c) * sign) for c in self.coords]

    @classmethod
    def from_json(cls, data: Sequence[str]) -> "HPoint":
        return cls([Fraction(str(x)) for x in data])

    def __repr__(self):
        return "[" + ":".join(str(c) for c in self.coords) + "]"


@dataclass(frozen=True, eq=False)
class ProjMap:
    """An element of PGL_d(R) given by an invertible rational matrix."""

    matrix: tuple
    _inverse: tuple | None = field(default=None, repr=False, compare=False)

    def __init__(self, matrix, inverse=None):
        m = tuple(_coerce(row) for row in matrix)
        n = len(m)
        if any(len(r) != n for r in m):
            raise DegenerateConfiguration("projective map needs a square matrix")
        if ex.det(m) == 0:
            raise DegenerateConfiguration("projective map needs a nonzero determinant")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "_inverse", inverse)

    @classmethod
    def identity(cls, d: int) -> "ProjMap":
        return cls(ex.identity(d))

    @classmethod
    def diagonal(cls, entries) -> "ProjMap":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def permutation(cls, perm: Sequence[int]) -> "ProjMap":
        """Map sending basis vector e_i to e_{perm[i]}."""
        n = len(perm)
        m = [[0] * n for _ in range(n)]
        for i, j in enumerate(perm):
            m[j][i] = 1
        return cls(m)

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def inverse(self) -> "ProjMap":
        inv = self._inverse
        if inv is None:
            inv = ex.inverse(self.matrix)
            object.__setattr__(self, "_inverse", inv)
        return ProjMap(inv, inverse=self.matrix)

    def __matmul__(self, other: "ProjMap") -> "ProjMap":
        return ProjMap(ex.matmul(self.matrix, other.matrix))

    def __call__(self, x: HPoint) -> HPoint:
        return apply(self, x)

    def __eq__(self, other):
        if not isinstance(other, ProjMap):
            return NotImplemented
        a = [x for row in self.matrix for x in row]
        b = [x for row in other.matrix for x in row]
        return ex.proportional(a, b)

    def __hash__(self):
        return hash(ex.primitive([x for row in self.matrix for x in row]))

    def is_scalar(self) -> bool:
        return self == ProjMap.identity(self.dim)

    def to_json(self) -> list[list[str]]:
        return [[str(Fraction(x)) for x in row] for row in self.matrix]

    @classmethod
    def from_json(cls, data) -> "ProjMap":
        return cls([[Fraction(str(x)) for x in row] for row in data])


@dataclass(frozen=True)
class LinSubspace:
    """A linear subspace of R^d stored by its reduced row echelon basis."""

    basis: tuple
    pivots: tuple
    ambient: int

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, x) -> bool:
        v = x.coords if isinstance(x, HPoint) else tuple(x)
        if self.dim == self.ambient:
            return True
        # an RREF basis reconstructs any member from its pivot entries
        rec = [sum(v[p] * row[c] for p, row in zip(self.pivots, self.basis))
               for c in range(self.ambient)]
        return all(a == b for a, b in zip(rec, v))

    def coordinates(self, x) -> tuple:
        """Coordinates of a member with respect to ``basis`` (pivot entries)."""
        v = x.coords if isinstance(x, HPoint) else tuple(x)
        return tuple(v[p] for p in self.pivots)

    def __le__(self, other: "LinSubspace") -> bool:
        return all(other.contains(b) for b in self.basis)

    def __eq__(self, other):
        if not isinstance(other, LinSubspace):
            return NotImplemented
        return self.ambient == other.ambient and self.basis == other.basis

    def __hash__(self):
        return hash((self.ambient, self.basis))

    def __add__(self, other: "LinSubspace") -> "LinSubspace":
        return span_vectors(list(self.basis) + list(other.basis), self.ambient)

    def intersect(self, other: "LinSubspace") -> "LinSubspace":
        # x = sum a_i b_i = sum c_j c'_j  <=>  (a, -c) in a nullspace
        cols = list(self.basis) + [tuple(-x for x in b) for b in other.basis]
        rows = [tuple(col[i] for col in cols) for i in range(self.ambient)]
        null = ex.nullspace(rows, len(cols))
        vecs = []
        for n in null:
            vec = [sum(n[i] * self.basis[i][c] for i in range(self.dim))
                   for c in range(self.ambient)]
            vecs.append(vec)
        return span_vectors(vecs, self.ambient)

    def annihilator(self) -> list[tuple]:
        """Basis of linear functionals vanishing on the subspace."""
        return ex.nullspace(self.basis, self.ambient) if self.basis else \
            [tuple(int(i == j) for j in range(self.ambient)) for i in range(self.ambient)]


def span_vectors(vectors, ambient: int) -> LinSubspace:
    vecs = [tuple(v) for v in vectors if any(x != 0 for x in v)]
    red, piv = ex.rref(vecs, ambient) if vecs else ([], [])
    return LinSubspace(tuple(red), tuple(piv), ambient)


def span(points: Sequence[HPoint]) -> LinSubspace:
    """Exact linear span of a nonempty list of points."""
    if not points:
        raise DegenerateConfiguration("span of an empty point list")
    return span_vectors([p.coords for p in points], points[0].dim)


@dataclass(frozen=True)
class Chart:
    """Affine chart {x : functional(x) != 0}, dehomogenised at functional = 1."""

    functional: tuple

    def __init__(self, functional):
        object.__setattr__(self, "functional", _coerce(functional))

    @classmethod
    def standard(cls, d: int, index: int = 0) -> "Chart":
        return cls([int(i == index) for i in range(d)])

    def value(self, x) -> Fraction:
        v = x.coords if isinstance(x, HPoint) else x
        return ex.dot(self.functional, v)

    def dehomogenize(self, x) -> tuple:
        val = self.value(x)
        if val == 0:
            raise NoCommonChart(f"chart functional vanishes on {x!r}")
        v = x.coords if isinstance(x, HPoint) else x
        return tuple(Fraction(c) / val for c in v)


def apply(g: ProjMap, x: HPoint) -> HPoint:
    return HPoint(ex.matvec(g.matrix, x.coords))


def collinear(points: Sequence[HPoint]) -> bool:
    return ex.rank([p.coords for p in points]) <= 2


def line_param(x: HPoint, y: HPoint, t, chart: Chart | None = None) -> HPoint:
    """Point with affine parameter t on the chart segment from x (t=0) to y (t=1)."""
    if x == y:
        raise DegenerateConfiguration("line_param needs distinct points")
    chart = chart or Chart.standard(x.dim)
    ax = chart.dehomogenize(x)
    ay = chart.dehomogenize(y)
    t = ex.as_fraction(t)
    return HPoint([(1 - t) * a + t * b for a, b in zip(ax, ay)])


def _pencil_parameter(a: HPoint, b: HPoint, x: HPoint):
    """Write x = alpha*a + beta*b; return (alpha, beta)."""
    sol = ex.solve([a.coords, b.coords], x.coords)
    if sol is None:
        raise NonCollinear("point is not on the line through a and b")
    return sol


def cross_ratio(a: HPoint, x: HPoint, y: HPoint, b: HPoint) -> Fraction:
    """Exact cross ratio [a, x, y, b] = |x-b||y-a| / (|x-a||y-b|).

    In the pencil basis (a, b) a point alpha*a + beta*b has affine parameter
    beta/alpha with a at 0 and b at infinity; the cross ratio is then the
    ratio of the parameters of y and x.
    """
    if a == b:
        raise DegenerateConfiguration("a and b coincide")
    if not collinear([a, x, y, b]):
        raise NonCollinear("cross ratio needs four collinear points")
    ax, bx = _pencil_parameter(a, b, x)
    ay, by = _pencil_parameter(a, b, y)
    if bx == 0 or ay == 0 or ax == 0 or by == 0:
        raise DegenerateConfiguration("x or y coincides with an endpoint")
    tx = Fraction(bx) / ax
    ty = Fraction(by) / ay
    if (tx > 0) != (ty > 0):
        raise DegenerateConfiguration("x and y are separated by the endpoints a, b")
    return abs(ty / tx)


def points_to_json(points: Iterable[HPoint]) -> list[list[str]]:
    return [p.to_json() for p in points]


def points_from_json(data) -> list[HPoint]:
    return [HPoint.from_json(p) for p in data]
