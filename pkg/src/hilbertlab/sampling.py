"""Seeded exact random points for tests, estimators and the CLI."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _exact as ex
from .domain import Face, PolytopeDomain
from .projective import HPoint

_SCALE = 1 << 20


def _weight(u: float) -> Fraction:
    w = Fraction(max(1, round(math.exp(u) * _SCALE)), _SCALE)
    return w


def combination(lifts: Sequence[Sequence[int]], weights: Sequence[Fraction],
                chart: Sequence[int] | None = None) -> HPoint:
    """Exact point sum_j w_j v_j, each lift first scaled to chart value one."""
    d = len(lifts[0])
    acc = [Fraction(0)] * d
    for w, v in zip(weights, lifts):
        s = ex.dot(chart, v) if chart is not None else 1
        for c in range(d):
            acc[c] += w * Fraction(v[c], s)
    return HPoint(acc)


def random_points_in_cone(lifts, rng: np.random.Generator, n: int, radius: float = 2.0,
                          chart=None) -> list[HPoint]:
    """Points with log-uniform positive weights on the given generator lifts."""
    U = rng.uniform(-radius, radius, size=(n, len(lifts)))
    return [combination(lifts, [_weight(u) for u in row], chart) for row in U]


def random_interior(domain: PolytopeDomain, rng: np.random.Generator, n: int,
                    radius: float = 2.0) -> list[HPoint]:
    """Exact interior points: positive combinations of all vertices."""
    return random_points_in_cone(domain.lifts, rng, n, radius, domain.chart.functional)


def random_in_face(face: Face, rng: np.random.Generator, n: int,
                   radius: float = 2.0) -> list[HPoint]:
    """Exact points of an open face (its vertices with positive weights)."""
    dom = face.parent
    lifts = [dom.lifts[i] for i in face.vertex_indices]
    return random_points_in_cone(lifts, rng, n, radius, dom.chart.functional)


def random_rational(rng: np.random.Generator, lo: float, hi: float, den: int = 1000) -> Fraction:
    return Fraction(int(rng.integers(round(lo * den), round(hi * den) + 1)), den)


def random_in_simplex(S, rng: np.random.Generator, n: int, radius: float = 2.0) -> list[HPoint]:
    """Exact points of an open embedded simplex S."""
    return random_points_in_cone(S.lifts, rng, n, radius, S.domain.chart.functional)
