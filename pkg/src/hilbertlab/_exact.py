"""Exact linear algebra over the rationals.

Vectors and matrices are tuples (of tuples) of ``int`` or ``Fraction``.
Everything here is small and dense; the matrices we meet have at most a few
dozen rows.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Vec = tuple
Mat = tuple


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        return Fraction(value)
    return Fraction(value)


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def primitive(vec: Sequence) -> tuple[int, ...]:
    """Scale a rational vector to a primitive integer vector (same direction)."""
    fr = [as_fraction(x) for x in vec]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(x // g for x in ints)


def rref(rows: Sequence[Sequence], ncols: int | None = None):
    """Reduced row echelon form.  Returns (nonzero rows, pivot columns)."""
    m = [[as_fraction(x) for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0]) if ncols is None else ncols
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(m)):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        pv = m[r][c]
        if pv != 1:
            m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return [tuple(row) for row in m[:r]], pivots


def rank(rows: Sequence[Sequence]) -> int:
    """Exact rank via fraction-free elimination on integer-scaled rows."""
    m = [list(primitive(r)) for r in rows if any(x != 0 for x in r)]
    if not m:
        return 0
    ncols = len(m[0])
    rk = 0
    for c in range(ncols):
        piv = None
        for i in range(rk, len(m)):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[rk], m[piv] = m[piv], m[rk]
        p = m[rk][c]
        for i in range(rk + 1, len(m)):
            if m[i][c] != 0:
                f = m[i][c]
                m[i] = [p * a - f * b for a, b in zip(m[i], m[rk])]
        rk += 1
        if rk == len(m):
            break
    return rk


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[tuple[Fraction, ...]]:
    """Basis of {x : rows . x = 0}."""
    if not rows:
        return [tuple(Fraction(int(i == j)) for j in range(ncols)) for i in range(ncols)]
    red, piv = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(red, piv):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


def solve(columns: Sequence[Sequence], target: Sequence):
    """Coefficients c with sum_i c_i * columns[i] == target, or None.

    ``columns`` must be linearly independent; the solution is then unique.
    """
    n = len(columns)
    dim = len(target)
    aug = [[as_fraction(columns[j][i]) for j in range(n)] + [as_fraction(target[i])]
           for i in range(dim)]
    red, piv = rref(aug, n + 1)
    if n in piv:
        return None
    coeffs = [Fraction(0)] * n
    for row, p in zip(red, piv):
        coeffs[p] = row[n]
    return tuple(coeffs)


def matmul(a: Mat, b: Mat) -> Mat:
    bt = list(zip(*b))
    return tuple(tuple(dot(r, c) for c in bt) for r in a)


def matvec(a: Mat, v: Vec) -> Vec:
    return tuple(dot(r, v) for r in a)


def transpose(a: Mat) -> Mat:
    return tuple(zip(*a))


def identity(n: int) -> Mat:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def inverse(a: Mat) -> Mat:
    n = len(a)
    aug = [list(map(as_fraction, row)) + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(a)]
    red, piv = rref(aug, 2 * n)
    if piv[:n] != list(range(n)) or len(red) < n:
        raise ZeroDivisionError("singular matrix")
    return tuple(tuple(row[n:]) for row in red)


def det(a: Mat) -> Fraction:
    m = [list(map(as_fraction, row)) for row in a]
    n = len(m)
    d = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            d = -d
        d *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / m[c][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return d


def proportional(u: Sequence, v: Sequence) -> bool:
    """u and v nonzero and equal up to a nonzero scalar (cross-multiplication)."""
    n = len(u)
    if n != len(v):
        return False
    for i in range(n):
        for j in range(i + 1, n):
            if u[i] * v[j] != u[j] * v[i]:
                return False
    # both nonzero and supports agree
    return all((a == 0) == (b == 0) for a, b in zip(u, v))
