"""Fraction-free integer linear algebra used for exact stationary states."""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence


def bareiss_echelon(rows: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[int]]:
    """Row echelon form by fraction-free elimination.

    Returns the reduced integer matrix and the pivot column of each nonzero
    row.  Pivots are chosen by largest magnitude in the column; every division
    is exact (entries stay minors of the input).
    """
    m = [list(r) for r in rows]
    n_rows = len(m)
    n_cols = len(m[0]) if m else 0
    pivots: list[int] = []
    prev = 1
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        best = max(range(r, n_rows), key=lambda i: abs(m[i][c]))
        if m[best][c] == 0:
            continue
        m[r], m[best] = m[best], m[r]
        piv = m[r][c]
        row_r = m[r]
        for i in range(r + 1, n_rows):
            row_i = m[i]
            f = row_i[c]
            for j in range(c + 1, n_cols):
                num = piv * row_i[j] - f * row_r[j]
                q, rem = divmod(num, prev)
                if rem:
                    raise ArithmeticError("inexact Bareiss division")
                row_i[j] = q
            row_i[c] = 0
        # the next round divides by this pivot exactly
        prev = piv
        pivots.append(c)
        r += 1
    return m, pivots


def integer_kernel(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Basis of the rational kernel, each vector scaled to coprime integers."""
    n_cols = len(rows[0])
    echelon, pivots = bareiss_echelon(rows)
    free = [c for c in range(n_cols) if c not in set(pivots)]
    basis = []
    for f in free:
        x: list[Fraction] = [Fraction(0)] * n_cols
        x[f] = Fraction(1)
        for r in reversed(range(len(pivots))):
            pc = pivots[r]
            row = echelon[r]
            s = sum((row[j] * x[j] for j in range(pc + 1, n_cols) if row[j] and x[j]), Fraction(0))
            x[pc] = -s / row[pc]
        basis.append(_clear(x))
    return basis


def _clear(x: Sequence[Fraction]) -> list[int]:
    den = 1
    for v in x:
        den = lcm(den, v.denominator)
    ints = [int(v * den) for v in x]
    g = 0
    for v in ints:
        g = gcd(g, v)
    return [v // g for v in ints] if g else ints
