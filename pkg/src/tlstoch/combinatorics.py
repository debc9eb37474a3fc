"""Exact product formulas for the ASM-type counting sequences."""

from __future__ import annotations

from fractions import Fraction
from math import comb, factorial


def _exact(value: Fraction, name: str) -> int:
    if value.denominator != 1:
        raise ArithmeticError(f"{name} product is not an integer: {value}")
    return int(value)


def catalan(n: int) -> int:
    if n < 0:
        raise ValueError("n must be nonnegative")
    return comb(2 * n, n) // (n + 1)


def asm(n: int) -> int:
    """A(n), the number of n x n alternating sign matrices."""
    if n < 1:
        raise ValueError("n must be >= 1")
    acc = Fraction(1)
    for k in range(n):
        acc *= Fraction(factorial(3 * k + 1), factorial(n + k))
    return _exact(acc, "A(n)")


def asm_vertical(m: int) -> int:
    """A_V(m) for odd m = 2n+1: vertically symmetric m x m ASMs."""
    if m < 1 or m % 2 == 0:
        raise ValueError(f"A_V needs odd m >= 1, got {m}")
    n = (m - 1) // 2
    acc = Fraction(1)
    for j in range(n):
        acc *= Fraction(
            (3 * j + 2) * factorial(2 * j + 1) * factorial(6 * j + 3),
            factorial(4 * j + 2) * factorial(4 * j + 3),
        )
    return _exact(acc, "A_V")


def n8(m: int) -> int:
    """N_8(m) for even m = 2n: cyclically symmetric transpose complement plane partitions."""
    if m < 2 or m % 2:
        raise ValueError(f"N_8 needs even m >= 2, got {m}")
    n = m // 2
    acc = Fraction(1)
    for j in range(1, n):
        acc *= Fraction(
            (3 * j + 1) * factorial(2 * j) * factorial(6 * j),
            factorial(4 * j) * factorial(4 * j + 1),
        )
    return _exact(acc, "N_8")


def asm_half_turn(m: int) -> int:
    """A_HT(m): half-turn symmetric m x m ASMs, either parity."""
    if m < 1:
        raise ValueError("m must be >= 1")
    acc = Fraction(1)
    if m % 2 == 0:
        n = m // 2
        for k in range(n):
            ratio = Fraction(factorial(3 * k + 1), factorial(n + k))
            acc *= Fraction(3 * k + 2, 3 * k + 1) * ratio * ratio
    else:
        # m = 2n - 1.  The k = 0 factor (4/3) is excluded; with it the
        # product is not even an integer.
        n = (m + 1) // 2
        for k in range(1, n):
            ratio = Fraction(factorial(3 * k) * factorial(k), factorial(2 * k) ** 2)
            acc *= Fraction(4, 3) * ratio * ratio
    return _exact(acc, "A_HT")


SEQUENCES = {
    "catalan": (catalan, lambda k: k),
    "asm": (asm, lambda k: k),
    "asm_vertical": (asm_vertical, lambda k: 2 * k + 1),
    "n8": (n8, lambda k: 2 * k),
    "asm_half_turn_even": (asm_half_turn, lambda k: 2 * k),
    "asm_half_turn_odd": (asm_half_turn, lambda k: 2 * k - 1),
}


def sequence_table(name: str, upto: int) -> list[tuple[int, int]]:
    """``(argument, value)`` rows for the first ``upto`` terms of a named sequence."""
    try:
        fn, arg = SEQUENCES[name]
    except KeyError:
        raise ValueError(f"unknown sequence {name!r}; choose from {sorted(SEQUENCES)}") from None
    start = 0 if name == "catalan" else 1
    return [(arg(k), fn(arg(k))) for k in range(start, start + upto)]
