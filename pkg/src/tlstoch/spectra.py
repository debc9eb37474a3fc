"""Finite-size spectra of H in defect sectors and Virasoro character series."""

from __future__ import annotations

import json
import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .linkstates import BC
from .markov import sector_matrix

log = logging.getLogger(__name__)

SOUND_VELOCITY = 3 * math.sqrt(3) / 2
MAX_DENSE_DIM = 4000
IMAG_TOL = 1e-8


class ComplexSpectrumWarning(UserWarning):
    pass


def sector_eigenvalues(L: int, bc: BC | str, defects: int | None = None) -> np.ndarray:
    """All eigenvalues of a sector matrix, complex, in solver order."""
    H = sector_matrix(L, bc, defects)
    if H.n > MAX_DENSE_DIM:
        raise ValueError(f"sector dimension {H.n} exceeds dense bound {MAX_DENSE_DIM}")
    return np.linalg.eigvals(H.to_numpy())


def sector_spectrum(L: int, bc: BC | str, defects: int | None = None, tol: float = IMAG_TOL) -> list[float]:
    """Eigenvalues sorted ascending by real part.

    Imaginary parts up to ``tol`` are dropped; larger ones trigger a
    :class:`ComplexSpectrumWarning` and only the real part is kept.
    """
    ev = sector_eigenvalues(L, bc, defects)
    worst = float(np.max(np.abs(ev.imag))) if ev.size else 0.0
    if worst > tol:
        warnings.warn(
            f"L={L} {BC.parse(bc).value} defects={defects}: imaginary part {worst:.3g}",
            ComplexSpectrumWarning,
            stacklevel=2,
        )
    return sorted(float(x) for x in ev.real)


def conformal_weight(s: Fraction | int | float) -> Fraction:
    """Delta_{2s+1} = s(2s-1)/3 for half-integer s >= 0."""
    s = Fraction(s)
    if s < 0 or (2 * s).denominator != 1:
        raise ValueError(f"s must be a nonnegative half-integer, got {s}")
    return s * (2 * s - 1) / 3


def label_weight(n: int) -> Fraction:
    """Delta_n = (n-1)(n-2)/6, valid for every integer label including negative ones."""
    return Fraction((n - 1) * (n - 2), 6)


@dataclass
class ScalingEstimate:
    s: Fraction
    sizes: list[int]
    energies: list[float]
    scaled_gaps: list[float]
    delta: float
    coefficients: list[float]
    residual: float

    @property
    def exact(self) -> Fraction:
        return conformal_weight(self.s)

    def to_dict(self) -> dict:
        return {
            "s": str(self.s),
            "sizes": self.sizes,
            "energies": self.energies,
            "scaled_gaps": self.scaled_gaps,
            "delta": self.delta,
            "delta_exact": str(self.exact),
            "fit": {"a": self.coefficients[1], "b": self.coefficients[2]},
            "residual": self.residual,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_csv(self) -> str:
        lines = ["size,defects,lowest_eigenvalue,scaled_gap"]
        m = int(2 * self.s)
        for L, e, g in zip(self.sizes, self.energies, self.scaled_gaps):
            lines.append(f"{L},{m},{e:.12g},{g:.12g}")
        return "\n".join(lines) + "\n"


def lowest_eigenvalue(L: int, defects: int) -> float:
    return sector_spectrum(L, BC.CLOSED, defects)[0]


def scaled_gap_estimate(s: Fraction | int | float, sizes: list[int], threads: int = 1) -> ScalingEstimate:
    """Fit L E / (pi v) = Delta + a/L + b/L^2 over closed sectors with 2s defects."""
    s = Fraction(s)
    m = int(2 * s)
    if 2 * s != m or m < 0:
        raise ValueError(f"s must be a nonnegative half-integer, got {s}")
    if len(sizes) < 3 or any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("need at least 3 strictly increasing sizes")
    for L in sizes:
        if (L - m) % 2 or m > L:
            raise ValueError(f"{m} defects do not fit in L={L}")
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        energies = list(pool.map(lambda L: lowest_eigenvalue(L, m), sizes))
    if m <= 1:
        # stochastic sector: the lowest level is the stationary state
        energies = [0.0 if abs(e) < 1e-9 else e for e in energies]
    gaps = [L * e / (math.pi * SOUND_VELOCITY) for L, e in zip(sizes, energies)]
    Ls = np.array(sizes, dtype=float)
    design = np.column_stack([np.ones_like(Ls), 1 / Ls, 1 / Ls**2])
    coef, *_ = np.linalg.lstsq(design, np.array(gaps), rcond=None)
    resid = float(np.sqrt(np.mean((design @ coef - gaps) ** 2)))
    est = ScalingEstimate(s, list(sizes), energies, gaps, float(coef[0]), [float(c) for c in coef], resid)
    log.info("s=%s delta=%.6f residual=%.2e", s, est.delta, resid)
    return est


def spectrum_inclusion(L: int, tol: float = 1e-9) -> tuple[bool, float]:
    """Is the IC sector spectrum a sub-multiset of the DC one?

    Returns the verdict and the largest distance used in the matching.
    """
    ic = sorted(sector_eigenvalues(L, BC.PERIODIC_IC), key=lambda z: (z.real, z.imag))
    dc = list(sector_eigenvalues(L, BC.PERIODIC_DC))
    worst = 0.0
    for z in ic:
        k = min(range(len(dc)), key=lambda i: abs(dc[i] - z))
        d = abs(dc[k] - z)
        worst = max(worst, d)
        if d > tol:
            return False, d
        dc.pop(k)
    return True, worst


# -- q-series -------------------------------------------------------------------


@dataclass
class QSeries:
    """Truncated series sum_e c_e q^e with rational exponents e <= cutoff."""

    terms: dict[Fraction, int]
    cutoff: Fraction

    def __post_init__(self) -> None:
        self.cutoff = Fraction(self.cutoff)
        self.terms = {Fraction(e): c for e, c in self.terms.items() if c and e <= self.cutoff}

    @property
    def offset(self) -> Fraction:
        return min(self.terms) if self.terms else Fraction(0)

    def _aligned(self, other: QSeries) -> Fraction:
        return min(self.cutoff, other.cutoff)

    def __add__(self, other: QSeries) -> QSeries:
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return QSeries(out, self._aligned(other))

    def __neg__(self) -> QSeries:
        return QSeries({e: -c for e, c in self.terms.items()}, self.cutoff)

    def __sub__(self, other: QSeries) -> QSeries:
        return self + (-other)

    def coefficient(self, e: Fraction | int) -> int:
        return self.terms.get(Fraction(e), 0)

    def coefficients(self, start: Fraction | None = None) -> list[int]:
        """Coefficients of q^{start}, q^{start+1}, ... up to the cutoff."""
        start = self.offset if start is None else Fraction(start)
        n = math.floor(self.cutoff - start)
        return [self.coefficient(start + k) for k in range(n + 1)]

    def classes(self) -> list[Fraction]:
        """Leading exponent of each residue class of exponents mod 1."""
        lead: dict[Fraction, Fraction] = {}
        for e in self.terms:
            r = e - math.floor(e)
            lead[r] = min(lead.get(r, e), e)
        return sorted(lead.values())

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for start in self.classes():
            body = []
            for k, c in enumerate(self.coefficients(start)):
                if c == 0:
                    continue
                mono = "" if k == 0 else ("q" if k == 1 else f"q^{k}")
                if mono and abs(c) == 1:
                    term = mono
                else:
                    term = f"{abs(c)}{mono}"
                body.append(("- " if c < 0 else "+ ") + term)
            inner = " ".join(body).removeprefix("+ ")
            if inner.startswith("- "):
                inner = "-" + inner[2:]
            prefix = "" if start == 0 else "q" if start == 1 else f"q^{{{start}}}"
            parts.append(f"{prefix}({inner} + …)" if prefix else f"({inner} + …)")
        return " + ".join(parts)


@lru_cache(maxsize=None)
def partition_numbers(n: int) -> tuple[int, ...]:
    """p(0..n) by Euler's pentagonal number recurrence."""
    p = [1] + [0] * n
    for m in range(1, n + 1):
        total, k = 0, 1
        while True:
            g1 = k * (3 * k - 1) // 2
            if g1 > m:
                break
            sign = 1 if k % 2 else -1
            total += sign * p[m - g1]
            g2 = k * (3 * k + 1) // 2
            if g2 <= m:
                total += sign * p[m - g2]
            k += 1
        p[m] = total
    return tuple(p)


def virasoro_character(n: int, cutoff: int) -> QSeries:
    """chi_n = q^{Delta_n} / prod_k (1 - q^k), to ``cutoff`` orders past the leading term."""
    if cutoff < 0:
        raise ValueError("cutoff must be nonnegative")
    delta = label_weight(n)
    p = partition_numbers(cutoff)
    return QSeries({delta + k: p[k] for k in range(cutoff + 1)}, delta + cutoff)


def partition_function(s: Fraction | int | float, cutoff: int) -> QSeries:
    """Z_s = sum_j (chi_{2j+1} - chi_{-2j-1}), j = s mod 1, ..., s; exponents <= cutoff."""
    s = Fraction(s)
    if s < 0 or (2 * s).denominator != 1:
        raise ValueError(f"s must be a nonnegative half-integer, got {s}")
    total = QSeries({}, cutoff)
    j = s - math.floor(s)
    while j <= s:
        n = int(2 * j + 1)
        for label, sign in ((n, 1), (-n, -1)):
            d = label_weight(label)
            if d <= cutoff:
                # exponents are d + integers, so this truncation is complete up to cutoff
                chi = QSeries(virasoro_character(label, math.floor(cutoff - d)).terms, cutoff)
                total = total + chi if sign > 0 else total - chi
        j += 1
    return total
