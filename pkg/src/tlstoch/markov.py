"""Intensity matrix H = sum_j (1 - e_j) on a sector and its exact stationary state.

Orientation: ``dP_a/dt = -sum_b H[a][b] P_b``, so the rate of ``b -> a`` is
``-H[a][b]`` and probability conservation is a zero *column* sum.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from math import gcd
from typing import Iterator

import numpy as np
from scipy import sparse

from .exact import integer_kernel
from .linkstates import BC, LinkState, SectorBasis, apply_generator, enumerate_sector, num_generators


@dataclass
class IntensityMatrix:
    """Column-major sparse integer matrix; ``columns[b]`` maps row -> entry."""

    basis: SectorBasis
    columns: list[dict[int, int]]
    # Moves leaving a fixed-defect sector (defect annihilation), per column.
    leaked: list[int] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.columns)

    @property
    def stochastic(self) -> bool:
        return not any(self.leaked)

    def entry(self, a: int, b: int) -> int:
        return self.columns[b].get(a, 0)

    def dense(self) -> list[list[int]]:
        rows = [[0] * self.n for _ in range(self.n)]
        for b, col in enumerate(self.columns):
            for a, v in col.items():
                rows[a][b] = v
        return rows

    def to_scipy(self) -> sparse.csc_matrix:
        data, ri, ci = [], [], []
        for b, col in enumerate(self.columns):
            for a, v in col.items():
                data.append(float(v))
                ri.append(a)
                ci.append(b)
        return sparse.csc_matrix((data, (ri, ci)), shape=(self.n, self.n))

    def to_numpy(self) -> np.ndarray:
        return self.to_scipy().toarray()

    def apply(self, vec: list[int]) -> list[int]:
        out = [0] * self.n
        for b, col in enumerate(self.columns):
            vb = vec[b]
            if vb:
                for a, v in col.items():
                    out[a] += v * vb
        return out


def build_intensity_matrix(basis: SectorBasis) -> IntensityMatrix:
    """Assemble H column by column from the generator images of each state."""
    n_gen = num_generators(basis.L, basis.bc)
    columns: list[dict[int, int]] = []
    leaked: list[int] = []
    for b, state in enumerate(basis.states):
        col: dict[int, int] = {}
        lost = 0
        for j in range(1, n_gen + 1):
            image = apply_generator(j, state)
            if image == state:
                continue
            col[b] = col.get(b, 0) + 1
            a = basis.index.get(image)
            if a is None:
                if basis.bc is BC.CLOSED and len(image.defects) < basis.defects:
                    lost += 1
                    continue
                raise KeyError(f"basis not closed: e_{j} {state} -> {image}")
            col[a] = col.get(a, 0) - 1
        columns.append(col)
        leaked.append(lost)
    return IntensityMatrix(basis, columns, leaked)


def sector_matrix(L: int, bc: BC | str, defects: int | None = None) -> IntensityMatrix:
    return build_intensity_matrix(enumerate_sector(L, bc, defects))


@dataclass
class IntensityReport:
    ok: bool
    violations: list[str]

    def __bool__(self) -> bool:
        return self.ok


def verify_intensity(H: IntensityMatrix, require_conservation: bool | None = None) -> IntensityReport:
    """Check sign pattern, zero column sums and the diagonal formula.

    Fixed-defect sectors with annihilation leaks are sub-stochastic; for them
    the column sum must equal the number of leaking moves instead of zero.
    """
    if require_conservation is None:
        require_conservation = H.stochastic
    basis = H.basis
    n_gen = num_generators(basis.L, basis.bc)
    problems = []
    for b, col in enumerate(H.columns):
        for a, v in col.items():
            if a != b and v > 0:
                problems.append(f"column {b}: positive off-diagonal entry H[{a}][{b}] = {v}")
            if a == b and v < 0:
                problems.append(f"column {b}: negative diagonal {v}")
        total = sum(col.values())
        expect = 0 if require_conservation else (H.leaked[b] if H.leaked else 0)
        if total != expect:
            problems.append(f"column {b}: column sum {total} != {expect}")
        state = basis.states[b]
        moving = sum(1 for j in range(1, n_gen + 1) if apply_generator(j, state) != state)
        if col.get(b, 0) != moving:
            problems.append(f"column {b}: diagonal {col.get(b, 0)} != active generators {moving}")
    return IntensityReport(not problems, problems)


@dataclass
class StationaryVector:
    basis: SectorBasis
    entries: list[int]

    @property
    def S(self) -> int:
        return sum(self.entries)

    @property
    def largest(self) -> int:
        return max(self.entries)

    def by_state(self) -> dict[LinkState, int]:
        return dict(zip(self.basis.states, self.entries))

    def probabilities(self) -> np.ndarray:
        return np.array(self.entries, dtype=float) / float(self.S)

    def to_dict(self) -> dict:
        return {
            "L": self.basis.L,
            "bc": self.basis.bc.value,
            "defects": self.basis.defects,
            "states": [s.serialize() for s in self.basis.states],
            "stationary": [str(v) for v in self.entries],
            "S": str(self.S),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["state", "weight"])
        for s, v in zip(self.basis.states, self.entries):
            w.writerow([s.serialize(), v])
        return buf.getvalue()


class KernelError(ArithmeticError):
    pass


def stationary_vector(H: IntensityMatrix) -> StationaryVector:
    """Exact kernel vector of H, scaled to coprime nonnegative integers."""
    if H.n == 1:
        if H.columns[0].get(0, 0) != 0:
            raise KernelError("1x1 sector with nonzero entry has no stationary state")
        return StationaryVector(H.basis, [1])
    kernel = integer_kernel(H.dense())
    if len(kernel) != 1:
        raise KernelError(f"kernel dimension {len(kernel)} != 1")
    vec = kernel[0]
    if all(v <= 0 for v in vec):
        vec = [-v for v in vec]
    if any(v < 0 for v in vec):
        raise KernelError("kernel vector is not sign-definite")
    g = 0
    for v in vec:
        g = gcd(g, v)
    vec = [v // g for v in vec]
    if any(H.apply(vec)):
        raise KernelError("H v != 0")
    return StationaryVector(H.basis, vec)


def iter_sectors(max_L: int) -> Iterator[tuple[int, BC, int]]:
    """Every stochastic sector (0/1 defects) with L <= max_L."""
    for L in range(1, max_L + 1):
        yield L, BC.CLOSED, L % 2
        if L % 2 == 0:
            yield L, BC.PERIODIC_DC, 0
            yield L, BC.PERIODIC_IC, 0
        elif L >= 3:
            yield L, BC.PERIODIC_ODD, 1
