"""Event-driven simulation of the master equation on a sector.

Randomness: numpy's PCG64 seeded through ``SeedSequence(seed)``, spawned
into two child streams, the first for move choices and the second for
exponential holding times.  Both are drawn in fixed-size chunks, so a seed
fixes the trajectory bit for bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .linkstates import BC, SectorBasis, enumerate_sector
from .markov import StationaryVector, build_intensity_matrix

CHUNK = 1 << 16
DEFAULT_EVENTS = 10**6


@dataclass(frozen=True)
class SimConfig:
    L: int
    bc: BC | str
    defects: int | None = None
    seed: int = 0
    max_events: int | None = None
    max_time: float | None = None
    burn_in: float = 0.1
    batches: int = 50

    def __post_init__(self) -> None:
        object.__setattr__(self, "bc", BC.parse(self.bc))
        if not 0 <= self.burn_in < 1:
            raise ValueError("burn-in fraction must lie in [0, 1)")
        if self.max_events is None and self.max_time is None:
            object.__setattr__(self, "max_events", DEFAULT_EVENTS)
        if self.max_events is not None and self.max_time is not None:
            raise ValueError("give only one of max_events and max_time")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass
class EmpiricalDistribution:
    basis: SectorBasis
    fractions: np.ndarray
    events: int
    time: float
    seed: int
    # Occupation fractions per batch, for error estimates.
    batch_fractions: np.ndarray | None = None

    def to_dict(self) -> dict:
        return {
            "L": self.basis.L,
            "bc": self.basis.bc.value,
            "defects": self.basis.defects,
            "seed": self.seed,
            "events": self.events,
            "time": self.time,
            "fractions": {s.serialize(): float(f) for s, f in zip(self.basis.states, self.fractions)},
        }


def _move_tables(basis: SectorBasis) -> tuple[list[list[int]], np.ndarray]:
    H = build_intensity_matrix(basis)
    if not H.stochastic:
        raise ValueError("sector loses probability through defect annihilation; simulate a stochastic sector")
    targets = []
    for b, col in enumerate(H.columns):
        moves = []
        for a in sorted(col):
            if a != b:
                moves.extend([a] * -col[a])
        if len(moves) != col.get(b, 0):
            raise AssertionError(f"column {b}: rate bookkeeping broken")
        targets.append(moves)
    return targets, np.array([len(t) for t in targets], dtype=float)


def simulate(cfg: SimConfig, basis: SectorBasis | None = None) -> EmpiricalDistribution:
    basis = basis if basis is not None else enumerate_sector(cfg.L, cfg.bc, cfg.defects)
    n = len(basis)
    targets, rates = _move_tables(basis)
    if n == 1 and rates[0] == 0:
        return EmpiricalDistribution(basis, np.ones(1), 0, 0.0, cfg.seed, np.ones((1, 1)))
    if np.any(rates == 0):
        raise RuntimeError("absorbing state inside a multi-state sector")

    jump_ss, hold_ss = np.random.SeedSequence(cfg.seed).spawn(2)
    jump_rng = np.random.Generator(np.random.PCG64(jump_ss))
    hold_rng = np.random.Generator(np.random.PCG64(hold_ss))
    degree = [len(t) for t in targets]

    by_events = cfg.max_events is not None
    horizon = float(cfg.max_events if by_events else cfg.max_time)
    burn = cfg.burn_in * horizon
    n_batches = max(1, cfg.batches)
    batch_len = (horizon - burn) / n_batches
    batch_occ = np.zeros((n_batches, n))

    state = 0
    events = 0
    clock = 0.0
    done = False
    while not done:
        u = jump_rng.random(CHUNK)
        hold = hold_rng.standard_exponential(CHUNK)
        visited = np.empty(CHUNK, dtype=np.int64)
        for k in range(CHUNK):
            visited[k] = state
            state = targets[state][int(u[k] * degree[state])]
        hold /= rates[visited]
        if by_events:
            take = min(CHUNK, cfg.max_events - events)
            visited, hold = visited[:take], hold[:take]
            # position of each event on the event axis
            pos = events + np.arange(take, dtype=float)
            events += take
            done = events >= cfg.max_events
        else:
            ends = clock + np.cumsum(hold)
            take = int(np.searchsorted(ends, cfg.max_time)) + 1
            take = min(take, CHUNK)
            visited, hold = visited[:take], hold[:take].copy()
            if ends[take - 1] >= cfg.max_time:
                hold[-1] -= ends[take - 1] - cfg.max_time
                done = True
            pos = clock + np.concatenate(([0.0], np.cumsum(hold)[:-1]))
            events += take
        clock += float(hold.sum())
        keep = pos >= burn
        if keep.any():
            idx = np.minimum(((pos[keep] - burn) // batch_len).astype(np.int64), n_batches - 1)
            np.add.at(batch_occ, (idx, visited[keep]), hold[keep])

    occ = batch_occ.sum(axis=0)
    total = occ.sum()
    with np.errstate(invalid="ignore", divide="ignore"):
        per_batch = batch_occ / batch_occ.sum(axis=1, keepdims=True)
    return EmpiricalDistribution(basis, occ / total, events, clock, cfg.seed, per_batch)


@dataclass
class ConvergenceReport:
    seed: int
    events: int
    time: float
    tv: float
    relative_errors: dict[str, float]
    ess: float
    fractions: dict[str, float]
    exact: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "events": self.events,
            "time": self.time,
            "tv_distance": self.tv,
            "ess": self.ess,
            "fractions": self.fractions,
            "exact": self.exact,
            "relative_errors": self.relative_errors,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def effective_sample_size(emp: EmpiricalDistribution) -> float:
    """Smallest per-state ESS from batch means of occupation fractions."""
    b = emp.batch_fractions
    if b is None or b.shape[0] < 2 or len(emp.fractions) == 1:
        return float("nan")
    p = emp.fractions
    var_mean = b.var(axis=0, ddof=1) / b.shape[0]
    with np.errstate(divide="ignore", invalid="ignore"):
        ess = p * (1 - p) / var_mean
    ess = ess[np.isfinite(ess)]
    return float(ess.min()) if ess.size else math.inf


def convergence_report(
    cfg: SimConfig, exact: StationaryVector, emp: EmpiricalDistribution | None = None
) -> ConvergenceReport:
    b = exact.basis
    if (b.L, b.bc, b.defects) != (cfg.L, cfg.bc, cfg.defects if cfg.defects is not None else cfg.L % 2):
        raise ValueError(f"sector mismatch: simulation {cfg.L}/{cfg.bc.value} vs exact {b.L}/{b.bc.value}")
    if emp is None:
        emp = simulate(cfg, b)
    q = exact.probabilities()
    names = [s.serialize() for s in b.states]
    rel = {nm: float(abs(f - e) / e) for nm, f, e in zip(names, emp.fractions, q)}
    return ConvergenceReport(
        seed=cfg.seed,
        events=emp.events,
        time=emp.time,
        tv=total_variation(emp.fractions, q),
        relative_errors=rel,
        ess=effective_sample_size(emp),
        fractions=dict(zip(names, map(float, emp.fractions))),
        exact=dict(zip(names, map(float, q))),
    )
