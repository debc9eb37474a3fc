"""Temperley-Lieb stochastic processes at loop weight 1.

Link-state sectors, the intensity matrix H = sum_j (1 - e_j), exact integer
stationary states, fully packed loop tallies, finite-size spectra and a
Gillespie simulator.
"""

__version__ = "0.1.0"

from .combinatorics import asm, asm_half_turn, asm_vertical, catalan, n8
from .diagrams import TLDiagram, compose, enumerate_diagram_basis, generator_diagram, reduce_word
from .fpl import ConnectivityTally, GridSpec, enumerate_fpl, preset_grid, verify_conjecture
from .gillespie import EmpiricalDistribution, SimConfig, convergence_report, simulate
from .linkstates import BC, BoundaryCondition, LinkState, SectorBasis, apply_generator, enumerate_sector, parse_state
from .markov import IntensityMatrix, StationaryVector, build_intensity_matrix, stationary_vector, verify_intensity
from .spectra import QSeries, conformal_weight, partition_function, scaled_gap_estimate, sector_spectrum, virasoro_character

__all__ = [
    "BC",
    "BoundaryCondition",
    "ConnectivityTally",
    "EmpiricalDistribution",
    "GridSpec",
    "IntensityMatrix",
    "LinkState",
    "QSeries",
    "SectorBasis",
    "SimConfig",
    "StationaryVector",
    "TLDiagram",
    "apply_generator",
    "asm",
    "asm_half_turn",
    "asm_vertical",
    "build_intensity_matrix",
    "catalan",
    "compose",
    "conformal_weight",
    "convergence_report",
    "enumerate_diagram_basis",
    "enumerate_fpl",
    "enumerate_sector",
    "generator_diagram",
    "n8",
    "parse_state",
    "partition_function",
    "preset_grid",
    "reduce_word",
    "scaled_gap_estimate",
    "sector_spectrum",
    "simulate",
    "stationary_vector",
    "verify_conjecture",
    "verify_intensity",
    "virasoro_character",
]
