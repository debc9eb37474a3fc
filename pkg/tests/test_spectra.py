from fractions import Fraction

import numpy as np
import pytest

from tlstoch.markov import iter_sectors
from tlstoch.spectra import (
    QSeries,
    conformal_weight,
    label_weight,
    partition_function,
    partition_numbers,
    scaled_gap_estimate,
    sector_eigenvalues,
    sector_spectrum,
    spectrum_inclusion,
    virasoro_character,
)


def partition_table(n):
    """p(0..n) by the coin-change recursion over part sizes."""
    p = [1] + [0] * n
    for part in range(1, n + 1):
        for total in range(part, n + 1):
            p[total] += p[total - part]
    return p


def test_two_state_spectrum():
    assert np.allclose(sector_spectrum(4, "closed", 0), [0, 3])


def test_two_defects_on_two_sites():
    # H = 1 - e_1 and e_1 annihilates the defect pair, leaving only the diagonal
    assert sector_spectrum(2, "closed", 2) == [1.0]


@pytest.mark.parametrize("L,bc,m", [s for s in iter_sectors(9) if s[0] > 1])
def test_stochastic_ground_level_is_zero(L, bc, m):
    ev = sector_eigenvalues(L, bc, m)
    assert abs(sorted(ev, key=lambda z: z.real)[0]) < 1e-9
    assert ev.real.min() > -1e-9
    assert np.abs(ev.imag).max() < 1e-8


def test_defect_sector_levels():
    for L, m in ((8, 2), (9, 3), (10, 4)):
        ev = sector_eigenvalues(L, "closed", m)
        assert ev.real.min() > 0
        assert np.abs(ev.imag).max() < 1e-8


def test_conformal_weights():
    assert [conformal_weight(s) for s in (0, Fraction(1, 2), 1, Fraction(3, 2))] == [0, 0, Fraction(1, 3), 1]
    with pytest.raises(ValueError):
        conformal_weight(Fraction(1, 3))


def test_label_weight_extension():
    assert label_weight(-1) == 1
    assert label_weight(3) == Fraction(1, 3)
    assert all(label_weight(-(2 * j + 1)) == Fraction((2 * j + 2) * (2 * j + 3), 6) for j in range(6))


def test_trivial_sectors_have_zero_gap():
    est = scaled_gap_estimate(0, [4, 6, 8])
    assert est.delta == 0 and est.scaled_gaps == [0, 0, 0]
    est = scaled_gap_estimate(Fraction(1, 2), [7, 9, 11, 13, 15])
    assert abs(est.delta) < 0.02


def test_two_defect_estimate_small_sizes():
    est = scaled_gap_estimate(1, [8, 10, 12, 14], threads=2)
    assert abs(est.delta - 1 / 3) < 0.02
    assert est.residual < 1e-3
    assert est.to_csv().splitlines()[0] == "size,defects,lowest_eigenvalue,scaled_gap"


def test_estimate_arguments():
    with pytest.raises(ValueError):
        scaled_gap_estimate(1, [8, 10])
    with pytest.raises(ValueError):
        scaled_gap_estimate(1, [8, 9, 10])
    with pytest.raises(ValueError):
        scaled_gap_estimate(1, [10, 8, 12])


@pytest.mark.parametrize("L", [4, 6, 8])
def test_ic_spectrum_inside_dc(L):
    ok, dist = spectrum_inclusion(L)
    assert ok and dist < 1e-9


def test_partition_numbers_match_table():
    assert list(partition_numbers(60)) == partition_table(60)


def test_character_examples():
    chi = virasoro_character(1, 5)
    assert chi.offset == 0 and chi.coefficients() == [1, 1, 2, 3, 5, 7]
    chi = virasoro_character(3, 3)
    assert chi.offset == Fraction(1, 3) and chi.coefficients() == [1, 1, 2, 3]
    chi = virasoro_character(-1, 2)
    assert chi.offset == 1 and chi.coefficients() == [1, 1, 2]


def test_character_coefficients_are_partitions():
    table = partition_table(40)
    for n in (1, 2, 3, 4, 5, -1, -3):
        assert virasoro_character(n, 40).coefficients() == table


def test_vacuum_partition_function():
    assert partition_function(0, 5).coefficients() == [1, 0, 1, 1, 2, 2]
    table = partition_table(40)
    assert partition_function(0, 40).coefficients() == [table[0]] + [table[k] - table[k - 1] for k in range(1, 41)]


def test_half_sector_is_single_difference():
    z = partition_function(Fraction(1, 2), 3)
    expected = virasoro_character(2, 3) - QSeries(virasoro_character(-2, 3).terms, 3)
    assert z.terms == expected.terms


@pytest.mark.parametrize("s", [Fraction(k, 2) for k in range(7)])
def test_partition_functions_nonnegative(s):
    z = partition_function(s, 40)
    assert all(c >= 0 for c in z.terms.values())
    assert z.coefficient(0) == 1


def test_series_text():
    assert str(virasoro_character(3, 3)) == "q^{1/3}(1 + q + 2q^2 + 3q^3 + …)"
    assert str(QSeries({}, 3)) == "0"


def test_series_cutoff():
    a = QSeries({0: 1, 2: 3, 5: 1}, 4)
    assert 5 not in a.terms
    assert (a - a).terms == {}
