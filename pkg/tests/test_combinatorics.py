from math import comb

import pytest

from tlstoch.combinatorics import asm, asm_half_turn, asm_vertical, catalan, n8, sequence_table
from tlstoch.linkstates import count_states


def test_catalan():
    assert [catalan(n) for n in (0, 3, 10)] == [1, 5, 16796]
    assert [catalan(n) for n in range(1, 5)] == [1, 2, 5, 14]


def test_asm():
    assert [asm(n) for n in range(1, 6)] == [1, 2, 7, 42, 429]


def test_asm_vertical():
    assert [asm_vertical(m) for m in (3, 5, 7, 9)] == [1, 3, 26, 646]
    with pytest.raises(ValueError):
        asm_vertical(4)


def test_n8():
    assert [n8(m) for m in (2, 4, 6, 8)] == [1, 2, 11, 170]
    with pytest.raises(ValueError):
        n8(5)


def test_half_turn_both_parities():
    assert [asm_half_turn(m) for m in (2, 4, 6, 8)] == [2, 10, 140, 5544]
    assert [asm_half_turn(m) for m in (3, 5, 7)] == [3, 25, 588]
    assert asm_half_turn(1) == 1


def _asm_rows(n):
    from itertools import product

    rows = []
    for r in product((-1, 0, 1), repeat=n):
        partial = [sum(r[: k + 1]) for k in range(n)]
        if all(p in (0, 1) for p in partial) and partial[-1] == 1:
            rows.append(r)
    return rows


def _symmetric_asms(n, symmetry):
    from itertools import product

    rows = _asm_rows(n)
    count = 0
    for m in product(rows, repeat=n):
        cols_ok = all(
            all(p in (0, 1) for p in _partials([m[i][j] for i in range(n)])) and sum(m[i][j] for i in range(n)) == 1
            for j in range(n)
        )
        if cols_ok and symmetry(m, n):
            count += 1
    return count


def _partials(xs):
    out, acc = [], 0
    for x in xs:
        acc += x
        out.append(acc)
    return out


def _half_turn(m, n):
    return all(m[i][j] == m[n - 1 - i][n - 1 - j] for i in range(n) for j in range(n))


def _vertical(m, n):
    return all(m[i][j] == m[i][n - 1 - j] for i in range(n) for j in range(n))


def test_against_brute_force():
    assert [_symmetric_asms(n, lambda m, n: True) for n in (1, 2, 3, 4)] == [asm(n) for n in (1, 2, 3, 4)]
    assert [_symmetric_asms(n, _half_turn) for n in (2, 3, 4, 5)] == [asm_half_turn(n) for n in (2, 3, 4, 5)]
    assert [_symmetric_asms(n, _vertical) for n in (3, 5)] == [asm_vertical(n) for n in (3, 5)]


@pytest.mark.parametrize("L", range(1, 31))
def test_sector_sizes_sum_to_middle_binomial(L):
    assert sum(count_states(L, m) for m in range(L % 2, L + 1, 2)) == comb(L, L // 2)


def test_count_states_examples():
    assert count_states(6, 0) == 5
    assert count_states(6, 2) == 9
    assert count_states(6, 0) + count_states(6, 2) + count_states(6, 4) + count_states(6, 6) == 20


def test_sequence_table():
    assert sequence_table("asm", 4) == [(1, 1), (2, 2), (3, 7), (4, 42)]
    assert [v for _, v in sequence_table("asm_half_turn_odd", 4)] == [1, 3, 25, 588]
    with pytest.raises(ValueError):
        sequence_table("nope", 3)
