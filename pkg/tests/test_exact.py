from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from tlstoch.exact import bareiss_echelon, integer_kernel


def test_kernel_of_rank_one():
    assert integer_kernel([[1, -2], [-1, 2]]) == [[2, 1]]


def test_full_rank_has_no_kernel():
    assert integer_kernel([[2, 1], [1, 1]]) == []


def test_two_dimensional_kernel():
    k = integer_kernel([[1, 1, 1]])
    assert len(k) == 2


matrices = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=1, max_size=n)
)


@settings(max_examples=200)
@given(matrices)
def test_kernel_vectors_are_annihilated(rows):
    for v in integer_kernel(rows):
        assert any(v)
        assert all(sum(a * x for a, x in zip(r, v)) == 0 for r in rows)


@settings(max_examples=200)
@given(matrices)
def test_rank_nullity(rows):
    _, pivots = bareiss_echelon(rows)
    assert len(pivots) + len(integer_kernel(rows)) == len(rows[0])


def test_echelon_entries_stay_integral():
    m, _ = bareiss_echelon([[3, 1, 4], [1, 5, 9], [2, 6, 5]])
    assert all(isinstance(x, int) for row in m for x in row)
    # last pivot of a fraction-free elimination is the determinant up to sign
    det = Fraction(3 * (5 * 5 - 9 * 6) - 1 * (1 * 5 - 9 * 2) + 4 * (1 * 6 - 5 * 2))
    assert abs(m[2][2]) == abs(det)
