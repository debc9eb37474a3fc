import pytest

from tlstoch.linkstates import (
    BC,
    LinkState,
    apply_generator,
    count_states,
    enumerate_sector,
    num_generators,
    parse_state,
    sector_dimension_formula,
    seed_state,
    validate_state,
)

PERIODIC = [(L, BC.PERIODIC_DC) for L in (2, 4, 6, 8)] + [(L, BC.PERIODIC_IC) for L in (2, 4, 6, 8)]
PERIODIC += [(L, BC.PERIODIC_ODD) for L in (3, 5, 7)]
CLOSED = [(L, BC.CLOSED, m) for L in range(1, 11) for m in range(L % 2, L + 1, 2)]


def test_seed_states():
    assert seed_state(4, "closed").serialize() == "(1 2)(3 4)"
    assert seed_state(5, "closed").serialize() == "(1 2)(3 4)*5"
    s = seed_state(6, "dc")
    assert s.serialize() == "(1 2)(3 4)(5 6)" and s.loop == 0


def test_parity_errors():
    for L, bc in ((5, "dc"), (3, "ic"), (4, "podd")):
        with pytest.raises(ValueError):
            seed_state(L, bc)


def test_closed_examples():
    s = seed_state(4, "closed")
    assert apply_generator(1, s) == s
    assert apply_generator(2, s).serialize() == "(1 4)(2 3)"


def test_seam_generator_on_cylinder():
    # the image path 2-1-(seam)-4-3 winds the long way, so both arcs enclose the seam
    s = apply_generator(4, seed_state(4, "dc"))
    assert s.serialize() == "(1 4)~(2 3)~"
    assert s in enumerate_sector(4, "dc").index


def test_generator_range():
    with pytest.raises(ValueError):
        apply_generator(4, seed_state(4, "closed"))
    with pytest.raises(ValueError):
        apply_generator(5, seed_state(4, "dc"))


def test_sector_examples():
    assert len(enumerate_sector(6, "closed", 0)) == 5
    assert len(enumerate_sector(4, "dc")) == 6
    assert len(enumerate_sector(4, "ic")) == 2


def test_odd_periodic_dimension():
    # Each defect position carries one winding label: binom(L, (L-1)/2) states.
    assert [len(enumerate_sector(L, "podd")) for L in (3, 5, 7, 9)] == [3, 10, 35, 126]


def test_count_states_parity():
    with pytest.raises(ValueError):
        count_states(5, 2)


@pytest.mark.parametrize("L", range(1, 13))
def test_closed_sizes(L):
    for m in range(L % 2, L + 1, 2):
        assert len(enumerate_sector(L, "closed", m)) == count_states(L, m)


@pytest.mark.parametrize("L", [2, 4, 6, 8, 10])
def test_periodic_even_sizes(L):
    assert len(enumerate_sector(L, "dc")) == sector_dimension_formula(L, "dc")
    assert len(enumerate_sector(L, "ic")) == sector_dimension_formula(L, "ic")


def _all_states():
    for L, bc, m in CLOSED:
        yield from enumerate_sector(L, bc, m).states
    for L, bc in PERIODIC:
        yield from enumerate_sector(L, bc).states


def test_images_are_valid_and_idempotent():
    for s in _all_states():
        for i in range(1, num_generators(s.size, s.bc) + 1):
            t = apply_generator(i, s)
            validate_state(t)
            assert apply_generator(i, t) == t


def test_adjacent_relation_on_states():
    for s in _all_states():
        L, n = s.size, num_generators(s.size, s.bc)
        periodic = s.bc.periodic
        for i in range(1, n + 1):
            for j in (i - 1, i + 1):
                if periodic:
                    j = (j - 1) % L + 1
                elif not 1 <= j <= n:
                    continue
                lhs = apply_generator(i, apply_generator(j, apply_generator(i, s)))
                assert lhs == apply_generator(i, s), (s, i, j)


def test_far_generators_commute_on_states():
    for s in _all_states():
        L, n = s.size, num_generators(s.size, s.bc)
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                d = abs(i - j)
                if s.bc.periodic:
                    d = min(d, L - d)
                if d >= 2:
                    assert apply_generator(i, apply_generator(j, s)) == apply_generator(j, apply_generator(i, s))


def test_defects_never_created():
    for L, bc, m in CLOSED:
        for s in enumerate_sector(L, bc, m).states:
            for i in range(1, L):
                assert len(apply_generator(i, s).defects) <= m


def test_serialization_roundtrip():
    for s in _all_states():
        assert parse_state(s.serialize(), s.bc) == s


def test_ic_identifies_seam_sides():
    basis = enumerate_sector(6, "ic")
    assert all("~" not in s.serialize() and "+O" not in s.serialize() for s in basis.states)


def test_dc_loop_flag_bounded():
    for s in enumerate_sector(8, "dc").states:
        assert s.loop in (0, 1)


def test_rejects_crossing_pattern():
    with pytest.raises(ValueError):
        validate_state(LinkState(BC.CLOSED, (2, 3, 0, 1)))


def test_rejects_defect_under_arc():
    with pytest.raises(ValueError):
        validate_state(LinkState(BC.CLOSED, (2, -1, 0)))


def test_basis_json():
    assert enumerate_sector(4, "closed").to_json() == '["(1 2)(3 4)", "(1 4)(2 3)"]'
