import statistics

import numpy as np
import pytest

from tlstoch.gillespie import SimConfig, convergence_report, simulate, total_variation
from tlstoch.markov import sector_matrix, stationary_vector


def exact(L, bc):
    return stationary_vector(sector_matrix(L, bc))


def test_two_state_chain():
    emp = simulate(SimConfig(4, "closed", seed=1, max_events=10**6))
    assert total_variation(emp.fractions, [2 / 3, 1 / 3]) < 0.01


def test_single_state_sector():
    emp = simulate(SimConfig(2, "closed", seed=3))
    assert emp.fractions.tolist() == [1.0]


def test_determinism():
    cfg = SimConfig(6, "dc", seed=11, max_events=150_000)
    a, b = simulate(cfg), simulate(cfg)
    assert a.fractions.tobytes() == b.fractions.tobytes()
    assert a.time == b.time
    assert simulate(SimConfig(6, "dc", seed=12, max_events=150_000)).fractions.tobytes() != a.fractions.tobytes()


@pytest.mark.parametrize("L,bc", [(6, "closed"), (6, "dc"), (6, "ic"), (5, "podd"), (5, "closed")])
def test_fractions_normalised(L, bc):
    emp = simulate(SimConfig(L, bc, seed=2, max_events=50_000))
    assert abs(emp.fractions.sum() - 1) < 1e-12
    assert (emp.fractions >= 0).all()


def test_error_shrinks_with_events():
    for L, bc in ((4, "closed"), (6, "closed"), (6, "dc")):
        q = exact(L, bc)
        short, long = [], []
        for seed in range(5):
            short.append(convergence_report(SimConfig(L, bc, seed=seed, max_events=10**4), q).tv)
            long.append(convergence_report(SimConfig(L, bc, seed=seed, max_events=10**6), q).tv)
        assert statistics.median(long) < statistics.median(short)


def test_time_stop():
    emp = simulate(SimConfig(6, "closed", seed=5, max_time=2000.0))
    assert emp.time == pytest.approx(2000.0)
    assert emp.events > 0


def test_report_contents():
    rep = convergence_report(SimConfig(6, "closed", seed=4, max_events=200_000), exact(6, "closed"))
    assert rep.tv < 0.02
    assert set(rep.relative_errors) == set(rep.exact)
    assert rep.ess > 100
    assert rep.to_dict()["events"] == 200_000


def test_sector_mismatch():
    with pytest.raises(ValueError):
        convergence_report(SimConfig(6, "dc", seed=1, max_events=100), exact(6, "closed"))


def test_leaky_sector_rejected():
    with pytest.raises(ValueError):
        simulate(SimConfig(6, "closed", defects=2, seed=1, max_events=100))


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(4, "closed", burn_in=1.0)
    with pytest.raises(ValueError):
        SimConfig(4, "closed", max_events=10, max_time=1.0)
    with pytest.raises(ValueError):
        SimConfig(4, "closed", seed=-1)


def test_burn_in_excludes_start():
    emp = simulate(SimConfig(4, "closed", seed=9, max_events=1000, burn_in=0.5))
    assert np.isclose(emp.fractions.sum(), 1)
