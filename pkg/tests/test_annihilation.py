from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rule184.annihilation import (
    Pair,
    draw_trits,
    first_return_probability,
    literal_companion,
    match_partners,
    neighbor_velocity_stats,
    survival_probability,
    u2n_exact,
)
from rule184.components import (
    BaConfig,
    EnumerationTooLargeError,
    InitSpec,
    InvalidSpecError,
    RingImbalanceError,
    Topology,
    WindowTooShortError,
)
from rule184.dynamics import evolve


def test_pair_times():
    pair = Pair(plus=2, minus=7)
    assert pair.distance == pair.time2 == 5
    assert not pair.absent_by(2)
    assert pair.absent_by(3)
    assert not pair.annihilated_before(2)
    assert pair.annihilated_before(3)
    meets_at_two = Pair(plus=0, minus=4)
    assert meets_at_two.absent_by(2)
    assert not meets_at_two.annihilated_before(2)


def test_window_matching():
    zeta = BaConfig(topology=Topology.window(7, lo=-3), cells=[-1, 1, 0, 1, -1, -1, 1])
    report = match_partners(zeta)
    assert [(p.plus, p.minus) for p in report.pairs] == [(-2, 2), (0, 1)]
    assert report.unmatched_minus == [-3]
    assert report.unmatched_plus == [3]
    assert report.partner_of(0) == 1
    assert report.partner_of(3) is None
    assert report.times == {(-2, 2): 4, (0, 1): 1}
    assert report.to_csv().splitlines() == ["pos_plus,pos_minus,time2", "-2,2,4", "0,1,1"]


def test_ring_matching():
    report = match_partners(BaConfig(topology=Topology.ring(4), cells=[-1, 1, 1, -1]))
    assert [(p.plus, p.minus) for p in report.pairs] == [(1, 4), (2, 3)]
    assert match_partners(BaConfig(topology=Topology.ring(3), cells=[0, 0, 0])).pairs == []
    with pytest.raises(RingImbalanceError):
        match_partners(BaConfig(topology=Topology.ring(3), cells=[1, 0, 0]))


@given(st.lists(st.integers(-1, 1), min_size=3, max_size=40))
def test_matched_pairs_vanish_on_time(cells):
    n = len(cells)
    zeta = BaConfig(topology=Topology.window(n, lo=0), cells=cells)
    padded = BaConfig(
        topology=Topology.window(3 * n, lo=-n), cells=[0] * n + cells + [0] * n
    )
    sheet = evolve(padded, n)
    for pair in match_partners(zeta).pairs:
        t = (pair.distance + 1) // 2
        if t > n:
            continue
        # the +1 keeps moving right until it meets its partner
        before = sheet.row(t - 1)
        assert before.at(pair.plus + t - 1) == 1
        assert sheet.row(t).at(pair.plus + t) != 1


def test_literal_companion_can_disagree():
    zeta = BaConfig(topology=Topology.window(5), cells=[1, -1, -1, 1, 1])
    assert literal_companion(zeta, 0) == 3
    assert match_partners(zeta).partner_of(0) == 1


def test_u2n():
    assert u2n_exact(5) == Fraction(63, 256)
    with pytest.raises(ValueError):
        u2n_exact(0)


def test_draw_trits_from_bits():
    spec = InitSpec(kind="checkerboard", phase="odd")
    rows = draw_trits(spec, np.random.default_rng(0), 3, 6)
    assert rows.shape == (3, 6)
    assert not rows.any()


def test_survival():
    report = survival_probability(InitSpec(kind="bernoulli_ba_pm", seed=3), 2, 20000)
    assert report.exact == "3/8"
    assert report.within(5)
    with pytest.raises(WindowTooShortError):
        survival_probability(InitSpec(kind="bernoulli_ba_pm"), 3, 10, window=4)


def test_survival_without_reference():
    report = survival_probability(InitSpec(kind="bernoulli_ca", p=0.5, seed=1), 1, 500)
    assert report.reference is None
    assert report.samples == 500


@pytest.mark.parametrize("n, exact", [(1, "1"), (2, "3/4")])
def test_first_return_exact(n, exact):
    assert first_return_probability(n).exact == exact


def test_first_return_monte_carlo():
    report = first_return_probability(2, mode="monte_carlo", samples=40000, seed=4)
    assert abs(report.estimate - 0.75) <= 5 * report.stderr


def test_first_return_modes():
    with pytest.raises(EnumerationTooLargeError):
        first_return_probability(12)
    with pytest.raises(ValueError):
        first_return_probability(2, mode="guess")


def test_neighbor_velocity():
    report = neighbor_velocity_stats(1, 200, seed=5)
    assert report.exact == "2/3"
    assert report.details["opposite_reference"] == pytest.approx(1 / 3)
    assert report.within(5)
    with pytest.raises(InvalidSpecError):
        neighbor_velocity_stats(0, 10)


@pytest.mark.slow
@pytest.mark.parametrize("n", [2, 4, 8])
def test_neighbor_velocity_at_full_size(n):
    report = neighbor_velocity_stats(n, 2000, seed=0)
    assert report.exact == str(1 / (1 + u2n_exact(n)))
    assert report.within(4)
