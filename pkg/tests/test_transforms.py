import pytest
from hypothesis import given
from hypothesis import strategies as st

from rule184.components import (
    BaConfig,
    Ca184Config,
    NotInLambdaError,
    RingParityError,
    Topology,
    WindowTooShortError,
)
from rule184.dynamics import ba_step, ca184_step
from rule184.transforms import (
    ba_counting_profile,
    ba_to_ca,
    ca_counting_profile,
    ca_to_ba,
    counting_profile_gap,
    lambda_membership,
)

windows = st.builds(
    lambda cells, lo: Ca184Config(topology=Topology.window(len(cells), lo=lo), cells=cells),
    st.lists(st.integers(0, 1), min_size=4, max_size=100),
    st.integers(-30, 30),
)
even_rings = st.integers(2, 50).flatmap(
    lambda half: st.lists(st.integers(0, 1), min_size=2 * half, max_size=2 * half)
).map(lambda cells: Ca184Config(topology=Topology.ring(len(cells)), cells=cells))


def test_bond_values():
    eta = Ca184Config(topology=Topology.window(5, lo=3), cells=[0, 0, 1, 1, 0])
    zeta = ca_to_ba(eta)
    assert zeta.topology == Topology.window(4, lo=3)
    assert zeta.cells.tolist() == [1, 0, -1, 0]


def test_odd_rings_are_refused():
    with pytest.raises(RingParityError):
        ca_to_ba(Ca184Config.odd(Topology.ring(5)))


def test_one_cell_window():
    with pytest.raises(WindowTooShortError):
        ca_to_ba(Ca184Config(topology=Topology.window(1), cells=[1]))


@given(st.one_of(windows, even_rings))
def test_step_commutes_with_transform(eta):
    assert ca_to_ba(ca184_step(eta)) == ba_step(ca_to_ba(eta))


@given(st.one_of(windows, even_rings))
def test_transform_is_invertible_on_its_image(eta):
    zeta = ca_to_ba(eta)
    assert lambda_membership(zeta).member
    assert ba_to_ca(zeta, anchor_bit=int(eta.cells[0])) == eta


@pytest.mark.parametrize(
    "cells, member, reason",
    [
        ([1, 0, 1], False, "same velocity at even distance"),
        ([1, 1], True, None),
        ([1, -1], False, "opposite velocities at odd distance"),
        ([-1, 0, 1], True, None),
        ([0, 0, 0], True, None),
        ([1, 0, 0, 0, -1, -1], True, None),
    ],
)
def test_lambda_membership(cells, member, reason):
    verdict = lambda_membership(BaConfig(topology=Topology.window(len(cells)), cells=cells))
    assert verdict.member is member
    if reason:
        assert verdict.witness.reason == reason


def test_odd_ring_is_outside_the_image():
    verdict = lambda_membership(BaConfig(topology=Topology.ring(5), cells=[0] * 5))
    assert not verdict.member
    assert verdict.witness.reason == "ring of odd size"


def test_wrapping_pair_on_a_ring():
    verdict = lambda_membership(BaConfig(topology=Topology.ring(4), cells=[1, 0, 0, 0]))
    assert not verdict.member
    assert verdict.witness.left == 0
    assert verdict.witness.distance == 4


def test_ba_to_ca_refuses_non_members():
    with pytest.raises(NotInLambdaError) as err:
        ba_to_ca(BaConfig(topology=Topology.window(3, lo=2), cells=[1, 0, 1]))
    assert (err.value.witness.left, err.value.witness.right) == (2, 4)
    with pytest.raises(ValueError):
        ba_to_ca(BaConfig(topology=Topology.window(2), cells=[0, 0]), anchor_bit=2)


def test_empty_row_follows_anchor():
    empty = BaConfig(topology=Topology.window(3, lo=1), cells=[0, 0, 0])
    assert ba_to_ca(empty).cells.tolist() == [0, 1, 0, 1]
    assert ba_to_ca(empty, anchor_bit=1) == Ca184Config.even(Topology.window(4, lo=1)).holes()


def test_counting_profiles():
    zeta = BaConfig(topology=Topology.window(4, lo=-1), cells=[-1, 0, 1, 1])
    f = ba_counting_profile(zeta, base=2)
    assert f.origin_abscissa == -2
    assert f.heights.tolist() == [2, 1, 1, 2, 3]
    eta = Ca184Config(topology=Topology.window(2, lo=5), cells=[0, 1])
    assert ca_counting_profile(eta).heights.tolist() == [0, 0, -1]
    assert ca_counting_profile(eta, centered=True).abscissas.tolist() == [4, 5, 6]


@given(windows)
def test_centered_profile_stays_close(eta):
    assert counting_profile_gap(eta) <= 1
