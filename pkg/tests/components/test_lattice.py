import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rule184.components import BaConfig, Ca184Config, Topology
from rule184.dynamics import ca184_step


def rings(min_size=3, max_size=40):
    return st.lists(st.integers(0, 1), min_size=min_size, max_size=max_size).map(
        lambda bits: Ca184Config(topology=Topology.ring(len(bits)), cells=bits)
    )


@pytest.mark.parametrize(
    "cls, cells",
    [
        (Ca184Config, [0, 1, 2, 0]),
        (Ca184Config, [0, 1, -1, 0]),
        (BaConfig, [0, 1, 2, 0]),
        (Ca184Config, [0, 1, 1]),
    ],
)
def test_invalid_cells(cls, cells):
    with pytest.raises(ValueError):
        cls(topology=Topology.ring(4), cells=cells)


def test_cells_are_read_only(ring_eta):
    with pytest.raises(ValueError):
        ring_eta.cells[0] = 0


def test_equal_configurations_hash_alike(ring_eta):
    twin = Ca184Config(topology=Topology.ring(8), cells=ring_eta.cells.tolist())
    assert twin == ring_eta
    assert len({twin, ring_eta}) == 1
    assert BaConfig(topology=Topology.ring(3), cells=[0, 0, 0]) != BaConfig(
        topology=Topology.ring(3), cells=[0, 0, 0], half=True
    )


def test_ring_window_wraps():
    eta = Ca184Config(topology=Topology.ring(4), cells=[1, 0, 0, 1])
    w = eta.window(3, 5)
    assert w.cells.tolist() == [1, 1, 0]
    assert w.topology == Topology.window(3, lo=3)


def test_open_window_bounds():
    eta = Ca184Config(topology=Topology.window(4, lo=2), cells=[1, 0, 0, 1])
    assert eta.window(3, 4).cells.tolist() == [0, 0]
    with pytest.raises(ValueError):
        eta.window(1, 3)


def test_checkerboards():
    ring = Topology.ring(6)
    assert Ca184Config.odd(ring).holes() == Ca184Config.even(ring)
    assert Ca184Config.odd(Topology.window(3, lo=1)).cells.tolist() == [1, 0, 1]


def test_trit_counts():
    zeta = BaConfig(topology=Topology.window(5, lo=-2), cells=[1, 0, -1, -1, 1])
    assert zeta.plus_positions.tolist() == [-2, 2]
    assert zeta.minus_positions.tolist() == [0, 1]
    assert zeta.charge == 0
    assert not zeta.is_empty and not zeta.is_positive and not zeta.is_negative
    assert zeta.negated().cells.tolist() == [-1, 0, 1, 1, -1]


def test_window_mirror():
    zeta = BaConfig(topology=Topology.window(3, lo=1), cells=[1, 0, -1])
    m = zeta.mirrored()
    assert m.topology == Topology.window(3, lo=-3)
    assert m.cells.tolist() == [-1, 0, 1]
    assert m.mirrored() == zeta


@given(rings())
def test_mirror_and_holes_are_involutions(eta):
    assert eta.mirrored().mirrored() == eta
    assert eta.holes().holes() == eta
    assert eta.holes().density == pytest.approx(1 - eta.density)


@given(rings())
def test_rule_commutes_with_conjugated_reflection(eta):
    flip = lambda c: c.holes().mirrored()  # noqa: E731
    assert ca184_step(flip(eta)) == flip(ca184_step(eta))


def test_half_lattice_positions():
    zeta = BaConfig(topology=Topology.window(2, lo=-1), cells=[1, -1], half=True)
    assert zeta.positions2.tolist() == [-1, 1]
    assert np.array_equal(zeta.positions, [-1, 0])
