import pytest

from rule184.components import LightConeExhaustedError, Topology


@pytest.mark.parametrize(
    "kwargs",
    [
        {"kind": "RING", "extent": 2},
        {"kind": "RING", "extent": 6, "lo": 1},
        {"kind": "OPEN", "extent": 0},
    ],
)
def test_invalid_topologies(kwargs):
    with pytest.raises(ValueError):
        Topology(**kwargs)


def test_window_trimming():
    w = Topology.window(5, lo=-2)
    assert w.trimmed(2) == Topology.window(1, lo=0)
    assert w.trimmed(0) == w
    with pytest.raises(LightConeExhaustedError):
        w.trimmed(3)


def test_ring_is_never_trimmed():
    assert Topology.ring(4).trimmed(10) == Topology.ring(4)
    assert Topology.ring(4).shifted(3) == Topology.ring(4)


@pytest.mark.parametrize(
    "topology, text, positions",
    [
        (Topology.ring(3), "RING:3", [0, 1, 2]),
        (Topology.window(3, lo=-1), "OPEN:-1..1", [-1, 0, 1]),
        (Topology.window(2, lo=4), "OPEN:4..5", [4, 5]),
    ],
)
def test_text_and_positions(topology, text, positions):
    assert str(topology) == text
    assert topology.positions.tolist() == positions
