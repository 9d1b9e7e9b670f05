import numpy as np
import pytest

from rule184.components import BaConfig, Topology, classify_config


@pytest.mark.parametrize(
    "cells, lo, kind, pos, neg",
    [
        ([0, 0, 0], 0, "empty", None, None),
        ([1, 0, 1], 0, "all_positive", None, None),
        ([0, -1, -1], 0, "all_negative", None, None),
        ([1, 1, 0, -1, 0, -1], -3, "single_phase_boundary", -2, 0),
        ([0, 1, -1], 5, "single_phase_boundary", 6, 7),
        ([1, -1, 1], 0, "mixed", None, None),
        ([-1, 0, 1], 0, "mixed", None, None),
    ],
)
def test_classes(cells, lo, kind, pos, neg):
    cls = classify_config(BaConfig(topology=Topology.window(len(cells), lo=lo), cells=cells))
    assert cls.kind == kind
    assert (cls.pos, cls.neg) == (pos, neg)
    if pos is not None:
        assert cls.midgap2 == neg - pos


def test_phase_boundary_fixture(phase_boundary):
    cls = classify_config(phase_boundary)
    assert cls.kind == "single_phase_boundary"
    assert (cls.pos, cls.neg, cls.midgap2) == (0, 2, 2)


@pytest.mark.parametrize("r", range(7))
def test_ring_classes_follow_rotation(r):
    cells = np.roll([0, -1, -1, 0, 1, 1, 0], r)
    cls = classify_config(BaConfig(topology=Topology.ring(7), cells=cells.tolist()))
    assert cls.kind == "single_phase_boundary"
    assert (cls.pos, cls.neg, cls.midgap2) == ((5 + r) % 7, (1 + r) % 7, 3)


@pytest.mark.parametrize("r", range(4))
def test_ring_with_two_boundaries_is_mixed(r):
    cells = np.roll([1, -1, 1, -1], r)
    assert classify_config(BaConfig(topology=Topology.ring(4), cells=cells.tolist())).kind == "mixed"
