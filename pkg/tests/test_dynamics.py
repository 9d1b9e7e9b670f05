import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rule184.components import (
    BaConfig,
    Ca184Config,
    HeightProfile,
    InvalidSpecError,
    LightConeExhaustedError,
    Topology,
    TopologyError,
    WindowTooShortError,
)
from rule184.dynamics import (
    SurfaceRule,
    ba_complete_step,
    ba_half_step,
    ba_step,
    ca184_run_bitparallel,
    ca184_step,
    ca184_step_bitparallel,
    evolve,
    light_cone_limit,
    min_filter,
    min_filter_array,
    sg_step,
    sliding_min,
)

bits = st.lists(st.integers(0, 1), min_size=3, max_size=300)
trits = st.lists(st.integers(-1, 1), min_size=3, max_size=120)
slopes = st.lists(st.integers(-1, 1), min_size=2, max_size=80)


def _topology(size: int, ring: bool, lo: int) -> Topology:
    return Topology.ring(size) if ring else Topology.window(size, lo=lo)


@pytest.mark.parametrize(
    "triple, bit",
    [
        ((1, 1, 1), 1),
        ((1, 1, 0), 0),
        ((1, 0, 1), 1),
        ((1, 0, 0), 1),
        ((0, 1, 1), 1),
        ((0, 1, 0), 0),
        ((0, 0, 1), 0),
        ((0, 0, 0), 0),
    ],
)
def test_rule_table(triple, bit):
    eta = Ca184Config(topology=Topology.window(3, lo=-1), cells=list(triple))
    stepped = ca184_step(eta)
    assert stepped.topology == Topology.window(1, lo=0)
    assert stepped.cells.tolist() == [bit]
    assert ca184_step_bitparallel(eta) == stepped


@given(bits, st.booleans(), st.integers(-50, 50))
def test_kernels_agree(cells, ring, lo):
    eta = Ca184Config(topology=_topology(len(cells), ring, lo), cells=cells)
    assert ca184_step_bitparallel(eta) == ca184_step(eta)


@given(bits)
def test_ring_conserves_particles(cells):
    eta = Ca184Config(topology=Topology.ring(len(cells)), cells=cells)
    assert ca184_step(eta).particle_count == eta.particle_count


@given(st.lists(st.integers(0, 1), min_size=3, max_size=200))
def test_packed_run(cells):
    eta = Ca184Config(topology=Topology.ring(len(cells)), cells=cells)
    final, jumps = ca184_run_bitparallel(eta, 4)
    expected = eta
    for _ in range(4):
        expected = ca184_step(expected)
    assert final == expected
    movers = [(a, b) == (1, 0) for a, b in zip(cells, cells[1:] + cells[:1])]
    assert jumps[0] == sum(movers)


def test_packed_run_needs_a_ring():
    with pytest.raises(TopologyError):
        ca184_run_bitparallel(Ca184Config.odd(Topology.window(8)), 1)


def test_short_windows():
    with pytest.raises(WindowTooShortError):
        ca184_step(Ca184Config(topology=Topology.window(2), cells=[1, 0]))
    with pytest.raises(WindowTooShortError):
        ba_step(BaConfig(topology=Topology.window(2), cells=[1, 0]))


@pytest.mark.parametrize(
    "cells, expected",
    [
        ([0, 1, 0, 0, 0], [0, 1, 0]),
        ([0, 0, 0, -1, 0], [0, -1, 0]),
        ([0, 1, -1, 0, 0], [0, 0, 0]),
        ([0, 1, 0, -1, 0], [0, 0, 0]),
        ([1, 1, 0, -1, -1], [1, 0, -1]),
        ([-1, 0, 0, 0, 1], [0, 0, 0]),
    ],
)
def test_ba_whole_step(cells, expected):
    out = ba_step(BaConfig(topology=Topology.window(5), cells=cells))
    assert out.topology == Topology.window(3, lo=1)
    assert out.cells.tolist() == expected


@given(trits, st.booleans(), st.integers(-20, 20))
def test_two_half_steps_make_a_step(cells, ring, lo):
    zeta = BaConfig(topology=_topology(len(cells), ring, lo), cells=cells)
    half = ba_half_step(zeta)
    assert half.half
    assert ba_complete_step(half) == ba_step(zeta)


@given(trits)
def test_ring_conserves_charge(cells):
    zeta = BaConfig(topology=Topology.ring(len(cells)), cells=cells)
    stepped = ba_step(zeta)
    assert stepped.charge == zeta.charge
    assert len(stepped.plus_positions) <= len(zeta.plus_positions)


def test_half_lattice_is_checked():
    zeta = BaConfig(topology=Topology.window(4), cells=[1, 0, 0, -1])
    half = ba_half_step(zeta)
    with pytest.raises(TopologyError):
        ba_step(half)
    with pytest.raises(TopologyError):
        ba_half_step(half)
    with pytest.raises(TopologyError):
        ba_complete_step(zeta)


@given(slopes)
def test_deposit_is_min_filter_plus_one(steps):
    f = HeightProfile(origin_abscissa=-3, steps=steps)
    assert sg_step(f) == min_filter(f, 1).shifted(1)


@pytest.mark.parametrize(
    "heights, expected",
    [
        ([1, 0, 1], [2]),
        ([0, 1, 2], [1]),
        ([1, 1, 1], [1]),
        ([2, 1, 0, 1, 2], [1, 2, 1]),
    ],
)
def test_reflect(heights, expected):
    assert sg_step(HeightProfile.from_heights(0, heights), SurfaceRule.Reflect).heights.tolist() == expected


def test_surface_step_edge_cases():
    with pytest.raises(WindowTooShortError):
        sg_step(HeightProfile.from_heights(0, [0, 1]))
    with pytest.raises(InvalidSpecError):
        sg_step(HeightProfile.from_heights(0, [0, 1, 0]), "erode")


@given(st.lists(st.integers(-1, 1), min_size=6, max_size=80))
def test_min_filter_semigroup(steps):
    f = HeightProfile(steps=steps)
    assert min_filter(min_filter(f, 1), 2) == min_filter(f, 3)


@given(slopes, st.integers(0, 5))
def test_min_filter_kernels_agree(steps, y):
    f = HeightProfile(origin_abscissa=2, steps=steps)
    if len(f.heights) <= 2 * y:
        with pytest.raises(WindowTooShortError):
            min_filter(f, y)
        return
    assert min_filter_array(f.heights[None, :], y)[0].tolist() == min_filter(f, y).heights.tolist()


def test_min_filter_arguments():
    f = HeightProfile.from_heights(0, [0, 1, 0])
    assert min_filter(f, 0) is f
    with pytest.raises(InvalidSpecError):
        min_filter(f, -1)


@given(st.lists(st.integers(-100, 100), min_size=1, max_size=60), st.integers(1, 8))
def test_sliding_min(values, width):
    arr = np.array(values)
    if width > len(arr):
        return
    expected = [min(values[i : i + width]) for i in range(len(values) - width + 1)]
    assert sliding_min(arr, width).tolist() == expected


def test_light_cone():
    w = Ca184Config.odd(Topology.window(7))
    assert light_cone_limit(w) == 3
    assert light_cone_limit(Ca184Config.odd(Topology.ring(7))) is None
    sheet = evolve(w, 3)
    assert [r.topology for r in sheet.rows][-1] == Topology.window(1, lo=3)
    with pytest.raises(LightConeExhaustedError):
        evolve(w, 4)


def test_evolve_arguments(ring_eta):
    with pytest.raises(InvalidSpecError):
        evolve(ring_eta, 1, model="ba")
    with pytest.raises(InvalidSpecError):
        evolve(ring_eta, -1)
    assert evolve(ring_eta, 0).horizon == 0


def test_evolve_kernels_agree(ring_eta):
    fast = evolve(ring_eta, 6)
    slow = evolve(ring_eta, 6, bitparallel=False)
    assert fast.rows == slow.rows
    assert fast.half_rows is None
    assert fast.shifted(2).row(0) == fast.row(2)


def test_half_rows(phase_boundary):
    sheet = evolve(phase_boundary, 3, half=True)
    assert len(sheet.half_rows) == 3
    assert sheet.ticks == 6
    assert sheet.at_tick(4) == sheet.row(2)
    assert sheet.at_tick(3) == sheet.half_rows[1]
    assert sheet.at_tick(1).positions2.tolist()[0] == -3
    with pytest.raises(ValueError):
        evolve(phase_boundary, 1).at_tick(1)
