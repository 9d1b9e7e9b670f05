import numpy as np
import pytest

from rule184.components import (
    BaConfig,
    Ca184Config,
    InitSpec,
    InvalidSpecError,
    Topology,
    sample_initial,
)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"kind": "bernoulli_ca"},
        {"kind": "bernoulli_ca", "p": 1.5},
        {"kind": "bernoulli_ba", "p_plus": 0.5, "p_minus": 0.5, "p_zero": 0.5},
        {"kind": "markov_ca", "matrix": [[0.5, 0.5]]},
        {"kind": "markov_ca", "matrix": [[0.5, 0.6], [0.5, 0.5]]},
        {"kind": "checkerboard"},
        {"kind": "explicit", "cells": [0, 1]},
        {"kind": "bernoulli_ca", "p": 0.5, "seed": -1},
    ],
)
def test_invalid_specs(kwargs):
    with pytest.raises(ValueError):
        InitSpec(**kwargs)


def test_same_triple_same_draw(fair_bits):
    ring = Topology.ring(64)
    assert sample_initial(fair_bits, ring, 3) == sample_initial(fair_bits, ring, 3)
    assert sample_initial(fair_bits, ring, 3) != sample_initial(fair_bits, ring, 4)


def test_models_follow_kind():
    ring = Topology.ring(10)
    assert isinstance(sample_initial(InitSpec(kind="bernoulli_ba_pm"), ring), BaConfig)
    assert isinstance(sample_initial(InitSpec(kind="bernoulli_ca", p=0.3), ring), Ca184Config)
    pm = sample_initial(InitSpec(kind="bernoulli_ba_pm"), ring)
    assert np.isin(pm.cells, [-1, 1]).all()


@pytest.mark.parametrize(
    "phase, lo, expected",
    [
        ("odd", 0, [0, 1, 0, 1]),
        ("even", 0, [1, 0, 1, 0]),
        ("odd", 1, [1, 0, 1, 0]),
    ],
)
def test_checkerboards(phase, lo, expected):
    spec = InitSpec(kind="checkerboard", phase=phase)
    assert sample_initial(spec, Topology.window(4, lo=lo)).cells.tolist() == expected


def test_mixed_checkerboard_draws_both_phases():
    spec = InitSpec(kind="checkerboard", phase="mixed")
    rows = spec.draw(np.random.default_rng(0), 200, 4)
    assert {tuple(r) for r in rows.tolist()} == {(0, 1, 0, 1), (1, 0, 1, 0)}


def test_empty_and_explicit():
    w = Topology.window(3, lo=-1)
    assert sample_initial(InitSpec(kind="empty"), w).is_empty
    spec = InitSpec(kind="explicit", cells=[1, 0, -1], model="ba")
    assert sample_initial(spec, w).cells.tolist() == [1, 0, -1]
    with pytest.raises(InvalidSpecError):
        sample_initial(spec, Topology.window(4))


def test_explicit_cells_are_validated():
    spec = InitSpec(kind="explicit", cells=[1, 0, -1], model="ca184")
    with pytest.raises(ValueError):
        sample_initial(spec, Topology.window(3))


def test_bernoulli_density():
    eta = sample_initial(InitSpec(kind="bernoulli_ca", p=0.3, seed=5), Topology.ring(10**5))
    assert eta.density == pytest.approx(0.3, abs=0.01)


def test_bernoulli_trits():
    spec = InitSpec(kind="bernoulli_ba", p_plus=0.2, p_minus=0.3, p_zero=0.5, seed=2)
    zeta = sample_initial(spec, Topology.ring(10**5))
    assert len(zeta.plus_positions) / zeta.size == pytest.approx(0.2, abs=0.01)
    assert len(zeta.minus_positions) / zeta.size == pytest.approx(0.3, abs=0.01)


def test_markov_stationary_density():
    spec = InitSpec(kind="markov_ca", matrix=[[0.8, 0.2], [0.4, 0.6]], seed=9)
    rows = spec.draw(np.random.default_rng(1), 20, 5000)
    assert rows.mean() == pytest.approx(1 / 3, abs=0.02)
    # P[1 -> 1] = 0.6
    pairs = rows[:, :-1] == 1
    assert rows[:, 1:][pairs].mean() == pytest.approx(0.6, abs=0.02)
