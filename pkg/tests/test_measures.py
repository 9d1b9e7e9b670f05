import math

import pytest

from rule184.components import (
    BaConfig,
    BurnInTooShortError,
    Ca184Config,
    EnumerationTooLargeError,
    InitSpec,
    InvalidSpecError,
    Topology,
    TopologyError,
    WindowTooShortError,
)
from rule184.dynamics import evolve
from rule184.measures import (
    diverging_gaps,
    flux_curve,
    flux_estimate,
    invariance_audit,
    max_relaxation_time,
    ring_relaxation_time,
)


@pytest.mark.parametrize(
    "rho, expected",
    [(0.0, 0.0), (0.1, 0.1), (0.5, 0.5), (0.8, 0.2), (1.0, 0.0)],
)
def test_flux_curve(rho, expected):
    assert flux_curve(rho) == pytest.approx(expected)


@pytest.mark.parametrize("p", [0.2, 0.5, 0.7])
def test_relaxed_ring_flux(p):
    report = flux_estimate(InitSpec(kind="bernoulli_ca", p=p, seed=8), 1000, 500, 20)
    assert report.flux == pytest.approx(flux_curve(report.realized_density))
    assert report.jumps == report.hole_jumps > 0
    assert report.hole_flux == report.flux
    assert report.density == p
    assert report.stderr == pytest.approx(0.0, abs=1e-12)
    assert set(report.as_row()) == {"rho", "flux", "reference", "stderr", "hole_flux"}


@pytest.mark.slow
def test_jammed_ring_flux_at_full_size():
    report = flux_estimate(InitSpec(kind="bernoulli_ca", p=0.7, seed=0), 10**5, 50000, 200)
    assert report.within(0.01)
    assert report.jumps == report.hole_jumps
    assert report.hole_flux == report.flux


def test_flux_arguments():
    spec = InitSpec(kind="bernoulli_ca", p=0.4)
    with pytest.raises(BurnInTooShortError):
        flux_estimate(spec, 100, 49, 10)
    with pytest.raises(InvalidSpecError):
        flux_estimate(spec, 100, 50, 0)
    with pytest.raises(InvalidSpecError):
        flux_estimate(InitSpec(kind="bernoulli_ba_pm"), 100, 50, 10)


def test_flux_of_a_checkerboard():
    report = flux_estimate(InitSpec(kind="checkerboard", phase="odd"), 64, 32, 4)
    assert report.density == 0.5
    assert report.flux == 0.5


@pytest.mark.parametrize(
    "cells, expected",
    [
        ([1, 0, 1, 0, 1, 0], 0),
        ([1, 0, 0, 0, 0, 0], 0),
        ([1, 1, 1, 1, 1, 0], 0),
        ([1, 1, 0, 0, 0, 0], 1),
        ([1, 1, 1, 0, 0, 0], 2),
    ],
)
def test_ring_relaxation(cells, expected):
    assert ring_relaxation_time(Ca184Config(topology=Topology.ring(6), cells=cells)) == expected


def test_relaxation_needs_a_ring():
    with pytest.raises(TopologyError):
        ring_relaxation_time(Ca184Config.odd(Topology.window(6)))


@pytest.mark.parametrize("n", range(3, 13))
def test_rings_relax_within_half_their_size(n):
    assert max_relaxation_time(n) <= math.ceil(n / 2)


def test_relaxation_enumeration_limit():
    with pytest.raises(EnumerationTooLargeError):
        max_relaxation_time(25)


def test_bernoulli_bits_are_invariant():
    audit = invariance_audit(InitSpec(kind="bernoulli_ca", p=0.5, seed=6), 6, 4000, 3)
    assert audit.estimator == "invariance_tv"
    assert audit.within(3)


def test_annihilation_is_not_invariant():
    audit = invariance_audit(InitSpec(kind="bernoulli_ba_pm", seed=6), 4, 2000, 2)
    assert audit.estimate > 0.2


def test_audit_arguments():
    spec = InitSpec(kind="bernoulli_ca", p=0.5)
    with pytest.raises(WindowTooShortError):
        invariance_audit(spec, 1, 10, 0)
    with pytest.raises(EnumerationTooLargeError):
        invariance_audit(spec, 1, 10, 25)


def test_diverging_gaps():
    zeta = BaConfig(topology=Topology.window(9, lo=-4), cells=[0, 1, 0, -1, 1, 0, 0, -1, 0])
    assert diverging_gaps(evolve(zeta, 2)) == [1, None, None]
    ring = BaConfig(topology=Topology.ring(6), cells=[1, 0, 0, -1, 0, 0])
    assert diverging_gaps(evolve(ring, 0)) == [3]
    with pytest.raises(InvalidSpecError):
        diverging_gaps(evolve(Ca184Config.odd(Topology.ring(4)), 1))
