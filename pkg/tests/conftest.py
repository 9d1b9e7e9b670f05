import pytest

from rule184 import BaConfig, Ca184Config, InitSpec, Topology


@pytest.fixture
def manifests(shared_datadir):
    return shared_datadir / "manifests"


@pytest.fixture
def ring_eta():
    return Ca184Config(topology=Topology.ring(8), cells=[1, 1, 0, 1, 0, 0, 0, 1])


@pytest.fixture
def phase_boundary():
    return BaConfig(
        topology=Topology.window(11, lo=-2),
        cells=[0, 0, 1, 0, -1, 0, 0, 0, -1, 0, 0],
    )


@pytest.fixture
def fair_bits():
    return InitSpec(kind="bernoulli_ca", p=0.5, seed=11)
