import logging

import numpy as np
from pydantic import BaseModel, Field

from .components import (
    BaConfig,
    Ca184Config,
    HeightProfile,
    InvalidSpecError,
    NotInLambdaError,
    RingParityError,
    Topology,
    WindowTooShortError,
)

logger = logging.getLogger(__name__)


class LambdaWitness(BaseModel):
    """Two subsequent particles whose distance has the wrong parity."""

    left: int = Field(..., title="Left Particle")
    right: int = Field(..., title="Right Particle", description="May exceed the ring size when the pair wraps.")
    same_velocity: bool
    reason: str

    @property
    def distance(self) -> int:
        return self.right - self.left


class LambdaVerdict(BaseModel):
    member: bool
    witness: LambdaWitness | None = None


def _require_even_ring(topology: Topology):
    if topology.is_ring and topology.extent % 2:
        raise RingParityError(
            f"Ring transforms need an even size, got {topology.extent}."
        )


def ca_to_ba(eta: Ca184Config) -> BaConfig:
    """`ζ(i) = 1 - η(i) - η(i+1)`: a pair of holes is a +1, a pair of particles a -1.

    Examples:
        >>> ca_to_ba(Ca184Config(topology=Topology.window(4), cells=[0, 0, 0, 0])).cells.tolist()
        [1, 1, 1]
        >>> ca_to_ba(Ca184Config.odd(Topology.ring(6))).is_empty
        True
    """
    _require_even_ring(eta.topology)
    c = eta.cells
    if eta.topology.is_ring:
        return BaConfig.trusted(eta.topology, 1 - c - np.roll(c, -1))
    if eta.size < 2:
        raise WindowTooShortError("A CA window needs two cells to form a bond.")
    topology = Topology.window(eta.size - 1, lo=eta.topology.lo)
    return BaConfig.trusted(topology, 1 - c[:-1] - c[1:])


def lambda_membership(zeta: BaConfig) -> LambdaVerdict:
    """Whether `ζ` is the image of some CA 184 configuration: subsequent
    particles of equal velocity sit at odd distance, of opposite velocity at even.

    Examples:
        >>> w = Topology.window(3)
        >>> lambda_membership(BaConfig(topology=w, cells=[1, 0, 1])).witness.reason
        'same velocity at even distance'
        >>> lambda_membership(BaConfig(topology=Topology.window(4), cells=[1, 0, 0, 1])).member
        True
    """
    if zeta.topology.is_ring and zeta.size % 2:
        return LambdaVerdict(
            member=False,
            witness=LambdaWitness(
                left=0, right=zeta.size, same_velocity=True, reason="ring of odd size"
            ),
        )
    idx = np.flatnonzero(zeta.cells)
    pos = zeta.positions[idx]
    signs = zeta.cells[idx]
    if zeta.topology.is_ring and len(idx):
        pos = np.append(pos, pos[0] + zeta.size)
        signs = np.append(signs, signs[0])
    gaps = np.diff(pos)
    same = signs[1:] == signs[:-1]
    bad = np.flatnonzero(same == (gaps % 2 == 0))
    if not len(bad):
        return LambdaVerdict(member=True)
    k = int(bad[0])
    witness = LambdaWitness(
        left=int(pos[k]),
        right=int(pos[k + 1]),
        same_velocity=bool(same[k]),
        reason=(
            "same velocity at even distance"
            if same[k]
            else "opposite velocities at odd distance"
        ),
    )
    return LambdaVerdict(member=False, witness=witness)


def ba_to_ca(zeta: BaConfig, anchor_bit: int = 0) -> Ca184Config:
    """Invert `ca_to_ba` on its image.

    Along the row `η(i) + η(i+1) = 1 - ζ(i)`, so one known cell fixes all of
    them: a +1 at `j` forces `η(j) = η(j+1) = 0` and a -1 forces both to 1.
    Only the empty row leaves a choice, resolved by `anchor_bit` at the leftmost
    cell (0 gives the checkerboard `o` on a window starting at an even abscissa).

    Examples:
        >>> ba_to_ca(BaConfig(topology=Topology.window(3), cells=[1, 1, 1])).cells.tolist()
        [0, 0, 0, 0]
        >>> ba_to_ca(BaConfig(topology=Topology.window(3), cells=[0, 0, 0]), anchor_bit=1).cells.tolist()
        [1, 0, 1, 0]

    Args:
        zeta (BaConfig): Whole-site row in the image set.
        anchor_bit (int, optional): Leftmost cell when `zeta` is empty. Defaults to 0.

    Raises:
        NotInLambdaError: no CA 184 configuration maps onto `zeta`.

    Returns:
        Ca184Config: Open windows gain one cell on the right; rings keep their size.
    """
    if anchor_bit not in (0, 1):
        raise InvalidSpecError(f"Anchor bit must be 0 or 1, got {anchor_bit}.")
    verdict = lambda_membership(zeta)
    if not verdict.member:
        raise NotInLambdaError(verdict.witness)
    z = zeta.cells.astype(np.int64)
    ring = zeta.topology.is_ring
    size = zeta.size if ring else zeta.size + 1
    # alternating sums a(k) = (-1)^k η(k) telescope the relation along the row
    sign = np.where(np.arange(len(z)) % 2, 1, -1)
    acc = np.concatenate(([0], np.cumsum(sign * (1 - z))))[:size]
    nz = np.flatnonzero(z)
    if len(nz):
        j = int(nz[0])
        eta_j = 0 if z[j] == 1 else 1
        a0 = (-1) ** j * eta_j - acc[j]
    else:
        a0 = anchor_bit
    eta = np.where(np.arange(size) % 2, -1, 1) * (a0 + acc)
    topology = zeta.topology if ring else Topology.window(size, lo=zeta.topology.lo)
    result = Ca184Config.trusted(topology, eta)
    if not np.isin(eta, (0, 1)).all() or ca_to_ba(result) != zeta:
        raise NotInLambdaError(verdict.witness)
    return result


def ba_counting_profile(zeta: BaConfig, base: int = 0) -> HeightProfile:
    """Profile with `height(k) - height(k-1) = ζ(k)`; its first node sits at
    `lo - 1` with height `base`.

    Examples:
        >>> ba_counting_profile(BaConfig(topology=Topology.window(3), cells=[1, 1, -1])).heights.tolist()
        [0, 1, 2, 1]
    """
    return HeightProfile(
        origin_abscissa=zeta.topology.lo - 1, base_height=base, steps=zeta.cells
    )


def ca_counting_profile(
    eta: Ca184Config, base: int = 0, centered: bool = False
) -> HeightProfile:
    """Profile with `height(k) - height(k-1) = -η(k)`, or `1 - 2η(k)` when
    `centered`. Only the centered profile stays within distance 1 of the
    counting profile of `ca_to_ba(eta)`; the plain one drifts by the hole count.

    Examples:
        >>> eta = Ca184Config(topology=Topology.window(3), cells=[1, 1, 0])
        >>> ca_counting_profile(eta).heights.tolist()
        [0, -1, -2, -2]
        >>> ca_counting_profile(eta, centered=True).heights.tolist()
        [0, -1, -2, -1]
    """
    steps = 1 - 2 * eta.cells if centered else -eta.cells
    return HeightProfile(
        origin_abscissa=eta.topology.lo - 1, base_height=base, steps=steps
    )


def counting_profile_gap(eta: Ca184Config) -> int:
    """Largest `|f - g|` between the BA counting profile of `ca_to_ba(eta)` and
    the centered CA counting profile, both anchored at 0 on their first node."""
    f = ba_counting_profile(ca_to_ba(eta)).heights
    g = ca_counting_profile(eta, centered=True).heights[: len(f)]
    return int(np.abs(f - g).max())
