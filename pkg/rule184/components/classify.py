from enum import Enum

import numpy as np
from pydantic import BaseModel, Field

from .lattice import BaConfig


class ConfigClassKind(str, Enum):
    """
    Window analogues of the invariance classes of ballistic annihilation:

    Kind | Condition on the nonzero trits, read left to right (cyclically on rings)
    --:|:--
    Empty | none at all
    AllPositive | only +1
    AllNegative | only -1
    SinglePhaseBoundary | `+1 ... +1 -1 ... -1`, at least one of each
    Mixed | anything else

    A phase boundary on the lattice needs infinitely many particles of each sign;
    on a window this is relaxed to at least one of each, so claims proven for the
    infinite class are not implied by this label.
    """

    Empty = "empty"
    AllPositive = "all_positive"
    AllNegative = "all_negative"
    SinglePhaseBoundary = "single_phase_boundary"
    Mixed = "mixed"


class ConfigClass(BaseModel):
    kind: ConfigClassKind
    pos: int | None = Field(
        None,
        title="Rightmost Positive",
        description="Position of the last +1 before the boundary.",
    )
    neg: int | None = Field(
        None,
        title="Leftmost Negative",
        description="Position of the first -1 after the boundary.",
    )
    midgap2: int | None = Field(
        None,
        title="Doubled Midgap",
        description="(neg - pos) / 2 in doubled units, i.e. neg - pos.",
    )

    class Config:
        use_enum_values = True


def classify_config(zeta: BaConfig) -> ConfigClass:
    """Sort a trit window into its invariance class.

    Examples:
        >>> from rule184.components.topology import Topology
        >>> w = Topology.window(4)
        >>> classify_config(BaConfig(topology=w, cells=[1, 0, 0, -1]))
        ConfigClass(kind='single_phase_boundary', pos=0, neg=3, midgap2=3)
        >>> classify_config(BaConfig(topology=w, cells=[0, 0, 0, 0])).kind
        'empty'
        >>> classify_config(BaConfig(topology=w, cells=[-1, 1, 0, 0])).kind
        'mixed'

    Args:
        zeta (BaConfig): Window or ring. A ring is read from the first +1 after
            a -1, so rotating it only rotates `pos` and `neg`.

    Returns:
        ConfigClass: kind plus, for a phase boundary, `pos`, `neg` and `midgap2`.
    """
    nonzero = np.flatnonzero(zeta.cells)
    if not len(nonzero):
        return ConfigClass(kind=ConfigClassKind.Empty)
    signs = zeta.cells[nonzero]
    if (signs == 1).all():
        return ConfigClass(kind=ConfigClassKind.AllPositive)
    if (signs == -1).all():
        return ConfigClass(kind=ConfigClassKind.AllNegative)
    if zeta.topology.is_ring:
        start = int(np.argmax((np.roll(signs, 1) == -1) & (signs == 1)))
        nonzero, signs = np.roll(nonzero, -start), np.roll(signs, -start)
    # signs descend only once: a block of +1 then a block of -1
    if (np.diff(signs) <= 0).all():
        cut = int(np.argmax(signs == -1))
        pos = int(zeta.positions[nonzero[cut - 1]])
        neg = int(zeta.positions[nonzero[cut]])
        return ConfigClass(
            kind=ConfigClassKind.SinglePhaseBoundary,
            pos=pos,
            neg=neg,
            midgap2=(neg - pos) % zeta.size if zeta.topology.is_ring else neg - pos,
        )
    return ConfigClass(kind=ConfigClassKind.Mixed)
