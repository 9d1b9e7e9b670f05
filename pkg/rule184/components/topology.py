from enum import Enum

import numpy as np
from pydantic import BaseModel, Field, root_validator

from .errors import LightConeExhaustedError, TopologyError


class TopologyKind(str, Enum):
    """
    Every configuration lives on one of two finite stand-ins for the integer
    lattice:

    Kind | `value` | Indexing | Per-step effect
    --:|:--:|:--|:--
    Ring | RING | periodic, positions `0..N-1` | none, the ring maps onto itself
    Open | OPEN | absolute abscissas `lo..hi` | valid range shrinks by one cell per side

    The Open window is exact: after trimming, every value left equals the value
    the same cell would have on the infinite lattice.
    """

    Ring = "RING"
    Open = "OPEN"


class Topology(BaseModel):
    """A boundary topology plus its extent.

    Examples:
        >>> Topology.window(5, lo=-2).hi
        2
        >>> Topology.window(5, lo=-2).trimmed(1)
        Topology(kind='OPEN', extent=3, lo=-1)
        >>> Topology.ring(6).trimmed(3) == Topology.ring(6)
        True
    """

    kind: TopologyKind = Field(
        ...,
        title="Topology Kind",
        description="Ring for periodic lattices, Open for light-cone trimmed windows.",
    )
    extent: int = Field(
        ...,
        title="Extent",
        description="Ring size or window length, i.e. the number of cells.",
    )
    lo: int = Field(
        0,
        title="Leftmost Abscissa",
        description="Absolute position of cell 0; always 0 on rings.",
    )

    class Config:
        use_enum_values = True
        frozen = True
        copy_on_model_validation = "none"

    @root_validator(skip_on_failure=True)
    def extent_fits_kind(cls, values):
        kind, extent = values["kind"], values["extent"]
        if kind == TopologyKind.Ring:
            if extent < 3:
                raise TopologyError(f"Ring size must be at least 3, got {extent}.")
            if values["lo"] != 0:
                raise TopologyError("Rings are indexed from 0.")
        elif extent < 1:
            raise TopologyError(f"Open windows need a cell, got {extent=}.")
        return values

    @classmethod
    def ring(cls, size: int) -> "Topology":
        return cls(kind=TopologyKind.Ring, extent=size)

    @classmethod
    def window(cls, length: int, lo: int = 0) -> "Topology":
        return cls(kind=TopologyKind.Open, extent=length, lo=lo)

    @property
    def is_ring(self) -> bool:
        return self.kind == TopologyKind.Ring

    @property
    def hi(self) -> int:
        return self.lo + self.extent - 1

    @property
    def positions(self) -> np.ndarray:
        return np.arange(self.lo, self.lo + self.extent)

    def trimmed(self, k: int = 1) -> "Topology":
        """Valid range after `k` steps of a radius-1 rule."""
        if self.is_ring or k == 0:
            return self
        if self.extent - 2 * k < 1:
            raise LightConeExhaustedError(
                f"A window of {self.extent} cells cannot be trimmed {k} times."
            )
        return Topology.window(self.extent - 2 * k, lo=self.lo + k)

    def shifted(self, c: int) -> "Topology":
        if self.is_ring:
            return self
        return Topology.window(self.extent, lo=self.lo + c)

    def __str__(self) -> str:
        if self.is_ring:
            return f"RING:{self.extent}"
        return f"OPEN:{self.lo}..{self.hi}"
