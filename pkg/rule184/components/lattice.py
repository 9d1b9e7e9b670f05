from enum import Enum
from typing import ClassVar

import numpy as np
from pydantic import BaseModel, Field, root_validator, validator

from .errors import TopologyError
from .topology import Topology


class Model(str, Enum):
    """The two particle systems simulated; the `value` is the serialization prefix."""

    CA184 = "ca184"
    BA = "ba"


class Lattice(BaseModel):
    """Base of the immutable lattice configurations. Cells are held as a
    read-only `numpy.int8` array; evolution always builds a new object.

    Cell `i` sits at absolute position `topology.lo + i`. Pydantic models are not
    hashable by default, so `__hash__` and `__eq__` are implemented over the
    topology, the remaining fields and the cell bytes.
    """

    model: ClassVar[Model]
    alphabet: ClassVar[tuple[int, ...]]

    topology: Topology = Field(
        ...,
        title="Topology",
        description="Ring or open window that the cells fill.",
    )
    cells: np.ndarray = Field(
        ...,
        title="Cells",
        description="One value per site, drawn from the class alphabet.",
    )

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False
        copy_on_model_validation = "none"

    @validator("cells", pre=True)
    def cells_as_readonly_array(cls, v):
        arr = np.array(v, dtype=np.int8)
        if arr.ndim != 1:
            raise ValueError("Cells must be one-dimensional.")
        if not np.isin(arr, cls.alphabet).all():
            raise ValueError(f"Cells must be drawn from {cls.alphabet}.")
        arr.setflags(write=False)
        return arr

    @root_validator(skip_on_failure=True)
    def cells_fill_topology(cls, values):
        if len(values["cells"]) != values["topology"].extent:
            raise TopologyError(
                f"{len(values['cells'])} cells do not fill {values['topology']}."
            )
        return values

    @classmethod
    def trusted(cls, topology: Topology, cells: np.ndarray, **kwargs):
        """Skip validation for arrays produced by the library's own kernels."""
        arr = np.asarray(cells, dtype=np.int8)
        if arr.flags.writeable:
            arr = arr.copy()
            arr.setflags(write=False)
        return cls.construct(topology=topology, cells=arr, **kwargs)

    def __eq__(self, other) -> bool:
        if type(self) is not type(other):
            return NotImplemented
        return (
            self.topology == other.topology
            and self._extras() == other._extras()
            and np.array_equal(self.cells, other.cells)
        )

    def __hash__(self):
        extras = tuple(sorted(self._extras().items()))
        return hash((type(self), self.topology, extras, self.cells.tobytes()))

    def __str__(self) -> str:
        from .codec import serialize_config

        return serialize_config(self)

    def _extras(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if k not in ("topology", "cells")}

    @property
    def size(self) -> int:
        return self.topology.extent

    @property
    def positions(self) -> np.ndarray:
        return self.topology.positions

    def at(self, x: int) -> int:
        """Value at absolute position `x`; rings wrap."""
        if self.topology.is_ring:
            return int(self.cells[x % self.size])
        return int(self.cells[x - self.topology.lo])

    def with_cells(self, cells: np.ndarray, topology: Topology | None = None):
        return type(self).trusted(topology or self.topology, cells, **self._extras())

    def window(self, lo: int, hi: int):
        """Open sub-window over absolute positions `lo..hi`."""
        if self.topology.is_ring:
            idx = np.arange(lo, hi + 1) % self.size
            return self.with_cells(self.cells[idx], Topology.window(hi - lo + 1, lo))
        start = lo - self.topology.lo
        if start < 0 or hi > self.topology.hi:
            raise TopologyError(f"{lo}..{hi} is outside {self.topology}.")
        return self.with_cells(
            self.cells[start : start + hi - lo + 1], Topology.window(hi - lo + 1, lo)
        )


class Ca184Config(Lattice):
    """Binary occupancy `η`: 1 is a particle (a car), 0 a hole.

    Examples:
        >>> Ca184Config.odd(Topology.window(4)).cells.tolist()
        [0, 1, 0, 1]
        >>> Ca184Config.even(Topology.ring(4)).cells.tolist()
        [1, 0, 1, 0]
    """

    model: ClassVar[Model] = Model.CA184
    alphabet: ClassVar[tuple[int, ...]] = (0, 1)

    @classmethod
    def odd(cls, topology: Topology) -> "Ca184Config":
        """The checkerboard `o` with particles exactly on odd positions."""
        return cls.trusted(topology, topology.positions % 2 == 1)

    @classmethod
    def even(cls, topology: Topology) -> "Ca184Config":
        """The checkerboard `e` with particles exactly on even positions."""
        return cls.trusted(topology, topology.positions % 2 == 0)

    @property
    def particle_count(self) -> int:
        return int(self.cells.sum())

    @property
    def density(self) -> float:
        return self.particle_count / self.size

    def holes(self) -> "Ca184Config":
        """Swap particles and holes."""
        return self.with_cells(1 - self.cells)

    def mirrored(self) -> "Ca184Config":
        """Reflect `x -> -x`. The rule commutes with `holes().mirrored()`."""
        if self.topology.is_ring:
            return self.with_cells(np.roll(self.cells[::-1], 1))
        topology = Topology.window(self.size, lo=-self.topology.hi)
        return self.with_cells(self.cells[::-1], topology)


class BaConfig(Lattice):
    """Trit occupancy `ζ`: +1 moves right, -1 moves left, 0 is empty.

    With `half=True` the row lives on the half-integer lattice: cell `i` sits at
    `lo + i + 1/2`, i.e. doubled position `2 (lo + i) + 1`.
    """

    model: ClassVar[Model] = Model.BA
    alphabet: ClassVar[tuple[int, ...]] = (-1, 0, 1)

    half: bool = Field(
        False,
        title="Half Lattice",
        description="Whether the row sits at half-integer sites (odd doubled positions).",
    )

    @property
    def positions2(self) -> np.ndarray:
        return 2 * self.positions + (1 if self.half else 0)

    @property
    def plus_positions(self) -> np.ndarray:
        return self.positions[self.cells == 1]

    @property
    def minus_positions(self) -> np.ndarray:
        return self.positions[self.cells == -1]

    @property
    def is_empty(self) -> bool:
        return not self.cells.any()

    @property
    def is_positive(self) -> bool:
        return bool((self.cells >= 0).all() and self.cells.any())

    @property
    def is_negative(self) -> bool:
        return bool((self.cells <= 0).all() and self.cells.any())

    @property
    def charge(self) -> int:
        """(number of +1) - (number of -1), conserved on rings."""
        return int(self.cells.sum(dtype=np.int64))

    def negated(self) -> "BaConfig":
        return self.with_cells(-self.cells)

    def mirrored(self) -> "BaConfig":
        """Reflect `x -> -x`; velocities flip sign only when combined with `negated()`."""
        if self.topology.is_ring:
            cells = self.cells[::-1] if self.half else np.roll(self.cells[::-1], 1)
            return self.with_cells(cells)
        lo = -self.topology.hi - (1 if self.half else 0)
        return self.with_cells(self.cells[::-1], Topology.window(self.size, lo=lo))
