from pydantic import BaseModel, Field, validator

from .lattice import BaConfig, Lattice, Model
from .topology import Topology


class SpaceTimeSheet(BaseModel):
    """Rows of an evolution at whole times `0..horizon`, plus for ballistic
    annihilation the optional half rows at times `t + 1/2`.

    Row `t` on an open window covers `topology.trimmed(t)`; the half row after it
    sits on the half lattice between the cells of row `t`.
    """

    model: Model = Field(..., title="Particle System")
    topology: Topology = Field(..., title="Topology of Row 0")
    rows: list[Lattice] = Field(..., title="Whole-time Rows")
    half_rows: list[BaConfig] | None = Field(
        None,
        title="Half-time Rows",
        description="half_rows[t] is the row at time t + 1/2.",
    )

    class Config:
        use_enum_values = True
        allow_mutation = False
        copy_on_model_validation = "none"

    @validator("rows")
    def rows_present(cls, v):
        if not v:
            raise ValueError("A sheet holds at least its initial row.")
        return v

    @property
    def horizon(self) -> int:
        return len(self.rows) - 1

    def row(self, t: int) -> Lattice:
        return self.rows[t]

    def at_tick(self, t2: int) -> Lattice:
        """Row at doubled time `t2`; odd values need half rows."""
        if t2 % 2 == 0:
            return self.rows[t2 // 2]
        if self.half_rows is None:
            raise ValueError("This sheet was evolved without half rows.")
        return self.half_rows[t2 // 2]

    @property
    def ticks(self) -> int:
        """Largest doubled time stored."""
        return 2 * self.horizon

    def shifted(self, k: int) -> "SpaceTimeSheet":
        """Forget the first `k` whole rows: row `t` of the result is row `t + k`."""
        return SpaceTimeSheet(
            model=self.model,
            topology=self.rows[k].topology,
            rows=self.rows[k:],
            half_rows=None if self.half_rows is None else self.half_rows[k:],
        )
