from enum import Enum

import numpy as np
from pydantic import BaseModel, Field, validator


class Clock(str, Enum):
    """
    Clock | One tick | `unit2` (doubled time and doubled position per tick)
    --:|:--|:--:
    HalfStep | time 1/2, displacement +-1/2 | 1
    WholeStep | time 1, displacement +-1 | 2
    """

    HalfStep = "HALF"
    WholeStep = "WHOLE"


class SecondClassPath(BaseModel):
    """The trajectory of a second-class particle stored in doubled coordinates.

    `steps` are in clock units: +-1 means half a site per half tick on the
    HalfStep clock and one site per tick on the WholeStep clock. The first
    `provisional` ticks precede the first annihilation of the tracked companion
    and depend on where the trace was attached.

    Examples:
        >>> p = SecondClassPath(clock="HALF", start_time2=0, start_pos2=2, steps=(-1, -1, 1, 1))
        >>> p.positions2.tolist(), p.times2.tolist()
        ([2, 1, 0, 1, 2], [0, 1, 2, 3, 4])
    """

    clock: Clock = Field(..., title="Clock")
    start_time2: int = Field(0, title="Start Time (doubled)")
    start_pos2: int = Field(0, title="Start Position (doubled)")
    steps: tuple[int, ...] = Field((), title="Displacement Per Tick")
    provisional: int = Field(
        0,
        title="Provisional Prefix",
        description="Number of leading ticks recorded before the first companion annihilation.",
        ge=0,
    )

    class Config:
        use_enum_values = True
        allow_mutation = False

    @validator("steps", pre=True)
    def steps_as_tuple(cls, v):
        return tuple(int(s) for s in v)

    def __hash__(self):
        return hash((type(self),) + tuple(self.__dict__.values()))

    @property
    def unit2(self) -> int:
        return 1 if self.clock == Clock.HalfStep else 2

    @property
    def ticks(self) -> int:
        return len(self.steps)

    @property
    def times2(self) -> np.ndarray:
        return self.start_time2 + self.unit2 * np.arange(self.ticks + 1)

    @property
    def positions2(self) -> np.ndarray:
        out = np.zeros(self.ticks + 1, dtype=np.int64)
        out[1:] = np.cumsum(self.steps)
        return self.start_pos2 + self.unit2 * out

    @property
    def end_time2(self) -> int:
        return self.start_time2 + self.unit2 * self.ticks

    @property
    def end_pos2(self) -> int:
        return int(self.positions2[-1])

    def runs(self) -> list[tuple[int, int]]:
        """Maximal constant-direction runs as `(direction, length)` pairs.

        Examples:
            >>> SecondClassPath(clock="HALF", steps=(-1, -1, 1, -1)).runs()
            [(-1, 2), (1, 1), (-1, 1)]
        """
        out: list[tuple[int, int]] = []
        for s in self.steps:
            if out and out[-1][0] == s:
                out[-1] = (s, out[-1][1] + 1)
            else:
                out.append((s, 1))
        return out

    def dropped(self, ticks: int) -> "SecondClassPath":
        """The same path observed from `ticks` later on."""
        return SecondClassPath(
            clock=self.clock,
            start_time2=int(self.times2[ticks]),
            start_pos2=int(self.positions2[ticks]),
            steps=self.steps[ticks:],
            provisional=max(self.provisional - ticks, 0),
        )

    def truncated(self, ticks: int) -> "SecondClassPath":
        return SecondClassPath(
            clock=self.clock,
            start_time2=self.start_time2,
            start_pos2=self.start_pos2,
            steps=self.steps[:ticks],
            provisional=min(self.provisional, ticks),
        )
