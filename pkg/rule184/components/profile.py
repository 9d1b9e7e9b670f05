import numpy as np
from pydantic import BaseModel, Field, validator

from .errors import SlopeError, TopologyError


class HeightProfile(BaseModel):
    """
    An integer lattice path: node `k` for `k` in `origin_abscissa ..
    origin_abscissa + len(steps)` has height

    `base_height + steps[0] + ... + steps[k - origin_abscissa - 1]`

    so `steps[j]` is the height difference across the edge ending at node
    `origin_abscissa + j + 1`. Slopes are restricted to `{-1, 0, +1}`, which is
    the class of surfaces the surface-growth rule and the sliding minimum keep
    invariant.

    Field | Meaning
    --:|:--
    `origin_abscissa` | abscissa of the first node
    `base_height` | height of the first node
    `steps` | per-edge increments, read-only `numpy.int8`

    Examples:
        >>> f = HeightProfile.from_heights(-1, [0, 1, 2, 1])
        >>> f.steps.tolist(), f.abscissas.tolist()
        ([1, 1, -1], [-1, 0, 1, 2])
        >>> f.height_at(1)
        2
    """

    origin_abscissa: int = Field(0, title="Origin Abscissa")
    base_height: int = Field(0, title="Base Height")
    steps: np.ndarray = Field(..., title="Per-edge Steps")

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False
        copy_on_model_validation = "none"

    @validator("steps", pre=True)
    def steps_are_slopes(cls, v):
        arr = np.array(v, dtype=np.int64)
        if arr.ndim != 1:
            raise ValueError("Steps must be one-dimensional.")
        if len(arr) and np.abs(arr).max() > 1:
            raise SlopeError("Profile slopes must lie in {-1, 0, +1}.")
        arr = arr.astype(np.int8)
        arr.setflags(write=False)
        return arr

    @classmethod
    def from_heights(cls, origin: int, heights) -> "HeightProfile":
        h = np.asarray(heights, dtype=np.int64)
        if h.ndim != 1 or not len(h):
            raise TopologyError("A profile needs at least one node.")
        steps = np.diff(h)
        if len(steps) and np.abs(steps).max() > 1:
            raise SlopeError(f"Heights {h.tolist()} jump by more than one.")
        return cls(origin_abscissa=origin, base_height=int(h[0]), steps=steps)

    def __eq__(self, other) -> bool:
        if not isinstance(other, HeightProfile):
            return NotImplemented
        return (
            self.origin_abscissa == other.origin_abscissa
            and self.base_height == other.base_height
            and np.array_equal(self.steps, other.steps)
        )

    def __hash__(self):
        return hash((self.origin_abscissa, self.base_height, self.steps.tobytes()))

    @property
    def heights(self) -> np.ndarray:
        out = np.empty(len(self.steps) + 1, dtype=np.int64)
        out[0] = self.base_height
        np.cumsum(self.steps, dtype=np.int64, out=out[1:])
        out[1:] += self.base_height
        return out

    @property
    def abscissas(self) -> np.ndarray:
        return np.arange(self.origin_abscissa, self.origin_abscissa + len(self.steps) + 1)

    @property
    def last_abscissa(self) -> int:
        return self.origin_abscissa + len(self.steps)

    def height_at(self, k: int) -> int:
        if not self.origin_abscissa <= k <= self.last_abscissa:
            raise TopologyError(f"Node {k} is outside the profile.")
        return int(self.heights[k - self.origin_abscissa])

    def shifted(self, c: int) -> "HeightProfile":
        """Raise every height by `c`."""
        return HeightProfile(
            origin_abscissa=self.origin_abscissa,
            base_height=self.base_height + c,
            steps=self.steps,
        )

    def anchored(self, at: int, value: int = 0) -> "HeightProfile":
        """Shift heights so that node `at` has height `value`."""
        return self.shifted(value - self.height_at(at))

    def restricted(self, lo: int, hi: int) -> "HeightProfile":
        """Sub-profile over nodes `lo..hi`."""
        if lo < self.origin_abscissa or hi > self.last_abscissa or lo > hi:
            raise TopologyError(f"Nodes {lo}..{hi} are outside the profile.")
        start = lo - self.origin_abscissa
        return HeightProfile(
            origin_abscissa=lo,
            base_height=int(self.heights[start]),
            steps=self.steps[start : start + hi - lo],
        )

    def to_csv(self) -> str:
        """Serialize as `k,height` lines under a header."""
        rows = ["k,height"]
        rows.extend(f"{k},{h}" for k, h in zip(self.abscissas, self.heights))
        return "\n".join(rows) + "\n"


def common_offset(f: HeightProfile, g: HeightProfile) -> int | None:
    """The constant `c` with `f = g + c` on the common node range, or `None`
    when the difference is not constant (or the ranges do not meet).

    Examples:
        >>> f = HeightProfile.from_heights(0, [0, 1, 1])
        >>> common_offset(f, f.shifted(-3))
        3
        >>> common_offset(f, HeightProfile.from_heights(0, [0, 0, 0])) is None
        True
    """
    lo = max(f.origin_abscissa, g.origin_abscissa)
    hi = min(f.last_abscissa, g.last_abscissa)
    if lo > hi:
        return None
    diff = f.restricted(lo, hi).heights - g.restricted(lo, hi).heights
    if (diff == diff[0]).all():
        return int(diff[0])
    return None
