import math
from fractions import Fraction

import numpy as np
from pydantic import BaseModel, Field

from .. import __version__


class StatReport(BaseModel):
    """The output of every estimator.

    Field | Meaning
    --:|:--
    `estimator` | name of the statistic, e.g. `neighbor_same_velocity`
    `estimate` | point estimate
    `stderr` | sample standard deviation over the square root of `samples`
    `samples` | number of independent samples (> 0)
    `reference` | value predicted by theory, when one exists
    `exact` | the reference as an exact rational string, e.g. `2/3`
    `details` | estimator-specific extras (per-n points, KS statistics, ...)

    Examples:
        >>> r = StatReport.from_proportion("coin", hits=48, count=100, reference=0.5)
        >>> r.estimate, round(r.stderr, 4), r.within(3)
        (0.48, 0.0502, True)
    """

    estimator: str = Field(..., title="Estimator Name")
    estimate: float = Field(..., title="Point Estimate")
    stderr: float = Field(0.0, title="Standard Error", ge=0)
    samples: int = Field(..., title="Sample Count", gt=0)
    reference: float | None = Field(None, title="Reference Value")
    exact: str | None = Field(None, title="Exact Reference")
    details: dict = Field(default_factory=dict, title="Details")
    version: str = Field(__version__, title="Build Identifier")

    @classmethod
    def from_values(
        cls, estimator: str, values, reference: float | Fraction | None = None, **kwargs
    ) -> "StatReport":
        arr = np.asarray(values, dtype=float)
        n = len(arr)
        stderr = float(arr.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        return cls(
            estimator=estimator,
            estimate=float(arr.mean()),
            stderr=stderr,
            samples=n,
            **cls._reference(reference),
            **kwargs,
        )

    @classmethod
    def from_proportion(
        cls,
        estimator: str,
        hits: int,
        count: int,
        reference: float | Fraction | None = None,
        **kwargs,
    ) -> "StatReport":
        """Same as `from_values` over `count` indicators of which `hits` are 1."""
        p = hits / count
        var = p * (1 - p) * count / (count - 1) if count > 1 else 0.0
        return cls(
            estimator=estimator,
            estimate=p,
            stderr=math.sqrt(var / count),
            samples=count,
            **cls._reference(reference),
            **kwargs,
        )

    @staticmethod
    def _reference(reference) -> dict:
        if reference is None:
            return {}
        if isinstance(reference, Fraction):
            return {"reference": float(reference), "exact": str(reference)}
        return {"reference": float(reference)}

    @property
    def deviation(self) -> float | None:
        if self.reference is None:
            return None
        return self.estimate - self.reference

    def within(self, k: float = 3.0, atol: float = 1e-12) -> bool:
        """Whether the estimate is within `k` standard errors of the reference."""
        if self.reference is None:
            return True
        return abs(self.estimate - self.reference) <= k * self.stderr + atol

    def as_row(self) -> dict:
        return {
            "estimator": self.estimator,
            "estimate": repr(self.estimate),
            "stderr": repr(self.stderr),
            "samples": self.samples,
            "reference": "" if self.reference is None else repr(self.reference),
            "exact": self.exact or "",
            "version": self.version,
        }
