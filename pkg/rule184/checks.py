import logging
import time
from collections.abc import Callable, Iterator
from concurrent.futures import ProcessPoolExecutor
from enum import Enum

from pydantic import BaseModel, Field, validator

from .components import ToleranceError

logger = logging.getLogger(__name__)


class Suite(str, Enum):
    """
    Suite | Contents
    --:|:--
    Exact | exhaustive or deterministic checks; any failure is a bug
    Stochastic | seeded Monte Carlo checks against a tolerance
    All | both, exact first
    """

    Exact = "exact"
    Stochastic = "stochastic"
    All = "all"


class CheckResult(BaseModel):
    name: str
    statement: str = ""
    suite: Suite
    passed: bool
    detail: str = ""
    seconds: float = Field(0.0, ge=0)

    class Config:
        use_enum_values = True

    def as_row(self) -> dict:
        return {
            "check": self.name,
            "statement": self.statement,
            "suite": self.suite,
            "passed": self.passed,
            "detail": self.detail,
            "seconds": f"{self.seconds:.3f}",
        }


class Check(BaseModel):
    """A named law and the function that verifies it.

    Field | Description | Example
    --:|:--|:--
    `name` | slug used on the command line | `matching-soundness`
    `claim` | the law, in one sentence | "bracket matching predicts every annihilation"
    `statement` | the named result the law comes from | "annihilation by bracket matching"
    `suite` | [`Suite`][rule184.checks.Suite] | `Suite.Exact`
    `runner` | callable returning a detail string, raising `ToleranceError` on failure | `check_matching_soundness`
    `params` | keyword arguments at acceptance size | `{"max_length": 10}`
    `quick` | overrides for a fast run | `{"max_length": 6}`
    """

    name: str = Field(..., regex=r"^[a-z0-9]+(-[a-z0-9]+)*$")
    claim: str
    statement: str = Field(..., min_length=1)
    suite: Suite
    runner: Callable[..., str]
    params: dict = Field(default_factory=dict)
    quick: dict = Field(default_factory=dict)

    class Config:
        use_enum_values = True

    @validator("quick")
    def quick_overrides_known_params(cls, v, values):
        if unknown := set(v) - set(values.get("params", {})):
            raise ValueError(f"Quick overrides for undeclared params: {sorted(unknown)}")
        return v

    def run(self, quick: bool = False) -> CheckResult:
        kwargs = self.params | (self.quick if quick else {})
        start = time.perf_counter()
        try:
            detail, passed = self.runner(**kwargs), True
        except ToleranceError as e:
            detail, passed = str(e), False
        seconds = time.perf_counter() - start
        logger.info("%s %s in %.2fs", self.name, "passed" if passed else "FAILED", seconds)
        return CheckResult(
            name=self.name,
            statement=self.statement,
            suite=self.suite,
            passed=passed,
            detail=detail,
            seconds=seconds,
        )


class CheckCollection(BaseModel):
    """Every registered check; suites are views selected by name."""

    collection: list[Check]

    @validator("collection")
    def names_are_unique(cls, v):
        names = [c.name for c in v]
        if len(names) != len(set(names)):
            raise ValueError("Check names must be unique.")
        return v

    def select(self, suite: Suite | str) -> Iterator[Check]:
        suite = Suite(suite)
        for wanted in (Suite.Exact, Suite.Stochastic):
            if suite in (wanted, Suite.All):
                yield from (c for c in self.collection if c.suite == wanted)

    def get(self, name: str) -> Check:
        for c in self.collection:
            if c.name == name:
                return c
        raise KeyError(name)

    def run(self, suite: Suite | str, quick: bool = False, threads: int = 1) -> list[CheckResult]:
        checks = list(self.select(suite))
        if threads <= 1:
            return [c.run(quick) for c in checks]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_run_registered, [c.name for c in checks], [quick] * len(checks)))


def _run_registered(name: str, quick: bool) -> CheckResult:
    from .recipes.suites import CHECKS

    return CHECKS.get(name).run(quick)
