import logging

import numpy as np
from pydantic import BaseModel, Field

from .components import (
    BaConfig,
    Ca184Config,
    Clock,
    ConfigClassKind,
    HorizonExhaustedError,
    InvalidPathError,
    Lattice,
    Model,
    NotPhaseBoundaryError,
    SecondClassPath,
    SpaceTimeSheet,
    Topology,
    TopologyError,
    classify_config,
)
from .dynamics import evolve, light_cone_limit
from .transforms import ca_to_ba

logger = logging.getLogger(__name__)

TRACEABLE = (ConfigClassKind.SinglePhaseBoundary, ConfigClassKind.AllNegative)


class Violation(BaseModel):
    i: int
    j: int
    reason: str


class PathVerdict(BaseModel):
    valid: bool
    violations: list[Violation] = Field(default_factory=list)

    @classmethod
    def of(cls, violations: list[Violation]) -> "PathVerdict":
        return cls(valid=not violations, violations=violations)


class AnnihilationEvent(BaseModel):
    """A valley of the path: the companion met a +1 at doubled `(time2, pos2)`."""

    time2: int
    pos2: int


class Reconstruction(BaseModel):
    """The initial row as far as the path determines it.

    Cells outside `config` are unknown. `next_plus_at_most` bounds the next
    unseen +1 from the right (it sits at or left of that position) and
    `next_minus_at_least` bounds the next unseen -1 from the left.
    """

    config: BaConfig
    next_plus_at_most: int | None = None
    next_minus_at_least: int | None = None

    class Config:
        arbitrary_types_allowed = True


def _value(row: Lattice, x2: int) -> int | None:
    """Value at doubled position `x2`, `None` outside the row's valid range."""
    offset = x2 - int(row.positions2[0])
    if offset % 2:
        return 0
    i = offset // 2
    if 0 <= i < row.size:
        return int(row.cells[i])
    return None


def _trace(sheet: SpaceTimeSheet, init_pos: int | None, ticks: int | None, strict: bool):
    if sheet.model != Model.BA or sheet.half_rows is None:
        raise NotPhaseBoundaryError("Tracing needs a ballistic annihilation sheet with half rows.")
    if sheet.topology.is_ring:
        raise TopologyError("Tracing runs on open windows.")
    row0 = sheet.rows[0]
    found = classify_config(row0)
    if found.kind not in TRACEABLE:
        raise NotPhaseBoundaryError(f"Row 0 is {found.kind}, not a phase boundary.")
    leftmost = int(row0.minus_positions[0])
    if init_pos is not None and init_pos != leftmost:
        raise NotPhaseBoundaryError(
            f"The trace attaches to the leftmost -1 at {leftmost}, not {init_pos}."
        )
    limit = sheet.ticks if ticks is None else ticks
    if limit > sheet.ticks:
        raise HorizonExhaustedError(f"The sheet stores {sheet.ticks} ticks, {limit} requested.")
    p, attached = 2 * leftmost, True
    steps: list[int] = []
    events: list[AnnihilationEvent] = []
    for tau in range(limit):
        row = sheet.at_tick(tau + 1)
        ahead = p - 1 if attached else p + 1
        seen = _value(row, ahead)
        if seen is None:
            if strict:
                raise HorizonExhaustedError(
                    f"The path leaves the light cone at doubled time {tau + 1}."
                )
            break
        steps.append(ahead - p)
        p = ahead
        if attached and seen != -1:
            attached = False
            events.append(AnnihilationEvent(time2=tau + 1, pos2=p))
        elif not attached and seen == -1:
            attached = True
    provisional = events[0].time2 if events else len(steps)
    path = SecondClassPath(
        clock=Clock.HalfStep,
        start_time2=0,
        start_pos2=2 * leftmost,
        steps=tuple(steps),
        provisional=provisional,
    )
    return path, events


def trace_second_class(
    sheet: SpaceTimeSheet, init_pos: int | None = None, ticks: int | None = None
) -> SecondClassPath:
    """Follow a second-class particle across a phase boundary.

    The tracer starts on the leftmost -1 and moves with it (-1/2 per half tick).
    When that companion is annihilated the tracer stays at the annihilation
    point at that half time, then moves right (+1/2 per half tick) until it meets
    the next -1, which it rides in turn. Rightward stretches therefore measure
    gaps between subsequent negatives and leftward stretches (after the first)
    gaps between subsequent positives.

    Examples:
        >>> from rule184.components import Topology
        >>> zeta = BaConfig(topology=Topology.window(11, lo=-2), cells=[0, 0, 1, 0, -1, 0, 0, 0, -1, 0, 0])
        >>> path = trace_second_class(evolve(zeta, 3, half=True), ticks=4)
        >>> path.positions2.tolist()
        [4, 3, 2, 3, 4]

    Args:
        sheet (SpaceTimeSheet): Ballistic annihilation sheet with half rows on an
            open window; row 0 is a phase boundary or holds only negatives.
        init_pos (int | None, optional): Leftmost -1 of row 0, checked when given.
        ticks (int | None, optional): Half ticks to trace. Defaults to all stored.

    Raises:
        NotPhaseBoundaryError: row 0 is not traceable.
        HorizonExhaustedError: the path leaves the light cone before `ticks`.

    Returns:
        SecondClassPath: HalfStep path; ticks before the first annihilation are
            marked provisional.
    """
    path, _ = _trace(sheet, init_pos, ticks, strict=True)
    logger.debug("Traced %d ticks from doubled position %d", path.ticks, path.start_pos2)
    return path


def annihilation_events(sheet: SpaceTimeSheet, ticks: int | None = None) -> list[AnnihilationEvent]:
    return _trace(sheet, None, ticks, strict=True)[1]


def traceable_horizon(zeta: BaConfig) -> int:
    """Half ticks a trace from `zeta` can run before leaving the light cone."""
    steps = light_cone_limit(zeta)
    sheet = evolve(zeta, steps, half=True)
    path, _ = _trace(sheet, None, None, strict=False)
    return path.ticks


def padded(zeta: BaConfig, margin: int) -> BaConfig:
    """Extend an open window by `margin` empty sites on both sides."""
    pad = np.zeros(margin, dtype=np.int8)
    cells = np.concatenate((pad, zeta.cells, pad))
    topology = Topology.window(zeta.size + 2 * margin, lo=zeta.topology.lo - margin)
    return BaConfig.trusted(topology, cells)


def random_phase_boundary(rng: np.random.Generator, half: int) -> BaConfig:
    """A window of `2 * half` sites on `-half .. half - 1`: random +1s on the
    left half, random -1s (at least one) on the right half, densities drawn
    from `[0.1, 0.6)`."""
    left = rng.random(half) < rng.uniform(0.1, 0.6)
    right = rng.random(half) < rng.uniform(0.1, 0.6)
    right[rng.integers(0, half)] = True
    cells = np.concatenate((left.astype(np.int8), -right.astype(np.int8)))
    return BaConfig.trusted(Topology.window(2 * half, lo=-half), cells)


def reconstruct(path: SecondClassPath, horizon: int | None = None) -> Reconstruction:
    """Rebuild the initial row from a trace.

    With negatives `P1 < P2 < ...` right of the boundary and positives
    `Q1 > Q2 > ...` left of it, the path runs left `P1 - Q1`, right `P2 - P1`,
    left `Q1 - Q2`, right `P3 - P2`, and so on. A run cut by the horizon only
    bounds the next unseen particle, so the sites it sweeps are reported empty
    and the rest is left unknown.

    Args:
        path (SecondClassPath): Valid HalfStep path starting with a leftward run.
        horizon (int | None, optional): Ticks of the path to use. Defaults to all.

    Raises:
        InvalidPathError: the path fails `validate_ba_path` or starts rightward.
        HorizonExhaustedError: `horizon` exceeds the path.
    """
    verdict = validate_ba_path(path)
    if not verdict.valid:
        raise InvalidPathError(verdict.violations)
    if horizon is not None:
        if horizon > path.ticks:
            raise HorizonExhaustedError(f"The path has {path.ticks} ticks, {horizon} requested.")
        path = path.truncated(horizon)
    if path.start_pos2 % 2:
        raise InvalidPathError([Violation(i=0, j=0, reason="starts between sites")])
    runs = path.runs()
    if runs and runs[0][0] != -1:
        raise InvalidPathError([Violation(i=0, j=0, reason="starts rightward")])
    negatives = [path.start_pos2 // 2]
    positives: list[int] = []
    tau = 0
    for k, (direction, length) in enumerate(runs):
        tau += length
        if k == len(runs) - 1:
            break
        if direction == -1:
            # the companion met its +1 at doubled time P - Q
            positives.append(negatives[-1] - tau)
        else:
            # the tracer met the next -1 at doubled time P' - Q
            negatives.append(tau + positives[-1])
    plus_bound = minus_bound = None
    if not runs or runs[-1][0] == -1:
        lo, hi = negatives[-1] - tau + 1, negatives[-1]
        plus_bound = negatives[-1] - tau
    else:
        lo, hi = positives[-1], tau + positives[-1] - 1
        minus_bound = tau + positives[-1]
    cells = np.zeros(hi - lo + 1, dtype=np.int8)
    for x in positives:
        cells[x - lo] = 1
    for x in negatives:
        cells[x - lo] = -1
    config = BaConfig.trusted(Topology.window(len(cells), lo=lo), cells)
    return Reconstruction(
        config=config, next_plus_at_most=plus_bound, next_minus_at_least=minus_bound
    )


def path_to_config(path: SecondClassPath, horizon: int | None = None) -> BaConfig:
    """The determined part of the initial row; see `reconstruct`.

    Examples:
        >>> p = SecondClassPath(clock="HALF", start_pos2=4, steps=(-1, -1, 1, 1, 1, 1, -1))
        >>> path_to_config(p).cells.tolist()
        [1, 0, -1, 0, 0, 0, -1]
    """
    return reconstruct(path, horizon).config


def validate_ba_path(path: SecondClassPath) -> PathVerdict:
    """HalfStep paths move half a site per half tick and sit on whole sites at
    whole times (doubled position and doubled time share their parity).

    Examples:
        >>> validate_ba_path(SecondClassPath(clock="HALF", steps=(1, -1, 1))).valid
        True
        >>> validate_ba_path(SecondClassPath(clock="HALF", steps=(2, -1))).violations[0].reason
        'step magnitude'
    """
    violations: list[Violation] = []
    if path.clock != Clock.HalfStep:
        return PathVerdict.of([Violation(i=0, j=0, reason="not a half-step clock")])
    for i, s in enumerate(path.steps):
        if s not in (-1, 1):
            violations.append(Violation(i=i, j=i + 1, reason="step magnitude"))
    for i, (t2, p2) in enumerate(zip(path.times2.tolist(), path.positions2.tolist())):
        if (t2 - p2) % 2:
            violations.append(Violation(i=i, j=i, reason="parity"))
    return PathVerdict.of(violations)


def validate_ca_path(path: SecondClassPath) -> PathVerdict:
    """WholeStep paths move one site per tick, and no four consecutive
    differences alternate in sign (every maximal alternating run has length at
    most 3). A violation `(i, i + 2)` marks the alternating chain of differences
    `i .. i + 3`.

    Examples:
        >>> validate_ca_path(SecondClassPath(clock="WHOLE", steps=(1, -1, 1))).valid
        True
        >>> validate_ca_path(SecondClassPath(clock="WHOLE", steps=(1, -1, 1, -1))).violations
        [Violation(i=0, j=2, reason='alternating run longer than 3')]
    """
    if path.clock != Clock.WholeStep:
        return PathVerdict.of([Violation(i=0, j=0, reason="not a whole-step clock")])
    violations = [
        Violation(i=i, j=i + 1, reason="step magnitude")
        for i, s in enumerate(path.steps)
        if s not in (-1, 1)
    ]
    d = path.steps
    for i in range(len(d) - 3):
        if all(d[k] == -d[k + 1] != 0 for k in range(i, i + 3)):
            violations.append(Violation(i=i, j=i + 2, reason="alternating run longer than 3"))
    return PathVerdict.of(violations)


def ca_path(eta: Ca184Config, horizon: int) -> SecondClassPath:
    """Second-class path of a CA 184 window: the half-tick trace of
    `ca_to_ba(eta)` with each half tick read as one whole step."""
    zeta = ca_to_ba(eta)
    sheet = evolve(zeta, -(-horizon // 2), half=True)
    traced = trace_second_class(sheet, ticks=horizon)
    return SecondClassPath(
        clock=Clock.WholeStep,
        start_time2=0,
        start_pos2=traced.start_pos2,
        steps=traced.steps,
        provisional=traced.provisional,
    )
