import logging
import math
from fractions import Fraction

import numpy as np
from pydantic import BaseModel, Field

from .components import (
    BaConfig,
    EnumerationTooLargeError,
    InitKind,
    InitSpec,
    InsufficientSamplesError,
    InvalidSpecError,
    Model,
    NoSurvivorsError,
    RingImbalanceError,
    StatReport,
    WindowTooShortError,
    chunked,
    stream,
)
from .dynamics import ba_step_array

logger = logging.getLogger(__name__)

ENUMERATION_LIMIT = 24
CHUNK = 1 << 18


class Pair(BaseModel):
    """A converging pair that annihilates. On rings `minus` is unwrapped, so it
    may exceed the ring size; `plus < minus` always."""

    plus: int = Field(..., title="Position of the +1")
    minus: int = Field(..., title="Position of the -1")

    class Config:
        frozen = True

    @property
    def distance(self) -> int:
        return self.minus - self.plus

    @property
    def time2(self) -> int:
        """Annihilation time in doubled units: the pair meets at time `d / 2`."""
        return self.distance

    def absent_by(self, t: int) -> bool:
        """Gone from the whole-time row `t`."""
        return self.distance <= 2 * t

    def annihilated_before(self, t: int) -> bool:
        """Met strictly before time `t`."""
        return self.distance <= 2 * t - 1


class MatchReport(BaseModel):
    pairs: list[Pair] = Field(default_factory=list)
    unmatched_plus: list[int] = Field(default_factory=list)
    unmatched_minus: list[int] = Field(default_factory=list)

    @property
    def times(self) -> dict[tuple[int, int], int]:
        return {(p.plus, p.minus): p.time2 for p in self.pairs}

    def partner_of(self, plus: int) -> int | None:
        return next((p.minus for p in self.pairs if p.plus == plus), None)

    def to_csv(self) -> str:
        rows = ["pos_plus,pos_minus,time2"]
        rows.extend(f"{p.plus},{p.minus},{p.time2}" for p in self.pairs)
        return "\n".join(rows) + "\n"


def _scan(positions: np.ndarray, signs: np.ndarray) -> MatchReport:
    stack: list[int] = []
    report = MatchReport()
    for x, s in zip(positions.tolist(), signs.tolist()):
        if s == 1:
            stack.append(x)
        elif stack:
            report.pairs.append(Pair(plus=stack.pop(), minus=x))
        else:
            report.unmatched_minus.append(x)
    report.unmatched_plus.extend(stack)
    report.pairs.sort(key=lambda p: p.plus)
    return report


def match_partners(zeta: BaConfig) -> MatchReport:
    """Pair every +1 with its annihilating companion.

    A +1 at `i` meets the first `j > i` where the sum of `ζ` over `(i, j]`
    reaches -1, which is bracket matching with +1 as the opening bracket. A pair
    at distance `d` annihilates at time `d / 2`.

    Examples:
        >>> from rule184.components import Topology
        >>> report = match_partners(BaConfig(topology=Topology.window(4), cells=[1, 1, -1, -1]))
        >>> [(p.plus, p.minus, p.time2) for p in report.pairs]
        [(0, 3, 3), (1, 2, 1)]
        >>> match_partners(BaConfig(topology=Topology.window(2), cells=[-1, 1])).unmatched_plus
        [1]

    Raises:
        RingImbalanceError: a ring with unequal species counts.
    """
    idx = np.flatnonzero(zeta.cells)
    signs = zeta.cells[idx]
    if not zeta.topology.is_ring:
        return _scan(zeta.positions[idx], signs)
    if zeta.charge:
        raise RingImbalanceError(
            f"A ring needs equal species counts to match, charge is {zeta.charge}."
        )
    if not len(idx):
        return MatchReport()
    # start right after the lowest prefix level so that every bracket closes
    start = int(np.argmin(np.cumsum(signs))) + 1
    order = np.roll(np.arange(len(idx)), -start)
    positions = idx[order].astype(np.int64)
    positions[positions < positions[0]] += zeta.size
    report = _scan(positions, signs[order])
    n = zeta.size
    pairs = [Pair(plus=p.plus % n, minus=p.plus % n + p.distance) for p in report.pairs]
    return MatchReport(pairs=sorted(pairs, key=lambda p: p.plus))


def literal_companion(zeta: BaConfig, i: int) -> int | None:
    """The closed-form companion `min{k >= i+2 : f(k) = 0} - 1` with `f(i) = 0`
    and `f(k) - f(k-1) = ζ(k)`, read literally. It disagrees with `match_partners`
    (e.g. on `+ - - + +` at `i = 0`) and is kept only for reporting.

    Examples:
        >>> from rule184.components import Topology
        >>> literal_companion(BaConfig(topology=Topology.window(5), cells=[1, -1, -1, 1, 1]), 0)
        3
    """
    start = i - zeta.topology.lo
    f = np.cumsum(zeta.cells[start + 1 :], dtype=np.int64)
    hits = np.flatnonzero(f[1:] == 0)
    if not len(hits):
        return None
    return i + int(hits[0]) + 2 - 1


def u2n_exact(n: int) -> Fraction:
    """Return probability of the simple symmetric random walk at time `2n`.

    Examples:
        >>> [str(u2n_exact(n)) for n in (1, 2, 3, 4)]
        ['1/2', '3/8', '5/16', '35/128']
    """
    if n < 1:
        raise InvalidSpecError(f"n must be positive, got {n}.")
    return Fraction(math.comb(2 * n, n), 4**n)


def draw_trits(spec: InitSpec, rng: np.random.Generator, rows: int, length: int) -> np.ndarray:
    """Trit rows from any sampler; CA rows go through `ζ = 1 - η(i) - η(i+1)`."""
    if spec.produces == Model.CA184:
        eta = spec.draw(rng, rows, length + 1)
        return (1 - eta[:, :-1] - eta[:, 1:]).astype(np.int8)
    return spec.draw(rng, rows, length)


def survival_probability(
    spec: InitSpec, n: int, samples: int, window: int | None = None, replica: int = 0
) -> StatReport:
    """Probability that a +1 at the origin is still present at whole time `n`.

    The +1 survives iff its companion is at distance `>= 2n`, i.e. the partial
    sums of `ζ(1..k)` stay above -1 for `k <= 2n - 1` (the same first-descent rule
    `match_partners` applies). Rows are conditioned on `ζ(0) = +1` by rejection.

    Args:
        spec (InitSpec): Sampler of trits, or of CA bits mapped through `ca_to_ba`.
        n (int): Whole time.
        samples (int): Number of accepted rows.
        window (int | None, optional): Row length, at least `2n`. Defaults to `2n`.
        replica (int, optional): Stream replica. Defaults to 0.

    Returns:
        StatReport: with reference `u_{2n}` for the fair +-1 sampler.
    """
    if n < 1:
        raise InvalidSpecError(f"n must be positive, got {n}.")
    window = 2 * n if window is None else window
    if window < 2 * n:
        raise WindowTooShortError(f"Survival to time {n} reads {2 * n} sites, got {window}.")
    rng = stream(spec.seed, replica, f"survival {n}")
    survived, accepted, attempts = 0, 0, 0
    while accepted < samples:
        rows = draw_trits(spec, rng, min(CHUNK, 2 * (samples - accepted) + 16), window)
        attempts += len(rows)
        rows = rows[rows[:, 0] == 1][: samples - accepted]
        if not len(rows):
            if attempts > 100 * samples:
                raise InsufficientSamplesError("The sampler never puts a +1 at the origin.")
            continue
        levels = np.cumsum(rows[:, 1 : 2 * n], axis=1, dtype=np.int64)
        survived += int((levels.min(axis=1) >= 0).sum())
        accepted += len(rows)
    reference = u2n_exact(n) if spec.kind == InitKind.BernoulliBaPM else None
    return StatReport.from_proportion("survival", survived, accepted, reference)


def _first_return_hits(eta: np.ndarray, n: int) -> tuple[int, int]:
    zeta = 1 - eta[:, :-1].astype(np.int64) - eta[:, 1:]
    conditioned = zeta[zeta[:, 1] == 1]
    f = np.cumsum(conditioned[:, 1 : 2 * n], axis=1)
    return int((f > 0).all(axis=1).sum()), len(conditioned)


def first_return_probability(
    n: int, mode: str = "exact_enumeration", samples: int = 10**5, seed: int = 0
) -> StatReport:
    """`P[f(k) > 0 for k = 1..2n-1 | f(1) > 0]` where `f(0) = 0` and
    `f(k) = ζ(1) + ... + ζ(k)` for `ζ` the image of fair Bernoulli bits.

    Examples:
        >>> first_return_probability(2).exact
        '3/4'

    Args:
        n (int): Horizon.
        mode (str, optional): `exact_enumeration` over all `2^(2n+1)` bit rows, or
            `monte_carlo`. Defaults to "exact_enumeration".
        samples (int, optional): Monte Carlo rows. Defaults to 10**5.
        seed (int, optional): Monte Carlo seed. Defaults to 0.
    """
    if n < 1:
        raise InvalidSpecError(f"n must be positive, got {n}.")
    bits = 2 * n + 1
    hits = count = 0
    if mode == "exact_enumeration":
        if bits > ENUMERATION_LIMIT:
            raise EnumerationTooLargeError(f"2^{bits} rows exceed the enumeration limit.")
        shifts = np.arange(bits, dtype=np.int64)
        for start, size in chunked(1 << bits, CHUNK):
            codes = np.arange(start, start + size, dtype=np.int64)
            eta = ((codes[:, None] >> shifts) & 1).astype(np.int8)
            h, c = _first_return_hits(eta, n)
            hits, count = hits + h, count + c
        value = Fraction(hits, count)
        return StatReport(
            estimator="first_return",
            estimate=float(value),
            samples=count,
            reference=float(value),
            exact=str(value),
        )
    if mode != "monte_carlo":
        raise InvalidSpecError(f"Unknown mode {mode!r}.")
    rng = stream(seed, 0, f"first return {n}")
    for _, size in chunked(samples, CHUNK):
        h, c = _first_return_hits(rng.integers(0, 2, (size, bits), dtype=np.int8), n)
        hits, count = hits + h, count + c
    if not count:
        raise InsufficientSamplesError("No row met the conditioning event.")
    return StatReport.from_proportion("first_return", hits, count)


def _fair_trits(rng: np.random.Generator, shape) -> np.ndarray:
    return (2 * rng.integers(0, 2, shape) - 1).astype(np.int8)


def _next_survivor(tail: np.ndarray, n: int, rng: np.random.Generator) -> int:
    """Sign of the first survivor to the right of a window whose last `2n`
    initial trits are `tail`. The row is continued with fresh fair trits, one
    block at a time, until a survivor shows up."""
    block = max(64, 8 * n)
    while True:
        row = np.concatenate([tail, _fair_trits(rng, block)])
        final = row[None, :]
        for _ in range(n):
            final = ba_step_array(final, ring=False)
        hits = np.flatnonzero(final[0])
        if len(hits):
            return int(final[0, hits[0]])
        tail = row[-2 * n :]


def neighbor_velocity_stats(
    n: int, samples: int, seed: int = 0, width: int | None = None
) -> StatReport:
    """Among consecutive surviving particles at time `n`, the frequency of equal
    velocities, starting from fair +-1 trits.

    Each sample evolves a row of `width + 2n` sites for `n` steps. A pair is
    indexed by its left survivor: every survivor inside the remaining `width`
    sites counts together with its right neighbour, and the row is extended past
    the window until the last survivor's neighbour is found. The standard error
    is the ratio-estimator error across samples.

    Returns:
        StatReport: reference `1 / (1 + u_{2n})`; `details` carries the opposite
            velocity frequency and its reference `u_{2n} / (1 + u_{2n})`.
    """
    if n < 1:
        raise InvalidSpecError(f"n must be positive, got {n}.")
    width = width or max(256, 32 * n)
    rng = stream(seed, 0, f"neighbors {n}")
    same = np.zeros(samples, dtype=np.int64)
    pairs = np.zeros(samples, dtype=np.int64)
    for start, size in chunked(samples, max(1, CHUNK // (width + 2 * n))):
        initial = _fair_trits(rng, (size, width + 2 * n))
        rows = initial
        for _ in range(n):
            rows = ba_step_array(rows, ring=False)
        for k, row in enumerate(rows):
            signs = row[row != 0]
            if not len(signs):
                continue
            after = _next_survivor(initial[k, width:], n, rng)
            same[start + k] = int((signs[1:] == signs[:-1]).sum()) + int(after == signs[-1])
            pairs[start + k] = len(signs)
    total = int(pairs.sum())
    if total == 0:
        raise NoSurvivorsError(f"No surviving neighbours at time {n}; widen the window.")
    ratio = same.sum() / total
    if samples > 1:
        resid = same - ratio * pairs
        stderr = math.sqrt((resid**2).sum() / (samples * (samples - 1))) / pairs.mean()
    else:
        stderr = 0.0
    u = u2n_exact(n)
    return StatReport(
        estimator="neighbor_same_velocity",
        estimate=float(ratio),
        stderr=float(stderr),
        samples=total,
        reference=float(1 / (1 + u)),
        exact=str(1 / (1 + u)),
        details={
            "opposite": float(1 - ratio),
            "opposite_reference": float(u / (1 + u)),
            "windows": samples,
        },
    )
