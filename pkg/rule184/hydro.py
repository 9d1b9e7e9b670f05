import logging
import math
from collections import defaultdict
from enum import Enum
from fractions import Fraction

import numpy as np
from pydantic import BaseModel, Field
from scipy import stats

from .annihilation import CHUNK, ENUMERATION_LIMIT, draw_trits
from .components import (
    Ca184Config,
    DegenerateFitError,
    EnumerationTooLargeError,
    HeightProfile,
    InitKind,
    InitSpec,
    InsufficientSamplesError,
    InvalidSpecError,
    Model,
    StatReport,
    WindowTooShortError,
    chunked,
    stream,
)
from .dynamics import min_filter_array

logger = logging.getLogger(__name__)

KS_BUDGET = 0.05
# two-sample Kolmogorov-Smirnov coefficient at level 0.001
KS_NOISE = 1.95


class SegmentKind(str, Enum):
    """
    Profile segments (runs of edges of a min-filtered profile):

    Kind | Run
    --:|:--
    Increasing | rising edges, flats between two rising runs included
    Decreasing | falling edges, flats between two falling runs included
    Plateau | flat edges after a rise and before a fall
    Valley | flat edges after a fall and before a rise
    Flat | flat edges touching the boundary, flank undetermined

    Pattern segments (runs of CA 184 cells):

    Kind | Cells
    --:|:--
    ParticleDominated | no adjacent holes inside, adjacent particles at both ends
    HoleDominated | no adjacent particles inside, adjacent holes at both ends
    Duce | alternating occupancy
    """

    Increasing = "increasing"
    Decreasing = "decreasing"
    Plateau = "plateau"
    Valley = "valley"
    Flat = "flat"
    ParticleDominated = "particle_dominated"
    HoleDominated = "hole_dominated"
    Duce = "duce"


FLATS = (SegmentKind.Plateau, SegmentKind.Valley, SegmentKind.Flat)
DOMINATED = (SegmentKind.ParticleDominated, SegmentKind.HoleDominated)


class Segment(BaseModel):
    kind: SegmentKind
    start: int = Field(..., title="Start", description="First node or cell.")
    length: int = Field(..., title="Length", description="Edges for profiles, cells for patterns.", ge=0)

    class Config:
        use_enum_values = True


class SegmentReport(BaseModel):
    segments: list[Segment] = Field(default_factory=list)

    def kinds(self) -> list[str]:
        return [s.kind for s in self.segments]

    def mean_lengths(self) -> dict[str, float]:
        lengths: dict[str, list[int]] = defaultdict(list)
        for s in self.segments:
            lengths[s.kind].append(s.length)
        return {k: sum(v) / len(v) for k, v in lengths.items()}

    @property
    def order_ok(self) -> bool:
        """No two flats in a row for profiles; for patterns, a Duce stretch
        between every particle-dominated and hole-dominated segment."""
        kinds = self.kinds()
        for a, b in zip(kinds, kinds[1:]):
            if a == b:
                return False
            if a in FLATS and b in FLATS:
                return False
            if a in DOMINATED and b in DOMINATED:
                return False
        return True

    def shifted(self, c: int) -> "SegmentReport":
        return SegmentReport(
            segments=[Segment(kind=s.kind, start=s.start + c, length=s.length) for s in self.segments]
        )


def _runs(values: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Starts, lengths and values of the maximal constant runs of a 1-D array."""
    if not len(values):
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, empty
    starts = np.concatenate(([0], np.flatnonzero(np.diff(values)) + 1))
    lengths = np.diff(np.append(starts, len(values)))
    return starts, lengths, values[starts]


def _flat_kinds(dirs: np.ndarray) -> list[str | None]:
    """Classify each run by its direction and, for flats, by its flanks; a flat
    between two runs of the same direction gets that direction's kind."""
    kinds: list[str | None] = []
    last = len(dirs) - 1
    for i, d in enumerate(dirs.tolist()):
        if d == 1:
            kinds.append(SegmentKind.Increasing)
        elif d == -1:
            kinds.append(SegmentKind.Decreasing)
        elif i == 0 or i == last:
            kinds.append(SegmentKind.Flat)
        else:
            match (int(dirs[i - 1]), int(dirs[i + 1])):
                case (1, -1):
                    kinds.append(SegmentKind.Plateau)
                case (-1, 1):
                    kinds.append(SegmentKind.Valley)
                case (1, 1):
                    kinds.append(SegmentKind.Increasing)
                case _:
                    kinds.append(SegmentKind.Decreasing)
    return kinds


def _merged(segments: list[Segment]) -> list[Segment]:
    out: list[Segment] = []
    for s in segments:
        if out and out[-1].kind == s.kind:
            prev = out.pop()
            s = Segment(kind=s.kind, start=prev.start, length=prev.length + s.length)
        out.append(s)
    return out


def segment_profile(g: HeightProfile) -> SegmentReport:
    """Split a profile into maximal monotone and flat stretches.

    Examples:
        >>> w = segment_profile(HeightProfile.from_heights(0, [2, 1, 1, 2, 3, 3, 2]))
        >>> [(s.kind, s.start, s.length) for s in w.segments]
        [('decreasing', 0, 1), ('valley', 1, 1), ('increasing', 2, 2), ('plateau', 4, 1), ('decreasing', 5, 1)]
        >>> segment_profile(HeightProfile.from_heights(0, [0, 1, 1, 2])).kinds()
        ['increasing']
        >>> segment_profile(HeightProfile.from_heights(3, [5, 5, 5])).kinds()
        ['flat']
    """
    starts, lengths, dirs = _runs(g.steps.astype(np.int64))
    kinds = _flat_kinds(dirs)
    origin = g.origin_abscissa
    segments = [
        Segment(kind=k, start=origin + int(s), length=int(n))
        for k, s, n in zip(kinds, starts, lengths)
    ]
    return SegmentReport(segments=_merged(segments))


def segment_pattern(eta: Ca184Config) -> SegmentReport:
    """Split a CA 184 row into dominated and duce stretches.

    A bond `(i, i+1)` holding two particles is a -1 trit, two holes a +1 trit.
    Maximal groups of same-sign trits, zero trits between them allowed, cover
    the cells from their first bond to their last bond plus one: particle
    dominated for -1, hole dominated for +1. Every cell left over alternates and
    belongs to a Duce segment. Rings are read as the window starting at 0.

    Examples:
        >>> from rule184.components import Topology
        >>> segment_pattern(Ca184Config(topology=Topology.window(5), cells=[1, 0, 1, 0, 1])).kinds()
        ['duce']
        >>> segment_pattern(Ca184Config(topology=Topology.window(5), cells=[1, 1, 0, 1, 1])).kinds()
        ['particle_dominated']
        >>> r = segment_pattern(Ca184Config(topology=Topology.window(8), cells=[1, 1, 0, 1, 0, 1, 0, 0]))
        >>> [(s.kind, s.start, s.length) for s in r.segments]
        [('particle_dominated', 0, 2), ('duce', 2, 4), ('hole_dominated', 6, 2)]
    """
    c = eta.cells.astype(np.int8)
    trits = 1 - c[:-1] - c[1:]
    lo, size = eta.topology.lo, eta.size
    bonds = np.flatnonzero(trits)
    segments: list[Segment] = []
    cursor = 0

    def duce_until(end: int):
        if end > cursor:
            segments.append(Segment(kind=SegmentKind.Duce, start=lo + cursor, length=end - cursor))

    if len(bonds):
        signs = trits[bonds]
        group_starts, _, group_signs = _runs(signs)
        group_ends = np.append(group_starts[1:], len(bonds)) - 1
        for gs, ge, sign in zip(group_starts.tolist(), group_ends.tolist(), group_signs.tolist()):
            first, last = int(bonds[gs]), int(bonds[ge]) + 1
            duce_until(first)
            kind = SegmentKind.ParticleDominated if sign == -1 else SegmentKind.HoleDominated
            segments.append(Segment(kind=kind, start=lo + first, length=last - first + 1))
            cursor = last + 1
    duce_until(size)
    return SegmentReport(segments=segments)


def plateau_cdf(x: float | np.ndarray):
    """Limit law of rescaled plateau lengths, `2 sqrt(x) / (1 + x)` on `[0, 1]`.

    Examples:
        >>> float(plateau_cdf(1.0)), float(plateau_cdf(0.25))
        (1.0, 0.8)
    """
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    return 2 * np.sqrt(x) / (1 + x)


class Walk(str, Enum):
    """
    Walk | Increments | Plateaus of `M_n`
    --:|:--|:--
    Gaussian | i.i.d. standard normal | flats are exactly the stretches with one argmin
    Lattice | i.i.d. fair +-1 | ties inside a unit height band merge into the top flat
    """

    Gaussian = "gaussian"
    Lattice = "lattice"


def _walk_heights(rng: np.random.Generator, rows: int, nodes: int, walk: Walk) -> np.ndarray:
    match walk:
        case Walk.Gaussian:
            steps = rng.standard_normal((rows, nodes - 1))
            heights = np.zeros((rows, nodes), dtype=float)
        case Walk.Lattice:
            steps = 2 * rng.integers(0, 2, (rows, nodes - 1), dtype=np.int8) - 1
            heights = np.zeros((rows, nodes), dtype=np.int64)
        case _:
            raise InvalidSpecError(f"Unknown walk {walk}.")
    np.cumsum(steps, axis=1, out=heights[:, 1:])
    return heights


def _flat_lengths(g: np.ndarray) -> tuple[list[int], list[int]]:
    """Plateau and valley lengths, in steps, of every flanked flat in each row.
    A peak with no flat step between its rise and its fall is a plateau of length 0."""
    plateaus: list[int] = []
    valleys: list[int] = []
    for row in g:
        _, lengths, dirs = _runs(np.sign(np.diff(row)))
        if len(dirs) < 2:
            continue
        inner = np.arange(1, len(dirs) - 1)
        flat = dirs[inner] == 0
        before, after = dirs[inner - 1], dirs[inner + 1]
        plateaus.extend(lengths[inner][flat & (before == 1) & (after == -1)].tolist())
        valleys.extend(lengths[inner][flat & (before == -1) & (after == 1)].tolist())
        peaks = (dirs[:-1] == 1) & (dirs[1:] == -1)
        plateaus.extend([0] * int(peaks.sum()))
    return plateaus, valleys


def plateau_cdf_experiment(
    n: int,
    samples: int,
    seed: int = 0,
    width: int | None = None,
    walk: Walk | str = Walk.Gaussian,
) -> StatReport:
    """Rescaled plateau lengths of `min_filter(f0, n)` for a random walk `f0`.

    Lengths are counted in steps and divided by the window width `2n`, so a
    valley of the Gaussian walk has length exactly 1 and no plateau exceeds it.
    Only plateaus flanked on both sides inside the sampled window are counted.
    The estimate is the Kolmogorov-Smirnov distance to `2 sqrt(x) / (1 + x)`;
    its `reference` is the budget 0.05, and `details` carries the valley lengths.

    On the +-1 lattice walk every plateau also absorbs the tied minima of its
    unit height band, about `sqrt(n)` extra steps, so its distance decays only
    like `n^(-1/2)`.

    Args:
        n (int): Window radius.
        samples (int): Number of sampled walks.
        seed (int, optional): Stream seed. Defaults to 0.
        width (int | None, optional): Filtered nodes per walk. Defaults to `16n`.
        walk (Walk | str, optional): Increment law. Defaults to `Walk.Gaussian`.

    Raises:
        InsufficientSamplesError: no plateau was found.
    """
    if n < 1:
        raise InvalidSpecError(f"Window radius must be positive, got {n}.")
    walk = Walk(walk)
    width = width or 16 * n
    nodes = width + 2 * n
    rng = stream(seed, 0, f"plateau {n} {walk.value}")
    plateaus: list[int] = []
    valleys: list[int] = []
    for _, size in chunked(samples, max(1, CHUNK // nodes)):
        g = min_filter_array(_walk_heights(rng, size, nodes, walk), n)
        p, v = _flat_lengths(g)
        plateaus += p
        valleys += v
    if not plateaus:
        raise InsufficientSamplesError(f"No plateau in {samples} windows; widen them.")
    x = np.asarray(plateaus, dtype=float) / (2 * n)
    valley_x = np.asarray(valleys, dtype=float) / (2 * n)
    ks = stats.kstest(x, plateau_cdf)
    logger.info("Plateau KS distance %.4f over %d plateaus (n=%d, %s)", ks.statistic, len(x), n, walk.value)
    return StatReport(
        estimator="plateau_ks",
        estimate=float(ks.statistic),
        samples=len(x),
        reference=KS_BUDGET,
        details={
            "n": n,
            "walk": walk.value,
            "pvalue": float(ks.pvalue),
            "mean_plateau": float(x.mean()),
            "max_plateau": float(x.max()),
            "valleys": len(valley_x),
            "mean_valley": float(valley_x.mean()) if len(valley_x) else None,
            "valley_lengths": valley_x.tolist()[:1000],
        },
    )


def _profiles(spec: InitSpec, rng: np.random.Generator, rows: int, nodes: int):
    """BA counting profiles and, for CA samplers, centered CA profiles on the
    same nodes (`None` otherwise), both 0 on their first node."""
    trits = draw_trits(spec, rng, rows, nodes - 1) if spec.produces == Model.BA else None
    centered = None
    if spec.produces == Model.CA184:
        eta = spec.draw(rng, rows, nodes)
        trits = 1 - eta[:, :-1] - eta[:, 1:]
        centered = np.zeros((rows, nodes), dtype=np.int64)
        np.cumsum(1 - 2 * eta[:, :-1].astype(np.int64), axis=1, out=centered[:, 1:])
    f = np.zeros((rows, nodes), dtype=np.int64)
    np.cumsum(trits, axis=1, out=f[:, 1:])
    return f, centered


def ks_shrinks(ks: list[float], samples: int) -> bool:
    """Whether consecutive two-sample distances never grow by more than their
    noise margin `1.95 sqrt(2 / samples)`.

    Examples:
        >>> ks_shrinks([0.3, 0.1, 0.05], 1000)
        True
        >>> ks_shrinks([0.1, 0.3], 1000)
        False
    """
    margin = KS_NOISE * math.sqrt(2 / samples)
    return all(b <= a + margin for a, b in zip(ks, ks[1:]))


def rescaling_experiment(
    spec: InitSpec,
    n_list: list[int],
    abscissas: tuple[float, ...] = (-1.0, -0.5, 0.0, 0.5, 1.0),
    samples: int = 1000,
    scale=None,
) -> StatReport:
    """Cauchy-style convergence check of `c_n (g_n(n x) - g_n(0))` with
    `g_n = min_filter(f0, n)`.

    For each consecutive pair of `n` values and each abscissa the two-sample
    Kolmogorov-Smirnov distance is computed; the estimate is the largest
    distance between the last two `n`, and `details["ks_shrinks"]` says
    whether the distances shrink as `n` grows, up to sampling noise. CA
    samplers additionally run the centered CA profile through the same filter
    and report its largest gap to the BA profile, which stays at most 1 before
    rescaling.

    Args:
        spec (InitSpec): Sampler of the initial row.
        n_list (list[int]): At least two radii.
        abscissas (tuple[float, ...], optional): Rescaled points `x`.
        samples (int, optional): Profiles per `n`. Defaults to 1000.
        scale (Callable[[int], float] | None, optional): The null sequence `c_n`.
            Defaults to `n ** -0.5`.
    """
    if len(n_list) < 2:
        raise InvalidSpecError("A convergence check needs at least two values of n.")
    scale = scale or (lambda n: n**-0.5)
    reach = max(abs(p) for p in abscissas)
    values: dict[int, np.ndarray] = {}
    points: list[dict] = []
    for n in sorted(n_list):
        if n < 1:
            raise InvalidSpecError(f"Radii must be positive, got {n}.")
        half = math.ceil(n * reach)
        nodes = 2 * (half + n) + 1
        idx = [half + round(n * p) for p in abscissas]
        rng = stream(spec.seed, 0, f"rescale {n}")
        rows, gap = [], 0
        for _, size in chunked(samples, max(1, CHUNK // nodes)):
            f, centered = _profiles(spec, rng, size, nodes)
            g = min_filter_array(f, n)
            rows.append(g[:, idx] - g[:, [half]])
            if centered is not None:
                gap = max(gap, int(np.abs(g - min_filter_array(centered, n)).max()))
        values[n] = scale(n) * np.concatenate(rows).astype(float)
        points.append({"n": n, "ca_gap": gap, "ca_gap_rescaled": gap * scale(n)})
    ordered = sorted(values)
    ks = []
    for a, b in zip(ordered, ordered[1:]):
        ks.append(
            max(
                float(stats.ks_2samp(values[a][:, j], values[b][:, j]).statistic)
                for j, p in enumerate(abscissas)
                if p != 0
            )
        )
    return StatReport(
        estimator="rescaling_ks",
        estimate=ks[-1],
        samples=samples,
        details={
            "n": ordered,
            "ks": ks,
            "ks_shrinks": ks_shrinks(ks, samples),
            "points": points,
            "bound_ok": all(p["ca_gap"] <= 1 for p in points),
            "abscissa_means": {str(n): values[n].mean(axis=0).tolist() for n in ordered},
        },
    )


def _adjacent_nonzero(eta: np.ndarray, n: int) -> np.ndarray:
    """Rows of CA bits on `-n .. n + k` whose time-`n` trits on bonds `0 .. k-1`
    are not all zero, read off `M_n` of the counting profile."""
    trits = 1 - eta[:, :-1].astype(np.int64) - eta[:, 1:]
    return _nonzero_after(trits, n)


def _nonzero_after(trits: np.ndarray, n: int) -> np.ndarray:
    f = np.zeros((len(trits), trits.shape[1] + 1), dtype=np.int64)
    np.cumsum(trits, axis=1, out=f[:, 1:])
    g = min_filter_array(f, n)
    return (np.diff(g, axis=1) != 0).any(axis=1)


def adjacent_equal_probability(
    spec: InitSpec,
    n: int,
    samples: int = 10**5,
    k: int = 1,
    mode: str = "monte_carlo",
    replica: int = 0,
) -> StatReport:
    """`d_n`: probability that the time-`n` row holds an adjacent equal pair
    among the bonds `0 .. k-1`, i.e. that some trit there is nonzero.

    Examples:
        >>> spec = InitSpec(kind="bernoulli_ca", p=0.5)
        >>> adjacent_equal_probability(spec, 0, mode="exact_enumeration").exact
        '1/2'
        >>> adjacent_equal_probability(InitSpec(kind="checkerboard", phase="odd"), 3, samples=16).estimate
        0.0

    Args:
        spec (InitSpec): Initial sampler; CA rows map through `ca_to_ba`.
        n (int): Time.
        samples (int, optional): Monte Carlo rows. Defaults to 10**5.
        k (int, optional): Bonds in the cylinder. Defaults to 1.
        mode (str, optional): `monte_carlo`, or `exact_enumeration` over all bit
            rows of a Bernoulli CA sampler. Defaults to "monte_carlo".
    """
    if k < 1:
        raise WindowTooShortError(f"A cylinder holds at least one bond, got {k}.")
    bits = 2 * n + k + 1
    if mode == "exact_enumeration":
        if spec.kind != InitKind.BernoulliCa:
            raise InvalidSpecError("Exact enumeration weighs Bernoulli CA rows.")
        if bits > ENUMERATION_LIMIT:
            raise EnumerationTooLargeError(f"2^{bits} rows exceed the enumeration limit.")
        p = Fraction(spec.p).limit_denominator(1 << 20)
        by_ones = [Fraction(0)] * (bits + 1)
        shifts = np.arange(bits, dtype=np.int64)
        for start, size in chunked(1 << bits, CHUNK):
            codes = np.arange(start, start + size, dtype=np.int64)
            eta = ((codes[:, None] >> shifts) & 1).astype(np.int8)
            hit = _adjacent_nonzero(eta, n)
            counts = np.bincount(eta[hit].sum(axis=1), minlength=bits + 1)
            for ones, c in enumerate(counts.tolist()):
                by_ones[ones] += c
        value = sum(c * p**j * (1 - p) ** (bits - j) for j, c in enumerate(by_ones))
        return StatReport(
            estimator="adjacent_equal",
            estimate=float(value),
            samples=1 << bits,
            reference=float(value),
            exact=str(value),
            details={"n": n, "k": k},
        )
    if mode != "monte_carlo":
        raise InvalidSpecError(f"Unknown mode {mode!r}.")
    rng = stream(spec.seed, replica, f"adjacent {n} {k}")
    hits = 0
    for _, size in chunked(samples, max(1, CHUNK // bits)):
        if spec.produces == Model.CA184:
            hits += int(_adjacent_nonzero(spec.draw(rng, size, bits, lo=-n), n).sum())
        else:
            hits += int(_nonzero_after(draw_trits(spec, rng, size, bits - 1), n).sum())
    return StatReport.from_proportion("adjacent_equal", hits, samples, details={"n": n, "k": k})


def particle_density(
    spec: InitSpec, n: int, sites: int, width: int | None = None, replica: int = 0
) -> StatReport:
    """`d_n` for a single bond, read as the fraction of nonzero time-`n` trits
    along long rows of `width` bonds; one value per row, so the standard error
    absorbs the spatial correlation.

    Examples:
        >>> spec = InitSpec(kind="checkerboard", phase="even")
        >>> particle_density(spec, 2, 64, width=32).estimate
        0.0
    """
    width = width or max(4096, 8 * n)
    rows = max(2, -(-sites // width))
    bits = width + 2 * n + 1
    rng = stream(spec.seed, replica, f"density {n} {width}")
    values = []
    for _, size in chunked(rows, max(1, CHUNK // bits)):
        if spec.produces == Model.CA184:
            eta = spec.draw(rng, size, bits, lo=-n).astype(np.int64)
            trits = 1 - eta[:, :-1] - eta[:, 1:]
        else:
            trits = draw_trits(spec, rng, size, bits - 1).astype(np.int64)
        f = np.zeros((size, trits.shape[1] + 1), dtype=np.int64)
        np.cumsum(trits, axis=1, out=f[:, 1:])
        values.extend((np.diff(min_filter_array(f, n), axis=1) != 0).mean(axis=1).tolist())
    return StatReport.from_values("particle_density", values, details={"n": n, "width": width})


def decay_rate_fit(
    n_list: list[int], samples: int, k: int = 1, seed: int = 0
) -> StatReport:
    """Least-squares slope of `log d_n` against `log n` under fair Bernoulli
    bits; the reference is -1/2 and `details` holds the 95% interval. With `k = 1`
    `samples` counts bonds read along long rows, otherwise independent rows.

    Raises:
        DegenerateFitError: fewer than three positive `n`, or some `d_n = 0`.
    """
    ns = sorted({n for n in n_list if n > 0})
    if len(ns) < 3:
        raise DegenerateFitError(f"A slope needs three positive values of n, got {ns}.")
    spec = InitSpec(kind=InitKind.BernoulliCa, p=0.5, seed=seed)
    if k == 1:
        reports = [particle_density(spec, n, samples) for n in ns]
    else:
        reports = [adjacent_equal_probability(spec, n, samples, k) for n in ns]
    d = np.array([r.estimate for r in reports])
    if (d <= 0).any():
        raise DegenerateFitError("Some d_n vanished; raise the sample count.")
    fit = stats.linregress(np.log(ns), np.log(d))
    half_width = 1.96 * float(fit.stderr)
    logger.info("Decay slope %.4f +- %.4f over n=%s", fit.slope, half_width, ns)
    return StatReport(
        estimator="decay_slope",
        estimate=float(fit.slope),
        stderr=float(fit.stderr),
        samples=samples * len(ns),
        reference=-0.5,
        exact="-1/2",
        details={
            "intercept": float(fit.intercept),
            "ci": [float(fit.slope) - half_width, float(fit.slope) + half_width],
            "points": [
                {"n": n, "estimate": r.estimate, "stderr": r.stderr} for n, r in zip(ns, reports)
            ],
        },
    )
