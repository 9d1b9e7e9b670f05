import logging
import math

import numpy as np
from pydantic import BaseModel, Field

from .annihilation import CHUNK, ENUMERATION_LIMIT
from .components import (
    BaConfig,
    BurnInTooShortError,
    Ca184Config,
    EnumerationTooLargeError,
    InitKind,
    InitSpec,
    InvalidSpecError,
    Model,
    SpaceTimeSheet,
    StatReport,
    ToleranceError,
    Topology,
    TopologyError,
    WindowTooShortError,
    chunked,
    sample_initial,
    stream,
)
from .dynamics import ba_step_array, ca184_run_bitparallel, ca184_step_array

logger = logging.getLogger(__name__)


def flux_curve(rho: float) -> float:
    """Flux of the invariant regime at density `rho`.

    Examples:
        >>> flux_curve(0.25), flux_curve(0.75), flux_curve(0.5)
        (0.25, 0.25, 0.5)
    """
    return 0.5 - abs(0.5 - rho)


class FluxReport(BaseModel):
    """Bond flux on a relaxed ring.

    Field | Meaning
    --:|:--
    `density` | density of the sampler (`p`), or the realized one for other kinds
    `flux` | particle jumps per site per step, averaged over the measured steps
    `reference` | `1/2 - abs(1/2 - density)`
    `hole_flux` | the same average for the hole system, run separately
    `jumps`, `hole_jumps` | total jump counts behind `flux` and `hole_flux`
    `realized_density` | particle count over ring size
    """

    density: float = Field(..., title="Density", ge=0, le=1)
    flux: float = Field(..., title="Measured Flux", ge=0)
    reference: float = Field(..., title="Reference Flux")
    hole_flux: float = Field(..., title="Hole Flux", ge=0)
    realized_density: float = Field(..., title="Realized Density", ge=0, le=1)
    stderr: float = Field(0.0, title="Standard Error", ge=0)
    jumps: int = Field(..., title="Particle Jumps", ge=0)
    hole_jumps: int = Field(..., title="Hole Jumps", ge=0)
    steps: int = Field(..., title="Measured Steps", gt=0)
    ring_size: int = Field(..., title="Ring Size")

    def within(self, atol: float = 0.01) -> bool:
        return abs(self.flux - self.reference) <= atol

    def as_row(self) -> dict:
        return {
            "rho": repr(self.density),
            "flux": repr(self.flux),
            "reference": repr(self.reference),
            "stderr": repr(self.stderr),
            "hole_flux": repr(self.hole_flux),
        }


def _per_site_step(jumps: np.ndarray, ring_size: int) -> float:
    return int(jumps.sum()) / (ring_size * len(jumps))


def flux_estimate(
    spec: InitSpec, ring_size: int, burn_in: int, measure_steps: int, replica: int = 0
) -> FluxReport:
    """Average number of particles crossing a bond per step, after relaxation.

    On a ring the fraction of sites receiving a particle at step `n`, i.e. the
    spatial mean of `η_n(x) (1 - η_{n-1}(x))`, equals the jump count over `N`,
    so the packed stepper's jump counts give the flux directly.

    Examples:
        >>> r = flux_estimate(InitSpec(kind="bernoulli_ca", p=0.0), 8, 4, 4)
        >>> r.flux, r.reference
        (0.0, 0.0)

    Raises:
        BurnInTooShortError: `burn_in < ceil(N / 2)`, shorter than the time a
            ring needs to reach its invariant regime.
    """
    if spec.produces != Model.CA184:
        raise InvalidSpecError("Flux is measured on CA 184 rings.")
    if burn_in < math.ceil(ring_size / 2):
        raise BurnInTooShortError(
            f"A ring of {ring_size} relaxes within {math.ceil(ring_size / 2)} steps,"
            f" burn-in {burn_in} may not."
        )
    if measure_steps < 1:
        raise InvalidSpecError("Measure at least one step.")
    eta = sample_initial(spec, Topology.ring(ring_size), replica)
    relaxed, _ = ca184_run_bitparallel(eta, burn_in)
    _, jumps = ca184_run_bitparallel(relaxed, measure_steps)
    _, hole_jumps = ca184_run_bitparallel(relaxed.holes().mirrored(), measure_steps)
    per_step = jumps / ring_size
    realized = relaxed.density
    rho = spec.p if spec.kind == InitKind.BernoulliCa else realized
    stderr = float(per_step.std(ddof=1) / math.sqrt(measure_steps)) if measure_steps > 1 else 0.0
    logger.info("Flux %.6f at density %.4f on ring %d", per_step.mean(), rho, ring_size)
    return FluxReport(
        density=rho,
        flux=_per_site_step(jumps, ring_size),
        reference=flux_curve(rho),
        hole_flux=_per_site_step(hole_jumps, ring_size),
        jumps=int(jumps.sum()),
        hole_jumps=int(hole_jumps.sum()),
        realized_density=realized,
        stderr=stderr,
        steps=measure_steps,
        ring_size=ring_size,
    )


def _ring_trits(cells: np.ndarray) -> np.ndarray:
    c = cells.astype(np.int8)
    return 1 - c - np.roll(c, -1, axis=-1)


def _converging(trits: np.ndarray) -> np.ndarray:
    """Rows still holding a converging pair; on a ring that is any row with
    particles of both signs."""
    return (trits == 1).any(axis=-1) & (trits == -1).any(axis=-1)


def ring_relaxation_time(eta: Ca184Config) -> int:
    """First time the ring's trits hold no converging pair: free flow, jam
    backflow, or a checkerboard.

    Examples:
        >>> ring_relaxation_time(Ca184Config.odd(Topology.ring(8)))
        0
        >>> ring_relaxation_time(Ca184Config(topology=Topology.ring(6), cells=[1, 1, 1, 0, 0, 0]))
        2

    Raises:
        ToleranceError: the ring has not relaxed by `ceil(N / 2)`.
    """
    if not eta.topology.is_ring:
        raise TopologyError("Relaxation is defined on rings.")
    bound = math.ceil(eta.size / 2)
    cells = eta.cells
    for t in range(bound + 1):
        if not _converging(_ring_trits(cells)):
            return t
        cells = ca184_step_array(cells, ring=True)
    raise ToleranceError(f"{eta} still has a converging pair at time {bound}.")


def max_relaxation_time(n: int) -> int:
    """Largest `ring_relaxation_time` over all `2^n` rings of size `n`, run as
    one batch.

    Examples:
        >>> max_relaxation_time(6)
        2
    """
    if n > ENUMERATION_LIMIT:
        raise EnumerationTooLargeError(f"2^{n} rings exceed the enumeration limit.")
    bound = math.ceil(n / 2)
    worst = 0
    shifts = np.arange(n, dtype=np.int64)
    for start, size in chunked(1 << n, CHUNK):
        codes = np.arange(start, start + size, dtype=np.int64)
        cells = ((codes[:, None] >> shifts) & 1).astype(np.int8)
        for t in range(bound + 1):
            active = _converging(_ring_trits(cells))
            if not active.any():
                break
            worst = max(worst, t + 1)
            cells = ca184_step_array(cells[active], ring=True)
        else:
            raise ToleranceError(f"A ring of size {n} did not relax by time {bound}.")
    logger.info("Rings of size %d relax within %d steps", n, worst)
    return worst


def _encode(rows: np.ndarray, base: int, offset: int) -> np.ndarray:
    weights = base ** np.arange(rows.shape[1], dtype=np.int64)
    return ((rows.astype(np.int64) + offset) * weights).sum(axis=1)


def _cylinder_law(rows: np.ndarray, base: int, offset: int, cells: int) -> np.ndarray:
    return np.bincount(_encode(rows, base, offset), minlength=base**cells) / len(rows)


def invariance_audit(
    spec: InitSpec, n_steps: int, samples: int, k: int, replica: int = 0
) -> StatReport:
    """Total-variation distance between the laws of a `k`-cell cylinder at time
    0 and at time `n_steps`.

    Each law is averaged over two consecutive times (`0, 1` and `n, n + 1`), so
    the checkerboard 2-cycle counts as invariant and its distance is exactly 0.
    The cylinder covers the same absolute cells at both times. The standard
    error is `1/2 sum sqrt((p0 (1 - p0) + pn (1 - pn)) / samples)` over patterns.

    Examples:
        >>> audit = invariance_audit(InitSpec(kind="checkerboard", phase="mixed"), 5, 64, 4)
        >>> audit.estimate
        0.0

    Raises:
        WindowTooShortError: `k < 1`.
        EnumerationTooLargeError: more cylinder patterns than the enumeration limit.
    """
    if k < 1:
        raise WindowTooShortError(f"A cylinder holds at least one cell, got {k}.")
    ca = spec.produces == Model.CA184
    base, offset = (2, 0) if ca else (3, 1)
    if k * math.log2(base) > ENUMERATION_LIMIT:
        raise EnumerationTooLargeError(f"{base}^{k} cylinder patterns are too many.")
    step = ca184_step_array if ca else ba_step_array
    margin = n_steps + 1
    length = k + 2 * margin
    rng = stream(spec.seed, replica, f"audit {n_steps} {k}")
    before = np.zeros(base**k)
    after = np.zeros(base**k)
    for _, size in chunked(samples, max(1, CHUNK // length)):
        rows = spec.draw(rng, size, length, lo=-margin)
        first = step(rows, ring=False)
        before += size * (
            _cylinder_law(rows[:, margin : margin + k], base, offset, k)
            + _cylinder_law(first[:, margin - 1 : margin - 1 + k], base, offset, k)
        ) / 2
        current = rows
        for _ in range(n_steps):
            current = step(current, ring=False)
        later = step(current, ring=False)
        after += size * (
            _cylinder_law(current[:, margin - n_steps : margin - n_steps + k], base, offset, k)
            + _cylinder_law(later[:, margin - n_steps - 1 : margin - n_steps - 1 + k], base, offset, k)
        ) / 2
    p0, pn = before / samples, after / samples
    tv = 0.5 * float(np.abs(p0 - pn).sum())
    stderr = 0.5 * float(np.sqrt((p0 * (1 - p0) + pn * (1 - pn)) / samples).sum())
    return StatReport(
        estimator="invariance_tv",
        estimate=tv,
        stderr=stderr,
        samples=samples,
        reference=0.0,
        details={"k": k, "n_steps": n_steps, "kind": spec.kind},
    )


def diverging_gaps(sheet: SpaceTimeSheet) -> list[int | None]:
    """Per whole time `m`, the smallest distance between subsequent particles
    moving apart (a -1 followed by a +1); `None` when there is no such pair.

    Examples:
        >>> from rule184.dynamics import evolve
        >>> zeta = BaConfig(topology=Topology.window(11, lo=-5), cells=[0, 0, 0, 0, 0, -1, 1, 0, 0, 0, 0])
        >>> diverging_gaps(evolve(zeta, 2))
        [1, 3, 5]
    """
    if sheet.model != Model.BA:
        raise InvalidSpecError("Diverging gaps are read from ballistic annihilation rows.")
    out: list[int | None] = []
    for row in sheet.rows:
        idx = np.flatnonzero(row.cells)
        pos = row.positions[idx].astype(np.int64)
        signs = row.cells[idx]
        if row.topology.is_ring and len(idx):
            pos = np.append(pos, pos[0] + row.size)
            signs = np.append(signs, signs[0])
        apart = (signs[:-1] == -1) & (signs[1:] == 1)
        gaps = np.diff(pos)[apart]
        out.append(int(gaps.min()) if len(gaps) else None)
    return out
