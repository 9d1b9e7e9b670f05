import logging
from collections import deque
from enum import Enum

import numpy as np
from scipy.ndimage import minimum_filter1d

from .components import (
    BaConfig,
    Ca184Config,
    HeightProfile,
    InvalidSpecError,
    Lattice,
    LightConeExhaustedError,
    Model,
    SpaceTimeSheet,
    TopologyError,
    WindowTooShortError,
)
from .recipes import RULE_184

logger = logging.getLogger(__name__)

WORD = 64
_ONE = np.uint64(1)
_TOP = np.uint64(WORD - 1)


class SurfaceRule(str, Enum):
    """
    How `sg_step` treats a node `x` with neighbours `x - 1`, `x + 1`:

    Rule | Node rises when | By | Relation to `min_filter(f, 1)`
    --:|:--|:--:|:--
    Deposit | no neighbour is strictly lower | 1 | equal up to +1 on every profile
    Reflect | both neighbours are strictly higher | 2 | reflection across the chord; equal up to a constant only on some profiles
    """

    Deposit = "deposit"
    Reflect = "reflect"


def _require_length(config: Lattice, minimum: int = 3):
    if not config.topology.is_ring and config.size < minimum:
        raise WindowTooShortError(
            f"An open window needs {minimum} cells to step, got {config.size}."
        )


def _neighbours(cells: np.ndarray, ring: bool):
    if ring:
        return np.roll(cells, 1, axis=-1), cells, np.roll(cells, -1, axis=-1)
    return cells[..., :-2], cells[..., 1:-1], cells[..., 2:]


def ca184_step_array(cells: np.ndarray, ring: bool) -> np.ndarray:
    """Rule 184 along the last axis of a batch of bit rows.

    Open rows lose one cell per side.

    Examples:
        >>> ca184_step_array(np.array([[1, 0, 1, 1, 0]], dtype=np.int8), ring=True).tolist()
        [[0, 1, 1, 0, 1]]
    """
    left, centre, right = _neighbours(cells, ring)
    return ((centre & right) | (left & (1 - centre))).astype(np.int8)


def ba_step_array(cells: np.ndarray, ring: bool) -> np.ndarray:
    """Ballistic annihilation along the last axis of a batch of trit rows.

    A +1 arrives at `x` from `x - 1` unless it meets a -1 at `x - 1/2`
    (`ζ(x) = -1`) or at `x` (`ζ(x) = 0` and `ζ(x + 1) = -1`); -1 is symmetric.
    """
    left, centre, right = _neighbours(cells, ring)
    plus = (left == 1) & ~((centre == -1) | ((centre == 0) & (right == -1)))
    minus = (right == -1) & ~((centre == 1) | ((centre == 0) & (left == 1)))
    return plus.astype(np.int8) - minus.astype(np.int8)


def ca184_step(eta: Ca184Config) -> Ca184Config:
    """One step of rule 184, one table lookup per site.

    Examples:
        >>> from rule184.components import Topology
        >>> ca184_step(Ca184Config(topology=Topology.ring(5), cells=[1, 0, 1, 1, 0])).cells.tolist()
        [0, 1, 1, 0, 1]

    Args:
        eta (Ca184Config): Ring, or open window of at least 3 cells.

    Returns:
        Ca184Config: Next row; open windows are trimmed by one cell per side.
    """
    _require_length(eta)
    cells = eta.cells.tolist()
    n = len(cells)
    if eta.topology.is_ring:
        out = [RULE_184[(cells[i - 1], cells[i], cells[(i + 1) % n])] for i in range(n)]
    else:
        out = [RULE_184[(cells[i - 1], cells[i], cells[i + 1])] for i in range(1, n - 1)]
    return eta.with_cells(np.array(out, dtype=np.int8), eta.topology.trimmed(1))


def pack(cells: np.ndarray) -> np.ndarray:
    """Bits to little-endian `uint64` words: cell `k` is bit `k % 64` of word `k // 64`."""
    n = len(cells)
    padded = np.zeros(-(-n // WORD) * WORD, dtype=np.uint8)
    padded[:n] = cells
    return np.packbits(padded, bitorder="little").view("<u8").copy()


def unpack(words: np.ndarray, n: int) -> np.ndarray:
    return np.unpackbits(words.view(np.uint8), bitorder="little")[:n].astype(np.int8)


def popcount(words: np.ndarray) -> int:
    return int(np.unpackbits(words.view(np.uint8)).sum())


def _get_bit(words: np.ndarray, k: int) -> np.uint64:
    return (words[k // WORD] >> np.uint64(k % WORD)) & _ONE


def _put_bit(words: np.ndarray, k: int, bit: np.uint64):
    w, b = divmod(k, WORD)
    mask = _ONE << np.uint64(b)
    words[w] = (words[w] & ~mask) | (bit << np.uint64(b))


def _word_step(c: np.ndarray, n: int, ring: bool) -> np.ndarray:
    zero = np.zeros(1, dtype=np.uint64)
    nxt = np.concatenate((c[1:], zero))
    prv = np.concatenate((zero, c[:-1]))
    right = (c >> _ONE) | (nxt << _TOP)
    left = (c << _ONE) | (prv >> _TOP)
    if ring:
        # wrap the two boundary bits across the ring
        _put_bit(right, n - 1, _get_bit(c, 0))
        _put_bit(left, 0, _get_bit(c, n - 1))
    out = (c & right) | (left & ~c)
    tail = n % WORD
    if tail:
        out[-1] &= (_ONE << np.uint64(tail)) - _ONE
    return out


def ca184_step_bitparallel(eta: Ca184Config) -> Ca184Config:
    """Same map as `ca184_step`, evaluated 64 sites at a time as
    `c' = (c AND r) OR (l AND NOT c)` on packed words.

    Examples:
        >>> from rule184.components import Topology
        >>> ca184_step_bitparallel(Ca184Config(topology=Topology.ring(5), cells=[1, 0, 1, 1, 0])).cells.tolist()
        [0, 1, 1, 0, 1]
    """
    _require_length(eta)
    n, ring = eta.size, eta.topology.is_ring
    out = unpack(_word_step(pack(eta.cells), n, ring), n)
    if not ring:
        out = out[1 : n - 1]
    return eta.with_cells(out, eta.topology.trimmed(1))


def ca184_run_bitparallel(eta: Ca184Config, steps: int) -> tuple[Ca184Config, np.ndarray]:
    """Advance a ring `steps` times without leaving the packed form.

    Returns:
        tuple[Ca184Config, np.ndarray]: final row and, per step, the number of
            particles that hopped (equal to the number of holes that hopped).
    """
    if not eta.topology.is_ring:
        raise TopologyError("Packed runs are for rings; use evolve() on windows.")
    n = eta.size
    words = pack(eta.cells)
    jumps = np.empty(steps, dtype=np.int64)
    for t in range(steps):
        nxt = _word_step(words, n, True)
        jumps[t] = popcount(nxt & ~words)
        words = nxt
    return eta.with_cells(unpack(words, n)), jumps


def ba_step(zeta: BaConfig) -> BaConfig:
    """One whole step of ballistic annihilation.

    Examples:
        >>> from rule184.components import Topology
        >>> ba_step(BaConfig(topology=Topology.window(5), cells=[0, 1, 0, 0, 0])).cells.tolist()
        [0, 1, 0]
    """
    if zeta.half:
        raise TopologyError("ba_step takes rows on whole sites.")
    _require_length(zeta)
    out = ba_step_array(zeta.cells, zeta.topology.is_ring)
    return zeta.with_cells(out, zeta.topology.trimmed(1))


def _half_kernel(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    plus = (left == 1) & (right != -1)
    minus = (right == -1) & (left != 1)
    return plus.astype(np.int8) - minus.astype(np.int8)


def ba_half_step_array(cells: np.ndarray, ring: bool) -> np.ndarray:
    """Half step along the last axis of a batch; open rows lose their last cell.

    Examples:
        >>> ba_half_step_array(np.array([[1, -1, 0], [1, 0, -1]], dtype=np.int8), ring=False).tolist()
        [[0, 0], [1, -1]]
    """
    if ring:
        return _half_kernel(cells, np.roll(cells, -1, axis=-1))
    return _half_kernel(cells[..., :-1], cells[..., 1:])


def ba_half_step(zeta: BaConfig) -> BaConfig:
    """Move every particle half a site: whole sites to the half lattice.

    The half site `k + 1/2` receives the +1 from `k` unless a -1 sits at `k + 1`,
    and the -1 from `k + 1` unless a +1 sits at `k`; a meeting pair leaves 0.

    Examples:
        >>> from rule184.components import Topology
        >>> h = ba_half_step(BaConfig(topology=Topology.window(3), cells=[1, -1, 0]))
        >>> h.cells.tolist(), h.positions2.tolist()
        ([0, 0], [1, 3])
    """
    if zeta.half:
        raise TopologyError("The input of a half step must sit on whole sites.")
    _require_length(zeta, 2)
    out = ba_half_step_array(zeta.cells, zeta.topology.is_ring)
    topology = zeta.topology
    if not zeta.topology.is_ring:
        topology = zeta.topology.window(zeta.size - 1, lo=zeta.topology.lo)
    return BaConfig.trusted(topology, out, half=True)


def ba_complete_step(half_row: BaConfig) -> BaConfig:
    """Second half step: half lattice back to whole sites."""
    if not half_row.half:
        raise TopologyError("ba_complete_step takes a half-lattice row.")
    _require_length(half_row, 2)
    h = half_row.cells
    if half_row.topology.is_ring:
        out, topology = _half_kernel(np.roll(h, 1), h), half_row.topology
    else:
        out = _half_kernel(h[:-1], h[1:])
        topology = half_row.topology.window(half_row.size - 1, lo=half_row.topology.lo + 1)
    return BaConfig.trusted(topology, out, half=False)


def sg_step(f: HeightProfile, rule: SurfaceRule = SurfaceRule.Deposit) -> HeightProfile:
    """One step of surface growth at the interior nodes (trimmed by one node per side).

    Examples:
        >>> f = HeightProfile.from_heights(0, [1, 0, 1])
        >>> sg_step(f, SurfaceRule.Reflect).heights.tolist()
        [2]
        >>> sg_step(HeightProfile.from_heights(0, [2, 1, 1, 2]), SurfaceRule.Reflect).heights.tolist()
        [1, 1]
        >>> sg_step(f).heights.tolist()
        [1]

    Args:
        f (HeightProfile): At least three nodes.
        rule (SurfaceRule, optional): Local rule. Defaults to `SurfaceRule.Deposit`.

    Returns:
        HeightProfile: Heights at nodes `origin + 1 .. last - 1`.
    """
    h = f.heights
    if len(h) < 3:
        raise WindowTooShortError("A surface step needs three nodes.")
    left, centre, right = h[:-2], h[1:-1], h[2:]
    match rule:
        case SurfaceRule.Deposit:
            out = centre + ((left >= centre) & (right >= centre))
        case SurfaceRule.Reflect:
            strict = (left > centre) & (right > centre)
            out = np.where(strict, left + right - centre, centre)
        case _:
            raise InvalidSpecError(f"Unknown surface rule {rule}.")
    return HeightProfile.from_heights(f.origin_abscissa + 1, out)


def sliding_min(values: np.ndarray, width: int) -> np.ndarray:
    """Minimum of every window of `width` consecutive values, via a monotone deque.

    Examples:
        >>> sliding_min(np.array([3, 1, 2, 0, 5]), 3).tolist()
        [1, 0, 0]
    """
    window: deque[int] = deque()
    out = np.empty(len(values) - width + 1, dtype=values.dtype)
    for i, v in enumerate(values):
        while window and values[window[-1]] >= v:
            window.pop()
        window.append(i)
        if window[0] <= i - width:
            window.popleft()
        if i >= width - 1:
            out[i - width + 1] = values[window[0]]
    return out


def min_filter(f: HeightProfile, y: int) -> HeightProfile:
    """The operator `M_y`: `g(x) = min f(z)` over `x - y <= z <= x + y`.

    Examples:
        >>> f = HeightProfile.from_heights(-5, [abs(k) for k in range(-5, 6)])
        >>> g = min_filter(f, 1)
        >>> g.origin_abscissa, g.heights.tolist()
        (-4, [3, 2, 1, 0, 0, 0, 1, 2, 3])
    """
    if y < 0:
        raise InvalidSpecError(f"Window radius must be non-negative, got {y}.")
    h = f.heights
    if len(h) <= 2 * y:
        raise WindowTooShortError(f"{len(h)} nodes cannot hold a window of radius {y}.")
    if y == 0:
        return f
    return HeightProfile.from_heights(f.origin_abscissa + y, sliding_min(h, 2 * y + 1))


def min_filter_array(heights: np.ndarray, y: int) -> np.ndarray:
    """`M_y` along the last axis of a batch of height rows, trimmed by `y` per side."""
    if y == 0:
        return heights
    full = minimum_filter1d(heights, size=2 * y + 1, axis=-1, mode="nearest")
    return full[..., y:-y]


def light_cone_limit(config: Lattice) -> int | None:
    """Most steps an open window supports; `None` on rings."""
    if config.topology.is_ring:
        return None
    return (config.size - 1) // 2


def evolve(
    config: Lattice,
    n: int,
    model: Model | None = None,
    half: bool = False,
    bitparallel: bool = True,
) -> SpaceTimeSheet:
    """Iterate the model's step `n` times, recording every row.

    Examples:
        >>> from rule184.components import Topology
        >>> sheet = evolve(Ca184Config.odd(Topology.ring(4)), 2)
        >>> [r.cells.tolist() for r in sheet.rows]
        [[0, 1, 0, 1], [1, 0, 1, 0], [0, 1, 0, 1]]

    Args:
        config (Lattice): Row 0.
        n (int): Number of whole steps.
        model (Model | None, optional): Must match the configuration when given.
        half (bool, optional): For ballistic annihilation, also record the rows
            at times `t + 1/2`. Defaults to False.
        bitparallel (bool, optional): Use the packed CA 184 stepper. Defaults to True.

    Returns:
        SpaceTimeSheet: rows `0..n`.
    """
    if model is not None and Model(model) != config.model:
        raise InvalidSpecError(f"A {config.model.value} row cannot evolve as {model}.")
    if n < 0:
        raise InvalidSpecError(f"Step counts are non-negative, got {n}.")
    if (limit := light_cone_limit(config)) is not None and n > limit:
        raise LightConeExhaustedError(
            f"{config.topology} supports {limit} steps, {n} requested."
        )
    rows: list[Lattice] = [config]
    half_rows: list[BaConfig] = []
    current = config
    for _ in range(n):
        if config.model == Model.CA184:
            step = ca184_step_bitparallel if bitparallel else ca184_step
            current = step(current)
        elif half:
            mid = ba_half_step(current)
            half_rows.append(mid)
            current = ba_complete_step(mid)
        else:
            current = ba_step(current)
        rows.append(current)
    logger.debug("Evolved %s for %d steps", config.topology, n)
    return SpaceTimeSheet(
        model=config.model,
        topology=config.topology,
        rows=rows,
        half_rows=half_rows if half and config.model == Model.BA else None,
    )
