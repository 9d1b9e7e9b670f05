import logging
from enum import Enum

import numpy as np
from pydantic import BaseModel, Field, root_validator

from .errors import InvalidSpecError, TopologyError
from .lattice import BaConfig, Ca184Config, Lattice, Model
from .rng import stream
from .topology import Topology
from .utils import DEFAULT_SEED

logger = logging.getLogger(__name__)


class InitKind(str, Enum):
    """
    Kind | Parameters | Law of the initial row
    --:|:--|:--
    BernoulliCa | `p` | i.i.d. bits with `P[η(x) = 1] = p`
    BernoulliBaPM | none | i.i.d. fair +-1 trits, no empty sites
    BernoulliBa | `p_plus`, `p_minus`, `p_zero` | i.i.d. trits
    MarkovCa | `matrix` | stationary two-state Markov chain along the lattice
    Checkerboard | `phase` | point mass on `o`, on `e`, or their half-half mixture
    Empty | none | point mass on the all-zero trit row
    Explicit | `cells`, `model` | the given cells, unchanged
    """

    BernoulliCa = "bernoulli_ca"
    BernoulliBaPM = "bernoulli_ba_pm"
    BernoulliBa = "bernoulli_ba"
    MarkovCa = "markov_ca"
    Checkerboard = "checkerboard"
    Empty = "empty"
    Explicit = "explicit"


class Phase(str, Enum):
    Odd = "odd"
    Even = "even"
    Mixed = "mixed"


CA_KINDS = (InitKind.BernoulliCa, InitKind.MarkovCa, InitKind.Checkerboard)


class InitSpec(BaseModel):
    """A seeded sampler of initial rows. Only the parameters of its `kind` are
    read; the root validator refuses missing or out-of-range ones.

    Examples:
        >>> spec = InitSpec(kind="bernoulli_ca", p=1.0)
        >>> sample_initial(spec, Topology.ring(4)).cells.tolist()
        [1, 1, 1, 1]
        >>> spec.produces
        <Model.CA184: 'ca184'>
    """

    kind: InitKind = Field(..., title="Sampler Kind")
    seed: int = Field(DEFAULT_SEED, title="Master Seed", ge=0, lt=2**64)
    p: float | None = Field(None, title="Particle Density")
    p_plus: float | None = Field(None, title="Probability of +1")
    p_minus: float | None = Field(None, title="Probability of -1")
    p_zero: float | None = Field(None, title="Probability of 0")
    matrix: list[list[float]] | None = Field(
        None,
        title="Transition Matrix",
        description="Row-stochastic 2x2 matrix, matrix[a][b] = P[η(x+1)=b | η(x)=a].",
    )
    phase: Phase | None = Field(None, title="Checkerboard Phase")
    cells: list[int] | None = Field(None, title="Explicit Cells")
    model: Model | None = Field(None, title="Explicit Model")

    class Config:
        use_enum_values = True

    @root_validator(skip_on_failure=True)
    def parameters_fit_kind(cls, values):
        match values["kind"]:
            case InitKind.BernoulliCa:
                p = values.get("p")
                if p is None or not 0.0 <= p <= 1.0:
                    raise InvalidSpecError(f"Density must lie in [0, 1], got {p}.")
            case InitKind.BernoulliBa:
                probs = [values.get(k) for k in ("p_plus", "p_minus", "p_zero")]
                if any(q is None or not 0.0 <= q <= 1.0 for q in probs):
                    raise InvalidSpecError(f"Probabilities must lie in [0, 1]: {probs}.")
                if abs(sum(probs) - 1.0) > 1e-12:
                    raise InvalidSpecError(f"Probabilities must sum to 1, got {sum(probs)}.")
            case InitKind.MarkovCa:
                m = values.get("matrix")
                arr = np.asarray(m, dtype=float) if m is not None else None
                if arr is None or arr.shape != (2, 2):
                    raise InvalidSpecError("A Markov sampler needs a 2x2 matrix.")
                if (arr < 0).any() or (np.abs(arr.sum(axis=1) - 1.0) > 1e-12).any():
                    raise InvalidSpecError(f"Rows must be stochastic: {m}.")
            case InitKind.Checkerboard:
                if values.get("phase") is None:
                    raise InvalidSpecError("A checkerboard needs a phase.")
            case InitKind.Explicit:
                if values.get("cells") is None or values.get("model") is None:
                    raise InvalidSpecError("Explicit specs carry cells and a model.")
        return values

    @property
    def produces(self) -> Model:
        if self.kind == InitKind.Explicit:
            return Model(self.model)
        return Model.CA184 if self.kind in CA_KINDS else Model.BA

    @property
    def label(self) -> str:
        return f"init {self.kind}"

    def draw(self, rng: np.random.Generator, rows: int, length: int, lo: int = 0):
        """A `(rows, length)` int8 array of independent samples; `lo` is the
        abscissa of column 0 and only matters for checkerboards."""
        shape = (rows, length)
        match self.kind:
            case InitKind.BernoulliCa:
                return (rng.random(shape) < self.p).astype(np.int8)
            case InitKind.BernoulliBaPM:
                return (2 * rng.integers(0, 2, shape) - 1).astype(np.int8)
            case InitKind.BernoulliBa:
                u = rng.random(shape)
                out = np.zeros(shape, dtype=np.int8)
                out[u < self.p_plus] = 1
                out[(u >= self.p_plus) & (u < self.p_plus + self.p_minus)] = -1
                return out
            case InitKind.MarkovCa:
                return self._markov(rng, rows, length)
            case InitKind.Checkerboard:
                parity = np.arange(lo, lo + length) % 2
                if self.phase == Phase.Mixed:
                    odd = rng.integers(0, 2, rows).astype(bool)
                else:
                    odd = np.full(rows, self.phase == Phase.Odd)
                return np.where(odd[:, None], parity, 1 - parity).astype(np.int8)
            case InitKind.Empty:
                return np.zeros(shape, dtype=np.int8)
            case InitKind.Explicit:
                if len(self.cells) != length:
                    raise InvalidSpecError(
                        f"{len(self.cells)} explicit cells cannot fill {length} sites."
                    )
                return np.tile(np.asarray(self.cells, dtype=np.int8), (rows, 1))

    def _markov(self, rng: np.random.Generator, rows: int, length: int) -> np.ndarray:
        m = np.asarray(self.matrix, dtype=float)
        flow = m[0, 1] + m[1, 0]
        # stationary law; a chain that never switches starts from a fair coin
        start = m[0, 1] / flow if flow > 0 else 0.5
        u = rng.random((rows, length))
        out = np.empty((rows, length), dtype=np.int8)
        out[:, 0] = u[:, 0] < start
        for x in range(1, length):
            out[:, x] = u[:, x] < m[out[:, x - 1], 1]
        return out


def sample_initial(spec: InitSpec, topology: Topology, replica: int = 0) -> Lattice:
    """Draw one initial configuration.

    The stream is keyed by `(spec.seed, replica, spec.label)`, so the same triple
    returns the same configuration and replicas are independent.

    Args:
        spec (InitSpec): Sampler.
        topology (Topology): Ring or open window to fill.
        replica (int, optional): Replica index. Defaults to 0.

    Returns:
        Lattice: a `Ca184Config` or a `BaConfig` depending on `spec.produces`.
    """
    if topology.extent < 1:
        raise TopologyError("Cannot sample an empty topology.")
    rng = stream(spec.seed, replica, spec.label)
    cells = spec.draw(rng, 1, topology.extent, topology.lo)[0]
    cls = Ca184Config if spec.produces == Model.CA184 else BaConfig
    logger.debug("Sampled %s on %s (replica %d)", spec.kind, topology, replica)
    if spec.kind == InitKind.Explicit:
        return cls(topology=topology, cells=cells)
    return cls.trusted(topology, cells)
