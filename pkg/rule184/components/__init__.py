from .classify import ConfigClass, ConfigClassKind, classify_config
from .codec import (
    CodecError,
    parse_config,
    parse_path,
    profile_to_csv,
    serialize_config,
    serialize_path,
)
from .errors import (
    BurnInTooShortError,
    DegenerateFitError,
    EnumerationTooLargeError,
    HorizonExhaustedError,
    InsufficientSamplesError,
    InvalidPathError,
    InvalidSpecError,
    LightConeExhaustedError,
    ManifestError,
    NoSurvivorsError,
    NotInLambdaError,
    NotPhaseBoundaryError,
    RingImbalanceError,
    RingParityError,
    Rule184Error,
    SlopeError,
    ToleranceError,
    TopologyError,
    WindowTooShortError,
)
from .lattice import BaConfig, Ca184Config, Lattice, Model
from .path import Clock, SecondClassPath
from .profile import HeightProfile, common_offset
from .report import StatReport
from .rng import stream, stream_independence
from .sampling import InitKind, InitSpec, Phase, sample_initial
from .sheet import SpaceTimeSheet
from .topology import Topology, TopologyKind
from .utils import (
    DEFAULT_SEED,
    DEFAULT_THREADS,
    LOG_LEVEL,
    MANIFEST_FILE,
    OUTPUT_PATH,
    atomic_write,
    chunked,
    configure_logging,
)
