__version__ = "0.1.0"

from .__main__ import ExperimentManifest, run_manifest, verify_suite
from .annihilation import (
    MatchReport,
    Pair,
    first_return_probability,
    match_partners,
    neighbor_velocity_stats,
    survival_probability,
    u2n_exact,
)
from .checks import Check, CheckCollection, CheckResult, Suite
from .components import (
    BaConfig,
    Ca184Config,
    ConfigClass,
    ConfigClassKind,
    HeightProfile,
    InitKind,
    InitSpec,
    Rule184Error,
    SecondClassPath,
    SpaceTimeSheet,
    StatReport,
    Topology,
    classify_config,
    parse_config,
    sample_initial,
    serialize_config,
)
from .dynamics import (
    SurfaceRule,
    ba_half_step,
    ba_step,
    ca184_step,
    ca184_step_bitparallel,
    evolve,
    min_filter,
    sg_step,
)
from .hydro import (
    SegmentKind,
    SegmentReport,
    Walk,
    decay_rate_fit,
    plateau_cdf_experiment,
    rescaling_experiment,
    segment_pattern,
    segment_profile,
)
from .measures import FluxReport, flux_estimate, invariance_audit, ring_relaxation_time
from .phase import (
    PathVerdict,
    path_to_config,
    trace_second_class,
    validate_ba_path,
    validate_ca_path,
)
from .transforms import (
    LambdaVerdict,
    ba_counting_profile,
    ba_to_ca,
    ca_counting_profile,
    ca_to_ba,
    lambda_membership,
)
