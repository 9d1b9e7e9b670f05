import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from collections.abc import Callable
from enum import Enum
from pathlib import Path

import numpy as np
import yaml
from pydantic import BaseModel, Field, ValidationError, root_validator, validator
from rich.console import Console
from rich.table import Table
from slugify import slugify

from . import __version__
from .annihilation import (
    first_return_probability,
    match_partners,
    neighbor_velocity_stats,
    survival_probability,
    u2n_exact,
)
from .checks import CheckResult, Suite
from .components import (
    DEFAULT_SEED,
    DEFAULT_THREADS,
    LOG_LEVEL,
    MANIFEST_FILE,
    OUTPUT_PATH,
    BaConfig,
    Ca184Config,
    InitKind,
    InitSpec,
    InvalidSpecError,
    Lattice,
    ManifestError,
    Model,
    Rule184Error,
    ToleranceError,
    Topology,
    atomic_write,
    configure_logging,
    parse_config,
    profile_to_csv,
    sample_initial,
    serialize_config,
    serialize_path,
    stream,
)
from .dynamics import ca184_step, ca184_step_array, ca184_step_bitparallel, evolve
from .hydro import (
    Walk,
    adjacent_equal_probability,
    decay_rate_fit,
    plateau_cdf_experiment,
    rescaling_experiment,
    segment_pattern,
)
from .measures import flux_estimate, ring_relaxation_time
from .phase import (
    annihilation_events,
    padded,
    random_phase_boundary,
    reconstruct,
    trace_second_class,
    traceable_horizon,
    validate_ba_path,
)
from .transforms import (
    ba_counting_profile,
    ba_to_ca,
    ca_counting_profile,
    ca_to_ba,
    lambda_membership,
)

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_USAGE, EXIT_TOLERANCE = 0, 2, 3


class Command(str, Enum):
    Evolve = "evolve"
    Transform = "transform"
    Partners = "partners"
    Stats = "stats"
    Flux = "flux"
    PhaseSep = "phase-sep"
    Hydro = "hydro"
    Verify = "verify"
    Bench = "bench"


class OutputFormat(str, Enum):
    Csv = "csv"
    Jsonl = "jsonl"


class Params(BaseModel):
    class Config:
        extra = "forbid"
        use_enum_values = True


class InitialParams(Params):
    """Row 0 either as a line-format `config` or sampled from `init` on a ring
    (or an open window) of `size` sites."""

    config: str | None = Field(None, title="Configuration", description="e.g. `ca184:RING:6:110100`")
    init: InitSpec | None = Field(None, title="Initial Sampler")
    size: int = Field(64, title="Sites", gt=0)
    ring: bool = Field(True, title="Periodic")

    @root_validator(skip_on_failure=True)
    def one_source(cls, values):
        if (values.get("config") is None) == (values.get("init") is None):
            raise ValueError("Give exactly one of `config` and `init`.")
        return values

    def initial(self, seed: int) -> Lattice:
        if self.config is not None:
            return parse_config(self.config)
        topology = Topology.ring(self.size) if self.ring else Topology.window(self.size)
        return sample_initial(self.init.copy(update={"seed": seed}), topology)


class EvolveParams(InitialParams):
    steps: int = Field(16, title="Whole Steps", ge=0)
    half: bool = Field(False, title="Record Half Rows")


class TransformOp(str, Enum):
    CaToBa = "ca_to_ba"
    BaToCa = "ba_to_ca"
    Lambda = "lambda"
    Profile = "profile"


class TransformParams(Params):
    config: str
    op: TransformOp = TransformOp.CaToBa
    anchor_bit: int = Field(0, ge=0, le=1)
    base: int = 0
    centered: bool = False


class PartnersParams(InitialParams):
    pass


class Estimator(str, Enum):
    Survival = "survival"
    FirstReturn = "first_return"
    NeighborVelocity = "neighbor_velocity"
    U2n = "u2n"
    AdjacentEqual = "adjacent_equal"
    Relaxation = "relaxation"


class StatsParams(Params):
    estimator: Estimator
    n_list: list[int] = Field([1, 2, 4, 8], title="Times")
    samples: int = Field(10**4, gt=0)
    mode: str = Field("monte_carlo", regex=r"^(monte_carlo|exact_enumeration)$")
    init: InitSpec | None = None
    size: int = Field(16, title="Ring Size", gt=0)
    tolerance_se: float | None = Field(
        None,
        title="Asserted Tolerance",
        description="Fail when an estimate lies more than this many standard errors from its reference.",
    )

    @validator("n_list")
    def positive_times(cls, v):
        if not v or min(v) < 0:
            raise ValueError("Times are non-negative and at least one is given.")
        return v


class FluxParams(Params):
    rho: list[float] = Field([k / 10 for k in range(1, 10)], title="Densities")
    ring_size: int = Field(10**5, gt=0)
    burn_in: int | None = Field(None, title="Burn-in", description="Defaults to ceil(N / 2).")
    measure_steps: int = Field(200, gt=0)
    tolerance: float | None = Field(0.01, title="Asserted Flux Tolerance")


class PhaseSepParams(Params):
    config: str | None = Field(None, description="A ballistic annihilation phase boundary; random when absent.")
    half: int = Field(20, title="Half Width", gt=0)
    ticks: int | None = Field(None, title="Half Ticks", description="Defaults to the traceable horizon.")


class Experiment(str, Enum):
    Plateau = "plateau"
    Rescale = "rescale"
    Decay = "decay"
    Segment = "segment"


class HydroParams(Params):
    experiment: Experiment
    n: int = Field(1000, gt=0)
    n_list: list[int] = Field([16, 64, 256, 1024])
    samples: int = Field(1000, gt=0)
    k: int = Field(1, gt=0)
    tolerance: float | None = Field(0.05, title="Asserted Slope Tolerance")
    config: str | None = None
    size: int = Field(256, gt=0)
    steps: int = Field(0, ge=0)
    p: float = Field(0.5, ge=0, le=1)
    walk: Walk = Field(Walk.Gaussian, title="Plateau Walk", description="Increment law of the filtered walk.")


class VerifyParams(Params):
    suite: Suite = Suite.Exact
    quick: bool = False


class BenchParams(Params):
    size: int = Field(2**20, gt=0)
    steps: int = Field(64, gt=0)
    scalar_steps: int = Field(2, gt=0)
    min_speedup: float | None = Field(None, title="Asserted Speedup")


PARAMS: dict[str, type[Params]] = {
    Command.Evolve.value: EvolveParams,
    Command.Transform.value: TransformParams,
    Command.Partners.value: PartnersParams,
    Command.Stats.value: StatsParams,
    Command.Flux.value: FluxParams,
    Command.PhaseSep.value: PhaseSepParams,
    Command.Hydro.value: HydroParams,
    Command.Verify.value: VerifyParams,
    Command.Bench.value: BenchParams,
}


class ExperimentManifest(BaseModel):
    """Everything needed to replay a run.

    Field | Description | Example
    --:|:--|:--
    `command` | [`Command`][rule184.__main__.Command] | `flux`
    `params` | keyword arguments of the command, checked against its parameter model | `{"ring_size": 4096}`
    `seed` | master seed for every random stream | `184`
    `version` | build identifier of the writer | `0.1.0`
    `out` | parent of the run directory | `runs`
    `format` | `csv` or `jsonl` | `csv`
    """

    command: Command
    params: dict = Field(default_factory=dict)
    seed: int = Field(DEFAULT_SEED, ge=0, lt=2**64)
    version: str = Field(__version__, title="Build Identifier")
    out: Path = Field(OUTPUT_PATH, title="Output Root")
    format: OutputFormat = Field(OutputFormat.Csv, title="Results Format")
    threads: int = Field(DEFAULT_THREADS, gt=0)
    plot_data: bool = Field(False, title="Write gnuplot .dat files")
    name: str | None = Field(None, title="Run Name")

    class Config:
        use_enum_values = True

    @root_validator(skip_on_failure=True)
    def params_fit_command(cls, values):
        model = PARAMS[values["command"]]
        values["params"] = json.loads(model.parse_obj(values["params"]).json(exclude_unset=True))
        return values

    @validator("version")
    def note_foreign_version(cls, v):
        if v != __version__:
            logger.warning("Manifest written by %s, replaying with %s", v, __version__)
        return v

    @property
    def typed_params(self) -> Params:
        return PARAMS[self.command].parse_obj(self.params)

    @property
    def run_dir(self) -> Path:
        return self.out / slugify(self.name or f"{self.command} seed {self.seed}")

    def to_yaml(self) -> str:
        data = json.loads(self.json())
        return yaml.safe_dump(data, sort_keys=False)

    @classmethod
    def from_yaml(cls, path: Path) -> "ExperimentManifest":
        try:
            data = yaml.safe_load(Path(path).read_text())
        except (OSError, yaml.YAMLError) as e:
            raise ManifestError(f"Cannot read manifest {path}: {e}") from e
        if not isinstance(data, dict):
            raise ManifestError(f"{path} does not hold a mapping.")
        try:
            return cls.parse_obj(data)
        except ValidationError as e:
            raise ManifestError(str(e)) from e


class Outcome(BaseModel):
    """What a command produced: result rows, named `.dat` series, extra text
    files, and the tolerance failures to report."""

    rows: list[dict] = Field(default_factory=list)
    series: dict[str, list[list]] = Field(default_factory=dict)
    files: dict[str, str] = Field(default_factory=dict)
    failures: list[str] = Field(default_factory=list)


def _seeded(init: InitSpec | None, default: InitSpec, seed: int) -> InitSpec:
    return (init or default).copy(update={"seed": seed})


def do_evolve(p: EvolveParams, m: ExperimentManifest) -> Outcome:
    config = p.initial(m.seed)
    sheet = evolve(config, p.steps, half=p.half)
    out = Outcome()
    for t, row in enumerate(sheet.rows):
        out.rows.append({"t2": 2 * t, "config": serialize_config(row)})
        out.series.setdefault("spacetime", []).extend(
            [t, int(x), int(v)] for x, v in zip(row.positions, row.cells) if v
        )
        if sheet.half_rows is not None and t < len(sheet.half_rows):
            out.rows.append({"t2": 2 * t + 1, "config": serialize_config(sheet.half_rows[t])})
    return out


def do_transform(p: TransformParams, m: ExperimentManifest) -> Outcome:
    config = parse_config(p.config)
    out = Outcome()
    match p.op, config:
        case TransformOp.CaToBa, Ca184Config():
            out.rows.append({"input": p.config, "output": serialize_config(ca_to_ba(config))})
        case TransformOp.BaToCa, BaConfig():
            image = ba_to_ca(config, anchor_bit=p.anchor_bit)
            out.rows.append({"input": p.config, "output": serialize_config(image)})
        case TransformOp.Lambda, BaConfig():
            verdict = lambda_membership(config)
            witness = verdict.witness
            out.rows.append(
                {
                    "input": p.config,
                    "member": verdict.member,
                    "witness": "" if witness is None else f"{witness.left}..{witness.right}: {witness.reason}",
                }
            )
        case TransformOp.Profile, BaConfig():
            profile = ba_counting_profile(config, p.base)
            out.files["profile.csv"] = profile_to_csv(profile)
        case TransformOp.Profile, Ca184Config():
            profile = ca_counting_profile(config, p.base, centered=p.centered)
            out.files["profile.csv"] = profile_to_csv(profile)
        case _:
            raise InvalidSpecError(f"{p.op} does not apply to a {config.model.value} row.")
    if p.op == TransformOp.Profile:
        xs = range(profile.origin_abscissa, profile.last_abscissa + 1)
        out.rows = [{"x": x, "height": int(h)} for x, h in zip(xs, profile.heights)]
        out.series["profile"] = [[x, int(h)] for x, h in zip(xs, profile.heights)]
    return out


def do_partners(p: PartnersParams, m: ExperimentManifest) -> Outcome:
    zeta = p.initial(m.seed)
    if zeta.model == Model.CA184:
        zeta = ca_to_ba(zeta)
    report = match_partners(zeta)
    out = Outcome(files={"pairs.csv": report.to_csv()})
    for pair in report.pairs:
        out.rows.append({"kind": "pair", "pos_plus": pair.plus, "pos_minus": pair.minus, "time2": pair.time2})
    out.rows.extend({"kind": "unmatched_plus", "pos_plus": x, "pos_minus": "", "time2": ""} for x in report.unmatched_plus)
    out.rows.extend({"kind": "unmatched_minus", "pos_plus": "", "pos_minus": x, "time2": ""} for x in report.unmatched_minus)
    return out


def do_stats(p: StatsParams, m: ExperimentManifest) -> Outcome:
    out = Outcome()
    for n in p.n_list:
        match p.estimator:
            case Estimator.U2n:
                value = u2n_exact(n)
                out.rows.append({"n": n, "exact": str(value), "estimate": repr(float(value))})
                continue
            case Estimator.Relaxation:
                spec = _seeded(p.init, InitSpec(kind=InitKind.BernoulliCa, p=0.5), m.seed)
                eta = sample_initial(spec, Topology.ring(p.size), replica=n)
                out.rows.append({"n": n, "relaxation_time": ring_relaxation_time(eta)})
                continue
            case Estimator.Survival:
                spec = _seeded(p.init, InitSpec(kind=InitKind.BernoulliBaPM), m.seed)
                report = survival_probability(spec, n, p.samples)
            case Estimator.FirstReturn:
                report = first_return_probability(n, mode=p.mode, samples=p.samples, seed=m.seed)
            case Estimator.NeighborVelocity:
                report = neighbor_velocity_stats(n, p.samples, m.seed)
            case Estimator.AdjacentEqual:
                spec = _seeded(p.init, InitSpec(kind=InitKind.BernoulliCa, p=0.5), m.seed)
                report = adjacent_equal_probability(spec, n, p.samples, mode=p.mode)
        out.rows.append({"n": n} | report.as_row())
        out.series.setdefault(p.estimator, []).append([n, report.estimate, report.stderr])
        if p.tolerance_se is not None and not report.within(p.tolerance_se):
            out.failures.append(f"{p.estimator} at n={n}: {report.estimate!r} vs {report.reference!r}")
    return out


def do_flux(p: FluxParams, m: ExperimentManifest) -> Outcome:
    burn_in = p.burn_in if p.burn_in is not None else math.ceil(p.ring_size / 2)
    out = Outcome()
    for replica, rho in enumerate(p.rho):
        spec = InitSpec(kind=InitKind.BernoulliCa, p=rho, seed=m.seed)
        r = flux_estimate(spec, p.ring_size, burn_in, p.measure_steps, replica=replica)
        out.rows.append(r.as_row())
        out.series.setdefault("flux", []).append([rho, r.flux, r.reference])
        if p.tolerance is not None and not r.within(p.tolerance):
            out.failures.append(f"flux {r.flux!r} at rho={rho}, expected {r.reference!r}")
    return out


def do_phase_sep(p: PhaseSepParams, m: ExperimentManifest) -> Outcome:
    if p.config is None:
        zeta = random_phase_boundary(stream(m.seed, 0, "phase boundary"), p.half)
    else:
        zeta = parse_config(p.config)
        if zeta.model != Model.BA or zeta.topology.is_ring:
            raise InvalidSpecError("Phase boundaries are open ballistic annihilation windows.")
    zeta = padded(zeta, 2 * zeta.size)
    ticks = p.ticks if p.ticks is not None else traceable_horizon(zeta)
    sheet = evolve(zeta, -(-ticks // 2), half=True)
    path = trace_second_class(sheet, ticks=ticks)
    events = annihilation_events(sheet, ticks=ticks)
    rebuilt = reconstruct(path)
    top = rebuilt.config.topology
    out = Outcome(files={"path.txt": serialize_path(path) + "\n"})
    for t2, x2 in zip(path.times2.tolist(), path.positions2.tolist()):
        out.rows.append({"t2": t2, "pos2": x2})
    out.series["path"] = [[t2, x2] for t2, x2 in zip(path.times2.tolist(), path.positions2.tolist())]
    out.series["events"] = [[e.time2, e.pos2] for e in events]
    if not validate_ba_path(path).valid:
        out.failures.append("the traced path breaks the step rules")
    if rebuilt.config != zeta.window(top.lo, top.hi):
        out.failures.append(f"reconstruction over {top.lo}..{top.hi} differs from the initial row")
    logger.info("Traced %d ticks, %d annihilations, determined %s", ticks, len(events), top)
    return out


def do_hydro(p: HydroParams, m: ExperimentManifest) -> Outcome:
    out = Outcome()
    match p.experiment:
        case Experiment.Plateau:
            r = plateau_cdf_experiment(p.n, p.samples, m.seed, walk=p.walk)
            out.rows.append(r.as_row())
            if p.tolerance is not None and r.estimate > r.reference:
                out.failures.append(f"plateau KS distance {r.estimate!r} over {r.reference!r}")
        case Experiment.Rescale:
            spec = InitSpec(kind=InitKind.BernoulliCa, p=p.p, seed=m.seed)
            r = rescaling_experiment(spec, p.n_list, samples=p.samples)
            out.rows.extend(r.details["points"])
            if not r.details["bound_ok"]:
                out.failures.append("the CA and BA filtered profiles drift apart")
            if not r.details["ks_shrinks"]:
                out.failures.append(f"rescaled distances do not shrink: {r.details['ks']}")
        case Experiment.Decay:
            r = decay_rate_fit(p.n_list, p.samples, k=p.k, seed=m.seed)
            out.rows.extend(r.details["points"])
            out.rows.append(r.as_row())
            out.series["decay"] = [[pt["n"], pt["estimate"], pt["stderr"]] for pt in r.details["points"]]
            if p.tolerance is not None and abs(r.estimate - r.reference) > p.tolerance:
                out.failures.append(f"decay slope {r.estimate!r} outside -1/2 +- {p.tolerance}")
        case Experiment.Segment:
            if p.config is not None:
                eta = parse_config(p.config)
            else:
                spec = InitSpec(kind=InitKind.BernoulliCa, p=p.p, seed=m.seed)
                eta = sample_initial(spec, Topology.ring(p.size))
            eta = evolve(eta, p.steps).rows[-1]
            report = segment_pattern(eta)
            out.rows = [s.dict() for s in report.segments]
            logger.info("Mean lengths %s, cyclic order %s", report.mean_lengths(), report.order_ok)
    return out


def verify_suite(name: Suite | str, quick: bool = False, threads: int = 1) -> list[CheckResult]:
    """Run the registered checks of a suite; the report lists every check with
    pass or fail. `threads > 1` runs checks in worker processes."""
    from .recipes.suites import CHECKS

    results = CHECKS.run(name, quick=quick, threads=threads)
    failed = [r.name for r in results if not r.passed]
    logger.info("%d of %d checks passed", len(results) - len(failed), len(results))
    if failed:
        logger.warning("Failed checks: %s", ", ".join(failed))
    return results


def do_verify(p: VerifyParams, m: ExperimentManifest) -> Outcome:
    results = verify_suite(p.suite, quick=p.quick, threads=m.threads)
    return Outcome(
        rows=[r.as_row() for r in results],
        failures=[f"{r.name}: {r.detail}" for r in results if not r.passed],
    )


def do_bench(p: BenchParams, m: ExperimentManifest) -> Outcome:
    rng = stream(m.seed, 0, "bench")
    eta = Ca184Config.trusted(Topology.ring(p.size), (rng.random(p.size) < 0.5).astype(np.int8))

    def array_step(c: Ca184Config) -> Ca184Config:
        return c.with_cells(ca184_step_array(c.cells, ring=True))

    kernels = {
        "lookup": (ca184_step, p.scalar_steps),
        "array": (array_step, p.steps),
        "bitparallel": (ca184_step_bitparallel, p.steps),
    }
    rates = {}
    out = Outcome()
    for name, (step, steps) in kernels.items():
        current = eta
        start = time.perf_counter()
        for _ in range(steps):
            current = step(current)
        seconds = time.perf_counter() - start
        rates[name] = p.size * steps / seconds
        out.rows.append(
            {"kernel": name, "steps": steps, "seconds": seconds, "sites_per_second": rates[name]}
        )
    speedup = rates["bitparallel"] / rates["lookup"]
    out.rows.append({"kernel": "speedup", "steps": "", "seconds": "", "sites_per_second": speedup})
    if p.min_speedup is not None and speedup < p.min_speedup:
        out.failures.append(f"bit-parallel speedup {speedup:.1f} below {p.min_speedup}")
    return out


HANDLERS: dict[str, Callable[[Params, ExperimentManifest], Outcome]] = {
    Command.Evolve.value: do_evolve,
    Command.Transform.value: do_transform,
    Command.Partners.value: do_partners,
    Command.Stats.value: do_stats,
    Command.Flux.value: do_flux,
    Command.PhaseSep.value: do_phase_sep,
    Command.Hydro.value: do_hydro,
    Command.Verify.value: do_verify,
    Command.Bench.value: do_bench,
}


def _cell(v) -> str | int | bool:
    return repr(v) if isinstance(v, float) else v


def rows_to_text(rows: list[dict], fmt: OutputFormat | str) -> str:
    """
    Examples:
        >>> print(rows_to_text([{"n": 1, "x": 0.1}, {"n": 2, "y": "a"}], "csv"), end="")
        n,x,y
        1,0.1,
        2,,a
        >>> print(rows_to_text([{"n": 1, "x": 0.1}], "jsonl"), end="")
        {"n": 1, "x": "0.1"}
    """
    rows = [{k: _cell(v) for k, v in r.items()} for r in rows]
    if OutputFormat(fmt) == OutputFormat.Jsonl:
        return "".join(json.dumps(r) + "\n" for r in rows)
    fields = list(dict.fromkeys(k for r in rows for k in r))
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def series_to_dat(name: str, points: list[list]) -> str:
    lines = [f"# {name}"]
    lines.extend(" ".join(repr(v) if isinstance(v, float) else str(v) for v in pt) for pt in points)
    return "\n".join(lines) + "\n"


def run_manifest(manifest: ExperimentManifest) -> int:
    """Dispatch the manifest's command and write its outputs into
    `manifest.run_dir`: `results.csv` (or `.jsonl`), a copy of the manifest,
    extra files the command produces, and `.dat` series with `plot_data`.

    Returns:
        int: 0, or 3 when an asserted tolerance failed.
    """
    target = manifest.run_dir
    logger.info("Running %s into %s", manifest.command, target)
    try:
        outcome = HANDLERS[manifest.command](manifest.typed_params, manifest)
    except ToleranceError as e:
        outcome = Outcome(failures=[str(e)])
    atomic_write(target / MANIFEST_FILE, manifest.to_yaml())
    atomic_write(target / f"results.{manifest.format}", rows_to_text(outcome.rows, manifest.format))
    for name, text in outcome.files.items():
        atomic_write(target / name, text)
    if manifest.plot_data:
        for name, points in outcome.series.items():
            atomic_write(target / f"{slugify(name)}.dat", series_to_dat(name, points))
    for failure in outcome.failures:
        logger.error("Tolerance failed: %s", failure)
    return EXIT_TOLERANCE if outcome.failures else EXIT_OK


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v]


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v]


def _add_initial(parser: argparse.ArgumentParser, size: int = 64):
    parser.add_argument("--config", help="line-format row, e.g. ba:OPEN:0..3:+0-0")
    parser.add_argument("--kind", choices=[k.value for k in InitKind], help="sampler when no --config")
    parser.add_argument("--p", type=float, help="CA density")
    parser.add_argument("--p-plus", type=float, help="BA probability of +1")
    parser.add_argument("--p-minus", type=float, help="BA probability of -1")
    parser.add_argument("--phase", choices=["odd", "even", "mixed"])
    parser.add_argument("--size", type=int, default=size)
    parser.add_argument("--window", action="store_true", help="open window instead of a ring")


def _initial_params(args: argparse.Namespace) -> dict:
    if args.config:
        return {"config": args.config}
    init: dict = {"kind": args.kind or InitKind.BernoulliCa.value}
    if args.p is not None or init["kind"] == InitKind.BernoulliCa:
        init["p"] = 0.5 if args.p is None else args.p
    if args.p_plus is not None or args.p_minus is not None:
        plus, minus = args.p_plus or 0.0, args.p_minus or 0.0
        init |= {"p_plus": plus, "p_minus": minus, "p_zero": 1.0 - plus - minus}
    if args.phase:
        init["phase"] = args.phase
    return {"init": init, "size": args.size, "ring": not args.window}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rule184",
        description="CA 184, ballistic annihilation and min-filter surface growth experiments.",
        epilog="Exit codes: 0 success, 2 usage or manifest error, 3 asserted tolerance failed.",
    )
    parser.add_argument("--seed", type=int, help=f"master seed (RULE184_SEED, now {DEFAULT_SEED})")
    parser.add_argument("--threads", type=int, help=f"worker processes (RULE184_THREADS, now {DEFAULT_THREADS})")
    parser.add_argument("--out", type=Path, help=f"output root (RULE184_OUTPUT, now {OUTPUT_PATH})")
    parser.add_argument("--format", choices=[f.value for f in OutputFormat], help="results format, csv by default")
    parser.add_argument("--plot-data", action="store_true", help="also write gnuplot .dat files")
    parser.add_argument("--name", help="run directory name")
    parser.add_argument("--log-level", default=LOG_LEVEL)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="iterate a row and record the space-time sheet")
    _add_initial(p)
    p.add_argument("--steps", type=int, default=16)
    p.add_argument("--half", action="store_true", help="record BA half rows")

    p = sub.add_parser("transform", help="map between CA 184, BA and counting profiles")
    p.add_argument("--config", required=True)
    p.add_argument("--op", choices=[o.value for o in TransformOp], default="ca_to_ba")
    p.add_argument("--anchor-bit", type=int, choices=[0, 1], default=0)
    p.add_argument("--base", type=int, default=0)
    p.add_argument("--centered", action="store_true")

    p = sub.add_parser("partners", help="annihilation partners by bracket matching")
    _add_initial(p)

    p = sub.add_parser("stats", help="survival, first-return and neighbour statistics")
    p.add_argument("--estimator", choices=[e.value for e in Estimator], required=True)
    p.add_argument("--n-list", type=_ints, default=[1, 2, 4, 8])
    p.add_argument("--samples", type=int, default=10**4)
    p.add_argument("--mode", choices=["monte_carlo", "exact_enumeration"], default="monte_carlo")
    p.add_argument("--size", type=int, default=16, help="ring size for relaxation")
    p.add_argument("--tolerance-se", type=float)

    p = sub.add_parser("flux", help="relaxed flux against 1/2 - |1/2 - rho|")
    p.add_argument("--rho", type=_floats, default=[k / 10 for k in range(1, 10)])
    p.add_argument("--ring-size", type=int, default=10**5)
    p.add_argument("--burn-in", type=int)
    p.add_argument("--measure-steps", type=int, default=200)
    p.add_argument("--tolerance", type=float, default=0.01)

    p = sub.add_parser("phase-sep", help="trace a second-class particle and rebuild the row")
    p.add_argument("--config")
    p.add_argument("--half", type=int, default=20)
    p.add_argument("--ticks", type=int)

    p = sub.add_parser("hydro", help="plateau CDF, rescaling, decay rate and pattern segments")
    p.add_argument("--experiment", choices=[e.value for e in Experiment], required=True)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--n-list", type=_ints, default=[16, 64, 256, 1024])
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--tolerance", type=float, default=0.05)
    p.add_argument("--config")
    p.add_argument("--size", type=int, default=256)
    p.add_argument("--steps", type=int, default=0)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--walk", choices=[w.value for w in Walk], default="gaussian", help="plateau walk increments")

    p = sub.add_parser("verify", help="run a suite of registered checks")
    p.add_argument("--suite", choices=[s.value for s in Suite], default="exact")
    p.add_argument("--quick", action="store_true", help="reduced sizes")

    p = sub.add_parser("bench", help="throughput of the CA 184 kernels")
    p.add_argument("--size", type=int, default=2**20)
    p.add_argument("--steps", type=int, default=64)
    p.add_argument("--scalar-steps", type=int, default=2)
    p.add_argument("--min-speedup", type=float)

    p = sub.add_parser("run", help="replay an experiment manifest")
    p.add_argument("manifest", type=Path)
    return parser


GLOBALS = ("seed", "threads", "out", "format", "plot_data", "name", "log_level", "command")


def manifest_from_args(args: argparse.Namespace) -> ExperimentManifest:
    """Turn parsed command-line arguments into a manifest; `run` loads one
    from YAML and lets explicitly given global flags override it."""
    overrides = {k: getattr(args, k) for k in ("seed", "threads", "out", "format", "name")}
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if args.plot_data:
        overrides["plot_data"] = True
    if args.command == "run":
        return ExperimentManifest.from_yaml(args.manifest).copy(update=overrides)
    command = Command(args.command)
    if command in (Command.Evolve, Command.Partners):
        params = _initial_params(args)
        if command == Command.Evolve:
            params |= {"steps": args.steps, "half": args.half}
    else:
        params = {k: v for k, v in vars(args).items() if k not in GLOBALS and v is not None}
    try:
        return ExperimentManifest(command=command, params=params, **overrides)
    except ValidationError as e:
        raise ManifestError(str(e)) from e


def _print_rows(console: Console, title: str, rows: list[dict], limit: int = 40):
    if not rows:
        return
    table = Table(title=title)
    fields = list(dict.fromkeys(k for r in rows for k in r))
    for f in fields:
        table.add_column(f)
    for r in rows[:limit]:
        table.add_row(*(str(_cell(r.get(f, ""))) for f in fields))
    console.print(table)
    if len(rows) > limit:
        console.print(f"... {len(rows) - limit} more rows")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    configure_logging(args.log_level)
    console = Console()
    try:
        manifest = manifest_from_args(args)
        status = run_manifest(manifest)
    except (ManifestError, ValidationError) as e:
        console.print(f"[red]manifest error[/red] {e}")
        return EXIT_USAGE
    except Rule184Error as e:
        console.print(f"[red]{type(e).__name__}[/red] {e}")
        return EXIT_USAGE
    results = manifest.run_dir / f"results.{manifest.format}"
    if manifest.format == OutputFormat.Csv and results.exists():
        with results.open(newline="") as f:
            _print_rows(console, f"{manifest.command} ({manifest.run_dir})", list(csv.DictReader(f)))
    verdict = "[green]ok[/green]" if status == EXIT_OK else "[red]tolerance failed[/red]"
    console.print(f"{manifest.command}: {verdict}, outputs in {manifest.run_dir}")
    return status


if __name__ == "__main__":
    sys.exit(main())
