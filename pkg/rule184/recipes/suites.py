"""Registered checks. Every runner returns a one-line detail on success and
raises `ToleranceError` on failure; `params` hold acceptance sizes and `quick`
the reduced sizes used by the test suite."""

import math
from fractions import Fraction

import numpy as np

from ..annihilation import (
    first_return_probability,
    match_partners,
    neighbor_velocity_stats,
    survival_probability,
    u2n_exact,
)
from ..checks import Check, CheckCollection, Suite
from ..components import (
    BaConfig,
    Ca184Config,
    HeightProfile,
    InitSpec,
    ToleranceError,
    Topology,
    common_offset,
    stream,
    stream_independence,
)
from ..dynamics import (
    ba_half_step_array,
    ba_step,
    ba_step_array,
    ca184_step,
    ca184_step_array,
    ca184_step_bitparallel,
    evolve,
    min_filter,
    min_filter_array,
    sg_step,
    sliding_min,
)
from ..hydro import decay_rate_fit, plateau_cdf_experiment, rescaling_experiment
from ..measures import diverging_gaps, flux_estimate, invariance_audit, max_relaxation_time
from ..phase import (
    ca_path,
    padded,
    random_phase_boundary,
    reconstruct,
    trace_second_class,
    traceable_horizon,
    validate_ba_path,
    validate_ca_path,
)
from ..transforms import ba_counting_profile, ba_to_ca, ca_to_ba, lambda_membership
from .tables import RULE_184, WOLFRAM_NUMBER


def _require(ok: bool, message: str):
    if not ok:
        raise ToleranceError(message)


def _all_rows(length: int, base: int = 2) -> np.ndarray:
    """Every row of `length` symbols; trits come out as -1, 0, 1."""
    codes = np.arange(base**length, dtype=np.int64)
    digits = (codes[:, None] // base ** np.arange(length, dtype=np.int64)) % base
    return (digits - (1 if base == 3 else 0)).astype(np.int8)


def check_rule_table() -> str:
    bits = sum(v << (4 * l + 2 * c + r) for (l, c, r), v in RULE_184.items())
    _require(bits == WOLFRAM_NUMBER, f"The table encodes rule {bits}.")
    for (l, c, r), v in RULE_184.items():
        eta = Ca184Config(topology=Topology.window(3, lo=-1), cells=[l, c, r])
        got = {
            "lookup": ca184_step(eta).cells.tolist(),
            "packed": ca184_step_bitparallel(eta).cells.tolist(),
            "array": ca184_step_array(eta.cells[None, :], ring=False)[0].tolist(),
        }
        for kernel, cells in got.items():
            _require(cells == [v], f"{kernel} maps {l}{c}{r} to {cells}, expected {v}.")
    return "8 neighbourhoods agree with rule 184"


def check_kernel_equivalence(max_ring: int, random_rings: int, length: int, seed: int) -> str:
    for n in range(3, max_ring + 1):
        rows = _all_rows(n)
        batch = ca184_step_array(rows, ring=True)
        for row, nxt in zip(rows, batch):
            eta = Ca184Config.trusted(Topology.ring(n), row)
            _require(
                np.array_equal(ca184_step_bitparallel(eta).cells, nxt),
                f"Packed stepper disagrees on {eta}.",
            )
            if n <= 10:
                _require(np.array_equal(ca184_step(eta).cells, nxt), f"Lookup disagrees on {eta}.")
    rng = stream(seed, 0, "kernel equivalence")
    ring = Topology.ring(length)
    for _ in range(random_rings):
        eta = Ca184Config.trusted(ring, rng.integers(0, 2, length))
        _require(
            np.array_equal(ca184_step_bitparallel(eta).cells, ca184_step_array(eta.cells, ring=True)),
            "Packed and array steppers disagree on a random ring.",
        )
    return f"rings up to {max_ring} and {random_rings} rings of {length}"


def _equivariant(rows: np.ndarray):
    trits = 1 - rows[:, :-1] - rows[:, 1:]
    stepped = ca184_step_array(rows, ring=False)
    return np.array_equal(ba_step_array(trits, ring=False), 1 - stepped[:, :-1] - stepped[:, 1:])


def check_transform_equivariance(max_window: int, random_windows: int, length: int, seed: int) -> str:
    for n in range(4, max_window + 1):
        _require(_equivariant(_all_rows(n)), f"A window of {n} breaks equivariance.")
    rows = stream(seed, 0, "equivariance").integers(0, 2, (random_windows, length)).astype(np.int8)
    _require(_equivariant(rows), "A random window breaks equivariance.")
    for n in (4, 6, 8, 16):
        for cb in (Ca184Config.odd(Topology.ring(n)), Ca184Config.even(Topology.ring(n))):
            _require(ca_to_ba(cb).is_empty, f"{cb} maps to particles.")
            _require(ca184_step(cb) == cb.holes(), f"{cb} does not swap checkerboards.")
    return f"windows up to {max_window} and {random_windows} windows of {length}"


def check_lambda_image(max_window: int) -> str:
    image: set[bytes] = set()
    for n in range(2, max_window + 1):
        for row in _all_rows(n):
            eta = Ca184Config.trusted(Topology.window(n), row)
            zeta = ca_to_ba(eta)
            image.add(zeta.cells.tobytes())
            _require(lambda_membership(zeta).member, f"{zeta} is an image but flagged.")
            back = ba_to_ca(zeta, anchor_bit=int(row[0]))
            _require(back == eta, f"{zeta} does not invert to {eta}.")
    for n in range(1, max_window):
        for row in _all_rows(n, base=3):
            zeta = BaConfig.trusted(Topology.window(n), row)
            verdict = lambda_membership(zeta)
            _require(
                verdict.member == (row.tobytes() in image),
                f"Membership of {zeta} is {verdict.member}.",
            )
    return f"{len(image)} image rows up to {max_window - 1} sites"


def check_surface_shape(random_profiles: int, nodes: int, seed: int) -> str:
    rng = stream(seed, 0, "surface shape")
    for _ in range(random_profiles):
        steps = rng.integers(-1, 2, nodes - 1)
        f = HeightProfile(origin_abscissa=0, base_height=0, steps=steps)
        _require(common_offset(min_filter(f, 1), sg_step(f)) is not None, "sg_step is off shape.")
        zeta = BaConfig.trusted(Topology.window(nodes - 1, lo=1), np.asarray(steps, dtype=np.int8))
        stepped = ba_counting_profile(ba_step(zeta))
        filtered = min_filter(ba_counting_profile(zeta), 1)
        _require(
            common_offset(filtered, stepped) is not None,
            "The stepped counting profile is not the filtered one.",
        )
    return f"{random_profiles} profiles of {nodes} nodes"



def check_min_filter_semigroup(nodes: int, random_rows: int, seed: int) -> str:
    rows = _all_rows(nodes - 1, base=3)
    heights = np.zeros((len(rows), nodes), dtype=np.int64)
    np.cumsum(rows, axis=1, out=heights[:, 1:])
    repeated = heights
    for n in range(1, (nodes - 1) // 2 + 1):
        repeated = min_filter_array(repeated, 1)
        _require(np.array_equal(repeated, min_filter_array(heights, n)), f"M_1^{n} differs from M_{n}.")
    rng = stream(seed, 0, "semigroup")
    for _ in range(random_rows):
        values = rng.integers(-50, 50, 200)
        _require(
            np.array_equal(sliding_min(values, 7), min_filter_array(values, 3)),
            "The deque and scipy filters disagree.",
        )
    return f"all profiles of {nodes} nodes"


def check_diverging_gaps(evolutions: int, width: int, steps: int, seed: int) -> str:
    spec = InitSpec(kind="bernoulli_ba", p_plus=0.3, p_minus=0.3, p_zero=0.4, seed=seed)
    rng = stream(seed, 0, "diverging gaps")
    window = Topology.window(width + 2 * steps, lo=-steps)
    for row in spec.draw(rng, evolutions, window.extent):
        gaps = diverging_gaps(evolve(BaConfig.trusted(window, row), steps))
        for m, gap in enumerate(gaps):
            _require(gap is None or gap >= 2 * m + 1, f"A diverging gap {gap} at time {m}.")
    return f"{evolutions} evolutions of {steps} steps"


def _matching_agrees(rows: np.ndarray, horizon: int) -> bool:
    """Simulate padded rows and compare each +1's lifetime with its partner distance."""
    length = rows.shape[1]
    pad = 2 * horizon + 1
    current = np.pad(rows, ((0, 0), (pad, pad)))
    whole, half = [current], []
    for _ in range(horizon):
        half.append(ba_half_step_array(current, ring=False))
        current = ba_step_array(current, ring=False)
        whole.append(current)
    for b, row in enumerate(rows):
        zeta = BaConfig.trusted(Topology.window(length), row)
        report = match_partners(zeta)
        lifetimes = {p.plus: p.distance for p in report.pairs}
        lifetimes |= {x: None for x in report.unmatched_plus}
        for x, d in lifetimes.items():
            # a +1 starting at x keeps index x + pad in every trimmed row
            i = x + pad
            for t in range(horizon + 1):
                if (whole[t][b, i] == 1) != (d is None or d > 2 * t):
                    return False
                if t < horizon and (half[t][b, i] == 1) != (d is None or d > 2 * t + 1):
                    return False
    return True


def check_matching_soundness(max_length: int, random_windows: int, length: int, seed: int) -> str:
    for n in range(1, max_length + 1):
        _require(_matching_agrees(_all_rows(n, base=3), n), f"Matching fails on a window of {n}.")
    rows = stream(seed, 0, "matching").integers(-1, 2, (random_windows, length)).astype(np.int8)
    horizon = max(1, length // 20)
    for start in range(0, random_windows, 16):
        _require(
            _matching_agrees(rows[start : start + 16], horizon),
            f"Matching fails on a random window of {length}.",
        )
    for n in range(1, 9):
        levels = np.cumsum(_all_rows(2 * n - 1, base=2) * 2 - 1, axis=1)
        got = Fraction(int((levels.min(axis=1) >= 0).sum()), 2 ** (2 * n - 1))
        _require(got == u2n_exact(n), f"Survival to {n} is {got}, not {u2n_exact(n)}.")
    _require(first_return_probability(2).exact == "3/4", "First return at 2 is not 3/4.")
    return f"all windows up to {max_length} and {random_windows} of {length}"


def check_ring_relaxation(max_ring: int) -> str:
    worst = {n: max_relaxation_time(n) for n in range(3, max_ring + 1)}
    for n, t in worst.items():
        _require(t <= math.ceil(n / 2), f"Rings of {n} need {t} steps.")
    return "maxima " + ", ".join(f"{n}:{t}" for n, t in worst.items())


def check_phase_round_trip(windows: int, half: int, seed: int) -> str:
    rng = stream(seed, 0, "phase round trip")
    for _ in range(windows):
        zeta = padded(random_phase_boundary(rng, half), 2 * half)
        ticks = traceable_horizon(zeta)
        sheet = evolve(zeta, -(-ticks // 2), half=True)
        path = trace_second_class(sheet, ticks=ticks)
        _require(validate_ba_path(path).valid, f"The trace of {zeta} is not a valid path.")
        rebuilt = reconstruct(path).config
        top = rebuilt.topology
        _require(
            rebuilt == zeta.window(top.lo, top.hi),
            f"{zeta} rebuilds as {rebuilt} over {top.lo}..{top.hi}.",
        )
    return f"{windows} phase boundaries of {2 * half} sites"


def _interior_unit_pair(path) -> bool:
    lengths = [n for _, n in path.runs()]
    return any(a == b == 1 for a, b in zip(lengths[1:-1], lengths[2:-1]))


def _sparse(rng: np.random.Generator, n: int, bit: int) -> list[int]:
    """`n` bits in which `bit` never sits next to itself."""
    out: list[int] = []
    for _ in range(n):
        out.append(1 - bit if out and out[-1] == bit else int(rng.random() < 0.5))
    return out


def check_ca_path_conditions(windows: int, half: int, seed: int) -> str:
    rng = stream(seed, 0, "ca path")
    jam = Ca184Config(topology=Topology.window(24, lo=-12), cells=[0] * 12 + [1] * 12)
    _require(not validate_ca_path(ca_path(jam, 14)).valid, "A jam front should break the run bound.")
    seen = 0
    for _ in range(windows):
        # free flow on the left, jammed on the right, meeting on a 01 bond
        left = _sparse(rng, 2 * half, 1)
        right = _sparse(rng, 2 * half, 0)
        left[-1], right[0] = 0, 1
        cells = np.array(left + right, dtype=np.int8)
        eta = Ca184Config.trusted(Topology.window(4 * half, lo=-2 * half), cells)
        zeta = ca_to_ba(eta)
        if zeta.minus_positions.size == 0:
            continue
        ticks = traceable_horizon(zeta)
        if ticks < 2:
            continue
        path = ca_path(eta, ticks)
        _require(
            validate_ca_path(path).valid != _interior_unit_pair(path),
            f"Run-bound verdict of {eta} disagrees with its unit stretches.",
        )
        seen += 1
    _require(seen > 0, "No CA phase boundary had a traceable path.")
    return f"{seen} CA phase boundaries"


def check_one_sided_shift(max_window: int, random_rings: int, size: int, seed: int) -> str:
    rows = _all_rows(max_window)
    _require(np.array_equal(ba_step_array(rows, ring=False), rows[:, :-2]), "A +1 window does not shift right.")
    _require(np.array_equal(ba_step_array(-rows, ring=False), -rows[:, 2:]), "A -1 window does not shift left.")
    rings = stream(seed, 0, "one-sided shift").integers(0, 2, (random_rings, size)).astype(np.int8)
    _require(
        np.array_equal(ba_step_array(rings, ring=True), np.roll(rings, 1, axis=-1)),
        "A +1 ring does not rotate right.",
    )
    zeta = BaConfig(topology=Topology.ring(size), cells=(-rings[0]).tolist())
    _require(np.array_equal(ba_step(zeta).cells, np.roll(zeta.cells, -1)), "A -1 ring does not rotate left.")
    return f"windows of {max_window} and {random_rings} rings of {size}"


def check_flux_curve(ring_size: int, measure_steps: int, seed: int) -> str:
    worst = 0.0
    for rho in [k / 10 for k in range(1, 10)]:
        spec = InitSpec(kind="bernoulli_ca", p=rho, seed=seed)
        r = flux_estimate(spec, ring_size, math.ceil(ring_size / 2), measure_steps)
        _require(r.within(0.01), f"Flux {r.flux:.4f} at {rho}, expected {r.reference}.")
        _require(r.jumps == r.hole_jumps, f"Hole jumps {r.hole_jumps} differ from {r.jumps} at {rho}.")
        worst = max(worst, abs(r.flux - r.reference))
    return f"largest deviation {worst:.5f}"


def check_decay_rate(n_list: list[int], samples: int, seed: int) -> str:
    r = decay_rate_fit(n_list, samples, seed=seed)
    _require(abs(r.estimate + 0.5) <= 0.05, f"Decay slope {r.estimate:.4f}.")
    return f"slope {r.estimate:.4f} +- {r.stderr:.4f}"


def check_neighbor_velocity(n_list: list[int], samples: int, seed: int) -> str:
    out = []
    for n in n_list:
        r = neighbor_velocity_stats(n, samples, seed)
        _require(r.within(3), f"Same-velocity frequency {r.estimate:.4f} at {n}, expected {r.exact}.")
        out.append(f"{n}:{r.estimate:.4f}")
    return " ".join(out)


def check_survival(n_list: list[int], samples: int, seed: int) -> str:
    spec = InitSpec(kind="bernoulli_ba_pm", seed=seed)
    for n in n_list:
        r = survival_probability(spec, n, samples)
        _require(r.within(3), f"Survival to {n} is {r.estimate:.4f}, expected {r.exact}.")
    mc = first_return_probability(2, mode="monte_carlo", samples=samples, seed=seed)
    _require(abs(mc.estimate - 0.75) <= 3 * mc.stderr + 1e-12, f"First return {mc.estimate:.4f}.")
    return f"n in {n_list}"


def check_plateau_cdf(n: int, samples: int, seed: int) -> str:
    r = plateau_cdf_experiment(n, samples, seed)
    _require(r.estimate <= r.reference, f"Plateau KS distance {r.estimate:.4f}.")
    return f"KS {r.estimate:.4f} over {r.samples} plateaus, mean valley {r.details['mean_valley']}"


def check_invariance(n_steps: int, samples: int, seed: int) -> str:
    positive = InitSpec(kind="bernoulli_ba", p_plus=0.3, p_minus=0.0, p_zero=0.7, seed=seed)
    r = invariance_audit(positive, n_steps, samples, 3)
    _require(r.within(3), f"Positive-class TV distance {r.estimate:.5f} (SE {r.stderr:.5f}).")
    for spec, k in (
        (InitSpec(kind="empty", seed=seed), 3),
        (InitSpec(kind="checkerboard", phase="mixed", seed=seed), 4),
    ):
        exact = invariance_audit(spec, n_steps, samples, k)
        _require(exact.estimate == 0.0, f"{spec.kind} TV distance {exact.estimate}.")
    return f"TV {r.estimate:.5f}"


def check_rescaling(n_list: list[int], samples: int, seed: int) -> str:
    spec = InitSpec(kind="bernoulli_ca", p=0.5, seed=seed)
    r = rescaling_experiment(spec, n_list, samples=samples)
    _require(r.details["bound_ok"], "The CA and BA filtered profiles drift apart.")
    ks = ", ".join(f"{k:.3f}" for k in r.details["ks"])
    _require(r.details["ks_shrinks"], f"Rescaled distances grow with n: {ks}.")
    return f"KS {ks}"


def check_stream_independence(seed: int, samples: int) -> str:
    p = stream_independence(seed, "init bernoulli_ca", "init bernoulli_ba", samples)
    _require(p > 1e-4, f"Labelled streams look dependent (p={p:.2e}).")
    return f"p={p:.3f}"


CHECKS = CheckCollection(
    collection=[
        Check(
            name="rule-table",
            claim="every stepper reproduces the rule 184 table",
            statement="rule 184 update",
            suite=Suite.Exact,
            runner=check_rule_table,
        ),
        Check(
            name="kernel-equivalence",
            claim="packed, array and lookup steppers agree",
            statement="rule 184 update",
            suite=Suite.Exact,
            runner=check_kernel_equivalence,
            params={"max_ring": 16, "random_rings": 10**4, "length": 4096, "seed": 0},
            quick={"max_ring": 8, "random_rings": 20, "length": 300},
        ),
        Check(
            name="transform-equivariance",
            claim="mapping to trits commutes with the dynamics, checkerboards swap",
            statement="CA to BA equivariance",
            suite=Suite.Exact,
            runner=check_transform_equivariance,
            params={"max_window": 12, "random_windows": 10**4, "length": 256, "seed": 0},
            quick={"max_window": 8, "random_windows": 100, "length": 64},
        ),
        Check(
            name="lambda-image",
            claim="the parity rule picks out exactly the images of CA 184 rows",
            statement="image of the CA to BA map",
            suite=Suite.Exact,
            runner=check_lambda_image,
            params={"max_window": 9},
            quick={"max_window": 6},
        ),
        Check(
            name="surface-shape",
            claim="sg_step and the counting profile of a BA step equal min_filter(f, 1) up to a constant",
            statement="BA to surface shape equivalence",
            suite=Suite.Exact,
            runner=check_surface_shape,
            params={"random_profiles": 10**4, "nodes": 64, "seed": 0},
            quick={"random_profiles": 50, "nodes": 16},
        ),
        Check(
            name="min-filter-semigroup",
            claim="n applications of M_1 equal M_n",
            statement="min-filter representation",
            suite=Suite.Exact,
            runner=check_min_filter_semigroup,
            params={"nodes": 11, "random_rows": 1000, "seed": 0},
            quick={"nodes": 7, "random_rows": 10},
        ),
        Check(
            name="diverging-gap-bound",
            claim="diverging neighbours at time m are at least 2m + 1 apart",
            statement="diverging gap bound",
            suite=Suite.Exact,
            runner=check_diverging_gaps,
            params={"evolutions": 10**4, "width": 64, "steps": 16, "seed": 0},
            quick={"evolutions": 20, "width": 32, "steps": 6},
        ),
        Check(
            name="matching-soundness",
            claim="bracket matching predicts every annihilation time and the survival law",
            statement="annihilation by bracket matching",
            suite=Suite.Exact,
            runner=check_matching_soundness,
            params={"max_length": 10, "random_windows": 1000, "length": 1000, "seed": 0},
            quick={"max_length": 5, "random_windows": 16, "length": 60},
        ),
        Check(
            name="ring-relaxation",
            claim="every ring loses its converging pairs within ceil(N / 2) steps",
            statement="ring relaxation time",
            suite=Suite.Exact,
            runner=check_ring_relaxation,
            params={"max_ring": 16},
            quick={"max_ring": 10},
        ),
        Check(
            name="phase-round-trip",
            claim="a traced second-class path rebuilds its phase boundary",
            statement="second-class path bijection",
            suite=Suite.Exact,
            runner=check_phase_round_trip,
            params={"windows": 1000, "half": 20, "seed": 0},
            quick={"windows": 10, "half": 8},
        ),
        Check(
            name="ca-path-conditions",
            claim="CA 184 second-class paths break the run bound exactly at consecutive unit stretches",
            statement="CA 184 path conditions",
            suite=Suite.Exact,
            runner=check_ca_path_conditions,
            params={"windows": 2000, "half": 8, "seed": 0},
            quick={"windows": 100},
        ),
        Check(
            name="one-sided-shift",
            claim="rows with one particle sign translate by one site per step",
            statement="one-sided shift law",
            suite=Suite.Exact,
            runner=check_one_sided_shift,
            params={"max_window": 14, "random_rings": 1000, "size": 256, "seed": 0},
            quick={"max_window": 8, "random_rings": 20, "size": 32},
        ),
        Check(
            name="flux-curve",
            claim="relaxed flux equals 1/2 - |1/2 - rho|",
            statement="relaxed flux law",
            suite=Suite.Stochastic,
            runner=check_flux_curve,
            params={"ring_size": 10**5, "measure_steps": 200, "seed": 0},
            quick={"ring_size": 2000, "measure_steps": 20},
        ),
        Check(
            name="decay-rate",
            claim="adjacent equal pairs decay like n^(-1/2)",
            statement="adjacent pair decay rate",
            suite=Suite.Stochastic,
            runner=check_decay_rate,
            params={"n_list": [2**j for j in range(4, 13)], "samples": 10**6, "seed": 0},
        ),
        Check(
            name="neighbor-velocity",
            claim="surviving neighbours share velocity with probability 1 / (1 + u_2n)",
            statement="surviving neighbour velocities",
            suite=Suite.Stochastic,
            runner=check_neighbor_velocity,
            params={"n_list": [1, 2, 4, 8], "samples": 2000, "seed": 0},
            quick={"n_list": [1, 2], "samples": 200},
        ),
        Check(
            name="survival",
            claim="a +1 survives to time n with probability u_2n",
            statement="survival to time n",
            suite=Suite.Stochastic,
            runner=check_survival,
            params={"n_list": [1, 2, 4, 8, 16], "samples": 10**5, "seed": 0},
            quick={"n_list": [1, 2], "samples": 5000},
        ),
        Check(
            name="plateau-cdf",
            claim="rescaled plateau lengths follow 2 sqrt(x) / (1 + x)",
            statement="plateau length law",
            suite=Suite.Stochastic,
            runner=check_plateau_cdf,
            params={"n": 1000, "samples": 1000, "seed": 0},
        ),
        Check(
            name="invariance",
            claim="one-sided and checkerboard laws are invariant",
            statement="invariant one-sided laws",
            suite=Suite.Stochastic,
            runner=check_invariance,
            params={"n_steps": 10, "samples": 10**5, "seed": 0},
            quick={"samples": 5000},
        ),
        Check(
            name="rescaling",
            claim="rescaled filtered profiles settle as n grows and CA stays within 1 of BA",
            statement="hydrodynamic rescaling",
            suite=Suite.Stochastic,
            runner=check_rescaling,
            params={"n_list": [16, 64, 256, 1024], "samples": 2000, "seed": 0},
            quick={"n_list": [4, 16], "samples": 100},
        ),
        Check(
            name="stream-independence",
            claim="labelled random streams are independent",
            statement="independent random streams",
            suite=Suite.Stochastic,
            runner=check_stream_independence,
            params={"seed": 0, "samples": 10**5},
            quick={"samples": 10**4},
        ),
    ]
)
