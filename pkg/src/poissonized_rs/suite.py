"""Registered verification battery and its JSON-configured runner.

Each criterion is a function of a :class:`SuiteContext` returning a
:class:`CriterionResult`.  ``run_suite`` validates the configuration, runs the
selected criteria and writes a report that records the seed, stream, sample
counts and the ``git describe`` of the working tree.
"""

from __future__ import annotations

import itertools
import json
import math
import subprocess
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

import jsonschema

from .correspondences import (
    LatticeConfiguration,
    PointConfiguration,
    drs,
    drs_inverse,
    rs,
    rs_inverse,
    rsk,
    rsk_inverse,
)
from .exactlaw import (
    FddQuery,
    fdd_continuous,
    fdd_discrete,
    km_block,
    levels,
    marginal_continuous,
    negative_binomial_pmf,
    plancherel_schur,
    poisson_tail,
    power_sum_diagnostic,
)
from .harness import (
    DEFAULT_THRESHOLD,
    Observable,
    VerificationReport,
    bernoulli_report,
    count_hits,
    count_polylines,
    lln_topline,
    render_ensemble,
    tally_diagrams,
    top_line,
    verify_arches,
)
from .partitions import (
    SkewShape,
    count_ssyt,
    dim_skew_standard,
    dim_standard,
    enumerate_ssyt,
    enumerate_standard,
    partitions,
    subdiagrams,
)
from .sampling import RngSpec, sample_geometric_lattice, sample_poisson_square
from .trajectories import (
    check_staircase,
    curve_process,
    diagram_at,
    ensemble_is_ordered,
    full_trajectory,
)


class ConfigError(ValueError):
    """Suite configuration failed schema validation."""


CRITERIA_NAMES = (
    "bijections",
    "dimensions",
    "curve_identity",
    "fdd_continuous",
    "marginals",
    "karlin_mcgregor",
    "arches",
    "fdd_discrete",
    "discrete_convergence",
    "lln_topline",
    "figure",
)

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "stream": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "streams": {"type": "integer", "minimum": 1},
        "workers": {"type": "integer", "minimum": 1},
        "threshold": {"type": "number", "exclusiveMinimum": 0},
        "samples": {"type": "integer", "minimum": 1},
        "arch_samples": {"type": "integer", "minimum": 1},
        "criteria": {"type": "array", "items": {"enum": list(CRITERIA_NAMES)}, "uniqueItems": True},
        "experiments": {"type": "array", "items": {"$ref": "#/$defs/experiment"}},
        "output": {"type": "string"},
    },
    "$defs": {
        "experiment": {
            "type": "object",
            "additionalProperties": False,
            "required": ["model", "theta", "pins"],
            "properties": {
                "name": {"type": "string"},
                "model": {"enum": ["continuous", "discrete"]},
                "theta": {"type": "number", "exclusiveMinimum": 0},
                "k": {"type": "integer", "minimum": 1},
                "pins": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "array",
                        "prefixItems": [
                            {"type": "number"},
                            {"type": "array", "items": {"type": "integer", "minimum": 0}},
                        ],
                        "minItems": 2,
                        "maxItems": 2,
                    },
                },
                "samples": {"type": "integer", "minimum": 1},
            },
            "if": {"properties": {"model": {"const": "discrete"}}},
            "then": {"required": ["k"]},
        }
    },
}


@dataclass
class SuiteContext:
    seed: int = 20240611
    stream: int = 0
    streams: int = 8
    workers: int = 1
    threshold: float = DEFAULT_THRESHOLD
    samples: int = 1_000_000
    arch_samples: int = 100_000
    _memo: dict = field(default_factory=dict, repr=False)

    def rng(self, offset: int) -> RngSpec:
        # criteria draw from disjoint stream blocks
        return RngSpec(self.seed, self.stream + (offset << 20))


@dataclass
class CriterionResult:
    name: str
    passed: bool
    summary: str
    seconds: float = 0.0
    details: dict = field(default_factory=dict)
    reports: list[VerificationReport] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "pass": self.passed,
            "summary": self.summary,
            "seconds": round(self.seconds, 3),
            "details": self.details,
            "reports": [r.to_json() for r in self.reports],
        }

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.summary} ({self.seconds:.1f}s)"


REGISTRY: dict[str, Callable[[SuiteContext], CriterionResult]] = {}


def criterion(name: str):
    def wrap(fn):
        REGISTRY[name] = fn
        return fn

    return wrap


def _timed(ctx: SuiteContext, name: str) -> CriterionResult:
    start = time.perf_counter()
    result = REGISTRY[name](ctx)
    result.seconds = time.perf_counter() - start
    budget = result.details.get("time_budget_s")
    if budget is not None and result.seconds > budget:
        result.passed = False
        result.summary += f"; exceeded {budget}s budget"
    return result


def _verdict(reports) -> tuple[bool, str]:
    worst = max((abs(r.z_score) for r in reports), default=math.inf)
    ok = bool(reports) and all(r.passed for r in reports)
    return ok, f"{len(reports)} checks, max |z| = {worst:.2f}"


# -- 1 ------------------------------------------------------------------------


@criterion("bijections")
def check_bijections(ctx: SuiteContext) -> CriterionResult:
    failures = Counter()
    perms = 0
    for n in range(8):
        for perm in itertools.permutations(range(1, n + 1)):
            perms += 1
            if rs_inverse(*rs(perm)) != perm:
                failures["rs"] += 1
    configs = 0
    base = ctx.rng(1)
    for i in range(10_000):
        config = sample_poisson_square(2.0, base.substream(i))
        configs += 1
        if drs_inverse(drs(config)) != config:
            failures["drs"] += 1
    small = 0
    for entries in itertools.product(range(5), repeat=4):
        if sum(entries) > 4:
            continue
        small += 1
        m = LatticeConfiguration(((entries[0], entries[1]), (entries[2], entries[3])), 1.0, 2)
        if rsk_inverse(rsk(m), 1.0) != m:
            failures["rsk 2x2"] += 1
    base = ctx.rng(2)
    for i in range(10_000):
        m = sample_geometric_lattice(2.0, 3, base.substream(i))
        if rsk_inverse(rsk(m), m.theta) != m:
            failures["rsk 3x3"] += 1
    total = sum(failures.values())
    summary = f"{perms} permutations, {configs} point sets, {small} + 10000 matrices; {total} failures"
    return CriterionResult("bijections", total == 0, summary, details={"failures": dict(failures), "time_budget_s": 10})


# -- 2 ------------------------------------------------------------------------


@criterion("dimensions")
def check_dimensions(ctx: SuiteContext) -> CriterionResult:
    mismatches = []
    checked = Counter()
    for n in range(9):
        for lam in partitions(n):
            checked["hook"] += 1
            if dim_standard(lam) != len(enumerate_standard(lam)):
                mismatches.append(("hook", tuple(lam)))
            for mu in subdiagrams(lam):
                checked["aitken"] += 1
                skew = SkewShape(lam, mu)
                if dim_skew_standard(skew) != len(enumerate_standard(skew)):
                    mismatches.append(("aitken", tuple(lam), tuple(mu)))
                if n <= 6:
                    for k in range(1, 5):
                        checked["jacobi_trudi"] += 1
                        if count_ssyt(skew, k) != len(enumerate_ssyt(skew, k)):
                            mismatches.append(("jacobi_trudi", tuple(lam), tuple(mu), k))
    summary = ", ".join(f"{k} {v}" for k, v in checked.items()) + f"; {len(mismatches)} mismatches"
    return CriterionResult(
        "dimensions", not mismatches, summary, details={"mismatches": mismatches[:20], "time_budget_s": 60}
    )


# -- 3 ------------------------------------------------------------------------


@criterion("curve_identity")
def check_curve_identity(ctx: SuiteContext) -> CriterionResult:
    theta = 1.0
    grid = [-theta + 2 * theta * i / 49 for i in range(50)]
    base = ctx.rng(3)
    mismatches = []
    probes = 0
    for i in range(1000):
        config = sample_poisson_square(theta, base.substream(i))
        pair = drs(config)
        events = [t for t in full_trajectory(pair).times]
        events += [y - theta for y in config.ys] + [theta - x for x in config.xs]
        for t in grid + events:
            t = min(max(t, -theta), theta)
            probes += 1
            if curve_process(config, t) != diagram_at(pair, t):
                mismatches.append((i, t))
    return CriterionResult(
        "curve_identity",
        not mismatches,
        f"1000 configurations, {probes} probes, {len(mismatches)} mismatches",
        details={"mismatches": mismatches[:20]},
    )


# -- 4 and 5 share one sampling pass ------------------------------------------


CONTINUOUS_QUERIES = (
    FddQuery(1, ((0, ()),)),
    FddQuery(1, ((0, (1,)),)),
    FddQuery(1, ((-0.5, (1,)), (0, (1,)))),
    FddQuery(1, ((-0.5, (1,)), (0, (1,)), (0.5, (1,)))),
    FddQuery(1, ((0, (2,)), (0.25, (1,)))),
    FddQuery(1, ((-0.25, (1,)), (0, (1, 1)), (0.5, (1,)))),
    FddQuery(1, ((-0.5, ()), (0, (2, 1)), (0.75, (1,)))),
)
MARGINAL_TIMES = (-0.5, 0.25)
MARGINAL_SHAPES = tuple(lam for n in range(4) for lam in partitions(n))


def _continuous_observables():
    obs = [Observable.from_query(q) for q in CONTINUOUS_QUERIES]
    margins = [Observable.marginal(lam, t, 1.0) for t in MARGINAL_TIMES for lam in MARGINAL_SHAPES]
    return obs, margins


def _continuous_pass(ctx: SuiteContext):
    if "continuous" not in ctx._memo:
        obs, margins = _continuous_observables()
        times = sorted({t for ob in obs + margins for t in ob.times})
        start = time.perf_counter()
        tally = tally_diagrams(1.0, times, ctx.samples, ctx.rng(4), None, ctx.streams, ctx.workers)
        ctx._memo["continuous"] = (times, tally, time.perf_counter() - start)
    return ctx._memo["continuous"]


@criterion("fdd_continuous")
def check_fdd_continuous(ctx: SuiteContext) -> CriterionResult:
    times, tally, seconds = _continuous_pass(ctx)
    obs, _ = _continuous_observables()
    reports = [bernoulli_report(ob.name, count_hits(tally, times, ob), ctx.samples, ob.exact, ctx.threshold) for ob in obs]
    ok, summary = _verdict(reports)
    ok = ok and len(reports) >= 5 and seconds <= 120
    return CriterionResult(
        "fdd_continuous", ok, f"{summary}, {ctx.samples} samples, sampling {seconds:.1f}s",
        details={"sampling_seconds": seconds}, reports=reports,
    )


def cauchy_marginal_sum(shape, t: float, theta: float = 1.0, cap: int = 14) -> tuple[float, float]:
    """Sum of the two-pin law over the time-0 diagram, truncated at size ``cap``.

    Returns (partial sum, tail bound); the omitted events all have more than
    ``cap`` points, so their mass is at most P(Poisson(theta^2) > cap).
    """
    total = 0.0
    for n in range(sum(shape), cap + 1):
        for nu in partitions(n):
            try:
                query = FddQuery(theta, ((t, shape), (0, nu)))
            except ValueError:
                continue
            total += fdd_continuous(query, check=False).probability
    return total, poisson_tail(theta * theta, cap)


@criterion("marginals")
def check_marginals(ctx: SuiteContext) -> CriterionResult:
    worst = 0.0
    bound = 0.0
    for t in MARGINAL_TIMES:
        for lam in MARGINAL_SHAPES:
            partial, tail = cauchy_marginal_sum(lam, t)
            worst = max(worst, abs(partial - marginal_continuous(lam, t, 1.0).probability))
            bound = max(bound, tail)
    times, tally, _ = _continuous_pass(ctx)
    _, margins = _continuous_observables()
    reports = [bernoulli_report(ob.name, count_hits(tally, times, ob), ctx.samples, ob.exact, ctx.threshold) for ob in margins]
    ok, summary = _verdict(reports)
    ok = ok and worst <= 1e-8
    return CriterionResult(
        "marginals", ok, f"Cauchy sum error {worst:.2e} (tail bound {bound:.1e}); MC {summary}",
        details={"cauchy_max_error": worst, "tail_bound": bound}, reports=reports,
    )


# -- 6 ------------------------------------------------------------------------


@criterion("karlin_mcgregor")
def check_karlin_mcgregor(ctx: SuiteContext) -> CriterionResult:
    t = Fraction(3, 7)
    bad = []
    pairs = 0
    for n in range(7):
        for lam in partitions(n):
            for mu in subdiagrams(lam):
                target = plancherel_schur(SkewShape(lam, mu), t)
                for lines in (max(len(lam), 1), len(lam) + 1):
                    lo, hi = levels(mu, lines), levels(lam, lines)
                    pairs += 1
                    if km_block(lo, hi, t, "up") != target or km_block(hi, lo, t, "down") != target:
                        bad.append((tuple(lam), tuple(mu), lines))
    return CriterionResult("karlin_mcgregor", not bad, f"{pairs} level pairs, {len(bad)} mismatches", details={"mismatches": bad[:20]})


# -- 7 ------------------------------------------------------------------------


@criterion("arches")
def check_arches(ctx: SuiteContext) -> CriterionResult:
    reports = []
    for N in (1, 2):
        reports += verify_arches(0.5, N, (-0.25, 0.0, 0.25), ctx.arch_samples, ctx.rng(7).substream(N), ctx.threshold)
    ok, summary = _verdict(reports)
    targets = [r for r in reports if r.name.endswith("t=0:(0,)") or r.name.endswith("t=0:(0, -1)")]
    ok = ok and len(targets) == 2
    return CriterionResult("arches", ok, f"{summary}, {ctx.arch_samples} accepted per side", reports=reports)


# -- 8 ------------------------------------------------------------------------


DISCRETE_QUERIES = (
    FddQuery(0.5, ((0, ()),), 2),
    FddQuery(0.5, ((0, (1,)),), 2),
    FddQuery(0.5, ((0, (1, 1)),), 2),
    FddQuery(0.5, ((-0.25, (1,)), (0, (2,)), (0.25, (1,))), 2),
    FddQuery(0.5, ((-0.1, (1,)), (0, (1,)), (0.3, ())), 2),
)


def discrete_normalization(theta: float = 0.5, k: int = 2, cap: int = 12) -> tuple[float, float, int]:
    """(partial sum over |nu| <= cap, tail bound, number of sizes disagreeing with the count law)."""
    q = (theta / k) ** 2
    total = 0.0
    bad_levels = 0
    for n in range(cap + 1):
        level = 0.0
        for nu in partitions(n):
            level += fdd_discrete(FddQuery(theta, ((0, nu),), k), check=False).probability
        if not math.isclose(level, negative_binomial_pmf(k * k, q, n), rel_tol=1e-12, abs_tol=1e-300):
            bad_levels += 1
        total += level
    tail = 1.0 - sum(negative_binomial_pmf(k * k, q, n) for n in range(cap + 1))
    return total, max(tail, 0.0), bad_levels


@criterion("fdd_discrete")
def check_fdd_discrete(ctx: SuiteContext) -> CriterionResult:
    obs = [Observable.from_query(q) for q in DISCRETE_QUERIES]
    times = sorted({t for ob in obs for t in ob.times})
    tally = tally_diagrams(0.5, times, ctx.samples, ctx.rng(8), 2, ctx.streams, ctx.workers)
    reports = [bernoulli_report(ob.name, count_hits(tally, times, ob), ctx.samples, ob.exact, ctx.threshold) for ob in obs]
    ok, summary = _verdict(reports)
    total, tail, bad_levels = discrete_normalization()
    norm_ok = abs(1 - total) <= 1e-6 + tail and bad_levels == 0
    return CriterionResult(
        "fdd_discrete", ok and norm_ok,
        f"{summary}; normalization 1 - {1 - total:.2e} (tail {tail:.1e})",
        details={"normalization": total, "tail_bound": tail, "levels_off": bad_levels}, reports=reports,
    )


# -- 9 ------------------------------------------------------------------------


CONVERGENCE_KS = (10, 100, 1000, 10_000)


def convergence_errors(query_pins, theta: float = 1.0) -> list[float]:
    exact = fdd_continuous(FddQuery(theta, query_pins)).probability
    return [abs(fdd_discrete(FddQuery(theta, query_pins, k)).probability - exact) for k in CONVERGENCE_KS]


def power_sum_errors(partition, theta: float = 1.0, x: float = 0.25, y: float = 0.8) -> list[float]:
    out = []
    for k in CONVERGENCE_KS[:3]:
        finite, limit = power_sum_diagnostic(partition, theta, k, x, y)
        out.append(abs(finite - limit))
    return out


@criterion("discrete_convergence")
def check_discrete_convergence(ctx: SuiteContext) -> CriterionResult:
    details = {}
    ok = True
    for pins in (((0, (1,)),), ((-0.5, (1,)), (0, (1,)))):
        errs = convergence_errors(pins)
        monotone = all(a > b for a, b in zip(errs, errs[1:]))
        ok &= monotone and errs[-1] <= 1e-3
        details[str(pins)] = errs
    for lam in ((1, 1), (2,), (1,)):
        errs = power_sum_errors(lam)
        # O(1/k): k * error stays bounded by a fixed multiple of its first value
        scaled = [e * k for e, k in zip(errs, CONVERGENCE_KS)]
        ok &= all(s <= 2 * scaled[0] + 1e-12 for s in scaled) and scaled[0] <= 10
        details[f"power_sum {lam}"] = errs
    worst = max(v[-1] for key, v in details.items() if not key.startswith("power"))
    return CriterionResult("discrete_convergence", ok, f"fdd error at k=1e4: {worst:.2e}", details=details)


# -- 10 -----------------------------------------------------------------------


@criterion("lln_topline")
def check_lln(ctx: SuiteContext) -> CriterionResult:
    rows = lln_topline(100.0, (0.0, 0.5, -0.5), ctx.rng(10), draws=20)
    ok = all(r.passed for r in rows)
    summary = "; ".join(f"tau={r.tau:+g} ratio {r.ratio:.3f} vs {r.target:.3f}" for r in rows)
    return CriterionResult("lln_topline", ok, summary, details={"rows": [r.to_json() for r in rows]})


# -- 11 -----------------------------------------------------------------------


def figure_draw(theta: float, rng: RngSpec, out: str | Path | None = None) -> dict:
    config = sample_poisson_square(theta, rng)
    trajectory = full_trajectory(drs(config))
    check_staircase(trajectory)
    svg = render_ensemble(trajectory, 0, "svg", out)
    diagrams = [d for _, d in trajectory.events]
    rows = max((len(d) for d in diagrams), default=0)
    return {
        "points": len(config),
        "top_line_max": max(d.row(0) - 1 for d in diagrams),
        "top_line_at_zero": top_line(config, 0.0),
        "non_intersecting": ensemble_is_ordered(diagrams, rows + 1),
        "polylines": count_polylines(svg),
        "moving_lines": len(trajectory.lines()),
        "svg_bytes": len(svg),
    }


@criterion("figure")
def check_figure(ctx: SuiteContext) -> CriterionResult:
    info = figure_draw(40.0, ctx.rng(11))
    ok = (
        1440 <= info["points"] <= 1760
        and 65 <= info["top_line_max"] <= 95
        and info["non_intersecting"]
        and info["polylines"] == info["moving_lines"] > 0
    )
    summary = f"{info['points']} points, top line max {info['top_line_max']}, {info['polylines']} lines"
    return CriterionResult("figure", ok, summary, details={**info, "time_budget_s": 5})


# -- custom experiments and the runner ----------------------------------------


def run_experiment(experiment: dict, ctx: SuiteContext, index: int) -> VerificationReport:
    theta = experiment["theta"]
    k = experiment.get("k") if experiment["model"] == "discrete" else None
    query = FddQuery(theta, tuple((p[0], tuple(p[1])) for p in experiment["pins"]), k)
    ob = Observable.from_query(query, experiment.get("name"))
    samples = experiment.get("samples", ctx.samples)
    tally = tally_diagrams(theta, ob.times, samples, ctx.rng(100 + index), k, ctx.streams, ctx.workers)
    return bernoulli_report(ob.name, count_hits(tally, ob.times, ob), samples, ob.exact, ctx.threshold)


def git_describe() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=Path(__file__).resolve().parent, capture_output=True, text=True, timeout=10,
        )
    except (OSError, subprocess.SubprocessError):
        return "unknown"
    return out.stdout.strip() or "unknown"


def load_config(source) -> dict:
    if isinstance(source, (str, Path)):
        try:
            config = json.loads(Path(source).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {source}: {exc}") from exc
    else:
        config = dict(source or {})
    try:
        jsonschema.validate(config, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"invalid config: {exc.message}") from exc
    return config


def run_suite(config=None, echo: Callable[[str], None] | None = print) -> tuple[int, dict]:
    """Run the configured criteria and experiments; returns (exit code, report).

    Exit code 0 when everything passes and 1 otherwise.  Schema violations
    raise :class:`ConfigError` (exit code 2 at the command line).
    """
    config = load_config(config)
    ctx = SuiteContext(**{k: config[k] for k in ("seed", "stream", "streams", "workers", "threshold", "samples", "arch_samples") if k in config})
    names = config.get("criteria", list(CRITERIA_NAMES) if "experiments" not in config else [])
    results = []
    for name in names:
        result = _timed(ctx, name)
        results.append(result)
        if echo:
            echo(result.line())
    experiments = []
    for i, experiment in enumerate(config.get("experiments", [])):
        try:
            report = run_experiment(experiment, ctx, i)
        except ValueError as exc:
            raise ConfigError(f"experiment {i}: {exc}") from exc
        experiments.append(report)
        if echo:
            echo(f"[{'PASS' if report.passed else 'FAIL'}] {report.name}: z = {report.z_score:.2f}")
    passed = all(r.passed for r in results) and all(r.passed for r in experiments)
    report = {
        "seed": ctx.seed,
        "stream": ctx.stream,
        "streams": ctx.streams,
        "samples": ctx.samples,
        "arch_samples": ctx.arch_samples,
        "threshold": ctx.threshold,
        "git_describe": git_describe(),
        "pass": passed,
        "criteria": [r.to_json() for r in results],
        "experiments": [r.to_json() for r in experiments],
    }
    if config.get("output"):
        Path(config["output"]).write_text(json.dumps(report, indent=2, default=str))
    return (0 if passed else 1), report
