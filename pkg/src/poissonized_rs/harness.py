"""Monte-Carlo estimators checked against the closed forms in :mod:`exactlaw`.

Sampling is split into a fixed number of streams; stream ``i`` draws from
``rng.substream(i)`` and the per-stream tallies are merged by summation, so
the counts do not depend on how many worker processes run the streams.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

from .correspondences import longest_increasing_subsequence, row_insert
from .exactlaw import FddQuery, fdd_continuous, fdd_discrete, marginal_continuous
from .partitions import EMPTY, YoungDiagram
from .sampling import (
    RejectionBudgetExceeded,
    RngSpec,
    _ArchDrawer,
    arches_ordered,
    iter_geometric_lattices,
    iter_poisson_squares,
    sample_poisson_square,
)
from .trajectories import (
    DiagramTrajectory,
    lattice_index,
    left_clock,
    rectangle,
    right_clock,
    shape_below,
)

DEFAULT_THRESHOLD = 4.0


@dataclass(frozen=True)
class VerificationReport:
    """Bernoulli match count compared with a reference probability.

    ``stderr`` is sqrt(p(1-p)/n) at the empirical frequency.  When the
    reference is itself estimated (two-sample comparisons), ``stderr`` and
    ``z_score`` are the pooled ones and ``exact`` holds the other frequency.
    """

    name: str
    samples: int
    hits: int
    empirical: float
    stderr: float
    exact: float
    z_score: float
    threshold: float = DEFAULT_THRESHOLD
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def passed(self) -> bool:
        return abs(self.z_score) <= self.threshold

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "samples": self.samples,
            "hits": self.hits,
            "empirical": self.empirical,
            "stderr": self.stderr,
            "exact": self.exact,
            "z_score": self.z_score,
            "threshold": self.threshold,
            "pass": self.passed,
            **self.extra,
        }


def bernoulli_report(name: str, hits: int, samples: int, exact: float, threshold: float = DEFAULT_THRESHOLD, **extra) -> VerificationReport:
    p_hat = hits / samples
    stderr = math.sqrt(p_hat * (1 - p_hat) / samples)
    # a degenerate empirical frequency has zero spread; fall back to the
    # binomial spread at the reference value
    scale = stderr or math.sqrt(exact * (1 - exact) / samples)
    diff = p_hat - exact
    z = 0.0 if diff == 0 else (diff / scale if scale else math.copysign(math.inf, diff))
    return VerificationReport(name, samples, hits, p_hat, stderr, exact, z, threshold, extra)


def pooled_report(name: str, hits_a: int, n_a: int, hits_b: int, n_b: int, threshold: float = DEFAULT_THRESHOLD, **extra) -> VerificationReport:
    """Two-sample z-score with the pooled proportion."""
    pa, pb = hits_a / n_a, hits_b / n_b
    pooled = (hits_a + hits_b) / (n_a + n_b)
    stderr = math.sqrt(pooled * (1 - pooled) * (1 / n_a + 1 / n_b))
    diff = pa - pb
    z = 0.0 if diff == 0 else (diff / stderr if stderr else math.copysign(math.inf, diff))
    return VerificationReport(name, n_a, hits_a, pa, stderr, pb, z, threshold, {"other_samples": n_b, "other_hits": hits_b, **extra})


# -- observables -------------------------------------------------------------


@dataclass(frozen=True)
class Observable:
    """Event {diagram(times[i]) == diagrams[i] for all i} with its exact probability."""

    name: str
    times: tuple[float, ...]
    diagrams: tuple[YoungDiagram, ...]
    exact: float

    @classmethod
    def from_query(cls, query: FddQuery, name: str | None = None) -> "Observable":
        exact = fdd_continuous(query) if query.discrete_k is None else fdd_discrete(query)
        times = tuple(float(t) for t, _ in query.pins)
        diagrams = tuple(d for _, d in query.pins)
        label = name or "fdd " + " ".join(f"{t:g}:{tuple(d)}" for t, d in query.pins)
        return cls(label, times, diagrams, exact.probability)

    @classmethod
    def marginal(cls, shape, t: float, theta: float) -> "Observable":
        shape = YoungDiagram(shape)
        exact = marginal_continuous(shape, t, theta).probability
        return cls(f"marginal t={t:g} {tuple(shape)}", (float(t),), (shape,), exact)


def _split(samples: int, streams: int) -> list[int]:
    base, extra = divmod(samples, streams)
    return [base + (i < extra) for i in range(streams)]


def _probes(theta: float, times) -> list[tuple[bool, float]]:
    return [(t <= 0, left_clock(theta, t) if t <= 0 else right_clock(theta, t)) for t in times]


def diagrams_from_points(xs, ys, probes) -> tuple[YoungDiagram, ...]:
    """Diagrams at the probed times, straight from the raw coordinates.

    Inserting the y's with the x's as labels leaves the decorations in place
    of the tableau entries, so thresholds on decorations are thresholds on
    entries; this agrees with ``diagram_at(drs(config), t)``.
    """
    if not xs:
        return (EMPTY,) * len(probes)
    p, q = row_insert(ys, xs)
    return tuple(shape_below(p if left else q, clock) for left, clock in probes)


def _lattice_probes(theta: float, k: int, times) -> list[tuple[bool, int]]:
    th = Fraction(theta)
    return [
        (t <= 0, lattice_index(th, k, th + Fraction(t)) if t <= 0 else lattice_index(th, k, th - Fraction(t)))
        for t in times
    ]


def diagrams_from_counts(flat, k: int, probes) -> tuple[YoungDiagram, ...]:
    """Lattice analogue of :func:`diagrams_from_points` for a flattened k x k count matrix."""
    top, bottom = [], []
    for idx, c in enumerate(flat):
        if c:
            a, b = divmod(idx, k)
            top.extend([a + 1] * c)
            bottom.extend([b + 1] * c)
    if not top:
        return (EMPTY,) * len(probes)
    p, q = row_insert(bottom, top)
    return tuple(shape_below(p if left else q, m) for left, m in probes)


def _continuous_tally(theta: float, times: tuple[float, ...], samples: int, rng: RngSpec) -> Counter:
    probes = _probes(theta, times)
    tally: Counter = Counter()
    for xs, ys in iter_poisson_squares(theta, samples, rng):
        tally[diagrams_from_points(xs, ys, probes)] += 1
    return tally


def _discrete_tally(theta: float, k: int, times: tuple[float, ...], samples: int, rng: RngSpec) -> Counter:
    probes = _lattice_probes(theta, k, times)
    tally: Counter = Counter()
    for matrix in iter_geometric_lattices(theta, k, samples, rng):
        tally[diagrams_from_counts(matrix.ravel().tolist(), k, probes)] += 1
    return tally


def _tally_job(args) -> Counter:
    model, theta, k, times, samples, rng = args
    if model == "continuous":
        return _continuous_tally(theta, times, samples, rng)
    return _discrete_tally(theta, k, times, samples, rng)


def tally_diagrams(
    theta: float,
    times: Sequence[float],
    samples: int,
    rng: RngSpec,
    k: int | None = None,
    streams: int = 1,
    workers: int = 1,
) -> Counter:
    """Joint counts of the diagrams at ``times`` over ``samples`` draws.

    ``k`` selects the lattice model.  Stream ``i`` covers a fixed share of the
    samples, so the result depends on ``streams`` but not on ``workers``.
    """
    if samples < 1 or streams < 1:
        raise ValueError("samples and streams must be positive")
    times = tuple(float(t) for t in times)
    for t in times:
        if not -theta <= t <= theta:
            raise ValueError(f"time {t} outside [-{theta}, {theta}]")
    model = "continuous" if k is None else "discrete"
    jobs = [(model, float(theta), k, times, n, rng.substream(i)) for i, n in enumerate(_split(samples, streams)) if n]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_tally_job, jobs))
    else:
        parts = [_tally_job(job) for job in jobs]
    total: Counter = Counter()
    for part in parts:
        total.update(part)
    return total


def count_hits(tally: Counter, times: Sequence[float], observable: Observable) -> int:
    index = {t: i for i, t in enumerate(times)}
    cols = [index[t] for t in observable.times]
    want = observable.diagrams
    return sum(c for key, c in tally.items() if tuple(key[i] for i in cols) == want)


def estimate_observables(
    observables: Sequence[Observable],
    theta: float,
    samples: int,
    rng: RngSpec,
    k: int | None = None,
    streams: int = 1,
    workers: int = 1,
    threshold: float = DEFAULT_THRESHOLD,
) -> list[VerificationReport]:
    """One sampling pass scoring every observable."""
    times = sorted({t for ob in observables for t in ob.times})
    tally = tally_diagrams(theta, times, samples, rng, k, streams, workers)
    return [
        bernoulli_report(ob.name, count_hits(tally, times, ob), samples, ob.exact, threshold)
        for ob in observables
    ]


def estimate_fdds(queries: Sequence[FddQuery], samples: int, rng: RngSpec, streams: int = 1, workers: int = 1, threshold: float = DEFAULT_THRESHOLD) -> list[VerificationReport]:
    if not queries:
        return []
    models = {(q.theta, q.discrete_k) for q in queries}
    if len(models) != 1:
        raise ValueError("queries in one pass must share theta and lattice size")
    theta, k = models.pop()
    obs = [Observable.from_query(q) for q in queries]
    return estimate_observables(obs, theta, samples, rng, k, streams, workers, threshold)


def estimate_fdd(query: FddQuery, samples: int, rng: RngSpec, streams: int = 1, workers: int = 1, threshold: float = DEFAULT_THRESHOLD) -> VerificationReport:
    return estimate_fdds([query], samples, rng, streams, workers, threshold)[0]


# -- arches versus conditioned lines ----------------------------------------


def _line_side(theta: float, N: int, times: tuple[float, ...], samples: int, rng: RngSpec) -> Counter:
    probes = _probes(theta, times + (0.0,))
    tally: Counter = Counter()
    accepted = 0
    stream = 0
    while accepted < samples:
        for xs, ys in iter_poisson_squares(theta, max(1024, samples), rng.substream(stream)):
            shapes = diagrams_from_points(xs, ys, probes)
            if len(shapes[-1]) > N:
                continue
            tally[tuple(tuple(d.row(j) - j for j in range(N)) for d in shapes[:-1])] += 1
            accepted += 1
            if accepted == samples:
                break
        stream += 1
    return tally


def _arch_side(theta: float, N: int, times: tuple[float, ...], samples: int, rng: RngSpec, max_attempts: int) -> Counter:
    drawer = _ArchDrawer(float(theta), rng.generator())
    tally: Counter = Counter()
    attempts = 0
    accepted = 0
    while accepted < samples:
        attempts += 1
        if attempts > max_attempts:
            raise RejectionBudgetExceeded(f"{accepted} of {samples} arch ensembles after {max_attempts} attempts")
        arches = [drawer.arch(1 - i, n) for i, n in enumerate(drawer.counts(N).tolist(), start=1)]
        if not arches_ordered(arches):
            continue
        tally[tuple(tuple(a.value_at(t) for a in arches) for t in times)] += 1
        accepted += 1
    return tally


def verify_arches(
    theta: float,
    N: int,
    times: Sequence[float] = (0.0,),
    samples: int = 100_000,
    rng: RngSpec = RngSpec(),
    threshold: float = DEFAULT_THRESHOLD,
    min_mass: float = 1e-3,
    max_attempts: int = 10**7,
) -> list[VerificationReport]:
    """Two-sided comparison of non-intersecting arches with conditioned lines.

    The line side keeps decorated-RS samples whose diagram at time 0 has at
    most ``N`` rows (every line below ``N`` frozen) and records
    ``lambda_j(t) - j + 1``, the arch coordinates, for ``j <= N``.  One report
    per joint outcome, and per single-time outcome, with pooled frequency at
    least ``min_mass``.
    """
    if not 1 <= N <= 3:
        raise ValueError("N must be between 1 and 3")
    if not 0 < theta <= 1:
        raise ValueError("theta must lie in (0, 1]")
    times = tuple(float(t) for t in times)
    lines = _line_side(theta, N, times, samples, rng.substream(0))
    arches = _arch_side(theta, N, times, samples, rng.substream(1 << 32), max_attempts)
    # joint outcomes first, then the single-time marginals
    views = [tuple(range(len(times)))]
    if len(times) > 1:
        views += [(i,) for i in range(len(times))]
    reports = []
    for cols in views:
        a_view, l_view = Counter(), Counter()
        for src, dst in ((arches, a_view), (lines, l_view)):
            for key, c in src.items():
                dst[tuple(key[i] for i in cols)] += c
        for key in sorted(set(a_view) | set(l_view)):
            a, b = a_view.get(key, 0), l_view.get(key, 0)
            if (a + b) / (2 * samples) < min_mass:
                continue
            label = ", ".join(f"t={times[i]:g}:{v}" for i, v in zip(cols, key))
            reports.append(pooled_report(f"arches N={N} theta={theta:g} {label}", a, samples, b, samples, threshold))
    return reports


# -- law of large numbers for the top line ----------------------------------


@dataclass(frozen=True)
class LlnRow:
    tau: float
    ratio: float
    target: float
    draws: int
    tolerance: float

    @property
    def error(self) -> float:
        return abs(self.ratio - self.target)

    @property
    def passed(self) -> bool:
        return self.error <= self.tolerance

    def to_json(self) -> dict:
        return {
            "tau": self.tau,
            "ratio": self.ratio,
            "target": self.target,
            "relative_error": self.error / self.target if self.target else math.inf,
            "draws": self.draws,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


def top_line(config, t: float) -> int:
    """M(1; t) = lambda_1(t) - 1, with lambda_1 the longest increasing chain in the rectangle."""
    u, v = rectangle(config.theta, t)
    return longest_increasing_subsequence([y for x, y in config.points if x <= u and y <= v]) - 1


def lln_topline(
    theta: float,
    taus: Sequence[float],
    rng: RngSpec = RngSpec(),
    draws: int = 20,
    rel_tol: float = 0.05,
    edge_abs_tol: float = 0.1,
    edge: float = 0.9,
) -> list[LlnRow]:
    """Average of M(1; tau theta)/theta over ``draws`` configurations against 2 sqrt(1 - |tau|).

    Tolerance is ``rel_tol`` relative, or ``edge_abs_tol`` absolute when
    ``|tau| >= edge`` where the target itself is small.
    """
    for tau in taus:
        if not -1 < tau < 1:
            raise ValueError("tau must lie in (-1, 1)")
    sums = [0.0] * len(taus)
    for d in range(draws):
        config = sample_poisson_square(theta, rng.substream(d))
        for i, tau in enumerate(taus):
            sums[i] += top_line(config, tau * theta) / theta
    rows = []
    for tau, s in zip(taus, sums):
        target = 2 * math.sqrt(1 - abs(tau))
        tol = edge_abs_tol if abs(tau) >= edge else rel_tol * target
        rows.append(LlnRow(tau, s / draws, target, draws, tol))
    return rows


# -- rendering ---------------------------------------------------------------


def _line_paths(trajectory: DiagramTrajectory, top_lines: int) -> dict[int, list[tuple[float, int]]]:
    theta = trajectory.theta
    steps = trajectory.lines()
    indices = range(1, top_lines + 1) if top_lines else steps.keys()
    paths = {}
    for i in indices:
        value = -i
        pts = [(-theta, value)]
        for time, new in steps.get(i, []):
            # horizontal run to the event, then the jump
            pts.append((time, value))
            pts.append((time, new))
            value = new
        pts.append((theta, value))
        paths[i] = pts
    return paths


def render_ensemble(trajectory: DiagramTrajectory, top_lines: int = 0, format: str = "svg", out: str | Path | None = None, width: int = 800, height: int = 500) -> str:
    """Step plot of the lines ``lambda_i(t) - i``; all moving lines when ``top_lines`` is 0."""
    if format == "csv":
        text = trajectory.to_csv()
    elif format == "svg":
        text = _svg(trajectory, _line_paths(trajectory, top_lines), width, height)
    else:
        raise ValueError(f"unknown format {format!r}")
    if out is not None:
        Path(out).write_text(text)
    return text


def _svg(trajectory: DiagramTrajectory, paths, width: int, height: int) -> str:
    theta = trajectory.theta
    margin = 30
    values = [v for pts in paths.values() for _, v in pts] or [0, -1]
    lo, hi = min(values), max(values)
    if lo == hi:
        hi = lo + 1

    def sx(t):
        return margin + (t + theta) / (2 * theta) * (width - 2 * margin)

    def sy(v):
        return height - margin - (v - lo) / (hi - lo) * (height - 2 * margin)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f"<title>{escape(f'line ensemble, theta={theta:g}')}</title>",
        f'<line class="axis" x1="{margin}" y1="{height - margin}" x2="{width - margin}" y2="{height - margin}" stroke="black"/>',
        f'<line class="axis" x1="{sx(0):.2f}" y1="{margin}" x2="{sx(0):.2f}" y2="{height - margin}" stroke="gray" stroke-dasharray="4 4"/>',
        f'<text x="{margin}" y="{height - 8}" font-size="12">{-theta:g}</text>',
        f'<text x="{width - margin}" y="{height - 8}" font-size="12" text-anchor="end">{theta:g}</text>',
    ]
    for i, pts in paths.items():
        coords = " ".join(f"{sx(t):.2f},{sy(v):.2f}" for t, v in pts)
        parts.append(f'<polyline data-line="{i}" points="{coords}" fill="none" stroke="black" stroke-width="0.6"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def count_polylines(svg: str) -> int:
    return svg.count("<polyline")

