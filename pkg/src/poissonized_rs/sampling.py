"""Seeded samplers for the point processes and Poisson arches.

Every sampler is a pure function of its parameters and an :class:`RngSpec`.
The generator behind an ``RngSpec`` is numpy's Philox counter-based bit
generator keyed by ``(seed, stream)``, so distinct streams are independent
and a stream can be regenerated anywhere without coordination.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .correspondences import LatticeConfiguration, PointConfiguration

_MASK64 = (1 << 64) - 1
DEFAULT_MAX_ATTEMPTS = 10**7


@dataclass(frozen=True)
class RngSpec:
    seed: int = 0
    stream: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed & _MASK64, self.stream & _MASK64], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def substream(self, index: int) -> "RngSpec":
        return RngSpec(self.seed, self.stream + index)


class RejectionBudgetExceeded(RuntimeError):
    """Rejection sampling ran out of attempts."""


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngSpec):
        return rng.generator()
    return rng


def _poisson_square_from(theta: float, gen: np.random.Generator) -> PointConfiguration:
    while True:
        n = int(gen.poisson(theta * theta))
        coords = gen.random((n, 2)) * theta
        pts = sorted(map(tuple, coords.tolist()))
        if len({p[0] for p in pts}) == n and len({p[1] for p in pts}) == n:
            return PointConfiguration._trusted(tuple(pts), float(theta))


def sample_poisson_square(theta: float, rng: RngSpec) -> PointConfiguration:
    """Rate-one Poisson point process on [0, theta]^2.

    A coordinate collision (probability ~0 in double precision) discards the
    whole configuration and draws again.
    """
    if not theta > 0:
        raise ValueError("theta must be positive")
    return _poisson_square_from(float(theta), _as_generator(rng))


def iter_poisson_squares(theta: float, samples: int, rng: RngSpec, batch: int = 65536) -> Iterator[tuple[list[float], list[float]]]:
    """Yield ``samples`` configurations as (xs sorted ascending, ys in x order).

    Batched version of :func:`sample_poisson_square` for the Monte-Carlo loops;
    collisions are resampled the same way.
    """
    if not theta > 0:
        raise ValueError("theta must be positive")
    gen = _as_generator(rng)
    lam = theta * theta
    done = 0
    while done < samples:
        size = min(batch, samples - done)
        counts = gen.poisson(lam, size=size)
        coords = (gen.random((int(counts.sum()), 2)) * theta).tolist()
        pos = 0
        for n in counts.tolist():
            if n == 0:
                yield [], []
                continue
            pts = coords[pos:pos + n]
            pos += n
            if n > 1:
                pts.sort()
                xs = [p[0] for p in pts]
                ys = [p[1] for p in pts]
                if len(set(xs)) != n or len(set(ys)) != n:
                    cfg = _poisson_square_from(theta, gen)
                    xs, ys = list(cfg.xs), list(cfg.ys)
                yield xs, ys
            else:
                yield [pts[0][0]], [pts[0][1]]
        done += size


def geometric_inversion(u: np.ndarray, q: float) -> np.ndarray:
    """Inverse-CDF map from uniforms on [0, 1) to Geometric counts with P(x) = (1-q) q^x."""
    if q == 0:
        return np.zeros_like(u, dtype=np.int64)
    # P(xi >= x) = q^x, so xi = floor(log(1 - u) / log q)
    return np.floor(np.log1p(-u) / math.log(q)).astype(np.int64)


def _check_geometric(theta: float, k: int) -> float:
    if k < 1:
        raise ValueError("k must be positive")
    if not 0 < theta < k:
        raise ValueError(f"need 0 < theta < k, got theta={theta}, k={k}")
    return (theta / k) ** 2


def sample_geometric_lattice(theta: float, k: int, rng: RngSpec) -> LatticeConfiguration:
    q = _check_geometric(theta, k)
    u = _as_generator(rng).random((k, k))
    counts = geometric_inversion(u, q)
    return LatticeConfiguration(tuple(map(tuple, counts.tolist())), theta, k)


def iter_geometric_lattices(theta: float, k: int, samples: int, rng: RngSpec, batch: int = 65536) -> Iterator[np.ndarray]:
    """Yield ``samples`` k x k count matrices (as numpy rows) from one stream."""
    q = _check_geometric(theta, k)
    gen = _as_generator(rng)
    done = 0
    while done < samples:
        size = min(batch, samples - done)
        yield from geometric_inversion(gen.random((size, k, k)), q)
        done += size


# -- Poisson arches ---------------------------------------------------------


def arch_count_weights(theta: float, tol: float = 1e-18) -> np.ndarray:
    """Unnormalised weights (theta^n / n!)^2 up to negligible mass."""
    weights = [1.0]
    n = 0
    while True:
        n += 1
        w = weights[-1] * (theta / n) ** 2
        weights.append(w)
        if n > theta and w < tol * sum(weights):
            break
    return np.array(weights)


@dataclass(frozen=True)
class ArchPath:
    """Two back-to-back upward Poisson jump paths with equal jump counts.

    ``jump_times_left`` are jump times of the growing half measured from
    ``-theta``; ``jump_times_right`` are jump times of the mirrored half
    measured from ``+theta`` backwards.
    """

    theta: float
    initial: int
    jump_times_left: tuple[float, ...]
    jump_times_right: tuple[float, ...]

    def __post_init__(self):
        if len(self.jump_times_left) != len(self.jump_times_right):
            raise ValueError("an arch has equal jump counts on both halves")

    @property
    def jumps(self) -> int:
        return len(self.jump_times_left)

    def value_at(self, t: float) -> int:
        theta = self.theta
        if not -theta <= t <= theta:
            raise ValueError(f"time {t} outside [-{theta}, {theta}]")
        if t < 0:
            return self.initial + bisect_right(self.jump_times_left, theta + t)
        return self.initial + bisect_right(self.jump_times_right, theta - t)

    def breakpoints(self) -> list[float]:
        theta = self.theta
        return sorted([u - theta for u in self.jump_times_left] + [theta - u for u in self.jump_times_right])


class _ArchDrawer:
    def __init__(self, theta: float, gen: np.random.Generator):
        w = arch_count_weights(theta)
        self.cdf = np.cumsum(w) / w.sum()
        self.theta = theta
        self.gen = gen

    def counts(self, size: int) -> np.ndarray:
        idx = np.searchsorted(self.cdf, self.gen.random(size), side="right")
        return np.minimum(idx, len(self.cdf) - 1)

    def arch(self, x: int, n: int) -> ArchPath:
        u = np.sort(self.gen.random((2, n)) * self.theta, axis=1).tolist()
        return ArchPath(self.theta, x, tuple(u[0]), tuple(u[1]))


def sample_poisson_arch(theta: float, x: int, rng) -> ArchPath:
    if not theta > 0:
        raise ValueError("theta must be positive")
    drawer = _ArchDrawer(float(theta), _as_generator(rng))
    return drawer.arch(x, int(drawer.counts(1)[0]))


def arches_ordered(arches: list[ArchPath]) -> bool:
    """Strict ordering arch(1) > arch(2) > ... at every time in [-theta, theta]."""
    if len(arches) < 2:
        return True
    theta = arches[0].theta
    cuts = sorted({-theta, 0.0, theta, *(b for a in arches for b in a.breakpoints())})
    probes = cuts + [(a + b) / 2 for a, b in zip(cuts, cuts[1:])]
    for t in probes:
        vals = [a.value_at(t) for a in arches]
        if any(v <= w for v, w in zip(vals, vals[1:])):
            return False
    return True


def sample_nonintersecting_arches(theta: float, N: int, rng, max_attempts: int = DEFAULT_MAX_ATTEMPTS) -> list[ArchPath]:
    """N arches started at 0, -1, ..., 1-N, conditioned by rejection to stay ordered."""
    if N < 1:
        raise ValueError("N must be positive")
    gen = _as_generator(rng)
    drawer = _ArchDrawer(float(theta), gen)
    for _ in range(max_attempts):
        counts = drawer.counts(N).tolist()
        arches = [drawer.arch(1 - i, n) for i, n in enumerate(counts, start=1)]
        if arches_ordered(arches):
            return arches
    raise RejectionBudgetExceeded(f"no ordered ensemble of {N} arches within {max_attempts} attempts")
