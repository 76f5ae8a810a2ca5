"""Closed-form probabilities for the continuous and lattice processes.

All combinatorial factors are computed in exact rational arithmetic.  A
probability is reported as a :class:`LogProbability`: its natural log plus,
when cheap, an exact shadow ``rational * exp(-exp_shift)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, lgamma
from typing import Sequence

from .partitions import (
    EMPTY,
    SkewShape,
    YoungDiagram,
    _count_ssyt,
    contains,
    dim_skew_standard,
    dim_standard,
    exact_det,
)
from .trajectories import lattice_count, lattice_index

# exact shadows of lattice probabilities carry (1 - q)^(k^2); skip beyond this
EXACT_LATTICE_LIMIT = 64


@dataclass(frozen=True)
class LogProbability:
    value: float
    rational: Fraction | None = None
    exp_shift: Fraction = Fraction(0)

    @property
    def probability(self) -> float:
        return math.exp(self.value) if self.value > -math.inf else 0.0

    @property
    def exact(self) -> Fraction | None:
        """Exact value when it is rational (no exponential factor)."""
        if self.rational is not None and self.exp_shift == 0:
            return self.rational
        return None

    @classmethod
    def from_exact(cls, rational: Fraction, exp_shift: Fraction = Fraction(0)) -> "LogProbability":
        rational = Fraction(rational)
        if rational == 0:
            return cls(-math.inf, rational, Fraction(exp_shift))
        value = _log_fraction(rational) - float(exp_shift)
        return cls(value, rational, Fraction(exp_shift))

    def to_json(self) -> dict:
        out = {"log_probability": self.value, "probability": self.probability}
        if self.rational is not None:
            out["rational"] = str(self.rational)
            out["exp_shift"] = str(self.exp_shift)
        if self.exact is not None:
            out["exact"] = str(self.exact)
        return out


def _log_fraction(x: Fraction) -> float:
    return math.log(x.numerator) - math.log(x.denominator)


def _skew(outer, inner=EMPTY) -> SkewShape:
    return SkewShape(YoungDiagram(outer), YoungDiagram(inner))


def plancherel_schur(shape, t) -> Fraction:
    """Skew Schur function at the Plancherel specialization with parameter ``t``.

    Equals dim(shape) t^size / size!; exact for rational ``t``.
    """
    if not isinstance(shape, SkewShape):
        shape = _skew(shape)
    t = Fraction(t)
    if t < 0:
        raise ValueError("specialization parameter must be nonnegative")
    n = shape.size
    return dim_skew_standard(shape) * t**n / factorial(n)


def poissonized_plancherel(shape, theta) -> LogProbability:
    shape = YoungDiagram(shape)
    theta = Fraction(theta)
    if theta <= 0:
        raise ValueError("theta must be positive")
    n = shape.size
    coeff = Fraction(theta**n * dim_standard(shape), factorial(n)) ** 2
    return LogProbability.from_exact(coeff, theta * theta)


@dataclass(frozen=True)
class FddQuery:
    """Pinned diagrams at increasing times; a pin at time 0 is mandatory.

    ``discrete_k`` selects the lattice model with k x k sites; ``None`` is the
    continuous model.
    """

    theta: float
    pins: tuple[tuple[float, YoungDiagram], ...]
    discrete_k: int | None = None

    def __post_init__(self):
        pins = tuple(sorted((t, YoungDiagram(d)) for t, d in self.pins))
        theta = self.theta
        if not theta > 0:
            raise ValueError("theta must be positive")
        times = [t for t, _ in pins]
        if len(set(times)) != len(times):
            raise ValueError("duplicate pin times")
        if any(not -theta <= t <= theta for t in times):
            raise ValueError(f"pin times must lie in [-{theta}, {theta}]")
        if 0 not in times:
            raise ValueError("a pin at time 0 is required")
        chain = [d for _, d in pins]
        zero = times.index(0)
        for a, b in zip(chain[:zero], chain[1 : zero + 1]):
            if not contains(b, a):
                raise ValueError(f"pins before time 0 must grow: {tuple(a)} then {tuple(b)}")
        for a, b in zip(chain[zero:], chain[zero + 1 :]):
            if not contains(a, b):
                raise ValueError(f"pins after time 0 must shrink: {tuple(a)} then {tuple(b)}")
        if self.discrete_k is not None and self.discrete_k < 1:
            raise ValueError("discrete_k must be positive")
        object.__setattr__(self, "pins", pins)

    @property
    def nu(self) -> YoungDiagram:
        return dict(self.pins)[0]

    def chains(self):
        """Left chain [(time, diagram)] from -theta to 0 and right chain from 0 to theta."""
        theta = self.theta
        left = [(-theta, EMPTY)] + [(t, d) for t, d in self.pins if t <= 0]
        right = [(t, d) for t, d in self.pins if t >= 0] + [(theta, EMPTY)]
        return left, right

    def to_json(self) -> dict:
        out = {"theta": self.theta, "pins": [[t, list(d)] for t, d in self.pins]}
        if self.discrete_k is not None:
            out["k"] = self.discrete_k
        return out

    @classmethod
    def from_json(cls, obj) -> "FddQuery":
        return cls(
            obj["theta"],
            tuple((p[0], YoungDiagram(p[1])) for p in obj["pins"]),
            obj.get("k", obj.get("discrete_k")),
        )


def _steps(query: FddQuery):
    """(big, small, dt) for every consecutive pair, in exact arithmetic."""
    left, right = query.chains()
    for (t0, d0), (t1, d1) in zip(left, left[1:]):
        yield d1, d0, Fraction(t1) - Fraction(t0), (t0, t1), "up"
    for (s0, d0), (s1, d1) in zip(right, right[1:]):
        yield d0, d1, Fraction(s1) - Fraction(s0), (s0, s1), "down"


def fdd_continuous(query: FddQuery, check: bool = True) -> LogProbability:
    """Finite-dimensional law of the continuous process at the pinned times.

    The product of dim(skew) dt^|skew| / |skew|! factors is cross-checked
    against the Jacobi-Trudi form of the same skew Schur values when
    ``check`` is set.
    """
    if query.discrete_k is not None:
        raise ValueError("query targets the lattice model; use fdd_discrete")
    coeff = Fraction(1)
    for big, small, dt, _, direction in _steps(query):
        if not contains(big, small):
            raise ValueError(f"{tuple(small)} is not contained in {tuple(big)}")
        skew = SkewShape(big, small)
        n = skew.size
        term = dim_skew_standard(skew) * dt**n / factorial(n)
        if check:
            lines = max(len(big), 1)
            lo, hi = levels(small, lines), levels(big, lines)
            jt = km_block(lo, hi, dt, "up") if direction == "up" else km_block(hi, lo, dt, "down")
            assert jt == term, (tuple(big), tuple(small), dt)
        coeff *= term
    theta = Fraction(query.theta)
    return LogProbability.from_exact(coeff, theta * theta)


def marginal_continuous(shape, t, theta) -> LogProbability:
    """One-time law: Poissonized Plancherel with parameter sqrt(theta(theta-|t|))."""
    theta = Fraction(theta)
    t = Fraction(t)
    if abs(t) > theta:
        raise ValueError("|t| must not exceed theta")
    shape = YoungDiagram(shape)
    if abs(t) == theta:
        return LogProbability.from_exact(Fraction(int(shape == EMPTY)))
    # alpha^2 = theta (theta - |t|) is rational even when alpha is not
    alpha2 = theta * (theta - abs(t))
    n = shape.size
    coeff = alpha2**n * Fraction(dim_standard(shape), factorial(n)) ** 2
    return LogProbability.from_exact(coeff, alpha2)


def _dim_k(skew: SkewShape, k: int) -> int:
    return _count_ssyt(tuple(skew.outer), tuple(skew.inner), k)


def fdd_discrete(query: FddQuery, check: bool = True) -> LogProbability:
    """Finite-dimensional law of the lattice process with geometric weights."""
    k = query.discrete_k
    if k is None:
        raise ValueError("query has no lattice size; use fdd_continuous")
    theta = Fraction(query.theta)
    if not theta < k:
        raise ValueError(f"need theta < k, got theta={query.theta}, k={k}")
    q = (theta / k) ** 2
    count_log = 0.0
    count = 1
    schur_product = Fraction(1)
    for big, small, _, (a, b), direction in _steps(query):
        if not contains(big, small):
            raise ValueError(f"{tuple(small)} is not contained in {tuple(big)}")
        skew = SkewShape(big, small)
        if direction == "up":
            length = lattice_count(theta, k, theta + Fraction(a), theta + Fraction(b))
        else:
            length = lattice_count(theta, k, theta - Fraction(b), theta - Fraction(a))
        dim = _dim_k(skew, length)
        if dim == 0:
            return LogProbability(-math.inf, Fraction(0))
        count *= dim
        count_log += math.log(dim)
        if check:
            schur_product *= finite_length_schur_count(skew, theta, k, length)
    nu = query.nu
    n = nu.size
    value = k * k * math.log1p(-float(q)) + count_log
    if n:
        value += n * math.log(float(q))
    rational = None
    if k * k <= EXACT_LATTICE_LIMIT:
        rational = (1 - q) ** (k * k) * q**n * count
        value = _log_fraction(rational)
    if check:
        # the Schur chain carries (theta/k)^(2|nu|) = q^|nu| once the telescoping is done
        assert schur_product == q**n * count, (schur_product, q**n * count)
    return LogProbability(value, rational)


def finite_length_schur_count(skew: SkewShape, theta, k: int, length: int) -> Fraction:
    return (Fraction(theta) / k) ** skew.size * _dim_k(skew, length)


def finite_length_schur(shape, theta, k: int, x, y) -> Fraction:
    """Skew Schur function with the first L(x, y) variables set to theta/k."""
    if not isinstance(shape, SkewShape):
        shape = _skew(shape)
    length = lattice_count(Fraction(theta), k, Fraction(x), Fraction(y))
    return finite_length_schur_count(shape, theta, k, length)


def power_sum_diagnostic(partition, theta, k: int, x, y) -> tuple[float, float]:
    """(p_lambda at the finite-length specialization, p_lambda at rho_{y-x})."""
    lam = YoungDiagram(partition)
    length = lattice_count(Fraction(theta), k, Fraction(x), Fraction(y))
    n = lam.size
    finite = length ** len(lam) * (theta / k) ** n
    column = all(r == 1 for r in lam)
    limit = (y - x) ** n if column else 0.0
    return float(finite), float(limit)


def levels(shape: Sequence[int], lines: int) -> list[int]:
    """Line positions lambda_j - j for j = 1..lines."""
    shape = YoungDiagram(shape)
    if len(shape) > lines:
        raise ValueError(f"{lines} lines cannot carry a diagram with {len(shape)} rows")
    return [shape.row(j - 1) - j for j in range(1, lines + 1)]


def _poisson_weight(t: Fraction, m: int) -> Fraction:
    return t**m / factorial(m) if m >= 0 else Fraction(0)


def km_block(levels_from: Sequence[int], levels_to: Sequence[int], t, direction: str = "up") -> Fraction:
    """Karlin-MacGregor determinant of Poisson jump weights between two level sets.

    ``up``: W(x, y) = t^(y-x)/(y-x)! for y >= x; ``down`` mirrors it.  Staying
    put has weight one (h_0 = 1).
    """
    if len(levels_from) != len(levels_to):
        raise ValueError("level sequences must have equal length")
    for seq in (levels_from, levels_to):
        if any(b >= a for a, b in zip(seq, seq[1:])):
            raise ValueError("levels must be strictly decreasing")
    t = Fraction(t)
    if direction == "up":
        w = lambda x, y: _poisson_weight(t, y - x)
    elif direction == "down":
        w = lambda x, y: _poisson_weight(t, x - y)
    else:
        raise ValueError("direction must be 'up' or 'down'")
    return Fraction(exact_det([[w(x, y) for y in levels_to] for x in levels_from]))


def poisson_pmf(lam: float, n: int) -> float:
    if lam == 0:
        return 1.0 if n == 0 else 0.0
    return math.exp(-lam + n * math.log(lam) - lgamma(n + 1))


def poisson_tail(lam: float, n: int) -> float:
    """P(Poisson(lam) > n)."""
    total = 0.0
    for m in range(n + 1):
        total += poisson_pmf(lam, m)
    return max(0.0, 1.0 - total)


def negative_binomial_pmf(r: int, q: Fraction | float, x: int) -> float:
    """Mass of a sum of ``r`` i.i.d. Geometric(q) variables at ``x``."""
    q = float(q)
    return math.comb(r + x - 1, x) * q**x * (1 - q) ** r
