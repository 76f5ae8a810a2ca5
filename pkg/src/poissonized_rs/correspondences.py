"""Robinson-Schensted, its decorated version on planar points, and matrix RSK.

Conventions: the insertion tableau is the *left* tableau and carries the
y-coordinates; the recording tableau is the *right* tableau and carries the
x-coordinates.  Permutations are one-line tuples over ``1..n``.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Mapping, Sequence

from .partitions import EMPTY, SemistandardTableau, StandardTableau, YoungDiagram

Permutation = tuple[int, ...]


def check_permutation(perm: Sequence[int]) -> Permutation:
    perm = tuple(int(v) for v in perm)
    if sorted(perm) != list(range(1, len(perm) + 1)):
        raise ValueError(f"not a permutation of 1..{len(perm)}: {perm}")
    return perm


def inverse_permutation(perm: Sequence[int]) -> Permutation:
    inv = [0] * len(perm)
    for i, v in enumerate(perm, start=1):
        inv[v - 1] = i
    return tuple(inv)


def row_insert(values, labels=None) -> tuple[list[list], list[list]]:
    """Schensted row insertion of ``values``; returns raw (P, Q) row lists.

    Each value bumps the leftmost entry strictly greater than it, so equal
    values sit side by side (RSK semantics).  ``labels`` default to 1..n.
    """
    p: list[list] = []
    q: list[list] = []
    if labels is None:
        labels = range(1, len(values) + 1)
    for v, lab in zip(values, labels):
        r = 0
        while True:
            if r == len(p):
                p.append([v])
                q.append([lab])
                break
            row = p[r]
            pos = bisect_right(row, v)
            if pos == len(row):
                row.append(v)
                q[r].append(lab)
                break
            v, row[pos] = row[pos], v
            r += 1
    return p, q


def reverse_bump(p: list[list], q: list[list]) -> tuple[list, list]:
    """Undo :func:`row_insert`; consumes ``p`` and ``q`` and returns (values, labels)."""
    values = []
    labels = []
    while q:
        # the last-inserted cell holds the largest label, rightmost among ties
        best_r, best = -1, None
        for r, row in enumerate(q):
            lab = row[-1]
            if best is None or lab > best or (lab == best and len(row) > len(q[best_r])):
                best_r, best = r, lab
        r = best_r
        q[r].pop()
        v = p[r].pop()
        if not p[r]:
            p.pop()
            q.pop()
        for rr in range(r - 1, -1, -1):
            row = p[rr]
            pos = bisect_left(row, v) - 1
            v, row[pos] = row[pos], v
        values.append(v)
        labels.append(best)
    values.reverse()
    labels.reverse()
    return values, labels


def _freeze(rows) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(r) for r in rows)


def rs(perm: Sequence[int]) -> tuple[StandardTableau, StandardTableau]:
    """Insertion and recording tableaux of a permutation."""
    perm = check_permutation(perm)
    p, q = row_insert(perm)
    return StandardTableau._trusted(_freeze(p)), StandardTableau._trusted(_freeze(q))


def rs_inverse(p: StandardTableau, q: StandardTableau) -> Permutation:
    if p.shape != q.shape:
        raise ValueError(f"shape mismatch: {tuple(p.shape)} vs {tuple(q.shape)}")
    if p.inner or q.inner:
        raise ValueError("RS is defined on straight shapes only")
    values, _ = reverse_bump([list(r) for r in p.rows], [list(r) for r in q.rows])
    return tuple(values)


def longest_increasing_subsequence(seq: Sequence) -> int:
    """Length of the longest strictly increasing subsequence (patience piles)."""
    piles: list = []
    for v in seq:
        pos = bisect_left(piles, v)
        if pos == len(piles):
            piles.append(v)
        else:
            piles[pos] = v
    return len(piles)


@dataclass(frozen=True)
class PointConfiguration:
    """Finite point set in the square [0, theta]^2, sorted by x."""

    points: tuple[tuple[float, float], ...]
    theta: float

    def __post_init__(self):
        pts = tuple(sorted((float(x), float(y)) for x, y in self.points))
        theta = float(self.theta)
        if not theta > 0:
            raise ValueError(f"theta must be positive, got {theta}")
        for x, y in pts:
            if not (0.0 <= x <= theta and 0.0 <= y <= theta):
                raise ValueError(f"point {(x, y)} outside [0, {theta}]^2")
        if len({x for x, _ in pts}) != len(pts):
            raise ValueError("two points share an x-coordinate")
        if len({y for _, y in pts}) != len(pts):
            raise ValueError("two points share a y-coordinate")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "theta", theta)

    @classmethod
    def _trusted(cls, points, theta):
        obj = object.__new__(cls)
        object.__setattr__(obj, "points", points)
        object.__setattr__(obj, "theta", theta)
        return obj

    def __len__(self) -> int:
        return len(self.points)

    @property
    def xs(self) -> tuple[float, ...]:
        return tuple(x for x, _ in self.points)

    @property
    def ys(self) -> tuple[float, ...]:
        return tuple(y for _, y in self.points)

    def transpose(self) -> "PointConfiguration":
        return PointConfiguration(tuple((y, x) for x, y in self.points), self.theta)

    def to_json(self) -> dict:
        return {"theta": self.theta, "points": [[x, y] for x, y in self.points]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "PointConfiguration":
        return cls(tuple(tuple(p) for p in obj["points"]), obj["theta"])


def _ranks(values: Sequence[float]) -> list[int]:
    order = sorted(range(len(values)), key=values.__getitem__)
    ranks = [0] * len(values)
    for r, i in enumerate(order, start=1):
        ranks[i] = r
    return ranks


def associated_permutation(config: PointConfiguration) -> Permutation:
    """sigma(i) = rank of the y-value of the i-th point in x order."""
    return tuple(_ranks(config.ys))


@dataclass(frozen=True)
class DecoratedTableauPair:
    left: StandardTableau
    right: StandardTableau
    left_decorations: tuple[float, ...]
    right_decorations: tuple[float, ...]
    theta: float

    def __post_init__(self):
        if self.left.shape != self.right.shape:
            raise ValueError("left and right tableaux must share a shape")
        if self.left.inner or self.right.inner:
            raise ValueError("decorated tableaux have straight shapes")
        n = self.left.size
        theta = float(self.theta)
        for name in ("left_decorations", "right_decorations"):
            dec = tuple(float(v) for v in getattr(self, name))
            if len(dec) != n:
                raise ValueError(f"{name} has length {len(dec)}, expected {n}")
            if any(b <= a for a, b in zip(dec, dec[1:])):
                raise ValueError(f"{name} must be strictly increasing")
            if dec and (dec[0] < 0 or dec[-1] > theta):
                raise ValueError(f"{name} must lie in [0, {theta}]")
            object.__setattr__(self, name, dec)
        object.__setattr__(self, "theta", theta)

    @classmethod
    def _trusted(cls, left, right, left_decorations, right_decorations, theta):
        obj = object.__new__(cls)
        object.__setattr__(obj, "left", left)
        object.__setattr__(obj, "right", right)
        object.__setattr__(obj, "left_decorations", left_decorations)
        object.__setattr__(obj, "right_decorations", right_decorations)
        object.__setattr__(obj, "theta", theta)
        return obj

    @property
    def shape(self) -> YoungDiagram:
        return self.left.shape

    def to_json(self) -> dict:
        return {
            "theta": self.theta,
            "left": self.left.to_json(),
            "right": self.right.to_json(),
            "left_decorations": list(self.left_decorations),
            "right_decorations": list(self.right_decorations),
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "DecoratedTableauPair":
        return cls(
            StandardTableau(tuple(map(tuple, obj["left"]))),
            StandardTableau(tuple(map(tuple, obj["right"]))),
            tuple(obj["left_decorations"]),
            tuple(obj["right_decorations"]),
            obj["theta"],
        )


def drs(config: PointConfiguration) -> DecoratedTableauPair:
    """Decorated RS: insert the y-values in x order.

    Inserting the reals directly performs the same comparisons as inserting
    their ranks, so the resulting tableaux carry the decorations in place of
    the labels; they are split back into (tableau, sorted decorations).
    """
    xs = config.xs
    ys = config.ys
    p, q = row_insert(ys)
    ranks = {y: r for r, y in enumerate(sorted(ys), start=1)}
    left = StandardTableau._trusted(tuple(tuple(ranks[y] for y in row) for row in p))
    right = StandardTableau._trusted(_freeze(q))
    return DecoratedTableauPair._trusted(left, right, tuple(sorted(ys)), xs, config.theta)


def drs_inverse(pair: DecoratedTableauPair) -> PointConfiguration:
    sigma = rs_inverse(pair.left, pair.right)
    ell = pair.left_decorations
    points = tuple((r, ell[s - 1]) for r, s in zip(pair.right_decorations, sigma))
    return PointConfiguration(points, pair.theta)


@dataclass(frozen=True)
class LatticeConfiguration:
    """k x k matrix of point multiplicities on the lattice {theta/k, ..., theta}^2.

    ``counts[a][b]`` is the number of points at (x, y) = ((a+1)theta/k, (b+1)theta/k).
    """

    counts: tuple[tuple[int, ...], ...]
    theta: float
    k: int

    def __post_init__(self):
        counts = tuple(tuple(int(v) for v in row) for row in self.counts)
        k = int(self.k)
        if k < 1:
            raise ValueError("k must be positive")
        if len(counts) != k or any(len(row) != k for row in counts):
            raise ValueError(f"counts must be a {k}x{k} matrix")
        if any(v < 0 for row in counts for v in row):
            raise ValueError("counts must be nonnegative")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "k", k)

    @property
    def total(self) -> int:
        return sum(map(sum, self.counts))

    def two_line_array(self) -> tuple[list[int], list[int]]:
        """Lexicographic generalized permutation: (x labels, y values), 1-based."""
        top, bottom = [], []
        for a, row in enumerate(self.counts, start=1):
            for b, m in enumerate(row, start=1):
                top.extend([a] * m)
                bottom.extend([b] * m)
        return top, bottom

    def to_json(self) -> dict:
        return {"theta": self.theta, "k": self.k, "counts": [list(r) for r in self.counts]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "LatticeConfiguration":
        return cls(tuple(map(tuple, obj["counts"])), obj["theta"], obj["k"])


@dataclass(frozen=True)
class SemistandardPair:
    left: SemistandardTableau
    right: SemistandardTableau

    def __post_init__(self):
        if self.left.shape != self.right.shape:
            raise ValueError("left and right tableaux must share a shape")
        if self.left.bound != self.right.bound:
            raise ValueError("left and right tableaux must share an entry bound")

    @property
    def shape(self) -> YoungDiagram:
        return self.left.shape

    @property
    def k(self) -> int:
        return self.left.bound


def rsk(matrix: LatticeConfiguration) -> SemistandardPair:
    """RSK on the lexicographic two-line array: y-values inserted, x-labels recorded."""
    top, bottom = matrix.two_line_array()
    p, q = row_insert(bottom, top)
    k = matrix.k
    return SemistandardPair(
        SemistandardTableau._trusted(_freeze(p), EMPTY, bound=k),
        SemistandardTableau._trusted(_freeze(q), EMPTY, bound=k),
    )


def rsk_inverse(pair: SemistandardPair, theta: float = 1.0) -> LatticeConfiguration:
    if pair.left.inner or pair.right.inner:
        raise ValueError("RSK is defined on straight shapes only")
    k = pair.k
    bottom, top = reverse_bump(
        [list(r) for r in pair.left.rows], [list(r) for r in pair.right.rows]
    )
    if any(a > b for a, b in zip(top, top[1:])):
        raise ValueError("malformed pair: recovered labels are not weakly increasing")
    counts = [[0] * k for _ in range(k)]
    for a, b in zip(top, bottom):
        counts[a - 1][b - 1] += 1
    return LatticeConfiguration(tuple(map(tuple, counts)), theta, k)
