"""Young diagrams, skew shapes, tableaux and exact dimension counts.

Cells are addressed with 0-based ``(row, column)`` pairs throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Iterable, Iterator, Mapping, Sequence

DEFAULT_SIZE_CAP = 10
DEFAULT_BOUND_CAP = 6


class CapExceeded(ValueError):
    """An enumeration was asked for more than its configured cap."""


class YoungDiagram(tuple):
    """A partition stored as a tuple of weakly decreasing positive row lengths.

    Trailing zeros are dropped, so ``YoungDiagram((2, 1, 0)) == (2, 1)``.
    """

    __slots__ = ()

    def __new__(cls, rows: Iterable[int] = ()):
        rows = [int(r) for r in rows]
        while rows and rows[-1] == 0:
            rows.pop()
        for i, r in enumerate(rows):
            if r < 0:
                raise ValueError(f"negative row length in {rows}")
            if i and r > rows[i - 1]:
                raise ValueError(f"row lengths must weakly decrease: {rows}")
            if r == 0:
                raise ValueError(f"zero row inside partition: {rows}")
        return super().__new__(cls, rows)

    @classmethod
    def _trusted(cls, rows: Iterable[int]) -> "YoungDiagram":
        return tuple.__new__(cls, rows)

    @property
    def rows(self) -> tuple[int, ...]:
        return tuple(self)

    @property
    def size(self) -> int:
        return sum(self)

    def row(self, i: int) -> int:
        """Length of row ``i`` (0-based); rows beyond the diagram read as 0."""
        return self[i] if i < len(self) else 0

    def cells(self) -> Iterator[tuple[int, int]]:
        for i, r in enumerate(self):
            for j in range(r):
                yield (i, j)

    def conjugate(self) -> "YoungDiagram":
        if not self:
            return YoungDiagram()
        return YoungDiagram._trusted(
            sum(1 for r in self if r > j) for j in range(self[0])
        )

    def __repr__(self) -> str:
        return f"YoungDiagram({tuple(self)!r})"


EMPTY = YoungDiagram()


def contains(outer: Sequence[int], inner: Sequence[int]) -> bool:
    """True iff ``inner`` fits inside ``outer`` row by row."""
    if len(inner) > len(outer):
        return not any(inner[len(outer):]) and all(
            a <= b for a, b in zip(inner, outer)
        )
    return all(a <= b for a, b in zip(inner, outer))


@dataclass(frozen=True)
class SkewShape:
    outer: YoungDiagram
    inner: YoungDiagram = EMPTY

    def __post_init__(self):
        object.__setattr__(self, "outer", YoungDiagram(self.outer))
        object.__setattr__(self, "inner", YoungDiagram(self.inner))
        if not contains(self.outer, self.inner):
            raise ValueError(f"{tuple(self.inner)} is not contained in {tuple(self.outer)}")

    @property
    def size(self) -> int:
        return self.outer.size - self.inner.size

    def cells(self) -> Iterator[tuple[int, int]]:
        for i, r in enumerate(self.outer):
            for j in range(self.inner.row(i), r):
                yield (i, j)

    def to_json(self) -> dict:
        return {"outer": list(self.outer), "inner": list(self.inner)}

    @classmethod
    def from_json(cls, obj: Mapping) -> "SkewShape":
        return cls(YoungDiagram(obj["outer"]), YoungDiagram(obj.get("inner", ())))


def _as_skew(shape) -> SkewShape:
    if isinstance(shape, SkewShape):
        return shape
    return SkewShape(YoungDiagram(shape))


@dataclass(frozen=True)
class _Tableau:
    # rows[i] holds the entries of row i starting at column inner[i]
    rows: tuple[tuple[int, ...], ...]
    inner: YoungDiagram = field(default=EMPTY)

    @classmethod
    def _trusted(cls, rows, inner=EMPTY, **extra):
        obj = object.__new__(cls)
        object.__setattr__(obj, "rows", rows)
        object.__setattr__(obj, "inner", inner)
        for key, value in extra.items():
            object.__setattr__(obj, key, value)
        return obj

    def _normalise(self):
        inner = YoungDiagram(self.inner)
        rows = tuple(tuple(int(v) for v in row) for row in self.rows)
        while len(rows) > len(inner) and not rows[-1]:
            rows = rows[:-1]
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "inner", inner)
        YoungDiagram(self.inner.row(i) + len(r) for i, r in enumerate(rows))
        if len(self.inner) > len(rows):
            raise ValueError("inner shape has more rows than the tableau")

    @property
    def shape(self) -> YoungDiagram:
        inner = self.inner
        return YoungDiagram._trusted(inner.row(i) + len(r) for i, r in enumerate(self.rows))

    @property
    def skew_shape(self) -> SkewShape:
        return SkewShape(self.shape, self.inner)

    @property
    def size(self) -> int:
        return sum(len(r) for r in self.rows)

    @property
    def entries(self) -> dict[tuple[int, int], int]:
        out = {}
        for i, row in enumerate(self.rows):
            offset = self.inner.row(i)
            for j, v in enumerate(row):
                out[(i, offset + j)] = v
        return out

    def __getitem__(self, cell: tuple[int, int]) -> int:
        i, j = cell
        return self.rows[i][j - self.inner.row(i)]

    def _check_order(self, strict_rows: bool):
        ent = self.entries
        for (i, j), v in ent.items():
            right = ent.get((i, j + 1))
            if right is not None and (right <= v if strict_rows else right < v):
                raise ValueError(f"row order violated at {(i, j)}")
            below = ent.get((i + 1, j))
            if below is not None and below <= v:
                raise ValueError(f"column order violated at {(i, j)}")

    def to_json(self) -> list[list[int]]:
        return [list(r) for r in self.rows]


@dataclass(frozen=True)
class StandardTableau(_Tableau):
    """Filling of a (skew) shape by 1..n, increasing along rows and columns."""

    def __post_init__(self):
        self._normalise()
        values = sorted(v for row in self.rows for v in row)
        if values != list(range(1, len(values) + 1)):
            raise ValueError("standard tableau entries must be exactly 1..n")
        self._check_order(strict_rows=True)


@dataclass(frozen=True)
class SemistandardTableau(_Tableau):
    """Weakly increasing rows, strictly increasing columns, entries in 1..bound."""

    bound: int = 0

    def __post_init__(self):
        self._normalise()
        values = [v for row in self.rows for v in row]
        bound = self.bound or max(values, default=1)
        object.__setattr__(self, "bound", bound)
        if any(v < 1 or v > bound for v in values):
            raise ValueError(f"entries must lie in 1..{bound}")
        self._check_order(strict_rows=False)


def partitions(n: int, max_part: int | None = None) -> Iterator[YoungDiagram]:
    """All partitions of ``n`` in reverse lexicographic order."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield EMPTY
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions(n - first, first):
            yield YoungDiagram._trusted((first,) + rest)


def subdiagrams(outer: Sequence[int]) -> Iterator[YoungDiagram]:
    """Every diagram contained in ``outer`` (including ``outer`` and the empty one)."""
    outer = tuple(outer)

    def rec(i, cap):
        if i == len(outer):
            yield ()
            return
        for r in range(min(cap, outer[i]), -1, -1):
            if r == 0:
                yield ()
            else:
                for rest in rec(i + 1, r):
                    yield (r,) + rest

    for rows in rec(0, outer[0] if outer else 0):
        yield YoungDiagram._trusted(rows)


def hook_lengths(shape: Sequence[int]) -> list[int]:
    conj = YoungDiagram(shape).conjugate()
    return [shape[i] - j + conj[j] - i - 1 for i in range(len(shape)) for j in range(shape[i])]


@lru_cache(maxsize=None)
def _dim_standard(shape: tuple[int, ...]) -> int:
    prod = 1
    for h in hook_lengths(shape):
        prod *= h
    return factorial(sum(shape)) // prod


def dim_standard(shape: Sequence[int]) -> int:
    """Number of standard Young tableaux of ``shape`` by the hook-length formula."""
    return _dim_standard(tuple(YoungDiagram(shape)))


def exact_det(matrix: Sequence[Sequence]) -> Fraction | int:
    """Determinant by fraction-exact Gaussian elimination.

    Integer input comes back as an ``int``.
    """
    n = len(matrix)
    if n == 0:
        return 1
    all_int = all(isinstance(v, int) for row in matrix for v in row)
    m = [[Fraction(v) for v in row] for row in matrix]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return 0
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        p = m[col][col]
        det *= p
        for r in range(col + 1, n):
            f = m[r][col]
            if f:
                f /= p
                row_r, row_c = m[r], m[col]
                for c in range(col + 1, n):
                    row_r[c] -= f * row_c[c]
    if all_int:
        assert det.denominator == 1
        return int(det)
    return det


@lru_cache(maxsize=None)
def _dim_skew(outer: tuple[int, ...], inner: tuple[int, ...]) -> int:
    n = sum(outer) - sum(inner)
    if n == 0:
        return 1
    ell = len(outer)
    inner = inner + (0,) * (ell - len(inner))

    def inv_fact(m):
        return Fraction(1, factorial(m)) if m >= 0 else Fraction(0)

    det = exact_det(
        [[inv_fact(outer[i] - inner[j] - i + j) for j in range(ell)] for i in range(ell)]
    )
    value = factorial(n) * det
    assert value.denominator == 1
    return int(value)


def dim_skew_standard(shape) -> int:
    """Number of standard fillings of a skew shape, by the Aitken determinant.

    Accepts a :class:`SkewShape` or a plain diagram (read as ``shape/∅``).
    """
    shape = _as_skew(shape)
    return _dim_skew(tuple(shape.outer), tuple(shape.inner))


def h_all_ones(n: int, k: int) -> int:
    """Complete homogeneous symmetric polynomial h_n at k ones."""
    if n < 0:
        return 0
    if n == 0:
        return 1
    if k <= 0:
        return 0
    return comb(n + k - 1, n)


@lru_cache(maxsize=4096)
def _count_ssyt(outer: tuple[int, ...], inner: tuple[int, ...], k: int) -> int:
    if sum(outer) == sum(inner):
        return 1
    if k <= 0:
        return 0
    ell = len(outer)
    inner = inner + (0,) * (ell - len(inner))
    return exact_det(
        [[h_all_ones(outer[i] - inner[j] - i + j, k) for j in range(ell)] for i in range(ell)]
    )


def count_ssyt(shape, k: int) -> int:
    """Dim_k of a skew shape: semistandard fillings with entries at most ``k``.

    Evaluated with the Jacobi-Trudi determinant at the all-ones specialization.
    """
    shape = _as_skew(shape)
    if k < 0 or (k == 0 and shape.size > 0):
        raise ValueError(f"entry bound must be positive for a nonempty shape, got k={k}")
    return _count_ssyt(tuple(shape.outer), tuple(shape.inner), k)


def _addable_cells(current: list[int], outer: Sequence[int]) -> Iterator[int]:
    for i, r in enumerate(outer):
        if current[i] < r and (i == 0 or current[i - 1] > current[i]):
            yield i


def enumerate_standard(shape, cap: int = DEFAULT_SIZE_CAP) -> list[StandardTableau]:
    """Every standard filling of a skew shape, by backtracking over addable cells."""
    shape = _as_skew(shape)
    n = shape.size
    if n > cap:
        raise CapExceeded(f"skew shape of size {n} exceeds the enumeration cap {cap}")
    outer = tuple(shape.outer)
    inner = shape.inner
    current = [inner.row(i) for i in range(len(outer))]
    rows: list[list[int]] = [[] for _ in outer]
    out = []

    def rec(value):
        if value > n:
            used = tuple(tuple(r) for r in rows[: _row_count(rows, inner)])
            out.append(StandardTableau._trusted(used, inner))
            return
        for i in list(_addable_cells(current, outer)):
            current[i] += 1
            rows[i].append(value)
            rec(value + 1)
            rows[i].pop()
            current[i] -= 1

    rec(1)
    return out


def _row_count(rows, inner) -> int:
    # keep every row that holds entries or inner cells
    last = 0
    for i, r in enumerate(rows):
        if r or inner.row(i):
            last = i + 1
    return last


def enumerate_ssyt(
    shape, k: int, cap: int = DEFAULT_SIZE_CAP, bound_cap: int = DEFAULT_BOUND_CAP
) -> list[SemistandardTableau]:
    """Every semistandard filling of a skew shape with entries in 1..k."""
    shape = _as_skew(shape)
    if shape.size > cap:
        raise CapExceeded(f"skew shape of size {shape.size} exceeds the enumeration cap {cap}")
    if k > bound_cap:
        raise CapExceeded(f"entry bound {k} exceeds the enumeration cap {bound_cap}")
    cells = list(shape.cells())
    filling: dict[tuple[int, int], int] = {}
    out = []
    inner = shape.inner
    n_rows = len(shape.outer)

    def rec(idx):
        if idx == len(cells):
            rows = tuple(
                tuple(filling[(i, j)] for j in range(inner.row(i), shape.outer[i]))
                for i in range(n_rows)
            )
            out.append(SemistandardTableau._trusted(rows, inner, bound=k))
            return
        i, j = cells[idx]
        low = 1
        left = filling.get((i, j - 1))
        if left is not None:
            low = left
        above = filling.get((i - 1, j))
        if above is not None:
            low = max(low, above + 1)
        for v in range(low, k + 1):
            filling[(i, j)] = v
            rec(idx + 1)
        filling.pop((i, j), None)

    rec(0)
    return out
