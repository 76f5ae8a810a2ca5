"""Young-diagram paths and line ensembles on [-theta, theta].

Time conventions:

* for ``t <= 0`` a cell of the left tableau is present iff its decoration is
  ``<= theta + t`` (boxes appear at their event time, inclusive);
* for ``t >= 0`` a cell of the right tableau is present iff its decoration is
  ``<= theta - t`` (boxes are still present at their event time and vanish
  just after).

Both branches evaluate the clocks ``theta + t`` and ``theta - t`` in floating
point through :func:`left_clock` / :func:`right_clock`; every comparison in the
package goes through these two helpers so that the decorated process, the
rectangle construction and the trajectory event list can never disagree on a
rounding boundary.
"""

from __future__ import annotations

import csv
import io
import json
import math
import struct
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .correspondences import (
    DecoratedTableauPair,
    PointConfiguration,
    SemistandardPair,
    row_insert,
)
from .partitions import EMPTY, YoungDiagram, contains


def left_clock(theta: float, t: float) -> float:
    return theta + t


def right_clock(theta: float, t: float) -> float:
    return theta - t


def _check_time(theta: float, t: float):
    if not -theta <= t <= theta:
        raise ValueError(f"time {t} outside [-{theta}, {theta}]")


def shape_below(rows: Sequence[Sequence[int]], m: int) -> YoungDiagram:
    """Shape of the cells of a tableau holding entries ``<= m``.

    Rows are weakly increasing, so each row contributes a prefix.
    """
    out = []
    for row in rows:
        c = bisect_right(row, m)
        if c == 0:
            break
        out.append(c)
    return YoungDiagram._trusted(out)


def diagram_at(pair: DecoratedTableauPair, t: float) -> YoungDiagram:
    theta = pair.theta
    _check_time(theta, t)
    if t <= 0:
        m = bisect_right(pair.left_decorations, left_clock(theta, t))
        return shape_below(pair.left.rows, m)
    m = bisect_right(pair.right_decorations, right_clock(theta, t))
    return shape_below(pair.right.rows, m)


def line_at(pair: DecoratedTableauPair, i: int, t: float) -> int:
    """Position of line ``i`` (1-based): row length minus ``i``."""
    if i < 1:
        raise ValueError("line index starts at 1")
    return diagram_at(pair, t).row(i - 1) - i


def _ordered(x: float) -> int:
    # integer key with the same order as the floats
    (bits,) = struct.unpack("<q", struct.pack("<d", x))
    return bits if bits >= 0 else -(bits & 0x7FFFFFFFFFFFFFFF)


def _unordered(key: int) -> float:
    bits = key if key >= 0 else (-key) | -0x8000000000000000
    return struct.unpack("<d", struct.pack("<q", bits))[0]


def _boundary(lo: float, hi: float, pred) -> float:
    """Smallest float in [lo, hi] where the monotone ``pred`` holds; ``pred(hi)`` must hold."""
    a, b = _ordered(lo), _ordered(hi)
    if pred(lo):
        return lo
    while b - a > 1:
        mid = (a + b) // 2
        if pred(_unordered(mid)):
            b = mid
        else:
            a = mid
    return _unordered(b)


def _first_time_at_or_after(theta: float, dec: float) -> float:
    # smallest float t with left_clock(theta, t) >= dec
    return _boundary(-theta, 0.0, lambda t: left_clock(theta, t) >= dec)


def _last_time_at_or_before(theta: float, dec: float) -> float:
    # largest float t with right_clock(theta, t) >= dec
    after = _boundary(0.0, theta, lambda t: right_clock(theta, t) < dec) if dec > 0 else theta
    if right_clock(theta, after) >= dec:
        return after
    return math.nextafter(after, -math.inf)


@dataclass(frozen=True)
class DiagramTrajectory:
    """Event-based piecewise-constant path of Young diagrams on [-theta, theta].

    ``events[0]`` is ``(-theta, EMPTY)``.  An event at ``time <= 0`` takes
    effect at ``time`` (inclusive); an event at ``time > 0`` - or a removal at
    ``time == 0`` listed after the growth events - takes effect just after
    ``time``.  ``split`` is the index of the first shrinking event.
    """

    theta: float
    events: tuple[tuple[float, YoungDiagram], ...]
    split: int

    def value_at(self, t: float) -> YoungDiagram:
        _check_time(self.theta, t)
        times = [e[0] for e in self.events]
        if t <= 0:
            idx = bisect_right(times, t, 0, self.split) - 1
        else:
            idx = bisect_left(times, t, self.split) - 1
        return self.events[max(idx, 0)][1]

    @property
    def times(self) -> list[float]:
        return [e[0] for e in self.events]

    def lines(self, top: int = 0) -> dict[int, list[tuple[float, int]]]:
        """Step changes of each line ``i``: list of (event_time, new_value).

        With ``top == 0`` every line that ever moves is reported.
        """
        out: dict[int, list[tuple[float, int]]] = {}
        prev = EMPTY
        for time, diagram in self.events[1:]:
            for i in range(max(len(prev), len(diagram))):
                if prev.row(i) != diagram.row(i):
                    out.setdefault(i + 1, []).append((time, diagram.row(i) - i - 1))
            prev = diagram
        if top:
            out = {i: v for i, v in out.items() if i <= top}
        return dict(sorted(out.items()))

    def to_json(self) -> dict:
        return {
            "theta": self.theta,
            "split": self.split,
            "events": [[time, list(d)] for time, d in self.events],
        }

    @classmethod
    def from_json(cls, obj) -> "DiagramTrajectory":
        if isinstance(obj, str):
            obj = json.loads(obj)
        events = tuple((float(time), YoungDiagram(d)) for time, d in obj["events"])
        return cls(float(obj["theta"]), events, int(obj["split"]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["line_index", "event_time", "new_value"])
        for i, steps in self.lines().items():
            for time, value in steps:
                writer.writerow([i, repr(time), value])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, theta: float) -> "DiagramTrajectory":
        """Rebuild a trajectory from :meth:`to_csv` output."""
        rows = list(csv.DictReader(io.StringIO(text)))
        changes: dict[float, dict[int, int]] = {}
        for row in rows:
            time = float(row["event_time"])
            changes.setdefault(time, {})[int(row["line_index"])] = int(row["new_value"])
        lengths: dict[int, int] = {}
        grow, shrink = [], []
        # growth events come first (times <= 0 that add cells); a removal at time
        # zero is recognised by its decreasing row length
        for time in sorted(changes):
            new = dict(lengths)
            for i, value in changes[time].items():
                new[i] = value + i
            increasing = all(new[i] >= lengths.get(i, 0) for i in changes[time])
            lengths = {i: v for i, v in new.items() if v}
            diagram = YoungDiagram(lengths.get(i, 0) for i in range(1, max(lengths, default=0) + 1))
            (grow if increasing and not shrink else shrink).append((time, diagram))
        events = ((-float(theta), EMPTY),) + tuple(grow) + tuple(shrink)
        return cls(float(theta), events, 1 + len(grow))


def full_trajectory(pair: DecoratedTableauPair) -> DiagramTrajectory:
    theta = pair.theta
    n = pair.left.size
    events: list[tuple[float, YoungDiagram]] = [(-theta, EMPTY)]
    for m, dec in enumerate(pair.left_decorations, start=1):
        events.append((_first_time_at_or_after(theta, dec), shape_below(pair.left.rows, m)))
    split = len(events)
    for m in range(n, 0, -1):
        dec = pair.right_decorations[m - 1]
        events.append((_last_time_at_or_before(theta, dec), shape_below(pair.right.rows, m - 1)))
    return DiagramTrajectory(theta, tuple(events), split)


def rs_shape(values: Sequence) -> YoungDiagram:
    p, _ = row_insert(list(values))
    return YoungDiagram._trusted(len(r) for r in p)


def rectangle(theta: float, t: float) -> tuple[float, float]:
    """Corner (u(t), v(t)) of the rectangle swept counterclockwise around the square."""
    if t <= 0:
        return theta, right_clock(theta, -t)
    return right_clock(theta, t), theta


def curve_process(config: PointConfiguration, t: float) -> YoungDiagram:
    """RS shape of the points inside [0, u(t)] x [0, v(t)]."""
    theta = config.theta
    _check_time(theta, t)
    u, v = rectangle(theta, t)
    ys = [y for x, y in config.points if x <= u and y <= v]
    # comparisons on the raw y-values match those on their ranks
    return rs_shape(ys)


def lattice_index(theta, k: int, clock) -> int:
    """Number of lattice points m*theta/k (1 <= m <= k) that are <= clock, exactly."""
    value = Fraction(clock) * k / Fraction(theta)
    return max(0, min(k, math.floor(value)))


def lattice_count(theta, k: int, x, y) -> int:
    """Number of lattice points of {theta/k, ..., theta} in the interval (x, y]."""
    return max(0, lattice_index(theta, k, y) - lattice_index(theta, k, x))


def discrete_diagram_at(pair: SemistandardPair, theta, k: int, t) -> YoungDiagram:
    """Cells whose entry times theta/k lie below the clock, evaluated exactly."""
    _check_time(theta, t)
    if pair.k > k:
        raise ValueError(f"tableau entries exceed k={k}")
    th, tt = Fraction(theta), Fraction(t)
    if t <= 0:
        return shape_below(pair.left.rows, lattice_index(th, k, th + tt))
    return shape_below(pair.right.rows, lattice_index(th, k, th - tt))


def check_staircase(traj: DiagramTrajectory, single_box: bool = True) -> None:
    """Raise ``AssertionError`` if the event list is not a nested staircase."""
    prev = EMPTY
    for idx, (_, d) in enumerate(traj.events[1:], start=1):
        growing = idx < traj.split
        lo, hi = (prev, d) if growing else (d, prev)
        assert contains(hi, lo), (prev, d)
        if single_box:
            assert hi.size - lo.size == 1, (prev, d)
        prev = d
    assert prev == EMPTY


def ensemble_is_ordered(diagrams: Iterable[YoungDiagram], lines: int) -> bool:
    """Strict ordering line(1) > line(2) > ... at each given diagram."""
    for d in diagrams:
        vals = [d.row(i) - i - 1 for i in range(lines)]
        if any(a <= b for a, b in zip(vals, vals[1:])):
            return False
    return True
