from fractions import Fraction

import pytest
from hypothesis import given
import hypothesis.strategies as st

from poissonized_rs.correspondences import (
    DecoratedTableauPair,
    LatticeConfiguration,
    PointConfiguration,
    SemistandardPair,
    drs,
    rsk,
)
from poissonized_rs.partitions import EMPTY, SemistandardTableau, StandardTableau, YoungDiagram
from poissonized_rs.trajectories import (
    DiagramTrajectory,
    check_staircase,
    curve_process,
    diagram_at,
    discrete_diagram_at,
    ensemble_is_ordered,
    full_trajectory,
    lattice_count,
    lattice_index,
    line_at,
    rectangle,
    rs_shape,
)

from conftest import lattice_matrices, point_configurations

EXAMPLE = StandardTableau(((1, 2, 4), (3, 5), (6,)))
DECS = (0.02, 0.03, 0.05, 0.07, 0.11, 0.13)


def example_pair():
    return DecoratedTableauPair(EXAMPLE, EXAMPLE, DECS, DECS, 1.0)


def test_diagram_at_worked_example():
    pair = example_pair()
    assert diagram_at(pair, -1 + 0.06) == (2, 1)
    assert diagram_at(pair, -1.0) == EMPTY
    assert diagram_at(pair, 1.0) == EMPTY
    assert diagram_at(pair, 0.0) == (3, 2, 1)
    with pytest.raises(ValueError):
        diagram_at(pair, 1.5)


def test_left_branch_includes_event_time():
    pair = drs(PointConfiguration(((0.25, 0.5),), 1.0))
    assert diagram_at(pair, -0.5) == (1,)
    assert diagram_at(pair, -0.5000001) == EMPTY
    # right branch: the box is still there at theta - x and gone just after
    assert diagram_at(pair, 0.75) == (1,)
    assert diagram_at(pair, 0.7500001) == EMPTY


def test_line_at():
    pair = example_pair()
    assert [line_at(pair, i, -1.0) for i in (1, 2, 3)] == [-1, -2, -3]
    assert line_at(pair, 7, 0.0) == -7
    single = drs(PointConfiguration(((0.25, 0.5),), 1.0))
    assert line_at(single, 1, 0.0) == 0


def test_full_trajectory_single_point():
    traj = full_trajectory(drs(PointConfiguration(((0.25, 0.5),), 1.0)))
    assert traj.times == [-1.0, -0.5, 0.75]
    assert traj.value_at(-0.5) == (1,)
    assert traj.value_at(0.75) == (1,)
    assert traj.value_at(0.76) == EMPTY


def test_empty_trajectory():
    traj = full_trajectory(drs(PointConfiguration((), 2.0)))
    assert traj.events == ((-2.0, EMPTY),)
    assert traj.lines() == {}
    assert traj.value_at(0.3) == EMPTY


@given(point_configurations())
def test_trajectory_matches_diagram_at(cfg):
    pair = drs(cfg)
    traj = full_trajectory(pair)
    assert len(traj.events) == 1 + 2 * len(cfg)
    check_staircase(traj)
    probes = [-1.0, 0.0, 1.0] + traj.times + [(a + b) / 2 for a, b in zip(traj.times, traj.times[1:])]
    for t in probes:
        if -1 <= t <= 1:
            assert traj.value_at(t) == diagram_at(pair, t)


@given(point_configurations())
def test_trajectory_serialisation_round_trip(cfg):
    traj = full_trajectory(drs(cfg))
    assert DiagramTrajectory.from_json(traj.to_json()) == traj
    # CSV keeps step changes only: coincident events merge, the path is unchanged
    back = DiagramTrajectory.from_csv(traj.to_csv(), 1.0)
    times = sorted(set(traj.times))
    probes = times + [(a + b) / 2 for a, b in zip(times, times[1:])]
    assert [back.value_at(t) for t in probes] == [traj.value_at(t) for t in probes]
    if len(times) == len(traj.times):
        assert back == traj


@given(point_configurations())
def test_curve_process_equals_decorated_process(cfg):
    pair = drs(cfg)
    times = [i / 25 - 1 for i in range(51)]
    times += [y - 1 for y in cfg.ys] + [1 - x for x in cfg.xs]
    for t in times:
        t = min(max(t, -1.0), 1.0)
        assert curve_process(cfg, t) == diagram_at(pair, t)


def test_curve_process_endpoints():
    cfg = PointConfiguration(((0.2, 0.4), (0.6, 0.3), (0.7, 0.9)), 1.0)
    assert curve_process(cfg, -1.0) == EMPTY
    assert curve_process(cfg, 1.0) == EMPTY
    assert curve_process(cfg, 0.0) == rs_shape(cfg.ys) == (2, 1)
    assert rectangle(1.0, -0.25) == (1.0, 0.75)
    assert rectangle(1.0, 0.25) == (0.75, 1.0)


@given(point_configurations())
def test_lines_do_not_intersect(cfg):
    traj = full_trajectory(drs(cfg))
    diagrams = [d for _, d in traj.events]
    assert ensemble_is_ordered(diagrams, len(cfg) + 1)


def test_lattice_counting_is_exact():
    assert lattice_index(1, 10, Fraction(3, 10)) == 3
    assert lattice_index(0.3, 3, 0.1) == 1
    assert lattice_index(1, 4, -0.5) == 0
    assert lattice_index(1, 4, 7) == 4
    # half-open interval (x, y]
    assert lattice_count(1, 4, Fraction(1, 4), Fraction(3, 4)) == 2
    assert lattice_count(1, 4, 0, 1) == 4


def test_discrete_worked_example():
    t = SemistandardTableau(((1, 2, 2), (3, 4)), bound=4)
    pair = SemistandardPair(t, t)
    theta = Fraction(1)
    assert discrete_diagram_at(pair, theta, 4, -theta + 2 * theta / 4) == (3,)
    assert discrete_diagram_at(pair, theta, 4, 0) == (3, 2)
    assert discrete_diagram_at(pair, theta, 4, -1) == EMPTY
    assert discrete_diagram_at(pair, theta, 4, 1) == EMPTY


@given(lattice_matrices(), st.fractions(-1, 1))
def test_discrete_diagrams_nest(counts, t):
    pair = rsk(LatticeConfiguration(counts, 1.0, 3))
    d = discrete_diagram_at(pair, 1, 3, t)
    zero = discrete_diagram_at(pair, 1, 3, 0)
    assert zero == pair.shape
    assert all(a <= b for a, b in zip(d, zero)) and len(d) <= len(zero)
