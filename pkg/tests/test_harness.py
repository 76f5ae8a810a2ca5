import math
from fractions import Fraction

import pytest
from hypothesis import given
import hypothesis.strategies as st

from poissonized_rs.correspondences import LatticeConfiguration, PointConfiguration, drs, rsk
from poissonized_rs.exactlaw import FddQuery
from poissonized_rs.harness import (
    Observable,
    _lattice_probes,
    _probes,
    bernoulli_report,
    count_polylines,
    diagrams_from_counts,
    diagrams_from_points,
    estimate_fdd,
    estimate_fdds,
    estimate_observables,
    lln_topline,
    pooled_report,
    render_ensemble,
    tally_diagrams,
    top_line,
    verify_arches,
)
from poissonized_rs.partitions import EMPTY
from poissonized_rs.sampling import RngSpec, sample_poisson_square
from poissonized_rs.trajectories import DiagramTrajectory, diagram_at, discrete_diagram_at, full_trajectory

from conftest import lattice_matrices, point_configurations

TIMES = (-1.0, -0.6, -0.25, 0.0, 0.1, 0.5, 1.0)


def test_report_statistics():
    r = bernoulli_report("x", 300, 1000, 0.25)
    assert r.empirical == 0.3
    assert math.isclose(r.stderr, math.sqrt(0.3 * 0.7 / 1000))
    assert math.isclose(r.z_score, 0.05 / r.stderr)
    assert r.passed
    assert not bernoulli_report("x", 400, 1000, 0.25).passed
    assert bernoulli_report("x", 400, 1000, 0.25, threshold=20).passed
    # zero hits: spread taken at the reference
    r0 = bernoulli_report("x", 0, 10_000, 1e-3)
    assert r0.stderr == 0 and math.isclose(r0.z_score, -1e-3 / math.sqrt(1e-3 * (1 - 1e-3) / 10_000))
    assert bernoulli_report("x", 0, 100, 0.0).z_score == 0.0


def test_pooled_report():
    r = pooled_report("y", 50, 1000, 70, 1000)
    pooled = 0.06
    se = math.sqrt(pooled * (1 - pooled) * 2 / 1000)
    assert math.isclose(r.z_score, -0.02 / se)
    assert r.to_json()["other_hits"] == 70


@given(point_configurations())
def test_fast_path_matches_decorated_rs(cfg):
    pair = drs(cfg)
    got = diagrams_from_points(list(cfg.xs), list(cfg.ys), _probes(1.0, TIMES))
    assert got == tuple(diagram_at(pair, t) for t in TIMES)


@given(lattice_matrices(k=3), st.lists(st.fractions(-1, 1), min_size=1, max_size=4))
def test_lattice_fast_path_matches_rsk(counts, times):
    pair = rsk(LatticeConfiguration(counts, 1.0, 3))
    flat = [c for row in counts for c in row]
    got = diagrams_from_counts(flat, 3, _lattice_probes(1, 3, times))
    assert got == tuple(discrete_diagram_at(pair, 1, 3, t) for t in times)


def test_tally_independent_of_workers():
    serial = tally_diagrams(1.0, (-0.5, 0.0), 4000, RngSpec(3), streams=4, workers=1)
    parallel = tally_diagrams(1.0, (-0.5, 0.0), 4000, RngSpec(3), streams=4, workers=2)
    assert serial == parallel
    assert sum(serial.values()) == 4000
    lattice = tally_diagrams(0.5, (0.0,), 3000, RngSpec(3), k=2, streams=3, workers=2)
    assert lattice == tally_diagrams(0.5, (0.0,), 3000, RngSpec(3), k=2, streams=3)


def test_tally_rejects_bad_times():
    with pytest.raises(ValueError):
        tally_diagrams(1.0, (1.5,), 10, RngSpec())


def test_estimate_fdd_small():
    report = estimate_fdd(FddQuery(1, ((0, ()),)), 20_000, RngSpec(5), streams=2)
    assert report.samples == 20_000
    assert math.isclose(report.exact, math.exp(-1))
    assert report.passed
    lattice = estimate_fdd(FddQuery(0.5, ((0, (1,)),), 2), 20_000, RngSpec(5))
    assert lattice.passed


def test_estimate_fdds_shares_one_pass():
    queries = [FddQuery(1, ((0, ()),)), FddQuery(1, ((-0.5, (1,)), (0, (1,))))]
    reports = estimate_fdds(queries, 5000, RngSpec(2))
    assert [r.samples for r in reports] == [5000, 5000]
    with pytest.raises(ValueError):
        estimate_fdds([queries[0], FddQuery(2, ((0, ()),))], 10, RngSpec())


def test_marginal_observable():
    ob = Observable.marginal((1,), -0.5, 1.0)
    # parameter^2 = 1/2
    assert math.isclose(ob.exact, 0.5 * math.exp(-0.5))
    (report,) = estimate_observables([ob], 1.0, 20_000, RngSpec(4))
    assert report.passed


def test_verify_arches_small():
    reports = verify_arches(0.5, 2, (0.0,), 5000, RngSpec(9))
    names = [r.name for r in reports]
    assert any(name.endswith("t=0:(0, -1)") for name in names)
    assert all(r.passed for r in reports)
    with pytest.raises(ValueError):
        verify_arches(0.5, 4, (0.0,), 10)
    with pytest.raises(ValueError):
        verify_arches(2.0, 1, (0.0,), 10)


def test_top_line_and_lln_rows():
    cfg = PointConfiguration(((0.1, 0.1), (0.2, 0.3), (0.5, 0.2), (0.9, 0.95)), 1.0)
    assert top_line(cfg, 0.0) == 2
    assert top_line(cfg, -1.0) == -1
    rows = lln_topline(10.0, (0.0, 0.5), RngSpec(1), draws=2)
    assert [r.tau for r in rows] == [0.0, 0.5]
    assert rows[1].target == pytest.approx(2 * math.sqrt(0.5))
    assert rows[0].to_json()["draws"] == 2
    with pytest.raises(ValueError):
        lln_topline(10.0, (1.0,))


def test_render_empty_trajectory(tmp_path):
    traj = full_trajectory(drs(PointConfiguration((), 1.0)))
    svg = render_ensemble(traj, 0, "svg", tmp_path / "e.svg")
    assert count_polylines(svg) == 0
    assert 'class="axis"' in svg
    assert (tmp_path / "e.svg").read_text() == svg


def test_render_lines_and_csv(tmp_path):
    cfg = sample_poisson_square(3.0, RngSpec(2))
    traj = full_trajectory(drs(cfg))
    svg = render_ensemble(traj, 0, "svg")
    assert count_polylines(svg) == len(traj.lines())
    assert count_polylines(render_ensemble(traj, 2, "svg")) == 2
    csv_text = render_ensemble(traj, 0, "csv", tmp_path / "t.csv")
    back = DiagramTrajectory.from_csv(csv_text, traj.theta)
    assert back == traj
    with pytest.raises(ValueError):
        render_ensemble(traj, 0, "png")
