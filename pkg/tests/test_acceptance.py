"""Acceptance battery at full scale; one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines inline;
they are also repeated in the terminal summary.
"""

import math

import pytest

from poissonized_rs.suite import CRITERIA_NAMES, SuiteContext, _timed

LINES: list[str] = []


@pytest.fixture(scope="module")
def ctx():
    return SuiteContext(seed=20240611, samples=1_000_000, arch_samples=100_000, streams=8)


def run(ctx, name):
    result = _timed(ctx, name)
    LINES.append(result.line())
    print(result.line())
    return result


def test_01_bijection_exactness(ctx):
    r = run(ctx, "bijections")
    assert r.details["failures"] == {}
    assert r.seconds < 10
    assert r.passed


def test_02_dimension_oracles(ctx):
    r = run(ctx, "dimensions")
    assert r.details["mismatches"] == []
    assert r.seconds < 60
    assert r.passed


def test_03_curve_identity(ctx):
    r = run(ctx, "curve_identity")
    assert r.details["mismatches"] == []
    assert r.passed


def test_04_continuous_fdd_monte_carlo(ctx):
    r = run(ctx, "fdd_continuous")
    assert len(r.reports) >= 5
    exacts = [rep.exact for rep in r.reports]
    e = math.exp(-1)
    for worked in (e, e / 2, e / 4):
        assert any(math.isclose(x, worked, rel_tol=1e-12) for x in exacts)
    assert all(rep.samples == 1_000_000 for rep in r.reports)
    assert all(abs(rep.z_score) <= 4 for rep in r.reports)
    assert r.details["sampling_seconds"] < 120
    assert r.passed


def test_05_marginals(ctx):
    r = run(ctx, "marginals")
    assert r.details["cauchy_max_error"] <= 1e-8
    assert all(abs(rep.z_score) <= 4 for rep in r.reports)
    assert r.passed


def test_06_karlin_mcgregor(ctx):
    r = run(ctx, "karlin_mcgregor")
    assert r.details["mismatches"] == []
    assert r.passed


def test_07_arches(ctx):
    r = run(ctx, "arches")
    for N in (1, 2):
        group = [rep for rep in r.reports if f"N={N} " in rep.name]
        assert group
        assert all(rep.samples >= 100_000 and rep.extra["other_samples"] >= 100_000 for rep in group)
        assert all(abs(rep.z_score) <= 4 for rep in group)
    assert r.passed


def test_08_discrete_fdd_monte_carlo(ctx):
    r = run(ctx, "fdd_discrete")
    assert len(r.reports) >= 3
    assert all(rep.samples == 1_000_000 and abs(rep.z_score) <= 4 for rep in r.reports)
    assert abs(1 - r.details["normalization"]) <= 1e-6 + r.details["tail_bound"]
    assert r.passed


def test_09_discrete_to_continuous(ctx):
    r = run(ctx, "discrete_convergence")
    for key, errs in r.details.items():
        if key.startswith("power_sum"):
            continue
        assert all(a > b for a, b in zip(errs, errs[1:]))
        assert errs[-1] <= 1e-3
    assert r.passed


def test_10_lln_topline(ctx):
    r = run(ctx, "lln_topline")
    for row in r.details["rows"]:
        assert row["draws"] == 20
        assert row["relative_error"] <= 0.05, row
    assert r.passed


def test_11_figure(ctx):
    r = run(ctx, "figure")
    d = r.details
    assert 1440 <= d["points"] <= 1760
    assert 65 <= d["top_line_max"] <= 95
    assert d["non_intersecting"]
    assert r.seconds < 5
    assert r.passed


def test_every_criterion_has_a_test():
    names = {n for n in globals() if n.startswith("test_") and n[5:7].isdigit()}
    assert len(names) == len(CRITERIA_NAMES) == 11
