import hypothesis.strategies as st
from hypothesis import settings

from poissonized_rs.correspondences import PointConfiguration
from poissonized_rs.partitions import YoungDiagram

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@st.composite
def diagrams(draw, max_size=8):
    n = draw(st.integers(0, max_size))
    rows = []
    while n:
        part = draw(st.integers(1, min(n, rows[-1] if rows else n)))
        rows.append(part)
        n -= part
    return YoungDiagram(rows)


@st.composite
def skew_shapes(draw, max_size=7):
    outer = draw(diagrams(max_size))
    inner = [draw(st.integers(0, r)) for r in outer]
    # make the inner rows weakly decreasing
    for i in range(1, len(inner)):
        inner[i] = min(inner[i], inner[i - 1])
    return outer, YoungDiagram(inner)


@st.composite
def permutations(draw, max_n=8):
    n = draw(st.integers(0, max_n))
    return tuple(draw(st.permutations(range(1, n + 1))))


@st.composite
def point_configurations(draw, theta=1.0, max_points=7):
    n = draw(st.integers(0, max_points))
    coord = st.floats(0, theta, allow_nan=False, exclude_min=True)
    xs = draw(st.lists(coord, min_size=n, max_size=n, unique=True))
    ys = draw(st.lists(coord, min_size=n, max_size=n, unique=True))
    return PointConfiguration(tuple(zip(xs, ys)), theta)


@st.composite
def lattice_matrices(draw, k=3, max_entry=3):
    return tuple(
        tuple(draw(st.integers(0, max_entry)) for _ in range(k)) for _ in range(k)
    )


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
