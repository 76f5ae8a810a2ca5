import math
from fractions import Fraction
from itertools import permutations as perms

import pytest
from hypothesis import given
import hypothesis.strategies as st

from poissonized_rs.partitions import (
    EMPTY,
    CapExceeded,
    SemistandardTableau,
    SkewShape,
    StandardTableau,
    YoungDiagram,
    contains,
    count_ssyt,
    dim_skew_standard,
    dim_standard,
    enumerate_ssyt,
    enumerate_standard,
    exact_det,
    hook_lengths,
    partitions,
    subdiagrams,
)

from conftest import diagrams, skew_shapes


def test_young_diagram_validation():
    assert YoungDiagram((3, 1, 0, 0)) == (3, 1)
    assert YoungDiagram(()).size == 0
    with pytest.raises(ValueError):
        YoungDiagram((1, 2))
    with pytest.raises(ValueError):
        YoungDiagram((2, -1))


def test_conjugate():
    assert YoungDiagram((3, 1)).conjugate() == (2, 1, 1)
    assert EMPTY.conjugate() == EMPTY


def test_skew_shape_needs_containment():
    with pytest.raises(ValueError):
        SkewShape(YoungDiagram((1,)), YoungDiagram((2,)))
    assert SkewShape(YoungDiagram((3, 2)), YoungDiagram((1,))).size == 4


def test_partition_counts():
    # p(n) for n = 0..10
    assert [sum(1 for _ in partitions(n)) for n in range(11)] == [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]


def test_dimension_examples():
    assert dim_standard((2, 1)) == 2
    assert dim_standard((3, 2, 1)) == 16
    assert dim_standard(()) == 1
    assert hook_lengths((2, 1)) == [3, 1, 1]


def test_dimension_squares_sum_to_factorial():
    for n in range(9):
        assert sum(dim_standard(lam) ** 2 for lam in partitions(n)) == math.factorial(n)


def test_skew_dimension_examples():
    # two disconnected boxes: both orders allowed
    assert dim_skew_standard(SkewShape(YoungDiagram((2, 1)), YoungDiagram((1,)))) == 2
    assert dim_skew_standard(SkewShape(YoungDiagram((2, 2)), YoungDiagram((2, 2)))) == 1


def test_count_ssyt_examples():
    one = SkewShape(YoungDiagram((1,)), EMPTY)
    assert count_ssyt(one, 5) == 5
    assert count_ssyt(SkewShape(YoungDiagram((2,)), EMPTY), 2) == 3
    assert count_ssyt(SkewShape(YoungDiagram((1, 1)), EMPTY), 2) == 1
    with pytest.raises(ValueError):
        count_ssyt(one, 0)
    assert count_ssyt(SkewShape(EMPTY, EMPTY), 0) == 1


def test_exact_det():
    assert exact_det([[1, 2], [3, 4]]) == -2
    assert exact_det([[Fraction(1, 2), 0], [0, 4]]) == 2
    assert exact_det([]) == 1


def test_brute_force_determinant_oracle():
    m = [[2, -1, 0], [1, 3, 2], [0, 5, 1]]
    leibniz = 0
    for p in perms(range(3)):
        sign = (-1) ** sum(p[i] > p[j] for i in range(3) for j in range(i + 1, 3))
        leibniz += sign * m[0][p[0]] * m[1][p[1]] * m[2][p[2]]
    assert exact_det(m) == leibniz


def test_tableau_validation():
    StandardTableau(((1, 2, 4), (3, 5), (6,)))
    with pytest.raises(ValueError):
        StandardTableau(((1, 3), (2, 2)))
    with pytest.raises(ValueError):
        StandardTableau(((2, 1),))
    SemistandardTableau(((1, 2, 2), (3, 4)), bound=4)
    with pytest.raises(ValueError):
        SemistandardTableau(((1, 1), (1,)), bound=2)


def test_enumeration_cap():
    with pytest.raises(CapExceeded):
        enumerate_standard((11,))


@given(diagrams(8))
def test_hook_length_matches_enumeration(lam):
    assert dim_standard(lam) == len(enumerate_standard(lam))


@given(skew_shapes(7))
def test_aitken_matches_enumeration(shape):
    outer, inner = shape
    skew = SkewShape(outer, inner)
    tableaux = enumerate_standard(skew)
    assert dim_skew_standard(skew) == len(tableaux)
    assert len(set(tableaux)) == len(tableaux)
    for t in tableaux:
        assert t.skew_shape == skew


@given(skew_shapes(6), st.integers(1, 4))
def test_jacobi_trudi_matches_enumeration(shape, k):
    skew = SkewShape(*shape)
    assert count_ssyt(skew, k) == len(enumerate_ssyt(skew, k))


@given(diagrams(8))
def test_subdiagrams_are_contained(lam):
    subs = list(subdiagrams(lam))
    assert len(subs) == len(set(subs))
    assert EMPTY in subs and lam in subs
    assert all(contains(lam, mu) for mu in subs)


@given(diagrams(10))
def test_conjugate_is_involution(lam):
    assert lam.conjugate().conjugate() == lam
    assert dim_standard(lam.conjugate()) == dim_standard(lam)
