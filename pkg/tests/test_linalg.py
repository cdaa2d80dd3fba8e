"""Exact linear algebra: fraction-free elimination, rank, nullspace."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gielab import linalg

fractions = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))


def matrix(rows, cols):
    return st.lists(st.lists(fractions, min_size=cols, max_size=cols),
                    min_size=rows, max_size=rows)


def test_rank_of_identity():
    eye = [[Fraction(int(i == j)) for j in range(4)] for i in range(4)]
    assert linalg.rank(eye) == 4


def test_rank_of_dependent_rows():
    rows = [[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]]
    assert linalg.rank(rows) == 1


def test_det_small_oracle():
    # [[1,2],[3,4]] -> -2, computed by hand
    assert linalg.det([[Fraction(1), Fraction(2)],
                       [Fraction(3), Fraction(4)]]) == -2


def test_det_singular():
    rows = [[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]]
    assert linalg.det(rows) == 0


@settings(max_examples=60, deadline=None)
@given(matrix(3, 3))
def test_det_vanishes_iff_rank_deficient(rows):
    assert (linalg.det(rows) == 0) == (linalg.rank(rows) < 3)


@settings(max_examples=60, deadline=None)
@given(matrix(3, 5))
def test_nullspace_annihilates(rows):
    basis = linalg.nullspace(rows, n_cols=5)
    assert linalg.rank(rows) + len(basis) == 5
    for v in basis:
        for row in rows:
            assert sum((a * b for a, b in zip(row, v)), Fraction(0)) == 0


@settings(max_examples=60, deadline=None)
@given(matrix(4, 4))
def test_sparse_echelon_matches_dense_rank(rows):
    ech = linalg.SparseEchelon()
    for row in rows:
        ech.insert({j: v for j, v in enumerate(row) if v})
    assert ech.rank == linalg.rank(rows)


def test_sparse_echelon_insert_reports_novelty():
    ech = linalg.SparseEchelon()
    assert ech.insert({0: Fraction(2)}) is True
    assert ech.insert({0: Fraction(5)}) is False
    assert ech.insert({1: Fraction(1)}) is True
    assert ech.rank == 2


def test_independent():
    assert linalg.independent([[Fraction(1), Fraction(0)],
                               [Fraction(1), Fraction(1)]])
    assert not linalg.independent([[Fraction(1), Fraction(2)],
                                   [Fraction(2), Fraction(4)]])
