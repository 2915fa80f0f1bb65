from fractions import Fraction

import numpy as np
import pytest

from wittkit.sparse import EchelonBasis, SparseRationalMatrix, congruent_form, solve_dense


def test_rank_and_nullspace_small():
    A = SparseRationalMatrix.from_dense([[1, 2, 3], [2, 4, 6], [0, 1, 1]])
    assert A.rank() == 2
    kernel = A.nullspace()
    assert len(kernel) == 1
    assert A.apply(kernel[0]) == {}


def test_zero_matrix():
    Z = SparseRationalMatrix.zeros(3, 4)
    assert Z.is_zero()
    assert Z.rank() == 0
    assert len(Z.nullspace()) == 4


def test_rref_is_reduced():
    A = SparseRationalMatrix.from_dense([[0, 2, 4], [1, 1, 1], [1, 3, 5]])
    reduced = A.rref()
    pivots = [c for c, _ in reduced]
    assert pivots == sorted(pivots)
    for c, row in reduced:
        assert row[c] == 1
        for other in pivots:
            if other != c:
                assert other not in row


def test_submatrix_and_transpose():
    A = SparseRationalMatrix.from_dense([[1, 0, 2], [0, 3, 0]])
    assert A.transpose().shape == (3, 2)
    assert A.transpose()[2, 0] == 2
    B = A.submatrix([1], [1, 2])
    assert B.to_dense() == [[3, 0]]


def test_matmul_matches_dense():
    A = SparseRationalMatrix.from_dense([[1, 2], [0, 1]])
    B = SparseRationalMatrix.from_dense([[Fraction(1, 2), 0], [1, 1]])
    assert (A @ B).to_dense() == [[Fraction(5, 2), 2], [1, 1]]


def test_entries_out_of_range():
    with pytest.raises(IndexError):
        SparseRationalMatrix.from_entries(2, 2, {(2, 0): 1})


def test_echelon_basis():
    basis = EchelonBasis([{0: 1, 1: 1}, {1: 1, 2: 1}])
    assert len(basis) == 2
    assert basis.contains({0: 1, 2: -1})
    assert not basis.contains({2: 1})
    assert basis.add({0: 2, 1: 2}) == {}
    assert basis.add({2: 1})
    assert len(basis) == 3


def test_solve_dense():
    x = solve_dense([[2, 0], [0, 4]], [[1], [2]])
    assert x == [[Fraction(1, 2)], [Fraction(1, 2)]]


def test_solve_dense_inconsistent():
    with pytest.raises(ValueError):
        solve_dense([[1, 1], [1, 1]], [[0], [1]])


def test_solve_dense_underdetermined():
    x = solve_dense([[1, 2, 0], [0, 0, 3]], [[4, 1], [6, 0]])
    assert x == [[4, 1], [0, 0], [2, 0]]


def test_congruent_form():
    p = [[1, 1], [0, 1]]
    form = [[Fraction(1, 2), 0], [0, -1]]
    assert congruent_form(p, form) == [[Fraction(1, 2), Fraction(1, 2)], [Fraction(1, 2), Fraction(-1, 2)]]


def test_rank_matches_numpy_on_random_integer_matrices():
    rng = np.random.default_rng(7)
    for _ in range(100):
        rows, cols = rng.integers(1, 7, size=2)
        dense = rng.integers(-2, 3, size=(rows, cols))
        dense[rng.random((rows, cols)) < 0.4] = 0
        A = SparseRationalMatrix.from_dense(dense.tolist())
        rank = A.rank()
        assert rank == np.linalg.matrix_rank(dense.astype(float))
        assert rank == A.transpose().rank()
        kernel = A.nullspace()
        assert rank + len(kernel) == cols
        for vec in kernel:
            assert A.apply(vec) == {}
