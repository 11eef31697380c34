from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from derived_tame import linalg
from derived_tame.fields import QQ, finite_field, parse_field
from oracles import rank_exact

FIELDS = [finite_field(q) for q in (2, 3, 4, 5, 9, 13)]


@pytest.mark.parametrize("F", FIELDS, ids=lambda F: F.name)
def test_field_axioms_exhaustive(F):
    els = np.array(list(F.elements()), dtype=F.dtype)
    a, b = np.meshgrid(els, els, indexing="ij")
    assert (F.add(a, b) == F.add(b, a)).all()
    assert (F.mul(a, b) == F.mul(b, a)).all()
    nz = els[~F.is_zero(els)]
    assert (F.mul(nz, F.inv(nz)) == F.one).all()
    assert (F.add(els, F.neg(els)) == F.zero).all()


@pytest.mark.parametrize("F", FIELDS, ids=lambda F: F.name)
def test_primitive_element_generates(F):
    w = F.primitive_element
    powers = {int(F.power(w, k)) for k in range(F.order - 1)}
    assert len(powers) == F.order - 1


def test_parse_field_names():
    assert parse_field("Q") is QQ
    assert parse_field("F9").order == 9
    with pytest.raises(ValueError):
        parse_field("F6")


def test_rational_matmul_mixed_denominators():
    A = QQ.asarray([[Fraction(1, 2), 3], [Fraction(-2, 3), Fraction(5, 7)]])
    B = QQ.asarray([[1, Fraction(1, 5)], [Fraction(4, 9), 0]])
    expected = [[sum(Fraction(A[i, k]) * Fraction(B[k, j]) for k in range(2)) for j in range(2)] for i in range(2)]
    assert QQ.matmul(A, B).tolist() == expected


def test_rational_inverse_of_integer_entries_stays_exact():
    inv = QQ.inv(np.array([2, 3], dtype=object))
    assert list(inv) == [Fraction(1, 2), Fraction(1, 3)]


matrices = st.tuples(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**32))


@settings(max_examples=40, deadline=None)
@given(matrices, st.sampled_from([2, 3, 5, 4]))
def test_rank_nullity(shape, q):
    m, n, seed = shape
    F = finite_field(q)
    M = F.random((m, n), np.random.default_rng(seed))
    N = linalg.nullspace(F, M)
    assert linalg.rank(F, M) + N.shape[0] == n
    if N.shape[0]:
        assert F.is_zero(F.matmul(M, N.T)).all()


@settings(max_examples=40, deadline=None)
@given(matrices)
def test_rank_matches_independent_oracle(shape):
    m, n, seed = shape
    rng = np.random.default_rng(seed)
    for F in (finite_field(3), QQ):
        M = F.random((m, n), rng)
        assert linalg.rank(F, M) == rank_exact(M, F)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32))
def test_inverse_and_solve(n, seed):
    F = finite_field(5)
    rng = np.random.default_rng(seed)
    A = F.random((n, n), rng)
    b = F.random(n, rng)
    if linalg.is_invertible(F, A):
        Ai = linalg.inverse(F, A)
        assert (F.matmul(A, Ai) == F.eye(n)).all()
        x = linalg.solve(F, A, b)
        assert (F.matmul(A, x[:, None])[:, 0] == b).all()


@settings(max_examples=30, deadline=None)
@given(matrices)
def test_rref_is_idempotent(shape):
    m, n, seed = shape
    F = finite_field(3)
    M = F.random((m, n), np.random.default_rng(seed))
    R, piv = linalg.rref(F, M)
    R2, piv2 = linalg.rref(F, R)
    assert (R == R2).all() and piv == piv2


def test_intersect_rowspaces():
    F = finite_field(3)
    U = F.asarray([[1, 0, 0], [0, 1, 0]])
    V = F.asarray([[0, 1, 0], [0, 0, 1]])
    W = linalg.intersect_rowspaces(F, U, V)
    assert W.shape[0] == 1 and linalg.rank(F, np.vstack([W, F.asarray([[0, 1, 0]])])) == 1
