import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from helpers import descartes_signature, random_rational_matrix, to_sympy
from lefschetz_lab.exactlin import (
    Echelon,
    RatMatrix,
    hermite_normal_form,
    kernel,
    rref,
    saturate_integral,
    signature,
    smith_normal_form,
    solve,
    span_saturate,
    sparse,
    to_fraction,
)

small = st.integers(-5, 5)


def int_matrices(max_r=4, max_c=4):
    return st.integers(1, max_r).flatmap(
        lambda r: st.integers(1, max_c).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


def test_floats_refused():
    with pytest.raises(TypeError):
        to_fraction(0.5)
    with pytest.raises(TypeError):
        RatMatrix([[1.0]])
    assert to_fraction("3/4") == Fraction(3, 4)


def test_rref_examples():
    R, piv, rank = rref(RatMatrix.identity(3))
    assert R == RatMatrix.identity(3) and rank == 3
    R, piv, rank = rref(RatMatrix.zeros(2, 4))
    assert R.is_zero() and rank == 0
    R, piv, rank = rref(RatMatrix([[1, 2], [2, 4]]))
    assert R == RatMatrix([[1, 2], [0, 0]]) and rank == 1 and piv == (0,)


def test_kernel_examples():
    assert kernel(RatMatrix.identity(3)) == []
    assert len(kernel(RatMatrix.zeros(3, 3))) == 3
    (k,) = kernel(RatMatrix([[1, 1]]))
    assert k.col(0)[0] == -k.col(0)[1] != 0


def test_solve_examples():
    b = [Fraction(3), Fraction(-1, 2)]
    assert solve(RatMatrix.identity(2), b).col(0) == tuple(b)
    assert solve(RatMatrix([[1, 1]]), [2]).col(0) == (2, 0)
    assert solve(RatMatrix([[1], [1]]), [0, 1]) is None


def test_snf_examples():
    assert smith_normal_form(RatMatrix.diag([2, 3])).D == RatMatrix.diag([1, 6])
    r = smith_normal_form(RatMatrix.identity(3))
    assert r.D == RatMatrix.identity(3)
    assert smith_normal_form(RatMatrix([[2, 4], [6, 8]])).D == RatMatrix.diag([2, 4])


def test_signature_examples():
    assert signature(RatMatrix([[0, 1], [1, 0]])).as_tuple() == (1, 1, 0)
    assert signature(RatMatrix.zeros(2, 2)).as_tuple() == (0, 0, 2)
    with pytest.raises(ValueError):
        signature(RatMatrix([[0, 1], [0, 0]]))


def test_span_saturate_examples():
    assert len(span_saturate([(1, 0), (1, 1)])) == 2
    assert len(span_saturate([(1, 2, 3), (2, 4, 6)])) == 1
    assert span_saturate([]) == []


@settings(max_examples=60, deadline=None)
@given(int_matrices())
def test_rref_matches_sympy_and_is_idempotent(rows):
    M = RatMatrix(rows)
    R, piv, rank = rref(M)
    S, spiv = to_sympy(M).rref()
    assert rank == len(spiv) and piv == tuple(spiv)
    assert [list(map(sympy.Rational, r)) for r in R.rows[:rank]] == S.tolist()[:rank]
    assert rref(R)[0] == R


@settings(max_examples=40, deadline=None)
@given(int_matrices(), st.randoms(use_true_random=False))
def test_rref_canonical_under_row_operations(rows, rnd):
    M = RatMatrix(rows)
    P = random_rational_matrix(rnd, M.nrows, M.nrows)
    if P.det() == 0:
        return
    assert rref(P @ M)[0] == rref(M)[0]


@settings(max_examples=60, deadline=None)
@given(int_matrices())
def test_kernel_is_annihilated_and_complete(rows):
    M = RatMatrix(rows)
    ks = kernel(M)
    assert len(ks) == M.ncols - rref(M)[2]
    for k in ks:
        assert (M @ k).is_zero()


@settings(max_examples=60, deadline=None)
@given(int_matrices(4, 4))
def test_snf_roundtrip_and_divisors(rows):
    A = RatMatrix(rows)
    r = smith_normal_form(A)
    assert r.U @ r.D @ r.V == A
    assert abs(r.U.det()) == 1 and abs(r.V.det()) == 1
    d = r.elementary_divisors
    assert all(x > 0 for x in d)
    assert all(b % a == 0 for a, b in zip(d, d[1:]))
    S = sympy_snf(sympy.Matrix(rows), domain=sympy.ZZ)
    oracle = [abs(int(S[i, i])) for i in range(min(S.shape)) if S[i, i] != 0]
    assert d == oracle


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)),
       st.randoms(use_true_random=False))
def test_signature_oracle_and_congruence(rows, rnd):
    n = len(rows)
    G = RatMatrix([[rows[min(i, j)][max(i, j)] for j in range(n)] for i in range(n)])
    sig = signature(G).as_tuple()
    assert sig == descartes_signature(G)
    P = random_rational_matrix(rnd, n, n)
    if P.det() != 0:
        assert signature(P.T @ G @ P).as_tuple() == sig


@settings(max_examples=40, deadline=None)
@given(int_matrices(4, 4))
def test_det_and_inverse_match_sympy(rows):
    n = min(len(rows), len(rows[0]))
    M = RatMatrix([r[:n] for r in rows[:n]])
    assert M.det() == Fraction(int(to_sympy(M).det()))
    if M.det() != 0:
        assert M @ M.inverse() == RatMatrix.identity(n)
    else:
        with pytest.raises(ZeroDivisionError):
            M.inverse()


def test_echelon_is_order_independent():
    rng = random.Random(3)
    vecs = [[rng.randint(-2, 2) for _ in range(5)] for _ in range(6)]
    a, b = Echelon(5), Echelon(5)
    for v in vecs:
        a.add(sparse(v))
    for v in reversed(vecs):
        b.add(sparse(v))
    assert a.basis() == b.basis()


def test_saturation_and_hnf():
    assert saturate_integral([(2, 0), (0, 2)]) == [(1, 0), (0, 1)]
    assert saturate_integral([(2, 4, 6)]) == [(1, 2, 3)]
    assert hermite_normal_form([(2, 0), (1, 1)]) == [(1, 1), (0, 2)]


def test_json_roundtrip_of_fractions():
    M = RatMatrix([[Fraction(1, 2), 3], [0, Fraction(-7, 3)]])
    assert RatMatrix(M.to_json()) == M
