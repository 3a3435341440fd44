import random

import pytest

from helpers import random_nondegenerate_q
from lefschetz_lab.exactlin import RatMatrix
from lefschetz_lab.gradedring import AlgebraError, hypersurface_even_ring, mukai_extension_algebra, mukai_gram
from lefschetz_lab.lefschetz import (
    LieBasis,
    NotLefschetzError,
    graded_decompose,
    grading_operator,
    lefschetz_e,
    lie_closure,
    neron_severi_lie,
    orthogonal_lie_algebra,
    preserves_form,
    sl2_complete,
)

E2 = RatMatrix([[0, 1], [0, 0]])
F2 = RatMatrix([[0, 0], [1, 0]])
H2 = RatMatrix.diag([1, -1])


def test_grading_operator_examples():
    Q = hypersurface_even_ring(3, 5)
    assert grading_operator(Q) == RatMatrix.diag([-3, -1, 1, 3])
    V = mukai_extension_algebra(3, RatMatrix.identity(3))
    assert grading_operator(V) == RatMatrix.diag([-2, 0, 0, 0, 2])
    assert grading_operator(Q).trace() == 0


def test_lefschetz_e_examples():
    Q = hypersurface_even_ring(3, 5)
    assert lefschetz_e(Q, Q.zero()).is_zero()
    e = lefschetz_e(Q, Q.basis_element(1))
    assert e == RatMatrix([[0, 0, 0, 0], [1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]])
    H = Q.basis_element(1)
    assert lefschetz_e(Q, H * 3) == e * 3
    with pytest.raises(AlgebraError):
        lefschetz_e(Q, Q.unit() + H)


def test_sl2_complete_examples():
    t = sl2_complete(E2, H2)
    assert t.f == F2 and t.check()
    Q = hypersurface_even_ring(3, 5)
    t = sl2_complete(lefschetz_e(Q, Q.basis_element(1)), grading_operator(Q))
    assert t.check()
    with pytest.raises(NotLefschetzError):
        sl2_complete(RatMatrix.zeros(2, 2), H2)


def test_sl2_rejects_bad_grading():
    with pytest.raises(ValueError):
        sl2_complete(E2, RatMatrix.identity(2))


def test_lie_closure_examples():
    assert lie_closure([H2]).dim == 1
    g = lie_closure([E2, F2])
    assert g.dim == 3 and g.contains(H2) and g.closed


def test_lie_closure_idempotent_and_verifiable():
    rng = random.Random(5)
    gens = [RatMatrix([[rng.randint(-1, 1) for _ in range(3)] for _ in range(3)]) for _ in range(2)]
    g = lie_closure(gens)
    assert all(g.contains(x) for x in gens)
    assert g.verify_closed()
    assert lie_closure(list(g.basis)) == g


def test_lie_closure_cap_flags_partial():
    g = lie_closure([E2, F2], max_dim=2)
    assert not g.closed


def test_lie_closure_with_start_matches_fresh():
    a = lie_closure([E2])
    assert lie_closure([F2], start=a) == lie_closure([E2, F2])


@pytest.mark.parametrize("m", [2, 3, 4])
def test_vtilde_lie_algebra(m):
    q = random_nondegenerate_q(random.Random(m), m)
    V = mukai_extension_algebra(m, q)
    g = neron_severi_lie(V, V.degree_basis(1))
    assert g.dim == (m + 2) * (m + 1) // 2
    dec = graded_decompose(g, grading_operator(V))
    assert set(dec) == {-2, 0, 2}
    assert len(dec[0]) == m * (m - 1) // 2 + 1
    assert preserves_form(g, mukai_gram(V))
    # and it is all of the orthogonal algebra of that form
    assert g == orthogonal_lie_algebra(mukai_gram(V))


def test_vtilde_does_not_preserve_unsigned_extension_form():
    # q on V with (e, η) = 1 and no sign change: the cup-product operators are not in its so
    m = 2
    q = RatMatrix.identity(m)
    V = mukai_extension_algebra(m, q)
    g = neron_severi_lie(V, V.degree_basis(1))
    naive = RatMatrix.block([[RatMatrix([[0]]), RatMatrix.zeros(1, m), RatMatrix([[1]])],
                             [RatMatrix.zeros(m, 1), q, RatMatrix.zeros(m, 1)],
                             [RatMatrix([[1]]), RatMatrix.zeros(1, m), RatMatrix([[0]])]])
    assert not preserves_form(g, naive)


def test_neron_severi_single_class_and_quintic():
    Q = hypersurface_even_ring(3, 5)
    g = neron_severi_lie(Q, [Q.basis_element(1)])
    assert g.dim == 3
    dec = graded_decompose(g, grading_operator(Q))
    assert {k: len(v) for k, v in dec.items()} == {-2: 1, 0: 1, 2: 1}


def test_neron_severi_skips_isotropic_class():
    # q = [[0,1],[1,0]]: both basis vectors are isotropic, their sum is not
    V = mukai_extension_algebra(2, [[0, 1], [1, 0]])
    g = neron_severi_lie(V, V.degree_basis(1))
    assert len(g.notes["skipped"]) == 2
    assert g.dim == 6


def test_neron_severi_all_isotropic_raises():
    V = mukai_extension_algebra(2, [[0, 1], [1, 0]])
    with pytest.raises(NotLefschetzError):
        neron_severi_lie(V, [V.degree_basis(1)[0]])


def test_neron_severi_monotone():
    V = mukai_extension_algebra(3, RatMatrix.diag([1, 2, -1]))
    k = V.degree_basis(1)
    small = neron_severi_lie(V, k[:1])
    big = neron_severi_lie(V, k)
    assert small.is_subspace_of(big)


def test_graded_decompose_rejects_non_invariant():
    g = LieBasis.from_matrices(2, [E2 + F2], closed=True)
    with pytest.raises(ValueError):
        graded_decompose(g, H2)


def test_preserves_form_examples():
    G = RatMatrix([[0, 1], [1, 0]])
    assert not preserves_form(LieBasis.from_matrices(2, [RatMatrix.identity(2)]), G)
    assert preserves_form(LieBasis(2, ()), G)


def test_liebasis_json_roundtrip():
    g = lie_closure([E2, F2])
    assert LieBasis.from_json(g.to_json()) == g


def test_orthogonal_lie_algebra_for_skew_form():
    s = RatMatrix([[0, 1], [-1, 0]])
    g = orthogonal_lie_algebra(s)
    assert g.dim == 3
    assert g.verify_closed()
    assert preserves_form(g, s)
