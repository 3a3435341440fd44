import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lefschetz_lab.exactlin import RatMatrix
from lefschetz_lab.lattices import (
    BudgetExhausted,
    Embedding,
    IntLattice,
    MirrorDecompositionError,
    chamber_predicates,
    direct_sum,
    e8_lattice,
    find_hyperbolic_copy,
    hyperbolic_plane,
    is_primitive,
    k3_lattice,
    mirror_partner,
    mukai_extend,
    orthogonal_complement,
    pointwise_stabilizer_lie,
    saturation,
    standard_embedding,
)

U = hyperbolic_plane()
L = k3_lattice()


def test_hyperbolic_plane():
    assert U.gram == RatMatrix([[0, 1], [1, 0]])
    assert U.signature().as_tuple() == (1, 1, 0)
    assert U.det == -1 and U.is_even


def test_e8_is_even_unimodular_positive():
    E = e8_lattice()
    assert E.is_even and E.det == 1
    assert E.signature().as_tuple() == (8, 0, 0)


def test_k3_lattice():
    assert L.rank == 22 and L.is_even and abs(L.det) == 1
    assert L.signature().as_tuple() == (3, 19, 0)


def test_direct_sum():
    UU = direct_sum(U, U)
    assert UU.rank == 4 and UU.signature().as_tuple() == (2, 2, 0)
    assert direct_sum(L, IntLattice(RatMatrix.zeros(0, 0))) == L
    assert direct_sum(e8_lattice(-1), e8_lattice(-1), U, U, U) == L


def test_is_primitive():
    assert is_primitive(standard_embedding(L, range(22)))
    assert not is_primitive(Embedding(L, ((2,) + (0,) * 21,)))
    assert is_primitive(Embedding(L, ((1, 1) + (0,) * 20,)))


def test_embedding_validation():
    with pytest.raises(ValueError):
        Embedding(U, ((1, 0), (2, 0)))
    with pytest.raises(ValueError):
        Embedding(U, ((1, 0, 0),))


def test_orthogonal_complement_examples():
    UU = direct_sum(U, U)
    assert orthogonal_complement(standard_embedding(UU, [0, 1])).columns == ((0, 0, 1, 0), (0, 0, 0, 1))
    N = orthogonal_complement(Embedding(U, ((1, 1),)))
    assert N.columns == ((1, -1),) and N.lattice().gram == RatMatrix([[-2]])


def test_complement_rejects_degenerate_ambient():
    with pytest.raises(ValueError):
        orthogonal_complement(Embedding(IntLattice(RatMatrix([[0, 0], [0, 2]])), ((1, 0),)))


@settings(max_examples=25, deadline=None)
@given(st.lists(st.lists(st.integers(-3, 3), min_size=22, max_size=22), min_size=1, max_size=3))
def test_complement_properties_in_k3(cols):
    try:
        M = Embedding(L, tuple(tuple(c) for c in cols))
    except ValueError:
        return
    N = orthogonal_complement(M)
    assert is_primitive(N)
    assert (M.matrix.T @ L.gram @ N.matrix).is_zero()
    if M.lattice().is_nondegenerate:
        assert M.rank + N.rank == L.rank
    # double complement is the saturation of M, and both come out in Hermite form
    assert orthogonal_complement(N).columns == saturation(M).columns


def test_mirror_partner_single_u():
    M = standard_embedding(L, [16, 17])
    Uc = standard_embedding(L, [18, 19])
    D = mirror_partner(L, M, Uc)
    assert D.lattice().signature().as_tuple() == (1, 17, 0)
    assert is_primitive(D) and D.rank == 18
    back = mirror_partner(L, D, Uc)
    assert back.lattice().gram == M.lattice().gram


def test_mirror_partner_signature_rule_with_e8():
    # M = U ⊕ (-E8) has signature (1, 9); partner must be (1, 9) as well
    M = standard_embedding(L, list(range(8)) + [16, 17])
    Uc = standard_embedding(L, [18, 19])
    D = mirror_partner(L, M, Uc)
    s = M.lattice().signature().negative
    assert D.lattice().signature().as_tuple() == (1, 18 - s, 0)


def test_mirror_partner_errors():
    M = standard_embedding(L, [16, 17])
    with pytest.raises(MirrorDecompositionError):
        mirror_partner(L, M, standard_embedding(L, [16, 17]))  # not orthogonal
    with pytest.raises(MirrorDecompositionError):
        mirror_partner(L, M, standard_embedding(L, [0, 1]))  # not a hyperbolic plane
    with pytest.raises(MirrorDecompositionError):
        mirror_partner(L, standard_embedding(L, [0]), standard_embedding(L, [18, 19]))  # negative M


def test_mukai_extend():
    ext = mukai_extend(IntLattice(RatMatrix([[2]])))
    assert ext.rank == 3 and ext.signature().as_tuple() == (2, 1, 0)
    assert mukai_extend(IntLattice(RatMatrix.zeros(0, 0))) == U
    assert mukai_extend(e8_lattice()).is_even


def test_chamber_predicates():
    assert chamber_predicates(U, (1, 1)).ok
    assert not chamber_predicates(U, (1, 0)).ok
    assert not chamber_predicates(U, (2, 1), [(1, -1)]).ok
    with pytest.raises(ValueError):
        chamber_predicates(U, (1, 1), [(1, 1)])


def test_pointwise_stabilizer_examples():
    assert pointwise_stabilizer_lie(L, standard_embedding(L, range(22))).dim == 0
    UU = direct_sum(U, U)
    g = pointwise_stabilizer_lie(UU, standard_embedding(UU, [0, 1]))
    assert g.dim == 1 and g.verify_closed()


def test_pointwise_stabilizer_full_k3():
    assert pointwise_stabilizer_lie(L, Embedding(L, ())).dim == 231


def test_pointwise_stabilizer_kills_m_and_is_closed():
    base = direct_sum(U, IntLattice(RatMatrix([[2]])), IntLattice(RatMatrix([[-2]])))
    M = Embedding(base, ((1, 1, 0, 0),))
    g = pointwise_stabilizer_lie(base, M)
    assert g.dim == 3
    assert g.verify_closed()
    assert all((X @ M.matrix).is_zero() for X in g.basis)


def test_find_hyperbolic_copy():
    M = standard_embedding(L, [16, 17])
    Uc = find_hyperbolic_copy(L, M)
    assert Uc.lattice().gram == U.gram
    D = mirror_partner(L, M, Uc)
    assert D.lattice().signature().as_tuple() == (1, 17, 0)


def test_find_hyperbolic_copy_budget():
    # definite complement: no isotropic vectors at all
    G = direct_sum(IntLattice(RatMatrix([[2]])), IntLattice(RatMatrix([[2]])), IntLattice(RatMatrix([[2]])))
    with pytest.raises(BudgetExhausted):
        find_hyperbolic_copy(G, Embedding(G, ((1, 0, 0),)), box=2, budget=1000)


def test_lattice_json_roundtrip():
    assert IntLattice.from_json(L.to_json()) == L
    e = standard_embedding(L, [16, 17])
    assert Embedding.from_json(e.to_json()) == e
    with pytest.raises(ValueError):
        IntLattice.from_json({"rank": 3, "gram": [[0, 1], [1, 0]]})
