"""Integral lattices, primitive embeddings, and K3 mirror-dual sublattices."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Sequence

from .exactlin import (
    RatMatrix,
    Signature,
    kernel,
    saturate_integral,
    signature,
    smith_normal_form,
)
from .lefschetz import LieBasis, orthogonal_lie_algebra

__all__ = [
    "IntLattice",
    "Embedding",
    "MirrorDecompositionError",
    "BudgetExhausted",
    "hyperbolic_plane",
    "e8_lattice",
    "k3_lattice",
    "direct_sum",
    "is_primitive",
    "orthogonal_complement",
    "mirror_partner",
    "mukai_extend",
    "chamber_predicates",
    "pointwise_stabilizer_lie",
    "find_hyperbolic_copy",
    "standard_embedding",
    "saturation",
]


class MirrorDecompositionError(ValueError):
    pass


class BudgetExhausted(RuntimeError):
    """A bounded search ran out of budget.  Says nothing about existence."""


@dataclass(frozen=True)
class IntLattice:
    gram: RatMatrix

    def __post_init__(self):
        g = self.gram if isinstance(self.gram, RatMatrix) else RatMatrix(self.gram, ncols=len(self.gram) or 0)
        if not g.is_square() or not g.is_symmetric() or not g.is_integral():
            raise ValueError("gram must be a square symmetric integer matrix")
        object.__setattr__(self, "gram", g)

    @property
    def rank(self) -> int:
        return self.gram.nrows

    def pair(self, x: Sequence, y: Sequence) -> Fraction:
        g = self.gram
        return sum(
            (Fraction(x[i]) * g[i, j] * Fraction(y[j]) for i in range(self.rank) for j in range(self.rank) if x[i] and y[j]),
            Fraction(0),
        )

    @property
    def is_even(self) -> bool:
        return all(self.gram[i, i] % 2 == 0 for i in range(self.rank))

    @property
    def det(self) -> Fraction:
        return self.gram.det() if self.rank else Fraction(1)

    @property
    def is_nondegenerate(self) -> bool:
        return self.det != 0

    @property
    def is_unimodular(self) -> bool:
        return abs(self.det) == 1

    def signature(self) -> Signature:
        return signature(self.gram)

    def to_json(self) -> dict:
        return {"rank": self.rank, "gram": self.gram.to_int_rows()}

    @classmethod
    def from_json(cls, data: dict) -> "IntLattice":
        r = int(data["rank"])
        gram = data["gram"]
        if len(gram) != r or any(len(row) != r for row in gram):
            raise ValueError("gram does not match rank")
        return cls(RatMatrix(gram, ncols=r))


@dataclass(frozen=True)
class Embedding:
    """Sublattice given by integer columns expressed in ambient coordinates."""

    ambient: IntLattice
    columns: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        cols = tuple(tuple(int(Fraction(x)) if Fraction(x).denominator == 1 else _bad() for x in c) for c in self.columns)
        if any(len(c) != self.ambient.rank for c in cols):
            raise ValueError("column length differs from ambient rank")
        if cols and len(kernel(self.matrix_of(cols))) != 0:
            raise ValueError("embedding columns are linearly dependent")
        object.__setattr__(self, "columns", cols)

    def matrix_of(self, cols) -> RatMatrix:
        return RatMatrix.from_columns(cols, nrows=self.ambient.rank)

    @property
    def matrix(self) -> RatMatrix:
        return self.matrix_of(self.columns)

    @property
    def rank(self) -> int:
        return len(self.columns)

    def lattice(self) -> IntLattice:
        if not self.columns:
            return IntLattice(RatMatrix.zeros(0, 0))
        E = self.matrix
        return IntLattice(E.T @ self.ambient.gram @ E)

    def to_json(self) -> dict:
        return {"ambient": self.ambient.to_json(), "columns": [list(c) for c in self.columns]}

    @classmethod
    def from_json(cls, data: dict) -> "Embedding":
        return cls(IntLattice.from_json(data["ambient"]), tuple(tuple(c) for c in data["columns"]))


def _bad():
    raise ValueError("embedding columns must be integral")


# ---------------------------------------------------------------------------
# standard lattices


def hyperbolic_plane() -> IntLattice:
    return IntLattice(RatMatrix([[0, 1], [1, 0]]))


def e8_lattice(sign: int = 1) -> IntLattice:
    """Cartan matrix of E8 (positive definite), times ``sign``."""
    # chain 1-2-3-4-5-6-7 with node 8 attached to node 5
    edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 7)]
    g = [[2 if i == j else 0 for j in range(8)] for i in range(8)]
    for a, b in edges:
        g[a][b] = g[b][a] = -1
    return IntLattice(RatMatrix(g) * sign)


def direct_sum(*lattices: IntLattice) -> IntLattice:
    ranks = [L.rank for L in lattices]
    N = sum(ranks)
    g = [[0] * N for _ in range(N)]
    off = 0
    for L in lattices:
        for i in range(L.rank):
            for j in range(L.rank):
                g[off + i][off + j] = L.gram[i, j]
        off += L.rank
    return IntLattice(RatMatrix(g, ncols=N))


def k3_lattice() -> IntLattice:
    """``(-E8)² ⊕ U³``: coordinates 0-15 are the two E8 blocks, then three planes."""
    U = hyperbolic_plane()
    return direct_sum(e8_lattice(-1), e8_lattice(-1), U, U, U)


def standard_embedding(L: IntLattice, coords: Sequence[int]) -> Embedding:
    cols = tuple(tuple(int(i == c) for i in range(L.rank)) for c in coords)
    return Embedding(L, cols)


# ---------------------------------------------------------------------------
# embeddings


def is_primitive(e: Embedding) -> bool:
    if not e.columns:
        return True
    return all(d == 1 for d in smith_normal_form(e.matrix).elementary_divisors)


def saturation(e: Embedding) -> Embedding:
    return Embedding(e.ambient, tuple(saturate_integral(e.columns)))


def orthogonal_complement(e: Embedding) -> Embedding:
    """Primitive sublattice of vectors orthogonal to the image."""
    L = e.ambient
    if not L.is_nondegenerate:
        raise ValueError("ambient lattice is degenerate")
    if not e.columns:
        return standard_embedding(L, range(L.rank))
    A = e.matrix.T @ L.gram
    ker = [k.col(0) for k in kernel(A)]
    return Embedding(L, tuple(saturate_integral(ker)))


def _mutually_orthogonal(L: IntLattice, a: Embedding, b: Embedding) -> bool:
    if not a.columns or not b.columns:
        return True
    return (a.matrix.T @ L.gram @ b.matrix).is_zero()


def mirror_partner(L: IntLattice, M: Embedding, Ucopy: Embedding) -> Embedding:
    """``(M ⊕ Ucopy)^⊥`` after checking the decomposition hypotheses."""
    if M.ambient != L or Ucopy.ambient != L:
        raise MirrorDecompositionError("sublattices must live in L")
    if not is_primitive(M):
        raise MirrorDecompositionError("M is not primitive")
    sM = M.lattice().signature()
    if sM.positive != 1 or sM.zero != 0:
        raise MirrorDecompositionError(f"M must have signature (1, s), got {sM.as_tuple()}")
    Ul = Ucopy.lattice()
    if Ucopy.rank != 2 or not Ul.is_even or Ul.det != -1:
        raise MirrorDecompositionError("Ucopy is not isometric to the hyperbolic plane")
    if not is_primitive(Ucopy):
        raise MirrorDecompositionError("Ucopy is not primitive")
    if not _mutually_orthogonal(L, M, Ucopy):
        raise MirrorDecompositionError("Ucopy is not orthogonal to M")
    both = Embedding(L, M.columns + Ucopy.columns)
    dual = orthogonal_complement(both)
    if M.rank + 2 + dual.rank != L.rank:
        raise MirrorDecompositionError("decomposition does not have full rank")
    if not (_mutually_orthogonal(L, M, dual) and _mutually_orthogonal(L, Ucopy, dual)):
        raise MirrorDecompositionError("summands are not pairwise orthogonal")
    # index 1: M ⊕ U ⊕ M^∨ must be all of L
    full = RatMatrix.from_columns(M.columns + Ucopy.columns + dual.columns, nrows=L.rank)
    if abs(full.det()) != 1:
        raise MirrorDecompositionError("M ⊕ U ⊕ M^∨ has finite index > 1 in L")
    return dual


def mukai_extend(M: IntLattice) -> IntLattice:
    """``M ⊕ Ze ⊕ Zη`` with ``(e, η) = 1``; the new vectors are the last two."""
    return direct_sum(M, hyperbolic_plane())


@dataclass(frozen=True)
class ChamberReport:
    positive_square: bool
    positive_on_roots: bool

    @property
    def ok(self) -> bool:
        return self.positive_square and self.positive_on_roots

    def __bool__(self) -> bool:
        return self.ok


def chamber_predicates(M: IntLattice, h: Sequence, roots: Sequence[Sequence] = ()) -> ChamberReport:
    for d in roots:
        if M.pair(d, d) != -2:
            raise ValueError(f"{tuple(d)} is not a root: self-pairing {M.pair(d, d)}")
    return ChamberReport(M.pair(h, h) > 0, all(M.pair(h, d) > 0 for d in roots))


def pointwise_stabilizer_lie(L: IntLattice, M: Embedding) -> LieBasis:
    """Infinitesimal isometries of ``L ⊗ Q`` fixing ``M`` pointwise."""
    if not L.is_nondegenerate:
        raise ValueError("ambient lattice is degenerate")
    g = orthogonal_lie_algebra(L.gram, M.columns)
    if M.columns and M.lattice().is_nondegenerate:
        r = L.rank - M.rank
        if g.dim != r * (r - 1) // 2:
            raise AssertionError(f"stabilizer has dimension {g.dim}, expected {r * (r - 1) // 2}")
    return g


def find_hyperbolic_copy(L: IntLattice, M: Embedding, box: int = 2, budget: int = 200_000) -> Embedding:
    """Search ``M^⊥`` for a primitive copy of the hyperbolic plane.

    Scans vectors of ``M^⊥`` with coordinates in ``[-box, box]`` (in the HNF
    basis of ``M^⊥``) for an isotropic ``u`` and some ``v`` with ``(u, v) = 1``.
    Then ``v - ((v,v)/2) u`` is isotropic and ``span(u, v')`` is a copy of U.
    Raises :class:`BudgetExhausted` when ``budget`` vectors were tried.
    """
    if not L.is_even:
        raise ValueError("search requires an even lattice")
    N = orthogonal_complement(M)
    G = N.lattice()
    r = G.rank
    if r < 2:
        raise BudgetExhausted("complement has rank < 2")
    tried = 0
    E = N.matrix
    for c in _box_vectors(r, box):
        tried += 1
        if tried > budget:
            break
        if G.pair(c, c) != 0:
            continue
        for v in _box_vectors(r, box):
            tried += 1
            if tried > budget:
                break
            if G.pair(c, v) == 1:
                k = G.pair(v, v) / 2
                v2 = tuple(int(a - k * b) for a, b in zip(v, c))
                cols = tuple(tuple(int(x) for x in (E @ RatMatrix.column(w)).col(0)) for w in (c, v2))
                return Embedding(L, cols)
    raise BudgetExhausted(f"no hyperbolic plane found within {budget} candidates")


def _box_vectors(r: int, box: int):
    """Nonzero vectors with entries in ``[-box, box]``, ordered by max-norm, then support size."""
    for t in range(1, box + 1):
        vals = [x for x in range(-t, t + 1) if x]
        for size in range(1, r + 1):
            for pos in combinations(range(r), size):
                for entries in product(vals, repeat=size):
                    if max(map(abs, entries)) != t:
                        continue
                    c = [0] * r
                    for p, x in zip(pos, entries):
                        c[p] = x
                    yield tuple(c)
