"""Grading and Lefschetz operators, sl2 completion, and Lie-bracket closure.

A :class:`LieBasis` is a canonical basis (RREF of row-major vectorizations) of
a space of ``D x D`` rational matrices.  ``lie_closure`` grows such a space to
the smallest bracket-closed one; ``neron_severi_lie`` feeds it the sl2-triples
``(e_κ, h, f_κ)`` of a finite sample of Lefschetz classes.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Sequence

from .exactlin import Echelon, RatMatrix, kernel, solve, sparse, span_saturate
from .gradedring import AlgebraError, CohClass, GradedAlgebra

log = logging.getLogger(__name__)

__all__ = [
    "Sl2Triple",
    "LieBasis",
    "Sl2Error",
    "NotLefschetzError",
    "NonUniqueCompletionError",
    "bracket",
    "grading_operator",
    "lefschetz_e",
    "sl2_complete",
    "lie_closure",
    "neron_severi_lie",
    "graded_decompose",
    "preserves_form",
    "orthogonal_lie_algebra",
]


class Sl2Error(ValueError):
    pass


class NotLefschetzError(Sl2Error):
    """``[e, f] = h`` has no solution: ``e`` is not a Lefschetz operator."""


class NonUniqueCompletionError(Sl2Error):
    """The completion ``f`` exists but is not unique."""


def bracket(X: RatMatrix, Y: RatMatrix) -> RatMatrix:
    return X @ Y - Y @ X


@dataclass(frozen=True)
class Sl2Triple:
    e: RatMatrix
    h: RatMatrix
    f: RatMatrix

    def check(self) -> bool:
        return (
            bracket(self.e, self.f) == self.h
            and bracket(self.h, self.e) == 2 * self.e
            and bracket(self.h, self.f) == -2 * self.f
        )


@dataclass(frozen=True)
class LieBasis:
    """Canonical basis of a subspace of ``gl_D(Q)``.

    ``closed`` certifies that brackets of basis pairs lie in the span.  ``notes``
    carries diagnostics (skipped samples, escalation rounds) and is ignored by
    equality.
    """

    ambient: int
    basis: tuple[RatMatrix, ...]
    closed: bool = True
    notes: dict = field(default_factory=dict, compare=False, hash=False)

    @classmethod
    def from_echelon(cls, D: int, e: Echelon, closed: bool = True, notes=None) -> "LieBasis":
        mats = tuple(RatMatrix.from_flat(D, D, v) for v in e.basis())
        return cls(D, mats, closed, dict(notes or {}))

    @classmethod
    def from_matrices(cls, D: int, mats: Iterable[RatMatrix], closed: bool = False) -> "LieBasis":
        vecs = [m.flatten() for m in mats]
        basis = span_saturate(vecs) if vecs else []
        return cls(D, tuple(RatMatrix.from_flat(D, D, v) for v in basis), closed)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __len__(self) -> int:
        return len(self.basis)

    def echelon(self) -> Echelon:
        e = Echelon(self.ambient * self.ambient)
        for b in self.basis:
            e.add(sparse(b.flatten()))
        return e

    def contains(self, X: RatMatrix) -> bool:
        return self.echelon().contains(sparse(X.flatten()))

    def is_subspace_of(self, other: "LieBasis") -> bool:
        e = other.echelon()
        return all(e.contains(sparse(b.flatten())) for b in self.basis)

    def verify_closed(self) -> bool:
        """Brute-force re-check of the closure certificate."""
        e = self.echelon()
        return all(
            e.contains(sparse(bracket(X, Y).flatten())) for X, Y in combinations(self.basis, 2)
        )

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "ambient": self.ambient,
            "basis": [[_js(x) for x in b.flatten()] for b in self.basis],
            "closed": self.closed,
        }

    @classmethod
    def from_json(cls, data: dict) -> "LieBasis":
        D = int(data["ambient"])
        mats = tuple(RatMatrix.from_flat(D, D, v) for v in data["basis"])
        if len(mats) != int(data["dim"]):
            raise ValueError("dimension field does not match basis")
        return cls(D, mats, bool(data["closed"]))


def _js(x: Fraction):
    return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# operators on a graded algebra


def grading_operator(alg: GradedAlgebra, n: int | None = None) -> RatMatrix:
    """Diagonal operator acting as ``i - n`` on the degree-``i`` part."""
    n = alg.n if n is None else n
    return RatMatrix.diag([2 * alg.degree_of(i) - n for i in range(alg.dim)])


def lefschetz_e(alg: GradedAlgebra, kappa: CohClass) -> RatMatrix:
    """Matrix of cup product with the degree-2 class ``kappa``."""
    if kappa.algebra is not alg:
        raise AlgebraError("class does not belong to this algebra")
    if not kappa.is_homogeneous(1):
        raise AlgebraError("Lefschetz class must be homogeneous of degree 2")
    return alg.structure_matrix(kappa)


def _sl2_system(e: RatMatrix, h: RatMatrix) -> RatMatrix:
    # columns: images of the matrix units under f -> ([h,f] + 2f, [e,f])
    D = e.nrows
    cols = []
    for k in range(D):
        for l in range(D):
            E = RatMatrix.from_flat(D, D, [int(i == k * D + l) for i in range(D * D)])
            top = bracket(h, E) + 2 * E
            bot = bracket(e, E)
            cols.append(top.flatten() + bot.flatten())
    return RatMatrix.from_columns(cols)


def sl2_complete(e: RatMatrix, h: RatMatrix) -> Sl2Triple:
    """Solve ``[h, f] = -2f``, ``[e, f] = h`` for the unique ``f``."""
    if e.shape != h.shape or not e.is_square():
        raise ValueError("e and h must be square of the same size")
    if bracket(h, e) != 2 * e:
        raise ValueError("[h, e] != 2e")
    D = e.nrows
    A = _sl2_system(e, h)
    rhs = (Fraction(0),) * (D * D) + h.flatten()
    x = solve(A, rhs)
    if x is None:
        raise NotLefschetzError("no solution: e is not a Lefschetz operator")
    if kernel(A):
        raise NonUniqueCompletionError("non-unique solution for f")
    f = RatMatrix.from_flat(D, D, x.col(0))
    return Sl2Triple(e, h, f)


# ---------------------------------------------------------------------------
# closure


def lie_closure(
    generators: Sequence[RatMatrix],
    max_dim: int | None = None,
    start: LieBasis | None = None,
) -> LieBasis:
    """Smallest bracket-closed subspace containing ``generators`` (and ``start``).

    New elements are bracketed against everything accepted before them, so each
    unordered pair is visited once.  If ``start`` is a closed basis its internal
    brackets are not recomputed.  Exceeding ``max_dim`` (default ``D²``)
    returns the partial span flagged ``closed=False``.
    """
    gens = list(generators)
    if start is not None:
        D = start.ambient
    elif gens:
        D = gens[0].nrows
    else:
        raise ValueError("no generators and no starting basis")
    if any(g.shape != (D, D) for g in gens):
        raise ValueError("generators must all be square of the same size")
    cap = D * D if max_dim is None else max_dim

    e = Echelon(D * D)
    elems: list[RatMatrix] = []
    first_new = 0
    if start is not None:
        for b in start.basis:
            if e.add(sparse(b.flatten())):
                elems.append(b)
        if start.closed:
            first_new = len(elems)
    for g in gens:
        if e.add(sparse(g.flatten())):
            elems.append(g)
    if len(elems) > cap:
        return LieBasis.from_echelon(D, e, closed=False, notes={"cap_exceeded": True})

    i = max(first_new, 1)
    while i < len(elems):
        X = elems[i]
        for j in range(i):
            B = bracket(X, elems[j])
            if e.add(sparse(B.flatten())):
                elems.append(B)
                if len(elems) > cap:
                    return LieBasis.from_echelon(D, e, closed=False, notes={"cap_exceeded": True})
        i += 1
    return LieBasis.from_echelon(D, e, closed=True)


def neron_severi_lie(
    alg: GradedAlgebra,
    kappas: Sequence[CohClass],
    n: int | None = None,
    rng: random.Random | None = None,
    max_rounds: int = 8,
    closure: Callable[..., LieBasis] = lie_closure,
) -> LieBasis:
    """Lie algebra generated by the sl2-triples of sampled Lefschetz classes.

    The sample is: the supplied classes, their pairwise sums, then rounds of
    random small-positive-integer combinations until the closure dimension is
    unchanged for two consecutive rounds.  Classes whose ``e`` has no sl2
    completion are skipped and listed in ``notes["skipped"]``.
    """
    if not kappas:
        raise ValueError("need at least one class")
    rng = rng or random.Random(0)
    h = grading_operator(alg, n)
    skipped: list[list] = []
    triples: list[Sl2Triple] = []
    last_error: Sl2Error | None = None

    def try_add(k: CohClass) -> bool:
        nonlocal last_error
        try:
            t = sl2_complete(lefschetz_e(alg, k), h)
        except Sl2Error as exc:
            last_error = exc
            skipped.append([_js(x) for x in k.coeffs])
            log.info("skipping non-Lefschetz class %s: %s", k, exc)
            return False
        triples.append(t)
        return True

    sample = list(kappas) + [a + b for a, b in combinations(kappas, 2)]
    for k in sample:
        try_add(k)
    if not triples:
        raise NotLefschetzError(f"no sampled class is Lefschetz ({last_error})")

    def gens(ts):
        return [m for t in ts for m in (t.e, t.h, t.f)]

    g = closure(gens(triples))
    history = [g.dim]
    stable = 0
    rounds = 0
    while stable < 2 and rounds < max_rounds:
        rounds += 1
        before = len(triples)
        for _ in range(max(2, len(kappas))):
            combo = alg.zero()
            for k in kappas:
                combo = combo + k * rng.randint(1, 3)
            try_add(combo)
        g = closure(gens(triples[before:]), start=g)
        stable = stable + 1 if g.dim == history[-1] else 0
        history.append(g.dim)
    notes = {
        "skipped": skipped,
        "dimension_history": history,
        "escalated": history[-1] != history[0],
        "rounds": rounds,
        "triples_used": len(triples),
    }
    return LieBasis(g.ambient, g.basis, g.closed, notes)


# ---------------------------------------------------------------------------
# structure of a LieBasis


def _coordinates(g: LieBasis, e: Echelon, pivots: list[int], X: RatMatrix):
    v = X.flatten()
    if not e.contains(sparse(v)):
        return None
    # RREF basis has the identity at the pivot columns
    return [v[p] for p in pivots]


def graded_decompose(g: LieBasis, h: RatMatrix) -> dict[int, list[RatMatrix]]:
    """Split ``g`` into eigenspaces of ``ad_h`` (integer eigenvalues only)."""
    if g.dim == 0:
        return {}
    e = g.echelon()
    pivots = e.pivots
    cols = []
    for X in g.basis:
        c = _coordinates(g, e, pivots, bracket(h, X))
        if c is None:
            raise ValueError("ad_h does not preserve g")
        cols.append(c)
    A = RatMatrix.from_columns(cols)
    D = h.nrows
    if all(not h[i, j] for i in range(D) for j in range(D) if i != j):
        diag = [h[i, i] for i in range(D)]
        candidates = sorted({a - b for a in diag for b in diag if (a - b).denominator == 1})
    else:
        bound = max(sum(abs(x) for x in A.row(i)) for i in range(A.nrows))
        candidates = range(-int(bound) - 1, int(bound) + 2)
    out: dict[int, list[RatMatrix]] = {}
    total = 0
    I = RatMatrix.identity(g.dim)
    for lam in candidates:
        ker = kernel(A - I * lam)
        if not ker:
            continue
        mats = []
        for k in ker:
            X = RatMatrix.zeros(D, D)
            for c, B in zip(k.col(0), g.basis):
                if c:
                    X = X + B * c
            mats.append(X)
        eig = LieBasis.from_matrices(D, mats)
        out[int(lam)] = list(eig.basis)
        total += len(mats)
    if total != g.dim:
        raise ValueError("ad_h is not diagonalizable over the integers on g")
    return out


def preserves_form(g: LieBasis, G: RatMatrix) -> bool:
    """True iff ``XᵀG + GX = 0`` for every basis element."""
    if G.shape != (g.ambient, g.ambient):
        raise ValueError("form has the wrong size")
    return all((X.T @ G + G @ X).is_zero() for X in g.basis)


def orthogonal_lie_algebra(G: RatMatrix, annihilate: Sequence[Sequence] = ()) -> LieBasis:
    """``{X : XᵀG + GX = 0, X v = 0 for v in annihilate}`` for nondegenerate ``G``.

    Uses ``X = G⁻¹ Y`` with ``Y`` skew, so only the ``r(r-1)/2`` entries of ``Y``
    are unknowns; ``X v = 0`` is equivalent to ``Y v = 0``.
    """
    r = G.nrows
    if not G.is_symmetric() and not G.is_skew():
        raise ValueError("form must be symmetric or skew")
    Ginv = G.inverse()
    skew = G.is_skew() and not G.is_symmetric()
    # unknown index for each entry position of Y
    if skew:
        # XᵀG + GX = 0 with G skew: Y = GX symmetric
        pairs = [(i, j) for i in range(r) for j in range(i, r)]
    else:
        pairs = [(i, j) for i in range(r) for j in range(i + 1, r)]
    idx = {p: t for t, p in enumerate(pairs)}

    def y_entry(i, j):
        # (sign, unknown index) of Y[i][j]
        if i == j:
            return (1, idx[(i, i)]) if skew else None
        if i < j:
            return (1, idx[(i, j)])
        return (1, idx[(j, i)]) if skew else (-1, idx[(j, i)])

    eqs = []
    for v in annihilate:
        v = [Fraction(x) for x in v]
        for i in range(r):
            row = [Fraction(0)] * len(pairs)
            for j in range(r):
                if v[j]:
                    ent = y_entry(i, j)
                    if ent:
                        row[ent[1]] += ent[0] * v[j]
            eqs.append(row)
    if eqs:
        sols = [k.col(0) for k in kernel(RatMatrix(eqs))]
    else:
        sols = [tuple(Fraction(int(s == t)) for s in range(len(pairs))) for t in range(len(pairs))]
    e = Echelon(r * r)
    for s in sols:
        Y = [[Fraction(0)] * r for _ in range(r)]
        for i in range(r):
            for j in range(r):
                ent = y_entry(i, j)
                if ent:
                    Y[i][j] = ent[0] * s[ent[1]]
        X = Ginv @ RatMatrix(Y)
        e.add(sparse(X.flatten()))
    return LieBasis.from_echelon(r, e, closed=True)
