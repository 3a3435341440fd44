"""Finite-dimensional, purely even, graded commutative Q-algebras.

These model ``H^even(X, Q)`` of a variety of complex dimension ``n`` (degrees
0, 2, ..., 2n) together with its integration functional and, optionally, its
Chern classes.  The algebra basis is ordered by degree; basis element 0 is the
unit.  Degrees are indexed by ``p`` where the real cohomological degree is
``2p``.

Mukai pairing convention: ``<a, b> = ∫ a^∨ · b`` with ``(a^∨)_{2p} =
(-1)^p a_{2p}``.  With this sign ``<v(M), η> = +1`` for every line bundle
``M`` and the fundamental class ``η`` normalized by ``∫ η = 1``.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from math import comb, factorial
from typing import Sequence

from .exactlin import RatMatrix, span_saturate, to_fraction

__all__ = [
    "GradedAlgebra",
    "CohClass",
    "AlgebraError",
    "mukai_extension_algebra",
    "hypersurface_even_ring",
    "todd_class",
    "sqrt_unit_series",
    "exp_nilpotent",
    "integrate",
    "mukai_pairing",
    "mukai_gram",
    "bernoulli_numbers",
]


class AlgebraError(ValueError):
    """Raised for malformed algebra data or unsupported operations."""


def _vec(coeffs, n: int) -> tuple[Fraction, ...]:
    v = tuple(to_fraction(x) for x in coeffs)
    if len(v) != n:
        raise AlgebraError(f"coefficient vector has length {len(v)}, expected {n}")
    return v


class GradedAlgebra:
    """Graded commutative algebra with structure constants and an integral.

    ``products`` maps basis index pairs ``(i, j)`` to the coefficient vector of
    ``b_i · b_j``; missing pairs multiply to zero, products with the unit are
    filled in, and the table is symmetrized.  Construction checks grading,
    commutativity and associativity on every basis triple.
    """

    def __init__(
        self,
        degree_dims: Sequence[int],
        products: dict,
        integral: Sequence,
        labels: Sequence[str] | None = None,
        chern: Sequence[Sequence] | None = None,
    ):
        self.degree_dims = tuple(int(d) for d in degree_dims)
        if not self.degree_dims or self.degree_dims[0] != 1:
            raise AlgebraError("degree 0 must be one-dimensional (spanned by the unit)")
        if any(d < 0 for d in self.degree_dims):
            raise AlgebraError("negative degree dimension")
        self.n = len(self.degree_dims) - 1
        self.dim = sum(self.degree_dims)
        self.offsets = []
        off = 0
        for d in self.degree_dims:
            self.offsets.append(off)
            off += d
        self._deg = [p for p, d in enumerate(self.degree_dims) for _ in range(d)]
        self.labels = tuple(labels) if labels is not None else tuple(f"b{i}" for i in range(self.dim))
        if len(self.labels) != self.dim:
            raise AlgebraError("wrong number of labels")

        N = self.dim
        zero = (Fraction(0),) * N
        table = [[zero] * N for _ in range(N)]
        for (i, j), coeffs in products.items():
            v = _vec(coeffs, N)
            for a, b in ((i, j), (j, i)):
                if table[a][b] != zero and table[a][b] != v:
                    raise AlgebraError(f"inconsistent products for ({i}, {j})")
                table[a][b] = v
        for j in range(N):
            unit_j = tuple(Fraction(int(t == j)) for t in range(N))
            for a, b in ((0, j), (j, 0)):
                if table[a][b] != zero and table[a][b] != unit_j:
                    raise AlgebraError("basis element 0 must act as the unit")
                table[a][b] = unit_j
        self._table = table
        self.integral = _vec(integral, N)
        self._check()
        if chern is not None:
            cls = [self.element(c) for c in chern]
            for p, c in enumerate(cls, start=1):
                if not c.is_homogeneous(p):
                    raise AlgebraError(f"c_{p} must be homogeneous of degree {2 * p}")
            self.chern = tuple(cls)
        else:
            self.chern = None

    # -- validation ---------------------------------------------------------
    def _check(self):
        N = self.dim
        for i in range(N):
            for j in range(N):
                v = self._table[i][j]
                target = self._deg[i] + self._deg[j]
                for t, x in enumerate(v):
                    if x and self._deg[t] != target:
                        raise AlgebraError(f"product b{i}·b{j} violates the grading")
        for i in range(N):
            for j in range(N):
                bij = self._table[i][j]
                for k in range(N):
                    left = self._mul_vec(bij, self._basis_vec(k))
                    right = self._mul_vec(self._basis_vec(i), self._table[j][k])
                    if left != right:
                        raise AlgebraError(f"associativity fails on ({i}, {j}, {k})")
        for t, x in enumerate(self.integral):
            if x and self._deg[t] != self.n:
                raise AlgebraError("integral must vanish below the top degree")

    def _basis_vec(self, i: int) -> tuple[Fraction, ...]:
        return tuple(Fraction(int(t == i)) for t in range(self.dim))

    def _mul_vec(self, a, b) -> tuple[Fraction, ...]:
        out = [Fraction(0)] * self.dim
        for i, x in enumerate(a):
            if not x:
                continue
            row = self._table[i]
            for j, y in enumerate(b):
                if not y:
                    continue
                xy = x * y
                for t, c in enumerate(row[j]):
                    if c:
                        out[t] += xy * c
        return tuple(out)

    # -- element constructors -----------------------------------------------
    def element(self, coeffs) -> "CohClass":
        return CohClass(self, _vec(coeffs, self.dim))

    def basis_element(self, i: int) -> "CohClass":
        return CohClass(self, self._basis_vec(i))

    def unit(self) -> "CohClass":
        return self.basis_element(0)

    def zero(self) -> "CohClass":
        return CohClass(self, (Fraction(0),) * self.dim)

    def degree_of(self, i: int) -> int:
        """Degree index ``p`` (real degree ``2p``) of basis element ``i``."""
        return self._deg[i]

    def degree_indices(self, p: int) -> range:
        return range(self.offsets[p], self.offsets[p] + self.degree_dims[p])

    def degree_basis(self, p: int) -> list["CohClass"]:
        return [self.basis_element(i) for i in self.degree_indices(p)]

    def eta(self) -> "CohClass":
        """The top class with integral 1."""
        if self.degree_dims[self.n] != 1:
            raise AlgebraError("top degree is not one-dimensional")
        top = self.offsets[self.n]
        if not self.integral[top]:
            raise AlgebraError("integral vanishes on the top class")
        return self.basis_element(top) * (1 / self.integral[top])

    def structure_matrix(self, a: "CohClass") -> RatMatrix:
        """Matrix of multiplication by ``a`` in the algebra basis."""
        cols = [self._mul_vec(a.coeffs, self._basis_vec(j)) for j in range(self.dim)]
        return RatMatrix.from_columns(cols)

    def is_generated_in_degree_two(self) -> bool:
        gens = [b.coeffs for b in self.degree_basis(1)] if self.n >= 1 else []
        span = [self._basis_vec(0)]
        frontier = [self._basis_vec(0)]
        for _ in range(self.n):
            frontier = [self._mul_vec(f, g) for f in frontier for g in gens]
            span.extend(frontier)
        return len(span_saturate(span)) == self.dim

    def has_vanishing_c1(self) -> bool:
        if self.chern is None or self.n == 0:
            return True
        return self.chern[0].is_zero()

    # -- serialization ------------------------------------------------------
    def to_json(self) -> dict:
        prods = []
        for i in range(self.dim):
            for j in range(i, self.dim):
                if i == 0:
                    continue
                v = self._table[i][j]
                if any(v):
                    prods.append([i, j, [_js(x) for x in v]])
        out = {
            "degree_dims": list(self.degree_dims),
            "labels": list(self.labels),
            "products": prods,
            "integral": [_js(x) for x in self.integral],
        }
        if self.chern is not None:
            out["chern"] = [[_js(x) for x in c.coeffs] for c in self.chern]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "GradedAlgebra":
        try:
            prods = {(int(i), int(j)): c for i, j, c in data.get("products", [])}
            return cls(
                data["degree_dims"],
                prods,
                data["integral"],
                labels=data.get("labels"),
                chern=data.get("chern"),
            )
        except (KeyError, TypeError) as exc:
            raise AlgebraError(f"malformed algebra data: {exc}") from exc

    def content_hash(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def __repr__(self) -> str:
        return f"GradedAlgebra(degree_dims={self.degree_dims})"


def _js(x: Fraction):
    return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class CohClass:
    """An element of a :class:`GradedAlgebra`, stored by coefficients."""

    __slots__ = ("algebra", "coeffs")

    def __init__(self, algebra: GradedAlgebra, coeffs: tuple[Fraction, ...]):
        self.algebra = algebra
        self.coeffs = coeffs

    def _same(self, other: "CohClass"):
        if other.algebra is not self.algebra:
            raise AlgebraError("classes live in different algebras")

    def __add__(self, other: "CohClass") -> "CohClass":
        self._same(other)
        return CohClass(self.algebra, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "CohClass") -> "CohClass":
        self._same(other)
        return CohClass(self.algebra, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "CohClass":
        return CohClass(self.algebra, tuple(-a for a in self.coeffs))

    def __mul__(self, other) -> "CohClass":
        if isinstance(other, CohClass):
            self._same(other)
            return CohClass(self.algebra, self.algebra._mul_vec(self.coeffs, other.coeffs))
        c = to_fraction(other)
        return CohClass(self.algebra, tuple(c * a for a in self.coeffs))

    def __rmul__(self, other) -> "CohClass":
        return self * other

    def __eq__(self, other) -> bool:
        if not isinstance(other, CohClass):
            return NotImplemented
        return self.algebra is other.algebra and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        terms = [f"{c}*{lab}" for c, lab in zip(self.coeffs, self.algebra.labels) if c]
        return " + ".join(terms) if terms else "0"

    def component(self, p: int) -> "CohClass":
        """Homogeneous part of real degree ``2p``."""
        alg = self.algebra
        keep = set(alg.degree_indices(p))
        return CohClass(alg, tuple(x if i in keep else Fraction(0) for i, x in enumerate(self.coeffs)))

    def components(self) -> list["CohClass"]:
        return [self.component(p) for p in range(self.algebra.n + 1)]

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_homogeneous(self, p: int) -> bool:
        return all(not x or self.algebra.degree_of(i) == p for i, x in enumerate(self.coeffs))

    @property
    def rank(self) -> Fraction:
        """Degree-0 coefficient."""
        return self.coeffs[0]

    def dual(self) -> "CohClass":
        """``a^∨``: negate the components of degree ``2p`` with ``p`` odd."""
        alg = self.algebra
        return CohClass(
            alg, tuple(-x if alg.degree_of(i) % 2 else x for i, x in enumerate(self.coeffs))
        )

    def top_coefficient(self) -> Fraction:
        """Coefficient of ``η`` in the top component."""
        return integrate(self.component(self.algebra.n))


# ---------------------------------------------------------------------------
# constructors


def mukai_extension_algebra(V_dim: int, q) -> GradedAlgebra:
    """``Q e ⊕ V ⊕ Q η`` with ``x·y = q(x, y) η`` and integral reading off ``η``."""
    q = q if isinstance(q, RatMatrix) else RatMatrix(q)
    if q.shape != (V_dim, V_dim):
        raise AlgebraError("q has the wrong size")
    if not q.is_symmetric():
        raise AlgebraError("q must be symmetric")
    N = V_dim + 2
    top = N - 1
    prods = {}
    for i in range(V_dim):
        for j in range(i, V_dim):
            if q[i, j]:
                v = [0] * N
                v[top] = q[i, j]
                prods[(1 + i, 1 + j)] = v
    labels = ["e"] + [f"v{i + 1}" for i in range(V_dim)] + ["eta"]
    return GradedAlgebra([1, V_dim, 1], prods, [0] * top + [1], labels=labels)


def hypersurface_even_ring(n: int, d: int) -> GradedAlgebra:
    """Even cohomology of a smooth degree-``d`` hypersurface in ``P^{n+1}``.

    The ring is ``Q[H]/(H^{n+1})`` with ``∫ H^n = d``; the total Chern class is
    the truncation of ``(1 + H)^{n+2} / (1 + dH)``.  It is Calabi-Yau exactly
    when ``d = n + 2``.
    """
    if n < 1 or d < 1:
        raise AlgebraError("need n >= 1 and d >= 1")
    N = n + 1
    prods = {}
    for i in range(1, N):
        for j in range(i, N):
            if i + j <= n:
                v = [0] * N
                v[i + j] = 1
                prods[(i, j)] = v
    # coefficient of H^k in (1+H)^{n+2} (1+dH)^{-1}
    chern = []
    for k in range(1, n + 1):
        ck = sum(comb(n + 2, j) * (-d) ** (k - j) for j in range(k + 1))
        v = [0] * N
        v[k] = ck
        chern.append(v)
    labels = ["1", "H"] + [f"H^{k}" for k in range(2, N)]
    integral = [0] * n + [d]
    return GradedAlgebra([1] * N, prods, integral, labels=labels, chern=chern)


# ---------------------------------------------------------------------------
# characteristic classes


def bernoulli_numbers(m: int) -> list[Fraction]:
    """``B_0 .. B_m`` with the convention ``B_1 = -1/2``."""
    B = [Fraction(1)]
    for k in range(1, m + 1):
        B.append(-sum(comb(k + 1, j) * B[j] for j in range(k)) / (k + 1))
    return B


def _series_log(f: Sequence[Fraction], order: int) -> list[Fraction]:
    # f_0 = 1;  k L_k = k f_k - sum_{j<k} j L_j f_{k-j}
    L = [Fraction(0)] * (order + 1)
    for k in range(1, order + 1):
        fk = f[k] if k < len(f) else Fraction(0)
        s = sum(j * L[j] * (f[k - j] if k - j < len(f) else 0) for j in range(1, k))
        L[k] = (k * fk - s) / k
    return L


def _todd_log_coefficients(order: int) -> list[Fraction]:
    """Coefficients ``a_j`` of ``log(x / (1 - e^{-x})) = Σ a_j x^j``."""
    B = bernoulli_numbers(order)
    # x/(1-e^{-x}) = Σ B_k^+ x^k / k!,  B_1^+ = +1/2
    g = [(-B[k] if k == 1 else B[k]) / factorial(k) for k in range(order + 1)]
    return _series_log(g, order)


def exp_nilpotent(x: CohClass) -> CohClass:
    """``exp(x)`` for ``x`` with vanishing degree-0 part (a finite sum)."""
    if x.rank:
        raise AlgebraError("exp_nilpotent needs a class with zero degree-0 part")
    alg = x.algebra
    total = alg.unit()
    term = alg.unit()
    for k in range(1, alg.n + 1):
        term = term * x * Fraction(1, k)
        if term.is_zero():
            break
        total = total + term
    return total


def _power_sums(chern: Sequence[CohClass], upto: int) -> list[CohClass]:
    # Newton: p_k = Σ_{i=1}^{k-1} (-1)^{i-1} c_i p_{k-i} + (-1)^{k-1} k c_k
    alg = chern[0].algebra
    c = lambda i: chern[i - 1] if i <= len(chern) else alg.zero()
    p = [None]
    for k in range(1, upto + 1):
        acc = c(k) * ((-1) ** (k - 1) * k)
        for i in range(1, k):
            acc = acc + (c(i) * p[k - i]) * ((-1) ** (i - 1))
        p.append(acc)
    return p


def todd_class(alg: GradedAlgebra) -> CohClass:
    """``td = exp(Σ_j a_j p_j)`` from the Chern classes, truncated at top degree."""
    if alg.chern is None:
        raise AlgebraError("algebra carries no Chern classes")
    if alg.n == 0:
        return alg.unit()
    a = _todd_log_coefficients(alg.n)
    p = _power_sums(alg.chern, alg.n)
    log_td = alg.zero()
    for j in range(1, alg.n + 1):
        log_td = log_td + p[j] * a[j]
    return exp_nilpotent(log_td)


def sqrt_unit_series(a: CohClass) -> CohClass:
    """The unique ``b`` with ``b² = a`` and ``b_0 = 1``."""
    if a.rank != 1:
        raise AlgebraError("degree-0 component must equal 1")
    alg = a.algebra
    u = a - alg.unit()
    total = alg.unit()
    power = alg.unit()
    coeff = Fraction(1)
    for k in range(1, alg.n + 1):
        coeff = coeff * (Fraction(1, 2) - (k - 1)) / k
        power = power * u
        if power.is_zero():
            break
        total = total + power * coeff
    return total


# ---------------------------------------------------------------------------
# pairings


def integrate(a: CohClass) -> Fraction:
    return sum((x * w for x, w in zip(a.coeffs, a.algebra.integral)), Fraction(0))


def _require_mukai(alg: GradedAlgebra):
    if not alg.has_vanishing_c1():
        raise AlgebraError("Mukai pairing is only supported when c_1 = 0")


def mukai_pairing(a: CohClass, b: CohClass) -> Fraction:
    """``<a, b> = ∫ a^∨ · b``."""
    a._same(b)
    _require_mukai(a.algebra)
    return integrate(a.dual() * b)


def mukai_gram(alg: GradedAlgebra) -> RatMatrix:
    """Gram matrix ``P`` with ``<x, y> = xᵀ P y`` in the algebra basis."""
    _require_mukai(alg)
    basis = [alg.basis_element(i) for i in range(alg.dim)]
    return RatMatrix([[integrate(x.dual() * y) for y in basis] for x in basis])
