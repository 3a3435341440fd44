"""Mukai vectors of line bundles, reflections, and the symplectic density certificate."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exactlin import Echelon, RatMatrix, solve, sparse
from .gradedring import (
    AlgebraError,
    CohClass,
    GradedAlgebra,
    exp_nilpotent,
    mukai_gram,
    sqrt_unit_series,
    todd_class,
)
from .lefschetz import LieBasis, lie_closure, preserves_form

__all__ = [
    "ReflectionDatum",
    "DensityReport",
    "line_bundle_ch",
    "mukai_vector",
    "line_bundle_vector",
    "reflection",
    "spans_check",
    "density_certificate",
    "default_deltas",
    "minimal_saturating_range",
    "growth_probe",
    "fit_polynomial",
]


def line_bundle_ch(alg: GradedAlgebra, c1: CohClass) -> CohClass:
    if not c1.is_homogeneous(1):
        raise AlgebraError("first Chern class must be homogeneous of degree 2")
    return exp_nilpotent(c1)


def mukai_vector(alg: GradedAlgebra, ch: CohClass) -> CohClass:
    return ch * sqrt_unit_series(todd_class(alg))


def line_bundle_vector(alg: GradedAlgebra, k: int, H: CohClass | None = None) -> CohClass:
    """``v(O(kH))``; ``H`` defaults to the sole degree-2 basis class."""
    H = _generator(alg) if H is None else H
    return mukai_vector(alg, line_bundle_ch(alg, H * k))


def _generator(alg: GradedAlgebra) -> CohClass:
    if len(alg.degree_indices(1)) != 1:
        raise AlgebraError("no designated ample generator: degree-2 part is not one-dimensional")
    return alg.degree_basis(1)[0]


@dataclass(frozen=True)
class ReflectionDatum:
    delta: CohClass
    matrix: RatMatrix
    nilpotent_generator: RatMatrix

    def power(self, k: int) -> RatMatrix:
        """``r^k = 1 + k N`` (valid for every integer ``k`` since ``N² = 0``)."""
        return RatMatrix.identity(self.matrix.nrows) + self.nilpotent_generator * k


def _skew_gram(alg: GradedAlgebra) -> RatMatrix:
    P = mukai_gram(alg)
    if not P.is_skew():
        raise AlgebraError("Mukai pairing is not skew on this algebra (need odd n)")
    return P


def reflection(alg: GradedAlgebra, delta: CohClass, gram: RatMatrix | None = None) -> ReflectionDatum:
    """``x ↦ x - ⟨δ, x⟩ δ`` together with its nilpotent part ``x ↦ ⟨x, δ⟩ δ``."""
    P = _skew_gram(alg) if gram is None else gram
    d = RatMatrix.column(delta.coeffs)
    N = d @ (P @ d).T
    return ReflectionDatum(delta, RatMatrix.identity(alg.dim) + N, N)


def spans_check(alg: GradedAlgebra, exponent_tuples: Sequence[Sequence[int]]) -> tuple[int, bool]:
    """Rank of the Mukai vectors of ``O(Σ kᵢ xᵢ)`` over the degree-2 basis ``xᵢ``."""
    if not alg.is_generated_in_degree_two():
        raise AlgebraError("algebra is not generated in degree 2")
    xs = alg.degree_basis(1)
    sq = sqrt_unit_series(todd_class(alg))
    e = Echelon(alg.dim)
    for ks in exponent_tuples:
        if len(ks) != len(xs):
            raise ValueError(f"exponent tuple {tuple(ks)} has wrong length")
        c1 = alg.zero()
        for k, x in zip(ks, xs):
            c1 = c1 + x * k
        e.add(sparse((exp_nilpotent(c1) * sq).coeffs))
    return e.rank, e.rank == alg.dim


@dataclass(frozen=True)
class DensityReport:
    closure: LieBasis
    sp_dim: int
    orbit_span_rank: int
    in_symplectic: bool
    generators: tuple[CohClass, ...]

    @property
    def closure_dim(self) -> int:
        return self.closure.dim

    @property
    def dense(self) -> bool:
        return self.closure.closed and self.closure.dim == self.sp_dim

    def to_json(self) -> dict:
        return {
            "closure_dim": self.closure_dim,
            "sp_dim": self.sp_dim,
            "orbit_span_rank": self.orbit_span_rank,
            "dense": self.dense,
            "generators": [[_js(x) for x in d.coeffs] for d in self.generators],
        }


def _js(x: Fraction):
    return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def density_certificate(alg: GradedAlgebra, deltas: Sequence[CohClass]) -> DensityReport:
    """Compare the Lie algebra of the transvection generators with ``sp``.

    The orbit-span rank is that of ``η`` together with the reflected vectors
    ``r_δ(η)`` for the supplied ``δ``.
    """
    P = _skew_gram(alg)
    if P.det() == 0:
        raise AlgebraError("Mukai pairing is degenerate")
    data = [reflection(alg, d, P) for d in deltas]
    gens = [r.nilpotent_generator for r in data if not r.nilpotent_generator.is_zero()]
    D = alg.dim
    g = lie_closure(gens) if gens else LieBasis(D, ())
    half = D // 2
    eta = RatMatrix.column(alg.eta().coeffs)
    e = Echelon(D)
    e.add(sparse(eta.col(0)))
    for r in data:
        e.add(sparse((r.matrix @ eta).col(0)))
    return DensityReport(g, half * (2 * half + 1), e.rank, preserves_form(g, P), tuple(deltas))


def default_deltas(alg: GradedAlgebra, K: int, H: CohClass | None = None) -> list[CohClass]:
    """``{v(O(k)) : -K <= k <= K} ∪ {η}``."""
    return [line_bundle_vector(alg, k, H) for k in range(-K, K + 1)] + [alg.eta()]


def minimal_saturating_range(alg: GradedAlgebra, max_K: int, H: CohClass | None = None) -> int | None:
    """Least ``K <= max_K`` whose default deltas already give a dense verdict."""
    for K in range(0, max_K + 1):
        if density_certificate(alg, default_deltas(alg, K, H)).dense:
            return K
    return None


def fit_polynomial(points: Sequence[tuple[int, Fraction]], degree: int) -> tuple[list[Fraction], bool]:
    """Exact least-degree interpolation; ``fits`` says every point lies on the curve."""
    if len(points) < degree + 1:
        raise ValueError("not enough points for the requested degree")
    A = RatMatrix([[Fraction(x) ** j for j in range(degree + 1)] for x, _ in points])
    b = [y for _, y in points]
    sol = solve(A, b)
    if sol is None:
        head = points[: degree + 1]
        sol = solve(RatMatrix([[Fraction(x) ** j for j in range(degree + 1)] for x, _ in head]), [y for _, y in head])
        return list(sol.col(0)), False
    return list(sol.col(0)), True


def growth_probe(alg: GradedAlgebra, m_range: Sequence[int], H: CohClass | None = None) -> dict:
    """Top coefficient of ``v(O(mH))`` as a function of ``m``, fitted exactly in degree ``n``."""
    table = [(m, line_bundle_vector(alg, m, H).top_coefficient()) for m in m_range]
    coeffs, fits = fit_polynomial(table, alg.n)
    return {
        "table": table,
        "coefficients": coeffs,
        "leading": coeffs[-1],
        "fits": fits,
        "positive_leading": coeffs[-1] > 0,
    }
