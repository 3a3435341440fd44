"""Independent oracles and samplers shared by the test modules."""

from __future__ import annotations

import random
from fractions import Fraction

import sympy

from lefschetz_lab.abelian import KahlerParam, TorusData, example_pair, is_ample, ns_basis
from lefschetz_lab.exactlin import RatMatrix


def to_sympy(M: RatMatrix) -> sympy.Matrix:
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in M.rows])


def from_sympy(S: sympy.Matrix) -> RatMatrix:
    return RatMatrix([[Fraction(int(sympy.fraction(x)[0]), int(sympy.fraction(x)[1])) for x in S.row(i)] for i in range(S.rows)], ncols=S.cols)


def descartes_signature(M: RatMatrix) -> tuple[int, int, int]:
    """Inertia from sign changes of the characteristic polynomial (all roots real)."""
    lam = sympy.symbols("lam")
    coeffs = sympy.Poly(to_sympy(M).charpoly(lam).as_expr(), lam).all_coeffs()
    n = M.nrows
    zero = 0
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
        zero += 1

    def changes(cs):
        signs = [c > 0 for c in cs if c != 0]
        return sum(a != b for a, b in zip(signs, signs[1:]))

    pos = changes(coeffs)
    neg_coeffs = [c * (-1) ** (len(coeffs) - 1 - i) for i, c in enumerate(coeffs)]
    neg = changes(neg_coeffs)
    assert pos + neg + zero == n
    return pos, neg, zero


def random_rational_matrix(rng: random.Random, r: int, c: int, lo: int = -4, hi: int = 4, den: int = 3) -> RatMatrix:
    return RatMatrix([[Fraction(rng.randint(lo, hi), rng.randint(1, den)) for _ in range(c)] for _ in range(r)])


def random_nondegenerate_q(rng: random.Random, m: int) -> RatMatrix:
    while True:
        q = [[Fraction(0)] * m for _ in range(m)]
        for i in range(m):
            for j in range(i, m):
                q[i][j] = q[j][i] = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
        Q = RatMatrix(q)
        if Q.det() != 0:
            return Q


def ei_torus() -> tuple[TorusData, RatMatrix]:
    """Elliptic curve with multiplication by i and its principal polarization."""
    return example_pair(1)


def sample_kahler(A: TorusData, rng: random.Random, count: int) -> list[KahlerParam]:
    basis = ns_basis(A)
    out = []
    while len(out) < count:
        phi1 = RatMatrix.zeros(A.rank, A.rank)
        phi2 = RatMatrix.zeros(A.rank, A.rank)
        for c in basis:
            phi1 = phi1 + c * Fraction(rng.randint(-4, 4), rng.randint(1, 3))
            phi2 = phi2 + c * Fraction(rng.randint(-4, 4), rng.randint(1, 3))
        if is_ample(A, phi2):
            out.append(KahlerParam(phi1, phi2))
    return out
