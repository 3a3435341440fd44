"""Rational complex tori, the lattice ``Λ = Γ ⊕ Γ*``, and mirror-pair machinery.

Coordinates: ``Λ`` has the basis ``(e_1..e_2n, e_1*..e_2n*)`` so that the
pairing is ``Q = [[0, I], [I, 0]]`` and the complex structure of ``A × Â`` is
``Jtilde = diag(J, -Jᵀ)``.  An NS element is a skew matrix ``c`` with
``JᵀcJ = c``; the map ``Γ → Γ*``, ``v ↦ c(v, ·)``, has matrix ``Φ = cᵀ``.
Complex matrices are pairs ``(re, im)`` of rational matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Sequence

from .exactlin import (
    Echelon,
    RatMatrix,
    kernel,
    saturate_integral,
    signature,
    solve,
    sparse,
)
from .lefschetz import LieBasis, bracket, lie_closure

__all__ = [
    "TorusData",
    "KahlerParam",
    "MirrorCertificate",
    "AbelianError",
    "SingularBlockError",
    "SplitNotFound",
    "MirrorRecoveryError",
    "q_gram",
    "jtilde",
    "ns_basis",
    "is_ns",
    "is_ample",
    "iomega",
    "iomega_factors",
    "iomega_invert",
    "e_form_test",
    "u_membership",
    "u_lie_algebra",
    "ns_sl2",
    "hodge_envelope_deg2",
    "perfectness_proxy",
    "mirror_check",
    "isotropic_invariant_split",
    "construct_mirror",
    "monodromy_witness",
    "siegel_action",
    "example_pair",
    "conjugator",
    "tensor_block",
]


class AbelianError(ValueError):
    pass


class SingularBlockError(AbelianError):
    pass


class SplitNotFound(RuntimeError):
    """Bounded split search ran out of budget (inconclusive)."""


class MirrorRecoveryError(RuntimeError):
    """A split was found but no valid ``ω_B`` could be recovered."""


@dataclass(frozen=True)
class TorusData:
    n: int
    J: RatMatrix

    def __post_init__(self):
        J = self.J if isinstance(self.J, RatMatrix) else RatMatrix(self.J)
        if J.shape != (2 * self.n, 2 * self.n):
            raise AbelianError("J must be 2n x 2n")
        if J @ J != -RatMatrix.identity(2 * self.n):
            raise AbelianError("J² != -1")
        object.__setattr__(self, "J", J)

    @property
    def rank(self) -> int:
        return 2 * self.n

    def to_json(self) -> dict:
        return {"n": self.n, "J": self.J.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "TorusData":
        return cls(int(data["n"]), RatMatrix(data["J"]))


@dataclass(frozen=True)
class KahlerParam:
    """``ω = φ₁ + iφ₂`` with both parts NS forms (skew matrices)."""

    phi1: RatMatrix
    phi2: RatMatrix

    def __post_init__(self):
        for name in ("phi1", "phi2"):
            v = getattr(self, name)
            if not isinstance(v, RatMatrix):
                object.__setattr__(self, name, RatMatrix(v))

    def maps(self) -> tuple[RatMatrix, RatMatrix]:
        return self.phi1.T, self.phi2.T

    @classmethod
    def from_maps(cls, Phi1: RatMatrix, Phi2: RatMatrix) -> "KahlerParam":
        return cls(Phi1.T, Phi2.T)

    def to_json(self) -> dict:
        return {"phi1": self.phi1.to_json(), "phi2": self.phi2.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "KahlerParam":
        return cls(RatMatrix(data["phi1"]), RatMatrix(data["phi2"]))


# ---------------------------------------------------------------------------
# basic structures


def q_gram(A: TorusData) -> RatMatrix:
    Z = RatMatrix.zeros(A.rank, A.rank)
    I = RatMatrix.identity(A.rank)
    return RatMatrix.block([[Z, I], [I, Z]])


def jtilde(A: TorusData) -> RatMatrix:
    Z = RatMatrix.zeros(A.rank, A.rank)
    return RatMatrix.block([[A.J, Z], [Z, -A.J.T]])


def _blocks(M: RatMatrix, k: int):
    r = range(k)
    s = range(k, 2 * k)
    return M.submatrix(r, r), M.submatrix(r, s), M.submatrix(s, r), M.submatrix(s, s)


def _unit(D: int, k: int) -> RatMatrix:
    flat = [0] * (D * D)
    flat[k] = 1
    return RatMatrix.from_flat(D, D, flat)


def _matrix_space(D: int, constraints: Sequence[Callable[[RatMatrix], RatMatrix]]) -> list[RatMatrix]:
    """Basis of ``{X : f(X) = 0 for every f}`` for linear maps ``f``."""
    units = [_unit(D, k) for k in range(D * D)]
    rows = Echelon(D * D)
    for f in constraints:
        images = [f(E).flatten() for E in units]
        for r in range(len(images[0])):
            rows.add(sparse([img[r] for img in images]))
    if rows.rank == 0:
        return units
    M = RatMatrix(rows.basis())
    return [RatMatrix.from_flat(D, D, k.col(0)) for k in kernel(M)]


def ns_basis(A: TorusData) -> list[RatMatrix]:
    J = A.J
    basis = _matrix_space(A.rank, [lambda c: c + c.T, lambda c: J.T @ c @ J - c])
    return list(LieBasis.from_matrices(A.rank, basis).basis)


def is_ns(A: TorusData, c: RatMatrix) -> bool:
    return c.shape == (A.rank, A.rank) and c.is_skew() and A.J.T @ c @ A.J == c


def _polarization_form(A: TorusData, c: RatMatrix) -> RatMatrix:
    if not is_ns(A, c):
        raise AbelianError("form is not a J-invariant skew form")
    S = A.J.T @ c  # (v, w) ↦ c(Jv, w)
    if not S.is_symmetric():
        raise AbelianError("c(J·,·) is not symmetric")
    return S


def is_ample(A: TorusData, c: RatMatrix) -> bool:
    return signature(_polarization_form(A, c)).is_positive_definite()


def _check_param(A: TorusData, w: KahlerParam):
    if not is_ns(A, w.phi1):
        raise AbelianError("phi1 is not an NS form")
    if not is_ample(A, w.phi2):
        raise AbelianError("phi2 is not ample")


# ---------------------------------------------------------------------------
# the complex structure attached to ω


def _U(X: RatMatrix) -> RatMatrix:
    k = X.nrows
    return RatMatrix.block([[RatMatrix.identity(k), RatMatrix.zeros(k, k)], [X, RatMatrix.identity(k)]])


def iomega_factors(A: TorusData, w: KahlerParam) -> tuple[RatMatrix, RatMatrix, RatMatrix]:
    """``(U(Φ₁), S, U(-Φ₁))`` whose product is ``I_ω``."""
    _check_param(A, w)
    P1, P2 = w.maps()
    Z = RatMatrix.zeros(A.rank, A.rank)
    S = RatMatrix.block([[Z, -P2.inverse()], [P2, Z]])
    return _U(P1), S, _U(-P1)


def iomega(A: TorusData, w: KahlerParam, verify: bool = True) -> RatMatrix:
    _check_param(A, w)
    P1, P2 = w.maps()
    P2i = P2.inverse()
    I = RatMatrix.block([[P2i @ P1, -P2i], [P2 + P1 @ P2i @ P1, -(P1 @ P2i)]])
    if verify:
        Q, Jt = q_gram(A), jtilde(A)
        U1, S, U2 = iomega_factors(A, w)
        ok = (
            I @ I == -RatMatrix.identity(2 * A.rank)
            and I.T @ Q @ I == Q
            and bracket(I, Jt).is_zero()
            and U1 @ S @ U2 == I
        )
        if not ok:
            raise AssertionError("I_ω failed its defining identities")
    return I


def iomega_invert(A: TorusData, I: RatMatrix) -> KahlerParam | None:
    """Read ``(φ₁, φ₂)`` off the blocks of ``I``; ``None`` unless ``I = I_ω``."""
    k = A.rank
    TL, TR, _, _ = _blocks(I, k)
    if TR.det() == 0:
        raise SingularBlockError("top-right block is singular")
    P2 = -TR.inverse()
    P1 = P2 @ TL
    w = KahlerParam.from_maps(P1, P2)
    try:
        _check_param(A, w)
    except AbelianError:
        return None
    return w if iomega(A, w, verify=False) == I else None


def _require_complex_structure(A: TorusData, I: RatMatrix):
    Q, Jt = q_gram(A), jtilde(A)
    D = 2 * A.rank
    if I.shape != (D, D):
        raise AbelianError("I has the wrong size")
    if I @ I != -RatMatrix.identity(D):
        raise AbelianError("I² != -1")
    if I.T @ Q @ I != Q:
        raise AbelianError("I does not preserve Q")
    if not bracket(I, Jt).is_zero():
        raise AbelianError("I does not commute with Jtilde")


@dataclass(frozen=True)
class EFormResult:
    symmetric: bool
    positive_definite: bool
    negative_definite: bool


def e_form_test(A: TorusData, I: RatMatrix) -> EFormResult:
    """Symmetry and definiteness of ``E(x, y) = Q(I·Jtilde x, y)``."""
    _require_complex_structure(A, I)
    c = I @ jtilde(A)
    E = c.T @ q_gram(A)
    if not E.is_symmetric():
        return EFormResult(False, False, False)
    sig = signature(E)
    return EFormResult(True, sig.is_positive_definite(), sig.is_negative_definite())


# ---------------------------------------------------------------------------
# U(A) and its Lie algebra


def _is_unimodular_integral(g: RatMatrix) -> bool:
    return g.is_square() and g.is_integral() and abs(g.det()) == 1


def u_membership(A: TorusData, g: RatMatrix) -> bool:
    D = 2 * A.rank
    if g.shape != (D, D) or not _is_unimodular_integral(g):
        return False
    Q = q_gram(A)
    ok = g.T @ Q @ g == Q and bracket(g, jtilde(A)).is_zero()
    if ok:
        # block-adjoint form of the inverse: [[dᵀ, bᵀ], [cᵀ, aᵀ]]
        a, b, c, d = _blocks(g, A.rank)
        adj = RatMatrix.block([[d.T, b.T], [c.T, a.T]])
        if adj @ g != RatMatrix.identity(D):
            raise AssertionError("isometry without block-adjoint inverse")
    return ok


def tensor_block(A: TorusData, c: RatMatrix) -> RatMatrix:
    """``[[I, 0], [Φ, I]]`` for the NS form ``c`` (tensoring by a line bundle)."""
    return _U(c.T)


def u_lie_algebra(A: TorusData) -> LieBasis:
    Q, Jt = q_gram(A), jtilde(A)
    mats = _matrix_space(2 * A.rank, [lambda X: X.T @ Q + Q @ X, lambda X: bracket(X, Jt)])
    return LieBasis.from_matrices(2 * A.rank, mats, closed=True)


def ns_sl2(A: TorusData, c: RatMatrix) -> LieBasis:
    """Span of ``[[0,0],[Φ,0]]``, ``[[0,Φ⁻¹],[0,0]]`` and their bracket."""
    P = c.T
    Z = RatMatrix.zeros(A.rank, A.rank)
    X = RatMatrix.block([[Z, Z], [P, Z]])
    Y = RatMatrix.block([[Z, P.inverse()], [Z, Z]])
    return lie_closure([X, Y])


def hodge_envelope_deg2(A: TorusData, I: RatMatrix) -> LieBasis:
    """Infinitesimal stabilizer of the degree-2 tensors fixed by the circle through ``I``.

    Upper bound for the Hodge Lie algebra: ``X`` must commute with every
    endomorphism commuting with ``I`` and kill every bilinear form ``b`` with
    ``IᵀB + BI = 0``.
    """
    D = I.nrows
    if I @ I != -RatMatrix.identity(D):
        raise AbelianError("I² != -1")
    cent = _matrix_space(D, [lambda E: bracket(E, I)])
    forms = _matrix_space(D, [lambda B: I.T @ B + B @ I])
    cons = [lambda X, E=E: bracket(X, E) for E in cent]
    cons += [lambda X, B=B: X.T @ B + B @ X for B in forms]
    mats = _matrix_space(D, cons)
    g = LieBasis.from_matrices(D, mats, closed=True)
    if not g.verify_closed():
        raise AssertionError("envelope is not bracket-closed")
    return g


def perfectness_proxy(A: TorusData, w: KahlerParam) -> dict:
    """Compare the envelope of ``I_ω`` with ``Lie(U(A))`` (an upper-bound proxy only)."""
    env = hodge_envelope_deg2(A, iomega(A, w))
    u = u_lie_algebra(A)
    inside = env.is_subspace_of(u)
    return {
        "envelope_dim": env.dim,
        "u_dim": u.dim,
        "envelope_in_u": inside,
        "equal": inside and env.dim == u.dim,
        "caveat": "degree-2 tensor envelope may exceed the Hodge Lie algebra",
    }


# ---------------------------------------------------------------------------
# mirror condition


@dataclass(frozen=True)
class MirrorCertificate:
    alpha: RatMatrix
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(self.checks.values())

    def to_json(self) -> dict:
        return {"alpha": self.alpha.to_json(), "checks": dict(self.checks), "passed": self.passed}


def mirror_check(A: TorusData, wA: KahlerParam, B: TorusData, wB: KahlerParam, alpha: RatMatrix) -> MirrorCertificate:
    D = 2 * A.rank
    if A.n != B.n or alpha.shape != (D, D):
        return MirrorCertificate(alpha, {"dimensions": False})
    QA, QB = q_gram(A), q_gram(B)
    IA, IB = iomega(A, wA), iomega(B, wB)
    checks = {
        "alpha_integral_unimodular": _is_unimodular_integral(alpha),
        "isometry": alpha.T @ QB @ alpha == QA,
        "alpha_J_A_eq_I_B_alpha": alpha @ jtilde(A) == IB @ alpha,
        "alpha_I_A_eq_J_B_alpha": alpha @ IA == jtilde(B) @ alpha,
    }
    return MirrorCertificate(alpha, checks)


def _lambda_box(D: int, box: int):
    """Nonzero integer vectors by increasing max-norm, then support size."""
    for t in range(1, box + 1):
        vals = [x for x in range(-t, t + 1) if x]
        for size in range(1, D + 1):
            for pos in combinations(range(D), size):
                for entries in product(vals, repeat=size):
                    if max(map(abs, entries)) != t:
                        continue
                    v = [0] * D
                    for p, x in zip(pos, entries):
                        v[p] = x
                    yield tuple(v)


class _LazyPool:
    def __init__(self, it):
        self._it = it
        self._items: list = []

    def get(self, i: int):
        while len(self._items) <= i:
            nxt = next(self._it, None)
            if nxt is None:
                return None
            self._items.append(nxt)
        return self._items[i]


def _qpair(Q: RatMatrix, x, y) -> Fraction:
    return sum((Fraction(x[i]) * Q[i, j] * Fraction(y[j]) for i in range(len(x)) if x[i] for j in range(len(y)) if y[j]), Fraction(0))


def isotropic_invariant_split(
    A: TorusData, I: RatMatrix, box: int = 3, budget: int = 50_000
) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]] | None:
    """Integral bases of ``Λ = Γ₁ ⊕ Γ₂`` with each ``Γᵢ`` isotropic and ``I``-invariant.

    Depth-first over box vectors ``v``: each accepted ``v`` contributes the pair
    ``{v, Iv}``.  ``Γ₁`` is completed first, saturated, then ``Γ₂`` is chosen so
    that the two bases together are unimodular.  Returns ``None`` when
    ``budget`` candidate vectors have been examined without success.
    """
    _require_complex_structure(A, I)
    Q = q_gram(A)
    D = 2 * A.rank
    need = A.n  # pairs per half
    pool = _LazyPool(_lambda_box(D, box))
    counter = [0]

    def Iv(v):
        return (I @ RatMatrix.column(v)).col(0)

    def extend(chosen: list, span: Echelon, start: int, accept):
        if len(chosen) == 2 * need:
            sat = saturate_integral(chosen)
            return sat if accept(sat) else None
        idx = start - 1
        while True:
            idx += 1
            counter[0] += 1
            if counter[0] > budget:
                return None
            v = pool.get(idx)
            if v is None:
                return None
            w = Iv(v)
            if _qpair(Q, v, v) != 0:
                continue
            if any(_qpair(Q, v, u) or _qpair(Q, w, u) for u in chosen):
                continue
            e = span.copy()
            if not (e.add(sparse(v)) and e.add(sparse(w))):
                continue
            got = extend(chosen + [tuple(Fraction(x) for x in v), tuple(w)], e, idx + 1, accept)
            if got is not None:
                return got
            if counter[0] > budget:
                return None
        return None

    def accept_first(g1):
        def accept_second(g2):
            M = RatMatrix.from_columns(list(g1) + list(g2), nrows=D)
            return abs(M.det()) == 1

        g2 = extend([], Echelon(D), 0, accept_second)
        if g2 is None:
            return False
        accept_first.result = g2
        return True

    g1 = extend([], Echelon(D), 0, accept_first)
    if g1 is None:
        return None
    return [tuple(int(x) for x in r) for r in g1], [tuple(int(x) for x in r) for r in accept_first.result]


def _dual_basis(Q: RatMatrix, g: RatMatrix, gamma2: RatMatrix) -> RatMatrix:
    """Basis ``h`` of ``Γ₂`` with ``gᵀQh = I``."""
    G = g.T @ Q @ gamma2
    return gamma2 @ G.inverse()


@dataclass(frozen=True)
class MirrorResult:
    B: TorusData
    wB: KahlerParam
    certificate: MirrorCertificate
    split: tuple


def construct_mirror(A: TorusData, wA: KahlerParam, box: int = 3, budget: int = 50_000) -> MirrorResult:
    IA = iomega(A, wA)
    split = isotropic_invariant_split(A, IA, box, budget)
    if split is None:
        raise SplitNotFound(f"no isotropic invariant split within box ±{box}, budget {budget}")
    k = A.rank
    D = 2 * k
    Q = q_gram(A)
    g = RatMatrix.from_columns(split[0], nrows=D)
    h = _dual_basis(Q, g, RatMatrix.from_columns(split[1], nrows=D))
    P = RatMatrix.block([[g, h]])
    alpha = P.inverse()
    conj = alpha @ IA @ P
    JB = conj.submatrix(range(k), range(k))
    B = TorusData(A.n, JB)
    if conj != jtilde(B):
        raise MirrorRecoveryError("α I_ω α⁻¹ is not block diagonal of the expected shape")
    target = alpha @ jtilde(A) @ P
    try:
        wB = iomega_invert(B, target)
    except SingularBlockError as exc:
        raise MirrorRecoveryError(f"ω_B not recoverable: {exc}") from exc
    if wB is None:
        raise MirrorRecoveryError("transported Jtilde is not I_ω for any ω in the complexified ample cone")
    cert = mirror_check(A, wA, B, wB, alpha)
    return MirrorResult(B, wB, cert, split)


def conjugator(J1: RatMatrix, J2: RatMatrix) -> RatMatrix | None:
    """Some invertible rational ``P`` with ``P J1 = J2 P``, or ``None``."""
    D = J1.nrows
    sols = _matrix_space(D, [lambda X: X @ J1 - J2 @ X])
    if not sols:
        return None
    for P in sols:
        if P.det() != 0:
            return P
    # deterministic small combinations
    for coeffs in product(range(-2, 3), repeat=min(len(sols), 4)):
        P = RatMatrix.zeros(D, D)
        for c, S in zip(coeffs, sols):
            P = P + S * c
        if P.det() != 0:
            return P
    return None


# ---------------------------------------------------------------------------
# monodromy and the Siegel action


def monodromy_witness(A: TorusData, g: RatMatrix, w1: KahlerParam) -> KahlerParam | None:
    Q = q_gram(A)
    if not _is_unimodular_integral(g) or g.T @ Q @ g != Q:
        return None
    I2 = g @ iomega(A, w1) @ g.inverse()
    try:
        return iomega_invert(A, I2)
    except SingularBlockError:
        return None


def _cmul(x, y):
    return (x[0] @ y[0] - x[1] @ y[1], x[0] @ y[1] + x[1] @ y[0])


def _cinv(x):
    re, im = x
    k = re.nrows
    big = RatMatrix.block([[re, -im], [im, re]])
    if big.det() == 0:
        raise AbelianError("a + bω is singular")
    inv = big.inverse()
    return inv.submatrix(range(k), range(k)), inv.submatrix(range(k, 2 * k), range(k))


def siegel_action(A: TorusData, g: RatMatrix, w: KahlerParam) -> KahlerParam:
    """``ω ↦ (c + dω)(a + bω)⁻¹`` on the map form of ``ω``."""
    a, b, c, d = _blocks(g, A.rank)
    om = w.maps()
    Z = RatMatrix.zeros(A.rank, A.rank)
    num = (c + _cmul((d, Z), om)[0], _cmul((d, Z), om)[1])
    den_b = _cmul((b, Z), om)
    den = (a + den_b[0], den_b[1])
    res = _cmul(num, _cinv(den))
    return KahlerParam.from_maps(res[0], res[1])


def example_pair(n: int) -> tuple[TorusData, RatMatrix]:
    """``J₀ e_i = -e_{i+n}``, ``J₀ e_{i+n} = e_i`` and ``s(e_i, e_{j+n}) = δ_ij``."""
    if n < 1:
        raise AbelianError("n must be positive")
    Z = RatMatrix.zeros(n, n)
    I = RatMatrix.identity(n)
    J0 = RatMatrix.block([[Z, I], [-I, Z]])
    s = RatMatrix.block([[Z, I], [-I, Z]])
    A = TorusData(n, J0)
    if not (is_ns(A, s) and is_ample(A, s) and J0.T @ s @ J0 == s):
        raise AssertionError("example data failed validation")
    return A, s
