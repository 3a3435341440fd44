"""Exact rational and integer linear algebra.

Everything here works over :class:`fractions.Fraction` (or plain ``int`` for the
integral routines); no floating point value is ever produced.  The central
object is :class:`RatMatrix`, an immutable dense matrix of rationals.

Row reduction is implemented once, incrementally, in :class:`Echelon`: vectors
are stored sparsely and the basis is kept in fully reduced row-echelon form, so
that the canonical RREF of any span is available at every step.  ``rref``,
``kernel``, ``span_saturate`` and the Lie-closure loop all sit on top of it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

__all__ = [
    "RatMatrix",
    "Echelon",
    "SnfResult",
    "Signature",
    "to_fraction",
    "rref",
    "kernel",
    "solve",
    "smith_normal_form",
    "signature",
    "span_saturate",
    "hermite_normal_form",
    "saturate_integral",
    "primitive_vector",
    "hstack",
    "vstack",
]


def to_fraction(x) -> Fraction:
    """Coerce ``x`` to an exact rational.  Floats are refused."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not matrix entries")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError(f"floating point entry {x!r} refused; use int, Fraction or 'p/q'")
    if hasattr(x, "__index__"):
        return Fraction(x.__index__())
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


class RatMatrix:
    """Immutable dense matrix with exact rational entries."""

    __slots__ = ("_rows", "nrows", "ncols", "_hash")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        data = tuple(tuple(to_fraction(x) for x in row) for row in rows)
        if data:
            width = len(data[0])
            if any(len(r) != width for r in data):
                raise ValueError("ragged rows")
            if ncols is not None and ncols != width:
                raise ValueError("ncols does not match row length")
        else:
            width = ncols or 0
        self._rows = data
        self.nrows = len(data)
        self.ncols = width
        self._hash = None

    # construction helpers -------------------------------------------------
    @classmethod
    def _wrap(cls, rows: tuple, ncols: int) -> "RatMatrix":
        # rows already tuples of Fractions
        m = object.__new__(cls)
        m._rows = rows
        m.nrows = len(rows)
        m.ncols = ncols
        m._hash = None
        return m

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "RatMatrix":
        z = Fraction(0)
        return cls._wrap(tuple((z,) * ncols for _ in range(nrows)), ncols)

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls.diag([1] * n)

    @classmethod
    def diag(cls, entries: Sequence) -> "RatMatrix":
        vals = [to_fraction(x) for x in entries]
        n = len(vals)
        z = Fraction(0)
        return cls._wrap(
            tuple(tuple(vals[i] if i == j else z for j in range(n)) for i in range(n)), n
        )

    @classmethod
    def column(cls, entries: Sequence) -> "RatMatrix":
        return cls([[x] for x in entries], ncols=1)

    @classmethod
    def from_flat(cls, nrows: int, ncols: int, flat: Sequence) -> "RatMatrix":
        if len(flat) != nrows * ncols:
            raise ValueError("flat data has wrong length")
        vals = [to_fraction(x) for x in flat]
        return cls._wrap(
            tuple(tuple(vals[i * ncols:(i + 1) * ncols]) for i in range(nrows)), ncols
        )

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], nrows: int | None = None) -> "RatMatrix":
        cols = [[to_fraction(x) for x in c] for c in cols]
        if not cols:
            return cls.zeros(nrows or 0, 0)
        return cls(zip(*cols), ncols=len(cols))

    @classmethod
    def block(cls, blocks: Sequence[Sequence["RatMatrix"]]) -> "RatMatrix":
        rows = []
        for brow in blocks:
            h = brow[0].nrows
            if any(b.nrows != h for b in brow):
                raise ValueError("block row heights differ")
            for i in range(h):
                rows.append(tuple(x for b in brow for x in b._rows[i]))
        width = sum(b.ncols for b in blocks[0])
        return cls._wrap(tuple(rows), width)

    # basic access ---------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def rows(self) -> tuple[tuple[Fraction, ...], ...]:
        return self._rows

    def __getitem__(self, idx):
        i, j = idx
        return self._rows[i][j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self._rows[i]

    def col(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self._rows)

    def columns(self) -> list[tuple[Fraction, ...]]:
        return [self.col(j) for j in range(self.ncols)]

    def flatten(self) -> tuple[Fraction, ...]:
        return tuple(x for r in self._rows for x in r)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "RatMatrix":
        return RatMatrix._wrap(
            tuple(tuple(self._rows[i][j] for j in cols) for i in rows), len(cols)
        )

    @property
    def T(self) -> "RatMatrix":
        if self.nrows == 0:
            return RatMatrix.zeros(self.ncols, 0)
        return RatMatrix._wrap(tuple(zip(*self._rows)), self.nrows)

    # arithmetic -----------------------------------------------------------
    def _check_same_shape(self, other: "RatMatrix"):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        self._check_same_shape(other)
        return RatMatrix._wrap(
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows)),
            self.ncols,
        )

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        self._check_same_shape(other)
        return RatMatrix._wrap(
            tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows)),
            self.ncols,
        )

    def __neg__(self) -> "RatMatrix":
        return RatMatrix._wrap(tuple(tuple(-a for a in r) for r in self._rows), self.ncols)

    def __mul__(self, scalar) -> "RatMatrix":
        if isinstance(scalar, RatMatrix):
            raise TypeError("use @ for matrix products")
        c = to_fraction(scalar)
        return RatMatrix._wrap(tuple(tuple(c * a for a in r) for r in self._rows), self.ncols)

    __rmul__ = __mul__

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        cols = list(zip(*other._rows)) if other.nrows else [()] * other.ncols
        out = []
        for r in self._rows:
            nz = [(k, a) for k, a in enumerate(r) if a]
            out.append(tuple(sum((a * c[k] for k, a in nz), Fraction(0)) for c in cols))
        return RatMatrix._wrap(tuple(out), other.ncols)

    def __pow__(self, k: int) -> "RatMatrix":
        if not self.is_square():
            raise ValueError("power of a non-square matrix")
        if k < 0:
            return self.inverse() ** (-k)
        result = RatMatrix.identity(self.nrows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.shape, self._rows))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self._rows)
        return f"RatMatrix([{body}])"

    # predicates -----------------------------------------------------------
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def is_zero(self) -> bool:
        return not any(x for r in self._rows for x in r)

    def is_symmetric(self) -> bool:
        return self.is_square() and self == self.T

    def is_skew(self) -> bool:
        return self.is_square() and self == -self.T

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for r in self._rows for x in r)

    # derived quantities ---------------------------------------------------
    def trace(self) -> Fraction:
        if not self.is_square():
            raise ValueError("trace of a non-square matrix")
        return sum((self._rows[i][i] for i in range(self.nrows)), Fraction(0))

    def det(self) -> Fraction:
        if not self.is_square():
            raise ValueError("determinant of a non-square matrix")
        a = [list(r) for r in self._rows]
        n = self.nrows
        det = Fraction(1)
        for c in range(n):
            p = next((i for i in range(c, n) if a[i][c]), None)
            if p is None:
                return Fraction(0)
            if p != c:
                a[c], a[p] = a[p], a[c]
                det = -det
            piv = a[c][c]
            det *= piv
            for i in range(c + 1, n):
                f = a[i][c]
                if f:
                    f /= piv
                    ai, ac = a[i], a[c]
                    for j in range(c, n):
                        if ac[j]:
                            ai[j] -= f * ac[j]
        return det

    def inverse(self) -> "RatMatrix":
        if not self.is_square():
            raise ValueError("inverse of a non-square matrix")
        n = self.nrows
        aug = RatMatrix._wrap(
            tuple(r + tuple(Fraction(int(i == j)) for j in range(n)) for i, r in enumerate(self._rows)),
            2 * n,
        )
        red, piv, rank = rref(aug)
        if tuple(piv[:n]) != tuple(range(n)) or rank < n:
            raise ZeroDivisionError("matrix is singular")
        return red.submatrix(range(n), range(n, 2 * n))

    def to_json(self) -> list[list]:
        return [[_scalar_json(x) for x in r] for r in self._rows]

    def to_int_rows(self) -> list[list[int]]:
        if not self.is_integral():
            raise ValueError("matrix has non-integral entries")
        return [[int(x) for x in r] for r in self._rows]


def _scalar_json(x: Fraction):
    return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def hstack(*ms: RatMatrix) -> RatMatrix:
    return RatMatrix.block([list(ms)])


def vstack(*ms: RatMatrix) -> RatMatrix:
    width = ms[0].ncols
    if any(m.ncols != width for m in ms):
        raise ValueError("column counts differ")
    return RatMatrix._wrap(tuple(r for m in ms for r in m.rows), width)


# ---------------------------------------------------------------------------
# incremental row reduction


class Echelon:
    """Incrementally maintained reduced row-echelon basis of a subspace of Q^n.

    Rows are sparse ``{column: value}`` dicts with pivot entry 1 and zeros in
    every other pivot column.  Because the form is fully reduced, the basis
    depends only on the span, never on insertion order.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self._rows: dict[int, dict[int, Fraction]] = {}

    def __len__(self) -> int:
        return len(self._rows)

    @property
    def rank(self) -> int:
        return len(self._rows)

    @property
    def pivots(self) -> list[int]:
        return sorted(self._rows)

    def reduce(self, vec: dict[int, Fraction]) -> dict[int, Fraction]:
        v = dict(vec)
        rows = self._rows
        for p in [p for p in v if p in rows]:
            c = v.get(p)
            if not c:
                continue
            for col, val in rows[p].items():
                nv = v.get(col, 0) - c * val
                if nv:
                    v[col] = nv
                else:
                    v.pop(col, None)
        return v

    def contains(self, vec: dict[int, Fraction]) -> bool:
        return not self.reduce(vec)

    def add(self, vec: dict[int, Fraction]) -> bool:
        """Insert ``vec``; return True when it enlarged the span."""
        r = self.reduce(vec)
        if not r:
            return False
        p = min(r)
        inv = 1 / r[p]
        r = {c: x * inv for c, x in r.items()}
        for row in self._rows.values():
            c = row.get(p)
            if c:
                for col, val in r.items():
                    nv = row.get(col, 0) - c * val
                    if nv:
                        row[col] = nv
                    else:
                        row.pop(col, None)
        self._rows[p] = r
        return True

    def basis(self) -> list[tuple[Fraction, ...]]:
        """Canonical basis as dense tuples, ordered by pivot column."""
        z = Fraction(0)
        out = []
        for p in sorted(self._rows):
            dense = [z] * self.ncols
            for c, x in self._rows[p].items():
                dense[c] = x
            out.append(tuple(dense))
        return out

    def copy(self) -> "Echelon":
        e = Echelon(self.ncols)
        e._rows = {p: dict(r) for p, r in self._rows.items()}
        return e


def sparse(vec: Sequence) -> dict[int, Fraction]:
    return {i: to_fraction(x) for i, x in enumerate(vec) if x}


# ---------------------------------------------------------------------------
# public kernels


def rref(M: RatMatrix) -> tuple[RatMatrix, tuple[int, ...], int]:
    """Reduced row-echelon form, pivot columns and rank of ``M``."""
    e = Echelon(M.ncols)
    for r in M.rows:
        e.add(sparse(r))
    basis = e.basis()
    z = (Fraction(0),) * M.ncols
    rows = tuple(basis) + (z,) * (M.nrows - len(basis))
    return RatMatrix._wrap(rows, M.ncols), tuple(e.pivots), e.rank


def _kernel_vectors(M: RatMatrix) -> list[tuple[Fraction, ...]]:
    red, pivots, rank = rref(M)
    n = M.ncols
    pivset = set(pivots)
    out = []
    for f in range(n):
        if f in pivset:
            continue
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -red[i, f]
        out.append(tuple(v))
    return out


def kernel(M: RatMatrix) -> list[RatMatrix]:
    """Canonical basis of ``{x : Mx = 0}``, one column matrix per free variable."""
    return [RatMatrix.column(v) for v in _kernel_vectors(M)]


def solve(A: RatMatrix, b) -> RatMatrix | None:
    """Some ``x`` with ``Ax = b`` (free variables set to zero), or None."""
    bcol = b.col(0) if isinstance(b, RatMatrix) else tuple(to_fraction(x) for x in b)
    if len(bcol) != A.nrows:
        raise ValueError("right-hand side has wrong length")
    aug = RatMatrix._wrap(tuple(r + (y,) for r, y in zip(A.rows, bcol)), A.ncols + 1)
    red, pivots, rank = rref(aug)
    if pivots and pivots[-1] == A.ncols:
        return None
    x = [Fraction(0)] * A.ncols
    for i, p in enumerate(pivots):
        x[p] = red[i, A.ncols]
    return RatMatrix.column(x)


def span_saturate(vectors: Sequence[Sequence]) -> list[tuple[Fraction, ...]]:
    """Canonical (RREF-row) basis of the rational span of ``vectors``."""
    vectors = list(vectors)
    if not vectors:
        return []
    n = len(vectors[0])
    if any(len(v) != n for v in vectors):
        raise ValueError("vectors have different lengths")
    e = Echelon(n)
    for v in vectors:
        e.add(sparse(v))
    return e.basis()


# ---------------------------------------------------------------------------
# signature


@dataclass(frozen=True)
class Signature:
    positive: int
    negative: int
    zero: int

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.positive, self.negative, self.zero)

    @property
    def dim(self) -> int:
        return self.positive + self.negative + self.zero

    def is_positive_definite(self) -> bool:
        return self.negative == 0 and self.zero == 0

    def is_negative_definite(self) -> bool:
        return self.positive == 0 and self.zero == 0


def signature(G: RatMatrix) -> Signature:
    """Inertia of a symmetric form by exact congruence elimination."""
    if not G.is_symmetric():
        raise ValueError("signature requires a symmetric matrix")
    a = [list(r) for r in G.rows]
    pos = neg = 0
    while a:
        n = len(a)
        k = next((i for i in range(n) if a[i][i]), None)
        if k is None:
            pair = next(((i, j) for i in range(n) for j in range(i + 1, n) if a[i][j]), None)
            if pair is None:
                break
            i, j = pair
            # x_i -> x_i + x_j makes the (i, i) entry 2 a_ij != 0
            for t in range(n):
                a[i][t] += a[j][t]
            for t in range(n):
                a[t][i] += a[t][j]
            k = i
        piv = a[k][k]
        if piv > 0:
            pos += 1
        else:
            neg += 1
        rest = [t for t in range(n) if t != k]
        a = [[a[s][t] - a[s][k] * a[k][t] / piv for t in rest] for s in rest]
    return Signature(pos, neg, len(G.rows) - pos - neg)


# ---------------------------------------------------------------------------
# integer algorithms


@dataclass(frozen=True)
class SnfResult:
    """``A = U @ D @ V`` with ``U``, ``V`` unimodular and ``D`` in Smith form."""

    U: RatMatrix
    D: RatMatrix
    V: RatMatrix

    @property
    def elementary_divisors(self) -> list[int]:
        k = min(self.D.nrows, self.D.ncols)
        return [int(self.D[i, i]) for i in range(k) if self.D[i, i]]


def _as_int_rows(A) -> list[list[int]]:
    if isinstance(A, RatMatrix):
        return A.to_int_rows()
    rows = [[to_fraction(x) for x in r] for r in A]
    if any(x.denominator != 1 for r in rows for x in r):
        raise ValueError("matrix has non-integral entries")
    return [[int(x) for x in r] for r in rows]


def smith_normal_form(A) -> SnfResult:
    """Smith normal form of an integer matrix with unimodular transforms."""
    a = _as_int_rows(A)
    m = len(a)
    n = len(a[0]) if m else (A.ncols if isinstance(A, RatMatrix) else 0)
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        for r in U:
            r[i], r[j] = r[j], r[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        V[i], V[j] = V[j], V[i]

    def add_row(i, j, c):  # row_i += c * row_j
        if c:
            ai, aj = a[i], a[j]
            for t in range(n):
                ai[t] += c * aj[t]
            for r in U:
                r[j] -= c * r[i]

    def add_col(i, j, c):  # col_i += c * col_j
        if c:
            for r in a:
                r[i] += c * r[j]
            Vi, Vj = V[i], V[j]
            for t in range(n):
                Vj[t] -= c * Vi[t]

    def move_smallest(t, region):
        best = None
        for i, j in region:
            x = a[i][j]
            if x and (best is None or abs(x) < abs(a[best[0]][best[1]])):
                best = (i, j)
        if best is None:
            return False
        i, j = best
        if i != t:
            swap_rows(i, t)
        if j != t:
            swap_cols(j, t)
        return True

    for t in range(min(m, n)):
        if not move_smallest(t, [(i, j) for i in range(t, m) for j in range(t, n)]):
            break
        while True:
            p = a[t][t]
            clean = True
            for i in range(t + 1, m):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
                    clean = clean and a[i][t] == 0
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
                    clean = clean and a[t][j] == 0
            if not clean:
                move_smallest(
                    t, [(t, t)] + [(i, t) for i in range(t + 1, m)] + [(t, j) for j in range(t + 1, n)]
                )
                continue
            bad = next(
                ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            for r in U:
                r[t] = -r[t]

    return SnfResult(RatMatrix(U, ncols=m), RatMatrix(a, ncols=n), RatMatrix(V, ncols=n))


def primitive_vector(vec: Sequence) -> tuple[int, ...]:
    """Scale a nonzero rational vector to a primitive integer vector (first nonzero > 0)."""
    fr = [to_fraction(x) for x in vec]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        raise ValueError("zero vector has no primitive multiple")
    ints = [x // g for x in ints]
    first = next(x for x in ints if x)
    if first < 0:
        ints = [-x for x in ints]
    return tuple(ints)


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Row-style Hermite normal form of the lattice spanned by integer ``rows``.

    Output rows are a basis, in echelon form, with positive pivots and the
    entries above each pivot reduced into ``[0, pivot)``.  Zero rows dropped.
    """
    a = [list(r) for r in _as_int_rows(rows)] if rows else []
    if not a:
        return []
    m, n = len(a), len(a[0])
    r = 0
    pivots = []
    for c in range(n):
        if r >= m:
            break
        while True:
            nz = [i for i in range(r, m) if a[i][c]]
            if not nz:
                break
            k = min(nz, key=lambda i: abs(a[i][c]))
            a[r], a[k] = a[k], a[r]
            done = True
            for i in range(r + 1, m):
                if a[i][c]:
                    q = a[i][c] // a[r][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    done = done and a[i][c] == 0
            if done:
                break
        if a[r][c] == 0:
            continue
        if a[r][c] < 0:
            a[r] = [-x for x in a[r]]
        for i in range(r):
            q = a[i][c] // a[r][c]
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return [tuple(row) for row in a[:r]]


def saturate_integral(rows: Sequence[Sequence]) -> list[tuple[int, ...]]:
    """Basis (in Hermite form) of ``span_Q(rows) ∩ Z^n``."""
    rows = [primitive_vector(r) for r in rows if any(to_fraction(x) for x in r)]
    if not rows:
        return []
    snf = smith_normal_form(rows)
    k = len(snf.elementary_divisors)
    V = snf.V.to_int_rows()
    return hermite_normal_form(V[:k])
