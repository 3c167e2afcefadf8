"""Exact integer and rational linear algebra, normal forms and lattices.

Everything here works on plain Python ints and :class:`fractions.Fraction`.
Vectors are tuples, matrices are lists (or tuples) of row tuples.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Sequence

from .errors import NotSublattice, PointNotInLattice, ZeroVector

Vector = tuple
Matrix = list


# ---------------------------------------------------------------------------
# scalars and vectors


def as_fraction(value) -> Fraction:
    """Parse ints, Fractions and ``"p/q"`` strings into a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"not an exact scalar: {value!r}")


def rat_vector(values: Iterable) -> tuple:
    return tuple(as_fraction(v) for v in values)


def int_vector(values: Iterable) -> tuple:
    out = []
    for v in values:
        f = as_fraction(v)
        if f.denominator != 1:
            raise ValueError(f"non-integral entry {f}")
        out.append(f.numerator)
    return tuple(out)


def is_integral(v: Sequence) -> bool:
    return all(Fraction(x).denominator == 1 for x in v)


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def add(u: Sequence, v: Sequence) -> tuple:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Sequence, v: Sequence) -> tuple:
    return tuple(a - b for a, b in zip(u, v))


def scale(c, v: Sequence) -> tuple:
    return tuple(c * a for a in v)


def content(v: Sequence[int]) -> int:
    return reduce(gcd, (abs(int(x)) for x in v), 0)


def primitive(v: Sequence[int]) -> tuple:
    """Divide an integer vector by the gcd of its entries.

    >>> primitive((2, 4, 6))
    (1, 2, 3)
    """
    g = content(v)
    if g == 0:
        raise ZeroVector("primitive() of the zero vector")
    return tuple(int(x) // g for x in v)


def clear_denominators(v: Sequence) -> tuple:
    """Smallest positive multiple of a rational vector that is primitive integral."""
    fr = [Fraction(x) for x in v]
    den = reduce(lcm, (x.denominator for x in fr), 1)
    return primitive(tuple(int(x * den) for x in fr))


def vector_denominator(v: Sequence) -> int:
    return reduce(lcm, (Fraction(x).denominator for x in v), 1)


def identity(n: int) -> Matrix:
    return [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]


def transpose(M: Sequence[Sequence]) -> Matrix:
    return [tuple(col) for col in zip(*M)] if M else []


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> Matrix:
    Bt = transpose(B)
    return [tuple(dot(row, col) for col in Bt) for row in A]


def matvec(A: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(dot(row, v) for row in A)


# ---------------------------------------------------------------------------
# determinants, elimination


def det_int(M: Sequence[Sequence[int]]) -> int:
    """Fraction-free Bareiss determinant of a square integer matrix."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(r) for r in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = A[k][k]
        for i in range(k + 1, n):
            aik = A[i][k]
            row_i, row_k = A[i], A[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * A[n - 1][n - 1]


def det(M: Sequence[Sequence]) -> Fraction:
    """Determinant of a square rational matrix."""
    den = reduce(lcm, (Fraction(x).denominator for r in M for x in r), 1)
    n = len(M)
    scaled = [[int(Fraction(x) * den) for x in r] for r in M]
    return Fraction(det_int(scaled), den**n)


def rref(M: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (rows, pivot columns)."""
    A = [[Fraction(x) for x in r] for r in M]
    m = len(A)
    n = len(A[0]) if m else 0
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        p = next((i for i in range(r, m) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(m):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    return A[:r], pivots


def rank(M: Sequence[Sequence]) -> int:
    if not M:
        return 0
    return len(rref(M)[1])


def nullspace(M: Sequence[Sequence], ncols: int | None = None) -> list[tuple]:
    """Rational basis of {x : M x = 0}."""
    if not M:
        n = ncols or 0
        return [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    R, piv = rref(M)
    n = len(M[0])
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for row, pc in zip(R, piv):
            x[pc] = -row[f]
        basis.append(tuple(x))
    return basis


def integer_kernel(M: Sequence[Sequence], ncols: int | None = None) -> list[tuple]:
    """Primitive integer vectors spanning the rational kernel of M."""
    return [clear_denominators(v) for v in nullspace(M, ncols)]


def inverse(M: Sequence[Sequence]) -> Matrix:
    n = len(M)
    aug = [list(M[i]) + [int(i == j) for j in range(n)] for i in range(n)]
    R, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [tuple(row[n:]) for row in R]


def solve(M: Sequence[Sequence], b: Sequence) -> tuple | None:
    """Some rational solution of M x = b, or None when inconsistent."""
    m = len(M)
    n = len(M[0]) if m else 0
    aug = [list(M[i]) + [b[i]] for i in range(m)]
    R, piv = rref(aug)
    if piv and piv[-1] == n:
        return None
    x = [Fraction(0)] * n
    for row, pc in zip(R, piv):
        x[pc] = row[n]
    return tuple(x)


def cofactor_normal(rows: Sequence[Sequence[int]]) -> tuple:
    """Generalized cross product of n-1 integer vectors in Z^n.

    The result is orthogonal to every row; it is zero iff the rows are
    linearly dependent.
    """
    n = len(rows) + 1
    out = []
    for j in range(n):
        minor = [tuple(r[:j]) + tuple(r[j + 1:]) for r in rows]
        d = det_int(minor)
        out.append(d if j % 2 == 0 else -d)
    return tuple(out)


# ---------------------------------------------------------------------------
# normal forms


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def hnf(M: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix]:
    """Row-style Hermite normal form.

    Returns ``(H, U)`` with ``H == U*M``, ``U`` unimodular, ``H`` in echelon
    form with positive pivots, entries above each pivot reduced into
    ``[0, pivot)`` and zero rows last.
    """
    A = [list(map(int, r)) for r in M]
    m = len(A)
    n = len(A[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    r = 0
    for c in range(n):
        if r == m:
            break
        for i in range(r + 1, m):
            if A[i][c] == 0:
                continue
            a, b = A[r][c], A[i][c]
            g, x, y = _xgcd(a, b)
            ag, bg = a // g, b // g
            Ar, Ai = A[r], A[i]
            A[r] = [x * p + y * q for p, q in zip(Ar, Ai)]
            A[i] = [-bg * p + ag * q for p, q in zip(Ar, Ai)]
            Ur, Ui = U[r], U[i]
            U[r] = [x * p + y * q for p, q in zip(Ur, Ui)]
            U[i] = [-bg * p + ag * q for p, q in zip(Ur, Ui)]
        if A[r][c] == 0:
            continue
        if A[r][c] < 0:
            A[r] = [-v for v in A[r]]
            U[r] = [-v for v in U[r]]
        p = A[r][c]
        for i in range(r):
            q = A[i][c] // p
            if q:
                A[i] = [v - q * w for v, w in zip(A[i], A[r])]
                U[i] = [v - q * w for v, w in zip(U[i], U[r])]
        r += 1
    return [tuple(row) for row in A], [tuple(row) for row in U]


def snf(M: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Smith normal form ``S == U*M*V`` with ``U, V`` unimodular.

    The diagonal of ``S`` is nonnegative and each entry divides the next.
    """
    A = [list(map(int, r)) for r in M]
    m = len(A)
    n = len(A[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        A[dst] = [a + q * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for row in A:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // A[t][t]))
            nz = [i for i in range(t + 1, m) if A[i][t]]
            if nz:
                i = min(nz, key=lambda k: abs(A[k][t]))
                swap_rows(t, i)
                continue
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // A[t][t]))
            nz = [j for j in range(t + 1, n) if A[t][j]]
            if nz:
                j = min(nz, key=lambda k: abs(A[t][k]))
                swap_cols(t, j)
                continue
            p = A[t][t]
            for i in range(t + 1, m):
                if any(A[i][j] % p for j in range(t + 1, n)):
                    add_row(t, i, 1)
                    dirty = True
                    break
            if not dirty:
                break
        if A[t][t] < 0:
            A[t] = [-v for v in A[t]]
            U[t] = [-v for v in U[t]]
    return [tuple(r) for r in A], [tuple(r) for r in U], [tuple(r) for r in V]


def elementary_divisors(M: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero diagonal entries of the Smith form."""
    if not M:
        return []
    S, _, _ = snf(M)
    return [S[i][i] for i in range(min(len(S), len(S[0]))) if S[i][i] != 0]


def is_direct_summand(generators: Iterable[Sequence[int]], d: int) -> bool:
    """True iff the subgroup of Z^d generated by ``generators`` is saturated."""
    rows = [tuple(int(x) for x in g) for g in generators]
    if any(len(r) != d for r in rows):
        raise ValueError("generator of wrong length")
    rows = [r for r in rows if any(r)]
    return all(e == 1 for e in elementary_divisors(rows))


def saturation_basis(rows: Sequence[Sequence[int]], n: int) -> tuple[Matrix, Matrix]:
    """Basis of (rational span of rows) intersected with Z^n.

    Returns ``(W, P)``: ``W`` has k rows forming a Z-basis of the saturated
    span, and ``P`` is an n x n unimodular matrix with ``x @ P`` giving the
    coordinates of ``x`` in ``W`` (first k entries) and zeros elsewhere for
    ``x`` in the span.
    """
    rows = [tuple(int(x) for x in r) for r in rows if any(r)]
    if not rows:
        return [], identity(n)
    S, _, V = snf(rows)
    k = sum(1 for i in range(min(len(S), n)) if S[i][i] != 0)
    Vinv = [tuple(int(x) for x in r) for r in inverse(V)]
    return Vinv[:k], [tuple(r) for r in V]


# ---------------------------------------------------------------------------
# lattices


class AffineLattice:
    """A translate ``shift + B Z^k`` of the lattice spanned by the columns of ``B``.

    ``basis`` is given as a list of basis vectors (the columns of ``B``) in
    ambient coordinates. Usually ``k`` equals the ambient dimension; lower
    rank lattices only arise as difference groups of lower-dimensional
    polytopes.
    """

    __slots__ = ("basis", "shift", "dim", "rank", "_inv", "_rows", "_canon")

    def __init__(self, basis: Iterable[Sequence], shift: Sequence | None = None, dim: int | None = None):
        vecs = tuple(rat_vector(v) for v in basis)
        if vecs:
            d = len(vecs[0])
        elif dim is not None:
            d = dim
        elif shift is not None:
            d = len(shift)
        else:
            raise ValueError("empty basis needs an explicit dimension")
        if any(len(v) != d for v in vecs):
            raise ValueError("basis vectors of unequal length")
        if vecs and rank(vecs) != len(vecs):
            raise ValueError("lattice basis is singular")
        self.basis = vecs
        self.dim = d
        self.rank = len(vecs)
        self.shift = rat_vector(shift) if shift is not None else (Fraction(0),) * d
        if len(self.shift) != d:
            raise ValueError("shift of wrong length")
        B = transpose(vecs)
        if self.rank == d:
            self._rows = None
            self._inv = inverse(B)
        elif not vecs:
            self._rows = []
            self._inv = []
        else:
            _, piv = rref(vecs)
            self._rows = piv
            self._inv = inverse([B[i] for i in piv])
        self._canon = None

    # constructors --------------------------------------------------------

    @classmethod
    def standard(cls, d: int) -> "AffineLattice":
        return cls(identity(d))

    @classmethod
    def half_integer(cls, d: int) -> "AffineLattice":
        """Z^d + Z(1/2, ..., 1/2)."""
        half = Fraction(1, 2)
        vecs = [tuple(int(i == j) for j in range(d)) for i in range(d - 1)]
        vecs.append((half,) * d)
        return cls(vecs)

    # coordinates ---------------------------------------------------------

    @property
    def is_linear(self) -> bool:
        return not any(self.shift)

    def matrix(self) -> Matrix:
        """The d x k matrix whose columns are the basis vectors."""
        return transpose(self.basis)

    def coordinates(self, x: Sequence) -> tuple | None:
        """Rational coordinates of ``x`` in the basis, None if off the span."""
        x = rat_vector(x)
        if len(x) != self.dim:
            raise ValueError("point of wrong dimension")
        v = sub(x, self.shift)
        if self._rows is None:
            return matvec(self._inv, v)
        if not self._rows:
            return () if not any(v) else None
        y = matvec(self._inv, [v[i] for i in self._rows])
        back = add(self.shift, tuple(sum(c * b[i] for c, b in zip(y, self.basis)) for i in range(self.dim)))
        return y if back == x else None

    def contains(self, x: Sequence) -> bool:
        y = self.coordinates(x)
        return y is not None and all(c.denominator == 1 for c in y)

    __contains__ = contains

    def to_lattice(self, x: Sequence) -> tuple:
        """Integer coordinates of a lattice point."""
        y = self.coordinates(x)
        if y is None or any(c.denominator != 1 for c in y):
            raise PointNotInLattice(f"{fmt_vec(x)} is not a lattice point")
        return tuple(c.numerator for c in y)

    def to_ambient(self, y: Sequence) -> tuple:
        """Ambient point with (possibly rational) lattice coordinates ``y``."""
        out = list(self.shift)
        for c, b in zip(y, self.basis):
            if c:
                for i in range(self.dim):
                    out[i] += c * b[i]
        return tuple(Fraction(v) for v in out)

    def linear_to_lattice(self, v: Sequence) -> tuple:
        """Rational lattice coordinates of a translation vector."""
        if self._rows is None:
            return matvec(self._inv, rat_vector(v))
        return matvec(self._inv, [Fraction(v[i]) for i in self._rows])

    def dual_to_ambient(self, a: Sequence) -> tuple:
        """Ambient linear form equal to ``a`` applied to lattice coordinates."""
        if self._rows is not None:
            raise ValueError("dual forms need a full-rank lattice")
        return tuple(sum(a[k] * self._inv[k][i] for k in range(self.rank)) for i in range(self.dim))

    # comparisons -----------------------------------------------------------

    def translation(self) -> "AffineLattice":
        return AffineLattice(self.basis, dim=self.dim)

    def canonical_basis(self) -> tuple:
        """Row HNF of the scaled basis: a canonical invariant of the lattice."""
        if self._canon is None:
            den = reduce(lcm, (x.denominator for v in self.basis for x in v), 1)
            H, _ = hnf([[int(x * den) for x in v] for v in self.basis]) if self.basis else ([], [])
            self._canon = (den, tuple(r for r in H if any(r)))
        return self._canon

    def determinant(self) -> Fraction:
        """Covolume; only defined for full-rank lattices."""
        if self.rank != self.dim:
            raise ValueError("determinant of a lower-rank lattice")
        return abs(det(self.matrix()))

    def contains_lattice(self, other: "AffineLattice") -> bool:
        if other.dim != self.dim:
            return False
        zero = self.translation()
        if not all(zero.contains(b) for b in other.basis):
            return False
        return self.contains(other.shift)

    def __eq__(self, other):
        if not isinstance(other, AffineLattice):
            return NotImplemented
        if self.dim != other.dim or self.rank != other.rank:
            return False
        da, Ha = self.canonical_basis()
        db, Hb = other.canonical_basis()
        if [tuple(Fraction(x, da) for x in r) for r in Ha] != [tuple(Fraction(x, db) for x in r) for r in Hb]:
            return False
        return self.contains(other.shift)

    def __hash__(self):
        d, H = self.canonical_basis()
        return hash((self.dim, tuple(tuple(Fraction(x, d) for x in r) for r in H)))

    def __repr__(self):
        b = ", ".join(fmt_vec(v) for v in self.basis)
        s = "" if self.is_linear else f", shift={fmt_vec(self.shift)}"
        return f"AffineLattice([{b}]{s})"


def lattice_index(sub_lattice: AffineLattice, super_lattice: AffineLattice) -> int:
    """Group index of ``sub_lattice`` in ``super_lattice`` (both through 0)."""
    if not (sub_lattice.is_linear and super_lattice.is_linear):
        raise ValueError("lattice_index needs lattices through the origin")
    if sub_lattice.rank != super_lattice.rank or not super_lattice.contains_lattice(sub_lattice):
        raise NotSublattice("first lattice is not a finite-index sublattice of the second")
    coords = [super_lattice.to_lattice(b) for b in sub_lattice.basis]
    out = 1
    for e in elementary_divisors(coords):
        out *= e
    return out


def fmt_scalar(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def fmt_vec(v: Sequence) -> str:
    return "(" + ",".join(fmt_scalar(x) for x in v) + ")"
