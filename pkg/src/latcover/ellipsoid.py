"""Ellipsoids, their lattice points, ellipsoidal sets and peeling.

Also builds the half-integer family B(d), P(d), Q(d) used to exhibit
non-normal lattice-point hulls of ellipsoids.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Iterable, Sequence

from . import exact
from .errors import (BOutOfRange, DimensionTooSmall, EmptyEllipsoid, NotExtremal, PreconditionUnmet,
                     SearchExhausted, VerificationFailed)
from .exact import AffineLattice, dot, rat_vector, sub
from .normality import NormalityReport, is_normal, is_representable
from .polytope import LatticePolytope, Simplex, convex_hull, gp

MAX_HALVINGS = 64


class Ellipsoid:
    """Solid {x : (x - c)^T A (x - c) <= 1}; the surface is the ``= 1`` locus."""

    __slots__ = ("A", "center", "dim")

    def __init__(self, A: Sequence[Sequence], center: Sequence):
        A = [rat_vector(r) for r in A]
        n = len(A)
        c = rat_vector(center)
        if len(c) != n or any(len(r) != n for r in A):
            raise ValueError("shape mismatch between form and center")
        if any(A[i][j] != A[j][i] for i in range(n) for j in range(i)):
            raise ValueError("quadratic form is not symmetric")
        for k in range(1, n + 1):
            if exact.det([r[:k] for r in A[:k]]) <= 0:
                raise ValueError("quadratic form is not positive definite")
        self.A = tuple(A)
        self.center = c
        self.dim = n

    @classmethod
    def ball(cls, center: Sequence, radius_squared) -> "Ellipsoid":
        c = rat_vector(center)
        r2 = Fraction(radius_squared)
        n = len(c)
        return cls([[1 / r2 if i == j else 0 for j in range(n)] for i in range(n)], c)

    def value(self, x: Sequence) -> Fraction:
        d = sub(rat_vector(x), self.center)
        return sum(d[i] * dot(self.A[i], d) for i in range(self.dim))

    def contains(self, x: Sequence) -> bool:
        return self.value(x) <= 1

    def on_surface(self, x: Sequence) -> bool:
        return self.value(x) == 1

    def scaled(self, factor) -> "Ellipsoid":
        """Homothety by ``factor`` about the center."""
        f2 = Fraction(factor) ** 2
        return Ellipsoid([[a / f2 for a in r] for r in self.A], self.center)

    def homothety(self, factor, about: Sequence) -> "Ellipsoid":
        p = rat_vector(about)
        f = Fraction(factor)
        c = tuple(pi + f * (ci - pi) for pi, ci in zip(p, self.center))
        return Ellipsoid([[a / (f * f) for a in r] for r in self.A], c)

    def translated(self, v: Sequence) -> "Ellipsoid":
        return Ellipsoid(self.A, exact.add(self.center, rat_vector(v)))

    def __eq__(self, other):
        return isinstance(other, Ellipsoid) and self.A == other.A and self.center == other.center

    def __hash__(self):
        return hash((self.A, self.center))

    def __repr__(self):
        return f"Ellipsoid(A={[list(map(exact.fmt_scalar, r)) for r in self.A]}, center={exact.fmt_vec(self.center)})"


def _ldl(G: Sequence[Sequence[Fraction]]) -> tuple[list[list[Fraction]], list[Fraction]]:
    """G = L D L^T with L unit lower triangular."""
    n = len(G)
    L = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    D = [Fraction(0)] * n
    for j in range(n):
        D[j] = G[j][j] - sum(L[j][k] ** 2 * D[k] for k in range(j))
        for i in range(j + 1, n):
            L[i][j] = (G[i][j] - sum(L[i][k] * L[j][k] * D[k] for k in range(j))) / D[j]
    return L, D


def _interval(m: Fraction, r: Fraction) -> tuple[int, int]:
    """Integers y with (y - m)^2 <= r, as an inclusive range (possibly empty)."""
    s = isqrt(r.numerator // r.denominator)  # floor(sqrt(r))
    hi = (m.numerator // m.denominator) + s + 2
    while (hi - m) ** 2 > r and hi > m - 1:
        hi -= 1
    lo = -((-m.numerator) // m.denominator) - s - 2
    while (lo - m) ** 2 > r and lo < m + 1:
        lo += 1
    return lo, hi


def _lattice_form(E: Ellipsoid, L: AffineLattice):
    """Gram matrix and center of E in lattice coordinates of L."""
    if L.rank != E.dim:
        raise ValueError("lattice must be full rank in the ellipsoid's space")
    B = L.matrix()  # columns are basis vectors
    Bt = exact.transpose(B)
    G = exact.matmul(exact.matmul(Bt, [list(r) for r in E.A]), B)
    yc = L.linear_to_lattice(sub(E.center, L.shift))
    return G, yc


def ellipsoid_lattice_points(E: Ellipsoid, L: AffineLattice | None = None, solid: bool = True) -> list[tuple]:
    """Lattice points of the solid ellipsoid (or of its surface), sorted, ambient coordinates.

    Works in lattice coordinates with an exact LDL^T decomposition of the
    Gram matrix and bounds one coordinate at a time from the last.
    """
    if L is None:
        L = AffineLattice.standard(E.dim)
    return sorted(L.to_ambient(y) for y in _enumerate_lattice(E, L, solid))


def _enumerate_lattice(E: Ellipsoid, L: AffineLattice, solid: bool = True) -> list[tuple]:
    G, yc = _lattice_form(E, L)
    Lm, D = _ldl(G)
    n = E.dim
    out = []
    y = [0] * n
    t = [Fraction(0)] * n  # t_i = (y - yc)_i

    def rec(i, budget):
        m = yc[i] - sum(Lm[j][i] * t[j] for j in range(i + 1, n))
        r = budget / D[i]
        lo, hi = _interval(m, r)
        for v in range(lo, hi + 1):
            u = v - m
            rest = budget - D[i] * u * u
            if rest < 0:
                continue
            y[i] = v
            t[i] = v - yc[i]
            if i == 0:
                if solid or rest == 0:
                    out.append(tuple(y))
            else:
                rec(i - 1, rest)

    if n == 0:
        return [()]
    rec(n - 1, Fraction(1))
    out.sort()
    return out


def bounding_box(E: Ellipsoid, L: AffineLattice) -> tuple[list[int], list[int]]:
    """Exact integer box in lattice coordinates containing all lattice points of E."""
    G, yc = _lattice_form(E, L)
    Ginv = exact.inverse(G)
    lo, hi = [], []
    for k in range(E.dim):
        a, b = _interval(yc[k], Ginv[k][k])
        lo.append(a)
        hi.append(b)
    return lo, hi


def hull_of_ellipsoid(E: Ellipsoid, L: AffineLattice | None = None) -> LatticePolytope:
    if L is None:
        L = AffineLattice.standard(E.dim)
    pts = ellipsoid_lattice_points(E, L)
    if not pts:
        raise EmptyEllipsoid("no lattice points in the ellipsoid")
    return convex_hull(pts, L)


# ---------------------------------------------------------------------------
# ellipsoidal sets


class EllipsoidalSet:
    """Lattice points cut out by a certificate ellipsoid; verified on construction."""

    def __init__(self, points: Iterable[Sequence], lattice: AffineLattice, certificate: Ellipsoid,
                 verify: bool = True):
        self.points = sorted(set(rat_vector(p) for p in points))
        self.lattice = lattice
        self.certificate = certificate
        if verify:
            got = ellipsoid_lattice_points(certificate, lattice)
            if got != self.points:
                extra = sorted(set(got) - set(self.points))
                lost = sorted(set(self.points) - set(got))
                raise VerificationFailed("certificate does not reproduce the point set",
                                         witness={"extra": extra, "missing": lost})

    @classmethod
    def from_ellipsoid(cls, E: Ellipsoid, L: AffineLattice | None = None) -> "EllipsoidalSet":
        if L is None:
            L = AffineLattice.standard(E.dim)
        return cls(ellipsoid_lattice_points(E, L), L, E, verify=False)

    @property
    def extremal_points(self) -> list[tuple]:
        return [p for p in self.points if self.certificate.on_surface(p)]

    def __len__(self):
        return len(self.points)

    def __contains__(self, x):
        return rat_vector(x) in set(self.points)

    def hull(self) -> LatticePolytope:
        return convex_hull(self.points, self.lattice)

    def __repr__(self):
        return f"EllipsoidalSet({len(self.points)} points)"


def _certifies(E: Ellipsoid, L: AffineLattice, points: list[tuple]) -> bool:
    return ellipsoid_lattice_points(E, L) == points


def find_extremal_point(S: EllipsoidalSet) -> tuple[tuple, EllipsoidalSet]:
    """An extremal point of S, contracting the certificate about its center if needed.

    The contraction factor is exact: the form is divided by its largest
    value on S, which puts the farthest points on the surface and keeps
    every other lattice point out.
    """
    if not S.points:
        raise PreconditionUnmet("empty ellipsoidal set")
    ext = S.extremal_points
    if ext:
        return ext[0], S
    E = S.certificate
    r = max(E.value(p) for p in S.points)
    if r > 0:
        E2 = Ellipsoid([[a / r for a in row] for row in E.A], E.center)
        S2 = EllipsoidalSet(S.points, S.lattice, E2)
        return S2.extremal_points[0], S2
    # a single point sitting at the center: shrink onto it from one side
    p = S.points[0]
    u = S.lattice.to_ambient(tuple(int(i == 0) for i in range(S.lattice.rank)))
    u = sub(u, S.lattice.shift)
    qu = E.value(exact.add(E.center, u))
    t = Fraction(1, 2)
    for _ in range(MAX_HALVINGS):
        E2 = Ellipsoid([[a / (t * t * qu) for a in row] for row in E.A], exact.add(p, exact.scale(t, u)))
        if _certifies(E2, S.lattice, S.points):
            return p, EllipsoidalSet(S.points, S.lattice, E2, verify=False)
        t /= 2
    raise SearchExhausted("could not place the singleton on a certificate surface")


def peel(S: EllipsoidalSet, v: Sequence) -> EllipsoidalSet:
    """Remove the extremal point v: widen about v, then slide away from v."""
    v = rat_vector(v)
    E = S.certificate
    if v not in set(S.points) or not E.on_surface(v):
        raise NotExtremal(f"{exact.fmt_vec(v)} is not on the certificate surface", witness=v)
    L = S.lattice
    eps = Fraction(1, 2)
    for _ in range(MAX_HALVINGS):
        E1 = E.homothety(1 + eps, v)
        got = ellipsoid_lattice_points(E1, L)
        if got == S.points and [p for p in got if E1.on_surface(p)] == [v]:
            break
        eps /= 2
    else:
        raise SearchExhausted("no widening factor isolates the extremal point", witness=v)
    rest = [p for p in S.points if p != v]
    direction = sub(E1.center, v)
    delta = Fraction(1, 2)
    for _ in range(MAX_HALVINGS):
        E2 = E1.translated(exact.scale(delta, direction))
        if _certifies(E2, L, rest):
            return EllipsoidalSet(rest, L, E2, verify=False)
        delta /= 2
    raise SearchExhausted("no translation drops the extremal point", witness=v)


def descent_chain(S: EllipsoidalSet) -> list[EllipsoidalSet]:
    """S = E_k, E_{k-1}, ..., E_1 with one point peeled at each step."""
    chain = []
    cur = S
    while True:
        v, cur = find_extremal_point(cur)
        chain.append(cur)
        if len(cur) == 1:
            return chain
        cur = peel(cur, v)


def chain_removed_points(chain: Sequence[EllipsoidalSet]) -> list[tuple]:
    """Point removed between consecutive chain members."""
    return [next(iter(set(a.points) - set(b.points))) for a, b in zip(chain, chain[1:])]


# ---------------------------------------------------------------------------
# stacking


def stack(S: EllipsoidalSet, b) -> EllipsoidalSet:
    """S x {0, 1} in one more dimension, certified by an ellipsoid centered at height 1/2.

    The first d coordinates get the form A / a^2 with a^2 = 4b^2/(4b^2 - 1)
    and the last one the weight 1/b^2.  Slicing at heights 0 and 1 gives
    back exactly the original solid, and heights -1, 2 are outside when
    b < 3/2, so no normalization of S's certificate is needed.
    """
    b = Fraction(b)
    if not (Fraction(1, 2) < b < Fraction(3, 2)):
        raise BOutOfRange(f"b = {b} must satisfy 1/2 < b < 3/2")
    a2 = 4 * b * b / (4 * b * b - 1)
    E = S.certificate
    n = E.dim
    A = [[E.A[i][j] / a2 for j in range(n)] + [Fraction(0)] for i in range(n)]
    A.append([Fraction(0)] * n + [1 / (b * b)])
    center = E.center + (Fraction(1, 2),)
    L = S.lattice
    basis = [tuple(v) + (0,) for v in L.basis]
    basis.append(tuple([0] * n + [1]))
    L2 = AffineLattice(basis, tuple(L.shift) + (0,))
    pts = [p + (Fraction(0),) for p in S.points] + [p + (Fraction(1),) for p in S.points]
    return EllipsoidalSet(pts, L2, Ellipsoid(A, center))


def stack_axis_squares(b) -> tuple[Fraction, Fraction]:
    """(a^2, b^2) of the stacking ellipsoid."""
    b = Fraction(b)
    return 4 * b * b / (4 * b * b - 1), b * b


# ---------------------------------------------------------------------------
# the half-integer family


def ones(d: int) -> tuple:
    return tuple(Fraction(1) for _ in range(d))


def half(d: int) -> tuple:
    return tuple(Fraction(1, 2) for _ in range(d))


def ball_b(d: int) -> Ellipsoid:
    """Circumscribed ball of [0,1]^d: radius^2 = d/4 about (1/2, ..., 1/2)."""
    return Ellipsoid.ball(half(d), Fraction(d, 4))


def delta_vertices(d: int) -> list[tuple]:
    """All-ones vector with one coordinate zeroed, for each coordinate."""
    return sorted(tuple(Fraction(int(j != i)) for j in range(d)) for i in range(d))


def barycenter_beta(d: int) -> tuple:
    return tuple(Fraction(d - 1, d) for _ in range(d))


def corner_inequality_solutions(d: int) -> list[tuple]:
    """Integer a with sum a_i^2 <= d/4 and sum a_i >= d/2 - 1 (exhaustive)."""
    r = isqrt(d // 4) if d >= 4 else 0
    out = []
    for a in itertools.product(range(-r, r + 1), repeat=d):
        if 4 * sum(x * x for x in a) <= d and 2 * sum(a) >= d - 2:
            out.append(a)
    return out


def interior_vertex_sums(d: int, c: int) -> list[tuple]:
    """Multiplicity vectors of c-fold vertex sums of a (d-1)-simplex that are interior to its c-th dilate."""
    out = []
    for combo in itertools.combinations_with_replacement(range(d), c):
        m = [combo.count(i) for i in range(d)]
        if all(m):
            out.append(tuple(m))
    return out


@dataclass
class QdFamily:
    d: int
    lattice: AffineLattice
    ball: Ellipsoid
    P_points: list
    Q_points: list
    delta: Simplex
    beta: tuple
    corner_check: dict = field(default_factory=dict)

    @functools.cached_property
    def P(self) -> LatticePolytope:
        return convex_hull(self.P_points, self.lattice)

    @functools.cached_property
    def Q(self) -> LatticePolytope:
        return convex_hull(self.Q_points, self.lattice)

    @property
    def B(self) -> Ellipsoid:
        return self.ball

    def q_set(self) -> EllipsoidalSet:
        """Q(d) lattice points as a certified ellipsoidal set (peel the all-ones point)."""
        S = EllipsoidalSet(self.P_points, self.lattice, self.ball, verify=False)
        return peel(S, ones(self.d))

    def ray_points(self) -> dict:
        """{k: is (1/2,...,1/2) + k e_1 a lattice point of P(d)} over a window around 0.

        The point set is symmetric under coordinate permutations, so e_1 stands for every e_i.
        """
        have = set(self.P_points)
        h = half(self.d)
        out = {}
        for k in range(-3, 4):
            x = (h[0] + k,) + h[1:]
            out[k] = x in have
        return out


def check_corner_facet(d: int, Q_points: Sequence[tuple], lattice: AffineLattice) -> dict:
    """Exact certificate that the deleted-coordinate simplex is an empty facet of Q(d).

    The coordinate sum is at most d - 1 on Q(d) and attains it exactly at
    the d simplex vertices, which are affinely independent; so they span a
    facet.  Emptiness is checked by enumerating the simplex's lattice points.
    """
    verts = delta_vertices(d)
    top = Fraction(d - 1)
    sums = {p: sum(p) for p in Q_points}
    tight = sorted(p for p, s in sums.items() if s == top)
    bounded = all(s <= top for s in sums.values())
    simplex = convex_hull(verts, lattice)
    inside = simplex.lattice_points()
    return {
        "bounded_by_sum": bounded,
        "tight_points": tight,
        "is_facet": bounded and tight == verts and simplex.dim == d - 1,
        "lattice_points": inside,
        "empty": inside == verts,
        "inequality_solutions": corner_inequality_solutions(d),
    }


def build_qd_family(d: int) -> QdFamily:
    if d < 5:
        raise DimensionTooSmall(f"the family needs d >= 5, got {d}")
    lat = AffineLattice.half_integer(d)
    B = ball_b(d)
    P_points = ellipsoid_lattice_points(B, lat)
    top = ones(d)
    Q_points = [p for p in P_points if p != top]
    delta = Simplex(delta_vertices(d), lat)
    fam = QdFamily(d, lat, B, P_points, Q_points, delta, barycenter_beta(d))
    fam.corner_check = check_corner_facet(d, Q_points, lat)
    chk = fam.corner_check
    if not (chk["is_facet"] and chk["empty"] and not chk["inequality_solutions"]):
        raise VerificationFailed("corner facet check failed", witness=chk)
    return fam


@dataclass
class CounterexampleReport:
    d: int
    target: tuple
    n_points: int
    target_in_lattice: bool
    target_in_dilate: bool
    representable: bool
    gp_equals_lattice: bool
    normality: NormalityReport
    interior_sums_below_d: list

    @property
    def ok(self) -> bool:
        return (self.target_in_lattice and self.target_in_dilate and not self.representable
                and self.gp_equals_lattice and not self.normality.is_normal)


def verify_counterexample(d: int, family: QdFamily | None = None) -> CounterexampleReport:
    """Check that Q(d) is a non-normal lattice polytope with gp(Q(d)) = Lambda(d), d even."""
    if d < 6 or d % 2:
        raise DimensionTooSmall("the counterexample needs an even d >= 6")
    fam = family or build_qd_family(d)
    c = d // 2
    Q = fam.Q
    L = fam.lattice
    target = tuple(c * x for x in fam.beta)
    in_lattice = L.contains(target)
    in_dilate = Q.contains(fam.beta)
    gens = Q.lattice_points_lattice()
    representable = in_lattice and is_representable(L.to_lattice(target), gens, c)
    gp_eq = gp(Q) == L
    report = is_normal(Q)
    return CounterexampleReport(d, target, len(gens), in_lattice, in_dilate, representable, gp_eq, report,
                                [m for k in range(1, d) for m in interior_vertex_sums(d, k)])


def lattice_isomorphism_to_standard(L: AffineLattice) -> list[list[Fraction]]:
    """Matrix T with T L = Z^d, i.e. the inverse of the basis matrix."""
    if any(L.shift):
        raise ValueError("lattice must be linear")
    return exact.inverse(L.matrix())


def transform_polytope(P: LatticePolytope, T: Sequence[Sequence]) -> LatticePolytope:
    """Image T(P) over the image lattice (Z^d when T comes from :func:`lattice_isomorphism_to_standard`)."""
    image = [exact.matvec(T, v) for v in P.vertices]
    cols = exact.transpose(P.lattice.matrix())
    L2 = AffineLattice([exact.matvec(T, c) for c in cols], exact.matvec(T, P.lattice.shift))
    if L2 == AffineLattice.standard(P.ambient_dim):
        L2 = AffineLattice.standard(P.ambient_dim)
    return convex_hull(image, L2)


def lift_witness(stacked: EllipsoidalSet, c: int, x: Sequence) -> dict:
    """Carry a non-normality witness (c, x) of conv(S) to (c, (x, 0)) for conv(S x {0,1}).

    Checks exactly that (x, 0) lies in the c-th dilate of the stacked hull
    and has no c-term representation by stacked points.
    """
    H = stacked.hull()
    lifted = tuple(rat_vector(x)) + (Fraction(0),)
    in_lattice = stacked.lattice.contains(lifted)
    in_dilate = H.contains(tuple(t / c for t in lifted))
    representable = in_lattice and is_representable(stacked.lattice.to_lattice(lifted),
                                                    H.lattice_points_lattice(), c)
    return {"c": c, "point": lifted, "in_lattice": in_lattice, "in_dilate": in_dilate,
            "representable": representable, "hull_points": H.n_lattice_points(),
            "propagates": in_lattice and in_dilate and not representable}
