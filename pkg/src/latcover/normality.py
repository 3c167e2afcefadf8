"""Normality of lattice polytopes and one-point extension steps."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import exact
from .cones import RationalCone
from .errors import NotUnimodularPyramid
from .polytope import LatticePolytope, Simplex, convex_hull, dilate, is_unimodular_pyramid


@dataclass
class NormalityReport:
    is_normal: bool
    witness: tuple | None = None  # (c, point of cP with no c-term representation)
    checked_degree: int = 0
    missing: int = 0  # number of non-representable points at the failing degree
    diagnostics: list = field(default_factory=list)

    def __bool__(self):
        return self.is_normal


def sumset(level: Iterable[tuple], gens: Sequence[tuple]) -> set:
    """{a + g : a in level, g in gens} on integer tuples."""
    out = set()
    for a in level:
        for g in gens:
            out.add(tuple(x + y for x, y in zip(a, g)))
    return out


def degree_bound(P: LatticePolytope) -> int:
    return max(2, P.dim - 1)


def is_normal(P: LatticePolytope, max_degree: int | None = None) -> NormalityReport:
    """Check that lattice points of cP are sums of c lattice points of P.

    Degrees 2 .. max(2, dim P - 1) are checked; that suffices because the
    degree-1 points together with these generate the whole cone monoid
    (see :func:`hilbert_normality` for a check that does not rely on it).
    The witness, if any, is the smallest missing point in lattice order.
    """
    top = degree_bound(P) if max_degree is None else max_degree
    gens = P.lattice_points_lattice()
    level = set(gens)
    for c in range(2, top + 1):
        level = sumset(level, gens)
        target = dilate(P, c).lattice_points_lattice()
        missing = [y for y in target if y not in level]
        if missing:
            x = P.lattice.translation().to_ambient(missing[0])
            return NormalityReport(False, (c, x), c, len(missing))
    return NormalityReport(True, None, top)


def is_representable(x: Sequence[int], gens: Sequence[tuple], c: int) -> bool:
    """Exhaustive test whether lattice-coordinate x is a sum of c elements of gens."""
    x = tuple(x)
    if c == 0:
        return not any(x)
    if c == 1:
        return x in set(gens)
    level = {tuple(g) for g in gens}
    for _ in range(c - 2):
        level = sumset(level, gens)
    return any(tuple(a - b for a, b in zip(x, g)) in level for g in gens)


def check_witness(P: LatticePolytope, c: int, x: Sequence) -> bool:
    """Independent confirmation of a non-normality witness (ambient x)."""
    lin = P.lattice.translation()
    y = lin.coordinates(x)
    if y is None or any(v.denominator != 1 for v in y):
        return False
    y = tuple(int(v) for v in y)
    if not dilate(P, c).contains_lattice(y):
        return False
    return not is_representable(y, P.lattice_points_lattice(), c)


def hilbert_normality(P: LatticePolytope) -> NormalityReport:
    """Normality via the Hilbert basis of the cone over (P, 1).

    P is normal iff every Hilbert basis element has height 1.  The basis is
    computed from the parallelepipeds of a triangulation of P, without any
    degree bound.
    """
    pts = P.local_points()
    if P.dim == 0:
        return NormalityReport(True)
    gens = [z + (1,) for z in pts]
    cone = RationalCone(gens)
    hb = cone.hilbert_basis().elements
    high = sorted((h for h in hb if h[-1] != 1), key=lambda h: (h[-1], h))
    if high:
        h = high[0]
        c = h[-1]
        ys = tuple(c * o for o in P._origin)
        y = exact.add(ys, tuple(sum(h[j] * P._frame[j][i] for j in range(P.dim)) for i in range(P.ambient_dim)))
        return NormalityReport(False, (c, P.lattice.translation().to_ambient(y)), c, len(high))
    return NormalityReport(True, None, max(h[-1] for h in hb))


# ---------------------------------------------------------------------------
# elementary relations


def is_elementary_relation(Q: LatticePolytope, P: LatticePolytope) -> bool:
    """Q inside P with exactly one more lattice point in P."""
    if Q.lattice != P.lattice:
        return False
    if not all(P.contains(v) for v in Q.vertices):
        return False
    return P.n_lattice_points() == Q.n_lattice_points() + 1


def pyramid_cover_lift(Q_cover: Iterable[Simplex], P: LatticePolytope, apex: Sequence) -> list[Simplex]:
    """Cone every simplex of a cover of the base over the apex of a unimodular pyramid."""
    apex = exact.rat_vector(apex)
    rest = [v for v in P.vertices if v != apex]
    if len(rest) == len(P.vertices) or not rest:
        raise NotUnimodularPyramid("apex is not a vertex of P")
    Q = convex_hull(rest, P.lattice)
    if not is_unimodular_pyramid(P, Q):
        raise NotUnimodularPyramid("P is not a unimodular pyramid over the rest of its vertices")
    y = P.lattice.to_lattice(apex)
    out = []
    for s in Q_cover:
        lifted = Simplex.from_lattice(list(s.lattice_vertices) + [y], P.lattice)
        if not lifted.is_unimodular():
            raise NotUnimodularPyramid(f"lift of {s} is not unimodular")
        out.append(lifted)
    return out


def unit_segments(P: LatticePolytope) -> list[Simplex]:
    """Unimodular subdivision of a lattice segment (or a point)."""
    ys = P.lattice_points_lattice()
    if len(ys) == 1:
        return [Simplex.from_lattice(ys, P.lattice)]
    order = sorted(P.local_points())
    pts = [P.local_to_lattice(z) for z in order]
    return [Simplex.from_lattice([a, b], P.lattice) for a, b in zip(pts, pts[1:])]
