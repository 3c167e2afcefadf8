"""Pointed rational cones, Hilbert bases and unimodular Hilbert triangulations.

Cones are full-dimensional and live in integer lattice coordinates; the
attached lattice is only used to translate results back to ambient space.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

from . import exact
from .errors import DimensionError, NotAVertex, NotPointed, NotVeryAmple, SearchExhausted
from .exact import AffineLattice, dot, primitive, rank, sub
from .polytope import LatticePolytope, Simplex, placing


class RationalCone:
    """Pointed full-dimensional cone ``{x : s.x >= 0 for s in supports}``."""

    def __init__(self, generators: Iterable[Sequence[int]], lattice: AffineLattice | None = None):
        gens = sorted({primitive(tuple(int(c) for c in g)) for g in generators if any(g)})
        if not gens:
            raise DimensionError("cone without nonzero generators")
        n = len(gens[0])
        self.ambient_dim = n
        self.lattice = lattice.translation() if lattice is not None else AffineLattice.standard(n)
        if rank(gens) != n:
            raise DimensionError("only full-dimensional cones are supported")
        origin = (0,) * n
        pts = [origin] + gens
        _, boundary = placing(pts)
        supports = set()
        far = []
        for key, (a, b) in boundary.items():
            if b == 0:
                supports.add(tuple(-x for x in a))
            else:
                far.append(tuple(sorted(key)))
        if not supports or rank(list(supports)) != n:
            raise NotPointed("cone contains a line")
        self.supports = sorted(supports)
        self.rays = [g for g in gens if rank([s for s in self.supports if dot(s, g) == 0] or [(0,) * n]) == n - 1]
        if len(self.rays) != len(gens):
            pts = [origin] + self.rays
            _, boundary = placing(pts)
            far = [tuple(sorted(key)) for key, (a, b) in boundary.items() if b != 0]
        # far boundary simplices of conv(0, rays) cone over a triangulation of C
        self._fan = sorted(tuple(pts[i] for i in key) for key in far)
        self.grading = tuple(sum(s[j] for s in self.supports) for j in range(n))
        self._hilbert = None

    @classmethod
    def from_rays(cls, rays, lattice=None) -> "RationalCone":
        return cls(rays, lattice)

    @property
    def dim(self) -> int:
        return self.ambient_dim

    def contains(self, x: Sequence) -> bool:
        return all(dot(s, x) >= 0 for s in self.supports)

    __contains__ = contains

    def in_interior(self, x: Sequence) -> bool:
        return all(dot(s, x) > 0 for s in self.supports)

    def degree(self, x: Sequence):
        return dot(self.grading, x)

    def is_simplicial(self) -> bool:
        return len(self.rays) == self.ambient_dim

    def multiplicity(self) -> int:
        """|det| of the rays; for non-simplicial cones the normalized volume of conv(0, rays)."""
        if self.is_simplicial():
            return abs(exact.det_int(self.rays))
        return sum(abs(exact.det_int(t)) for t in self._fan)

    def simplicial_pieces(self) -> list[tuple]:
        """Simplicial cones (ray tuples) triangulating the cone, using its generators."""
        return list(self._fan)

    def hilbert_basis(self) -> "HilbertBasis":
        if self._hilbert is None:
            self._hilbert = HilbertBasis(compute_hilbert_basis(self), self)
        return self._hilbert

    def to_ambient(self, y: Sequence) -> tuple:
        return self.lattice.to_ambient(y)

    def __repr__(self):
        return f"RationalCone(rays={self.rays})"


def parallelepiped_points(rays: Sequence[Sequence[int]]) -> list[tuple]:
    """Lattice points of the half-open parallelepiped sum [0,1) r_i (simplicial rays).

    Coset representatives of Z^n modulo the ray lattice come from the Smith
    form; each is reduced into the parallelepiped.
    """
    n = len(rays)
    R = exact.transpose(rays)  # columns are rays
    S, U, _ = exact.snf(R)
    Uinv = exact.inverse(U)
    Rinv = exact.inverse(R)
    out = []
    for ks in product(*[range(S[i][i]) for i in range(n)]):
        x = exact.matvec(Uinv, ks)
        lam = exact.matvec(Rinv, x)
        frac = [c - (c.numerator // c.denominator) for c in lam]
        pt = tuple(int(sum(frac[j] * rays[j][i] for j in range(n))) for i in range(n))
        out.append(pt)
    return sorted(set(out))


def minimal_elements(cands: Iterable[tuple], cone: RationalCone) -> list[tuple]:
    """Elements of ``cands`` not of the form g + (nonzero cone point) for another g.

    Correct as a Hilbert basis filter whenever ``cands`` contains the Hilbert
    basis and lies in the monoid.
    """
    cands = sorted(set(c for c in cands if any(c)), key=lambda c: (cone.degree(c), c))
    keep = []
    for i, h in enumerate(cands):
        dh = cone.degree(h)
        reducible = False
        for g in cands[:i]:
            if cone.degree(g) >= dh:
                break
            if cone.contains(sub(h, g)):
                reducible = True
                break
        if not reducible:
            keep.append(h)
    return keep


def compute_hilbert_basis(cone: RationalCone) -> list[tuple]:
    cands = set(cone.rays)
    for piece in cone.simplicial_pieces():
        cands.update(p for p in parallelepiped_points(piece) if any(p))
    return sorted(minimal_elements(cands, cone), key=lambda c: (cone.degree(c), c))


@dataclass(frozen=True)
class HilbertBasis:
    elements: list
    cone: RationalCone = field(repr=False, compare=False)

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, x):
        return tuple(x) in set(self.elements)

    def is_irreducible(self, x: Sequence) -> bool:
        """Exhaustive two-term check against the other elements' downsets."""
        x = tuple(x)
        for g in self.elements:
            if g != x and self.cone.contains(sub(x, g)) and any(sub(x, g)):
                return False
        return True


def hilbert_basis(cone: RationalCone) -> HilbertBasis:
    return cone.hilbert_basis()


# ---------------------------------------------------------------------------
# corner cones and very ampleness


def _vertex_lattice(P: LatticePolytope, v: Sequence) -> tuple:
    if P.dim != P.ambient_dim:
        raise DimensionError("corner cones need a full-dimensional polytope")
    y = P.lattice.coordinates(v)
    if y is None or any(c.denominator != 1 for c in y):
        raise NotAVertex(f"{exact.fmt_vec(v)} is not a vertex")
    y = tuple(int(c) for c in y)
    if y not in set(P.local_vertices):
        raise NotAVertex(f"{exact.fmt_vec(v)} is not a vertex")
    return y


def corner_cone(P: LatticePolytope, v: Sequence) -> RationalCone:
    """The cone R_+(P - v) in lattice coordinates."""
    y = _vertex_lattice(P, v)
    gens = [sub(w, y) for w in P.local_vertices if w != y]
    return RationalCone(gens, P.lattice)


@dataclass
class VeryAmpleReport:
    is_very_ample: bool
    witness: tuple | None = None  # (vertex, hilbert element), ambient coordinates

    def __bool__(self):
        return self.is_very_ample


def is_very_ample(P: LatticePolytope) -> VeryAmpleReport:
    """Check Hilb(R_+(P - v)) inside P - v at every vertex v."""
    lin = P.lattice.translation()
    for y in sorted(P.local_vertices):
        cone = corner_cone(P, P.local_to_ambient(y))
        for h in cone.hilbert_basis():
            if not P.local_contains(exact.add(y, h)):
                return VeryAmpleReport(False, (P.local_to_ambient(y), lin.to_ambient(h)))
    return VeryAmpleReport(True)


# ---------------------------------------------------------------------------
# unimodular Hilbert triangulations of 3-cones


@dataclass
class SeboTriangulation:
    """Unimodular triangulation of a 3-cone with rays from its Hilbert basis.

    ``rays`` is the extended ray list (lattice coordinates) and ``cones`` are
    index triples into it.
    """

    cone: RationalCone
    rays: list
    cones: list

    def pieces(self) -> list[tuple]:
        return [tuple(self.rays[i] for i in t) for t in self.cones]

    def __len__(self):
        return len(self.cones)

    def check(self) -> list[str]:
        """Exact post-condition check; returns a list of violations (empty if fine)."""
        problems = []
        hb = set(self.cone.hilbert_basis().elements)
        for t in self.pieces():
            if abs(exact.det_int(t)) != 1:
                problems.append(f"piece {t} is not unimodular")
            if not set(t) <= hb:
                problems.append(f"piece {t} uses a ray outside the Hilbert basis")
        problems.extend(_fan_problems(self.cone, self.pieces()))
        return problems

    def locate(self, x: Sequence) -> list[int]:
        """Indices of pieces containing ``x``."""
        out = []
        for i, t in enumerate(self.pieces()):
            lam = exact.solve(exact.transpose(t), x)
            if lam is not None and all(c >= 0 for c in lam):
                out.append(i)
        return out


def _section_volume(cone: RationalCone, t: Sequence[tuple]) -> Fraction:
    w = cone.grading
    den = 1
    for r in t:
        den *= dot(w, r)
    return Fraction(abs(exact.det_int(t)), den)


def _fan_problems(cone: RationalCone, pieces: list[tuple]) -> list[str]:
    """Coverage and disjointness of simplicial 3-cones inside ``cone``.

    Coverage is checked by comparing the volumes of the sections at degree 1
    (times a constant); interiors are disjoint iff some facet plane of one
    of each pair separates them.
    """
    problems = []
    total = sum((_section_volume(cone, t) for t in cone.simplicial_pieces()), Fraction(0))
    got = sum((_section_volume(cone, t) for t in pieces), Fraction(0))
    for t in pieces:
        if not all(cone.contains(r) for r in t):
            problems.append(f"piece {t} leaves the cone")
    if got != total:
        problems.append(f"section volume {got} != {total}")

    def facet_forms(t):
        forms = []
        for i in range(3):
            others = [t[j] for j in range(3) if j != i]
            s = exact.cofactor_normal(others)
            if dot(s, t[i]) < 0:
                s = tuple(-c for c in s)
            forms.append(s)
        return forms

    forms = [facet_forms(t) for t in pieces]
    for i in range(len(pieces)):
        for j in range(i + 1, len(pieces)):
            sep = any(all(dot(s, r) <= 0 for r in pieces[j]) for s in forms[i]) or \
                any(all(dot(s, r) <= 0 for r in pieces[i]) for s in forms[j])
            if not sep:
                problems.append(f"pieces {pieces[i]} and {pieces[j]} overlap")
    return problems


def _coords(t: Sequence[tuple], x: Sequence) -> tuple | None:
    return exact.solve(exact.transpose(t), x)


def _stellar(tris: Sequence[tuple], h: tuple) -> list[tuple]:
    """Replace every piece containing h by the pieces obtained by swapping h in for a ray."""
    out = []
    for t in tris:
        lam = _coords(t, h)
        if lam is None or any(c < 0 for c in lam):
            out.append(t)
            continue
        for i in range(3):
            if lam[i] > 0:
                out.append(tuple(sorted(t[:i] + (h,) + t[i + 1:])))
    return out


def _flip(tris: Sequence[tuple], t: tuple, i: int) -> list[tuple] | None:
    """Swap the diagonal shared by t and its neighbour across the face opposite t[i]."""
    c = t[i]
    a, b = (t[j] for j in range(3) if j != i)
    nb = next((u for u in tris if u != t and a in u and b in u), None)
    if nb is None:
        return None
    d = next(r for r in nb if r != a and r != b)
    n = exact.cofactor_normal([c, d])
    if dot(n, a) * dot(n, b) >= 0:
        return None
    out = [u for u in tris if u != t and u != nb]
    out += [tuple(sorted((a, c, d))), tuple(sorted((b, c, d)))]
    return out


def sebo_triangulation(cone: RationalCone, max_nodes: int = 20000) -> SeboTriangulation:
    """Unimodular Hilbert triangulation of a pointed 3-cone.

    Best-first search from the cone's own triangulation.  Moves act on
    non-unimodular pieces: a stellar subdivision at a Hilbert basis element
    inside the piece, or a flip of one of its faces with the neighbouring
    piece.  States are ranked by total excess multiplicity, then size.
    """
    if cone.ambient_dim != 3:
        raise DimensionError("Sebo triangulation is implemented for 3-dimensional cones")
    hb = cone.hilbert_basis().elements

    def excess(tris):
        return sum(abs(exact.det_int(t)) - 1 for t in tris)

    start = tuple(sorted(tuple(sorted(t)) for t in cone.simplicial_pieces()))
    heap = [(excess(start), len(start), start)]
    seen = {start}
    result = None
    while heap and len(seen) <= max_nodes:
        bad_total, _, tris = heapq.heappop(heap)
        if bad_total == 0:
            result = tris
            break
        for t in tris:
            if abs(exact.det_int(t)) == 1:
                continue
            moves = []
            for h in hb:
                if h in t:
                    continue
                lam = _coords(t, h)
                if lam is not None and all(c >= 0 for c in lam):
                    moves.append(_stellar(tris, h))
            moves.extend(_flip(tris, t, i) for i in range(3))
            for m in moves:
                if m is None:
                    continue
                key = tuple(sorted(m))
                if key not in seen:
                    seen.add(key)
                    heapq.heappush(heap, (excess(key), len(key), key))
    if result is None:
        raise SearchExhausted("no unimodular Hilbert triangulation found within the search budget",
                              witness=cone.rays)
    rays = sorted({r for t in result for r in t})
    index = {r: i for i, r in enumerate(rays)}
    cones = sorted(tuple(sorted(index[r] for r in t)) for t in result)
    return SeboTriangulation(cone, rays, cones)


def vertex_cover_simplices(P: LatticePolytope, v: Sequence) -> list[Simplex]:
    """Unimodular simplices conv(v, v + Hilbert rays of each piece) around vertex v."""
    if P.ambient_dim != 3 or P.dim != 3:
        raise DimensionError("vertex covers are built for 3-polytopes")
    y = _vertex_lattice(P, v)
    cone = corner_cone(P, v)
    lin = P.lattice.translation()
    for h in cone.hilbert_basis():
        if not P.local_contains(exact.add(y, h)):
            raise NotVeryAmple(f"Hilbert basis element escapes P - v at {exact.fmt_vec(v)}",
                               witness=(P.local_to_ambient(y), lin.to_ambient(h)))
    tri = sebo_triangulation(cone)
    out = []
    for t in tri.pieces():
        out.append(Simplex.from_lattice([y] + [exact.add(y, r) for r in t], P.lattice))
    return out
