"""Unimodular covers of lattice polytopes and an exact cover verifier.

Everything here works in lattice coordinates of the target polytope, which
must be full-dimensional.  Covers are plain lists of :class:`Simplex`; they
may overlap.
"""

from __future__ import annotations

import itertools
import os
from functools import reduce
from math import gcd, lcm
from operator import mul
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import exact
from .cones import is_very_ample, vertex_cover_simplices
from .ellipsoid import Ellipsoid, EllipsoidalSet, descent_chain, ellipsoid_lattice_points
from .errors import (CenterNotHalfIntegral, ChainStepNotNormal, DimensionError, NotVeryAmple,
                     PointNotOnBoundary, PointOutsidePolytope, PreconditionUnmet, TooManyCells,
                     VerificationFailed)
from .exact import AffineLattice, dot, rat_vector, sub
from .normality import is_normal, pyramid_cover_lift, unit_segments
from .polytope import FaceHandle, LatticePolytope, Simplex, convex_hull, convex_hull_lattice

CELL_CAP_ENV = "LATCOVER_CELL_CAP"
DEFAULT_CELL_CAP = 10 ** 6
NEIGHBORHOOD_FACTOR = Fraction(1, 16)  # sample region x + (P - x)/16, i.e. weight 15/16 on x
MAX_ROUNDS = 32
SYMMETRIC_ROUNDS = 2000  # each round adds a new tetrahedron; a safety stop only


def cell_cap() -> int:
    raw = os.environ.get(CELL_CAP_ENV)
    return int(raw) if raw else DEFAULT_CELL_CAP


@dataclass
class UnimodularCover:
    target: LatticePolytope
    simplices: list
    scope: str = "full"  # or "boundary-neighborhood"
    verified: bool = False
    diagnostics: list = field(default_factory=list)

    def __len__(self):
        return len(self.simplices)


@dataclass
class CoverVerdict:
    covered: bool | None  # None means unresolved
    witness: tuple | None = None
    method: str = "arrangement"
    cells: int = 0

    @property
    def status(self) -> str:
        return {True: "covered", False: "uncovered", None: "unresolved"}[self.covered]

    def __bool__(self):
        return bool(self.covered)


# ---------------------------------------------------------------------------
# 2D and lower: unimodular triangulations


def _orient(a, b, c) -> int:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _insert_point(tris: list[tuple], p: tuple) -> list[tuple]:
    out = []
    for t in tris:
        a, b, c = t
        s = (_orient(b, c, p), _orient(c, a, p), _orient(a, b, p))
        area = _orient(a, b, c)
        if area < 0:
            s = tuple(-x for x in s)
        if min(s) < 0:
            out.append(t)
            continue
        zeros = [i for i in range(3) if s[i] == 0]
        if not zeros:
            out.extend([(p, b, c), (a, p, c), (a, b, p)])
        else:
            i = zeros[0]  # p lies on the edge opposite t[i]
            e = [t[j] for j in range(3) if j != i]
            out.extend([(t[i], e[0], p), (t[i], p, e[1])])
    return out


def facet_triangulation(F: LatticePolytope) -> list[Simplex]:
    """Triangulation of a lattice polygon using every lattice point (hence unimodular).

    Segments are cut at their lattice points and points come back as is.
    """
    if F.dim > 2:
        raise DimensionError("facet triangulation expects a polygon")
    if F.dim < 2:
        return unit_segments(F)
    tris = [tuple(t) for t in F.triangulation()]
    used = {z for t in tris for z in t}
    for p in F.local_points():
        if p not in used:
            tris = _insert_point(tris, p)
    return sorted(Simplex.from_lattice([F.local_to_lattice(z) for z in t], F.lattice) for t in tris)


def _face_cover(face: LatticePolytope) -> list[Simplex]:
    return facet_triangulation(face) if face.dim <= 2 else []


# ---------------------------------------------------------------------------
# neighbourhood constructions


def _require_3d(P: LatticePolytope):
    if P.ambient_dim != 3 or P.dim != 3 or P.lattice.rank != 3:
        raise DimensionError("this construction is for full-dimensional 3-polytopes")


def _joins(P: LatticePolytope, face: FaceHandle, T_v: list[Simplex]) -> list[Simplex]:
    """conv(T_v/F, T_F) for one face F and a vertex cover T_v at a vertex of F."""
    Fpoly = face.polytope_of()
    T_F = _face_cover(Fpoly) if face.dim > 0 else [Simplex.from_lattice(Fpoly.vertices_lattice, P.lattice)]
    out = []
    for s in T_v:
        inside = [y for y in s.lattice_vertices if Fpoly.contains_lattice(y)]
        if len(inside) != face.dim + 1:
            continue
        opposite = [y for y in s.lattice_vertices if y not in inside]
        for t in T_F:
            j = Simplex.from_lattice(list(opposite) + list(t.lattice_vertices), P.lattice)
            if not j.is_unimodular():
                raise VerificationFailed(f"join {j} is not unimodular", witness=j.vertices)
            out.append(j)
    return out


def join_cover(x: Sequence, P: LatticePolytope) -> list[Simplex]:
    """Unimodular simplices covering a neighbourhood in P of a boundary point x."""
    _require_3d(P)
    F = P.minimal_face_containing(x)
    if F.dim == P.dim:
        raise PointNotOnBoundary(f"{exact.fmt_vec(x)} is interior", witness=rat_vector(x))
    v = F.vertices[0]
    T_v = vertex_cover_simplices(P, v)
    return sorted(set(_joins(P, F, T_v)))


def boundary_cover(P: LatticePolytope) -> UnimodularCover:
    """Vertex neighbourhoods plus joins over every edge and facet.

    Joins are taken at every vertex of each face; one vertex per face would
    already give a neighbourhood, the others only enlarge it.
    """
    _require_3d(P)
    rep = is_very_ample(P)
    if not rep.is_very_ample:
        raise NotVeryAmple("P is not very ample", witness=rep.witness)
    covers = {v: vertex_cover_simplices(P, v) for v in P.vertices}
    out = set()
    for T in covers.values():
        out.update(T)
    faces = P.faces()
    for k in (1, 2):
        for F in faces.get(k, []):
            for v in F.vertices:
                out.update(_joins(P, F, covers[v]))
    return UnimodularCover(P, sorted(out), "boundary-neighborhood")


# ---------------------------------------------------------------------------
# verification


def _idot(a, u) -> int:
    return sum(map(mul, a, u))


def _int_plane(a, b) -> tuple[tuple, int]:
    """Scale a rational inequality a.y <= b to integer coefficients."""
    den = reduce(lcm, (Fraction(x).denominator for x in tuple(a) + (b,)), 1)
    return tuple(int(Fraction(x) * den) for x in a), int(Fraction(b) * den)


def _homogeneous(p) -> tuple[tuple, int]:
    """Rational point as (integer numerators, common positive denominator)."""
    den = reduce(lcm, (Fraction(x).denominator for x in p), 1)
    return tuple(int(Fraction(x) * den) for x in p), den


class _Region:
    """Full-dimensional polytope: integer inequalities plus homogeneous vertices."""

    __slots__ = ("H", "V", "_tight")

    def __init__(self, H, V):
        self.H = H
        self.V = V
        self._tight = None

    @classmethod
    def from_rational(cls, H, V) -> "_Region":
        return cls([_int_plane(a, b) for a, b in H], [_homogeneous(p) for p in V])

    def tight(self):
        if self._tight is None:
            self._tight = [frozenset(i for i, (a, b) in enumerate(self.H) if _idot(a, U) == b * d)
                           for U, d in self.V]
        return self._tight

    def centroid(self) -> tuple:
        n = len(self.V)
        return tuple(sum(Fraction(U[i], d) for U, d in self.V) / n for i in range(len(self.V[0][0])))


def _split(R: _Region, a, b) -> tuple[_Region, _Region]:
    n = len(a)
    s = [_idot(a, U) - b * d for U, d in R.V]
    tight = R.tight()
    neg = [i for i, x in enumerate(s) if x < 0]
    pos = [i for i, x in enumerate(s) if x > 0]
    zero = [R.V[i] for i, x in enumerate(s) if x == 0]
    cuts = []
    for i in neg:
        for j in pos:
            common = tight[i] & tight[j]
            if len(common) >= n - 1 and exact.rank([R.H[k][0] for k in common]) == n - 1:
                (U, du), (W, dw) = R.V[i], R.V[j]
                su, sw = s[i], s[j]
                num = tuple(sw * x - su * y for x, y in zip(U, W))
                den = sw * du - su * dw
                g = gcd(den, *num)
                cuts.append((tuple(x // g for x in num), den // g))
    lower = _Region(R.H + [(a, b)], [R.V[i] for i in neg] + zero + cuts)
    upper = _Region(R.H + [(tuple(-c for c in a), -b)], [R.V[i] for i in pos] + zero + cuts)
    return lower, upper


class _Cell:
    """A cover simplex as integer inequalities plus its vertices (lattice coordinates)."""

    __slots__ = ("H", "V", "source")

    def __init__(self, ys: Sequence[tuple], source=None):
        ys = [tuple(int(c) for c in y) for y in ys]
        H = []
        for i in range(len(ys)):
            others = [ys[j] for j in range(len(ys)) if j != i]
            a = exact.cofactor_normal([sub(o, others[0]) for o in others[1:]]) if len(others) > 1 else (1,)
            b = _idot(a, others[0])
            if _idot(a, ys[i]) > b:
                a, b = tuple(-c for c in a), -b
            H.append((a, b))
        self.H = H
        self.V = ys
        self.source = source

    def contains(self, p) -> bool:
        return all(dot(a, p) <= b for a, b in self.H)

    def contains_h(self, U, d) -> bool:
        return all(_idot(a, U) <= b * d for a, b in self.H)


def _separated_by_cell(R: _Region, c: _Cell) -> bool:
    return any(all(_idot(a, U) >= b * d for U, d in R.V) for a, b in c.H)


def _separated_by_plane(a, b, c: _Cell) -> bool:
    return all(_idot(a, v) >= b for v in c.V)


def _inside(R: _Region, c: _Cell) -> bool:
    return all(c.contains_h(U, d) for U, d in R.V)


def _cutting_plane(R: _Region, cells: Sequence[_Cell]):
    for c in cells:
        for a, b in c.H:
            lo = hi = False
            for U, d in R.V:
                v = _idot(a, U) - b * d
                if v < 0:
                    lo = True
                elif v > 0:
                    hi = True
                if lo and hi:
                    return a, b
    return None


def _live_cells(R: _Region, cells: Sequence[_Cell]) -> list[_Cell]:
    return [c for c in cells if not any(_separated_by_plane(a, b, c) for a, b in R.H)
            and not _separated_by_cell(R, c)]


def _verify_region(R: _Region, cells: Sequence[_Cell], cap: int) -> CoverVerdict:
    stack = [(R, _live_cells(R, cells))]
    count = 0
    while stack:
        R, S = stack.pop()
        count += 1
        if count > cap:
            raise TooManyCells(f"more than {cap} cells", witness=count)
        if any(_inside(R, c) for c in S):
            continue
        plane = _cutting_plane(R, S)
        if plane is None:
            return CoverVerdict(False, R.centroid(), "arrangement", count)
        for child in _split(R, *plane):
            a, b = child.H[-1]
            live = [c for c in S if not _separated_by_plane(a, b, c) and not _separated_by_cell(child, c)]
            stack.append((child, live))
    return CoverVerdict(True, None, "arrangement", count)


def _subdivide_region(simplex: list[tuple], cells: Sequence[_Cell], depth: int) -> CoverVerdict:
    pending = [(simplex, 0)]
    count = 0
    unresolved = False
    n = len(simplex[0])
    while pending:
        s, level = pending.pop()
        count += 1
        V = [_homogeneous(p) for p in s]
        R = _Region([], V)
        live = [c for c in cells if not _separated_by_cell(R, c)]
        if any(_inside(R, c) for c in live):
            continue
        mid = R.centroid()
        for p in [mid] + list(s):
            if not any(c.contains(p) for c in live):
                return CoverVerdict(False, p, "subdivision", count)
        if level >= depth:
            unresolved = True
            continue
        # bisect the longest edge
        i, j = max(itertools.combinations(range(len(s)), 2),
                   key=lambda e: (sum((s[e[0]][k] - s[e[1]][k]) ** 2 for k in range(n)), e))
        m = tuple((s[i][k] + s[j][k]) / 2 for k in range(n))
        pending.append(([m if t == i else p for t, p in enumerate(s)], level + 1))
        pending.append(([m if t == j else p for t, p in enumerate(s)], level + 1))
    return CoverVerdict(None if unresolved else True, None, "subdivision", count)


def _check_inputs(P: LatticePolytope, simplices: Iterable[Simplex]) -> list[_Cell]:
    n = P.ambient_dim
    if P.dim != n or P.lattice.rank != n:
        raise DimensionError("cover verification needs a full-dimensional target")
    cells = []
    for s in simplices:
        if s.dim != n:
            raise DimensionError(f"{s} is not full-dimensional")
        if s.lattice != P.lattice:
            raise ValueError("simplex and target use different lattices")
        for y in s.lattice_vertices:
            if not P.contains_lattice(y):
                raise PointOutsidePolytope(f"vertex of {s} lies outside the target",
                                           witness=P.lattice.to_ambient(y))
        cells.append(_Cell(s.lattice_vertices, s))
    return cells


def _target_region(P: LatticePolytope) -> _Region:
    return _Region.from_rational(P.local_facets, P.local_vertices)


def verify_cover(P: LatticePolytope, simplices: Iterable[Simplex], method: str = "arrangement",
                 depth: int = 12) -> CoverVerdict:
    """Exact decision whether the simplices cover P.

    ``arrangement`` cuts P lazily by simplex facet planes until every piece
    lies inside some simplex or misses all of them; a missed piece's
    centroid is the witness.  ``subdivision`` bisects a triangulation of P
    up to ``depth`` levels and may answer unresolved.
    """
    cells = _check_inputs(P, simplices)
    if method == "arrangement":
        v = _verify_region(_target_region(P), cells, cell_cap())
    elif method == "subdivision":
        total = 0
        v = CoverVerdict(True, None, "subdivision")
        for t in P.triangulation():
            r = _subdivide_region([tuple(Fraction(c) for c in z) for z in t], cells, depth)
            total += r.cells
            if r.covered is False:
                v = r
                break
            if r.covered is None:
                v = CoverVerdict(None, None, "subdivision")
        v.cells = total
    else:
        raise ValueError(f"unknown verification method {method!r}")
    if v.witness is not None:
        v.witness = P.lattice.to_ambient(v.witness)
    return v


def homothety_region(P: LatticePolytope, x: Sequence, factor=NEIGHBORHOOD_FACTOR) -> _Region:
    y = P.lattice.coordinates(x)
    f = Fraction(factor)
    V = [tuple(yi + f * (vi - yi) for yi, vi in zip(y, v)) for v in P.local_vertices]
    H = [(a, dot(a, y) + f * (b - dot(a, y))) for a, b in P.local_facets]
    return _Region.from_rational(H, V)


def verify_neighborhood(P: LatticePolytope, simplices: Iterable[Simplex], x: Sequence,
                        factor=NEIGHBORHOOD_FACTOR) -> CoverVerdict:
    """Is x + factor (P - x) covered by the simplices?"""
    cells = _check_inputs(P, simplices)
    v = _verify_region(homothety_region(P, x, factor), cells, cell_cap())
    if v.witness is not None:
        v.witness = P.lattice.to_ambient(v.witness)
    return v


def boundary_samples(P: LatticePolytope) -> list[tuple]:
    """Vertices, edge midpoints and facet vertex-centroids, sorted."""
    out = set(P.vertices)
    faces = P.faces()
    for k in (1, 2):
        for F in faces.get(k, []):
            vs = F.vertices
            out.add(tuple(sum(v[i] for v in vs) / len(vs) for i in range(P.ambient_dim)))
    return sorted(out)


def verify_boundary_neighborhood(cover: UnimodularCover, factor=NEIGHBORHOOD_FACTOR) -> CoverVerdict:
    cells = 0
    for x in boundary_samples(cover.target):
        v = verify_neighborhood(cover.target, cover.simplices, x, factor)
        cells += v.cells
        if not v.covered:
            return v
    return CoverVerdict(True, None, "arrangement", cells)


# ---------------------------------------------------------------------------
# repairs


def unimodular_tetrahedra_through(P: LatticePolytope, w: Sequence, limit: int | None = 14) -> list[Simplex]:
    """Unimodular simplices with vertices among the `limit` lattice points of P nearest to w
    (all of them if limit is None), containing w."""
    y = P.lattice.coordinates(w)
    n = P.ambient_dim
    pts = sorted(P.local_points(), key=lambda p: (sum((p[i] - y[i]) ** 2 for i in range(n)), p))[:limit]
    out = []
    for combo in itertools.combinations(pts, n + 1):
        edges = [sub(q, combo[0]) for q in combo[1:]]
        if abs(exact.det_int(edges)) != 1:
            continue
        c = _Cell(combo)
        if c.contains(y):
            out.append(Simplex.from_lattice(combo, P.lattice))
    return out


def _repair(P: LatticePolytope, simplices: list[Simplex], diagnostics: list,
            rounds: int = MAX_ROUNDS) -> tuple[list[Simplex], CoverVerdict]:
    verdict = verify_cover(P, simplices)
    for _ in range(rounds):
        if verdict.covered:
            break
        extra = (unimodular_tetrahedra_through(P, verdict.witness)
                 or unimodular_tetrahedra_through(P, verdict.witness, limit=None))
        if not extra:
            break
        diagnostics.append(f"repair at {exact.fmt_vec(verdict.witness)}: added {exact.fmt_vec(extra[0].vertices[0])}...")
        simplices = simplices + [extra[0]]
        verdict = verify_cover(P, simplices)
    return simplices, verdict


def prune_cover(P: LatticePolytope, simplices: Sequence[Simplex]) -> list[Simplex]:
    """Drop simplices lying in the union of the others (exact, greedy from the back)."""
    keep = list(dict.fromkeys(simplices))
    i = len(keep) - 1
    while i >= 0:
        s = keep[i]
        others = [_Cell(t.lattice_vertices) for j, t in enumerate(keep) if j != i]
        c = _Cell(s.lattice_vertices)
        R = _Region(c.H, [(y, 1) for y in c.V])
        if others and _verify_region(R, others, cell_cap()).covered:
            del keep[i]
        i -= 1
    return keep


# ---------------------------------------------------------------------------
# covers of lattice-point hulls of 3-dimensional ellipsoids


def _chain_polytopes(E: Ellipsoid, lattice: AffineLattice) -> list[tuple[LatticePolytope, tuple | None]]:
    chain = descent_chain(EllipsoidalSet.from_ellipsoid(E, lattice))
    chain.reverse()  # E_1 ⊂ E_2 ⊂ ...
    out = [(convex_hull(chain[0].points, lattice), None)]
    for prev, cur in zip(chain, chain[1:]):
        new = (set(cur.points) - set(prev.points)).pop()
        out.append((convex_hull(cur.points, lattice), new))
    return out


def ellipsoid_cover_3d(E: Ellipsoid, lattice: AffineLattice | None = None, prune: bool = True) -> UnimodularCover:
    """Unimodular cover of conv(E ∩ lattice) built along a one-point-at-a-time chain.

    Each chain polytope must be normal.  Lower-dimensional steps lift the
    previous cover to a pyramid; full-dimensional steps add the boundary
    cover of the larger polytope minus simplices already inside the smaller
    one.  The result is checked with :func:`verify_cover`, then simplices
    lying in the union of the others are dropped.
    """
    if E.dim != 3:
        raise DimensionError("ellipsoid covers are built in dimension 3")
    lattice = lattice or AffineLattice.standard(3)
    if not ellipsoid_lattice_points(E, lattice):
        raise PreconditionUnmet("the ellipsoid contains no lattice points")
    diagnostics = []
    steps = _chain_polytopes(E, lattice)
    cover: list[Simplex] = []
    prev = None
    for P, new in steps:
        rep = is_normal(P)
        if not rep.is_normal:
            raise ChainStepNotNormal(f"chain polytope with {P.n_lattice_points()} points is not normal",
                                     witness=rep.witness)
        if prev is None:
            cover = [Simplex.from_lattice(P.vertices_lattice, lattice)]
        elif P.dim > prev.dim:
            cover = pyramid_cover_lift(cover, P, new)
        elif P.dim < 3:
            cover = facet_triangulation(P)
        else:
            fresh = [s for s in boundary_cover(P).simplices
                     if not all(prev.contains_lattice(y) for y in s.lattice_vertices)]
            cover = sorted(set(cover) | set(fresh))
        prev = P
    P = prev
    if P.dim < 3:
        raise DimensionError("the lattice points of the ellipsoid are not full-dimensional", witness=P.vertices)
    cover, verdict = _repair(P, cover, diagnostics)
    if not verdict.covered:
        raise VerificationFailed("cover construction left a gap", witness=verdict.witness)
    if prune:
        cover = prune_cover(P, cover)
        if not verify_cover(P, cover).covered:
            raise VerificationFailed("pruning broke the cover")
    return UnimodularCover(P, sorted(cover), "full", True, diagnostics)


def _is_half_integral(c: Sequence) -> bool:
    return all((2 * Fraction(x)).denominator == 1 for x in c)


def _height_one_apex(P: LatticePolytope, ys: Sequence[tuple], a, level) -> tuple | None:
    """Lattice point z of P with a.z = level, closest to the centroid of the triangle ys."""
    cen = [sum(y[i] for y in ys) / 3 for i in range(3)]
    best = None
    for z in P.local_points():
        if dot(a, z) == level:
            key = (sum((z[i] - cen[i]) ** 2 for i in range(3)), z)
            if best is None or key < best:
                best = key
    return None if best is None else best[1]


def _boundary_triangles(P: LatticePolytope) -> list[tuple[Simplex, tuple, int]]:
    out = []
    for F in P.faces().get(2, []):
        a, b = P.local_facets[min(F.facet_indices)]
        g = exact.content(a)
        a, b = tuple(c // g for c in a), Fraction(b) / g
        for t in facet_triangulation(F.polytope_of()):
            out.append((t, a, b))
    return out


def symmetric_cover_3d(E: Ellipsoid, lattice: AffineLattice | None = None,
                       max_rounds: int = SYMMETRIC_ROUNDS) -> UnimodularCover:
    """Cover of conv(E ∩ Z^3) for a center in (1/2)Z^3 by tetrahedra over unimodular triangles.

    Each boundary triangle gets a height-1 apex.  While the verifier finds an
    uncovered point w, walk from w away from the center until the ray meets
    a wall (a facet of a cover tetrahedron or of P) and cone that triangle
    to a lattice point at height 1 on the uncovered side.  Every round adds
    a new unimodular tetrahedron, so the loop ends.
    """
    if E.dim != 3:
        raise DimensionError("symmetric covers are built in dimension 3")
    if not _is_half_integral(E.center):
        raise CenterNotHalfIntegral(f"center {exact.fmt_vec(E.center)} is not half-integral",
                                    witness=E.center)
    lattice = lattice or AffineLattice.standard(3)
    pts = ellipsoid_lattice_points(E, lattice)
    if not pts:
        raise PreconditionUnmet("the ellipsoid contains no lattice points")
    P = convex_hull(pts, lattice)
    if P.dim != 3:
        raise DimensionError("the lattice points of the ellipsoid are not full-dimensional", witness=P.vertices)
    diagnostics = []
    tris = _boundary_triangles(P)
    cover = set()
    for t, a, b in tris:
        z = _height_one_apex(P, t.lattice_vertices, a, b - 1)
        if z is None:
            diagnostics.append(f"no height-1 apex over {t}")
            continue
        cover.add(Simplex.from_lattice(list(t.lattice_vertices) + [z], lattice))
    verdict = verify_cover(P, cover)
    center = lattice.coordinates(E.center)
    for _ in range(max_rounds):
        if verdict.covered:
            break
        w = lattice.coordinates(verdict.witness)
        extra = [s for s in _wall_tetrahedra(P, tris, sorted(cover), center, w) if s not in cover]
        if not extra:
            extra = [s for s in unimodular_tetrahedra_through(P, verdict.witness) if s not in cover]
        if not extra:
            # widen to every lattice point of P
            extra = [s for s in unimodular_tetrahedra_through(P, verdict.witness, limit=None) if s not in cover]
        if not extra:
            break
        diagnostics.append(f"gap at {exact.fmt_vec(verdict.witness)} closed by {extra[0]}")
        cover.add(extra[0])
        verdict = verify_cover(P, cover)
    if not verdict.covered:
        raise VerificationFailed("symmetric cover left a gap", witness=verdict.witness)
    return UnimodularCover(P, sorted(cover), "full", True, diagnostics)


def _wall_tetrahedra(P: LatticePolytope, tris, cover: Sequence[Simplex], center, w) -> list[Simplex]:
    """conv(T, z) for the first wall triangle T met by the ray from w pointing away from the center."""
    d = sub(w, center)
    if not any(d):
        d = (1, 0, 0)
    # P's own facets bound the walk
    t_best = min((b - dot(a, w)) / dot(a, d) for a, b in P.local_facets if dot(a, d) > 0)
    hit = None
    for s in cover:
        c = _Cell(s.lattice_vertices)
        entries, exits, parallel_out = [], [], False
        for a, b in c.H:
            ad, slack = dot(a, d), b - dot(a, w)
            if ad < 0:
                entries.append((slack / ad, (a, b)))
            elif ad > 0:
                exits.append(slack / ad)
            elif slack < 0:
                parallel_out = True
        if parallel_out or not entries:
            continue
        t_in, plane = max(entries, key=lambda e: e[0])
        # the ray must pass through the interior, not graze an edge
        if t_in < 0 or t_in > t_best or (exits and min(exits) <= t_in):
            continue
        if hit is None or t_in < hit[0]:
            hit = (t_in, c, plane)
    if hit is not None:
        _, c, (a, b) = hit
        T = [y for y in c.V if dot(a, y) == b]
        g = exact.content(a)
        a, b = tuple(v // g for v in a), Fraction(b) / g
        candidates = [(T, a, b)]
    else:
        x = tuple(wi + t_best * di for wi, di in zip(w, d))
        candidates = []
        for t, a, b in tris:
            ys = t.lattice_vertices
            if dot(a, x) == b and _Cell(ys + (tuple(v - ai for v, ai in zip(ys[0], a)),)).contains(x):
                candidates.append((list(ys), a, b))
    out = []
    for T, a, b in candidates:
        side = 1 if dot(a, w) > b else -1
        z = _height_one_apex(P, T, a, b + side)
        if z is not None:
            out.append(Simplex.from_lattice(list(T) + [z], P.lattice))
    return out


def johnson_witness(E2: Ellipsoid, v: Sequence, lattice: AffineLattice | None = None) -> tuple:
    """A lattice point in conv(E2) + v; E2 must contain a lattice triangle."""
    if E2.dim != 2:
        raise DimensionError("planar ellipses only")
    lattice = lattice or AffineLattice.standard(2)
    pts = ellipsoid_lattice_points(E2, lattice)
    if len(pts) < 3 or exact.rank([sub(p, pts[0]) for p in pts[1:]]) < 2:
        raise PreconditionUnmet("the ellipse contains no lattice triangle")
    moved = ellipsoid_lattice_points(E2.translated(v), lattice)
    if not moved:
        raise VerificationFailed("translate without lattice points", witness=rat_vector(v))
    return moved[0]


def boundary_layer_regions(P: LatticePolytope, factor=Fraction(15, 16)) -> list[_Region]:
    """P minus the open homothetic copy c + factor (P - c), c the vertex centroid, as convex pieces.

    Each piece is conv(F, c + factor (F - c)) for a facet F.
    """
    verts = P.local_vertices
    n = P.ambient_dim
    c = tuple(Fraction(sum(v[i] for v in verts), len(verts)) for i in range(n))
    f = Fraction(factor)
    out = []
    for a, b in P.local_facets:
        F = [v for v in verts if dot(a, v) == b]
        inner = [tuple(ci + f * (vi - ci) for ci, vi in zip(c, v)) for v in F]
        out.append(convex_hull_region(list(F) + inner))
    return out


def convex_hull_region(points: Sequence[tuple]) -> _Region:
    """Region of the convex hull of full-dimensional rational points."""
    hom = [_homogeneous(p) for p in points]
    den = reduce(lcm, (d for _, d in hom), 1)
    ys = [tuple(x * (den // d) for x in U) for U, d in hom]
    H = convex_hull_lattice(ys, AffineLattice.standard(len(ys[0])))
    return _Region([_int_plane(a, Fraction(b, den)) for a, b in H.local_facets],
                   [_homogeneous(tuple(Fraction(x, den) for x in v)) for v in H.local_vertices])


def verify_boundary_layer(cover: UnimodularCover, factor=Fraction(15, 16)) -> CoverVerdict:
    """Exact check that P minus the open (factor)-copy of P about its centroid is covered."""
    P = cover.target
    cells = _check_inputs(P, cover.simplices)
    total = 0
    for R in boundary_layer_regions(P, factor):
        v = _verify_region(R, cells, cell_cap())
        total += v.cells
        if not v.covered:
            v.witness = P.lattice.to_ambient(v.witness)
            v.cells = total
            return v
    return CoverVerdict(True, None, "arrangement", total)
