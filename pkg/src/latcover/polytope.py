"""Exact lattice polytopes.

A :class:`LatticePolytope` keeps its points in integer *lattice coordinates*
relative to its :class:`~latcover.exact.AffineLattice`, and additionally in
*local coordinates* of the lattice of its affine hull, where the polytope is
full-dimensional.  The hull, facet list and a placing triangulation come out
of one incremental insertion pass over those local points.
"""

from __future__ import annotations

import threading
from collections import Counter
from fractions import Fraction
from functools import reduce
from itertools import combinations, product
from math import lcm
from typing import Iterable, Sequence

from . import exact
from .errors import DimensionError, PointNotInLattice, PointOutsidePolytope
from .exact import AffineLattice, content, dot, rank, sub


# ---------------------------------------------------------------------------
# incremental hull / placing triangulation on full-dimensional integer points


def _hyperplane(pts: Sequence[tuple]) -> tuple[tuple, int]:
    base = pts[0]
    a = exact.cofactor_normal([sub(p, base) for p in pts[1:]])
    g = content(a)
    a = tuple(x // g for x in a)
    return a, dot(a, base)


def placing(points: Sequence[tuple]):
    """Placing triangulation of integer points spanning Z^k affinely.

    Points are inserted in the given order; a point inside the current hull
    is skipped.  Returns ``(simplices, boundary)`` where simplices are index
    tuples and ``boundary`` maps each boundary (k-1)-simplex (a frozenset of
    indices) to its outward ``(normal, offset)``.
    """
    k = len(points[0])
    chosen = [0]
    rows: list[tuple] = []
    for i in range(1, len(points)):
        cand = rows + [sub(points[i], points[0])]
        if rank(cand) == len(cand):
            chosen.append(i)
            rows = cand
            if len(chosen) == k + 1:
                break
    if len(chosen) != k + 1:
        raise DimensionError("points are not full-dimensional")
    # (k+1) * interior point of the first simplex
    center = tuple(sum(points[i][j] for i in chosen) for j in range(k))
    scale = k + 1

    def oriented(face):
        a, b = _hyperplane([points[i] for i in face])
        if dot(a, center) > scale * b:
            a, b = tuple(-x for x in a), -b
        return a, b

    boundary = {}
    for j in chosen:
        face = tuple(i for i in chosen if i != j)
        boundary[frozenset(face)] = oriented(face)
    simplices = [tuple(chosen)]
    taken = set(chosen)
    for i, p in enumerate(points):
        if i in taken:
            continue
        visible = [f for f, (a, b) in boundary.items() if dot(a, p) > b]
        if not visible:
            continue
        ridges: Counter = Counter()
        for f in visible:
            for r in combinations(sorted(f), k - 1):
                ridges[r] += 1
            simplices.append(tuple(sorted(f)) + (i,))
            del boundary[f]
        for r, cnt in ridges.items():
            if cnt == 1:
                face = r + (i,)
                boundary[frozenset(face)] = oriented(face)
    return simplices, boundary


def enumerate_box(A: Sequence[Sequence[int]], b: Sequence[int], lo: Sequence[int], hi: Sequence[int]) -> list[tuple]:
    """All integer t with lo <= t <= hi and A t <= b, by pruned recursion.

    At every level the range of the next coordinate is tightened by each
    inequality using the box minimum of the remaining terms.
    """
    m = len(lo)
    F = len(A)
    if m == 0:
        return [()] if all(x >= 0 for x in b) else []
    minrest = []
    for f in range(F):
        row = [0] * (m + 1)
        for j in range(m - 1, -1, -1):
            a = A[f][j]
            row[j] = row[j + 1] + min(a * lo[j], a * hi[j])
        minrest.append(row)
    cols = [[A[f][j] for f in range(F)] for j in range(m)]
    out: list[tuple] = []
    t = [0] * m

    def rec(j, slack):
        L, H = lo[j], hi[j]
        col = cols[j]
        for f in range(F):
            a = col[f]
            r = slack[f] - minrest[f][j + 1]
            if a > 0:
                q = r // a
                if q < H:
                    H = q
            elif a < 0:
                q = -(r // -a)
                if q > L:
                    L = q
            elif r < 0:
                return
            if L > H:
                return
        if j == m - 1:
            for v in range(L, H + 1):
                t[j] = v
                out.append(tuple(t))
            return
        for v in range(L, H + 1):
            t[j] = v
            rec(j + 1, [s - a * v for s, a in zip(slack, col)])

    rec(0, list(b))
    return out


# ---------------------------------------------------------------------------
# polytopes


class LatticePolytope:
    """Convex hull of finitely many points of an :class:`AffineLattice`.

    Build with :func:`convex_hull`.  Public coordinates are ambient rationals;
    ``*_lattice`` variants use integer lattice coordinates and ``local_*``
    variants use coordinates of the affine-hull lattice.
    """

    def __init__(self, lattice: AffineLattice, origin: tuple, frame: list, proj: list, local_pts: list,
                 vertex_idx: list, facets: list, simplices: list):
        self.lattice = lattice
        self.ambient_dim = lattice.dim
        self._origin = origin
        self._frame = frame  # k rows: y = origin + z @ frame
        self._proj = proj  # n x n unimodular: z = ((y - origin) @ proj)[:k]
        self._proj_cols = exact.transpose(proj)
        self._full = len(frame) == lattice.dim and not any(origin)
        self.dim = len(frame)
        self._local = local_pts
        self._vidx = vertex_idx
        self.local_facets = facets
        self._simplices = simplices
        self.local_vertices = [local_pts[i] for i in vertex_idx]
        self._lock = threading.Lock()
        self._points_cache = None
        self._vertex_cache = None

    # coordinate maps ---------------------------------------------------------

    def local_to_lattice(self, z: Sequence) -> tuple:
        if self._full:
            return tuple(z)
        y = list(self._origin)
        for c, row in zip(z, self._frame):
            if c:
                for i, w in enumerate(row):
                    y[i] += c * w
        return tuple(y)

    def lattice_to_local(self, y: Sequence) -> tuple | None:
        """Local coordinates of lattice-coordinate point ``y``; None off the affine hull."""
        if self._full:
            return tuple(y)
        d = sub(y, self._origin)
        full = tuple(dot(d, col) for col in self._proj_cols)
        if any(full[self.dim:]):
            return None
        return full[: self.dim]

    def local_to_ambient(self, z: Sequence) -> tuple:
        return self.lattice.to_ambient(self.local_to_lattice(z))

    def ambient_to_local(self, x: Sequence) -> tuple | None:
        y = self.lattice.coordinates(x)
        if y is None:
            return None
        return self.lattice_to_local(y)

    # basic data --------------------------------------------------------------

    @property
    def vertices(self) -> list[tuple]:
        if self._vertex_cache is None:
            self._vertex_cache = sorted(self.local_to_ambient(z) for z in self.local_vertices)
        return self._vertex_cache

    @property
    def vertices_lattice(self) -> list[tuple]:
        return sorted(self.local_to_lattice(z) for z in self.local_vertices)

    @property
    def n_facets(self) -> int:
        return len(self.local_facets)

    def facets(self) -> list[tuple[tuple, Fraction]]:
        """Facet inequalities ``normal . y <= offset`` on lattice coordinates y.

        For lower-dimensional polytopes these hold together with
        :meth:`equations`.
        """
        out = []
        k = self.dim
        for a, b in self.local_facets:
            normal = tuple(sum(self._proj[i][j] * a[j] for j in range(k)) for i in range(self.ambient_dim))
            out.append((normal, Fraction(b + dot(normal, self._origin))))
        return out

    def equations(self) -> list[tuple[tuple, Fraction]]:
        """Affine-hull equations ``normal . y == offset`` on lattice coordinates."""
        n, k = self.ambient_dim, self.dim
        out = []
        for j in range(k, n):
            normal = tuple(self._proj[i][j] for i in range(n))
            out.append((normal, Fraction(dot(normal, self._origin))))
        return out

    def triangulation(self) -> list[tuple]:
        """Placing triangulation as tuples of local points."""
        return [tuple(self._local[i] for i in s) for s in self._simplices]

    # membership ---------------------------------------------------------------

    def local_contains(self, z: Sequence) -> bool:
        return all(dot(a, z) <= b for a, b in self.local_facets)

    def contains(self, x: Sequence) -> bool:
        z = self.ambient_to_local(x)
        return z is not None and self.local_contains(z)

    __contains__ = contains

    def contains_lattice(self, y: Sequence) -> bool:
        z = self.lattice_to_local(y)
        return z is not None and self.local_contains(z)

    # lattice points -----------------------------------------------------------

    def local_points(self) -> list[tuple]:
        """Lattice points in local coordinates, sorted."""
        with self._lock:
            if self._points_cache is None:
                self._points_cache = sorted(self._enumerate_local())
            return self._points_cache

    def _enumerate_local(self) -> list[tuple]:
        k = self.dim
        if k == 0:
            return [()]
        if k == self.ambient_dim and self.lattice.rank == k:
            pts = self._enumerate_cosets()
            if pts is not None:
                return pts
        lo = [min(z[i] for z in self.local_vertices) for i in range(k)]
        hi = [max(z[i] for z in self.local_vertices) for i in range(k)]
        A = [a for a, _ in self.local_facets]
        b = [bb for _, bb in self.local_facets]
        return enumerate_box(A, b, lo, hi)

    def _enumerate_cosets(self) -> list[tuple] | None:
        """Enumerate in ambient axis-aligned coordinates over the cosets of the
        largest diagonal sublattice; returns local (= lattice) coordinates."""
        L = self.lattice
        n = L.dim
        inv_cols = exact.transpose(L._inv)  # column i = lattice coords of e_i
        g = []
        for col in inv_cols:
            den = reduce(lcm, (Fraction(c).denominator for c in col), 1)
            num = content([int(Fraction(c) * den) for c in col])
            g.append(Fraction(den, num))
        index = reduce(lambda x, y: x * y, g, Fraction(1)) / L.determinant()
        if index.denominator != 1 or index > 4096:
            return None
        # sublattice generated by g_i e_i, in lattice coordinates
        M = [[int(g[j] * L._inv[i][j]) for j in range(n)] for i in range(n)]
        S, U, _ = exact.snf(M)
        Uinv = exact.inverse(U)
        reps = []
        for ks in product(*[range(S[i][i]) for i in range(n)]):
            y = exact.matvec(Uinv, ks)
            x = L.to_ambient(y)
            reps.append(tuple(xi - g[i] * (xi // g[i]) for i, xi in enumerate(x)))
        verts = [L.to_ambient(self.local_to_lattice(z)) for z in self.local_vertices]
        vmin = [min(v[i] for v in verts) for i in range(n)]
        vmax = [max(v[i] for v in verts) for i in range(n)]
        forms = []
        for a, b in self.facets():
            amb = L.dual_to_ambient(a)
            forms.append((amb, b + dot(amb, L.shift)))
        out = []
        for r in reps:
            A, bb = [], []
            for amb, off in forms:
                row = [amb[i] * g[i] for i in range(n)]
                rhs = off - dot(amb, r)
                den = reduce(lcm, [Fraction(v).denominator for v in row] + [Fraction(rhs).denominator], 1)
                A.append([int(v * den) for v in row])
                bb.append(int(rhs * den))
            lo = [-((r[i] - vmin[i]) // g[i]) for i in range(n)]
            hi = [(vmax[i] - r[i]) // g[i] for i in range(n)]
            for t in enumerate_box(A, bb, lo, hi):
                x = tuple(r[i] + g[i] * t[i] for i in range(n))
                out.append(self.lattice_to_local(L.to_lattice(x)))
        return out

    def lattice_points(self) -> list[tuple]:
        """All lattice points, ambient coordinates, lexicographically sorted."""
        return sorted(self.local_to_ambient(z) for z in self.local_points())

    def lattice_points_lattice(self) -> list[tuple]:
        """All lattice points in lattice coordinates, sorted."""
        return sorted(self.local_to_lattice(z) for z in self.local_points())

    def n_lattice_points(self) -> int:
        return len(self.local_points())

    # faces ---------------------------------------------------------------------

    def minimal_face_containing(self, x: Sequence) -> "FaceHandle":
        z = self.ambient_to_local(x)
        if z is None or not self.local_contains(z):
            raise PointOutsidePolytope(f"{exact.fmt_vec(x)} is not in the polytope")
        tight = frozenset(i for i, (a, b) in enumerate(self.local_facets) if dot(a, z) == b)
        return FaceHandle(self, tight)

    def faces(self) -> dict[int, list["FaceHandle"]]:
        """Face lattice (without the empty face), keyed by dimension."""
        vsets = []
        for a, b in self.local_facets:
            vsets.append(frozenset(i for i, v in enumerate(self.local_vertices) if dot(a, v) == b))
        seen = {frozenset(range(len(self.local_vertices)))}
        frontier = list(set(vsets))
        seen.update(frontier)
        while frontier:
            new = []
            for f in frontier:
                for g in vsets:
                    h = f & g
                    if h and h not in seen:
                        seen.add(h)
                        new.append(h)
            frontier = new
        out: dict[int, list[FaceHandle]] = {}
        for vs in seen:
            tight = frozenset(j for j, g in enumerate(vsets) if vs <= g)
            face = FaceHandle(self, tight)
            out.setdefault(face.dim, []).append(face)
        for dim in out:
            out[dim].sort(key=lambda f: f.vertices)
        return out

    def __repr__(self):
        return (f"LatticePolytope(dim={self.dim}, vertices={len(self.local_vertices)}, "
                f"facets={len(self.local_facets)})")

    def __eq__(self, other):
        if not isinstance(other, LatticePolytope):
            return NotImplemented
        return self.lattice == other.lattice and self.vertices == other.vertices

    def __hash__(self):
        return hash(tuple(self.vertices))


class FaceHandle:
    """A nonempty face given by the set of facet indices containing it."""

    def __init__(self, polytope: LatticePolytope, facet_indices: frozenset):
        self.polytope = polytope
        self.facet_indices = frozenset(facet_indices)
        F = [polytope.local_facets[i] for i in self.facet_indices]
        self._local_vertices = [v for v in polytope.local_vertices if all(dot(a, v) == b for a, b in F)]
        if not self._local_vertices:
            raise ValueError("empty face")
        base = self._local_vertices[0]
        self.dim = rank([sub(v, base) for v in self._local_vertices[1:]]) if len(self._local_vertices) > 1 else 0

    @property
    def vertices(self) -> list[tuple]:
        return sorted(self.polytope.local_to_ambient(v) for v in self._local_vertices)

    def contains(self, x: Sequence) -> bool:
        z = self.polytope.ambient_to_local(x)
        if z is None or not self.polytope.local_contains(z):
            return False
        return all(dot(self.polytope.local_facets[i][0], z) == self.polytope.local_facets[i][1]
                   for i in self.facet_indices)

    def polytope_of(self) -> LatticePolytope:
        return convex_hull(self.vertices, self.polytope.lattice)

    def __eq__(self, other):
        return isinstance(other, FaceHandle) and other.polytope is self.polytope and \
            other.facet_indices == self.facet_indices

    def __hash__(self):
        return hash(self.facet_indices)

    def __repr__(self):
        return f"FaceHandle(dim={self.dim}, vertices={[exact.fmt_vec(v) for v in self.vertices]})"


def _from_lattice_points(ys: list[tuple], lattice: AffineLattice) -> LatticePolytope:
    ys = sorted(set(ys))
    if not ys:
        raise ValueError("convex hull of an empty point set")
    n = lattice.dim
    origin = ys[0]
    diffs = [sub(y, origin) for y in ys[1:]]
    frame, proj = exact.saturation_basis(diffs, n)
    k = len(frame)
    if k == n:
        origin = (0,) * n
        frame = exact.identity(n)
        proj = exact.identity(n)
    local = [tuple(dot(sub(y, origin), [proj[i][j] for i in range(n)]) for j in range(k)) for y in ys]
    if k == 0:
        return LatticePolytope(lattice, origin, frame, proj, local, [0], [], [(0,)])
    simplices, boundary = placing(local)
    grouped: dict = {}
    for key, (a, b) in boundary.items():
        grouped.setdefault((a, b), set()).update(key)
    facets = sorted(grouped)
    vertex_idx = []
    for i, z in enumerate(local):
        tight = [a for a, b in facets if dot(a, z) == b]
        if len(tight) >= k and rank(tight) == k:
            vertex_idx.append(i)
    return LatticePolytope(lattice, origin, frame, proj, local, vertex_idx, facets, simplices)


def convex_hull(points: Iterable[Sequence], lattice: AffineLattice | None = None) -> LatticePolytope:
    """Exact convex hull of lattice points given in ambient coordinates.

    Any affine dimension up to the ambient one is allowed; a single point
    gives a 0-dimensional polytope.
    """
    pts = [exact.rat_vector(p) for p in points]
    if not pts:
        raise ValueError("convex hull of an empty point set")
    if lattice is None:
        lattice = AffineLattice.standard(len(pts[0]))
    ys = [lattice.to_lattice(p) for p in pts]
    return _from_lattice_points(ys, lattice)


def convex_hull_lattice(ys: Iterable[Sequence[int]], lattice: AffineLattice) -> LatticePolytope:
    """Same as :func:`convex_hull` for points given in lattice coordinates."""
    return _from_lattice_points([tuple(int(c) for c in y) for y in ys], lattice)


def lattice_points(P: LatticePolytope) -> list[tuple]:
    return P.lattice_points()


def minimal_face_containing(P: LatticePolytope, x: Sequence) -> FaceHandle:
    return P.minimal_face_containing(x)


# ---------------------------------------------------------------------------
# simplices and predicates


class Simplex:
    """Lattice simplex; vertices are stored sorted so equal simplices compare equal."""

    __slots__ = ("lattice", "vertices", "lattice_vertices", "dim")

    def __init__(self, vertices: Iterable[Sequence], lattice: AffineLattice | None = None, *, _lattice_coords=None):
        if _lattice_coords is not None:
            ys = sorted(set(tuple(v) for v in _lattice_coords))
            self.lattice = lattice
            self.lattice_vertices = tuple(ys)
            self.vertices = tuple(lattice.to_ambient(y) for y in ys)
        else:
            vs = [exact.rat_vector(v) for v in vertices]
            if lattice is None:
                lattice = AffineLattice.standard(len(vs[0]))
            self.lattice = lattice
            ys = sorted(set(lattice.to_lattice(v) for v in vs))
            if len(ys) != len(vs):
                raise ValueError("repeated simplex vertex")
            self.lattice_vertices = tuple(ys)
            self.vertices = tuple(lattice.to_ambient(y) for y in ys)
        y0 = self.lattice_vertices[0]
        edges = [sub(y, y0) for y in self.lattice_vertices[1:]]
        if edges and rank(edges) != len(edges):
            raise ValueError("simplex vertices are affinely dependent")
        self.dim = len(edges)

    @classmethod
    def from_lattice(cls, ys: Iterable[Sequence[int]], lattice: AffineLattice) -> "Simplex":
        return cls((), lattice, _lattice_coords=[tuple(y) for y in ys])

    def edge_matrix(self) -> list[tuple]:
        y0 = self.lattice_vertices[0]
        return [sub(y, y0) for y in self.lattice_vertices[1:]]

    def multiplicity(self) -> int:
        """Product of elementary divisors of the edge vectors (normalized volume
        relative to the lattice of the affine hull)."""
        out = 1
        for e in exact.elementary_divisors(self.edge_matrix()):
            out *= e
        return out

    def is_unimodular(self) -> bool:
        if self.dim == 0:
            return True
        return all(e == 1 for e in exact.elementary_divisors(self.edge_matrix()))

    def __eq__(self, other):
        return isinstance(other, Simplex) and self.lattice_vertices == other.lattice_vertices and \
            self.lattice == other.lattice

    def __hash__(self):
        return hash(self.lattice_vertices)

    def __lt__(self, other):
        return self.lattice_vertices < other.lattice_vertices

    def __repr__(self):
        return "Simplex(" + ", ".join(exact.fmt_vec(v) for v in self.vertices) + ")"


def is_unimodular_simplex(S: Simplex) -> bool:
    return S.is_unimodular()


def affine_hull_height(P: LatticePolytope, Q_points_local: Sequence[tuple], apex_local: tuple) -> int | None:
    """Lattice height of ``apex`` over the affine hull of points inside aff(P).

    Coordinates are P-local.  Returns None unless the points span a
    hyperplane of aff(P) that misses the apex.
    """
    base = Q_points_local[0]
    diffs = [sub(q, base) for q in Q_points_local[1:]]
    k = P.dim
    if (rank(diffs) if diffs else 0) != k - 1:
        return None
    normals = exact.integer_kernel(diffs, k) if diffs else [tuple(1 if j == 0 else 0 for j in range(k))]
    if len(normals) != 1:
        return None
    a = normals[0]
    h = abs(dot(a, apex_local) - dot(a, base))
    return h or None


def is_unimodular_pyramid(P: LatticePolytope, Q: LatticePolytope) -> bool:
    """True iff P = conv(v, Q) with v off aff(Q) at lattice height 1 inside aff(P)."""
    if P.lattice != Q.lattice or Q.dim + 1 != P.dim:
        return False
    if not all(P.contains(v) for v in Q.vertices):
        return False
    outside = [v for v in P.vertices if not Q.contains(v)]
    if len(outside) != 1:
        return False
    apex = P.ambient_to_local(outside[0])
    qpts = [P.ambient_to_local(v) for v in Q.vertices]
    return affine_hull_height(P, qpts, apex) == 1


def gp(P: LatticePolytope) -> AffineLattice:
    """Subgroup generated by differences of lattice points, basis in HNF."""
    ys = P.lattice_points_lattice()
    y0 = ys[0]
    diffs = [sub(y, y0) for y in ys[1:] if y != y0]
    L = P.lattice
    if not diffs:
        return AffineLattice([], dim=L.dim)
    H, _ = exact.hnf(diffs)
    rows = [r for r in H if any(r)]
    lin = L.translation()
    return AffineLattice([sub(lin.to_ambient(r), lin.shift) for r in rows], dim=L.dim)


def dilate(P: LatticePolytope, c: int) -> LatticePolytope:
    """c-th dilate, taken in lattice coordinates (about the lattice shift)."""
    if c < 1:
        raise ValueError("dilation factor must be a positive integer")
    origin = tuple(c * x for x in P._origin)
    local = [tuple(c * x for x in z) for z in P._local]
    facets = [(a, c * b) for a, b in P.local_facets]
    return LatticePolytope(P.lattice, origin, P._frame, P._proj, local, P._vidx, facets, P._simplices)


def translate(P: LatticePolytope, v: Sequence) -> LatticePolytope:
    """P + v for a lattice vector v (ambient coordinates)."""
    lin = P.lattice.linear_to_lattice(v)
    if any(Fraction(x).denominator != 1 for x in lin):
        raise PointNotInLattice("translation vector is not a lattice vector")
    shift = tuple(int(x) for x in lin)
    return convex_hull_lattice([exact.add(P.local_to_lattice(z), shift) for z in P.local_vertices], P.lattice)
