"""Seeded random instances for experiments and property tests."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterator

from . import exact
from .cones import RationalCone, is_very_ample
from .ellipsoid import Ellipsoid, ellipsoid_lattice_points
from .normality import is_normal
from .polytope import LatticePolytope, convex_hull


def random_ellipsoid_3d(rng: random.Random, min_points: int = 4, max_points: int = 40,
                        half_integral_center: bool = False) -> Ellipsoid:
    """Rational ellipsoid in R^3 whose lattice points span R^3, with a bounded count."""
    while True:
        M = [[rng.randint(-2, 2) for _ in range(3)] for _ in range(3)]
        if exact.det_int(M) == 0:
            continue
        A = exact.matmul(exact.transpose(M), M)
        scale = Fraction(rng.randint(1, 12), rng.randint(2, 16))
        A = [[Fraction(a) * scale for a in row] for row in A]
        if half_integral_center:
            c = tuple(Fraction(rng.randint(-2, 2), 2) for _ in range(3))
        else:
            c = tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(3))
        E = Ellipsoid(A, c)
        pts = ellipsoid_lattice_points(E)
        if not (min_points <= len(pts) <= max_points):
            continue
        if exact.rank([exact.sub(p, pts[0]) for p in pts[1:]]) == 3:
            return E


def random_polytope_3d(rng: random.Random, max_points: int = 40, box: int = 3) -> LatticePolytope:
    """Hull of a few random points in [0, box]^3; full-dimensional, at most max_points lattice points."""
    while True:
        k = rng.randint(4, 8)
        pts = {tuple(rng.randint(0, box) for _ in range(3)) for _ in range(k)}
        P = convex_hull(sorted(pts))
        if P.dim == 3 and P.n_lattice_points() <= max_points:
            return P


def normal_polytopes_3d(rng: random.Random, count: int, max_points: int = 40) -> Iterator[LatticePolytope]:
    seen = set()
    while len(seen) < count:
        P = random_polytope_3d(rng, max_points)
        key = tuple(P.vertices)
        if key in seen or not is_normal(P).is_normal:
            continue
        seen.add(key)
        yield P


def non_very_ample_polytopes_3d(rng: random.Random, count: int, max_points: int = 40) -> Iterator[LatticePolytope]:
    seen = set()
    while len(seen) < count:
        P = random_polytope_3d(rng, max_points, box=rng.choice((2, 3, 4)))
        key = tuple(P.vertices)
        if key in seen or is_very_ample(P).is_very_ample:
            continue
        seen.add(key)
        yield P


def random_pointed_cone(rng: random.Random, dim: int = 3, max_multiplicity: int = 20,
                        max_generators: int | None = None) -> RationalCone:
    """Full-dimensional pointed cone on a few random integer generators."""
    top = max_generators or dim + 1
    while True:
        k = rng.randint(dim, top)
        gens = [tuple(rng.randint(-4, 4) for _ in range(dim)) for _ in range(k)]
        if any(not any(g) for g in gens) or exact.rank(gens) != dim:
            continue
        try:
            C = RationalCone(gens)
        except ValueError:
            continue
        if C.multiplicity() <= max_multiplicity:
            return C
