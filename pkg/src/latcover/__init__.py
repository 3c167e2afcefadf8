"""Exact lattice-polytope toolkit: Hilbert bases, normality, unimodular covers
and lattice points of ellipsoids."""

from .exact import AffineLattice, hnf, is_direct_summand, lattice_index, primitive, snf
from .polytope import LatticePolytope, Simplex, convex_hull, gp, minimal_face_containing
from .cones import RationalCone, hilbert_basis, is_very_ample, sebo_triangulation
from .normality import hilbert_normality, is_normal
from .ellipsoid import (Ellipsoid, EllipsoidalSet, build_qd_family, descent_chain, ellipsoid_lattice_points,
                        find_extremal_point, peel, stack, verify_counterexample)
from .cover import (UnimodularCover, boundary_cover, ellipsoid_cover_3d, symmetric_cover_3d, verify_cover)

__version__ = "0.1.0"

__all__ = [
    "AffineLattice", "hnf", "snf", "lattice_index", "is_direct_summand", "primitive",
    "LatticePolytope", "Simplex", "convex_hull", "gp", "minimal_face_containing",
    "RationalCone", "hilbert_basis", "is_very_ample", "sebo_triangulation",
    "is_normal", "hilbert_normality",
    "Ellipsoid", "EllipsoidalSet", "ellipsoid_lattice_points", "find_extremal_point", "peel", "descent_chain",
    "stack", "build_qd_family", "verify_counterexample",
    "UnimodularCover", "boundary_cover", "ellipsoid_cover_3d", "symmetric_cover_3d", "verify_cover",
]
