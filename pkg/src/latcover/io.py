"""JSON wire format.  Every number on the wire is an exact string such as "5/2"."""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Sequence

from .cones import RationalCone
from .ellipsoid import Ellipsoid, EllipsoidalSet
from .exact import AffineLattice, fmt_scalar
from .polytope import LatticePolytope, Simplex, convex_hull


class FormatError(ValueError):
    """Input JSON does not have the expected shape."""


def parse_scalar(x) -> Fraction:
    if isinstance(x, bool) or isinstance(x, float):
        raise FormatError(f"inexact or non-numeric value {x!r}; use integers or 'p/q' strings")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise FormatError(f"bad rational {x!r}") from e
    raise FormatError(f"expected a number, got {type(x).__name__}")


def parse_vector(v) -> tuple:
    if not isinstance(v, list):
        raise FormatError("expected a list of numbers")
    return tuple(parse_scalar(x) for x in v)


def parse_int_vector(v) -> tuple:
    out = parse_vector(v)
    if any(x.denominator != 1 for x in out):
        raise FormatError("expected integer entries")
    return tuple(int(x) for x in out)


def parse_matrix(M) -> list[tuple]:
    if not isinstance(M, list) or not M:
        raise FormatError("expected a nonempty list of rows")
    return [parse_vector(r) for r in M]


def dump_scalar(x) -> str:
    return fmt_scalar(x)


def dump_vector(v: Sequence) -> list[str]:
    return [fmt_scalar(x) for x in v]


def dump_matrix(M) -> list[list[str]]:
    return [dump_vector(r) for r in M]


# lattices -------------------------------------------------------------------


def parse_lattice(obj, dim: int) -> AffineLattice:
    if obj is None:
        return AffineLattice.standard(dim)
    if obj == "standard":
        return AffineLattice.standard(dim)
    if obj == "half-integer":
        return AffineLattice.half_integer(dim)
    if not isinstance(obj, dict) or "basis" not in obj:
        raise FormatError('lattice must be "standard", "half-integer" or {"basis": [...], "shift": [...]}')
    basis = parse_matrix(obj["basis"])
    shift = parse_vector(obj["shift"]) if obj.get("shift") is not None else None
    try:
        return AffineLattice(basis, shift)
    except ValueError as e:
        raise FormatError(str(e)) from e


def dump_lattice(L: AffineLattice) -> dict:
    return {"basis": dump_matrix(L.basis), "shift": dump_vector(L.shift)}


# objects --------------------------------------------------------------------


def _require(obj, key):
    if not isinstance(obj, dict) or key not in obj:
        raise FormatError(f"missing field {key!r}")
    return obj[key]


def parse_polytope(obj) -> LatticePolytope:
    pts = parse_matrix(_require(obj, "points"))
    L = parse_lattice(obj.get("lattice"), len(pts[0]))
    try:
        return convex_hull(pts, L)
    except ValueError as e:
        raise FormatError(str(e)) from e


def dump_polytope(P: LatticePolytope, with_points: bool = False) -> dict:
    out = {
        "dim": P.dim,
        "vertices": [dump_vector(v) for v in P.vertices],
        "facets": [{"normal": dump_vector(a), "offset": dump_scalar(b)} for a, b in sorted(P.facets())],
        "equations": [{"normal": dump_vector(a), "offset": dump_scalar(b)} for a, b in sorted(P.equations())],
        "lattice": dump_lattice(P.lattice),
        "n_lattice_points": P.n_lattice_points(),
    }
    if with_points:
        out["lattice_points"] = [dump_vector(p) for p in P.lattice_points()]
    return out


def polytope_input(P: LatticePolytope) -> dict:
    """Minimal re-readable form of a polytope (its vertices)."""
    return {"points": [dump_vector(v) for v in P.vertices], "lattice": dump_lattice(P.lattice)}


def parse_cone(obj) -> RationalCone:
    gens = [parse_int_vector(g) for g in _require(obj, "generators")]
    if not gens:
        raise FormatError("cone needs generators")
    return RationalCone(gens)


def parse_ellipsoid(obj) -> tuple[Ellipsoid, AffineLattice]:
    A = parse_matrix(_require(obj, "A"))
    c = parse_vector(_require(obj, "center"))
    try:
        E = Ellipsoid(A, c)
    except ValueError as e:
        raise FormatError(str(e)) from e
    return E, parse_lattice(obj.get("lattice"), len(c))


def dump_ellipsoid(E: Ellipsoid) -> dict:
    return {"A": dump_matrix(E.A), "center": dump_vector(E.center)}


def parse_ellipsoidal_set(obj) -> EllipsoidalSet:
    """Either an ellipsoid (its lattice points are taken) or points plus a certificate."""
    if "certificate" in obj:
        E, L = parse_ellipsoid(dict(obj["certificate"], lattice=obj.get("lattice")))
        pts = [parse_vector(p) for p in _require(obj, "points")]
        return EllipsoidalSet(pts, L, E)
    E, L = parse_ellipsoid(obj)
    return EllipsoidalSet.from_ellipsoid(E, L)


def dump_ellipsoidal_set(S: EllipsoidalSet) -> dict:
    return {
        "points": [dump_vector(p) for p in S.points],
        "certificate": dump_ellipsoid(S.certificate),
        "lattice": dump_lattice(S.lattice),
        "extremal_points": [dump_vector(p) for p in S.extremal_points],
    }


def dump_cover(target: LatticePolytope, simplices: Sequence[Simplex], scope: str, verified: bool) -> dict:
    table = sorted({v for s in simplices for v in s.vertices})
    index = {v: i for i, v in enumerate(table)}
    return {
        "target": polytope_input(target),
        "points": [dump_vector(p) for p in table],
        "simplices": sorted(sorted(index[v] for v in s.vertices) for s in simplices),
        "scope": scope,
        "verified": verified,
    }


def parse_cover(obj) -> tuple[LatticePolytope, list[Simplex]]:
    P = parse_polytope(_require(obj, "target"))
    table = [parse_vector(p) for p in _require(obj, "points")]
    out = []
    for idx in _require(obj, "simplices"):
        try:
            out.append(Simplex([table[i] for i in idx], P.lattice))
        except (IndexError, TypeError) as e:
            raise FormatError("simplex refers to a missing point") from e
    return P, out


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)
