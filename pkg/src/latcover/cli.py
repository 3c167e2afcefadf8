"""Command-line interface: one subcommand per computation, JSON in and out.

Exit codes: 0 for ok/true, 1 for a mathematically negative answer (the
payload carries a witness), 2 for usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import __version__
from . import io as wire
from .cones import is_very_ample, sebo_triangulation
from .corpus import random_ellipsoid_3d, random_pointed_cone, random_polytope_3d
from .cover import (boundary_cover, ellipsoid_cover_3d, symmetric_cover_3d, verify_boundary_layer,
                    verify_cover)
from .ellipsoid import (build_qd_family, chain_removed_points, descent_chain, ellipsoid_lattice_points,
                        stack, stack_axis_squares, verify_counterexample)
from .errors import LatcoverError, NotVeryAmple
from .exact import AffineLattice, is_direct_summand
from .normality import is_normal
from .polytope import convex_hull, gp

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class CommandResult:
    status: str  # ok | fail | error
    payload: dict
    diagnostics: list = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return {"ok": EXIT_OK, "fail": EXIT_FAIL}.get(self.status, EXIT_USAGE)

    def to_json(self) -> dict:
        return {"status": self.status, "payload": self.payload, "diagnostics": list(self.diagnostics)}


class UsageError(Exception):
    pass


def _ok(payload, diagnostics=()):
    return CommandResult("ok", payload, list(diagnostics))


def _fail(payload, diagnostics=()):
    return CommandResult("fail", payload, list(diagnostics))


# input ------------------------------------------------------------------------


def _read_json(args) -> dict:
    src = args.input
    if src.startswith("random:"):
        return _random_instance(src[len("random:"):], args.seed)
    try:
        text = sys.stdin.read() if src == "-" else open(src, encoding="utf-8").read()
    except OSError as e:
        raise UsageError(f"cannot read {src}: {e.strerror}") from e
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError(f"malformed JSON in {src}: {e}") from e
    if not isinstance(obj, dict):
        raise UsageError("input must be a JSON object")
    return obj


def _random_instance(kind: str, seed: int) -> dict:
    rng = random.Random(seed)
    if kind == "ellipsoid3":
        return wire.dump_ellipsoid(random_ellipsoid_3d(rng))
    if kind == "ellipsoid3-half":
        return wire.dump_ellipsoid(random_ellipsoid_3d(rng, half_integral_center=True))
    if kind == "polytope3":
        return wire.polytope_input(random_polytope_3d(rng))
    if kind == "cone3":
        return {"generators": [wire.dump_vector(r) for r in random_pointed_cone(rng).rays]}
    raise UsageError(f"unknown random instance kind {kind!r}")


# commands ---------------------------------------------------------------------


def cmd_hilbert_basis(args) -> CommandResult:
    C = wire.parse_cone(_read_json(args))
    hb = C.hilbert_basis().elements
    return _ok({"hilbert_basis": [wire.dump_vector(h) for h in hb], "rays": [wire.dump_vector(r) for r in C.rays],
                "supports": [wire.dump_vector(s) for s in C.supports]})


def cmd_sebo(args) -> CommandResult:
    C = wire.parse_cone(_read_json(args))
    T = sebo_triangulation(C)
    problems = T.check()
    payload = {"rays": [wire.dump_vector(r) for r in T.rays], "cones": [list(c) for c in T.cones],
               "check": problems}
    return _fail(payload) if problems else _ok(payload)


def cmd_is_normal(args) -> CommandResult:
    P = wire.parse_polytope(_read_json(args))
    rep = is_normal(P)
    payload = {"is_normal": rep.is_normal, "checked_degree": rep.checked_degree}
    if rep.witness:
        c, x = rep.witness
        payload["witness"] = {"c": c, "point": wire.dump_vector(x)}
        return _fail(payload)
    return _ok(payload)


def cmd_is_very_ample(args) -> CommandResult:
    P = wire.parse_polytope(_read_json(args))
    rep = is_very_ample(P)
    payload = {"is_very_ample": rep.is_very_ample}
    if rep.witness:
        v, h = rep.witness
        payload["witness"] = {"vertex": wire.dump_vector(v), "hilbert_element": wire.dump_vector(h)}
        return _fail(payload)
    return _ok(payload)


def cmd_gp(args) -> CommandResult:
    P = wire.parse_polytope(_read_json(args))
    G = gp(P)
    payload = {"lattice": wire.dump_lattice(G), "rank": G.rank, "equals_lattice": G == P.lattice.translation()}
    if P.lattice == AffineLattice.standard(P.ambient_dim):
        payload["direct_summand"] = is_direct_summand([tuple(int(x) for x in b) for b in G.basis], P.ambient_dim)
    return _ok(payload)


def cmd_ellipsoid_points(args) -> CommandResult:
    E, L = wire.parse_ellipsoid(_read_json(args))
    pts = ellipsoid_lattice_points(E, L, solid=not args.surface)
    return _ok({"count": len(pts), "points": [wire.dump_vector(p) for p in pts],
                "solid": not args.surface})


def cmd_hull(args) -> CommandResult:
    obj = _read_json(args)
    if "A" in obj:
        E, L = wire.parse_ellipsoid(obj)
        pts = ellipsoid_lattice_points(E, L)
        if not pts:
            return CommandResult("error", {"error": "EmptyEllipsoid"}, ["no lattice points in the ellipsoid"])
        P = convex_hull(pts, L)
    else:
        P = wire.parse_polytope(obj)
    return _ok(wire.dump_polytope(P, with_points=args.points))


def cmd_boundary_cover(args) -> CommandResult:
    P = wire.parse_polytope(_read_json(args))
    try:
        cov = boundary_cover(P)
    except NotVeryAmple as e:
        v, h = e.witness
        return _fail({"error": "NotVeryAmple", "witness": {"vertex": wire.dump_vector(v),
                                                           "hilbert_element": wire.dump_vector(h)}})
    verdict = verify_boundary_layer(cov)
    payload = wire.dump_cover(P, cov.simplices, cov.scope, bool(verdict.covered))
    if not verdict.covered:
        payload["witness"] = wire.dump_vector(verdict.witness)
        return _fail(payload)
    return _ok(payload)


def cmd_cover_ellipsoid3(args) -> CommandResult:
    E, L = wire.parse_ellipsoid(_read_json(args))
    if args.method == "chain":
        cov = ellipsoid_cover_3d(E, L)
    else:
        cov = symmetric_cover_3d(E, L)
    return _ok(wire.dump_cover(cov.target, cov.simplices, cov.scope, cov.verified), cov.diagnostics)


def cmd_verify_cover(args) -> CommandResult:
    obj = _read_json(args)
    if "payload" in obj and "status" in obj:  # output of cover-ellipsoid3 / boundary-cover
        obj = obj["payload"]
    P, simplices = wire.parse_cover(obj)
    v = verify_cover(P, simplices, method=args.method)
    payload = {"covered": v.covered, "status": v.status, "method": v.method, "cells": v.cells}
    if v.witness is not None:
        payload["witness"] = wire.dump_vector(v.witness)
    if v.covered is None:
        return CommandResult("error", payload, ["subdivision did not resolve the question"])
    return _ok(payload) if v.covered else _fail(payload)


def cmd_peel_chain(args) -> CommandResult:
    S = wire.parse_ellipsoidal_set(_read_json(args))
    chain = descent_chain(S)
    return _ok({"chain": [wire.dump_ellipsoidal_set(s) for s in chain],
                "removed": [wire.dump_vector(p) for p in chain_removed_points(chain)],
                "sizes": [len(s) for s in chain]})


def cmd_build_qd(args) -> CommandResult:
    fam = build_qd_family(args.d)
    chk = fam.corner_check
    payload = {
        "d": fam.d,
        "lattice": wire.dump_lattice(fam.lattice),
        "ball": wire.dump_ellipsoid(fam.ball),
        "n_points_P": len(fam.P_points),
        "n_points_Q": len(fam.Q_points),
        "delta_vertices": [wire.dump_vector(v) for v in fam.delta.vertices],
        "beta": wire.dump_vector(fam.beta),
        "delta_is_facet": chk["is_facet"],
        "delta_lattice_points": [wire.dump_vector(p) for p in chk["lattice_points"]],
        "inequality_solutions": [list(a) for a in chk["inequality_solutions"]],
        "ray_points": {str(k): v for k, v in fam.ray_points().items()},
    }
    if args.points:
        payload["Q_points"] = [wire.dump_vector(p) for p in fam.Q_points]
    return _ok(payload)


def cmd_verify_counterexample(args) -> CommandResult:
    r = verify_counterexample(args.d)
    payload = {
        "d": r.d,
        "target": wire.dump_vector(r.target),
        "n_points": r.n_points,
        "target_in_lattice": r.target_in_lattice,
        "target_in_dilate": r.target_in_dilate,
        "representable": r.representable,
        "gp_equals_lattice": r.gp_equals_lattice,
        "is_normal": r.normality.is_normal,
        "interior_vertex_sums_below_d": len(r.interior_sums_below_d),
    }
    if r.normality.witness:
        c, x = r.normality.witness
        payload["witness"] = {"c": c, "point": wire.dump_vector(x)}
    return _ok(payload) if r.ok else _fail(payload)


def cmd_stack(args) -> CommandResult:
    S = wire.parse_ellipsoidal_set(_read_json(args))
    b = wire.parse_scalar(args.b)
    T = stack(S, b)
    a2, b2 = stack_axis_squares(b)
    payload = wire.dump_ellipsoidal_set(T)
    payload.update({"a_squared": wire.dump_scalar(a2), "b_squared": wire.dump_scalar(b2), "size": len(T)})
    return _ok(payload)


COMMANDS: dict[str, Callable] = {
    "hilbert-basis": cmd_hilbert_basis,
    "sebo-triangulate": cmd_sebo,
    "is-normal": cmd_is_normal,
    "is-very-ample": cmd_is_very_ample,
    "gp": cmd_gp,
    "ellipsoid-points": cmd_ellipsoid_points,
    "hull": cmd_hull,
    "boundary-cover": cmd_boundary_cover,
    "cover-ellipsoid3": cmd_cover_ellipsoid3,
    "verify-cover": cmd_verify_cover,
    "peel-chain": cmd_peel_chain,
    "build-qd": cmd_build_qd,
    "verify-counterexample": cmd_verify_counterexample,
    "stack": cmd_stack,
}

_NEEDS_INPUT = {"hilbert-basis", "sebo-triangulate", "is-normal", "is-very-ample", "gp", "ellipsoid-points",
                "hull", "boundary-cover", "cover-ellipsoid3", "verify-cover", "peel-chain", "stack"}


def build_parser() -> argparse.ArgumentParser:
    def globals_(defaults: bool) -> argparse.ArgumentParser:
        # subcommands repeat the global options without defaults so either position works
        g = argparse.ArgumentParser(add_help=False)
        opt = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
        g.add_argument("--format", choices=("json", "summary"), default=opt("json"))
        g.add_argument("--seed", type=int, default=opt(0), help="seed for random:<kind> inputs")
        g.add_argument("--jobs", type=int, default=opt(1), help="worker cap (computations are single-threaded)")
        return g

    common = globals_(False)
    p = argparse.ArgumentParser(prog="latcover", description="Exact lattice polytope computations.",
                                parents=[globals_(True)])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name in _NEEDS_INPUT:
            sp.add_argument("input", nargs="?", default="-",
                            help="JSON file, '-' for stdin, or random:<kind> with --seed")
        if name == "ellipsoid-points":
            sp.add_argument("--surface", action="store_true", help="only points on the surface")
        if name == "hull":
            sp.add_argument("--points", action="store_true", help="also list all lattice points")
        if name == "cover-ellipsoid3":
            sp.add_argument("--method", choices=("chain", "symmetric"), default="chain")
        if name == "verify-cover":
            sp.add_argument("--method", choices=("arrangement", "subdivision"), default="arrangement")
        if name in ("build-qd", "verify-counterexample"):
            sp.add_argument("--d", type=int, required=True)
        if name == "build-qd":
            sp.add_argument("--points", action="store_true", help="also list the lattice points of Q(d)")
        if name == "stack":
            sp.add_argument("--b", default="1", help="rational height parameter, 1/2 < b < 3/2")
    return p


def _summary(name: str, res: CommandResult) -> str:
    lines = [f"{name}: {res.status}"]
    for k in sorted(res.payload):
        v = res.payload[k]
        shown = f"[{len(v)} items]" if isinstance(v, list) and len(v) > 6 else json.dumps(v, sort_keys=True)
        lines.append(f"  {k}: {shown}")
    lines.extend(f"  note: {d}" for d in res.diagnostics)
    return "\n".join(lines)


def run(argv: list[str] | None = None) -> tuple[CommandResult, int]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        code = e.code if isinstance(e.code, int) else EXIT_USAGE
        return CommandResult("error" if code else "ok", {}, []), code
    try:
        res = COMMANDS[args.command](args)
    except (UsageError, wire.FormatError) as e:
        res = CommandResult("error", {"error": type(e).__name__}, [str(e)])
    except LatcoverError as e:
        payload = {"error": type(e).__name__}
        if e.witness is not None:
            payload["witness"] = _jsonable(e.witness)
        res = CommandResult("error", payload, [str(e)])
    except ValueError as e:
        res = CommandResult("error", {"error": "ValueError"}, [str(e)])
    out = wire.dumps(res.to_json()) if args.format == "json" else _summary(args.command, res)
    print(out)
    return res, res.exit_code


def _jsonable(x):
    if isinstance(x, Fraction):
        return wire.dump_scalar(x)
    if isinstance(x, int) and not isinstance(x, bool):
        return wire.dump_scalar(x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(y) for y in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    return x


def main(argv: list[str] | None = None) -> int:
    _, code = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
