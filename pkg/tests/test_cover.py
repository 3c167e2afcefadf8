import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from latcover.cones import is_very_ample
from latcover.corpus import non_very_ample_polytopes_3d, normal_polytopes_3d, random_ellipsoid_3d
from latcover.cover import (boundary_cover, boundary_samples, ellipsoid_cover_3d, facet_triangulation,
                            johnson_witness, join_cover, prune_cover, symmetric_cover_3d, verify_boundary_layer,
                            verify_cover, verify_neighborhood)
from latcover.ellipsoid import Ellipsoid, ball_b
from latcover.errors import (CenterNotHalfIntegral, NotVeryAmple, PointNotOnBoundary, PreconditionUnmet,
                             PointOutsidePolytope)
from latcover.polytope import Simplex, convex_hull

H = Fraction(1, 2)
CUBE = list(product((0, 1), repeat=3))
SQUARE = [(0, 0), (1, 0), (0, 1), (1, 1)]
REEVE = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 2)]
FIVE_TETS = [
    [(0, 0, 0), (1, 1, 0), (1, 0, 1), (0, 1, 1)],
    [(1, 0, 0), (0, 0, 0), (1, 1, 0), (1, 0, 1)],
    [(0, 1, 0), (0, 0, 0), (1, 1, 0), (0, 1, 1)],
    [(0, 0, 1), (0, 0, 0), (1, 0, 1), (0, 1, 1)],
    [(1, 1, 1), (1, 1, 0), (1, 0, 1), (0, 1, 1)],
]


def _well_formed(cover):
    P = cover.target
    for s in cover.simplices:
        assert s.is_unimodular()
        assert all(P.contains(v) for v in s.vertices)


def test_verify_examples():
    sq = convex_hull(SQUARE)
    two = [Simplex([(0, 0), (1, 0), (1, 1)]), Simplex([(0, 0), (0, 1), (1, 1)])]
    assert verify_cover(sq, two).covered
    v = verify_cover(sq, two[:1])
    assert v.covered is False and sq.contains(v.witness)
    x, y = v.witness
    assert y > x  # the missing half
    cube = convex_hull(CUBE)
    assert verify_cover(cube, [Simplex(t) for t in FIVE_TETS]).covered
    assert verify_cover(cube, [Simplex(t) for t in FIVE_TETS[1:]]).covered is False


def test_verify_rejects_simplices_outside():
    sq = convex_hull(SQUARE)
    with pytest.raises(PointOutsidePolytope):
        verify_cover(sq, [Simplex([(0, 0), (2, 0), (0, 1)])])


@pytest.mark.parametrize("drop", range(5))
def test_methods_agree(drop):
    cube = convex_hull(CUBE)
    tets = [Simplex(t) for i, t in enumerate(FIVE_TETS) if i != drop]
    a = verify_cover(cube, tets, method="arrangement")
    b = verify_cover(cube, tets, method="subdivision")
    assert a.covered is False
    assert b.covered in (False, None)
    if b.covered is False:
        assert not any(_inside(b.witness, t) for t in tets)


def _inside(x, s):
    from latcover.cover import _Cell
    return _Cell(s.lattice_vertices).contains(tuple(Fraction(c) for c in x))


def test_facet_triangulation():
    assert len(facet_triangulation(convex_hull(SQUARE))) == 2
    tris = facet_triangulation(convex_hull([(0, 0), (2, 0), (0, 2)]))
    assert len(tris) == 4 and all(t.is_unimodular() for t in tris)
    assert len(facet_triangulation(convex_hull([(0, 0), (3, 0)]))) == 3
    assert len(facet_triangulation(convex_hull([(1, 1)]))) == 1


def test_join_cover_on_cube():
    cube = convex_hull(CUBE)
    assert len(join_cover((0, 0, 0), cube)) == 1
    for x in [(H, 0, 0), (H, H, 0)]:
        J = join_cover(x, cube)
        assert J and all(s.is_unimodular() for s in J)
        assert verify_neighborhood(cube, J, x, Fraction(1, 16)).covered
    with pytest.raises(PointNotOnBoundary):
        join_cover((H, H, H), cube)


def test_boundary_cover_cube():
    cov = boundary_cover(convex_hull(CUBE))
    _well_formed(cov)
    corners = {frozenset(s.vertices) for s in cov.simplices}
    for v in CUBE:
        nbrs = [tuple(v[j] if j != i else 1 - v[i] for j in range(3)) for i in range(3)]
        assert frozenset(tuple(map(Fraction, p)) for p in [v] + nbrs) in corners
    assert verify_boundary_layer(cov).covered


def test_boundary_cover_reeve():
    with pytest.raises(NotVeryAmple) as exc:
        boundary_cover(convex_hull(REEVE))
    assert exc.value.witness == ((0, 0, 0), (1, 1, 1))


def test_boundary_cover_iff_very_ample():
    rng = random.Random(3)
    for P in non_very_ample_polytopes_3d(rng, 3):
        with pytest.raises(NotVeryAmple):
            boundary_cover(P)
    for P in normal_polytopes_3d(rng, 3):
        assert is_very_ample(P)
        boundary_cover(P)


def _covered_at_some_scale(P, simplices, x):
    f = Fraction(1, 16)
    while f >= Fraction(1, 1024):
        if verify_neighborhood(P, simplices, x, f).covered:
            return True
        f /= 2
    return False


@given(st.integers(0, 10 ** 6))
@settings(max_examples=6, deadline=None)
def test_boundary_samples_have_covered_neighborhoods(seed):
    P = next(normal_polytopes_3d(random.Random(seed), 1, max_points=20))
    cov = boundary_cover(P)
    for x in boundary_samples(P):
        assert _covered_at_some_scale(P, cov.simplices, x)


def test_ellipsoid_cover_examples():
    cube = ellipsoid_cover_3d(ball_b(3))
    assert cube.verified and len(cube.target.vertices) == 8
    _well_formed(cube)
    octa = ellipsoid_cover_3d(Ellipsoid.ball((0, 0, 0), 1))
    assert verify_cover(octa.target, octa.simplices).covered
    _well_formed(octa)


@pytest.mark.parametrize("seed", range(3))
def test_ellipsoid_cover_random(seed):
    E = random_ellipsoid_3d(random.Random(seed), max_points=20)
    cov = ellipsoid_cover_3d(E)
    _well_formed(cov)
    assert verify_cover(cov.target, cov.simplices).covered
    # every lattice point is a vertex of the cover or lies in it
    verts = {v for s in cov.simplices for v in s.vertices}
    assert all(p in verts or any(_inside(cov.target.lattice.to_lattice(p), s) for s in cov.simplices)
               for p in cov.target.lattice_points())


def test_symmetric_cover_examples():
    octa = symmetric_cover_3d(Ellipsoid.ball((0, 0, 0), 1))
    assert len(octa.simplices) == 8
    assert all((0, 0, 0) in s.vertices for s in octa.simplices)
    cube = symmetric_cover_3d(ball_b(3))
    assert cube.verified and verify_cover(cube.target, cube.simplices).covered
    E = Ellipsoid([[Fraction(1, 3), 0, 0], [0, H, 0], [0, 0, 1]], (0, 0, 0))  # 2x^2+3y^2+6z^2 <= 6
    cov = symmetric_cover_3d(E)
    _well_formed(cov)
    with pytest.raises(CenterNotHalfIntegral):
        symmetric_cover_3d(Ellipsoid.ball((Fraction(1, 3), 0, 0), 2))


def test_prune_keeps_cover():
    cube = convex_hull(CUBE)
    cov = boundary_cover(cube)
    kept = prune_cover(cube, cov.simplices)
    assert len(kept) <= len(cov.simplices)
    assert verify_cover(cube, kept).covered


def test_johnson_witness():
    circ = Ellipsoid.ball((H, H), H)  # circumcircle of (0,0), (1,0), (0,1)
    p = johnson_witness(circ, (Fraction(3, 10), Fraction(7, 10)))
    assert circ.translated((Fraction(3, 10), Fraction(7, 10))).contains(p)
    assert johnson_witness(circ, (0, 0)) in [(0, 0), (1, 0), (0, 1), (1, 1)]
    with pytest.raises(PreconditionUnmet):
        johnson_witness(Ellipsoid.ball((H, 0), Fraction(1, 4)), (0, 0))
