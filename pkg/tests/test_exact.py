from fractions import Fraction
from itertools import combinations, product
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from latcover.errors import NotSublattice, PointNotInLattice
from latcover.exact import (AffineLattice, det_int, elementary_divisors, hnf, is_direct_summand, lattice_index,
                            matmul, primitive, snf)

small = st.integers(-6, 6)


def matrices(max_rows=4, max_cols=4):
    return st.integers(1, max_rows).flatmap(
        lambda m: st.integers(1, max_cols).flatmap(
            lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=m, max_size=m)))


def _is_unimodular(U):
    return abs(det_int(U)) == 1


def _determinantal_divisor(M, k):
    """gcd of all k x k minors; an oracle for Smith invariants independent of elimination."""
    g = 0
    for rows in combinations(range(len(M)), k):
        for cols in combinations(range(len(M[0])), k):
            g = gcd(g, det_int([[M[i][j] for j in cols] for i in rows]))
    return g


@given(matrices())
def test_hnf_shape(M):
    H, U = hnf(M)
    assert _is_unimodular(U)
    assert [list(r) for r in matmul(U, M)] == [list(r) for r in H]
    last = -1
    seen_zero = False
    for row in H:
        nz = [j for j, x in enumerate(row) if x]
        if not nz:
            seen_zero = True
            continue
        assert not seen_zero, "zero rows must come last"
        p = nz[0]
        assert p > last and row[p] > 0
        for above in H[: H.index(row)]:
            assert 0 <= above[p] < row[p]
        last = p


@given(matrices())
def test_hnf_is_canonical(M):
    # left-multiplying by a unimodular matrix does not change the row HNF
    m = len(M)
    E = [[int(i == j) for j in range(m)] for i in range(m)]
    if m > 1:
        E[0][1] = 3
    H1, _ = hnf(M)
    H2, _ = hnf(matmul(E, M))
    assert H1 == H2


@given(matrices())
@settings(max_examples=60)
def test_snf_against_minors(M):
    S, U, V = snf(M)
    assert _is_unimodular(U) and _is_unimodular(V)
    assert [list(r) for r in matmul(matmul(U, M), V)] == [list(r) for r in S]
    diag = elementary_divisors(M)
    for a, b in zip(diag, diag[1:]):
        assert b % a == 0
    prod = 1
    for k in range(1, min(len(M), len(M[0])) + 1):
        if k <= len(diag):
            prod *= diag[k - 1]
            assert prod == _determinantal_divisor(M, k)
        else:
            assert _determinantal_divisor(M, k) == 0


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=3, max_size=3))
def test_index_counts_cosets(rows):
    if det_int(rows) == 0:
        return
    sub = AffineLattice(rows)
    idx = lattice_index(sub, AffineLattice.standard(3))
    assert idx == abs(det_int(rows))
    if idx > 12:
        return
    # brute force: Z^3 is covered by the box [0, idx)^3, so count residues there
    residues = {tuple(c - (c.numerator // c.denominator) for c in sub.coordinates(x))
                for x in product(range(idx), repeat=3)}
    assert len(residues) == idx


def test_index_of_half_integer_lattice():
    assert lattice_index(AffineLattice.standard(4), AffineLattice.half_integer(4)) == 2
    with pytest.raises(NotSublattice):
        lattice_index(AffineLattice.half_integer(4), AffineLattice.standard(4))


def test_direct_summand():
    assert is_direct_summand([(1, 0, 0), (0, 1, 0)], 3)
    assert not is_direct_summand([(2, 0, 0)], 3)
    assert not is_direct_summand([(1, 1, 0), (1, -1, 0)], 3)
    assert is_direct_summand([], 3)


@given(st.lists(small, min_size=1, max_size=5))
def test_primitive(v):
    if not any(v):
        return
    p = primitive(v)
    g = 0
    for x in p:
        g = gcd(g, x)
    assert g == 1
    k = next(a // b for a, b in zip(v, p) if b)
    assert k > 0 and tuple(k * x for x in p) == tuple(v)


def test_half_integer_membership():
    L = AffineLattice.half_integer(3)
    h = Fraction(1, 2)
    assert (h, h, h) in L and (1, 0, 2) in L
    assert (h, 0, 0) not in L
    with pytest.raises(PointNotInLattice):
        L.to_lattice((h, 0, 0))
    for y in product(range(-2, 3), repeat=3):
        assert L.to_lattice(L.to_ambient(y)) == y


def test_lattice_equality_is_basis_independent():
    A = AffineLattice([(1, 0), (0, 1)])
    B = AffineLattice([(1, 1), (0, 1)])
    assert A == B
    assert AffineLattice([(2, 0), (0, 1)]) != A
    assert AffineLattice([(1, 0), (0, 1)], shift=(3, 4)) == A
    assert AffineLattice([(1, 0), (0, 1)], shift=(Fraction(1, 2), 0)) != A


@given(st.lists(st.integers(1, 3), min_size=3, max_size=3), st.lists(st.integers(1, 3), min_size=3, max_size=3),
       st.integers(-2, 2))
def test_index_is_multiplicative(a, b, t):
    # nested chain C < B < A built from diagonal scalings and a shear
    shear = [[1, t, 0], [0, 1, 0], [0, 0, 1]]
    A = AffineLattice(shear)
    B = AffineLattice(matmul([[a[0], 0, 0], [0, a[1], 0], [0, 0, a[2]]], shear))
    C = AffineLattice(matmul([[a[0] * b[0], 0, 0], [0, a[1] * b[1], 0], [0, 0, a[2] * b[2]]], shear))
    assert lattice_index(C, B) * lattice_index(B, A) == lattice_index(C, A)


def test_spec_normal_form_examples():
    H, _ = hnf([[1, 1, 2], [1, 0, 0], [0, 1, 0]])
    assert abs(det_int(H)) == 2
    assert elementary_divisors([(1, 0, 0), (0, 1, 0), (1, 1, 2)]) == [1, 1, 2]
    assert not is_direct_summand([(1, 0, 0), (0, 1, 0), (1, 1, 2)], 3)
    assert is_direct_summand([(1, 1)], 2)
    assert primitive((2, 4, 6)) == (1, 2, 3) and primitive((-2, 2)) == (-1, 1)
    assert lattice_index(AffineLattice([(2, 0), (0, 2)]), AffineLattice.standard(2)) == 4
