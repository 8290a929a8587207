from __future__ import annotations

import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twisted_chevalley.chevalley import LieVector
from twisted_chevalley.errors import NoAntifixedUnit, NoHalf, NoThird
from twisted_chevalley.rings import gaussian_rationals, parse_ring, rationals
from twisted_chevalley.roots import build_root_system, standard_rho
from twisted_chevalley.twist import (
    SigmaAlgebraMap,
    coordinates_in_twisted_basis,
    sigma_on_algebra,
    twisted_basis,
    twisted_table,
)


def _setup(kind, desc="gaussian-rationals"):
    S = build_root_system(kind)
    T = twisted_table(S)
    R = parse_ring(desc)
    return S, T, R


def test_sigma_examples_a3():
    S, T, R = _setup("A3")
    sigma = SigmaAlgebraMap(T, R)
    i = R.element(0, 1)
    assert sigma_on_algebra(sigma, LieVector.X(T, R, (0, 1, 0))) == LieVector.X(T, R, (0, 1, 0))
    assert sigma(LieVector.X(T, R, (1, 0, 0), i)) == LieVector.X(T, R, (0, 0, 1), -i)
    assert sigma(LieVector.H(T, R, 0, i)) == LieVector.H(T, R, 2, -i)


@pytest.mark.parametrize("kind,desc", [("A3", "gaussian-rationals"), ("A4", "gf(5,1)"), ("D4", "gf(3,1)")])
def test_sigma_is_an_involutive_semilinear_automorphism(kind, desc):
    from twisted_chevalley.chevalley import bracket

    S, T, R = _setup(kind, desc)
    sigma = SigmaAlgebraMap(T, R)
    rng = random.Random(11)
    for _ in range(5):
        x = LieVector(T, R, {k: R.random_element(rng) for k in rng.sample(range(T.dim), 5)})
        y = LieVector(T, R, {k: R.random_element(rng) for k in rng.sample(range(T.dim), 5)})
        c = R.random_element(rng)
        assert sigma(sigma(x)) == x
        assert sigma(bracket(x, y)) == bracket(sigma(x), sigma(y))
        assert sigma(x * c) == sigma(x) * c.bar()


@pytest.mark.parametrize("kind,count,xminus2", [("A3", 15, 0), ("A4", 24, 4), ("D4", 28, 0), ("E6", 78, 0)])
def test_twisted_basis_counts_fixedness_and_rank(kind, count, xminus2):
    S, T, R = _setup(kind)
    B = twisted_basis(S, None, R)
    assert len(B) == count == S.dim
    labels = Counter(e.label.split("[")[0] for e in B)
    assert labels["XminusII"] == xminus2
    sigma = SigmaAlgebraMap(T, R)
    for e in B:
        assert sigma(e.vector) == e.vector
    assert not B.change_matrix.det() == R.zero
    assert (B.change_matrix * B.inverse_change_matrix).is_identity()


def test_a3_basis_composition():
    S, T, R = _setup("A3")
    labels = Counter(e.label.split("[")[0] for e in twisted_basis(S, None, R))
    assert labels == {"Xplus": 8, "XminusI": 4, "Hplus": 2, "Hminus": 1}


def test_coordinates_of_basis_vectors_are_units():
    S, T, R = _setup("A4")
    B = twisted_basis(S, None, R)
    for k, e in enumerate(B):
        coords = B.coordinates(e.vector)
        assert coords == [R.one if j == k else R.zero for j in range(len(B))]


def test_coordinates_of_single_root_vector():
    S, T, R = _setup("A3")
    B = twisted_basis(S, None, R)
    a = B.a
    alpha = (1, 0, 0)
    x = LieVector.X(T, R, alpha)
    coords = coordinates_in_twisted_basis(x, B)
    expected = {"Xplus[1,0,0]": R.coerce(1) / 2, "XminusI[1,0,0]": (a * 2).inverse()}
    for e, c in zip(B, coords):
        assert c == expected.get(e.label, R.zero)
    assert B.combine(coords) == x


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["A3", "A4", "D4"]), st.sampled_from(["gaussian-rationals", "gf(5,1)", "gf(7,1)"]), st.integers(0, 10**6))
def test_coordinates_land_in_fixed_or_antifixed_part(kind, desc, seed):
    S, T, R = _setup(kind, desc)
    B = twisted_basis(S, None, R)
    sigma = B.sigma
    rng = random.Random(seed)
    y = LieVector(T, R, {k: R.random_element(rng) for k in rng.sample(range(T.dim), 6)})
    fixed = y + sigma(y)
    anti = y - sigma(y)
    for c in coordinates_in_twisted_basis(fixed, B):
        assert c.bar() == c
    for c in coordinates_in_twisted_basis(anti, B):
        assert c.bar() == -c
    assert B.combine(B.coordinates(y)) == y


def test_twisted_basis_ring_errors():
    S = build_root_system("A3")
    with pytest.raises(NoHalf):
        twisted_basis(S, None, parse_ring("gf(2,1)"))
    with pytest.raises(NoAntifixedUnit):
        twisted_basis(S, None, rationals())
    with pytest.raises(NoThird):
        twisted_basis(build_root_system("A4"), None, parse_ring("gf(3,1)"))
    assert len(twisted_basis(S, None, parse_ring("gf(3,1)"))) == 15


def test_twisted_table_is_cached_and_sign_fixed():
    S = build_root_system("D4")
    assert twisted_table(S) is twisted_table(S, None) is twisted_table(S, standard_rho("D4"))
    assert twisted_table(S).epsilon is not None
    assert parse_ring("gaussian-rationals") is gaussian_rationals()
