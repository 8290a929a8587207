from __future__ import annotations

from fractions import Fraction

import pytest

from twisted_chevalley.chevalley import LieVector, ad_matrix
from twisted_chevalley.errors import NotBasedAtIdentity
from twisted_chevalley.groups import GroupElement, declared_generators, exp_root, twisted_generator
from twisted_chevalley.linalg import Matrix
from twisted_chevalley.rings import finite_field_sq, gaussian_rationals, parse_ring, truncated_poly
from twisted_chevalley.roots import build_root_system, classify_orbits
from twisted_chevalley.twist import twisted_table
from twisted_chevalley.verifiers import (
    check_normalizer_sample,
    conjugation_stays_in_ring,
    finite_field_pair,
    gaussian_pair,
    lie_vector_from_ad,
    recover_root_element,
    span_closure,
    tangent_extract,
    verify_recovery,
    verify_tangent_converse,
    verify_tangent_identities,
)


def _denominator(text):
    return gaussian_rationals().parse_element(text).v[2]


def _table(kind):
    return twisted_table(build_root_system(kind))


def test_tangent_extract_of_constant_curve_is_zero():
    T = _table("A3")
    R = truncated_poly(gaussian_rationals(), 2)
    I = Matrix.identity(R, T.dim)
    assert tangent_extract(I).is_zero()


def test_tangent_extract_of_root_curve():
    T = _table("A3")
    base = gaussian_rationals()
    R = truncated_poly(base, 3)
    alpha = (0, 1, 1)
    X = tangent_extract(exp_root(T, alpha, R.variable()))
    assert X == ad_matrix(LieVector.X(T, base, alpha))


def test_tangent_extract_rejects_bad_curves():
    T = _table("A3")
    R = truncated_poly(gaussian_rationals(), 2)
    with pytest.raises(NotBasedAtIdentity):
        tangent_extract(Matrix.identity(R, T.dim).scale(R.coerce(2)))
    with pytest.raises(NotBasedAtIdentity):
        tangent_extract(Matrix.identity(gaussian_rationals(), 3))


@pytest.mark.parametrize("kind", ["A3", "A4", "D4"])
def test_tangent_identities_hold(kind):
    report = verify_tangent_identities(_table(kind))
    assert report.checks and report.passed, report.failures


def test_tangent_identity_case_coverage():
    report = verify_tangent_identities(_table("A4"))
    cases = {c.id.split("/")[1] for c in report.checks if c.id.startswith("A2")}
    assert cases == {"a", "b", "c", "d", "e"}
    cases = {c.id.split("/")[1] for c in report.checks if c.id.startswith("A1Sq")}
    assert cases == {"a", "b", "c", "d"}
    assert report.decisions["A2(e) conjugated term"] == "X-(I)"


def test_tangent_mutation_fails_with_witness():
    T = _table("A4")
    report = verify_tangent_identities(T, mutate="all")
    assert report.checks and all(not c.passed for c in report.checks)
    for c in report.checks:
        assert c.witness["nonzero_entries"] > 0
    one = verify_tangent_identities(T, mutate="A2[0,1,0,0]/a")
    assert [c.id for c in one.failures] == ["A2[0,1,0,0]/a"]


def test_tangent_converse_samples():
    report = verify_tangent_converse(_table("A4"), samples=8, seed=3)
    assert len(report.checks) == 8 and report.passed


def test_lie_vector_from_ad_round_trip():
    T = _table("D4")
    R = gaussian_rationals()
    x = LieVector(T, R, {0: R.element(1, 2), 3: R.coerce(5), 9: R.element(0, -1), 20: R.coerce(Fraction(1, 3))})
    assert lie_vector_from_ad(T, ad_matrix(x)) == x


def test_span_closure_identity_and_targets():
    R = finite_field_sq(3, 1)
    T = _table("A3")
    assert span_closure([Matrix.identity(R, T.dim)], R).dimension == 1
    res = span_closure(declared_generators(T, R), R)
    assert res.dimension == 225 and res.certified


def test_span_closure_exact_route_agrees():
    T = _table("A3")
    R = gaussian_rationals()
    gens = declared_generators(T, R)
    a = span_closure(gens, R)
    assert a.method == "modular" and a.dimension == 225 and a.certified
    b = span_closure(gens[:3], R, method="exact")
    c = span_closure(gens[:3], R)
    assert b.dimension == c.dimension < 225


@pytest.mark.parametrize("kind,desc", [("A3", "gaussian-rationals"), ("A3", "gf(3,1)"), ("A4", "gaussian-rationals"), ("A4", "gf(5,1)")])
def test_recovery_reproduces_every_root(kind, desc):
    report = verify_recovery(_table(kind), parse_ring(desc))
    assert len(report.checks) == len(_table(kind).system.roots)
    assert report.passed, report.failures


def test_recovery_without_third_fails_on_a2_only():
    report = verify_recovery(_table("A4"), parse_ring("gf(3,1)"))
    for c in report.checks:
        if c.id.startswith("A2"):
            assert not c.passed and c.witness["error"] == "NoThird"
        else:
            assert c.passed


def test_recovery_mutation_fails():
    T = _table("A3")
    report = verify_recovery(T, gaussian_rationals(), mutate="all")
    assert all(not c.passed for c in report.checks)


def test_recover_root_element_direct():
    T = _table("A3")
    R = gaussian_rationals()
    cls = next(c for c in classify_orbits(T.system, T.rho) if c.kind == "A1Sq")
    got = recover_root_element(T, cls, cls.bar, R)
    assert got == ad_matrix(LieVector.X(T, R, cls.bar))
    with pytest.raises(ValueError):
        recover_root_element(T, cls, (0, 1, 0), R)


def test_conjugation_examples():
    T = _table("A3")
    pair = gaussian_pair()
    S = pair.ext
    gens = declared_generators(T, pair.sub)
    ident = GroupElement(Matrix.identity(S, T.dim), (), T)
    assert conjugation_stays_in_ring(ident, pair, gens) == (True, None)
    cls = next(c for c in classify_orbits(T.system, T.rho) if c.kind == "A1Sq")
    inside = twisted_generator(T, cls, S.element(Fraction(1, 6), 1))
    assert conjugation_stays_in_ring(inside, pair, gens)[0]
    outside = twisted_generator(T, cls, S.coerce(Fraction(1, 5)))
    ok, witness = conjugation_stays_in_ring(outside, pair, gens)
    assert not ok
    assert _denominator(witness["value"]) % 5 == 0


def test_normalizer_sample_small():
    report = check_normalizer_sample(_table("A3"), samples=10, seed=4)
    assert report.passed
    assert len(report.checks) == 30
    for c in report.checks:
        if c.id.startswith("outside-R"):
            assert _denominator(c.witness["value"]) % 5 == 0


def test_normalizer_empty_sample():
    report = check_normalizer_sample(_table("A3"), samples=0)
    assert report.checks == [] and report.passed


def test_normalizer_finite_field_pair():
    report = check_normalizer_sample(_table("A3"), finite_field_pair(3, 1), samples=10, seed=1)
    assert report.passed


def test_converse_when_ad_has_a_kernel():
    # in characteristic 5 the Cartan element (1,2,3,4) of A4 is central
    T = _table("A4")
    R = parse_ring("gf(5,1)")
    z = LieVector(T, R, {i: R.coerce(i + 1) for i in range(4)})
    assert ad_matrix(z).is_zero()
    assert lie_vector_from_ad(T, ad_matrix(z)).is_zero()
    report = verify_tangent_converse(T, R, samples=6, seed=2)
    assert report.passed


def test_lie_vector_from_ad_rejects_non_derivations():
    T = _table("A3")
    R = gaussian_rationals()
    X = Matrix.from_entries(R, T.dim, T.dim, {(3, 3): 1, (4, 4): 5, (5, 5): 7, (6, 6): 1})
    with pytest.raises(ValueError):
        lie_vector_from_ad(T, X)
