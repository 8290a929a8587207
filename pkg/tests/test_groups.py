from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relations import additivity_failures, commutator_failures, symbolic_pair, torus_action_failures
from twisted_chevalley.errors import NoHalf, NotInvertible, ParamConstraintViolated, RingMismatch
from twisted_chevalley.groups import (
    Character,
    conjugate_character,
    declared_generators,
    declared_parameters,
    evaluate_word,
    exp_root,
    is_self_conjugate,
    sigma_on_group,
    torus_element,
    twisted_generator,
    w_and_h,
    word_product,
)
from twisted_chevalley.linalg import Matrix
from twisted_chevalley.rings import gaussian_rationals, parse_ring, truncated_poly
from twisted_chevalley.roots import build_root_system, classify_orbits
from twisted_chevalley.twist import twisted_table


def _table(kind):
    return twisted_table(build_root_system(kind))


def _classes(kind, which):
    T = _table(kind)
    return [c for c in classify_orbits(T.system, T.rho) if c.kind == which]


def test_exp_root_basics():
    T = _table("A3")
    R = gaussian_rationals()
    alpha = (1, 1, 0)
    t = R.element(2, -3)
    assert exp_root(T, alpha, R.zero).is_identity()
    assert (exp_root(T, alpha, t) * exp_root(T, alpha, -t)).is_identity()
    assert exp_root(T, alpha, t).matrix.det() == R.one
    assert exp_root(T, alpha, t).inverse() == exp_root(T, alpha, -t)


def test_exp_root_errors():
    T = _table("A3")
    with pytest.raises(NoHalf):
        exp_root(T, (1, 0, 0), parse_ring("gf(2,1)").one)
    with pytest.raises(RingMismatch):
        exp_root(T, (1, 0, 0), 3)


@pytest.mark.parametrize("kind", ["A3", "A4"])
def test_relations_exhaustive(kind):
    T = _table(kind)
    assert additivity_failures(T) == []
    assert torus_action_failures(T, [2, -3, 5, 7][: T.rank]) == []
    assert commutator_failures(T) == []


def test_commutator_detects_a_wrong_sign():
    T = _table("A3")
    R, t, u = symbolic_pair(5)
    a, b = (1, 0, 0), (0, 1, 0)
    comm = exp_root(T, a, t) * exp_root(T, b, u) * exp_root(T, a, -t) * exp_root(T, b, -u)
    s = (1, 1, 0)
    assert comm == exp_root(T, s, t * u * T.N[(a, b)])
    assert comm != exp_root(T, s, -t * u * T.N[(a, b)])


@pytest.mark.parametrize("kind", ["A3", "A4", "D4"])
def test_sigma_of_root_element_is_conjugate_root_element(kind):
    T = _table(kind)
    R = truncated_poly(gaussian_rationals(), 3)
    s = R.variable()
    t = s * R.coerce(gaussian_rationals().element(1, 2)) + s * s * R.coerce(gaussian_rationals().element(0, 1))
    for alpha in T.system.roots:
        lhs = sigma_on_group(exp_root(T, alpha, t))
        assert lhs == exp_root(T, T.rho(alpha), t.bar() * T.epsilon[alpha])


def test_a1sq_generator_with_imaginary_parameter():
    T = _table("A3")
    R = gaussian_rationals()
    i = R.element(0, 1)
    cls = _classes("A3", "A1Sq")[0]
    g = twisted_generator(T, cls, i)
    assert g == exp_root(T, cls.representative, i) * exp_root(T, cls.bar, -i)
    assert sigma_on_group(g) == g


def test_a2_generator_parameters():
    T = _table("A4")
    R = gaussian_rationals()
    a = R.antifixed_unit()
    cls = _classes("A4", "A2")[0]
    for t, u in [(R.one, R.one / 2), (R.zero, a), (R.element(1, 1), R.element(1, 5))]:
        g = twisted_generator(T, cls, t, u)
        assert sigma_on_group(g) == g
        assert g.matrix.det() == R.one
    with pytest.raises(ParamConstraintViolated):
        twisted_generator(T, cls, R.one, R.one)
    with pytest.raises(ParamConstraintViolated):
        twisted_generator(T, cls, R.one)
    # the constraint is necessary: dropping it breaks sigma-fixedness
    g = twisted_generator(T, cls, R.one, R.one, check=False)
    assert sigma_on_group(g) != g


def test_a1_generator_rejects_non_fixed_parameter():
    T = _table("A3")
    R = gaussian_rationals()
    with pytest.raises(ParamConstraintViolated):
        twisted_generator(T, _classes("A3", "A1")[0], R.element(0, 1))


@pytest.mark.parametrize("kind,desc", [("A3", "gaussian-rationals"), ("A3", "gf(3,1)"), ("A4", "gf(5,1)"), ("D4", "gaussian-rationals")])
def test_declared_generators_are_sigma_fixed_unimodular(kind, desc):
    T = _table(kind)
    R = parse_ring(desc)
    gens = declared_generators(T, R)
    for cls in classify_orbits(T.system, T.rho):
        for t, u in declared_parameters(cls, R):
            if cls.kind == "A2":
                assert u + u.bar() == t * t.bar()
    for g in gens:
        assert sigma_on_group(g) == g
        assert g.matrix.det() == R.one
        assert evaluate_word(T, R, g.inverse().word) == g.inverse().matrix


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_words_re_evaluate_to_their_matrices(seed):
    T = _table("A4")
    R = gaussian_rationals()
    rng = random.Random(seed)
    gens = declared_generators(T, R)
    g = word_product([rng.choice(gens) for _ in range(4)])
    g = g * g.inverse().inverse() * sigma_on_group(g)
    assert evaluate_word(T, R, g.word) == g.matrix
    assert (g * g.inverse()).is_identity()


def test_w_and_h():
    T = _table("A3")
    R = gaussian_rationals()
    S = T.system
    alpha = (0, 1, 1)
    w1, h1 = w_and_h(T, alpha, R.one)
    assert h1.is_identity()
    assert (w1.matrix**4).is_identity()
    t = R.element(2, 1)
    w, h = w_and_h(T, alpha, t)
    assert h.matrix.is_diagonal()
    for beta in S.roots:
        k = T.root_index(beta)
        assert h.matrix[k, k] == t ** S.inner(beta, alpha)
    assert h == torus_element(T, Character.coroot(T, alpha, t))
    with pytest.raises(NotInvertible):
        w_and_h(T, alpha, R.zero)


def test_torus_elements():
    T = _table("A3")
    R = gaussian_rationals()
    assert torus_element(T, Character.trivial(R, 3)).is_identity()
    c1 = Character((R.element(1, 1), R.coerce(3), R.element(0, 2)))
    c2 = Character((R.coerce(5), R.element(2, -1), R.one))
    assert torus_element(T, c1 * c2) == torus_element(T, c1) * torus_element(T, c2)
    assert sigma_on_group(torus_element(T, c1)) == torus_element(T, conjugate_character(T, c1))
    with pytest.raises(NotInvertible):
        Character((R.zero, R.one, R.one))


def test_self_conjugate_characters():
    T = _table("A3")
    R = gaussian_rationals()
    z = R.element(2, 3)
    i = R.element(0, 1)
    assert is_self_conjugate(T, Character.trivial(R, 3))
    assert is_self_conjugate(T, Character((z, R.coerce(7), z.bar())))
    assert not is_self_conjugate(T, Character((i, R.one, i)))
    chi = Character((z, R.coerce(7), z.bar()))
    h = torus_element(T, chi)
    assert sigma_on_group(h) == h


def test_group_element_equality_is_matrix_equality():
    T = _table("A3")
    R = gaussian_rationals()
    g = exp_root(T, (1, 0, 0), R.one) * exp_root(T, (1, 0, 0), R.one)
    h = exp_root(T, (1, 0, 0), R.coerce(2))
    assert g == h and g.word != h.word
    assert isinstance(g.matrix, Matrix)
