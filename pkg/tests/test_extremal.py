from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from extremal_lie import extremal as ex
from extremal_lie.chevalley import build_chevalley_algebra, build_structure_constants
from extremal_lie.fields import Field
from extremal_lie.roots import RootSystem
from extremal_lie.suites import root_vectors


@lru_cache(maxsize=None)
def chevalley(t, field):
    rs = RootSystem(t)
    L = build_chevalley_algebra(build_structure_constants(rs), field)
    return rs, L, root_vectors(L, rs)


@pytest.mark.parametrize("t, field", [("A2", "2"), ("A2", "3"), ("A3", "5"), ("D4", "2"), ("D4", "Q")])
def test_root_elements_are_extremal_with_g_minus_one_on_opposite_root(t, field):
    rs, L, xs = chevalley(t, field)
    f = L.field
    for a in rs.roots:
        g = ex.extremal_functional(L, xs[a])
        assert not g.is_zero
        assert g(xs[rs.neg(a)]) == f(-1)
        assert ex.in_E(L, xs[a])


def test_cartan_element_is_not_extremal():
    rs, L, xs = chevalley("A2", "5")
    a = rs.simple[0]
    h = L.bracket(xs[a], xs[rs.neg(a)])
    assert not ex.is_extremal(L, h)
    with pytest.raises(ex.NotExtremal):
        ex.extremal_functional(L, h)


def test_sum_of_root_elements_at_angle_pi_over_3_is_extremal():
    rs, L, xs = chevalley("A2", "5")
    a, b = (1, 0), (1, 1)
    assert rs.inner(a, b) == 1
    assert ex.in_E(L, L.field.reduce(xs[a] + xs[b]))


def test_orthogonal_sum_fails_only_the_double_bracket_identity_in_characteristic_2():
    rs, L, xs = chevalley("A3", "2")
    f = L.field
    x = f.reduce(xs[(1, 0, 0)] + xs[(0, 0, 1)])
    assert ex.eq1_witness(L, x, f.zeros(L.dim)) is None
    assert ex.eq2_witness(L, x, f.zeros(L.dim)) is not None
    assert not ex.is_extremal(L, x)


def test_orthogonal_sum_is_not_extremal_in_odd_characteristic():
    rs, L, xs = chevalley("A3", "3")
    x = L.field.reduce(xs[(1, 0, 0)] + xs[(0, 0, 1)])
    assert not ex.is_extremal(L, x)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_sandwich_examples(p):
    f = Field.prime(p)
    heis = oracles.heisenberg(f)
    # [L, L] is central, so every element, generators included, is a sandwich
    for i in range(3):
        v = heis.basis_vector(i)
        assert ex.is_sandwich(heis, v) and not ex.in_E(heis, v)
        assert ex.extremal_functional(heis, v).is_zero
    ab = oracles.abelian(f, 2)
    assert ex.is_sandwich(ab, ab.basis_vector(0))
    rs, L, xs = chevalley("A2", str(p))
    assert not ex.is_sandwich(L, xs[(1, 0)])


def test_heisenberg_generator_is_a_sandwich_over_Q():
    heis = oracles.heisenberg(Field.rationals())
    assert ex.is_sandwich(heis, heis.basis_vector(0))
    assert ex.is_sandwich(heis, heis.vector([1, 2, 3]))


@pytest.mark.parametrize("t, field", [("A2", "2"), ("A3", "3"), ("A2", "Q")])
def test_g_form_is_symmetric_invariant_and_matches_functionals(t, field):
    rs, L, xs = chevalley(t, field)
    f = L.field
    gens = [xs[a] for a in rs.simple] + [xs[rs.neg(a)] for a in rs.simple]
    form = ex.g_form(L, gens)
    G = form.matrix
    assert f.equal(G, G.T)
    assert ex.invariance_witness(L, G) is None
    for a in rs.roots:
        assert f.equal(form.functional(xs[a]), ex.extremal_functional(L, xs[a]).values)


def test_relation_examples_in_sl3():
    rs, L, xs = chevalley("A2", "3")
    a, b = rs.simple
    s = rs.add(a, b)
    assert ex.relation(L, xs[a], L.field.scale(xs[a], 2)) == ex.E_M2
    assert ex.relation(L, xs[a], xs[s]) == ex.E_M1
    assert ex.relation(L, xs[a], xs[b]) == ex.E_1
    assert ex.relation(L, xs[a], xs[rs.neg(a)]) == ex.E_2


def test_relation_zero_for_orthogonal_roots():
    rs, L, xs = chevalley("A3", "2")
    assert ex.relation(L, xs[(1, 0, 0)], xs[(0, 0, 1)]) == ex.E_0


def test_exp_map_examples():
    rs, L, xs = chevalley("A2", "5")
    f = L.field
    a = rs.simple[0]
    g = ex.extremal_functional(L, xs[a])
    assert f.equal(ex.exp_map(L, xs[a], g, 0).matrix, L.identity())
    E = ex.exp_map(L, xs[a], g, 1)
    h = L.bracket(xs[a], xs[rs.neg(a)])
    # y + [x, y] + g(y) x with y = x_-a
    want = f.reduce(xs[rs.neg(a)] + h - xs[a])
    assert f.equal(E(xs[rs.neg(a)]), want)
    assert f.equal(E(xs[a]), xs[a])


def test_exp_map_rejects_mismatched_functional():
    rs, L, xs = chevalley("A2", "5")
    g = ex.extremal_functional(L, xs[(1, 0)])
    with pytest.raises(ex.ExtremalError):
        ex.exp_map(L, xs[(0, 1)], g, 1)


def test_one_parameter_law_all_parameters_over_F5():
    rs, L, xs = chevalley("A2", "5")
    f = L.field
    x = xs[(1, 1)]
    g = ex.extremal_functional(L, x)
    for lam in f.elements():
        for mu in f.elements():
            lhs = f.matmul(ex.exp_matrix(L, x, g.values, lam), ex.exp_matrix(L, x, g.values, mu))
            assert f.equal(lhs, ex.exp_matrix(L, x, g.values, f.add(lam, mu)))


def test_rescaling_law_and_wrong_functional_control():
    rs, L, xs = chevalley("A2", "3")
    x = xs[(1, 0)]
    for mu in (1, 2):
        for lam in (0, 1, 2):
            assert ex.exp_rescaling_law(L, x, mu, lam)
    gx = ex.extremal_functional(L, x).values
    # g_{2x} = 2 g_x; keeping g_x breaks the law
    assert not ex.exp_rescaling_law(L, x, 2, 1, g_scaled=gx)
    with pytest.raises(ex.ExtremalError):
        ex.exp_rescaling_law(L, x, 0, 1)


def _conjugate(L, rs, xs, word):
    """Image of x_(1,0) under a product of root exponentials."""
    f = L.field
    y = xs[rs.simple[0]]
    for k, lam in word:
        a = rs.roots[k]
        g = ex.extremal_functional(L, xs[a])
        y = f.reduce(f.matmul(ex.exp_matrix(L, xs[a], g.values, lam), y))
    return y


words = st.lists(st.tuples(st.integers(0, 5), st.integers(0, 4)), min_size=1, max_size=6)


@settings(max_examples=40, deadline=None)
@given(words, words)
def test_conjugates_of_root_elements_are_extremal_and_relations_symmetric(w1, w2):
    rs, L, xs = chevalley("A2", "5")
    f = L.field
    x, y = _conjugate(L, rs, xs, w1), _conjugate(L, rs, xs, w2)
    gx, gy = ex.extremal_functional(L, x), ex.extremal_functional(L, y)
    assert ex.in_E(L, x) and ex.in_E(L, y)
    assert gx(y) == gy(x)
    r = ex.relation(L, x, y)
    assert r == ex.relation(L, y, x)
    if f.is_zero(L.bracket(x, y)):
        assert gx(y) == 0 and r <= 0
    # g_x is forced by [x,[x,y]] = 2g(y)x in odd characteristic
    assert f.equal(L.bracket(x, L.bracket(x, y)), f.scale(x, 2 * gx(y)))


@settings(max_examples=25, deadline=None)
@given(words)
def test_conjugates_satisfy_both_identities_in_characteristic_2(w):
    rs, L, xs = chevalley("A2", "2")
    x = _conjugate(L, rs, xs, [(k, lam % 2) for k, lam in w])
    g = ex.extremal_functional(L, x)
    assert ex.eq1_witness(L, x, g.values) is None
    assert ex.eq2_witness(L, x, g.values) is None
    assert not g.is_zero


def test_zero_is_rejected():
    rs, L, xs = chevalley("A2", "3")
    with pytest.raises(ex.ExtremalError):
        ex.extremal_functional(L, L.field.zeros(L.dim))
