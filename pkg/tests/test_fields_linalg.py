from fractions import Fraction
import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from extremal_lie import linalg
from extremal_lie.fields import Field, FieldArithmeticError, is_prime


F2, F3, F5, F7, Q = (Field.prime(2), Field.prime(3), Field.prime(5), Field.prime(7), Field.rationals())


def test_scalar_examples():
    assert F2.add(1, 1) == 0
    assert Q.mul(Fraction(1, 2), Fraction(2, 3)) == Fraction(1, 3)
    assert F5.div(2, 3) == 4
    assert F3(-1) == 2
    assert F5(Fraction(1, 2)) == 3


def test_parse_and_names():
    assert Field.parse("Q") == Q and Field.parse("F5") == F5 and Field.parse(7) == F7
    assert str(Q) == "Q" and str(F2) == "F2"
    with pytest.raises(ValueError):
        Field.prime(4)
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]


def test_division_by_zero_raises():
    for f in (F2, F5, Q):
        with pytest.raises(FieldArithmeticError):
            f.inv(0)
        with pytest.raises(FieldArithmeticError):
            f.div(1, 0)


@pytest.mark.parametrize("f", [F2, F3, F5, F7], ids=str)
def test_field_axioms_exhaustive_small_primes(f):
    els = f.elements()
    for a, b, c in itertools.product(els, repeat=3):
        assert f.add(a, f.add(b, c)) == f.add(f.add(a, b), c)
        assert f.mul(a, f.mul(b, c)) == f.mul(f.mul(a, b), c)
        assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
    for a in f.nonzero_elements():
        assert f.mul(a, f.inv(a)) == 1
    for a in els:
        assert f.add(a, f.neg(a)) == 0


fractions = st.fractions(max_denominator=50).filter(lambda x: abs(x.numerator) < 10**6)


@given(fractions, fractions, fractions)
def test_rational_field_axioms(a, b, c):
    assert Q.mul(a, Q.add(b, c)) == Q.add(Q.mul(a, b), Q.mul(a, c))
    assert Q.add(a, Q.neg(a)) == 0
    if a != 0:
        assert Q.mul(a, Q.inv(a)) == 1


def test_kernel_examples():
    assert linalg.kernel(F5, F5.eye(3)).shape == (3, 0)
    assert linalg.kernel(F3, F3.zeros((2, 3))).shape == (3, 3)
    # the A2 Cartan matrix is singular mod 3 with kernel spanned by (1, -1)
    cartan = [[2, -1], [-1, 2]]
    k = linalg.kernel(F3, cartan)
    assert k.shape == (2, 1) and F3.equal(k[:, 0], F3.reduce([-1, 1]))
    assert linalg.kernel(Q, Q.array(cartan)).shape == (2, 0)


def test_solve_examples():
    sol = linalg.solve(F2, [[1, 1], [0, 1]], [0, 1])
    assert sol.unique and list(sol.x) == [1, 1]
    assert linalg.solve(F3, [[1, 1], [1, 1]], [0, 1]) is None
    sol = linalg.solve(Q, Q.array([[2, 0], [0, 3]]), Q.array([1, 1]))
    assert list(sol.x) == [Fraction(1, 2), Fraction(1, 3)]
    assert linalg.solve(F5, [[1, 2, 3]], [1]).nullity == 2


def test_rank_examples():
    assert linalg.rank(F2, [[1, 1], [1, 1]]) == 1
    assert linalg.rank(Q, Q.array([[1, 2], [3, 4]])) == 2
    assert linalg.rank(F2, [[1, 2], [3, 4]]) == 1


def test_span_helpers():
    basis, piv = linalg.row_basis(F5, [[1, 2, 0], [0, 0, 1]])
    assert linalg.in_span(F5, basis, piv, [2, 4, 3])
    assert not linalg.in_span(F5, basis, piv, [0, 1, 0])
    assert linalg.same_span(F5, [[1, 2, 0], [0, 0, 1]], [[1, 2, 1], [2, 4, 0]])


@st.composite
def prime_matrices(draw):
    p = draw(st.sampled_from([2, 3, 5, 7, 101]))
    rows, cols = draw(st.integers(1, 6)), draw(st.integers(1, 6))
    m = draw(st.lists(st.lists(st.integers(0, p - 1), min_size=cols, max_size=cols),
                      min_size=rows, max_size=rows))
    return Field.prime(p), np.array(m, dtype=np.int64)


@settings(max_examples=150)
@given(prime_matrices())
def test_rank_nullity_over_prime_fields(data):
    f, m = data
    k = linalg.kernel(f, m)
    assert linalg.rank(f, m) + k.shape[1] == m.shape[1]
    assert f.is_zero(f.matmul(m, k))
    if k.shape[1]:
        assert linalg.rank(f, k.T) == k.shape[1]


@settings(max_examples=60)
@given(st.lists(st.lists(st.integers(-5, 5), min_size=4, max_size=4), min_size=1, max_size=4),
       st.lists(st.integers(-5, 5), min_size=4, max_size=4))
def test_rank_nullity_and_solve_over_rationals(rows, x):
    m = Q.array(rows)
    k = linalg.kernel(Q, m)
    assert linalg.rank(Q, m) + k.shape[1] == 4
    b = Q.matmul(m, Q.array(x))
    sol = linalg.solve(Q, m, b)
    assert sol is not None and Q.equal(Q.matmul(m, sol.x), b)
    assert sol.nullity == k.shape[1]
