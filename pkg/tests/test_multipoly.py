import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from translab.multipoly import MultiPoly, TermCapExceeded

x1, x2, x3 = (MultiPoly.var(3, j) for j in (1, 2, 3))


def test_zero_coefficients_not_stored():
    p = MultiPoly(2, {(1, 0): 3, (0, 1): 0})
    assert p.terms == {(1, 0): 3}
    assert (x1 - x1).terms == {}
    assert MultiPoly(2).degree == -1


def test_validation():
    with pytest.raises(ValueError):
        MultiPoly(0)
    with pytest.raises(ValueError):
        MultiPoly(2, {(1,): 1})
    with pytest.raises(ValueError):
        MultiPoly(2, {(-1, 0): 1})
    with pytest.raises(TypeError):
        MultiPoly(1, {(1,): 1.5})
    with pytest.raises(ValueError):
        MultiPoly.var(2, 3)
    with pytest.raises(ValueError):
        MultiPoly.var(2, 1) + MultiPoly.var(3, 1)


def test_arithmetic():
    p = (x1 + x2) * (x1 - x2)
    assert p == x1 * x1 - x2 * x2
    assert p.degree == 2
    assert (2 * x3 + 1).terms == {(0, 0, 1): 2, (0, 0, 0): 1}
    assert x1.mul_var(2) == x1 * x2
    assert 1 - x1 == -(x1 - 1)


def test_big_integers_stay_exact():
    p = MultiPoly.const(1, 2**200) * MultiPoly.var(1, 1)
    assert p.max_abs_coeff == 2**200


def test_canonical_text_grlex():
    p = x3 + 5 * x1 * x1 - 2 * x1 * x2 + 7
    # degree first, then lexicographic on exponents
    assert p.to_text() == "5*x1^2 + -2*x1^1*x2^1 + 1*x3^1 + 7"
    assert MultiPoly(3).to_text() == "0"


def test_text_examples_n2():
    n2 = MultiPoly.var(2, 1), MultiPoly.var(2, 2)
    assert (n2[1] - n2[0] * n2[0]).to_text() == "-1*x1^2 + 1*x2^1"
    assert (-(n2[0] * n2[1])).to_text() == "-1*x1^1*x2^1"


poly_terms = st.dictionaries(
    st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(0, 4)),
    st.integers(-10**20, 10**20), max_size=12)


@given(poly_terms)
def test_text_round_trip(terms):
    p = MultiPoly(3, terms)
    assert MultiPoly.from_text(p.to_text(), 3) == p


@given(poly_terms, poly_terms)
def test_ring_identities(a, b):
    p, q = MultiPoly(3, a), MultiPoly(3, b)
    assert p + q == q + p
    assert p * q == q * p
    assert (p - q) + q == p
    if p.terms and q.terms:
        assert (p * q).degree == p.degree + q.degree


@settings(max_examples=50)
@given(poly_terms, st.tuples(*[st.integers(-5, 5)] * 3))
def test_exact_evaluation_integer_points(terms, pt):
    p = MultiPoly(3, terms)
    oracle = sum(v * pt[0] ** e[0] * pt[1] ** e[1] * pt[2] ** e[2] for e, v in terms.items())
    assert p.evaluate_exact(pt) == complex(float(Fraction(oracle)), 0.0)


def test_exact_vs_float_evaluation():
    rng = random.Random(3)
    p = (x1 - x2) * (x1 + x3) * (x2 - 3 * x3)
    for _ in range(20):
        pt = [complex(rng.uniform(-2, 2), rng.uniform(-2, 2)) for _ in range(3)]
        assert abs(p(pt) - p.evaluate_exact(pt)) <= 1e-12 * max(1.0, abs(p.evaluate_exact(pt)))


def test_term_cap():
    with pytest.raises(TermCapExceeded):
        MultiPoly(1, {(k,): 1 for k in range(11)}, cap=10)
    p = MultiPoly.var(2, 1) + MultiPoly.var(2, 2) + 1
    with pytest.raises(TermCapExceeded):
        MultiPoly(2, (p * p * p).terms, cap=5)
