from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from confvar.algebra import (Poly, TruncSeries, binomial, binomial_expand, formal_delta,
                             poly_from_sexp, series_compose, series_from_sexp)
from confvar.errors import CompositionDomainError, UsageError

x, y, c = Poly.gen("x"), Poly.gen("y"), Poly.gen("c")

small = st.integers(-4, 4)
fracs = st.fractions(min_value=-5, max_value=5, max_denominator=7)


@st.composite
def polys(draw):
    p = Poly.const(draw(fracs))
    for _ in range(draw(st.integers(0, 4))):
        mono = x ** draw(st.integers(0, 3)) * y ** draw(st.integers(0, 2))
        p = p + mono * draw(fracs)
    return p


def test_basic_arithmetic():
    assert (x + y) ** 2 == x * x + x * y * 2 + y * y
    assert (x - x).is_zero()
    assert str((x + y) ** 2) == "2*x*y + x^2 + y^2"
    assert (x * 3 / 2).coeffs_in("x") == {1: Poly.const(Fraction(3, 2))}


def test_generalized_binomial():
    assert binomial(5, 2) == 10
    assert binomial(-1, 3) == -1
    assert binomial(-4, 2) == 10
    assert binomial(3, 5) == 0


@given(polys(), polys(), polys())
@settings(max_examples=60, deadline=None)
def test_ring_laws(a, b, d):
    assert a * (b + d) == a * b + a * d
    assert (a * b) * d == a * (b * d)
    assert a + b == b + a


@given(polys(), polys())
@settings(max_examples=60, deadline=None)
def test_leibniz(a, b):
    assert (a * b).diff("x") == a.diff("x") * b + a * b.diff("x")


@given(polys())
@settings(max_examples=60, deadline=None)
def test_sexp_round_trip(p):
    assert poly_from_sexp(p.to_sexp()) == p


def test_series_product_and_compose():
    exp = TruncSeries.univariate("z", [1, 1, Fraction(1, 2), Fraction(1, 6), Fraction(1, 24)], 4)
    ident = TruncSeries.univariate("z", [0, 1], 4)
    assert series_compose(exp, ident) == exp
    sq = exp * exp
    assert sq.coefficient((2,)) == Poly.const(2)


def test_compose_rejects_constant_inner():
    s = TruncSeries.univariate("z", [0, 1, 1], 4)
    with pytest.raises(CompositionDomainError):
        series_compose(s, TruncSeries.univariate("z", [1, 1], 3))


@given(st.lists(fracs, min_size=2, max_size=4), st.lists(fracs, min_size=2, max_size=4),
       st.lists(fracs, min_size=2, max_size=4))
@settings(max_examples=40, deadline=None)
def test_compose_associative(a, b, d):
    def series(cs, const):
        cs = list(cs)
        if not const:
            cs[0] = 0
        return TruncSeries.univariate("z", cs, 4)
    f, g, h = series(a, True), series(b, False), series(d, False)
    left = series_compose(series_compose(f, g), h)
    right = series_compose(f, series_compose(g, h))
    assert left.agrees_with(right)


def test_binomial_expand_regions():
    s = binomial_expand(-1, "|x2|<|x1|", 3)
    assert s.coefficient((-1, 0)) == Poly.const(1)
    assert s.coefficient((-4, 3)) == Poly.const(1)
    t = binomial_expand(-1, "|x1|<|x2|", 3)
    assert t.coefficient((0, -1)) == Poly.const(-1)
    assert series_from_sexp(s.to_sexp()) == s
    with pytest.raises(UsageError):
        binomial_expand(-1, "nowhere", 3)


@given(st.integers(-6, 6), st.integers(0, 6))
@settings(max_examples=40, deadline=None)
def test_binomial_expand_polynomial_case_agrees(m, order):
    # for m >= 0 both regions give the same finite polynomial up to order
    a = binomial_expand(m, "|x2|<|x1|", order + max(m, 0))
    b = binomial_expand(m, "|x1|<|x2|", order + max(m, 0))
    if m >= 0:
        assert dict(a.items()) == dict(b.items())


def test_formal_delta():
    d = formal_delta(2)
    assert sorted(e[0] for e, _ in d.items()) == [-2, -1, 0, 1, 2]
    with pytest.raises(UsageError):
        formal_delta(-1)
