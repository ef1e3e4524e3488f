import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from confvar.algebra import Poly
from confvar.errors import UsageError
from confvar.virasoro import (C, DELTA_SIGN, VACUUM, IdentityVector, act, basis, bracket_check,
                              determinant, gram, is_canonical, vector_from_sexp, word_from_sexp,
                              word_sexp, word_vector)


def test_basis_listing():
    assert basis(0) == [()]
    assert basis(1) == []
    assert basis(4) == [(-2, -2), (-4,)]
    assert [word_sexp(w) for w in basis(4)] == ["(L -2 -2)", "(L -4)"]
    assert len(basis(8)) == 7
    with pytest.raises(UsageError):
        basis(-1)


def test_canonical_words():
    assert is_canonical((-3, -2))
    assert not is_canonical((-2, -3))
    assert not is_canonical((-1,))
    with pytest.raises(UsageError):
        IdentityVector({(-2, -3): 1})


def test_small_actions():
    assert act(2, word_vector((-2,))) == VACUUM.scale(C / 2)
    assert act(-1, VACUUM).is_zero()
    assert act(0, word_vector((-3, -2))) == word_vector((-3, -2)).scale(5)
    # L(-2)L(-3)1 reorders to L(-3)L(-2)1 + L(-5)1
    assert word_vector((-2, -3)) == word_vector((-3, -2)) + word_vector((-5,))


def test_gram_determinants():
    assert determinant(gram(2)) == C / 2
    assert determinant(gram(4)) == C ** 3 * Poly.const(5) / 2 + C ** 2 * 11


vectors = st.sampled_from([w for lvl in range(7) for w in basis(lvl)])


@given(st.integers(-6, 6), st.integers(-6, 6), vectors)
@settings(max_examples=80, deadline=None)
def test_bracket(m, n, word):
    assert bracket_check(m, n, word_vector(word))


@given(vectors)
@settings(max_examples=30, deadline=None)
def test_l0_grading(word):
    v = word_vector(word)
    assert act(0, v) == v.scale(-sum(word))


def test_wrong_central_term_detected():
    v = word_vector((-2,))
    assert not bracket_check(2, -2, v, central=lambda m: C)


def test_serialization_round_trip():
    v = word_vector((-2, -3)).scale(C + 1)
    assert vector_from_sexp(v.to_sexp()) == v
    assert word_from_sexp("(L -3 -2)") == (-3, -2)
    assert word_from_sexp("()") == ()


def test_delta_sign():
    assert [DELTA_SIGN(n) for n in (-3, -2, -1, 0)] == [-1, 1, -1, 1]
