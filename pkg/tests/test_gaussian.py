import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from confvar.algebra import Poly
from confvar.errors import UsageError
from confvar.gaussian import (SYMBOLIC, Anomaly, Evaluation, check_derived_gaussian,
                              cocycle_derivative_condition, k_value, ode_check, reduce_word,
                              second_derivative, stationarity_check, translation_cocycle,
                              translation_cocycle_check)

c, d1, d2, d3 = (Poly.gen(n) for n in ("c", "d1", "d2", "d3"))


def test_table_entries():
    assert second_derivative(-1, -2) == -(d1 * Poly.gen("w") * 2) - d2
    assert second_derivative(2, -2, 0) == c / 2
    assert second_derivative(3, -3, 0) == c * 2
    with pytest.raises(UsageError):
        second_derivative(-2, -2)
    with pytest.raises(UsageError):
        second_derivative(0, -1)


def test_ode():
    assert ode_check()
    assert ode_check(Anomaly(c, 0, 0, 0))


def test_witt_commutators():
    # Delta_{-2} Delta_0 = Delta_0 Delta_{-2} + (-2) Delta_{-2}
    assert reduce_word((-2, 0)) == Evaluation.const(d3 * 2)
    assert reduce_word((0, -2)) == reduce_word((-2, 0)) + Evaluation({("X", -2): 2})
    assert reduce_word((2, -2)) == Evaluation.const(c / 2)


def test_opaque_and_kinds():
    assert reduce_word((1, 1)).kind == "opaque"
    assert reduce_word((-2,)).kind == "first-derivative"
    assert reduce_word((2, -2)).kind == "constant"


def test_translation_stationarity_kills_inner_minus_one():
    assert reduce_word((-2, -1), translation_stationary=True) == Evaluation()
    assert reduce_word((-1,)) == Evaluation({("X", -1): 1})


word = st.lists(st.integers(-5, 3), min_size=1, max_size=3).map(tuple)


@given(word, st.sampled_from(["far", "random"]), st.integers(0, 5))
@settings(max_examples=80, deadline=None)
def test_strategy_confluence(w, strategy, seed):
    assert reduce_word(w, strategy=strategy, seed=seed) == reduce_word(w)


@given(st.integers(-4, 3), st.integers(-4, 3))
@settings(max_examples=40, deadline=None)
def test_pair_commutator(a, b):
    # Delta_a Delta_b - Delta_b Delta_a = (a - b) Delta_{a+b}
    lhs = reduce_word((a, b)) + reduce_word((b, a)).scale(-1)
    assert lhs == reduce_word((a + b,)).scale(a - b)


@pytest.mark.parametrize("point", [1, 2, 3])
def test_derived_points(point):
    reps = check_derived_gaussian(point, (-4, -2), (-1, 5))
    assert reps and all(r["status"] == "pass" for r in reps)


def test_derived_point_validation():
    with pytest.raises(UsageError):
        check_derived_gaussian(4)


def test_stationarity_forces_normal():
    reps = stationarity_check()
    assert reps[0]["forced"] == ["d1", "d2"]
    assert reps[1]["forced"] == ["d1", "d2", "d3"]
    assert all(r["status"] == "pass" for r in reps)
    normal = stationarity_check(Anomaly(c, 0, 0, 0))
    assert all(r["forced"] == [] for r in normal)


def test_translation_cocycle():
    assert all(r["status"] == "pass" for r in translation_cocycle_check())
    assert translation_cocycle(0) == Poly.const(0)
    assert cocycle_derivative_condition(-1) == translation_cocycle().diff("a").subs({"a": 0})


def test_k_values_vanish_outside():
    assert k_value(-1) == Poly.const(0)
    assert k_value(-5) == Poly.const(0)
    assert k_value(-4, 0, SYMBOLIC) == d1
