import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from confvar.errors import UsageError
from confvar.virasoro import C, VACUUM, act, basis, word_vector
from confvar.vertex import (OMEGA, apply_mode, borcherds_check, mode_trace, multi_insertion,
                            truncation_index, two_point_check, vacuum_two_point, verify_axioms,
                            y_plus_match)


def test_omega_modes_are_virasoro():
    for w in [(), (-2,), (-3,), (-2, -2)]:
        v = word_vector(w)
        for n in range(-3, 4):
            assert apply_mode(OMEGA, n + 1, v) == act(n, v)


def test_axioms_for_omega():
    reps = verify_axioms(OMEGA, 6)
    assert [r["axiom"] for r in reps] == ["vacuum", "creation", "derivative"]
    assert all(r["status"] == "pass" for r in reps)


def test_skew_symmetry_spot():
    # omega_3 omega = c/2 1
    assert apply_mode(OMEGA, 3, OMEGA) == VACUUM.scale(C / 2)


def test_truncation_index():
    assert truncation_index(OMEGA, OMEGA) == 4
    assert truncation_index(VACUUM, OMEGA) == 0
    assert truncation_index(VACUUM.scale(0), OMEGA) is None


words = st.sampled_from([(), (-2,), (-3,), (-2, -2)])
targets = st.sampled_from([w for lvl in range(5) for w in basis(lvl)])
idx = st.integers(-3, 3)


@given(words, words, targets, idx, idx, idx)
@settings(max_examples=60, deadline=None)
def test_borcherds_random(u, v, w, p, q, r):
    assert borcherds_check(word_vector(u), word_vector(v), word_vector(w), p, q, r)


def test_two_point():
    s = vacuum_two_point(6)
    assert s.coefficient((0, -4)) == C / 2
    assert s.coefficient((1, -5)) == C * 2
    assert two_point_check(8)
    with pytest.raises(UsageError):
        vacuum_two_point(2)


@pytest.mark.parametrize("m", range(-6, -1))
def test_y_plus(m):
    assert y_plus_match(m, 8)


def test_y_plus_rejects_regular_modes():
    with pytest.raises(UsageError):
        y_plus_match(-1, 4)


def test_multi_insertion():
    # coefficient of x2^-4 x1^0 in Y(omega,x2)Y(omega,x1)1 is c/2
    assert multi_insertion([(-2,), (-2,)], [0, -4]) == C / 2
    with pytest.raises(UsageError):
        multi_insertion([(-2,)], [0, 1])


def test_mode_trace_format():
    text = mode_trace(OMEGA, 1, OMEGA)
    assert text.startswith("(mode (v (vec") and "(n 1)" in text
