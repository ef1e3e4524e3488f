import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from confvar.errors import NoConvergenceError, StepTooLargeError, UsageError
from confvar.sandbox import (INF, DirectionField, FDConfig, FunctionalSpec, anchor_limit_gap,
                             closed_form_value, fd_derivative, holomorphic_split, path_map,
                             random_directions, regression_matrix, richardson, stencil,
                             witt_numeric_check)

ONE = DirectionField.polynomial([1])


def test_path_map_basics():
    h = DirectionField.polynomial([0.3, 1, 0.5j])
    assert path_map(h, INF, 0.0, 0.7) == 0.7
    assert path_map(h, 5.0, 0.0, 0.7) == pytest.approx(0.7)
    assert path_map(ONE, INF, 0.1, 1.0) == pytest.approx(1.1)
    assert anchor_limit_gap(h, 0.1, 1.0, 1e6) < 1e-6


def test_path_map_step_too_large():
    # denominator (z - a) - t h(z) vanishes at t = 1 for h = 1, z - a = 1
    with pytest.raises(StepTooLargeError):
        path_map(ONE, 0.0, 1.0, 1.0)


def test_first_variation_of_evaluation():
    h = DirectionField.polynomial([0.2, -1, 0.4 + 0.1j])
    f = FunctionalSpec(0)
    assert fd_derivative(f, 1, [h]) == pytest.approx(h(f.z0), rel=1e-9)


def test_second_derivative_of_f1():
    h = DirectionField.polynomial([0.5, 0.3j, -0.2, 0.1])
    f = FunctionalSpec(1)
    z = f.z0
    want = h.derivative(1, z) ** 2 + h.derivative(2, z) * h(z)
    assert fd_derivative(f, 2, [h, h]) == pytest.approx(want, rel=1e-6)


@given(st.integers(0, 4), st.integers(1, 3), st.integers(0, 10 ** 6))
@settings(max_examples=25, deadline=None)
def test_matches_closed_form(r, k, seed):
    hs = random_directions(random.Random(seed), k)
    f = FunctionalSpec(r)
    ref = closed_form_value(r, hs, f.z0)
    est = fd_derivative(f, k, hs)
    assert abs(est - ref) <= 1e-6 * max(abs(ref), 1e-12) or abs(ref) < 1e-12 and abs(est) < 1e-9


def test_finite_anchor_agrees():
    hs = random_directions(random.Random(3), 2)
    f = FunctionalSpec(2)
    cfg = FDConfig(2e-2, 5, 1e-6, anchor=7.0 + 3j)
    assert fd_derivative(f, 2, hs, cfg) == pytest.approx(closed_form_value(2, hs, f.z0), rel=1e-6)


def test_holomorphic_split():
    h = DirectionField.polynomial([1, 0.3, 0.2j])
    delta, anti = holomorphic_split(FunctionalSpec(1), h)
    assert abs(anti) < 1e-8 * abs(delta)
    _, anti_real = holomorphic_split(FunctionalSpec(1, kind="abs2"), h)
    assert abs(anti_real) > 1e-3
    assert holomorphic_split(FunctionalSpec(1), DirectionField.polynomial([0])) == (0, 0)


@pytest.mark.parametrize("m,n,r", [(1, -1, 1), (0, 0, 1), (2, -1, 2), (3, -2, 2)])
def test_witt_numeric(m, n, r):
    assert witt_numeric_check(m, n, FunctionalSpec(r), w=0.9 - 0.4j)


def test_richardson_improves_order():
    # error ratios ~2 for the raw one-sided stencil, higher after one elimination
    h = DirectionField.mode(-3, 1.5)
    f = FunctionalSpec(1)
    ref = fd_derivative(f, 2, [h, h], FDConfig(2e-2, 6))
    raw = [stencil(f, [h, h], 0.04 * 2.0 ** -i) for i in range(4)]
    err0 = [abs(v - ref) for v in raw]
    assert 1.6 < err0[0] / err0[1] < 2.4
    once = richardson(raw)[1]
    err1 = [abs(v - ref) for v in once]
    assert err1[-1] < err0[-1] / 10


def test_no_convergence_reports_diagnostics():
    h = DirectionField.mode(-4, 0.6)
    with pytest.raises(NoConvergenceError) as info:
        fd_derivative(FunctionalSpec(3), 3, [h, h, h], FDConfig(0.2, 2, 1e-12))
    assert "raw" in info.value.diagnostics


def test_validation():
    with pytest.raises(UsageError):
        FDConfig(-1)
    with pytest.raises(UsageError):
        fd_derivative(FunctionalSpec(1), 2, [ONE])
    with pytest.raises(UsageError):
        FunctionalSpec(-1)


def test_regression_matrix_small():
    reps = regression_matrix(seed=4, rs=range(3), ks=range(1, 3), sets=2)
    assert len(reps) == 12
    assert all(r["status"] == "pass" for r in reps)
    assert set(reps[0]) == {"functional", "k", "directions", "estimate", "reference",
                            "rel_error", "status"}
