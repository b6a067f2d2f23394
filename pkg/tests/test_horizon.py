"""Prediction horizon, iteration time, curve families and phase labels."""
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from defbakit.errors import BracketFailure, NonpositiveBound, TooFewPoints
from defbakit.horizon import (EXPONENTIAL, LINEAR, NO_LINEAR_INCENTIVE, STAGNANT, GrowthCurve,
                              classify_curve, compute_horizon, integral_balanced, integral_linear,
                              iteration_bound, iteration_time, prediction_horizon, verify_theorem1,
                              verify_theorem2)

from oracles import bisect_root, integral_exp_quad

LAM, MU = 9 / 7, 6 / 17


def test_integral_balanced_values():
    assert integral_balanced(0.0, MU, 2.5) == 0.0
    assert integral_balanced(2.0, MU, 2.5) == pytest.approx(integral_exp_quad(2.0, MU, 2.5), rel=1e-10)
    assert integral_balanced(2.0, MU, 2.5) == pytest.approx(17 / 6 * 2.5 * math.expm1(12 / 17), rel=1e-12)
    assert integral_balanced(3.0, 1e-12, 2.0) == pytest.approx(6.0, rel=1e-6)
    assert integral_balanced(3.0, 0.0, 2.0) == 6.0


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 20), st.floats(0, 2), st.floats(0.01, 100))
def test_integral_balanced_against_quadrature(t, mu, B):
    assert integral_balanced(t, mu, B) == pytest.approx(integral_exp_quad(t, mu, B), rel=1e-9, abs=1e-12)


def test_integral_linear_values():
    assert integral_linear(0.0, LAM, 2.5) == 0.0
    assert integral_linear(4.0, 0.0, 2.5) == 10.0
    assert integral_linear(2.0, LAM, 2.5) == pytest.approx(90 / 14 + 5, rel=1e-14)


def test_toy_horizon_matches_bisection_oracle():
    tp = prediction_horizon(LAM, MU)
    gap = lambda t: integral_linear(t, LAM, 1.0) - integral_balanced(t, MU, 1.0)
    ref = bisect_root(gap, 1.0, 50.0, 1e-6)
    assert tp == pytest.approx(ref, abs=1e-4)
    assert tp == pytest.approx(8.6029, abs=1e-3)
    ib = integral_balanced(tp, MU, 1.0)
    assert abs(gap(tp)) <= 1e-8 * ib


def test_no_linear_incentive():
    assert prediction_horizon(0.5, 0.5) is NO_LINEAR_INCENTIVE
    assert prediction_horizon(0.2, 0.5) is NO_LINEAR_INCENTIVE


def test_bracket_failure_without_balanced_growth():
    with pytest.raises(BracketFailure):
        prediction_horizon(1.0, 0.0)


def test_b_init_invariance():
    assert abs(prediction_horizon(LAM, MU, 1.0) - prediction_horizon(LAM, MU, 100.0)) <= 1e-12


pairs = st.tuples(st.floats(0.01, 5.0), st.floats(1.001, 20.0)).map(lambda p: (p[0] * p[1], p[0]))


@settings(max_examples=80, deadline=None)
@given(pairs)
def test_root_residual_and_sign_structure(p):
    lam, mu = p
    tp = prediction_horizon(lam, mu)
    gap = lambda t: integral_linear(t, lam, 1.0) - integral_balanced(t, mu, 1.0)
    assert abs(gap(tp)) <= 1e-8 * integral_balanced(tp, mu, 1.0)
    assert gap(tp / 2) > 0
    assert gap(2 * tp) < 0


def test_monotonicity_on_grid():
    lams = np.linspace(0.8, 3.0, 12)
    mus = np.linspace(0.1, 0.7, 12)
    T = np.array([[prediction_horizon(l, m) for m in mus] for l in lams])
    assert np.all(np.diff(T, axis=1) <= 1e-9)   # nonincreasing in mu
    assert np.all(np.diff(T, axis=0) >= -1e-9)  # nondecreasing in lambda


def test_iteration_time_examples():
    tp = prediction_horizon(LAM, MU)
    bound = tp - 2 * (17 / 6 - 7 / 9)
    assert iteration_bound(tp, LAM, MU) == pytest.approx(bound, abs=1e-14)
    assert bound == pytest.approx(4.4918, abs=1e-3)
    assert iteration_time(tp, LAM, MU) == pytest.approx(0.9 * bound, abs=1e-14)
    assert iteration_time(tp, LAM, MU) == pytest.approx(4.04, abs=5e-3)
    with pytest.raises(NonpositiveBound):
        iteration_time(2.5, LAM, MU)
    with pytest.raises(ValueError):
        iteration_time(tp, LAM, MU, safety_factor=1.0)
    with pytest.raises(ValueError):
        iteration_time(tp, 0.3, 0.5)


def test_reported_example_numbers_follow_from_all_enzyme_rate():
    # The 3.25 h / 1.45 h pair quoted for the toy example is what the same
    # construction gives with the balanced rate of an all-enzyme composition.
    tp = prediction_horizon(LAM, 0.6)
    assert tp == pytest.approx(3.25, abs=0.01)
    assert iteration_bound(tp, LAM, 0.6) == pytest.approx(1.45, abs=0.02)


def test_compute_horizon_toy(toy):
    model, state = toy
    diag = compute_horizon(model, state)
    assert diag.lambda_s == pytest.approx(45 / 14, abs=1e-9)
    assert diag.lambda_r == pytest.approx(LAM, abs=1e-9)
    assert diag.mu_bal == pytest.approx(MU, abs=1e-9)
    assert diag.t_p == pytest.approx(prediction_horizon(LAM, MU), abs=1e-8)
    assert 0 < diag.t_c < diag.t_p
    assert diag.has_linear_incentive


# -- curve families -------------------------------------------------------------

@pytest.mark.parametrize("kind", ["mixed_lin_then_exp", "exp_then_lin"])
def test_curve_integral_against_quadrature(kind):
    from scipy.integrate import quad
    curve = GrowthCurve(kind, 1.7, 2.5, LAM, MU)
    ref = quad(curve, 0, 5.0, points=[1.7], epsabs=1e-12, epsrel=1e-12)[0]
    assert curve.integral(5.0) == pytest.approx(ref, rel=1e-10)
    # continuous at the switching time
    assert curve(1.7 - 1e-12) == pytest.approx(curve(1.7 + 1e-12), rel=1e-9)


def test_exp_then_lin_slope_matches_linear_rate_of_reached_biomass():
    curve = GrowthCurve("exp_then_lin", 2.0, 2.5, LAM, MU)
    B_ts = 2.5 * math.exp(MU * 2.0)
    slope = (curve(3.0) - curve(2.5)) / 0.5
    assert slope == pytest.approx(LAM * B_ts, rel=1e-12)


def test_theorem1_toy():
    assert verify_theorem1(LAM, MU, 8.6, grid_n=10_000) == pytest.approx(8.6)


def root_of(lam, mu):
    return prediction_horizon(lam, mu, eps_root=1e-13)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 2.0), st.floats(1e-6, 3.0), st.floats(0.02, 0.999))
def test_theorem1_single_linear_phase(mu, excess, frac):
    lam = mu * (1 + excess)
    tp = frac * root_of(lam, mu)
    assume(tp > 1e-6)
    assert verify_theorem1(lam, mu, tp, grid_n=2001) == pytest.approx(tp, rel=1e-12)


def test_theorem1_shifted_values_match_closed_form():
    from defbakit.horizon import _exp_excess
    tp, B = 6.0, 2.5
    ref = GrowthCurve("mixed_lin_then_exp", tp, B, LAM, MU).integral(tp)
    for ts in (0.0, 1.3, 4.4, 6.0):
        r = tp - ts
        shifted = B * (_exp_excess(MU * r) / MU - 0.5 * LAM * r ** 2)
        direct = GrowthCurve("mixed_lin_then_exp", ts, B, LAM, MU).integral(tp) - ref
        assert shifted == pytest.approx(direct, rel=1e-10, abs=1e-12)


def test_theorem1_past_the_root_prefers_exponential():
    tp = 1.5 * root_of(LAM, MU)
    assert verify_theorem1(LAM, MU, tp, grid_n=2001) == 0.0


def test_theorem1_near_equal_rates():
    mu = 0.4
    lam = mu * (1 + 1e-6)
    tp = 0.5 * root_of(lam, mu)
    assert verify_theorem1(lam, mu, tp, grid_n=2001) == pytest.approx(tp)


def test_theorem2_toy():
    tp = 8.6
    step = tp / 9999
    expected = tp - 2 * (1 / MU - 1 / LAM)
    assert abs(verify_theorem2(LAM, MU, tp, grid_n=10_000) - expected) <= step
    assert expected == pytest.approx(4.489, abs=1e-3)


def test_theorem2_short_window_hits_boundary():
    assert verify_theorem2(LAM, MU, 2.0, grid_n=2001) == 0.0


def test_theorem_checks_need_linear_incentive():
    with pytest.raises(ValueError):
        verify_theorem2(0.5, 0.5, 3.0)


# -- classification ---------------------------------------------------------------

t = np.round(np.arange(0, 3.0 + 1e-9, 0.1), 12)


def test_classify_exponential():
    labels = classify_curve(t, 2.5 * np.exp(0.35 * t), 0.5)
    assert [lab for _, lab in labels] == [EXPONENTIAL] * 6


def test_classify_linear():
    labels = classify_curve(t, 2.5 * (1 + 1.2857 * t), 0.5)
    assert [lab for _, lab in labels] == [LINEAR] * 6


def test_classify_stagnant():
    labels = classify_curve(t, np.full_like(t, 2.5), 1.0)
    assert [lab for _, lab in labels] == [STAGNANT] * 3


def test_classify_switching_curve():
    tt = np.round(np.arange(0, 9.0 + 1e-9, 0.1), 12)
    curve = GrowthCurve("exp_then_lin", 4.49, 2.5, LAM, MU)
    labels = classify_curve(tt, curve(tt), 1.0)
    for (a, b), lab in labels:
        if b <= 4.49:
            assert lab == EXPONENTIAL
        elif a >= 4.49:
            assert lab == LINEAR


def test_classify_merges_trailing_remainder():
    tt = np.round(np.arange(0, 1.25 + 1e-9, 0.05), 12)
    labels = classify_curve(tt, 1 + tt, 0.5)
    assert [iv for iv, _ in labels] == [(0.0, 0.5), (0.5, 1.25)]


def test_classify_too_few_points():
    with pytest.raises(TooFewPoints):
        classify_curve([0.0, 1.0, 2.0], [1.0, 2.0, 3.0], 1.0)
