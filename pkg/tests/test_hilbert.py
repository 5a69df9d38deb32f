import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from strategies import finite_open_sets

from hilbert_exceptional import (
    FiniteOpenSet,
    KernelNormalization,
    PiecewiseLinearFunction,
    SingularityError,
    hilbert_indicator,
    hilbert_indicator_many,
    hilbert_piecewise_linear,
    maximal_hilbert_indicator,
    quadrature_oracle,
    tail_integral,
    truncated_hilbert_indicator,
    union,
)
from hilbert_exceptional.hilbert import default_epsilons

BARE = KernelNormalization.BARE


def test_unit_interval_closed_form(unit_interval):
    expected = math.log(2.0) / math.pi
    assert hilbert_indicator(unit_interval, 2.0) == pytest.approx(expected)
    assert hilbert_indicator(unit_interval, 2.0, BARE) == pytest.approx(math.log(2.0))
    assert hilbert_indicator(unit_interval, 0.5) == pytest.approx(0.0, abs=1e-15)
    assert hilbert_indicator(unit_interval, -1.0) == pytest.approx(-expected)


def test_endpoints_are_signed_infinities(two_intervals):
    assert hilbert_indicator(two_intervals, 0.0) == -math.inf
    assert hilbert_indicator(two_intervals, 3.0) == math.inf


def test_empty_set_and_infinity(unit_interval):
    assert hilbert_indicator(FiniteOpenSet.empty(), 0.3) == 0.0
    assert hilbert_indicator(unit_interval, math.inf) == 0.0


def test_two_intervals_value(two_intervals):
    # sum ln|x - a_k| - ln|x - b_k| at x = 1.5
    expected = math.log(1.5 / 0.5) + math.log(0.5 / 1.5)
    value = hilbert_indicator(two_intervals, 1.5, BARE)
    assert value == pytest.approx(expected, abs=1e-15)


@settings(max_examples=40, deadline=None)
@given(
    finite_open_sets(),
    st.lists(st.floats(min_value=-6.0, max_value=12.0), min_size=1, max_size=8),
)
def test_vectorised_matches_scalar(F, xs):
    xs = [x for x in xs if x not in F.endpoints]
    many = hilbert_indicator_many(F, xs)
    single = [hilbert_indicator(F, x) for x in xs]
    np.testing.assert_allclose(many, single, rtol=1e-12, atol=1e-12)


def test_translation_and_reflection(two_intervals):
    x = 4.2
    value = hilbert_indicator(two_intervals, x)
    moved = hilbert_indicator(two_intervals.translate(1.5), x + 1.5)
    assert moved == pytest.approx(value, rel=1e-12)
    # reflection flips the sign
    mirrored = hilbert_indicator(two_intervals.reflect(), -x)
    assert mirrored == pytest.approx(-value, rel=1e-12)


def test_truncated_matches_quadrature():
    rng = np.random.default_rng(7)
    for _ in range(25):
        a = np.sort(rng.uniform(-3, 3, size=6))
        F = FiniteOpenSet.from_pairs(zip(a[0::2], a[1::2]))
        x = float(rng.uniform(-4, 4))
        eps = float(rng.uniform(0.01, 1.0))
        oracle = quadrature_oracle(F, x, eps)
        assert truncated_hilbert_indicator(F, x, eps) == pytest.approx(oracle, abs=1e-7)


def test_truncation_past_the_set_vanishes(unit_interval):
    assert truncated_hilbert_indicator(unit_interval, 0.5, 1.0) == 0.0
    assert tail_integral(unit_interval, 0.5, 1.0) == 0.0


def test_truncated_at_an_endpoint_is_finite(unit_interval):
    value = truncated_hilbert_indicator(unit_interval, 1.0, 0.5)
    assert value == pytest.approx(math.log(2.0) / math.pi)


def test_tail_integral_dominates_truncated(two_intervals):
    for x, eps in ((1.5, 0.2), (0.5, 0.1), (-2.0, 0.5)):
        truncated = truncated_hilbert_indicator(two_intervals, x, eps)
        assert tail_integral(two_intervals, x, eps) >= abs(truncated)


def test_epsilon_must_be_positive(unit_interval):
    with pytest.raises(ValueError):
        truncated_hilbert_indicator(unit_interval, 0.5, 0.0)
    with pytest.raises(ValueError):
        maximal_hilbert_indicator(unit_interval, 0.5, [])


def test_maximal_is_a_lower_bound_over_candidates(two_intervals):
    x = 1.2
    candidates = default_epsilons(two_intervals, x)
    best = maximal_hilbert_indicator(two_intervals, x)
    for eps in candidates:
        assert best >= abs(truncated_hilbert_indicator(two_intervals, x, eps))


def hat() -> PiecewiseLinearFunction:
    return PiecewiseLinearFunction((0.0, 1.0, 2.0), (0.0, 1.0, 0.0))


def test_piecewise_linear_basics():
    f = hat()
    assert f(1.0) == 1.0
    assert f(3.0) == 0.0
    assert f.is_continuous()
    assert f.l1_norm() == pytest.approx(1.0)
    assert (f + f.translate(5.0)).l1_norm() == pytest.approx(2.0)
    assert f.scale(-2.0).max_abs() == 2.0


def test_piecewise_linear_validation():
    with pytest.raises(ValueError):
        PiecewiseLinearFunction((0.0,), (1.0,))
    with pytest.raises(ValueError):
        PiecewiseLinearFunction((1.0, 0.0), (0.0, 0.0))


def test_piecewise_linear_matches_quadrature():
    f = PiecewiseLinearFunction((-1.0, 0.0, 0.5, 2.0), (0.0, 1.0, -0.5, 0.0))
    for x, eps in ((0.3, 0.1), (2.5, 0.2), (-1.2, 0.05), (0.0, 0.4)):
        closed = hilbert_piecewise_linear(f, x, eps)
        assert closed == pytest.approx(quadrature_oracle(f, x, eps), abs=1e-8)


def test_piecewise_linear_principal_value_of_hat():
    # H of the hat at its peak vanishes by symmetry
    assert hilbert_piecewise_linear(hat(), 1.0) == pytest.approx(0.0, abs=1e-14)


def test_piecewise_linear_principal_value_limit():
    f = hat()
    x = 0.7
    pv = hilbert_piecewise_linear(f, x)
    assert hilbert_piecewise_linear(f, x, 1e-7) == pytest.approx(pv, abs=1e-6)


def test_piecewise_linear_jump_is_singular():
    f = PiecewiseLinearFunction((0.0, 1.0), (1.0, 1.0))
    with pytest.raises(SingularityError):
        hilbert_piecewise_linear(f, 0.0)


def _monotone_pieces(F):
    """Components and gaps of F as (lo, hi, sign of the slope)"""
    pieces = [(iv.a, iv.b, 1) for iv in F]
    pieces += [
        (left.b, right.a, -1) for left, right in zip(F.intervals, F.intervals[1:])
    ]
    return pieces


@settings(max_examples=40, deadline=None)
@given(finite_open_sets())
def test_increasing_on_components_and_decreasing_on_gaps(F):
    fractions = np.linspace(0.05, 0.95, 10)
    for lo, hi, sign in _monotone_pieces(F):
        values = [hilbert_indicator(F, lo + t * (hi - lo), BARE) for t in fractions]
        assert np.all(sign * np.diff(values) > 0)


@settings(max_examples=40, deadline=None)
@given(finite_open_sets())
def test_decreasing_on_the_unbounded_rays(F):
    distances = (8.0, 4.0, 2.0, 1.0, 0.5)
    left = [hilbert_indicator(F, F.infimum - d, BARE) for d in distances]
    right = [hilbert_indicator(F, F.supremum + d, BARE) for d in distances[::-1]]
    assert np.all(np.diff(left) < 0)
    assert np.all(np.diff(right) < 0)


@settings(max_examples=40, deadline=None)
@given(finite_open_sets())
def test_endpoint_limits(F):
    steps = [10.0**-j for j in range(3, 10)]
    for iv in F:
        for side in (-1, 1):
            near_a = [hilbert_indicator(F, iv.a + side * h, BARE) for h in steps]
            near_b = [hilbert_indicator(F, iv.b + side * h, BARE) for h in steps]
            assert np.all(np.diff(near_a) < 0)
            assert np.all(np.diff(near_b) > 0)
            assert near_a[-1] < near_a[0] - 10
            assert near_b[-1] > near_b[0] + 10


@settings(max_examples=40, deadline=None)
@given(finite_open_sets())
def test_far_field_decays(F):
    for sign in (-1, 1):
        values = [abs(hilbert_indicator(F, sign * 10.0**j)) for j in range(2, 9)]
        assert np.all(np.diff(values) < 0)
        assert values[-1] <= F.measure / (math.pi * 0.9e8)


@settings(max_examples=40, deadline=None)
@given(
    finite_open_sets(),
    st.floats(min_value=0.1, max_value=10.0),
    st.floats(min_value=-6.0, max_value=12.0),
)
def test_dilation_covariance(F, r, x):
    if any(abs(x - p) < 1e-4 for p in F.endpoints):
        return
    dilated = hilbert_indicator(F.dilate(r), r * x)
    assert dilated == pytest.approx(hilbert_indicator(F, x), rel=1e-9, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(
    finite_open_sets(),
    finite_open_sets(),
    st.floats(min_value=-6.0, max_value=40.0),
)
def test_additivity_over_disjoint_sets(F, G, x):
    G = G.translate(F.supremum - G.infimum + 1.0)
    if any(abs(x - p) < 1e-4 for p in F.endpoints + G.endpoints):
        return
    joint = hilbert_indicator(union(F, G), x)
    parts = hilbert_indicator(F, x) + hilbert_indicator(G, x)
    assert joint == pytest.approx(parts, rel=1e-9, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(finite_open_sets(), st.floats(min_value=-6.0, max_value=12.0))
def test_maximal_grows_as_epsilon_shrinks(F, x):
    candidates = np.geomspace(1e-6, 20.0, 40).tolist()
    bounds = [
        maximal_hilbert_indicator(F, x, candidates[k:]) for k in range(len(candidates))
    ]
    assert np.all(np.diff(bounds) <= 0)
    assert maximal_hilbert_indicator(F, x, candidates + [0.5, 3.0]) >= bounds[0]


@pytest.mark.parametrize("eps", [1e-9, 1e-3, 0.25, 0.5, 1.0])
def test_truncation_inside_the_gap_is_constant(unit_interval, eps):
    assert truncated_hilbert_indicator(unit_interval, 2.0, eps) == pytest.approx(
        math.log(2.0) / math.pi, rel=1e-14
    )


def test_truncation_past_the_gap_changes(unit_interval):
    # the window (0.5, 3.5) removes half of the interval
    value = truncated_hilbert_indicator(unit_interval, 2.0, 1.5)
    assert value == pytest.approx(math.log(2.0 / 1.5) / math.pi, rel=1e-14)
