import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from strategies import finite_open_sets, levels

from hilbert_exceptional import (
    DEFAULT_TOLERANCES,
    EmptySetError,
    FiniteOpenSet,
    KernelNormalization,
    approx_sublevel_for_open,
    bezout_polynomial,
    hilbert_indicator,
    lambda_from_mu,
    mu_from_lambda,
    sublevel_set,
    sum_of_roots,
    superlevel_set,
    verify_bezout,
    verify_inclusion_open,
    verify_roundtrip,
)
from hilbert_exceptional.constants_and_enums import LAMBDA_SATURATION


def test_level_pairing(ln2):
    bound = mu_from_lambda(ln2)
    assert bound.mu == pytest.approx(math.log(0.5) / math.pi)
    assert bound.exp_pi_mu == pytest.approx(0.5)
    assert bound.measure_ratio == pytest.approx(1.0)
    assert lambda_from_mu(bound.mu) == pytest.approx(ln2, rel=1e-14)


def test_level_pairing_rejects_bad_levels():
    with pytest.raises(ValueError):
        mu_from_lambda(0.0)
    with pytest.raises(ValueError):
        mu_from_lambda(LAMBDA_SATURATION + 1.0)
    with pytest.raises(ValueError):
        lambda_from_mu(0.5)


def test_unit_interval_inverts_to_its_left_neighbour(unit_interval, ln2):
    config = sublevel_set(unit_interval, ln2)
    assert config.roots[0] == pytest.approx(-1.0, abs=1e-12)
    assert config.E.measure == pytest.approx(1.0, rel=1e-12)
    assert config.interlaced


def test_two_intervals_roots_are_plus_minus_sqrt3(two_intervals, ln2):
    config = sublevel_set(two_intervals, ln2)
    root = math.sqrt(3.0)
    assert config.roots[0] == pytest.approx(-root, abs=1e-12)
    assert config.roots[1] == pytest.approx(root, abs=1e-12)
    assert config.E.measure == pytest.approx(2.0, rel=1e-10)


def test_two_intervals_bezout_and_root_sum(two_intervals, ln2):
    config = sublevel_set(two_intervals, ln2)
    assert verify_bezout(config) <= 1e-10
    computed, formula = sum_of_roots(config)
    assert computed == pytest.approx(0.0, abs=1e-12)
    assert formula == pytest.approx(0.0, abs=1e-12)
    lhs, rhs = bezout_polynomial(config)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_two_intervals_round_trip(two_intervals, ln2):
    config = sublevel_set(two_intervals, ln2)
    report = verify_roundtrip(config)
    assert report.passed
    for x in (1.0, 3.0):
        value = hilbert_indicator(config.E, x, KernelNormalization.BARE)
        assert value == pytest.approx(ln2, abs=1e-9)


def test_roots_sit_at_level_mu(two_intervals):
    config = sublevel_set(two_intervals, 1.3)
    for c in config.roots:
        value = hilbert_indicator(two_intervals, c)
        assert value == pytest.approx(config.bound.mu, abs=1e-9)


def test_empty_set_is_rejected():
    with pytest.raises(EmptySetError):
        sublevel_set(FiniteOpenSet.empty(), 1.0)


def test_superlevel_set_mirrors(unit_interval, ln2):
    right = superlevel_set(unit_interval, ln2)
    assert right.to_json()[0] == pytest.approx([1.0, 2.0], abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(finite_open_sets(max_components=8), levels)
def test_measure_identity_and_interlacing(F, lam):
    config = sublevel_set(F, lam)
    assert config.interlaced
    assert config.measure_relative_error <= 1e-8
    assert verify_bezout(config) <= 1e-9


@settings(max_examples=40, deadline=None)
@given(finite_open_sets(max_components=8), levels)
def test_round_trip_on_random_sets(F, lam):
    report = verify_roundtrip(sublevel_set(F, lam))
    assert report.interior_margin > 0
    assert report.exterior_margin > 0
    assert report.worst_endpoint_error <= 1e-9


@settings(max_examples=30, deadline=None)
@given(finite_open_sets(), levels)
def test_larger_level_enlarges_the_sublevel_set(F, lam):
    small = sublevel_set(F, lam).E
    large = sublevel_set(F, lam + 0.5).E
    assert large.contains_set(small)


def dyadic_components(n: int) -> FiniteOpenSet:
    pairs = [(2.0 ** (-2 * k), 2.0 ** (-2 * k + 1)) for k in range(1, n + 1)]
    return FiniteOpenSet.from_pairs(sorted(pairs))


def test_approximating_open_sets():
    lam = 1.0
    report = approx_sublevel_for_open([dyadic_components(n) for n in range(1, 7)], lam)
    assert all(a < b for a, b in zip(report.e_measures, report.e_measures[1:]))
    for f_measure, e_measure in zip(report.f_measures, report.e_measures):
        assert e_measure == pytest.approx(math.expm1(lam) * f_measure, rel=1e-8)
    assert report.e_steps[-1] < report.e_steps[0]


def test_open_set_lies_in_its_superlevel_set():
    assert verify_inclusion_open([dyadic_components(n) for n in range(1, 6)], 1.0) > 0


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=1e-3, max_value=30.0))
def test_level_pairing_round_trip(lam):
    assert lambda_from_mu(mu_from_lambda(lam).mu) == pytest.approx(lam, rel=1e-12)


def test_bezout_detects_a_moved_root(two_intervals, ln2):
    config = sublevel_set(two_intervals, ln2)
    moved = (config.roots[0] + 1e-6,) + config.roots[1:]
    residual = verify_bezout(dataclasses.replace(config, roots=moved))
    assert residual > 10 * DEFAULT_TOLERANCES.bezout_tol


def test_inverted_set_reaches_lambda_on_F(unit_interval, ln2):
    E = sublevel_set(unit_interval, ln2).E
    bare = KernelNormalization.BARE
    # strictly above lambda inside F, equal at the right endpoint
    assert hilbert_indicator(E, 0.5, bare) == pytest.approx(math.log(3.0), rel=1e-10)
    assert hilbert_indicator(E, 1.0, bare) == pytest.approx(ln2, rel=1e-10)
    assert hilbert_indicator(E, 0.5, bare) > ln2
