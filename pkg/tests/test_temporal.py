import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pdc_contrast import temporal


def test_pair_coefficients_at_unit_ratio():
    a1, a2, gamma = temporal.pair_coefficients(1.0)
    assert np.isclose(a1, -2 / 3) and np.isclose(a2, 2 / 3)
    assert np.isclose(gamma, math.pi * math.sqrt(3) / 2)


def test_pair_form_normalization_matches_gamma():
    for f in (0.3, 1.0, 4.0):
        _, _, gamma = temporal.pair_coefficients(f)
        assert np.isclose(temporal.pair_form(f).log_norm, -0.5 * math.log(gamma))


def test_patterns():
    assert temporal.transmitted_pattern(6).sorted_pairs() == [(1, 3), (2, 5), (4, 6)]
    assert temporal.transmitted_pattern(4).sorted_pairs() == [(1, 3), (2, 4)]
    assert temporal.reflected_pattern(4).sorted_pairs() == [(1, 2), (3, 4)]
    assert temporal.transmitted_pattern(2) == temporal.reflected_pattern(2)


def test_bad_pattern_rejected():
    with pytest.raises(ValueError):
        temporal.PairingPattern.of([(1, 2), (2, 3)])


def test_not_positive_definite_rejected():
    with pytest.raises(ValueError):
        temporal.QuadraticGaussianForm(np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_four_photon_value():
    assert np.isclose(temporal.filter_visibility(4, 1.0), math.sqrt(3) / 2)


def test_elimination_matches_determinant_beyond_closed_forms():
    for N in (14, 20):
        assert np.isclose(temporal.filter_visibility(N, 2.5),
                          temporal.filter_visibility(N, 2.5, method="elimination"), rtol=1e-10)


def test_no_closed_form_for_large_n():
    with pytest.raises(ValueError):
        temporal.closed_form_visibility(14, 1.0)


@pytest.mark.parametrize("N, f", [(4, 3.806), (6, 3.592), (8, 3.630), (12, 3.737)])
def test_critical_filter_ratio(N, f):
    assert abs(temporal.critical_f(N) - f) <= 1e-3


def test_approx_column_limit():
    assert np.isclose(temporal.approx_critical_f(4), 4.0)
    assert np.isclose(temporal.approx_critical_f(10), 4.125, atol=1e-3)
    # the exponent 2/(2-N) makes the approach to 4 sqrt 2 logarithmically slow
    assert abs(temporal.approx_critical_f(10 ** 6) - 4 * math.sqrt(2)) < 1e-3


def test_approx_bounds_exact():
    for N in range(4, 22, 2):
        assert temporal.approx_critical_f(N) > temporal.critical_f(N)


@settings(max_examples=40, deadline=None)
@given(N=st.sampled_from([4, 6, 8, 10, 12]), f=st.floats(0.05, 20), df=st.floats(1e-3, 5))
def test_visibility_decreases_with_filter_width(N, f, df):
    assert temporal.filter_visibility(N, f + df) < temporal.filter_visibility(N, f)


@settings(max_examples=40, deadline=None)
@given(N=st.sampled_from([4, 6, 8, 10, 12]), f=st.floats(0.05, 50))
def test_three_methods_agree(N, f):
    det = temporal.filter_visibility(N, f)
    assert np.isclose(det, temporal.filter_visibility(N, f, method="elimination"), atol=1e-10)
    assert np.isclose(det, temporal.closed_form_visibility(N, f), atol=1e-10)
