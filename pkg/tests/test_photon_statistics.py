import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pdc_contrast import photon_statistics as ps


def test_two_photon_visibility_formula():
    K = 0.5
    t2 = math.tanh(K) ** 2
    assert np.isclose(ps.two_photon_visibility(K), 1 / (1 + 2 * t2))


def test_two_photon_table_sums_to_one():
    s1, s2 = (0.3, 1.0), (-0.2, 0.4)
    total = sum(ps.two_photon_probability(0.6, ps.AnalyzerSetting(*s1, r1),
                                          ps.AnalyzerSetting(*s2, r2))
                for r1 in (1, -1) for r2 in (1, -1))
    assert np.isclose(total, 1.0)


def test_two_photon_visibility_from_probabilities():
    K = 0.4
    p = [ps.two_photon_probability(K, ps.AnalyzerSetting(0, ph), ps.AnalyzerSetting(0, 0))
         for ph in np.linspace(0, 2 * math.pi, 73)]
    assert np.isclose((max(p) - min(p)) / (max(p) + min(p)), ps.two_photon_visibility(K))


def test_polynomial_coefficients_n4():
    assert ps.visibility_polynomial(4).coefficients == (1, 8, 8)


def test_polynomial_is_chebyshev():
    for N in (2, 4, 6, 8, 10, 12):
        for t2 in (0.0, 0.2, 0.7, 1.0):
            cheb = np.polynomial.chebyshev.chebval(1 + 2 * t2, [0] * (N // 2) + [1])
            assert np.isclose(ps.tilde_p(N, t2), cheb)


def test_ghz_probability_normalized():
    N = 4
    total = sum(ps.ghz_probability(N, 0.3, [0.1, 0.2, 0.3, 0.4], r)
                for r in itertools.product((1, -1), repeat=N))
    assert np.isclose(total, 1.0)


def test_asymptotes_exact():
    assert ps.asymptotic_visibility(6) == Fraction(1, 99)
    assert ps.modified_fibonacci(1) == 2
    assert np.isclose(ps.asymptotic_visibility_float(10), 1 / 3363, rtol=1e-12)


def test_critical_k_edges():
    assert ps.critical_K(4, 1 / 17) == math.inf
    assert ps.critical_K(4, 1.0) == 0.0


@pytest.mark.parametrize("N, K", [(2, 0.4911), (4, 0.4697), (6, 0.4404), (8, 0.4232)])
def test_bell_critical_gains(N, K):
    assert abs(ps.critical_K(N, ps.bell_threshold(N)) - K) <= 5e-4


def test_limit_rows():
    assert ps.limit_critical_t2("bell") == 0.125
    assert ps.limit_critical_t2("separability") == 0.5625
    assert abs(ps.critical_row(None, "bell").K_crit - 0.3695) <= 5e-5


def test_critical_t2_approaches_limit():
    t2 = [math.tanh(ps.critical_K(N, ps.bell_threshold(N))) ** 2 for N in (10, 40, 160)]
    assert abs(t2[-1] - 0.125) < abs(t2[0] - 0.125)


def test_emission_probabilities_infinite_gain():
    e = ps.emission_probabilities(math.inf, 4)
    assert (e.one_or_more, e.exactly_one) == (1.0, 0.0)


def test_outcome_must_be_pm1():
    with pytest.raises(ValueError):
        ps.AnalyzerSetting(outcome=0)


def test_odd_n_rejected():
    with pytest.raises(ValueError):
        ps.ghz_visibility(3, 0.1)


@settings(max_examples=50, deadline=None)
@given(N=st.sampled_from([2, 4, 6, 8, 10]), K1=st.floats(0, 5), dK=st.floats(1e-3, 2))
def test_visibility_decreases_with_gain(N, K1, dK):
    assert ps.ghz_visibility(N, K1 + dK) < ps.ghz_visibility(N, K1)


@settings(max_examples=50, deadline=None)
@given(N=st.sampled_from([4, 6, 8]), V=st.floats(0.01, 0.99))
def test_critical_k_inverts_visibility(N, V):
    K = ps.critical_K(N, V)
    if math.isfinite(K):
        assert np.isclose(ps.ghz_visibility(N, K), V, atol=1e-8)
