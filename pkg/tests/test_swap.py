import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pdc_contrast import photon_statistics as ps
from pdc_contrast import swap


def test_aligned_swap_equals_four_photon_visibility():
    r = swap.oracle_swap_visibility(0.15, 0.0, cutoff=5)
    assert abs(r.value - ps.ghz_visibility(4, 0.15)) < 1e-4


@pytest.mark.parametrize("alpha", [0.3, 0.9])
def test_misalignment_factor(alpha):
    base = swap.oracle_swap_visibility(0.1, 0.0, cutoff=4).value
    tilted = swap.oracle_swap_visibility(0.1, alpha, cutoff=4).value
    assert np.isclose(tilted / base, math.cos(alpha) ** 2, atol=1e-6)


def test_boundaries():
    assert np.isclose(math.cos(swap.alpha_boundary()) ** 2, 1 / math.sqrt(2))
    assert np.isclose(swap.K_boundary(0.0), ps.critical_K(4, 1 / math.sqrt(2)), atol=1e-9)
    assert math.isnan(swap.K_boundary(0.6))


def test_region_shape_and_corner():
    region = swap.chsh_region([0.0, 0.1, 1.0], [0.0, 0.5, 1.5])
    assert region.shape == (3, 3)
    assert region[0, 0] and not region[-1, -1]


def test_alpha_range_checked():
    with pytest.raises(ValueError):
        swap.swap_visibility(0.1, 2.0)


@settings(max_examples=40, deadline=None)
@given(K=st.floats(0, 1), alpha=st.floats(0, math.pi / 2))
def test_region_downward_closed(K, alpha):
    if swap.bell_violation_possible(K, alpha):
        assert swap.bell_violation_possible(K / 2, alpha / 2)
