import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pdc_contrast.fock import (FockStateVector, ModeLabel, Polarization, annihilate,
                               apply_transform, build_pdc_state, check_unitary,
                               coincidence_moment)


def test_single_squeezer_amplitudes():
    K, cutoff = 0.4, 10
    state = build_pdc_state(K, [(0, 1)], cutoff)
    t = math.tanh(K)
    norm = math.sqrt(sum(t ** (2 * n) for n in range(cutoff + 1)))
    for n in range(cutoff + 1):
        assert np.isclose(state.amplitude((n, n)), t ** n / norm)
    assert state.amplitude((1, 0)) == 0


def test_state_is_normalized():
    state = build_pdc_state(0.7, [(0, 2), (1, 3)], 6)
    assert np.isclose(state.norm_squared(), 1.0)


def test_vacuum_at_zero_gain():
    state = build_pdc_state(0.0, [(0, 1), (2, 3)], 4)
    assert len(state) == 1
    assert np.isclose(state.amplitude((0, 0, 0, 0)), 1.0)


def test_cutoff_caps_pairs_per_coupling():
    state = build_pdc_state(0.9, [(0, 1), (2, 3)], 3)
    assert state.occupations.max() <= 3


@pytest.mark.parametrize("pairs", [[(0, 0)], [(0, 1), (1, 2)]])
def test_bad_couplings_rejected(pairs):
    with pytest.raises(ValueError):
        build_pdc_state(0.1, pairs, 3)


def test_negative_gain_rejected():
    with pytest.raises(ValueError):
        build_pdc_state(-0.1, [(0, 1)], 3)


def test_mode_label_is_hashable():
    a = ModeLabel(1, "a", Polarization.H)
    assert a == ModeLabel(1, "a", Polarization.H)
    assert len({a, ModeLabel(1, "a", Polarization.V)}) == 2


def test_dict_roundtrip():
    s = FockStateVector.from_dict({(1, 0): 0.6, (0, 1): 0.8j}, 2, 3)
    assert s.as_dict() == {(1, 0): 0.6 + 0j, (0, 1): 0.8j}


def test_beamsplitter_hong_ou_mandel():
    # |1,1> through a 50:50 beamsplitter has no coincidence term
    s = FockStateVector.from_dict({(1, 1): 1.0}, 2, 4)
    r = 1 / math.sqrt(2)
    out = apply_transform(s, np.array([[r, r], [r, -r]]))
    assert abs(out.amplitude((1, 1))) < 1e-12
    assert np.isclose(abs(out.amplitude((2, 0))) ** 2, 0.5)


def test_non_unitary_rejected():
    with pytest.raises(ValueError):
        check_unitary(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_annihilate_single_mode():
    s = FockStateVector.from_dict({(2, 0): 1.0}, 2, 4)
    out = annihilate(s, [1.0, 0.0])
    assert np.isclose(out.amplitude((1, 0)), math.sqrt(2))


def test_coincidence_moment_of_pair():
    # <n_0 n_1> for a two-mode squeezed vacuum equals <n^2> = sinh^2 K cosh 2K (untruncated)
    K = 0.3
    s = build_pdc_state(K, [(0, 1)], 30)
    got = coincidence_moment(s, [[1, 0], [0, 1]])
    assert np.isclose(got, math.sinh(K) ** 2 * math.cosh(2 * K), rtol=1e-10)


def test_detector_vector_must_be_normalized():
    s = build_pdc_state(0.3, [(0, 1)], 4)
    with pytest.raises(ValueError):
        coincidence_moment(s, [[1.0, 1.0]])


@st.composite
def unitaries(draw, n=3):
    x = draw(st.lists(st.floats(-1, 1), min_size=2 * n * n, max_size=2 * n * n))
    A = np.array(x[: n * n]).reshape(n, n) + 1j * np.array(x[n * n:]).reshape(n, n)
    q, r = np.linalg.qr(A + 3 * np.eye(n))
    return q


@settings(max_examples=30, deadline=None)
@given(U=unitaries(), K=st.floats(0.0, 0.8))
def test_transform_preserves_norm(U, K):
    s = build_pdc_state(K, [(0, 1)], 5, n_modes=3)
    out = apply_transform(s, U)
    assert np.isclose(out.norm_squared(), 1.0, atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(K=st.floats(0.0, 1.5), cutoff=st.integers(1, 8))
def test_build_always_normalized(K, cutoff):
    s = build_pdc_state(K, [(0, 1), (2, 3)], cutoff)
    assert np.isclose(s.norm_squared(), 1.0)
    # every ket is balanced between the coupled modes
    assert np.array_equal(s.occupations[:, 0], s.occupations[:, 1])
