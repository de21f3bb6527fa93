import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pdc_contrast import tomography as tm
from pdc_contrast.oracle import TruncationWarning


def projector(v):
    return tm.DensityMatrix16(np.outer(v, v.conj()))


def test_settings_measure_pauli_axes():
    assert list(tm.ORIENTATION[1:]) == [1, -1, -1]


def test_xi_basis_orthonormal():
    M = np.array([tm.psi4_vector()] + tm.xi_vectors())
    assert np.allclose(M.conj() @ M.T, np.eye(9), atol=1e-12)


def test_weights_sum_to_one():
    for K in np.linspace(0, 3, 13):
        assert np.isclose(tm.mixture_weights(K).total(), 1.0, atol=1e-12)
    assert tm.mixture_weights(0.0).psi == 1.0


def test_pure_psi4_figures():
    rho = projector(tm.psi4_vector())
    assert np.isclose(tm.fidelity(rho), 1.0)
    assert np.isclose(tm.v_total(rho), 1.0)
    T = tm.tensor_from_rho(rho)
    assert np.isclose(T.T[3, 3, 3, 3], 1.0)


def test_maximally_mixed():
    T = np.zeros((4, 4, 4, 4))
    T[0, 0, 0, 0] = 1
    rho = tm.reconstruct_rho(tm.CorrelationTensor4(T))
    assert np.allclose(rho.rho, np.eye(16) / 16)
    assert tm.v_total(rho) == 0.0


def test_low_gain_distribution_is_psi4():
    # all stations at the sigma_z setting: HHVV has probability 1/3
    P = tm.fourfold_distribution(0.02, [tm.SETTINGS[3]] * 4)
    # '+' at the sigma_z setting is V, so HHVV is outcome (-, -, +, +)
    assert np.isclose(P[1, 1, 0, 0], 1 / 3, atol=1e-3)


def test_pipeline_matches_mixture():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        res = tm.correlation_tensor(0.3, cutoff=8)
    rho = tm.reconstruct_rho(res.tensor)
    assert np.abs(rho.rho - tm.analytic_rho(0.3).rho).max() < 2e-3
    assert rho.is_psd


def test_low_cutoff_rejected():
    with pytest.raises(ValueError):
        tm.fourfold_distribution(0.3, [(0, 0)] * 4, cutoff=4)


def test_epsilon_above_one():
    for K in (0.0, 0.7, 3.0):
        assert tm.epsilon(tm.tensor_from_rho(tm.analytic_rho(K))) > 1


def test_fidelity_and_purity_decrease():
    K = np.linspace(0.01, 3, 30)
    F = [tm.fidelity(tm.analytic_rho(k)) for k in K]
    V = [tm.v_total(tm.analytic_rho(k)) for k in K]
    assert np.all(np.diff(F) < 0) and np.all(np.diff(V) < 0)


def test_rho_visibility_of_psi4():
    assert np.isclose(tm.rho_visibility(projector(tm.psi4_vector())), 1.0, atol=1e-8)


def test_non_hermitian_rejected():
    bad = np.eye(16) / 16
    bad[0, 1] = 0.1
    with pytest.raises(ValueError):
        tm.DensityMatrix16(bad)


@st.composite
def density_matrices(draw):
    rng = np.random.default_rng(draw(st.integers(0, 2 ** 32 - 1)))
    rank = draw(st.integers(1, 16))
    A = rng.normal(size=(16, rank)) + 1j * rng.normal(size=(16, rank))
    H = A @ A.conj().T
    return tm.DensityMatrix16(H / np.trace(H).real)


@settings(max_examples=25, deadline=None)
@given(rho=density_matrices())
def test_tomography_roundtrip(rho):
    back = tm.reconstruct_rho(tm.tensor_from_rho(rho))
    assert np.abs(back.rho - rho.rho).max() < 1e-12


@settings(max_examples=25, deadline=None)
@given(K=st.floats(0, 5))
def test_analytic_rho_physical(K):
    rho = tm.analytic_rho(K)
    assert rho.min_eigenvalue > -1e-12
    assert 0 <= tm.fidelity(rho) <= 1 + 1e-12
    assert math.isfinite(tm.v_total(rho))
