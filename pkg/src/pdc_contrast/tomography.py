"""Effective four-qubit state seen by fourfold-coincidence tomography of a |psi_4> source.

One type-II source emits into arms a and b; a 50:50 beamsplitter splits each
arm over two stations (1, 2 from arm a, 3, 4 from arm b).  Conditioning on a
click at every station and doing Pauli tomography on the normalized fourfold
statistics yields an "apparent" state that mixes |psi_4> with multi-pair noise.

Qubit convention: H is basis index 0 and the +1 eigenvector of sigma_z; the
tensor-product order is station 1, 2, 3, 4.
"""

from __future__ import annotations

import itertools
import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .fock import ModeLabel, Polarization
from .oracle import (Analyzer, ExperimentSetup, OracleVisibility, TruncationWarning,
                     gram_tensor, oracle_visibility, outcome_table)
from .photon_statistics import AnalyzerSetting

log = logging.getLogger(__name__)

N_STATIONS = 4
DIM = 2 ** N_STATIONS

PAULI = np.array([
    [[1, 0], [0, 1]],
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)

# tomography settings (theta, phi) for k = 1, 2, 3
SETTINGS = {1: (0.0, 0.0), 2: (0.0, math.pi / 2), 3: (math.pi / 4, 0.0)}


def measured_observable(theta: float, phi: float) -> np.ndarray:
    """Single-qubit observable P(+1) - P(-1) that one analyzer setting measures.

    The detector annihilator is sum_j d_j a_j, so it registers the photon state
    with amplitudes conj(d).
    """
    O = np.zeros((2, 2), dtype=complex)
    for r in (1, -1):
        d = Analyzer(0, 1).channels(AnalyzerSetting(theta, phi, r), 2)[0]
        ket = d.conj()
        O += r * np.outer(ket, ket.conj())
    return O


def _orientation() -> np.ndarray:
    """Sign s_k with measured_observable(setting k) = s_k sigma_k."""
    s = np.ones(4)
    for k, (th, ph) in SETTINGS.items():
        O = measured_observable(th, ph)
        s[k] = round(np.trace(O @ PAULI[k]).real / 2)
        if np.abs(O - s[k] * PAULI[k]).max() > 1e-12:
            raise AssertionError(f"setting {k} does not measure +-sigma_{k}")
    return s


ORIENTATION = _orientation()


@dataclass(frozen=True, eq=False)
class CorrelationTensor4:
    """T[i, j, k, l] = <sigma_i sigma_j sigma_k sigma_l> with sigma_0 the identity."""

    T: np.ndarray

    def __post_init__(self):
        T = np.asarray(self.T, dtype=float)
        if T.shape != (4,) * N_STATIONS:
            raise ValueError(f"tensor must have shape (4, 4, 4, 4), got {T.shape}")
        if abs(T[0, 0, 0, 0] - 1.0) > 1e-9:
            raise ValueError("T[0,0,0,0] must equal 1")
        if np.abs(T).max() > 1 + 1e-9:
            raise ValueError("correlation entries must lie in [-1, 1]")
        object.__setattr__(self, "T", T)

    @property
    def full_correlations(self) -> np.ndarray:
        return self.T[1:, 1:, 1:, 1:]


@dataclass(frozen=True, eq=False)
class DensityMatrix16:
    """Hermitian, unit-trace 16 x 16 matrix.  Positivity is reported, not enforced."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (DIM, DIM):
            raise ValueError("density matrix must be 16 x 16")
        if np.abs(rho - rho.conj().T).max() > 1e-10:
            raise ValueError("density matrix must be Hermitian")
        if abs(np.trace(rho) - 1) > 1e-10:
            raise ValueError("density matrix must have unit trace")
        object.__setattr__(self, "rho", rho)

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.rho).min())

    @property
    def is_psd(self) -> bool:
        return self.min_eigenvalue >= -1e-9


# ---- kets --------------------------------------------------------------------

def ket(terms: dict[str, float]) -> np.ndarray:
    """16-vector from {'HVHV': amplitude, ...}."""
    v = np.zeros(DIM, dtype=complex)
    for label, amp in terms.items():
        if len(label) != N_STATIONS or set(label) - {"H", "V"}:
            raise ValueError(f"bad ket label {label!r}")
        v[int(label.replace("H", "0").replace("V", "1"), 2)] += amp
    return v


def psi4_vector() -> np.ndarray:
    a, b = math.sqrt(1 / 3), math.sqrt(1 / 12)
    return ket({"HHVV": a, "VVHH": a, "HVHV": b, "HVVH": b, "VHHV": b, "VHVH": b})


def xi_vectors() -> list[np.ndarray]:
    """The eight noise kets orthogonal to |psi_4>, in the order listed with the mixture."""
    h, r2, r6 = 0.5, 1 / math.sqrt(2), 1 / math.sqrt(6)
    return [
        ket({"HVVV": h, "VHVV": h, "VVHV": h, "VVVH": h}),
        ket({"HHVV": r2, "VVHH": -r2}),
        ket({"HHHV": h, "HHVH": h, "HVHH": h, "VHHH": h}),
        ket({"VVVV": 1.0}),
        ket({"HVVV": -h, "VHVV": -h, "VVHV": h, "VVVH": h}),
        ket({"HHVV": r6, "HVHV": -r6, "HVVH": -r6, "VHHV": -r6, "VHVH": -r6, "VVHH": r6}),
        ket({"HHHV": -h, "HHVH": -h, "HVHH": h, "VHHH": h}),
        ket({"HHHH": 1.0}),
    ]


# ---- analytic mixture --------------------------------------------------------

@dataclass(frozen=True)
class MixtureWeights:
    psi: float
    low: float    # on xi_1, xi_2, xi_3
    high: float   # on xi_4 .. xi_8

    def total(self) -> float:
        return self.psi + 3 * self.low + 5 * self.high


def mixture_weights(K: float) -> MixtureWeights:
    """Spectral weights of the apparent state.

    Computed in terms of u = tanh(K)^2 to stay finite for large K; the
    denominator is 3 - 4 cosh 2K + 5 cosh 4K rescaled by cosh(K)^-4.
    """
    K = float(K)
    if not K >= 0:
        raise ValueError(f"K must be non-negative, got {K}")
    u = math.tanh(K) ** 2
    # cosh 2K cosh^-2 K = 1 + u, cosh 4K cosh^-4 K = (1 + u)^2 + 4u (exact identities)
    c2 = 1 + u
    c4 = c2 * c2 + 4 * u
    one = (1 - u) ** 2                     # cosh^-4 K
    D = 3 * one - 4 * c2 * (1 - u) + 5 * c4
    w_psi = (3 * one + 4 * c2 * (1 - u) + 5 * c4) / (3 * D)
    w_low = (-one - 4 * c2 * (1 - u) + 5 * c4) / (6 * D)
    w_high = (3 * one - 4 * c2 * (1 - u) + c4) / (6 * D)
    return MixtureWeights(w_psi, w_low, w_high)


def analytic_rho(K: float) -> DensityMatrix16:
    w = mixture_weights(K)
    xs = xi_vectors()
    psi = psi4_vector()
    rho = w.psi * np.outer(psi, psi.conj())
    for i, x in enumerate(xs):
        rho += (w.low if i < 3 else w.high) * np.outer(x, x.conj())
    return DensityMatrix16(rho)


# ---- tomography --------------------------------------------------------------

def _pauli_string(idx) -> np.ndarray:
    op = np.ones((1, 1), dtype=complex)
    for i in idx:
        op = np.kron(op, PAULI[i])
    return op


_PAULI_STRINGS = np.array([_pauli_string(idx) for idx in itertools.product(range(4), repeat=4)])


def tensor_from_rho(rho: DensityMatrix16 | np.ndarray) -> CorrelationTensor4:
    R = rho.rho if isinstance(rho, DensityMatrix16) else np.asarray(rho)
    T = np.einsum("nij,ji->n", _PAULI_STRINGS, R).real.reshape((4,) * N_STATIONS)
    return CorrelationTensor4(T)


def reconstruct_rho(T: CorrelationTensor4) -> DensityMatrix16:
    rho = np.einsum("n,nij->ij", T.T.ravel(), _PAULI_STRINGS) / DIM
    return DensityMatrix16((rho + rho.conj().T) / 2)


def psi4_setup(K: float | None = None) -> ExperimentSetup:
    """Single source with type-II coupling and beamsplitters splitting each arm in two.

    Emission modes: a_H a_V u_H u_V b_H b_V w_H w_V, where u and w are the
    vacuum ports of the beamsplitters.  Laboratory modes: station 1..4, H then V.
    """
    if K is not None and not K >= 0:
        raise ValueError(f"K must be non-negative, got {K}")
    modes = tuple(ModeLabel(1, f"d{s}", p) for s in range(1, 5)
                  for p in (Polarization.H, Polarization.V))
    aH, aV, uH, uV, bH, bV, wH, wV = range(8)
    couplings = ((aH, bV), (aV, bH))
    r = 1 / math.sqrt(2)
    U = np.zeros((8, 8))
    for p in (0, 1):
        for src, vac, s1, s2 in ((aH, uH, 0, 2), (bH, wH, 4, 6)):
            U[s1 + p, src + p] = U[s2 + p, src + p] = r
            U[s1 + p, vac + p], U[s2 + p, vac + p] = r, -r
    stations = tuple(Analyzer(2 * s, 2 * s + 1) for s in range(4))
    return ExperimentSetup("psi4", modes, couplings, stations, U, default_cutoff=8)


def fourfold_distribution(K: float, settings, cutoff: int = 8, G: np.ndarray | None = None,
                          setup: ExperimentSetup | None = None) -> np.ndarray:
    """Normalized 2x2x2x2 table over outcomes (index 0 is +1) for four (theta, phi) settings."""
    if cutoff < 6:
        raise ValueError("cutoff must be >= 6 for the four-photon statistics")
    setup = setup or psi4_setup()
    if G is None:
        G = gram_tensor(setup, K, cutoff)
    return outcome_table(setup, K, list(settings), G=G)


_SIGNS = np.array([1.0, -1.0])


def _tensor_from_distributions(setup: ExperimentSetup, G: np.ndarray, K: float) -> np.ndarray:
    T = np.zeros((4,) * N_STATIONS)
    seen = set()
    for ks in itertools.product((1, 2, 3), repeat=N_STATIONS):
        P = outcome_table(setup, K, [SETTINGS[k] for k in ks], G=G)
        # every index pattern whose nonzero entries agree with ks is read off this table
        for mask in itertools.product((0, 1), repeat=N_STATIONS):
            idx = tuple(k if m else 0 for k, m in zip(ks, mask))
            if idx in seen:
                continue
            seen.add(idx)
            weights = [(_SIGNS if m else np.ones(2)) * (ORIENTATION[k] if m else 1.0)
                       for k, m in zip(ks, mask)]
            T[idx] = np.einsum("abcd,a,b,c,d->", P, *weights)
    T[0, 0, 0, 0] = 1.0
    return T


@dataclass(frozen=True)
class TomographyResult:
    tensor: CorrelationTensor4
    convergence: float  # max |T(cutoff) - T(cutoff - 1)|
    converged: bool
    cutoff: int


def correlation_tensor(K: float, cutoff: int = 8, tol: float = 1e-3) -> TomographyResult:
    """Correlation tensor from simulated fourfold statistics.

    Full correlations are sign-weighted sums over all four outcomes; marginal
    entries (some index 0) sum the same fourfold table with the signs of the
    dropped stations left out.  A run at ``cutoff - 1`` estimates truncation.
    """
    if cutoff < 7:
        raise ValueError("cutoff must be >= 7 (one less is used for the convergence estimate)")
    setup = psi4_setup(K)
    T = _tensor_from_distributions(setup, gram_tensor(setup, K, cutoff), K)
    T_prev = _tensor_from_distributions(setup, gram_tensor(setup, K, cutoff - 1), K)
    conv = float(np.abs(T - T_prev).max())
    ok = conv <= tol
    if not ok:
        msg = f"psi4 tomography changed by {conv:.2e} between cutoff {cutoff - 1} and {cutoff}"
        log.warning(msg)
        warnings.warn(msg, TruncationWarning, stacklevel=2)
    return TomographyResult(CorrelationTensor4(np.clip(T, -1.0, 1.0)), conv, ok, cutoff)


# ---- figures of merit ----------------------------------------------------------

def fidelity(rho: DensityMatrix16, K: float | None = None) -> float:
    """<psi_4| rho |psi_4>.  ``K`` is accepted for signature symmetry and ignored."""
    psi = psi4_vector()
    return float((psi.conj() @ rho.rho @ psi).real)


def v_total(rho: DensityMatrix16) -> float:
    purity = float(np.einsum("ij,ji->", rho.rho, rho.rho).real)
    return math.sqrt(max(DIM * purity - 1, 0.0) / (DIM - 1))


def _bloch(angles: np.ndarray) -> np.ndarray:
    th, ph = angles[0::2], angles[1::2]
    return np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=1)


def max_correlation(T: CorrelationTensor4, starts: int = 32, seed: int = 0) -> float:
    """Largest value of the fourfold correlation function over analyzer settings.

    Every analyzer setting measures n . sigma for some Bloch vector n, so the
    correlation function is the full-correlation tensor contracted with four
    unit vectors.  Multi-start alternating maximization (each step is exact in
    one vector) is followed by a Nelder-Mead polish in spherical angles.
    """
    C = T.full_correlations
    rng = np.random.default_rng(seed)
    best, best_vecs = -np.inf, None
    subs = ["j,k,l", "i,k,l", "i,j,l", "i,j,k"]
    for _ in range(starts):
        n = [v / np.linalg.norm(v) for v in rng.normal(size=(4, 3))]
        for _ in range(200):
            old = n
            n = list(n)
            for s in range(4):
                others = [n[t] for t in range(4) if t != s]
                g = np.einsum(f"ijkl,{subs[s]}->{'ijkl'[s]}", C, *others)
                norm = np.linalg.norm(g)
                if norm < 1e-15:
                    break
                n[s] = g / norm
            if max(np.abs(a - b).max() for a, b in zip(n, old)) < 1e-12:
                break
        val = float(np.einsum("ijkl,i,j,k,l->", C, *n))
        if val > best:
            best, best_vecs = val, n
    angles = np.concatenate([[math.acos(np.clip(v[2], -1, 1)), math.atan2(v[1], v[0])]
                             for v in best_vecs])
    res = minimize(lambda a: -np.einsum("ijkl,i,j,k,l->", C, *_bloch(a)), angles,
                   method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
    return max(best, float(-res.fun))


def epsilon(T: CorrelationTensor4) -> float:
    """Sum of squared full correlations over the largest attainable correlation value."""
    return float((T.full_correlations ** 2).sum() / max_correlation(T))


# ---- visibility of the apparent state ----------------------------------------

def _plus_projectors(phis: np.ndarray) -> np.ndarray:
    out = []
    for ph in phis:
        d = Analyzer(0, 1).channels(AnalyzerSetting(0.0, ph, 1), 2)[0].conj()
        out.append(np.outer(d, d.conj()))
    return np.array(out)


def rho_visibility(rho: DensityMatrix16, phase_grid: int = 24) -> float:
    """(p_max - p_min)/(p_max + p_min) of the all-plus fourfold outcome over phases at theta = 0."""
    R = rho.rho.reshape((2,) * (2 * N_STATIONS))
    phis = np.arange(phase_grid) * 2 * math.pi / phase_grid
    P = _plus_projectors(phis)
    grid = np.einsum("abcdefgh,pea,qfb,rgc,shd->pqrs", R, P, P, P, P, optimize=True).real

    def p_plus(phases):
        Ps = _plus_projectors(phases)
        return float(np.einsum("abcdefgh,ea,fb,gc,hd->", R, *Ps).real)

    results = []
    for sign, idx in ((1, np.argmax(grid)), (-1, np.argmin(grid))):
        x0 = phis[list(np.unravel_index(idx, grid.shape))]
        res = minimize(lambda x: -sign * p_plus(x), x0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-15})
        results.append(max(sign * grid.flat[idx], -res.fun) * sign)
    p_max, p_min = results
    return float((p_max - p_min) / (p_max + p_min))


def oracle_psi4_visibility(K: float, cutoff: int = 8, phase_grid: int = 12) -> OracleVisibility:
    return oracle_visibility(psi4_setup(K), K, phase_grid=phase_grid, cutoff=cutoff)


@dataclass(frozen=True)
class MeritPoint:
    K: float
    V: float
    F: float
    V_total: float
    epsilon: float


def merit_point(K: float) -> MeritPoint:
    rho = analytic_rho(K)
    return MeritPoint(float(K), rho_visibility(rho), fidelity(rho), v_total(rho),
                     epsilon(tensor_from_rho(rho)))
