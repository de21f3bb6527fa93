"""Brute-force Fock-space oracle for coincidence probabilities and visibilities.

An :class:`ExperimentSetup` describes sources (squeezer couplings in an
emission basis), a passive transform from emission modes to laboratory modes,
and one detection station per photon.  Coincidence moments are evaluated by
pulling the detector modes back to the emission basis and forming the Gram
matrix of ``a_J |psi>`` over every choice ``J`` of one emission mode per
station; any analyzer setting then costs one small tensor contraction.
"""

from __future__ import annotations

import itertools
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .fock import (MAX_MODES, FockStateVector, ModeLabel, Polarization, build_pdc_state,
                   check_unitary, lower)
from .photon_statistics import AnalyzerSetting

log = logging.getLogger(__name__)

DEFAULT_PHASE_GRID = 24
_MAX_GRID_POINTS = 2_000_000


class TruncationWarning(UserWarning):
    """Oracle result changed by more than the tolerance between cutoff and cutoff - 1."""


@dataclass(frozen=True)
class Analyzer:
    """Two-channel polarization analyzer acting on laboratory modes ``h`` and ``v``."""

    h: int
    v: int

    def channels(self, setting: AnalyzerSetting, n_modes: int) -> list[np.ndarray]:
        a = setting.outcome * math.pi / 4 + setting.theta
        d = np.zeros(n_modes, dtype=complex)
        d[self.h] = math.cos(a)
        d[self.v] = math.sin(a) * np.exp(1j * setting.phi)
        return [d]


@dataclass(frozen=True, eq=False)
class FixedDetector:
    """Settings-free station; photon counts of all channels are added (n + n_perp)."""

    channels_: tuple[np.ndarray, ...]

    def channels(self, setting=None, n_modes=None) -> list[np.ndarray]:
        return [np.asarray(c, dtype=complex) for c in self.channels_]


Station = Analyzer | FixedDetector


@dataclass(frozen=True, eq=False)
class ExperimentSetup:
    name: str
    modes: tuple[ModeLabel, ...]
    couplings: tuple[tuple[int, int], ...]
    stations: tuple[Station, ...]
    transform: np.ndarray | None = None
    default_cutoff: int = 6
    _supports: tuple = field(init=False, repr=False)

    def __post_init__(self):
        M = len(self.modes)
        if M > MAX_MODES:
            raise ValueError(f"at most {MAX_MODES} modes")
        if len(set(self.modes)) != M:
            raise ValueError("mode labels must be unique")
        U = np.eye(M, dtype=complex) if self.transform is None else check_unitary(self.transform)
        if U.shape != (M, M):
            raise ValueError("transform must act on the setup's modes")
        object.__setattr__(self, "transform", U)
        object.__setattr__(self, "_supports", tuple(self._support(s) for s in self.stations))

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    @property
    def analyzers(self) -> list[int]:
        return [k for k, s in enumerate(self.stations) if isinstance(s, Analyzer)]

    def pull_back(self, lab_coefficients: np.ndarray) -> np.ndarray:
        """Detector coefficients over laboratory annihilators -> emission annihilators."""
        return self.transform.T @ lab_coefficients

    def _support(self, station: Station) -> np.ndarray:
        if isinstance(station, Analyzer):
            vecs = [np.eye(self.n_modes)[station.h], np.eye(self.n_modes)[station.v]]
        else:
            vecs = station.channels()
        mask = np.zeros(self.n_modes, dtype=bool)
        for v in vecs:
            mask |= np.abs(self.pull_back(v)) > 1e-14
        return np.flatnonzero(mask)

    def station_matrix(self, k: int, setting: AnalyzerSetting | None = None) -> np.ndarray:
        """X[j, j'] = sum over channels of conj(c_j) c_j' on station k's support."""
        sup = self._supports[k]
        X = np.zeros((len(sup), len(sup)), dtype=complex)
        setting = setting or AnalyzerSetting()
        for ch in self.stations[k].channels(setting, self.n_modes):
            c = self.pull_back(ch)[sup]
            X += np.outer(c.conj(), c)
        return X

    def station_sum_matrix(self, k: int, theta: float = 0.0, phi: float = 0.0) -> np.ndarray:
        """Station matrix summed over both analyzer outcomes."""
        if not isinstance(self.stations[k], Analyzer):
            return self.station_matrix(k)
        return sum(self.station_matrix(k, AnalyzerSetting(theta, phi, r)) for r in (1, -1))


def emission_state(setup: ExperimentSetup, K: float, cutoff: int) -> FockStateVector:
    return build_pdc_state(K, setup.couplings, cutoff, n_modes=setup.n_modes)


def lab_state(setup: ExperimentSetup, K: float, cutoff: int) -> FockStateVector:
    """State in laboratory modes (Schrodinger route); slow, used for cross-checks."""
    from .fock import apply_transform
    return apply_transform(emission_state(setup, K, cutoff), setup.transform)


def gram_tensor(setup: ExperimentSetup, K: float, cutoff: int) -> np.ndarray:
    """G[J, J'] = <a_J psi | a_J' psi>, reshaped with one axis per station (twice)."""
    state = emission_state(setup, K, cutoff)
    sups = setup._supports
    branches = [(state.occupations, state.amplitudes)]
    for sup in sups:
        branches = [lower(occ, amp, int(m)) for occ, amp in branches for m in sup]
    # index every surviving ket in one shared basis
    all_occ = np.concatenate([b[0] for b in branches])
    if len(all_occ) == 0:
        shape = tuple(len(s) for s in sups)
        return np.zeros(shape * 2, dtype=complex)
    _, inverse = np.unique(all_occ, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    D = inverse.max() + 1
    V = np.zeros((len(branches), D), dtype=complex)
    start = 0
    for row, (occ, amp) in enumerate(branches):
        V[row, inverse[start:start + len(amp)]] = amp
        start += len(amp)
    G = V.conj() @ V.T
    shape = tuple(len(s) for s in sups)
    return G.reshape(shape * 2)


def _contract(G: np.ndarray, mats: Sequence[np.ndarray]) -> np.ndarray:
    """sum_{J,J'} G[J,J'] prod_k X_k[..., j_k, j'_k]; each X_k may carry a leading grid axis.

    Grid axes of different stations form an outer product in the result.
    """
    n = len(mats)
    letters = iter("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")
    left = [next(letters) for _ in range(n)]
    right = [next(letters) for _ in range(n)]
    operands = [G]
    subs = ["".join(left + right)]
    out = []
    for k, X in enumerate(mats):
        if X.ndim == 3:
            g = next(letters)
            out.append(g)
            subs.append(g + left[k] + right[k])
        else:
            subs.append(left[k] + right[k])
        operands.append(X)
    expr = ",".join(subs) + "->" + "".join(out)
    return np.einsum(expr, *operands, optimize=True).real


def outcome_table(setup: ExperimentSetup, K: float, settings: Sequence[tuple[float, float]],
                  cutoff: int | None = None, G: np.ndarray | None = None) -> np.ndarray:
    """Normalized probabilities over the analyzer outcomes.

    ``settings`` holds one (theta, phi) per analyzer station.  The result has one
    axis of length 2 per analyzer; index 0 is outcome +1, index 1 is outcome -1.
    """
    cutoff = setup.default_cutoff if cutoff is None else cutoff
    if G is None:
        G = gram_tensor(setup, K, cutoff)
    an = setup.analyzers
    if len(settings) != len(an):
        raise ValueError(f"need {len(an)} analyzer settings")
    mats = []
    setting_of = dict(zip(an, settings))
    for k in range(len(setup.stations)):
        if k in setting_of:
            th, ph = setting_of[k]
            mats.append(np.stack([setup.station_matrix(k, AnalyzerSetting(th, ph, r))
                                  for r in (1, -1)]))
        else:
            mats.append(setup.station_matrix(k))
    table = _contract(G, mats)
    total = table.sum()
    if total <= 0:
        raise ValueError("no coincidences at this gain/cutoff (vacuum-dominated state)")
    return np.clip(table, 0.0, None) / total


OUTCOME_SIGNS = np.array([1, -1])


def signs_of(index: Sequence[int]) -> tuple[int, ...]:
    return tuple(int(OUTCOME_SIGNS[i]) for i in index)


@dataclass(frozen=True)
class OracleVisibility:
    value: float
    convergence: float  # |V(cutoff) - V(cutoff - 1)|
    converged: bool
    cutoff: int
    p_max: float
    p_min: float
    phases_max: tuple[float, ...]
    phases_min: tuple[float, ...]


def _plus_probability_fn(setup: ExperimentSetup, G: np.ndarray, theta: float = 0.0):
    an = setup.analyzers
    fixed = {k: setup.station_matrix(k) for k in range(len(setup.stations)) if k not in an}
    sums = {k: setup.station_sum_matrix(k, theta) for k in an}
    norm = _contract(G, [sums.get(k, fixed.get(k)) for k in range(len(setup.stations))])

    def grid(phase_values: np.ndarray) -> np.ndarray:
        mats = []
        for k in range(len(setup.stations)):
            if k in fixed:
                mats.append(fixed[k])
            else:
                mats.append(np.stack([setup.station_matrix(k, AnalyzerSetting(theta, p, 1))
                                      for p in phase_values]))
        return _contract(G, mats) / norm

    def point(phases: Sequence[float]) -> float:
        mats = []
        it = iter(phases)
        for k in range(len(setup.stations)):
            if k in fixed:
                mats.append(fixed[k])
            else:
                mats.append(setup.station_matrix(k, AnalyzerSetting(theta, next(it), 1)))
        return float(_contract(G, mats) / norm)

    return grid, point


def _refine(point, phases: np.ndarray, sign: float, step: float, sweeps: int = 2):
    x = np.array(phases, dtype=float)
    best = sign * point(x)
    for _ in range(sweeps):
        for i in range(len(x)):
            def f(v, i=i):
                y = x.copy()
                y[i] = v
                return -sign * point(y)
            res = minimize_scalar(f, bounds=(x[i] - step, x[i] + step), method="bounded",
                                  options={"xatol": 1e-10})
            if -res.fun > best:
                best = -res.fun
                x[i] = res.x
    return x, sign * best


def _extremes(setup: ExperimentSetup, G: np.ndarray, phase_grid: int, refine: bool):
    n = len(setup.analyzers)
    grid_fn, point_fn = _plus_probability_fn(setup, G)
    values = np.arange(phase_grid) * (2 * math.pi / phase_grid)
    P = grid_fn(values)
    i_max = np.unravel_index(np.argmax(P), P.shape)
    i_min = np.unravel_index(np.argmin(P), P.shape)
    x_max, x_min = values[list(i_max)], values[list(i_min)]
    p_max, p_min = float(P[i_max]), float(P[i_min])
    if refine:
        step = 2 * math.pi / phase_grid
        x_max, p_max = _refine(point_fn, x_max, +1.0, step)
        x_min, p_min = _refine(point_fn, x_min, -1.0, step)
    return p_max, p_min, tuple(map(float, x_max)), tuple(map(float, x_min))


def default_phase_grid(n_phases: int) -> int:
    g = DEFAULT_PHASE_GRID
    while g ** n_phases > _MAX_GRID_POINTS and g > 4:
        g //= 2
    return g


def oracle_visibility(setup: ExperimentSetup, K: float, phase_grid: int | None = None,
                      cutoff: int | None = None, tol: float = 1e-3,
                      refine: bool = True) -> OracleVisibility:
    """(p_max - p_min) / (p_max + p_min) of the all-plus outcome over analyzer phases.

    Every analyzer sits at theta = 0.  The result carries the change against a
    run at ``cutoff - 1``; if that exceeds ``tol`` the result is flagged as not
    converged and a :class:`TruncationWarning` is issued.
    """
    cutoff = setup.default_cutoff if cutoff is None else cutoff
    if cutoff < 2:
        raise ValueError("cutoff must be >= 2 to estimate convergence")
    if phase_grid is None:
        phase_grid = default_phase_grid(len(setup.analyzers))

    def run(c):
        G = gram_tensor(setup, K, c)
        p_max, p_min, x_max, x_min = _extremes(setup, G, phase_grid, refine)
        return (p_max - p_min) / (p_max + p_min), p_max, p_min, x_max, x_min

    V, p_max, p_min, x_max, x_min = run(cutoff)
    V_prev = run(cutoff - 1)[0]
    conv = abs(V - V_prev)
    ok = conv <= tol
    if not ok:
        msg = (f"{setup.name}: visibility changed by {conv:.2e} between cutoff "
               f"{cutoff - 1} and {cutoff} (tol {tol:.1e})")
        log.warning(msg)
        warnings.warn(msg, TruncationWarning, stacklevel=2)
    return OracleVisibility(V, conv, ok, cutoff, p_max, p_min, x_max, x_min)


# ---- standard setups -------------------------------------------------------

def two_photon_setup() -> ExperimentSetup:
    """One polarization-entangled source feeding two analyzers."""
    modes = tuple(ModeLabel(1, arm, pol) for arm in ("a1", "a2")
                  for pol in (Polarization.H, Polarization.V))
    # a1H a1V a2H a2V
    return ExperimentSetup("two-photon", modes, couplings=((0, 2), (1, 3)),
                           stations=(Analyzer(0, 1), Analyzer(2, 3)), default_cutoff=12)


def ghz_setup(N: int) -> ExperimentSetup:
    """N/2 sources whose neighbouring outputs meet on polarizing beamsplitters.

    H is transmitted and V reflected, so the H modes of outputs 2n and 2n+1 swap
    places while V modes stay put.
    """
    if N < 2 or N % 2:
        raise ValueError("N must be even and >= 2")
    modes = tuple(ModeLabel((n + 2) // 2, f"a{n + 1}", pol) for n in range(N)
                  for pol in (Polarization.H, Polarization.V))

    def H(n):  # 1-based output index -> mode index
        return 2 * (n - 1)

    def V(n):
        return 2 * (n - 1) + 1

    couplings = []
    for s in range(N // 2):
        couplings += [(H(2 * s + 1), H(2 * s + 2)), (V(2 * s + 1), V(2 * s + 2))]
    perm = list(range(2 * N))
    for n in range(2, N - 1, 2):
        perm[H(n)], perm[H(n + 1)] = H(n + 1), H(n)
    U = np.zeros((2 * N, 2 * N))
    for emit, lab in enumerate(perm):
        U[lab, emit] = 1.0
    stations = tuple(Analyzer(H(n), V(n)) for n in range(1, N + 1))
    cutoff = 12 if N == 2 else (8 if N == 4 else 4)
    return ExperimentSetup(f"ghz-{N}", modes, tuple(couplings), stations, U, cutoff)


def probability_table_signs(n: int) -> list[tuple[int, ...]]:
    return [signs_of(idx) for idx in itertools.product((0, 1), repeat=n)]
