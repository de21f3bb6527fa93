"""Entanglement swapping with two type-I sources and a misaligned second source.

Source 2 emits its b/B photons into ``cos(alpha) X + sin(alpha) X_perp``; the
perpendicular component never interferes at the swapping beamsplitters.  The
two-photon visibility of the outer pair is ``cos(alpha)**2 * V_4(K)``.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy.optimize import bisect

from .fock import ModeLabel, Polarization
from .oracle import Analyzer, ExperimentSetup, FixedDetector, OracleVisibility, oracle_visibility
from .photon_statistics import bell_threshold, ghz_visibility, tilde_p

CHSH_THRESHOLD = 1 / math.sqrt(2)

# laboratory mode order
MODE_NAMES = ("a1", "b1", "A1", "B1", "a2", "b2", "A2", "B2", "b2_perp", "B2_perp")
_IDX = {name: i for i, name in enumerate(MODE_NAMES)}


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not -1e-12 <= alpha <= math.pi / 2 + 1e-12:
        raise ValueError(f"misalignment angle must lie in [0, pi/2], got {alpha}")
    return alpha


def swap_visibility(K, alpha: float) -> float:
    return math.cos(_check_alpha(alpha)) ** 2 * ghz_visibility(4, K)


def chsh_region(K_grid: Sequence[float], alpha_grid: Sequence[float]) -> np.ndarray:
    """Boolean grid, rows over K and columns over alpha: True where V > 1/sqrt(2)."""
    K_grid = np.asarray(K_grid, dtype=float)
    alpha_grid = np.asarray(alpha_grid, dtype=float)
    for g in (K_grid, alpha_grid):
        if not np.all(np.isfinite(g)) or np.any(np.diff(g) < 0):
            raise ValueError("grids must be finite and sorted")
    V4 = np.array([ghz_visibility(4, k) for k in K_grid])
    c2 = np.cos([_check_alpha(a) for a in alpha_grid]) ** 2
    return np.outer(V4, c2) > CHSH_THRESHOLD


def alpha_boundary() -> float:
    """Largest misalignment compatible with CHSH violation (reached as K -> 0)."""
    return math.acos(2 ** -0.25)


def K_boundary(alpha: float = 0.0) -> float:
    """Gain at which cos^2(alpha) V_4(K) drops to 1/sqrt(2); nan beyond alpha_boundary."""
    c2 = math.cos(_check_alpha(alpha)) ** 2
    if c2 <= CHSH_THRESHOLD:
        return math.nan
    target = c2 / CHSH_THRESHOLD  # p_4(tanh^2 K) must equal this
    return bisect(lambda k: tilde_p(4, math.tanh(k) ** 2) - target, 0.0, 25.0, xtol=1e-12)


def swap_setup_descriptor(alpha: float = 0.0) -> ExperimentSetup:
    """Two type-I sources, swapping beamsplitters and the n + n_perp detector convention.

    The emission basis reuses the laboratory slots of b2, B2 for the rotated
    source modes b2' = cos(a) b2 + sin(a) b2_perp (likewise B2') and the perp
    slots for their vacuum complements.  Phase shifters are absorbed into the
    analyzer phases of the two outer stations.

    The swapping beamsplitters do not care about polarization, so the perp
    component reaching a swap detector is also attenuated by 1/sqrt(2); its
    partner input (source 1's perp mode) is always empty and is not tracked.
    """
    alpha = _check_alpha(alpha)
    arms = {"a": Polarization.H, "b": Polarization.H, "A": Polarization.V, "B": Polarization.V}
    modes = []
    for name in MODE_NAMES:
        pol = Polarization.PERP if name.endswith("perp") else arms[name[0]]
        modes.append(ModeLabel(int(name[1]), name.split("_")[0], pol))
    I = _IDX
    couplings = ((I["a1"], I["b1"]), (I["A1"], I["B1"]), (I["a2"], I["b2"]), (I["A2"], I["B2"]))
    c, s = math.cos(alpha), math.sin(alpha)
    U = np.eye(len(MODE_NAMES))
    for x in ("b2", "B2"):
        p = x + "_perp"
        U[I[x], I[x]], U[I[p], I[x]] = c, s
        U[I[x], I[p]], U[I[p], I[p]] = -s, c

    def vec(**coef):
        v = np.zeros(len(MODE_NAMES), dtype=complex)
        for k, val in coef.items():
            v[I[k]] = val
        return v

    r = 1 / math.sqrt(2)
    stations = (
        Analyzer(I["a1"], I["A1"]),
        Analyzer(I["a2"], I["A2"]),
        FixedDetector((vec(B1=r, b2=r), vec(b2_perp=r))),
        FixedDetector((vec(B2=r, b1=r), vec(B2_perp=r))),
    )
    return ExperimentSetup(f"swap(alpha={alpha:.6g})", tuple(modes), couplings, stations, U,
                           default_cutoff=6)


def oracle_swap_visibility(K: float, alpha: float, cutoff: int | None = None,
                           phase_grid: int | None = None, tol: float = 1e-3) -> OracleVisibility:
    return oracle_visibility(swap_setup_descriptor(alpha), K, phase_grid=phase_grid,
                             cutoff=cutoff, tol=tol)


def bell_violation_possible(K, alpha: float) -> bool:
    return swap_visibility(K, alpha) > bell_threshold(2)
