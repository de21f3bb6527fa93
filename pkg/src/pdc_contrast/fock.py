"""Sparse truncated Fock-space states for multimode PDC sources.

A state is an occupation table (one row per basis ket, one column per mode)
together with a complex amplitude vector.  Sources are products of two-mode
squeezers; ``cutoff`` caps the number of pairs emitted into each coupling, so
every emission mode holds at most ``cutoff`` photons before any linear-optics
transform is applied.
"""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass
from math import factorial, sqrt
from typing import Mapping, Sequence

import numpy as np

PRUNE_TOL = 1e-15
UNITARY_TOL = 1e-12
MAX_MODES = 16


class Polarization(enum.Enum):
    H = "H"
    V = "V"
    PERP = "PERP"  # misaligned, distinguishable partner mode


@dataclass(frozen=True)
class ModeLabel:
    source_index: int
    spatial_arm: str
    polarization: Polarization

    def __str__(self) -> str:
        return f"{self.spatial_arm}{self.source_index}:{self.polarization.value}"


@dataclass(frozen=True, eq=False)
class FockStateVector:
    """Sparse state: ``occupations[d]`` is the ket carrying ``amplitudes[d]``."""

    occupations: np.ndarray
    amplitudes: np.ndarray
    cutoff: int

    def __post_init__(self):
        occ = np.asarray(self.occupations, dtype=np.int64)
        amp = np.asarray(self.amplitudes, dtype=complex)
        if occ.ndim != 2 or amp.shape != (occ.shape[0],):
            raise ValueError("occupations must be (D, M) with one amplitude per row")
        if occ.size and occ.min() < 0:
            raise ValueError("negative occupation")
        object.__setattr__(self, "occupations", occ)
        object.__setattr__(self, "amplitudes", amp)

    @property
    def n_modes(self) -> int:
        return self.occupations.shape[1]

    def __len__(self) -> int:
        return len(self.amplitudes)

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def normalized(self) -> "FockStateVector":
        n = sqrt(self.norm_squared())
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return FockStateVector(self.occupations, self.amplitudes / n, self.cutoff)

    def pruned(self, tol: float = PRUNE_TOL) -> "FockStateVector":
        keep = np.abs(self.amplitudes) >= tol
        return FockStateVector(self.occupations[keep], self.amplitudes[keep], self.cutoff)

    def as_dict(self) -> dict[tuple[int, ...], complex]:
        return {tuple(int(n) for n in row): complex(a)
                for row, a in zip(self.occupations, self.amplitudes)}

    def amplitude(self, occupation: Sequence[int]) -> complex:
        hit = np.all(self.occupations == np.asarray(occupation), axis=1)
        return complex(self.amplitudes[hit].sum()) if hit.any() else 0j

    @classmethod
    def from_dict(cls, amplitudes: Mapping[Sequence[int], complex], n_modes: int,
                  cutoff: int) -> "FockStateVector":
        if not amplitudes:
            return cls(np.zeros((0, n_modes), dtype=np.int64), np.zeros(0, complex), cutoff)
        occ = np.array([list(k) for k in amplitudes], dtype=np.int64).reshape(-1, n_modes)
        return cls(occ, np.array(list(amplitudes.values()), dtype=complex), cutoff)


def _merge(occ: np.ndarray, amp: np.ndarray, cutoff: int) -> FockStateVector:
    if len(amp) == 0:
        return FockStateVector(occ, amp, cutoff)
    uniq, inverse = np.unique(occ, axis=0, return_inverse=True)
    summed = np.zeros(len(uniq), dtype=complex)
    np.add.at(summed, inverse.ravel(), amp)
    return FockStateVector(uniq, summed, cutoff)


def build_pdc_state(K: float, pairs: Sequence[tuple[int, int]], cutoff: int,
                    n_modes: int | None = None) -> FockStateVector:
    """Product of two-mode squeezed vacua, one per coupled mode pair.

    Each coupling (i, j) contributes ``sum_n tanh(K)**n |n>_i |n>_j`` with
    ``n <= cutoff``.  The truncated state is renormalized explicitly, since
    closed-form prefactors do not survive truncation anyway.
    """
    K = float(K)
    if K < 0:
        raise ValueError(f"squeeze parameter must be non-negative, got {K}")
    if cutoff < 1:
        raise ValueError("cutoff must hold at least the vacuum and one-pair terms")
    used = [m for p in pairs for m in p]
    if n_modes is None:
        n_modes = max(used) + 1 if used else 0
    if any(i == j for i, j in pairs) or len(set(used)) != len(used):
        raise ValueError("couplings must join distinct modes, each mode used once")
    if used and (min(used) < 0 or max(used) >= n_modes):
        raise ValueError("coupled mode index out of range")
    if n_modes > MAX_MODES:
        raise ValueError(f"at most {MAX_MODES} modes supported")

    t = np.tanh(K)
    n_pairs = np.indices((cutoff + 1,) * len(pairs)).reshape(len(pairs), -1).T
    occ = np.zeros((len(n_pairs), n_modes), dtype=np.int64)
    for c, (i, j) in enumerate(pairs):
        occ[:, i] += n_pairs[:, c]
        occ[:, j] += n_pairs[:, c]
    # 0**0 == 1 keeps the vacuum at K = 0
    amp = np.power(t, n_pairs.sum(axis=1)).astype(complex)
    state = FockStateVector(occ, amp, cutoff).normalized().pruned()
    return state.normalized()


def check_unitary(U: np.ndarray, tol: float = UNITARY_TOL) -> np.ndarray:
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ValueError("mode transform must be a square matrix")
    err = np.abs(U.conj().T @ U - np.eye(len(U))).max() if len(U) else 0.0
    if err > tol:
        raise ValueError(f"mode transform is not unitary (deviation {err:.3e})")
    return U


def _column_power(column: np.ndarray, n: int) -> dict[tuple[int, ...], complex]:
    """Expand (sum_i U_ij a_i^dag)**n / sqrt(n!) as {exponents: coefficient}."""
    poly: dict[tuple[int, ...], complex] = {(0,) * len(column): 1.0 / sqrt(factorial(n))}
    support = np.flatnonzero(np.abs(column) > 0)
    for _ in range(n):
        nxt: dict[tuple[int, ...], complex] = defaultdict(complex)
        for exps, c in poly.items():
            for i in support:
                e = list(exps)
                e[i] += 1
                nxt[tuple(e)] += c * column[i]
        poly = nxt
    return poly


def apply_transform(state: FockStateVector, U: np.ndarray) -> FockStateVector:
    """Apply the passive linear-optics unitary that maps ``a_j^dag -> sum_i U_ij a_i^dag``.

    Photon number is conserved, so no truncation happens here and the norm is
    preserved up to rounding.
    """
    U = check_unitary(U)
    if U.shape[0] != state.n_modes:
        raise ValueError(f"transform acts on {U.shape[0]} modes, state has {state.n_modes}")
    cache: dict[tuple[int, int], dict] = {}

    def power(j: int, n: int):
        if (j, n) not in cache:
            cache[(j, n)] = _column_power(U[:, j], n)
        return cache[(j, n)]

    out: dict[tuple[int, ...], complex] = defaultdict(complex)
    M = state.n_modes
    for row, amp in zip(state.occupations, state.amplitudes):
        poly = {(0,) * M: complex(amp)}
        for j in np.flatnonzero(row):
            factor = power(int(j), int(row[j]))
            nxt: dict[tuple[int, ...], complex] = defaultdict(complex)
            for e1, c1 in poly.items():
                for e2, c2 in factor.items():
                    nxt[tuple(a + b for a, b in zip(e1, e2))] += c1 * c2
            poly = nxt
        for exps, c in poly.items():
            # (a^dag)^m |0> = sqrt(m!) |m>
            out[exps] += c * sqrt(np.prod([factorial(m) for m in exps]))
    return FockStateVector.from_dict(out, M, state.cutoff).pruned()


def annihilate(state: FockStateVector, coefficients: Sequence[complex]) -> FockStateVector:
    """Apply the linear combination ``sum_i c_i a_i`` of annihilation operators."""
    coefficients = np.asarray(coefficients, dtype=complex)
    if coefficients.shape != (state.n_modes,):
        raise ValueError("one coefficient per mode required")
    occs, amps = [], []
    for i in np.flatnonzero(coefficients):
        occ, amp = lower(state.occupations, state.amplitudes, int(i))
        occs.append(occ)
        amps.append(amp * coefficients[i])
    if not occs:
        return FockStateVector(np.zeros((0, state.n_modes), np.int64), np.zeros(0, complex),
                               state.cutoff)
    return _merge(np.concatenate(occs), np.concatenate(amps), state.cutoff)


def lower(occ: np.ndarray, amp: np.ndarray, mode: int) -> tuple[np.ndarray, np.ndarray]:
    """Single-mode annihilator on raw arrays; injective, so no merging needed."""
    n = occ[:, mode]
    keep = n > 0
    new = occ[keep].copy()
    new[:, mode] -= 1
    return new, amp[keep] * np.sqrt(n[keep])


def coincidence_moment(state: FockStateVector,
                       detector_modes: Sequence[Sequence[complex]]) -> float:
    """Normally ordered moment <psi| P^dag P |psi> with P the product of detector modes.

    Each detector mode is a normalized coefficient vector over the state's modes.
    """
    if len(detector_modes) == 0:
        raise ValueError("at least one detector mode is required")
    out = state
    for d in detector_modes:
        d = np.asarray(d, dtype=complex)
        if abs(np.vdot(d, d).real - 1.0) > 1e-10:
            raise ValueError("detector mode coefficients must be normalized")
        out = annihilate(out, d)
    return max(out.norm_squared(), 0.0)
