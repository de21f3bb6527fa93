"""Visibility loss from time correlations of pairs emitted by different sources.

Each filtered pair has the real Gaussian time amplitude
``exp(alpha1 (t1^2 + t2^2) + alpha2 t1 t2)``.  An N-photon amplitude is a
product of pair amplitudes over a pairing of the N detection times; the
visibility is the overlap of the all-reflected and all-transmitted pairings.
Times are measured in units of the inverse pump bandwidth, so only the ratio
``f = sigma_filter / sigma_pump`` appears.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.optimize import bisect

from .photon_statistics import bell_threshold

F_XTOL = 1e-8


def pair_coefficients(f: float) -> tuple[float, float, float]:
    """(alpha1, alpha2, Gamma) of the filtered pair amplitude with sigma_pump = 1."""
    f = float(f)
    if not f > 0:
        raise ValueError(f"filter ratio must be positive, got {f}")
    f2 = f * f
    denom = 1.0 + 2.0 * f2
    alpha1 = -(f2 + f2 * f2) / denom
    alpha2 = 2.0 * f2 * f2 / denom
    gamma = 0.5 * math.pi * math.sqrt(denom) / f2
    return alpha1, alpha2, gamma


@dataclass(frozen=True, eq=False)
class QuadraticGaussianForm:
    """Amplitude ``exp(-t^T A t)`` over N detection times."""

    matrix: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.matrix, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("form matrix must be square")
        if np.abs(A - A.T).max(initial=0.0) > 1e-12:
            raise ValueError("form matrix must be symmetric")
        try:
            np.linalg.cholesky(A)
        except np.linalg.LinAlgError:
            raise ValueError("form matrix is not positive definite") from None
        object.__setattr__(self, "matrix", A)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def log_norm(self) -> float:
        """log c such that c exp(-t^T A t) is normalized in L2."""
        _, logdet = np.linalg.slogdet(2.0 * self.matrix)
        return 0.25 * logdet - 0.25 * self.dimension * math.log(math.pi)


Pair = tuple[int, int]


@dataclass(frozen=True)
class PairingPattern:
    """Perfect matching of detection indices 1..N."""

    pairs: frozenset

    def __post_init__(self):
        pairs = frozenset(tuple(sorted(p)) for p in self.pairs)
        flat = [i for p in pairs for i in p]
        N = len(flat)
        if N == 0 or sorted(flat) != list(range(1, N + 1)):
            raise ValueError(f"not a perfect matching of 1..N: {sorted(pairs)}")
        object.__setattr__(self, "pairs", pairs)

    @property
    def N(self) -> int:
        return 2 * len(self.pairs)

    @classmethod
    def of(cls, pairs: Iterable[Pair]) -> "PairingPattern":
        return cls(frozenset(pairs))

    def sorted_pairs(self) -> list[Pair]:
        return sorted(self.pairs)


def _check_N(N: int) -> int:
    if int(N) != N or N < 2 or N % 2:
        raise ValueError(f"N must be an even integer >= 2, got {N}")
    return int(N)


def reflected_pattern(N: int) -> PairingPattern:
    N = _check_N(N)
    return PairingPattern.of((2 * i - 1, 2 * i) for i in range(1, N // 2 + 1))


def transmitted_pattern(N: int) -> PairingPattern:
    N = _check_N(N)
    if N == 2:
        return reflected_pattern(2)
    pairs = [(1, 3)] + [(2 * i, 2 * i + 3) for i in range(1, (N - 4) // 2 + 1)] + [(N - 2, N)]
    return PairingPattern.of(pairs)


def pair_form(f: float) -> QuadraticGaussianForm:
    a1, a2, _ = pair_coefficients(f)
    return QuadraticGaussianForm(np.array([[-a1, -a2 / 2], [-a2 / 2, -a1]]))


def assemble_form(N: int, f: float, pattern: PairingPattern) -> QuadraticGaussianForm:
    N = _check_N(N)
    if pattern.N != N:
        raise ValueError(f"pattern covers {pattern.N} indices, expected {N}")
    a1, a2, _ = pair_coefficients(f)
    A = np.eye(N) * -a1
    for i, j in pattern.pairs:
        A[i - 1, j - 1] = A[j - 1, i - 1] = -a2 / 2
    return QuadraticGaussianForm(A)


def gaussian_overlap(R: QuadraticGaussianForm, T: QuadraticGaussianForm) -> float:
    """Overlap of the two unit-normalized amplitudes, from determinants."""
    if R.dimension != T.dimension:
        raise ValueError("forms must have the same dimension")
    _, ld_r = np.linalg.slogdet(2.0 * R.matrix)
    _, ld_t = np.linalg.slogdet(2.0 * T.matrix)
    sign, ld_s = np.linalg.slogdet(R.matrix + T.matrix)
    if sign <= 0:
        raise ValueError("sum of forms is not positive definite")
    return math.exp(0.25 * ld_r + 0.25 * ld_t - 0.5 * ld_s)


def _log_gaussian_integral(A: np.ndarray) -> float:
    """log of the integral of exp(-t^T A t) over R^N by integrating one time at a time.

    The exponent is kept as explicit monomial coefficients.  Each step singles
    out one variable x, writes the exponent as -a x^2 + b x + c with b linear in
    the remaining times, and uses  int exp(-a x^2 + b x + c) dx
    = sqrt(pi / a) exp(b^2 / (4 a) + c).
    """
    N = A.shape[0]
    square = {i: float(A[i, i]) for i in range(N)}            # coefficient of -t_i^2
    cross = {(i, j): -2.0 * float(A[i, j])                     # coefficient of +t_i t_j
             for i in range(N) for j in range(i + 1, N) if A[i, j] != 0.0}
    log_total = 0.0
    for x in range(N):
        a = square.pop(x)
        if not a > 0:
            raise ValueError(f"non-positive leading coefficient {a:.3e} at step {x}")
        linear = {}
        for (i, j) in [k for k in cross if x in k]:
            other = j if i == x else i
            linear[other] = cross.pop((i, j))
        log_total += 0.5 * math.log(math.pi / a)
        # b^2 / (4a) folds back into the remaining quadratic form
        for i, bi in linear.items():
            square[i] -= bi * bi / (4 * a)
            for j, bj in linear.items():
                if i < j:
                    cross[(i, j)] = cross.get((i, j), 0.0) + 2 * bi * bj / (4 * a)
    return log_total


def eliminate_overlap(R: QuadraticGaussianForm, T: QuadraticGaussianForm) -> float:
    """Same quantity as :func:`gaussian_overlap`, by sequential single-variable integration."""
    if R.dimension != T.dimension:
        raise ValueError("forms must have the same dimension")
    log_rt = _log_gaussian_integral(R.matrix + T.matrix)
    log_rr = _log_gaussian_integral(2.0 * R.matrix)
    log_tt = _log_gaussian_integral(2.0 * T.matrix)
    return math.exp(log_rt - 0.5 * (log_rr + log_tt))


def filter_visibility(N: int, f: float, method: str = "determinant") -> float:
    R = assemble_form(N, f, reflected_pattern(N))
    T = assemble_form(N, f, transmitted_pattern(N))
    if method == "determinant":
        return gaussian_overlap(R, T)
    if method == "elimination":
        return eliminate_overlap(R, T)
    raise ValueError(f"unknown method {method!r}")


def closed_form_visibility(N: int, f: float) -> float:
    """Hand-reduced visibilities for N = 4..12."""
    f = float(f)
    x = f * f
    s = 1 + 2 * x
    if N == 4:
        return math.sqrt(s) / (1 + x)
    if N == 6:
        return s / ((1 + x / 2) * (1 + 3 * x / 2))
    if N == 8:
        r2 = math.sqrt(2)
        return 2 * s ** 1.5 / ((1 + x) * (x + 2 + r2) * (x + 2 - r2))
    if N == 10:
        r5 = math.sqrt(5)
        return 16 * s ** 2 / (5 * (x + 3 + r5) * (x + 3 - r5)
                              * (x + 1 + 1 / r5) * (x + 1 - 1 / r5))
    if N == 12:
        r3 = math.sqrt(3)
        return 16 * s ** 2.5 / ((1 + x) * (2 + x) * (2 + 3 * x)
                                * (x + 2 * (2 + r3)) * (x + 2 * (2 - r3)))
    raise ValueError(f"no closed form for N={N}; use filter_visibility")


def small_f_expansion(N: int, f: float) -> float:
    return 1 - f ** 4 * N / 8 + f ** 6 * N / 4


def large_f_asymptote(N: int, f: float) -> float:
    return 2 ** ((3 * N - 2) / 4) * f ** (1 - N / 2) / N


def critical_f(N: int) -> float:
    """Filter ratio at which V_N(f) falls to the Bell threshold for N photons."""
    N = _check_N(N)
    if N < 4:
        raise ValueError("critical filter ratio needs N >= 4")
    target = bell_threshold(N)
    hi = 1.0
    while filter_visibility(N, hi) > target:
        hi *= 2.0
    return bisect(lambda f: filter_visibility(N, f) - target, hi / 2 if hi > 1 else 1e-6, hi,
                  xtol=F_XTOL)


def approx_critical_f(N: int) -> float:
    """Critical f from the broad-filter asymptote; tends to 4 sqrt(2) as N grows."""
    N = _check_N(N)
    if N < 4:
        raise ValueError("approximate critical filter ratio needs N >= 4")
    # computed in logs so large N does not underflow
    log2_base = math.log2(N) - (5 * N - 4) / 4
    return 2.0 ** (log2_base * 2 / (2 - N))
