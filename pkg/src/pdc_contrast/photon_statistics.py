"""Closed-form visibilities of multi-source PDC experiments at finite pump gain.

Everything here is a function of the gain ``K`` (K = chi * t) through
``t2 = tanh(K)**2``.  The N-photon GHZ visibility is ``1 / p_N(t2)`` where
``p_N`` is an integer polynomial; it coincides with the Chebyshev polynomial
``T_{N/2}(1 + 2 t2)``, which is how the large-N threshold limits are obtained.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.optimize import bisect

K_BRACKET = 25.0
K_XTOL = 1e-10


@dataclass(frozen=True)
class SqueezeParam:
    K: float

    def __post_init__(self):
        if not self.K >= 0:
            raise ValueError(f"K must be non-negative, got {self.K}")

    def __float__(self) -> float:
        return float(self.K)

    @property
    def t2(self) -> float:
        return math.tanh(self.K) ** 2

    @property
    def cosh2(self) -> float:
        return math.cosh(self.K) ** 2


@dataclass(frozen=True)
class AnalyzerSetting:
    """Polarization analyzer angles and the observed output port (r = +1 or -1)."""

    theta: float = 0.0
    phi: float = 0.0
    outcome: int = 1

    def __post_init__(self):
        if self.outcome not in (1, -1):
            raise ValueError("outcome must be +1 or -1")


def _gain(K) -> float:
    K = float(K)
    if not K >= 0:
        raise ValueError(f"K must be non-negative, got {K}")
    return K


def _check_even(N: int) -> int:
    if int(N) != N or N < 2 or N % 2:
        raise ValueError(f"N must be an even integer >= 2, got {N}")
    return int(N)


def two_photon_probability(K, s1: AnalyzerSetting, s2: AnalyzerSetting) -> float:
    """Normalized joint click probability for one polarization-entangled source.

    The sign of the sin(2 theta1) sin(2 theta2) term follows the term-by-term
    summation of the Fock expansion (it is the one that keeps the four outcome
    probabilities consistent with a |HH> + |VV> pair).
    """
    K = _gain(K)
    denom = 3.0 * math.cosh(2 * K) - 1.0
    coherent = math.cosh(K) ** 2 / denom
    background = math.sinh(K) ** 2 / denom
    rr = s1.outcome * s2.outcome
    corr = (math.sin(2 * s1.theta) * math.sin(2 * s2.theta)
            + math.cos(2 * s1.theta) * math.cos(2 * s2.theta) * math.cos(s1.phi + s2.phi))
    return coherent * 0.5 * (1.0 + rr * corr) + background


def two_photon_visibility(K) -> float:
    return 1.0 / (1.0 + 2.0 * math.tanh(_gain(K)) ** 2)


@dataclass(frozen=True)
class VisibilityPolynomial:
    """Exact coefficients of p_N; ``coefficients[j]`` multiplies tanh(K)**(2j)."""

    N: int
    coefficients: tuple[Fraction, ...]

    def __call__(self, t2: float) -> float:
        acc = 0.0
        for c in reversed(self.coefficients):
            acc = acc * t2 + float(c)
        return acc


@lru_cache(maxsize=None)
def visibility_polynomial(N: int) -> VisibilityPolynomial:
    N = _check_even(N)
    quarter = Fraction(N * N, 4)
    coeffs = []
    for j in range(N // 2 + 1):
        prod = Fraction(1)
        for k in range(j):
            prod *= quarter - k * k
        coeffs.append(Fraction(4 ** j, math.factorial(2 * j)) * prod)
    # terms with j > N/2 vanish identically (the product hits k = N/2)
    return VisibilityPolynomial(N, tuple(coeffs))


def tilde_p(N: int, t2: float) -> float:
    if not 0.0 <= t2 <= 1.0:
        raise ValueError("t2 = tanh(K)^2 must lie in [0, 1]")
    return visibility_polynomial(N)(t2)


def ghz_probability(N: int, K, phases: Sequence[float], outcomes: Sequence[int]) -> float:
    """Probability of one N-fold outcome pattern with all theta_i = 0."""
    N = _check_even(N)
    if len(phases) != N or len(outcomes) != N:
        raise ValueError("need one phase and one outcome per detector")
    if any(r not in (1, -1) for r in outcomes):
        raise ValueError("outcomes must be +1 or -1")
    p = tilde_p(N, math.tanh(_gain(K)) ** 2)
    sign = math.prod(outcomes)
    return (sign * math.cos(math.fsum(phases)) + p) / (2 ** N * p)


def ghz_visibility(N: int, K) -> float:
    return 1.0 / tilde_p(N, math.tanh(_gain(K)) ** 2)


def _pell_pair(n: int) -> tuple[int, int]:
    """(x, y) with (1 + sqrt2)**n = x + y sqrt2."""
    x, y = 1, 0
    for _ in range(n):
        x, y = x + 2 * y, x + y
    return x, y


def modified_fibonacci(n: int) -> int:
    """((1 + sqrt2)**n - (1 - sqrt2)**n) / sqrt2, evaluated in integers."""
    return 2 * _pell_pair(n)[1]


def asymptotic_visibility(N: int) -> Fraction:
    """Exact K -> infinity limit of the N-photon visibility."""
    M = _check_even(N) // 2
    return Fraction(1, modified_fibonacci(M) ** 2 + (-1) ** M)


def asymptotic_visibility_float(N: int) -> float:
    N = _check_even(N)
    s = math.sqrt(2.0)
    return 2.0 / ((s + 1.0) ** N + (s - 1.0) ** N)


def critical_K(N: int, V_target: float) -> float:
    """Gain above which the N-photon visibility falls below ``V_target``.

    Returns ``math.inf`` when the target is at or below the K -> infinity
    asymptote (every gain suffices) and ``0.0`` when the target is at or above 1
    (no positive gain suffices).
    """
    N = _check_even(N)
    if V_target <= float(asymptotic_visibility(N)):
        return math.inf
    if V_target >= 1.0:
        return 0.0
    return bisect(lambda k: ghz_visibility(N, k) - V_target, 0.0, K_BRACKET,
                  xtol=K_XTOL, rtol=4 * np.finfo(float).eps, maxiter=200)


@dataclass(frozen=True)
class EmissionProbabilities:
    one_or_more: float
    exactly_one: float
    all_sources_ge_one: float
    all_sources_exactly_one: float
    N: int


def emission_probabilities(K, N: int = 2) -> EmissionProbabilities:
    """Per-source pair-emission probabilities and their N/2-source products.

    ``exactly_one`` is the single-pair weight tanh^2 K / cosh^2 K of one
    two-mode squeezer; ``one_or_more`` is tanh^2 K.
    """
    N = _check_even(N)
    K = _gain(K)
    if math.isinf(K):
        ge1, one = 1.0, 0.0
    else:
        ge1 = math.tanh(K) ** 2
        one = ge1 / math.cosh(K) ** 2
    n_sources = N // 2
    return EmissionProbabilities(ge1, one, ge1 ** n_sources, one ** n_sources, N)


def bell_threshold(N: int) -> float:
    """Critical visibility for violating the standard N-party Bell inequalities."""
    N = _check_even(N)
    return 1.0 / (2.0 ** ((N - 2) / 2) * math.sqrt(2.0))


def separability_threshold(N: int) -> float:
    N = _check_even(N)
    return 1.0 / (2 ** (N - 1) + 1)


def limit_critical_t2(family: str) -> float:
    """N -> infinity limit of tanh^2 K_crit.

    With x = 1 + 2 t2 the visibility decays like 2 (x + sqrt(x^2 - 1))^(-N/2);
    matching it to 2^(-(N-1)/2) (Bell) or 2^-(N-1) (separability) pins
    x + sqrt(x^2 - 1) to 2 or 4.
    """
    base = {"bell": 2.0, "separability": 4.0}[family]
    x = (base + 1.0 / base) / 2.0
    return (x - 1.0) / 2.0


THRESHOLDS = {"bell": bell_threshold, "separability": separability_threshold}


@dataclass(frozen=True)
class CriticalRow:
    N: int | None  # None marks the N -> infinity row
    family: str
    V_crit: float
    K_crit: float
    emission: EmissionProbabilities | None


def critical_row(N: int | None, family: str) -> CriticalRow:
    if N is None:
        t2 = limit_critical_t2(family)
        K = math.atanh(math.sqrt(t2))
        e = emission_probabilities(K, 2)
        # the products over infinitely many sources vanish
        return CriticalRow(None, family, 0.0, K,
                           EmissionProbabilities(e.one_or_more, e.exactly_one, 0.0, 0.0, 0))
    V = THRESHOLDS[family](N)
    K = critical_K(N, V)
    return CriticalRow(N, family, V, K, emission_probabilities(K, N))
