"""Spectral filtering versus visibility: pairs from different sources must be indistinguishable."""

import numpy as np

from pdc_contrast import temporal

# A pair amplitude is a Gaussian in the two detection times.  Its width
# relative to the pump pulse is set by the filter ratio f.
print(temporal.pair_coefficients(1.0))

# The N-photon amplitude is a product of pair Gaussians.  "Reflected" and
# "transmitted" histories pair the detectors differently:
for N in (4, 6, 8):
    print(N, temporal.reflected_pattern(N).sorted_pairs(),
          temporal.transmitted_pattern(N).sorted_pairs())

# Their overlap is the visibility.  Determinants and step-by-step Gaussian
# integration give the same number.
for f in (0.5, 2.0, 5.0):
    det = temporal.filter_visibility(6, f)
    elim = temporal.filter_visibility(6, f, method="elimination")
    print(f"f={f}: {det:.12f}  {elim:.12f}")

# Narrow filters (small f) keep the visibility near one; the first
# correction is quartic.
f = 0.1
print(temporal.filter_visibility(8, f), temporal.small_f_expansion(8, f))

# The largest filter ratio that still allows a Bell violation, and the
# cruder estimate from the broad-filter power law.
print("\nN   f_crit   approx")
for N in range(4, 22, 2):
    print(f"{N:<3} {temporal.critical_f(N):.4f}   {temporal.approx_critical_f(N):.4f}")

# The estimate creeps up to 4 sqrt(2) only logarithmically.
for N in (100, 10_000, 1_000_000):
    print(N, temporal.approx_critical_f(N), 4 * np.sqrt(2))
