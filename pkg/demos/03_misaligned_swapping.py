"""Entanglement swapping when the second source is rotated by an angle alpha."""

import math
import warnings

import numpy as np

from pdc_contrast import swap
from pdc_contrast.oracle import TruncationWarning

# The part of the rotated photons that lands in the orthogonal polarization
# never interferes.  The result is a clean factor cos^2(alpha).
for alpha in (0.0, 0.3, 0.6):
    print(f"alpha={alpha}: V = {swap.swap_visibility(0.2, alpha):.5f}")

# Check that against a direct Fock-space simulation of the four-detector setup.
with warnings.catch_warnings():
    warnings.simplefilter("ignore", TruncationWarning)
    base = swap.oracle_swap_visibility(0.15, 0.0, cutoff=5)
    tilted = swap.oracle_swap_visibility(0.15, 0.6, cutoff=5)
print("simulated ratio", tilted.value / base.value, "cos^2", math.cos(0.6) ** 2)

# Where can CHSH still be violated?
K = np.linspace(0, 0.6, 7)
alpha = np.linspace(0, math.pi / 2, 7)
region = swap.chsh_region(K, alpha)
print("\n rows: K, columns: alpha")
for k, row in zip(K, region):
    print(f"{k:.2f} " + "".join("#" if x else "." for x in row))

print("largest alpha:", swap.alpha_boundary())
print("largest K (aligned):", swap.K_boundary(0.0))
