"""The Fock-space oracle against the closed forms, including its truncation estimate."""

import warnings

from pdc_contrast import photon_statistics as ps
from pdc_contrast.oracle import (TruncationWarning, ghz_setup, oracle_visibility,
                                 two_photon_setup)

# Two photons: visibility from the simulated statistics against 1/(1 + 2 tanh^2 K).
r = oracle_visibility(two_photon_setup(), 0.4911)
print(f"oracle {r.value:.6f}, closed form {ps.two_photon_visibility(0.4911):.6f}, "
      f"cutoff change {r.convergence:.1e}")

# Four photons from two sources.
for K in (0.1, 0.2, 0.3):
    r = oracle_visibility(ghz_setup(4), K, cutoff=6)
    print(f"K={K}: oracle {r.value:.6f}, closed form {ps.ghz_visibility(4, K):.6f}")

# Too small a cutoff is caught, not silently accepted.
with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always", TruncationWarning)
    r = oracle_visibility(two_photon_setup(), 1.0, cutoff=3, phase_grid=8)
print("converged:", r.converged, "|", caught[0].message if caught else "")
print(f"cutoff-3 value {r.value:.4f} vs exact {ps.two_photon_visibility(1.0):.4f}: "
      f"off by {abs(r.value - ps.two_photon_visibility(1.0)):.1e}")
