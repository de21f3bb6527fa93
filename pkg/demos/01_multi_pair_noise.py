"""How multi-pair emission washes out GHZ-type interference as the pump gets stronger."""

import math

import numpy as np

from pdc_contrast import photon_statistics as ps

# One source already loses contrast: at gain K the two-photon visibility is
# 1 / (1 + 2 tanh^2 K).  The second term is the weight of double pairs.
for K in (0.1, 0.3, 0.5, 1.0):
    print(f"K={K:4.1f}  V_2={ps.two_photon_visibility(K):.4f}")

# With N/2 sources the visibility is the reciprocal of a polynomial in
# tanh^2 K with integer coefficients.
for N in (2, 4, 6):
    print(N, [str(c) for c in ps.visibility_polynomial(N).coefficients])

# Where does each N cross the Bell threshold?  The crossing moves to lower
# gain as N grows, towards tanh^2 K = 1/8.
print("\nN   V_crit      K_crit   tanh^2 K")
for N in (2, 4, 6, 8, 10, 20, 40):
    V = ps.bell_threshold(N)
    K = ps.critical_K(N, V)
    print(f"{N:<3} {V:.3e}  {K:.4f}   {math.tanh(K) ** 2:.4f}")
print(f"inf                {ps.critical_row(None, 'bell').K_crit:.4f}   0.1250")

# For very strong pumping every N keeps a small residual contrast given by an
# exact rational number.
print("\nK -> infinity:", [str(ps.asymptotic_visibility(N)) for N in (2, 4, 6, 8, 10)])

# Cost of the experiment: the probability that every source fires at the
# critical gain shrinks exponentially with N.
for N in (4, 8, 12):
    e = ps.emission_probabilities(ps.critical_K(N, ps.bell_threshold(N)), N)
    print(f"N={N:2d}: all sources fire with probability {e.all_sources_ge_one:.2e}")

Ks = np.linspace(0, 2, 5)
print("\nV_4 along K:", np.round([ps.ghz_visibility(4, k) for k in Ks], 4))
