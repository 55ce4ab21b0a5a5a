"""
Merging two cats into one
=========================

Two N-photon cats enter the four-mode merge circuit. Whenever the two
heralding modes stay dark, the surviving modes hold a 2N-photon cat.
"""

import math

from noonsim import analytics
from noonsim.catfactory import apply_tn, make_cat, tn_branch_spectrum

# Start from the exact 2-photon cat (|2,0> + |0,2>)/sqrt(2).
n = 2
cat = make_cat(n)
print("input cat:", dict(cat.terms))

# Run the full Fock-space simulation of one merge.
outcome = apply_tn(cat, cat, n)
print(f"herald probability  {outcome.success_prob:.16f}")
print(f"closed form         {float(analytics.exact_p_tn(n)):.16f}  ({analytics.format_rational(analytics.exact_p_tn(n))})")
print(f"fidelity with |4_+> {outcome.fidelity_to_target:.16f}")

# The detectors see a whole spectrum of photon counts, not just zero.
for photons, weight in tn_branch_spectrum(n).items():
    print(f"  {photons} photons at the heralds: {weight:.6f}")

# Doubling repeatedly gives 4, 8, 16 and 32 photon cats, with the
# herald probability shrinking roughly like 1/sqrt(4 pi N).
state = make_cat(1)
for k in range(5):
    m = 2**k
    out = apply_tn(state, state, m)
    print(f"N={m:2d}: p={out.success_prob:.6f}  stirling={1 / math.sqrt(4 * math.pi * m):.6f}  F={out.fidelity_to_target:.12f}")
    state = out.output_state
