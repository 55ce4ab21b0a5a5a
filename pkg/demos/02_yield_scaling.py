"""
Why quantum memory matters
==========================

Without memory every merge in the cascade must succeed at once, and the yield
falls off like (2e)^-N. Storing successful cats and pairing them later turns
this into a sub-exponential cost.
"""

import math

from noonsim import analytics

# The memoryless cascade: exact rationals, then the asymptotic form.
print(" N   naive exact          naive asymptotic")
for k in range(1, 6):
    n = 2**k
    exact = analytics.exact_naive_p(n)
    print(f"{n:3d}  {float(exact):.6e}   {analytics.naive_asymptotic(n):.6e}")

# With memory: expected single photons per target cat from the exact
# recurrence M_2n = (M_n / 2) p(T_n), next to its asymptotic estimate.
print("\n N   M1 exact        M1 estimate     ratio   log(M1)/N")
for k in range(1, 9):
    n = 2**k
    m1 = analytics.m1_exact(n)
    est = analytics.m1_estimate(n)
    log_m1 = math.log(m1.numerator) - math.log(m1.denominator)
    print(f"{n:3d}  {float(m1):.6e}   {est:.6e}   {est / float(m1):.3f}   {log_m1 / n:.4f}")

# The estimate drifts to about 0.78 of the exact value: each level drops a
# (1 + 1/(8n)) Stirling correction and the product of those does not vanish.

# Earlier photon-by-photon schemes scale like c^-N.
n = 64
print(f"\nN={n}: pooled yield estimate {analytics.yield_estimate(n):.3e}")
print(f"       e^-N baseline        {analytics.baseline_scaling(n, 'fiurasek'):.3e}")
print(f"       (sqrt2 e)^-N         {analytics.baseline_scaling(n, 'kok'):.3e}")
