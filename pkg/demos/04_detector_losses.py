"""
Imperfect detectors
===================

A detector with efficiency eta misses each photon with probability 1 - eta,
so some merges are accepted although photons were lost. Those outputs are
corrupt.
"""

from noonsim import analytics
from noonsim.catfactory import merge_lossy_accept
from noonsim.protocol import ProtocolConfig, aggregate, run_many

eta = 0.9

# Exact decomposition of one merge at N=4 from the Fock-space branches.
res = merge_lossy_accept(4, eta)
print(f"N=4 accept {res.accept_prob:.6f}, genuine {res.true_weight:.6f}")
for photons, weight in sorted(res.corrupt_weights.items()):
    print(f"  missed {photons} photon(s): {weight:.3e}")

# For large N the false-accept fraction is dominated by two missed photons
# and tends to (1 - eta)^2 N / (2N - 1), about (1 - eta)^2 / 2.
for n in (4, 16, 64, 256):
    print(f"N={n:3d}: false-accept fraction {analytics.false_accept_fraction(n, eta):.5f}")

# A corrupt input contaminates everything built from it.
for e in (0.8, 0.9, 0.95, 1.0):
    s = aggregate(run_many(ProtocolConfig(target_n=8, target_count=20, eta=e, seed=7), 200))
    print(f"eta={e:.2f}: corrupt fraction of 8-photon cats {s.corruption_fraction:.3f}")
