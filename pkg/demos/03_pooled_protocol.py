"""
Monte Carlo of the pooled factory
=================================

Each run injects single-photon cats on demand, merges any two cats stored at
the same level, and stops once enough target cats exist.
"""

from noonsim import analytics
from noonsim.protocol import ProtocolConfig, aggregate, run_many

config = ProtocolConfig(target_n=8, target_count=10, seed=2024)
runs = run_many(config, 500)
summary = aggregate(runs)

expected = float(analytics.m1_exact(8))
print(f"mean singles per 8-photon cat: {summary.mean_singles_per_cat:.1f} +- {summary.se_singles_per_cat:.1f}")
print(f"exact recurrence:              {expected:.1f}")

# Per-level merge success rates should sit on the closed form p(T_n).
for level, stats in summary.levels.items():
    p = float(analytics.exact_p_tn(level))
    print(f"level {level}: {stats.success_rate:.4f} +- {stats.success_rate_se:.4f}   exact {p:.4f}")

# Starting from two-photon cats made by two-photon interference skips the
# cheapest level and costs a quarter of the photons.
hom = aggregate(run_many(ProtocolConfig(target_n=8, target_count=10, seed=2024, initial_level=2), 500))
print(f"\nlevel-2 start: {hom.mean_singles_per_cat:.1f} singles per cat, "
      f"ratio {summary.mean_singles_per_cat / hom.mean_singles_per_cat:.2f}")

# Fluctuations: quantiles of the singles consumed per run.
print("quantiles of singles per run:", summary.singles_quantiles)
