"""Mean CP utility versus population size and popularity steepness.

CP counts are nested inside one physical network per seed, so each step
adds competition without redrawing the world. Steeper popularity (alpha=2)
lets a cached file absorb more requests, which lifts utilities.
"""

from pathlib import Path

from cachecontracts.corpus import scaling_template
from cachecontracts.experiments import run_scaling_study

out = Path("out")
rows, agg = run_scaling_study(
    scaling_template(),
    cp_counts=[2, 3, 4, 5],
    zipf_alphas=[0.2, 2.0],
    seeds=list(range(1, 11)),
    output=out / "scaling.csv",
)

print("mean CP utility over 10 seeds:")
print(f"{'cp_count':>9} {'alpha=0.2':>10} {'alpha=2.0':>10}")
for n in (2, 3, 4, 5):
    flat = next(a["mean_utility"] for a in agg if a["cp_count"] == n and a["alpha"] == 0.2)
    steep = next(a["mean_utility"] for a in agg if a["cp_count"] == n and a["alpha"] == 2.0)
    print(f"{n:9d} {flat:10.4f} {steep:10.4f}")
print(f"\nwrote {out / 'scaling.csv'} and {out / 'scaling_agg.csv'}")
