"""Compare designed contracts against an equal storage split (utility figure).

The baseline hands every CP capacity / C and still charges the externality
price at that fixed split. High-traffic CPs do better under the designed
contracts; the equal split can be kinder to low types.
"""

from pathlib import Path

from cachecontracts import build_scenario
from cachecontracts.corpus import symmetric_corpus
from cachecontracts.experiments import run_baseline_comparison

out = Path("out")
scenario = build_scenario(symmetric_corpus(2)[1])
rows = run_baseline_comparison(scenario, out / "baseline.csv")

print(f"symmetric CPs with types {tuple(float(t) for t in scenario.true_types)}")
print(f"\n{'cp':>3} {'type':>5} {'mechanism':>10} {'equal split':>12}")
for row in rows:
    print(f"{row['cp']:3d} {row['type']:5.0f} {row['utility_mechanism']:10.3f} "
          f"{row['utility_equal_split']:12.3f}")
print(f"\nwrote {out / 'baseline.csv'}")
