"""Sweep every type declaration each CP could make (the backhaul figure).

For each unilateral declaration the mechanism is re-solved exactly; the CSV
records the utility and the content volume each CP would serve over the
backhaul. Declarations priced beyond a CP's cap are opt-outs: no storage,
no payment, everything rides the backhaul.
"""

from pathlib import Path

from cachecontracts import build_scenario
from cachecontracts.corpus import trend_corpus
from cachecontracts.experiments import run_misreport_sweep

out = Path("out")
scenario = build_scenario(trend_corpus(1)[0])
rows = run_misreport_sweep(scenario, out / "misreport.csv")

print(f"true types: {tuple(float(t) for t in scenario.true_types)}")
print(f"\n{'cp':>3} {'declared':>9} {'utility':>9} {'backhaul':>9} {'afford':>7} {'truth':>6}")
for row in rows:
    print(f"{row['cp']:3d} {row['declared_type']:9.0f} {row['utility']:9.3f} "
          f"{row['backhaul_bits']:9.1f} {str(bool(row['affordable'])):>7} "
          f"{'*' if row['truthful'] else '':>6}")

print("\nEach CP ships the least backhaul traffic at its own contract:")
print("understating buys too little cache, overstating is priced out.")
print(f"wrote {out / 'misreport.csv'}")
