"""Run the full feasibility report on one instance.

Individual rationality and incentive compatibility are checked by
exhaustive counterfactual sweeps against the exact solver; budget balance
and price monotonicity come from the truthful design.
"""

from pathlib import Path

from cachecontracts import build_scenario
from cachecontracts.corpus import symmetric_corpus
from cachecontracts.experiments import run_verify

out = Path("out")
scenario = build_scenario(symmetric_corpus(1)[0])
ok, rows = run_verify(scenario, out / "verify.csv")

for row in rows:
    status = {True: "pass", False: "FAIL", "": "skip"}[row["passed"]]
    label = row["check"] + (f"[cp={row['cp']}]" if row["cp"] != "" else "")
    margin = f" margin={row['margin']:.3e}" if isinstance(row["margin"], float) else ""
    note = f" ({row['note']})" if row["note"] else ""
    print(f"{status:4s} {label}{margin}{note}")
print(f"\noverall: {'feasible' if ok else 'INFEASIBLE'}; wrote {out / 'verify.csv'}")
