"""Render figures from the CSVs the demos and CLI emit. Not part of the
acceptance suite; requires matplotlib.

Usage: python demos/plot_results.py [--dir out]
"""

import argparse
import csv
from pathlib import Path


def _read(path: Path) -> list[dict]:
    with path.open(encoding="utf-8") as fh:
        return [{k: _coerce(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def _coerce(value: str):
    try:
        return float(value)
    except ValueError:
        return value


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dir", default="out", help="directory holding the CSVs")
    args = parser.parse_args()
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib is not installed; pip install matplotlib")
        return 1

    base = Path(args.dir)
    made = []

    misreport = base / "misreport.csv"
    if misreport.exists():
        rows = _read(misreport)
        fig, ax = plt.subplots()
        for cp in sorted({int(r["cp"]) for r in rows}):
            sub = [r for r in rows if int(r["cp"]) == cp]
            sub.sort(key=lambda r: r["declared_type"])
            ax.plot([r["declared_type"] for r in sub],
                    [r["backhaul_bits"] for r in sub],
                    marker="o", label=f"CP {cp} (true {sub[0]['true_type']:.0f})")
            truth = next(r for r in sub if r["truthful"])
            ax.plot([truth["declared_type"]], [truth["backhaul_bits"]], "k*", markersize=12)
        ax.set_xlabel("declared type")
        ax.set_ylabel("content served via backhaul (bits)")
        ax.legend()
        fig.savefig(base / "misreport.png", dpi=150, bbox_inches="tight")
        made.append("misreport.png")

    baseline = base / "baseline.csv"
    if baseline.exists():
        rows = _read(baseline)
        rows.sort(key=lambda r: r["type"])
        fig, ax = plt.subplots()
        ax.plot([r["type"] for r in rows], [r["utility_mechanism"] for r in rows],
                marker="o", label="designed contracts")
        ax.plot([r["type"] for r in rows], [r["utility_equal_split"] for r in rows],
                marker="s", label="equal storage split")
        ax.set_xlabel("CP type")
        ax.set_ylabel("utility")
        ax.legend()
        fig.savefig(base / "baseline.png", dpi=150, bbox_inches="tight")
        made.append("baseline.png")

    agg = base / "scaling_agg.csv"
    if agg.exists():
        rows = _read(agg)
        fig, ax = plt.subplots()
        for alpha in sorted({r["alpha"] for r in rows}):
            sub = sorted((r for r in rows if r["alpha"] == alpha),
                         key=lambda r: r["cp_count"])
            ax.plot([r["cp_count"] for r in sub], [r["mean_utility"] for r in sub],
                    marker="o", label=f"Zipf alpha={alpha:g}")
        ax.set_xlabel("number of CPs")
        ax.set_ylabel("mean CP utility")
        ax.legend()
        fig.savefig(base / "scaling.png", dpi=150, bbox_inches="tight")
        made.append("scaling.png")

    if made:
        print("wrote " + ", ".join(str(base / name) for name in made))
    else:
        print(f"no known CSVs found under {base}; run the demos or the CLI first")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
