"""Command line entry point.

Exit codes: 0 on success, 2 when a feasibility check fails, 1 on any error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .allocation import InstanceTooLargeError, StorageGrid
from .experiments import (
    DESIGN_FIELDS,
    design_rows,
    format_cell,
    run_baseline_comparison,
    run_misreport_sweep,
    run_scaling_study,
    run_verify,
    write_csv,
)
from .mechanism import BRUTE_FORCE, MATCHING, design_contracts
from .scenario import ScenarioConfig, ScenarioError, load_scenario


def _parse_floats(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part]


def _parse_ints(text: str) -> list[int]:
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("config", help="path to a JSON scenario config")
    sub.add_argument("--out", default="out", help="output directory (default: out)")
    sub.add_argument("--grid-step", type=float, default=None,
                     help="storage grid step in bits (default: capacity / 20)")
    solver = sub.add_mutually_exclusive_group()
    solver.add_argument("--exact", dest="method", action="store_const", const=BRUTE_FORCE,
                        help="force the brute-force solver")
    solver.add_argument("--heuristic", dest="method", action="store_const", const=MATCHING,
                        help="force the matching heuristic")
    sub.set_defaults(method=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cachecontracts",
        description="Contract-based caching incentives: design, verify, sweep.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    _add_common(commands.add_parser("design", help="design contracts for the scenario"))
    _add_common(commands.add_parser("verify", help="run the feasibility verifiers"))
    _add_common(commands.add_parser("sweep-misreport",
                                    help="utility/backhaul sweep over declarations"))
    _add_common(commands.add_parser("baseline", help="compare against equal storage split"))

    scaling = commands.add_parser("scaling", help="mean utility vs CP count and Zipf alpha")
    _add_common(scaling)
    scaling.add_argument("--cps", required=True, help="CP counts, e.g. 2,3,4")
    scaling.add_argument("--alphas", required=True, help="Zipf alphas, e.g. 0.2,2.0")
    scaling.add_argument("--seeds", required=True, help="seeds, e.g. 1..20 or 1,2,3")
    return parser


def _grid_for(scenario, args) -> StorageGrid:
    return StorageGrid.from_scenario(scenario, args.grid_step)


def _cmd_design(args) -> int:
    scenario = load_scenario(args.config)
    grid = _grid_for(scenario, args)
    from .experiments import resolve_method

    method = resolve_method(scenario, grid, args.method)
    design = design_contracts(scenario, tuple(scenario.true_types), grid=grid, method=method)
    out = Path(args.out) / "design.csv"
    write_csv(out, DESIGN_FIELDS, design_rows(design))
    print(f"method={method} social_welfare={format_cell(design.report.social_welfare)} "
          f"mno_utility={format_cell(design.report.mno_utility)}")
    for bundle in design.bundles:
        print(f"cp={bundle.cp} storage={format_cell(bundle.storage)} "
              f"price={format_cell(bundle.price)}")
    print(f"wrote {out}")
    return 0


def _cmd_verify(args) -> int:
    scenario = load_scenario(args.config)
    ok, rows = run_verify(scenario, Path(args.out) / "verify.csv",
                          grid=_grid_for(scenario, args), method=args.method)
    for row in rows:
        status = {True: "pass", False: "FAIL", "": "skip"}[row["passed"]]
        label = f"{row['check']}" + (f"[cp={row['cp']}]" if row["cp"] != "" else "")
        note = f" ({row['note']})" if row["note"] else ""
        print(f"{status:4s} {label}{note}")
    print(f"wrote {Path(args.out) / 'verify.csv'}")
    return 0 if ok else 2


def _cmd_sweep(args) -> int:
    scenario = load_scenario(args.config)
    out = Path(args.out) / "misreport.csv"
    rows = run_misreport_sweep(scenario, out, grid=_grid_for(scenario, args))
    print(f"wrote {out} ({len(rows)} rows)")
    return 0


def _cmd_baseline(args) -> int:
    scenario = load_scenario(args.config)
    out = Path(args.out) / "baseline.csv"
    run_baseline_comparison(scenario, out, grid=_grid_for(scenario, args), method=args.method)
    print(f"wrote {out}")
    return 0


def _cmd_scaling(args) -> int:
    import json

    with open(args.config, encoding="utf-8") as fh:
        template = ScenarioConfig.from_dict(json.load(fh))
    out = Path(args.out) / "scaling.csv"
    rows, _agg = run_scaling_study(
        template,
        cp_counts=_parse_ints(args.cps),
        zipf_alphas=_parse_floats(args.alphas),
        seeds=_parse_ints(args.seeds),
        output=out,
        grid_step=args.grid_step,
        method=args.method,
    )
    print(f"wrote {out} ({len(rows)} cells)")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "design": _cmd_design,
        "verify": _cmd_verify,
        "sweep-misreport": _cmd_sweep,
        "baseline": _cmd_baseline,
        "scaling": _cmd_scaling,
    }
    try:
        return handlers[args.command](args)
    except (ScenarioError, InstanceTooLargeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
