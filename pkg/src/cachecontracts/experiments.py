"""Experiment drivers: misreport sweeps, baselines, scaling studies, verification.

Every driver emits a CSV with a mandatory header, deterministic row order,
and floats printed with 12 significant digits, so identical configs produce
byte-identical outputs. Plotting is out of process; see demos/plot_results.py.
"""

from __future__ import annotations

import itertools
from pathlib import Path

import numpy as np

from .allocation import BRUTE_FORCE_GUARD, StorageGrid
from .mechanism import (
    BRUTE_FORCE,
    MATCHING,
    REL_TOL,
    MechanismSolver,
    design_contracts,
    verify_budget_balance,
    verify_ic,
    verify_ir,
    verify_price_monotonicity,
)
from .scenario import Scenario, ScenarioConfig, build_scenario

DEFAULT_CAP_FACTOR = 2.0


def format_cell(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".12g")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_csv(path, fieldnames: list[str], rows: list[dict]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(fieldnames)]
    for row in rows:
        lines.append(",".join(format_cell(row[name]) for name in fieldnames))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def exact_feasible(scenario: Scenario, grid: StorageGrid) -> bool:
    return len(grid) ** scenario.cp_count <= BRUTE_FORCE_GUARD


def resolve_method(scenario: Scenario, grid: StorageGrid, method: str | None) -> str:
    if method in (BRUTE_FORCE, MATCHING):
        return method
    return BRUTE_FORCE if exact_feasible(scenario, grid) else MATCHING


DESIGN_FIELDS = ["cp", "declared_type", "storage_bits", "price", "rate", "cost",
                 "utility", "mno_utility", "social_welfare"]


def design_rows(design) -> list[dict]:
    report = design.report
    rows = []
    for k, bundle in enumerate(design.bundles):
        rows.append({
            "cp": k,
            "declared_type": design.declared_types[k],
            "storage_bits": bundle.storage,
            "price": bundle.price,
            "rate": report.rates[k],
            "cost": report.costs[k],
            "utility": report.utilities[k],
            "mno_utility": report.mno_utility,
            "social_welfare": report.social_welfare,
        })
    return rows


MISREPORT_FIELDS = ["cp", "true_type", "declared_type", "utility", "backhaul_bits",
                    "price", "affordable", "truthful"]


def run_misreport_sweep(scenario: Scenario, output=None, grid: StorageGrid | None = None,
                        cap_factor: float = DEFAULT_CAP_FACTOR) -> list[dict]:
    """Utility and backhaul volume for every declaration each CP could make.

    Contracts are designed with the exact solver for each unilateral
    declaration while the others stay truthful. A declaration whose price
    exceeds the CP's cap (configured, or ``cap_factor`` times its truthful
    price) is unaffordable: the CP walks away, keeps no storage, pays
    nothing, and serves all its traffic over the backhaul.
    """
    if grid is None:
        grid = StorageGrid.from_scenario(scenario)
    solver = MechanismSolver(scenario, grid, BRUTE_FORCE)
    truth = tuple(float(t) for t in scenario.true_types)
    truthful_design = design_contracts(scenario, truth, solver=solver)
    if scenario.config.price_caps is not None:
        caps = np.asarray(scenario.config.price_caps, dtype=float)
    else:
        caps = cap_factor * truthful_design.report.prices

    rows = []
    vtypes = list(truth)
    for k in range(scenario.cp_count):
        for declared_own in scenario.type_grid:
            declared = list(truth)
            declared[k] = float(declared_own)
            design = design_contracts(scenario, tuple(declared), solver=solver)
            price = float(design.prices[k])
            affordable = price <= caps[k] + max(REL_TOL, REL_TOL * abs(caps[k]))
            if affordable:
                rho_eval, paid = design.rho, price
            else:
                rho_eval = design.rho.copy()
                rho_eval[k] = 0.0
                paid = 0.0
            rate = scenario.rates_for_rho(rho_eval, vtypes)[k]
            backhaul = scenario.backhaul_bits_for_rho(rho_eval, vtypes)[k]
            rows.append({
                "cp": k,
                "true_type": truth[k],
                "declared_type": float(declared_own),
                "utility": float(scenario.rate_scale * rate - paid),
                "backhaul_bits": float(backhaul),
                "price": paid,
                "affordable": affordable,
                "truthful": float(declared_own) == truth[k],
            })
    if output is not None:
        write_csv(output, MISREPORT_FIELDS, rows)
    return rows


BASELINE_FIELDS = ["cp", "type", "utility_mechanism", "utility_equal_split"]


def run_baseline_comparison(scenario: Scenario, output=None, grid: StorageGrid | None = None,
                            method: str | None = None) -> list[dict]:
    """Truthful mechanism utilities against an equal storage split.

    The equal-split baseline grants capacity / C to every CP and still
    charges the externality price, but with both terms evaluated at the
    fixed split (capacity / (C-1) for the remaining CPs when one is absent).
    """
    if grid is None:
        grid = StorageGrid.from_scenario(scenario)
    method = resolve_method(scenario, grid, method)
    truth = tuple(float(t) for t in scenario.true_types)
    design = design_contracts(scenario, truth, grid=grid, method=method)

    C = scenario.cp_count
    rho_eq = np.full(C, scenario.capacity / C)
    terms_eq = scenario.welfare_terms_for_rho(rho_eq, list(truth), None)
    rates_eq = scenario.rate_scale * scenario.rates_for_rho(rho_eq, list(truth))
    rows = []
    for k in range(C):
        others = [j for j in range(C) if j != k]
        if others:
            rho_without = np.full(C, scenario.capacity / len(others))
            rho_without[k] = 0.0
            a_term = float(
                scenario.welfare_terms_for_rho(rho_without, list(truth), others).sum()
            )
        else:
            a_term = 0.0
        b_term = float(terms_eq.sum() - terms_eq[k])
        price_eq = a_term - b_term
        rows.append({
            "cp": k,
            "type": truth[k],
            "utility_mechanism": float(design.report.utilities[k]),
            "utility_equal_split": float(rates_eq[k] - price_eq),
        })
    if output is not None:
        write_csv(output, BASELINE_FIELDS, rows)
    return rows


SCALING_FIELDS = ["cp_count", "alpha", "seed", "mean_utility", "method"]
SCALING_AGG_FIELDS = ["cp_count", "alpha", "mean_utility"]


def instantiate_template(template: ScenarioConfig, cp_count: int, alpha: float,
                         seed: int) -> ScenarioConfig:
    """Derive one scaling-study cell from a template config.

    True types and user counts are cycled out to the requested CP count; the
    template's type grid must not exceed the smallest CP count studied.
    """
    cycled_types = tuple(template.true_types[i % len(template.true_types)]
                         for i in range(cp_count))
    cycled_users = tuple(template.user_counts[i % len(template.user_counts)]
                         for i in range(cp_count))
    return template.with_overrides(
        cp_count=cp_count, zipf_alpha=float(alpha), seed=int(seed),
        true_types=cycled_types, user_counts=cycled_users, price_caps=None,
    )


def nested_scaling_scenarios(template: ScenarioConfig, cp_counts, alpha: float,
                             seed: int) -> dict[int, Scenario]:
    """Build one physical network per (alpha, seed) and nest the CP counts.

    The largest instance is materialized first; smaller instances keep the
    same base stations, channel gains, and incumbent users, and simply drop
    the trailing CPs. Adding a CP then means adding competition to an
    otherwise unchanged network.
    """
    counts = sorted(set(int(n) for n in cp_counts))
    full_config = instantiate_template(template, counts[-1], alpha, seed)
    full = build_scenario(full_config)
    out = {counts[-1]: full}
    for n in counts[:-1]:
        keep = int(sum(full_config.user_counts[:n]))
        overrides = {
            "channel_gain_sbs": full.topology.channel_gain_sbs[:, :keep].tolist(),
            "channel_gain_mbs_sbs": full.topology.channel_gain_mbs_sbs.tolist(),
            "channel_gain_cross_mbs": full.topology.channel_gain_cross_mbs.tolist(),
            "serving_sbs": full.serving[:keep].tolist(),
            "sbs_to_mbs": full.topology.sbs_to_mbs.tolist(),
        }
        config = instantiate_template(template, n, alpha, seed).with_overrides(
            channel_overrides=overrides)
        out[n] = build_scenario(config)
    return out


def run_scaling_study(template: ScenarioConfig, cp_counts, zipf_alphas, seeds,
                      output=None, grid_step: float | None = None,
                      method: str | None = None) -> tuple[list[dict], list[dict]]:
    """Mean truthful CP utility per (cp_count, alpha, seed) cell.

    CP counts are nested within each (alpha, seed) network. Each cell is
    solved exactly when the grid allows it, otherwise with the matching
    heuristic (flagged in the method column). Also returns the
    per-(cp_count, alpha) means over seeds.
    """
    rows = []
    for alpha, seed in itertools.product(zipf_alphas, seeds):
        scenarios = nested_scaling_scenarios(template, cp_counts, float(alpha), int(seed))
        for n, scenario in scenarios.items():
            grid = StorageGrid.from_scenario(scenario, grid_step)
            cell_method = resolve_method(scenario, grid, method)
            design = design_contracts(scenario, tuple(scenario.true_types),
                                      grid=grid, method=cell_method)
            rows.append({
                "cp_count": int(n),
                "alpha": float(alpha),
                "seed": int(seed),
                "mean_utility": float(design.report.utilities.mean()),
                "method": cell_method,
            })
    rows.sort(key=lambda r: (r["cp_count"], r["alpha"], r["seed"]))
    agg = []
    for (n, alpha), group in itertools.groupby(rows, key=lambda r: (r["cp_count"], r["alpha"])):
        values = [g["mean_utility"] for g in group]
        agg.append({"cp_count": n, "alpha": alpha,
                    "mean_utility": float(np.mean(values))})
    if output is not None:
        output = Path(output)
        write_csv(output, SCALING_FIELDS, rows)
        write_csv(output.with_name(output.stem + "_agg" + output.suffix),
                  SCALING_AGG_FIELDS, agg)
    return rows, agg


VERIFY_FIELDS = ["check", "cp", "passed", "margin", "note"]


def run_verify(scenario: Scenario, output=None, grid: StorageGrid | None = None,
               method: str | None = None) -> tuple[bool, list[dict]]:
    """Run the feasibility verifiers and emit a pass/fail report.

    Incentive compatibility is only asserted under the exact solver; with
    the matching heuristic the IC rows are skipped with a note.
    """
    if grid is None:
        grid = StorageGrid.from_scenario(scenario)
    method = resolve_method(scenario, grid, method)
    solver = MechanismSolver(scenario, grid, method)
    truth = tuple(float(t) for t in scenario.true_types)
    design = design_contracts(scenario, truth, solver=solver)

    rows = []
    ok = True
    ir = verify_ir(scenario, solver=solver)
    for k in range(scenario.cp_count):
        rows.append({"check": "ir", "cp": k, "passed": bool(ir.passed[k]),
                     "margin": float(ir.margins[k]), "note": ""})
        ok &= bool(ir.passed[k])

    if method == BRUTE_FORCE:
        for k in range(scenario.cp_count):
            ic = verify_ic(scenario, k, solver=solver)
            rows.append({"check": "ic", "cp": k, "passed": ic.passed,
                         "margin": float(-ic.worst_gain), "note": ""})
            ok &= ic.passed
    else:
        for k in range(scenario.cp_count):
            rows.append({"check": "ic", "cp": k, "passed": "",
                         "margin": "", "note": "heuristic allocation, IC not asserted"})

    total, mno, balanced = verify_budget_balance(scenario, design)
    rows.append({"check": "budget_balance", "cp": "", "passed": balanced,
                 "margin": total, "note": f"mno_utility={format_cell(mno)}"})
    ok &= balanced
    for k in range(scenario.cp_count):
        nonneg = design.report.prices[k] >= -REL_TOL * max(1.0, abs(design.report.prices[k]))
        rows.append({"check": "price_nonnegative", "cp": k, "passed": bool(nonneg),
                     "margin": float(design.report.prices[k]), "note": ""})
        ok &= bool(nonneg)

    if scenario.is_cp_symmetric():
        mono = verify_price_monotonicity(scenario, solver=solver)
        rows.append({"check": "price_monotonicity", "cp": "", "passed": mono,
                     "margin": "", "note": ""})
        ok &= mono
    else:
        rows.append({"check": "price_monotonicity", "cp": "", "passed": "",
                     "margin": "", "note": "skipped: scenario not CP-symmetric"})

    if output is not None:
        write_csv(output, VERIFY_FIELDS, rows)
    return ok, rows
