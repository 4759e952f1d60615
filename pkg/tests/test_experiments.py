import json
from pathlib import Path

import numpy as np
import pytest

import cachecontracts.cli as cli
from cachecontracts.corpus import allocation_corpus, scaling_template, trend_corpus
from cachecontracts.experiments import (
    format_cell,
    run_baseline_comparison,
    run_misreport_sweep,
    run_scaling_study,
    run_verify,
    write_csv,
)
from cachecontracts.scenario import build_scenario

from conftest import small_config


@pytest.fixture(scope="module")
def trend_scenario():
    return build_scenario(trend_corpus(1)[0])


class TestCsvFormat:
    def test_twelve_significant_digits(self):
        assert format_cell(1.0 / 3.0) == "0.333333333333"
        assert format_cell(123456789.0) == "123456789"
        assert format_cell(True) == "1"
        assert format_cell(7) == "7"

    def test_header_and_rows(self, tmp_path):
        path = tmp_path / "t.csv"
        write_csv(path, ["a", "b"], [{"a": 1, "b": 0.5}])
        assert path.read_text(encoding="utf-8") == "a,b\n1,0.5\n"


class TestMisreportSweep:
    def test_rows_cover_grid(self, trend_scenario):
        rows = run_misreport_sweep(trend_scenario)
        grid = trend_scenario.type_grid
        assert len(rows) == trend_scenario.cp_count * len(grid)
        for k in range(trend_scenario.cp_count):
            truthful = [r for r in rows if r["cp"] == k and r["truthful"]]
            assert len(truthful) == 1

    def test_zero_type_backhaul_constant(self, trend_scenario):
        rows = run_misreport_sweep(trend_scenario)
        zero_cp = [k for k, t in enumerate(trend_scenario.true_types) if t == 0.0][0]
        volumes = {r["backhaul_bits"] for r in rows
                   if r["cp"] == zero_cp and r["affordable"]}
        assert volumes == {0.0}

    def test_high_type_understating_serves_more_backhaul(self, trend_scenario):
        rows = run_misreport_sweep(trend_scenario)
        top_cp = int(np.argmax(trend_scenario.true_types))
        sub = {r["declared_type"]: r for r in rows if r["cp"] == top_cp}
        lowest = sub[min(sub)]
        truthful = sub[trend_scenario.true_types[top_cp]]
        assert lowest["backhaul_bits"] >= truthful["backhaul_bits"]

    def test_configured_price_caps_gate_affordability(self):
        config = trend_corpus(1)[0].with_overrides(price_caps=(0.0, 0.0, 0.0))
        scenario = build_scenario(config)
        rows = run_misreport_sweep(scenario)
        # zero caps: anything with a positive designed price becomes an opt-out
        assert all(row["price"] <= 1e-9 for row in rows)
        default_rows = run_misreport_sweep(build_scenario(trend_corpus(1)[0]))
        assert any(r["affordable"] != d["affordable"]
                   for r, d in zip(rows, default_rows))

    def test_unaffordable_rows_are_opt_outs(self, trend_scenario):
        rows = run_misreport_sweep(trend_scenario)
        for row in rows:
            if not row["affordable"]:
                assert row["price"] == 0.0

    def test_utility_rederives_from_price(self, trend_scenario):
        rows = run_misreport_sweep(trend_scenario)
        truth = list(trend_scenario.true_types)
        for row in rows:
            if not row["affordable"]:
                continue
            declared = truth.copy()
            declared[row["cp"]] = row["declared_type"]
            from cachecontracts.mechanism import design_contracts
            design = design_contracts(trend_scenario, tuple(declared))
            rate = trend_scenario.rates_for_rho(design.rho, truth)[row["cp"]]
            expected = trend_scenario.rate_scale * rate - row["price"]
            assert row["utility"] == pytest.approx(expected, rel=1e-9, abs=1e-9)


class TestBaseline:
    def test_decoupled_equal_types_models_coincide(self):
        config, decoupled = allocation_corpus(2)[0]
        assert decoupled
        scenario = build_scenario(config)
        rows = run_baseline_comparison(scenario)
        for row in rows:
            assert row["utility_mechanism"] == pytest.approx(
                row["utility_equal_split"], rel=1e-9, abs=1e-9)

    def test_columns(self, trend_scenario, tmp_path):
        out = tmp_path / "baseline.csv"
        run_baseline_comparison(trend_scenario, out)
        header = out.read_text(encoding="utf-8").splitlines()[0]
        assert header == "cp,type,utility_mechanism,utility_equal_split"


class TestScaling:
    def test_cells_and_aggregate(self, tmp_path):
        out = tmp_path / "scaling.csv"
        rows, agg = run_scaling_study(scaling_template(), [2, 3], [0.2], [1, 2], output=out)
        assert len(rows) == 4
        assert len(agg) == 2
        assert out.exists()
        assert (tmp_path / "scaling_agg.csv").exists()

    def test_single_cell_per_alpha(self):
        rows, _ = run_scaling_study(scaling_template(), [2], [0.2, 2.0], [5])
        assert {r["alpha"] for r in rows} == {0.2, 2.0}

    def test_rows_sorted(self):
        rows, _ = run_scaling_study(scaling_template(), [3, 2], [2.0, 0.2], [2, 1])
        keys = [(r["cp_count"], r["alpha"], r["seed"]) for r in rows]
        assert keys == sorted(keys)


class TestVerifyDriver:
    def test_single_cp_all_pass(self, tmp_path):
        scenario = build_scenario(small_config(
            cp_count=1, type_grid=(6.0,), true_types=(6.0,), user_counts=(2,)))
        ok, rows = run_verify(scenario, tmp_path / "verify.csv")
        assert ok
        checks = {r["check"] for r in rows}
        assert {"ir", "ic", "budget_balance", "price_nonnegative",
                "price_monotonicity"} <= checks

    def test_heuristic_flags_ic(self, trend_scenario):
        ok, rows = run_verify(trend_scenario, method="matching")
        ic_rows = [r for r in rows if r["check"] == "ic"]
        assert all("IC not asserted" in r["note"] for r in ic_rows)
        assert all(r["passed"] == "" for r in ic_rows)

    def test_exact_asserts_ic(self, trend_scenario):
        ok, rows = run_verify(trend_scenario, method="brute_force")
        assert ok
        ic_rows = [r for r in rows if r["check"] == "ic"]
        assert all(r["passed"] is True for r in ic_rows)


class TestReproducibility:
    def test_sweep_byte_identical(self, tmp_path):
        config = trend_corpus(1)[0]
        paths = []
        for name in ("a", "b"):
            scenario = build_scenario(config)
            out = tmp_path / f"{name}.csv"
            run_misreport_sweep(scenario, out)
            paths.append(out)
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_scaling_byte_identical(self, tmp_path):
        blobs = []
        for name in ("a", "b"):
            out = tmp_path / f"{name}.csv"
            run_scaling_study(scaling_template(), [2, 3], [0.2, 2.0], [1, 2], output=out)
            blobs.append(out.read_bytes())
        assert blobs[0] == blobs[1]


def _write_config(tmp_path, config) -> Path:
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(config.to_dict()), encoding="utf-8")
    return path


class TestCli:
    def test_design_writes_csv(self, tmp_path, capsys):
        path = _write_config(tmp_path, trend_corpus(1)[0])
        code = cli.main(["design", str(path), "--out", str(tmp_path / "out"), "--exact"])
        assert code == 0
        assert (tmp_path / "out" / "design.csv").exists()
        assert "social_welfare=" in capsys.readouterr().out

    def test_verify_roundtrip(self, tmp_path, capsys):
        path = _write_config(tmp_path, trend_corpus(1)[0])
        code = cli.main(["verify", str(path), "--out", str(tmp_path / "out")])
        assert code == 0
        out = capsys.readouterr().out
        assert "ir" in out and (tmp_path / "out" / "verify.csv").exists()

    def test_sweep_and_baseline(self, tmp_path):
        path = _write_config(tmp_path, trend_corpus(1)[0])
        assert cli.main(["sweep-misreport", str(path), "--out", str(tmp_path / "o1")]) == 0
        assert cli.main(["baseline", str(path), "--out", str(tmp_path / "o2")]) == 0
        assert (tmp_path / "o1" / "misreport.csv").exists()
        assert (tmp_path / "o2" / "baseline.csv").exists()

    def test_scaling_with_seed_range(self, tmp_path):
        path = _write_config(tmp_path, scaling_template())
        code = cli.main(["scaling", str(path), "--out", str(tmp_path / "out"),
                         "--cps", "2,3", "--alphas", "0.2,2.0", "--seeds", "1..3"])
        assert code == 0
        lines = (tmp_path / "out" / "scaling.csv").read_text().splitlines()
        assert len(lines) == 1 + 2 * 2 * 3

    def test_bad_config_exit_one(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text('{"storage_capacity_bits": -1}', encoding="utf-8")
        assert cli.main(["design", str(path)]) == 1
        assert "error:" in capsys.readouterr().err

    def test_unparseable_json_exit_one(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{", encoding="utf-8")
        assert cli.main(["design", str(path)]) == 1
        err = capsys.readouterr().err
        assert "line" in err

    def test_feasibility_failure_exit_two(self, tmp_path, monkeypatch):
        path = _write_config(tmp_path, trend_corpus(1)[0])
        monkeypatch.setattr(cli, "run_verify", lambda *a, **k: (False, []))
        assert cli.main(["verify", str(path), "--out", str(tmp_path / "out")]) == 2

    def test_grid_step_override(self, tmp_path):
        path = _write_config(tmp_path, trend_corpus(1)[0])
        code = cli.main(["design", str(path), "--out", str(tmp_path / "out"),
                         "--grid-step", "4.0", "--exact"])
        assert code == 0
        rows = (tmp_path / "out" / "design.csv").read_text().splitlines()[1:]
        storages = {float(r.split(",")[2]) for r in rows}
        assert storages <= {0.0, 4.0, 8.0}

    def test_cli_byte_identical_runs(self, tmp_path):
        path = _write_config(tmp_path, trend_corpus(1)[0])
        blobs = []
        for name in ("r1", "r2"):
            out = tmp_path / name
            assert cli.main(["sweep-misreport", str(path), "--out", str(out)]) == 0
            blobs.append((out / "misreport.csv").read_bytes())
        assert blobs[0] == blobs[1]
