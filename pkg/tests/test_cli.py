"""Command-line interface: argument handling, output, exit codes.

Most tests drive ``main(argv)`` in-process and read captured stdout;
one test runs the installed console script to cover packaging.  The
shipped demo configs are exercised at a truncated horizon so they stay
valid as the library evolves.
"""

import json
import shutil
import subprocess
from pathlib import Path

import pytest

from tiksplit import cli
from tiksplit.config import ConfigError
from tiksplit.moduli import AffineFn, IdentityFn, TableFn

DEMO_CONFIGS = sorted((Path(__file__).parent.parent / "demos" / "configs").glob("*.json"))


def write_cfg(tmp_path, payload, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(payload))
    return str(p)


def run_cfg_payload():
    return {
        "name": "cli-unit",
        "scheme": "tkm",
        "n_max": 400,
        "k_max": 1,
        "instance": "sqrt",
        "problem": {"T": {"kind": "hyperplane",
                          "a": [1.0, 0, 0, 0, 0], "c": 1.0}},
        "x0": {"kind": "near", "center": [1.0, 0, 0, 0, 0],
               "radius": 0.9, "seed": 7},
        "fixed_point": [1.0, 0, 0, 0, 0],
        "target": [1.0, 0, 0, 0, 0],
        "checks": ["boundedness", "strong_convergence"],
    }


def rates_table(out: str) -> dict:
    table = {}
    for line in out.strip().splitlines():
        parts = line.split()
        table[parts[0]] = parts[-1]
    return table


class TestParseFspec:
    def test_identity(self):
        assert isinstance(cli.parse_fspec(" identity "), IdentityFn)

    def test_affine(self):
        fn = cli.parse_fspec("affine:2,10")
        assert isinstance(fn, AffineFn)
        assert fn(5) == 20

    def test_table(self):
        fn = cli.parse_fspec("table:0,4,9")
        assert isinstance(fn, TableFn)
        assert fn(1) == 4 and fn(50) == 9

    @pytest.mark.parametrize("bad", ["affine:1", "poly:1,2", "table:", "affine:x,y"])
    def test_rejects_malformed(self, bad):
        with pytest.raises(ConfigError, match="f-spec"):
            cli.parse_fspec(bad)


class TestRates:
    def test_stock_thresholds(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, {"instance": "sqrt"})
        assert cli.main(["rates", cfg]) == 0
        table = rates_table(capsys.readouterr().out)
        assert table["G"] == "16"
        assert table["nu1"] == "5626"
        assert table["nu2"] == "84974"
        assert table["dr_gap_threshold"] == "6739217"

    def test_k_selects_row(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, {"instance": "sqrt"})
        assert cli.main(["rates", cfg, "--k", "1"]) == 0
        table = rates_table(capsys.readouterr().out)
        assert table["nu1"] == "84974"
        assert table["nu2"] == "1336337"
        assert table["dr_gap_threshold"] == "107588758"

    def test_f_adds_metastability_rows(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, {"instance": "sqrt"})
        assert cli.main(["rates", cfg, "--f", "affine:2,10"]) == 0
        table = rates_table(capsys.readouterr().out)
        for name in ("mu", "mu2", "mu3", "mu4", "mu5"):
            assert table[name].startswith("SATURATED")

    def test_explicit_moduli_block(self, tmp_path, capsys, sqrt_inst):
        cfg = write_cfg(tmp_path, {"moduli": sqrt_inst.moduli.to_config()})
        assert cli.main(["rates", cfg]) == 0
        assert rates_table(capsys.readouterr().out)["nu1"] == "5626"

    def test_bad_fspec_exits_two(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, {"instance": "sqrt"})
        assert cli.main(["rates", cfg, "--f", "spline:1"]) == 2
        assert "f-spec" in capsys.readouterr().err

    def test_config_without_witnesses_exits_two(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, {"name": "empty"})
        assert cli.main(["rates", cfg]) == 2
        assert "needs 'moduli' or 'instance'" in capsys.readouterr().err


class TestRun:
    def test_passing_run(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, run_cfg_payload())
        out = tmp_path / "out"
        assert cli.main(["run", cfg, "--out", str(out)]) == 0
        text = capsys.readouterr().out
        assert "[        PASS] boundedness" in text
        assert "wrote" in text
        assert (out / "trajectory.csv").is_file()
        assert (out / "report.json").is_file()

    def test_failing_check_exits_one(self, tmp_path, capsys):
        payload = run_cfg_payload()
        payload["x0"]["radius"] = 2.5  # outside the certified ball
        cfg = write_cfg(tmp_path, payload)
        assert cli.main(["run", cfg, "--out", str(tmp_path / "out")]) == 1
        text = capsys.readouterr().out
        assert "[        FAIL] boundedness" in text
        assert "first violation:" in text

    def test_seed_override_changes_start(self, tmp_path):
        payload = run_cfg_payload()
        payload["x0"] = {"kind": "seeded", "dim": 5, "scale": 0.2}
        payload["checks"] = []
        cfg = write_cfg(tmp_path, payload)
        a, b = tmp_path / "a", tmp_path / "b"
        assert cli.main(["run", cfg, "--out", str(a), "--seed", "1"]) == 0
        assert cli.main(["run", cfg, "--out", str(b), "--seed", "2"]) == 0
        ra = json.loads((a / "report.json").read_text())
        rb = json.loads((b / "report.json").read_text())
        assert ra["experiment"]["seed"] == 1 and rb["experiment"]["seed"] == 2
        assert (a / "trajectory.csv").read_bytes() != (b / "trajectory.csv").read_bytes()

    def test_thin_flag(self, tmp_path):
        cfg = write_cfg(tmp_path, run_cfg_payload())
        out = tmp_path / "out"
        assert cli.main(["run", cfg, "--out", str(out), "--thin", "100"]) == 0
        rows = (out / "trajectory.csv").read_text().strip().splitlines()
        assert len(rows) == 1 + 5  # header + 0,100,200,300,400

    def test_missing_config_exits_two(self, tmp_path, capsys):
        assert cli.main(["run", str(tmp_path / "nope.json")]) == 2
        assert "not found" in capsys.readouterr().err

    def test_invalid_json_exits_two(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text("{oops")
        assert cli.main(["run", str(p)]) == 2
        assert "not valid JSON" in capsys.readouterr().err


class TestValidate:
    def test_stock_passes(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, {"instance": "harmonic"})
        assert cli.main(["validate", cfg, "--horizon", "2000", "--k-max", "3"]) == 0
        out = capsys.readouterr().out
        for q in ("Q1", "Q2", "Q3", "Q4", "Q5", "Q6"):
            assert q in out
        assert "FAIL" not in out

    def test_broken_witness_exits_one(self, tmp_path, capsys, sqrt_inst):
        desc = sqrt_inst.moduli.to_config()
        desc["b"] = {"kind": "const", "value": 0}
        cfg = write_cfg(tmp_path, {"instance": "sqrt", "moduli": desc})
        assert cli.main(["validate", cfg, "--horizon", "2000", "--k-max", "3"]) == 1
        assert "FAIL" in capsys.readouterr().out


class TestArgparseBehavior:
    def test_no_subcommand(self):
        with pytest.raises(SystemExit) as e:
            cli.main([])
        assert e.value.code == 2

    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit) as e:
            cli.main(["frobnicate"])
        assert e.value.code == 2


class TestConsoleScript:
    def test_installed_entry_point(self, tmp_path):
        exe = shutil.which("tiksplit")
        assert exe, "console script should be installed"
        cfg = write_cfg(tmp_path, {"instance": "sqrt"})
        proc = subprocess.run(
            [exe, "rates", cfg], capture_output=True, text=True, timeout=120
        )
        assert proc.returncode == 0
        assert rates_table(proc.stdout)["nu1"] == "5626"


class TestShippedConfigs:
    @pytest.mark.parametrize("path", DEMO_CONFIGS, ids=lambda p: p.stem)
    def test_demo_config_runs(self, path, tmp_path):
        # truncated horizon: structure and checks must still be coherent
        cfg = json.loads(path.read_text())
        cfg["n_max"] = 500
        from tiksplit.config import run_experiment

        report = run_experiment(cfg, tmp_path)
        assert report["status"] == "pass"
