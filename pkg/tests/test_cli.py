"""Command-line round trips: simulate, report, verify, and error paths."""

import json
import shutil
import subprocess

import numpy as np
import pytest

from phfluid.cli import ENERGY_COLUMNS, load_state, main, read_energy_csv, save_state
from phfluid.simulator import WATCHDOG_REASON, SimConfig, simulate

BASE_CONFIG = {
    "grid": {"resolution": [16, 16]},
    "initial": {
        "velocity": "taylor_green",
        "velocity_amplitude": 0.3,
        "density": "trig",
        "density_amplitude": 0.1,
    },
    "dt": 1e-3,
    "steps": 12,
    "output_stride": 4,
    "seed": 5,
}


def write_config(path, payload):
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def finished_run(tmp_path):
    config_path = write_config(tmp_path / "run.json", BASE_CONFIG)
    out_dir = tmp_path / "out"
    assert main(["simulate", str(config_path), "--out", str(out_dir)]) == 0
    return out_dir


class TestSimulateCommand:
    def test_writes_manifest_energy_and_snapshots(self, finished_run):
        names = {p.name for p in finished_run.iterdir()}
        assert {"manifest.json", "energy.csv"} <= names
        assert {"state_0.json", "state_4.json", "state_8.json", "state_12.json"} <= names

    def test_manifest_records_run(self, finished_run):
        manifest = json.loads((finished_run / "manifest.json").read_text())
        assert manifest["status"] == "completed"
        assert manifest["completed_steps"] == 12
        assert manifest["aborted"] is False
        assert manifest["abort_reason"] is None
        assert manifest["outputs"]["energy"] == "energy.csv"
        assert manifest["outputs"]["snapshots"] == [
            "state_0.json",
            "state_4.json",
            "state_8.json",
            "state_12.json",
        ]
        assert manifest["started"] and manifest["finished"]
        assert SimConfig.from_dict(manifest["config"]) == SimConfig.from_dict(BASE_CONFIG)

    def test_energy_csv_columns_recompute(self, finished_run):
        series = read_energy_csv(finished_run / "energy.csv")
        assert series["step"].size == 13
        assert np.array_equal(series["step"], np.arange(13.0))
        recomputed = series["dH_dt"] - series["P_boundary"] - series["P_distributed"]
        assert np.array_equal(recomputed, series["residual"])

    def test_snapshots_roundtrip_bitwise(self, finished_run, tmp_path):
        path = finished_run / "state_12.json"
        step, t, state = load_state(path)
        assert step == 12 and t == 12 * 1e-3
        copy = tmp_path / "copy.json"
        save_state(copy, step, t, state, "velocity")
        assert copy.read_text() == path.read_text()
        rerun = simulate(SimConfig.from_dict(BASE_CONFIG)).snapshots[-1][1]
        for a, b in zip(state.velocity.components, rerun.velocity.components):
            assert np.array_equal(a, b)
        assert np.array_equal(state.mass.components[0], rerun.mass.components[0])

    def test_grid_errors_precede_output(self, tmp_path):
        bad = dict(BASE_CONFIG, grid={"resolution": [4, 4]})
        config_path = write_config(tmp_path / "bad.json", bad)
        out_dir = tmp_path / "out"
        assert main(["simulate", str(config_path), "--out", str(out_dir)]) == 2
        assert not out_dir.exists()


class TestReportCommand:
    def test_clean_run_passes(self, finished_run, capsys):
        assert main(["report", str(finished_run)]) == 0
        report = json.loads((finished_run / "report.json").read_text())
        assert report["passed"] is True
        assert report["reason"] is None
        assert report["aborted"] is False
        assert report["steps"] == 12
        assert set(report["checks"]) == {
            "balance_residual",
            "mass_drift",
            "not_aborted",
            "energy_drift",
        }
        assert all(report["checks"].values())
        assert "pass" in capsys.readouterr().out

    def test_series_csv_is_long_format(self, finished_run):
        main(["report", str(finished_run)])
        lines = (finished_run / "series.csv").read_text().splitlines()
        assert lines[0] == "step,t,series,value"
        rows = [line.split(",") for line in lines[1:]]
        assert len(rows) == 13 * len(ENERGY_COLUMNS[2:])
        assert {row[2] for row in rows} == set(ENERGY_COLUMNS[2:])

    def test_manifest_tolerances_override(self, finished_run):
        manifest_path = finished_run / "manifest.json"
        manifest = json.loads(manifest_path.read_text())
        manifest["tolerances"] = {"energy_drift_rel": 1e-30}
        manifest_path.write_text(json.dumps(manifest) + "\n")
        assert main(["report", str(finished_run)]) == 1
        report = json.loads((finished_run / "report.json").read_text())
        assert report["passed"] is False
        assert report["checks"]["energy_drift"] is False
        assert "energy_drift" in report["reason"]

    def test_forced_runs_skip_drift_check(self, tmp_path):
        forced = dict(
            BASE_CONFIG, force={"kind": "sine_x", "amplitude": 0.1}
        )
        config_path = write_config(tmp_path / "forced.json", forced)
        out_dir = tmp_path / "out"
        assert main(["simulate", str(config_path), "--out", str(out_dir)]) == 0
        assert main(["report", str(out_dir)]) == 0
        report = json.loads((out_dir / "report.json").read_text())
        assert "energy_drift" not in report["checks"]
        assert report["passed"] is True


class TestAbortedRun:
    @pytest.fixture
    def aborted_run(self, tmp_path, capsys):
        config = dict(BASE_CONFIG, steps=50, watchdog={"density_floor": 0.95})
        config_path = write_config(tmp_path / "doomed.json", config)
        out_dir = tmp_path / "out"
        code = main(["simulate", str(config_path), "--out", str(out_dir)])
        return code, out_dir, capsys.readouterr().err

    def test_simulate_signals_abort(self, aborted_run):
        code, out_dir, err = aborted_run
        assert code == 1
        assert WATCHDOG_REASON in err
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert manifest["status"] == "aborted"
        assert manifest["aborted"] is True
        assert manifest["abort_reason"] == WATCHDOG_REASON
        assert manifest["completed_steps"] == 0
        assert manifest["outputs"]["snapshots"] == ["state_0.json"]
        series = read_energy_csv(out_dir / "energy.csv")
        assert series["step"].size == 1

    def test_report_fails_with_reason(self, aborted_run):
        _, out_dir, _ = aborted_run
        assert main(["report", str(out_dir)]) == 1
        report = json.loads((out_dir / "report.json").read_text())
        assert report["passed"] is False
        assert report["aborted"] is True
        assert report["reason"] == WATCHDOG_REASON
        assert report["checks"]["not_aborted"] is False


class TestVerifyCommand:
    def test_periodic_ladder_passes(self, tmp_path, capsys):
        config_path = write_config(
            tmp_path / "verify.json",
            {"families": ["periodic"], "resolutions": [32, 48]},
        )
        out_dir = tmp_path / "out"
        assert main(["verify", str(config_path), "--out", str(out_dir)]) == 0
        assert "passed" in capsys.readouterr().out
        payload = json.loads((out_dir / "verify.json").read_text())
        assert payload["passed"] is True
        assert payload["resolutions"] == [32, 48]
        family = payload["families"][0]
        assert family["family"] == "periodic"
        assert len(family["identities"]) == 16
        for item in family["identities"]:
            assert set(item["defects"]) == {"32", "48"}
            assert item["passed"] is True

    def test_resolution_flag_overrides_config(self, tmp_path):
        config_path = write_config(
            tmp_path / "verify.json",
            {"families": ["periodic"], "resolutions": [32, 48]},
        )
        out_dir = tmp_path / "out"
        code = main(
            ["verify", str(config_path), "--resolutions", "24", "--out", str(out_dir)]
        )
        assert code == 0
        payload = json.loads((out_dir / "verify.json").read_text())
        assert payload["resolutions"] == [24]

    def test_coarse_bounded_ladder_fails(self, tmp_path, capsys):
        config_path = write_config(
            tmp_path / "verify.json",
            {"families": ["bounded"], "resolutions": [16, 24]},
        )
        out_dir = tmp_path / "out"
        assert main(["verify", str(config_path), "--out", str(out_dir)]) == 1
        assert "failures" in capsys.readouterr().err
        payload = json.loads((out_dir / "verify.json").read_text())
        assert payload["passed"] is False

    def test_rejects_bad_requests(self, tmp_path):
        out = str(tmp_path)
        assert main(["verify", "--resolutions", "4", "--out", out]) == 2
        config_path = write_config(
            tmp_path / "verify.json", {"families": ["moebius"]}
        )
        assert main(["verify", str(config_path), "--out", out]) == 2


class TestErrorPaths:
    def test_missing_config_file(self, tmp_path, capsys):
        code = main(["simulate", str(tmp_path / "nope.json"), "--out", str(tmp_path)])
        assert code == 2
        assert capsys.readouterr().err.startswith("configuration error:")

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        assert main(["simulate", str(path), "--out", str(tmp_path)]) == 2

    def test_unknown_config_key(self, tmp_path):
        path = write_config(tmp_path / "typo.json", dict(BASE_CONFIG, stepss=3))
        assert main(["simulate", str(path), "--out", str(tmp_path)]) == 2

    def test_report_needs_run_directory(self, tmp_path):
        assert main(["report", str(tmp_path)]) == 2


@pytest.mark.skipif(shutil.which("phfluid") is None, reason="script not on PATH")
def test_installed_script_reports_version():
    proc = subprocess.run(
        ["phfluid", "--version"], capture_output=True, text=True, timeout=60
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("phfluid ")
