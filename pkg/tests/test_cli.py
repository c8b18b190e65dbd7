import json
from pathlib import Path

import pytest

from ranforge import presets
from ranforge.cli import main
from ranforge.manifest import manifests_equal_modulo_timestamps, sha256_file

SMALL_RUN_YAML = """environment: urban_embb
seed: 11
simulation_time_s: 20.0
sites:
- {x: 0.0, y: 0.0}
- {x: 200.0, y: 0.0}
users: {per_sector: 2, max_distance_m: 50.0}
"""


@pytest.fixture()
def scenario_file(tmp_path):
    path = tmp_path / "scenario.yaml"
    path.write_text(SMALL_RUN_YAML)
    return path


def test_unknown_subcommand_exit_1(capsys):
    assert main(["frobnicate"]) == 1
    assert "usage" in capsys.readouterr().err.lower()


def test_no_subcommand_exit_1(capsys):
    assert main([]) == 1


def test_missing_scenario_file_exit_3(tmp_path, capsys):
    assert main(["compile", str(tmp_path / "nope.yaml"), "-o", str(tmp_path / "out")]) == 3


def test_invalid_scenario_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("environment: urban_embb\nseed: 1\nsites:\n- {x: 0.0, y: 0.0, bogus: 2}\n")
    assert main(["compile", str(bad), "-o", str(tmp_path / "out")]) == 2
    assert "bogus" in capsys.readouterr().err


def test_compile_smoke(scenario_file, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["compile", str(scenario_file), "-o", str(out)]) == 0
    assert (out / "config.ini").exists()
    assert (out / "deployment.csv").exists()
    assert (out / "manifest.json").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    names = {f["name"] for f in manifest["files"]}
    assert names == {"config.ini", "deployment.csv"}
    for entry in manifest["files"]:
        assert sha256_file(out / entry["name"]) == entry["sha256"]


def test_compile_no_dump(scenario_file, tmp_path):
    out = tmp_path / "out"
    assert main(["compile", str(scenario_file), "-o", str(out), "--no-dump-deployment"]) == 0
    assert not (out / "deployment.csv").exists()


def test_compile_seed_override_changes_output(scenario_file, tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["compile", str(scenario_file), "-o", str(out_a), "--seed", "5"]) == 0
    assert main(["compile", str(scenario_file), "-o", str(out_b), "--seed", "6"]) == 0
    assert (out_a / "config.ini").read_text() != (out_b / "config.ini").read_text()


def test_calibrate_deterministic_manifests(tmp_path):
    scenario = tmp_path / "urban.yaml"
    scenario.write_text(presets.calibration_yaml("urban_embb"))
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["calibrate", str(scenario), "--drops", "3", "-o", str(out_a)]) == 0
    assert main(["calibrate", str(scenario), "--drops", "3", "-o", str(out_b)]) == 0
    assert manifests_equal_modulo_timestamps(out_a / "manifest.json", out_b / "manifest.json")
    report = json.loads((out_a / "report.json").read_text())
    assert {r["kpi"] for r in report["results"]} == {"coupling_gain", "wideband_sinr"}
    assert (out_a / "cdf_coupling_gain.csv").exists()
    assert (out_a / "cdf_wideband_sinr.csv").exists()


def test_calibrate_external_reference_dir(tmp_path):
    scenario = tmp_path / "urban.yaml"
    scenario.write_text(presets.calibration_yaml("urban_embb"))
    ref = tmp_path / "refs"
    ref.mkdir()
    for kpi in ("coupling_gain", "wideband_sinr"):
        src = Path("src/ranforge/reference_data/urban_embb") / f"{kpi}.csv"
        (ref / f"{kpi}.csv").write_text(src.read_text())
    out = tmp_path / "out"
    assert main(["calibrate", str(scenario), "--drops", "3", "-o", str(out),
                 "--reference", str(ref)]) == 0


def test_run_then_export_pipeline(scenario_file, tmp_path):
    run_dir = tmp_path / "run"
    data_dir = tmp_path / "data"
    assert main(["run", str(scenario_file), "-o", str(run_dir)]) == 0
    for name in ("bs_kpis.csv", "ue_kpis.csv", "adjacency.csv", "handovers.csv",
                 "run_meta.json", "manifest.json"):
        assert (run_dir / name).exists(), name
    assert main(["export", str(run_dir), "-o", str(data_dir)]) == 0
    assert (data_dir / "bs_kpis.csv").exists()
    assert (data_dir / "adjacency.csv").exists()
    # export's re-aggregation from the per-UE CSV reproduces the run's own
    # per-site file byte for byte
    assert (data_dir / "bs_kpis.csv").read_bytes() == (run_dir / "bs_kpis.csv").read_bytes()


def test_export_requires_run_dir(tmp_path):
    assert main(["export", str(tmp_path), "-o", str(tmp_path / "d")]) == 3


def test_subcommands_write_only_inside_out_dir(scenario_file, tmp_path, monkeypatch):
    out = tmp_path / "out"
    workdir = tmp_path / "cwd"
    workdir.mkdir()
    monkeypatch.chdir(workdir)
    before = set(workdir.rglob("*")) | set(scenario_file.parent.rglob("*"))
    assert main(["run", str(scenario_file), "-o", str(out)]) == 0
    after = (set(workdir.rglob("*")) | set(scenario_file.parent.rglob("*"))) - set(out.rglob("*")) - {out}
    assert before == after


def test_channel_table_stdout(capsys):
    assert main(["channel-table"]) == 0
    out = capsys.readouterr().out
    lines = out.splitlines()
    assert lines[0] == "environment,los,d2d_m,path_loss_db"
    assert len(lines) == 1 + 4 * 60


def test_channel_table_directory(tmp_path):
    out = tmp_path / "tbl"
    assert main(["channel-table", "-o", str(out)]) == 0
    assert (out / "channel_table.csv").exists()
    assert (out / "manifest.json").exists()


def test_bundled_scenarios_match_presets(tmp_path):
    regenerated = {
        "urban_calibration.yaml": presets.calibration_yaml("urban_embb"),
        "rural_calibration.yaml": presets.calibration_yaml("rural_embb"),
        "urban_faults.yaml": presets.fault_demo_yaml(),
        "ml_dataset.yaml": presets.ml_dataset_yaml(),
    }
    for name, text in regenerated.items():
        shipped = Path("scenarios") / name
        assert shipped.read_text() == text, f"{name} is stale; rerun presets.write_bundled_scenarios"
