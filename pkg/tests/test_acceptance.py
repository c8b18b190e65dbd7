"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line. Run with `pytest tests/test_acceptance.py -v -s`.

Criteria:
  1. urban calibration: KS(coupling gain) <= 0.13, KS(wideband SINR) <= 0.28
     against the bundled reference percentile curves, 19 sites / 570 UEs /
     >= 50 drops at a fixed seed, finishing within 5 minutes;
  2. rural calibration: KS <= 0.18 / 0.32;
  3. reference-data-free formula suite (penetration values, height support,
     KS oracle cases, dual-implementation path loss within 1e-6 dB);
  4. automation compression (compact YAML -> >= 1000 emitted lines,
     byte-deterministic);
  5. fault observability (exact power shift, strictly lower SINR under
     interference, strictly later handover when too-late, labels <= 2%);
  6. determinism (full pipeline byte-identical across executions and
     across --jobs 1 vs --jobs 8).
"""

import dataclasses
import time
from pathlib import Path

import numpy as np
import pytest

import oracles
from ranforge import calibration, presets
from ranforge.calibration import empirical_cdf, ks_statistic
from ranforge.channel import path_loss, penetration_loss, LinkGeometry
from ranforge.cli import main
from ranforge.engine import run_snapshot, run_timeline, step
from ranforge.scenario import FaultKind, FaultSpec, parse_scenario
from ranforge.topology import ue_height

from test_engine import crossing_state

CALIBRATION_DROPS = 50
URBAN_THRESHOLDS = {"coupling_gain": 0.13, "wideband_sinr": 0.28}
RURAL_THRESHOLDS = {"coupling_gain": 0.18, "wideband_sinr": 0.32}


def report(name: str, ok: bool, detail: str = ""):
    print(f"\nACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, f"{name} failed: {detail}"


def _calibrate(environment, thresholds):
    spec = parse_scenario(presets.calibration_yaml(environment))
    assert len(spec.sites) == 19 and spec.total_cells == 57
    started = time.monotonic()
    result = run_snapshot(spec, drops=CALIBRATION_DROPS)
    elapsed = time.monotonic() - started
    assert result.samples_generated == CALIBRATION_DROPS * 570

    from importlib import resources
    root = resources.files("ranforge").joinpath("reference_data", environment)
    with resources.as_file(root) as p:
        references = calibration.load_reference_dir(p)
    run_samples = {
        "coupling_gain": result.kpis["coupling_gain_db"],
        "wideband_sinr": result.kpis["sinr_db"],
    }
    scores = {
        kpi: ks_statistic(empirical_cdf(run_samples[kpi]), references[kpi])
        for kpi in thresholds
    }
    return scores, elapsed


def test_criterion_1_calibration_urban():
    scores, elapsed = _calibrate("urban_embb", URBAN_THRESHOLDS)
    ok = all(scores[k] <= t for k, t in URBAN_THRESHOLDS.items()) and elapsed <= 300.0
    report(
        "calibration-urban", ok,
        f"(ks coupling_gain {scores['coupling_gain']:.4f} <= 0.13, "
        f"ks wideband_sinr {scores['wideband_sinr']:.4f} <= 0.28, {elapsed:.1f}s)",
    )


def test_criterion_2_calibration_rural():
    scores, elapsed = _calibrate("rural_embb", RURAL_THRESHOLDS)
    ok = all(scores[k] <= t for k, t in RURAL_THRESHOLDS.items()) and elapsed <= 300.0
    report(
        "calibration-rural", ok,
        f"(ks coupling_gain {scores['coupling_gain']:.4f} <= 0.18, "
        f"ks wideband_sinr {scores['wideband_sinr']:.4f} <= 0.32, {elapsed:.1f}s)",
    )


def test_criterion_3_formula_suite():
    # penetration losses at 4 GHz
    low = penetration_loss("low", 4.0)
    high = penetration_loss("high", 4.0)
    assert low == pytest.approx(12.88, abs=0.01)
    assert high == pytest.approx(27.97, abs=0.01)

    # indoor height support is exactly {1.5, 4.5, ..., 22.5}
    rng = np.random.default_rng(123)
    draws = {ue_height(rng) for _ in range(20_000)}
    assert draws == {1.5 + 3.0 * k for k in range(8)}

    # KS oracle cases, exact
    assert ks_statistic(empirical_cdf([1, 2, 3, 4]), empirical_cdf([2, 3, 4, 5])) == 0.25
    assert ks_statistic(empirical_cdf([1, 2, 3]), empirical_cdf([1, 2, 3])) == 0.0
    assert ks_statistic(empirical_cdf([1, 2]), empirical_cdf([10, 20])) == 1.0

    # dual-implementation path loss oracle on 1000 random geometries
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(1000):
        env = "uma" if rng.random() < 0.5 else "rma"
        h_bs = 25.0 if env == "uma" else 35.0
        h_ut = float(rng.uniform(1.5, 22.5))
        d2d = float(rng.uniform(10.0, 5000.0))
        fc = float(rng.uniform(0.7, 7.0))
        los = bool(rng.random() < 0.5)
        geom = LinkGeometry(d2d=d2d, d3d=float(np.hypot(d2d, h_bs - h_ut)),
                            bs_height=h_bs, ue_height=h_ut)
        mine = path_loss(env, los, geom, fc, building_height=10.0)
        if env == "uma":
            ref = oracles.uma_path_loss(d2d, geom.d3d, h_bs, h_ut, fc, los)
        else:
            ref = oracles.rma_path_loss(d2d, geom.d3d, h_bs, h_ut, fc, los, 10.0, 20.0)
        worst = max(worst, abs(mine - ref))
    assert worst < 1e-6
    report("formula-suite", True,
           f"(pen {low:.2f}/{high:.2f} dB, ks cases exact, pl oracle max {worst:.2e} dB)")


def test_criterion_4_automation_compression(tmp_path):
    yaml_text = presets.calibration_yaml("urban_embb")
    yaml_lines = len(yaml_text.splitlines())

    scenario = tmp_path / "urban.yaml"
    scenario.write_text(yaml_text)
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["compile", str(scenario), "-o", str(out_a)]) == 0
    assert main(["compile", str(scenario), "-o", str(out_b)]) == 0
    emitted = (out_a / "config.ini").read_text()
    emitted_lines = len(emitted.splitlines())

    deterministic = (out_a / "config.ini").read_bytes() == (out_b / "config.ini").read_bytes()
    ok = yaml_lines <= 150 and emitted_lines >= 1000 and deterministic
    report("automation-compression", ok,
           f"(yaml {yaml_lines} lines <= 150, emitted {emitted_lines} lines >= 1000, "
           f"byte-identical {deterministic})")


def _label_fraction(bs_csv: Path) -> float:
    lines = bs_csv.read_text().splitlines()[1:]
    if not lines:
        return 0.0
    anomalous = sum(1 for l in lines if l.split(",")[-2] == "1")
    return anomalous / len(lines)


def test_criterion_5_fault_observability(tmp_path):
    details = []

    # power fault: paired run, exact shift on the affected cell
    power_yaml = (
        "environment: urban_embb\nseed: 13\nsimulation_time_s: 600.0\n"
        "sites:\n- {x: 0.0, y: 0.0, sectors: 1, azimuths: [0.0]}\n"
        "users: {per_sector: 3, max_distance_m: 50.0}\n"
        "faults:\n- {type: excessive_power_reduction, cell: 0, start_s: 100.0, end_s: 110.0, magnitude_db: 20.0}\n"
    )
    faulty_spec = parse_scenario(power_yaml)
    base_spec = dataclasses.replace(faulty_spec, faults=())
    faulty = run_timeline(faulty_spec)
    base = run_timeline(base_spec)
    in_window = slice(100, 110)
    delta = (faulty.ue_series.values["rsrp_dbm"][:, in_window]
             - base.ue_series.values["rsrp_dbm"][:, in_window])
    power_ok = np.allclose(delta, -20.0, atol=1e-9)
    outside = np.delete(
        faulty.ue_series.values["rsrp_dbm"] - base.ue_series.values["rsrp_dbm"],
        range(100, 110), axis=1,
    )
    power_ok &= np.allclose(outside, 0.0, atol=1e-9)
    details.append(f"power shift exact -20 dB: {power_ok}")

    # the faulty run exports with labels within budget
    scenario_path = tmp_path / "power.yaml"
    scenario_path.write_text(power_yaml)
    run_dir = tmp_path / "power_run"
    assert main(["run", str(scenario_path), "-o", str(run_dir)]) == 0
    fraction = _label_fraction(run_dir / "bs_kpis.csv")
    budget_ok = 0.0 < fraction <= 0.02
    details.append(f"labeled fraction {fraction:.4f} <= 0.02: {budget_ok}")

    # interference fault: affected UEs' mean SINR strictly lower in-window
    interf_fault = FaultSpec(kind=FaultKind.INTER_CELL_INTERFERENCE, target_cell=0,
                             start_s=100.0, end_s=110.0, interference_power_dbm=-90.0)
    int_spec = dataclasses.replace(faulty_spec, faults=(interf_fault,))
    int_run = run_timeline(int_spec)
    mean_faulty = np.nanmean(int_run.ue_series.values["sinr_db"][:, in_window])
    mean_base = np.nanmean(base.ue_series.values["sinr_db"][:, in_window])
    interference_ok = mean_faulty < mean_base
    details.append(f"interference mean sinr {mean_faulty:.2f} < {mean_base:.2f}: {interference_ok}")

    # too-late handover: scripted crossing, strictly later first handover,
    # lower mean SINR while lingering on the weak cell
    tl_fault = FaultSpec(kind=FaultKind.TOO_LATE_HANDOVER, target_cell=0,
                         start_s=0.0, end_s=60.0, hysteresis_db=9.0, ttt_s=1.0)
    base_state = crossing_state(seed=21)
    fault_state = crossing_state(seed=21, faults=(tl_fault,))
    base_sinr, fault_sinr = [], []
    for _ in range(600):
        step(base_state, 0.1)
        step(fault_state, 0.1)
        base_sinr.append(base_state.sample()["sinr_db"][0])
        fault_sinr.append(fault_state.sample()["sinr_db"][0])
    t_base = base_state.handovers[0].time_s
    t_fault = fault_state.handovers[0].time_s
    lo, hi = int(round(t_base / 0.1)), int(round(t_fault / 0.1))
    late_ok = (t_fault > t_base) and (np.mean(fault_sinr[lo:hi]) < np.mean(base_sinr[lo:hi]))
    details.append(
        f"too-late first handover {t_fault:.1f}s > {t_base:.1f}s and degraded pre-handover sinr: {late_ok}"
    )

    ok = power_ok and budget_ok and interference_ok and late_ok
    report("fault-observability", ok, "(" + "; ".join(details) + ")")


def test_criterion_6_determinism(tmp_path):
    scenario = tmp_path / "faults.yaml"
    scenario.write_text(presets.fault_demo_yaml())

    # compile -> run -> export, twice end to end
    digests = []
    for tag in ("first", "second"):
        compile_dir = tmp_path / f"compile_{tag}"
        run_dir = tmp_path / f"run_{tag}"
        data_dir = tmp_path / f"data_{tag}"
        assert main(["compile", str(scenario), "-o", str(compile_dir)]) == 0
        assert main(["run", str(scenario), "-o", str(run_dir), "--jobs",
                     "1" if tag == "first" else "8"]) == 0
        assert main(["export", str(run_dir), "-o", str(data_dir)]) == 0
        digests.append({
            name: (data_dir / name).read_bytes()
            for name in ("bs_kpis.csv", "ue_kpis.csv", "adjacency.csv")
        } | {"config.ini": (compile_dir / "config.ini").read_bytes()})
    pipeline_ok = digests[0] == digests[1]

    # calibrate with a worker pool vs sequentially
    cal = tmp_path / "urban.yaml"
    cal.write_text(presets.calibration_yaml("urban_embb"))
    outputs = []
    for jobs in ("1", "8"):
        out = tmp_path / f"cal_{jobs}"
        assert main(["calibrate", str(cal), "--drops", "16", "-o", str(out),
                     "--jobs", jobs]) == 0
        outputs.append({
            name: (out / name).read_bytes()
            for name in ("report.json", "cdf_coupling_gain.csv", "cdf_wideband_sinr.csv")
        })
    jobs_ok = outputs[0] == outputs[1]

    report("determinism", pipeline_ok and jobs_ok,
           f"(pipeline byte-identical {pipeline_ok}, jobs 1 vs 8 identical {jobs_ok})")
