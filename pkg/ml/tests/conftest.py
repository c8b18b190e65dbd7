import subprocess
from pathlib import Path

import numpy as np
import pytest

REPO_ROOT = Path(__file__).resolve().parents[2]


def generate_dataset(tmp_dir: Path, scenario_name: str) -> Path:
    """Produce a dataset through the simulator's public CLI only."""
    scenario = REPO_ROOT / "scenarios" / scenario_name
    run_dir = tmp_dir / "run"
    data_dir = tmp_dir / "dataset"
    for cmd in (
        ["ranforge", "run", str(scenario), "-o", str(run_dir)],
        ["ranforge", "export", str(run_dir), "-o", str(data_dir)],
    ):
        proc = subprocess.run(cmd, capture_output=True, text=True)
        assert proc.returncode == 0, f"{cmd}: {proc.stderr}"
    return data_dir


@pytest.fixture(scope="session")
def fault_demo_dataset(tmp_path_factory) -> Path:
    """Small 3-site dataset (300 s) for the fast unit tests."""
    return generate_dataset(tmp_path_factory.mktemp("demo"), "urban_faults.yaml")


def write_synthetic_dataset(directory: Path, n_nodes=6, n_bins=240, seed=0,
                            anomaly_sites=(1, 4), anomaly_bins=None) -> Path:
    """Hand-built bs_kpis.csv/adjacency.csv with visible anomalies.

    Anomalous bins drop RSRP by 15 dB and SINR by 8 dB below the baseline
    noise, giving a detectable but non-trivial signal.
    """
    rng = np.random.default_rng(seed)
    directory.mkdir(parents=True, exist_ok=True)
    if anomaly_bins is None:
        anomaly_bins = list(range(40, 44)) + list(range(120, 124)) + list(range(200, 204))
    header = ("time_s,bs_id,rsrp_dbm,rsrq_db,sinr_db,coupling_gain_db,"
              "serving_distance_m,is_anomalous,fault_kind")
    lines = [header]
    for b in range(n_bins):
        for node in range(n_nodes):
            anomalous = node in anomaly_sites and b in anomaly_bins
            rsrp = -95.0 + rng.normal(0, 1.5) - (15.0 if anomalous else 0.0)
            sinr = 10.0 + rng.normal(0, 1.5) - (8.0 if anomalous else 0.0)
            rsrq = -10.5 + rng.normal(0, 0.5)
            cg = -88.0 + rng.normal(0, 1.5)
            dist = 30.0 + rng.normal(0, 2.0)
            lines.append(
                f"{b},{node},{rsrp!r},{rsrq!r},{sinr!r},{cg!r},{dist!r},"
                f"{1 if anomalous else 0},{'excessive_power_reduction' if anomalous else ''}"
            )
    (directory / "bs_kpis.csv").write_text("\n".join(lines) + "\n")
    adjacency = ["bs_a,bs_b"] + [f"{i},{i + 1}" for i in range(n_nodes - 1)]
    (directory / "adjacency.csv").write_text("\n".join(adjacency) + "\n")
    return directory


@pytest.fixture(scope="session")
def synthetic_dataset(tmp_path_factory) -> Path:
    return write_synthetic_dataset(tmp_path_factory.mktemp("synth"))
