"""Canonical scenario files: calibration grids and a fault-injection demo.

The calibration scenarios place the standard 19-site (two-ring) hexagonal
grid with three sectors per site and the environment's calibrated user
settings. They are deliberately tiny YAML documents; `ranforge compile`
expands them by more than an order of magnitude.
"""

from __future__ import annotations

from pathlib import Path

from .params import environment_params
from .topology import hex_layout

CALIBRATION_SEED = 20260808
CALIBRATION_RINGS = 2


def _site_lines(rings: int, isd: float) -> list[str]:
    sites = hex_layout(rings, isd)
    return [
        f"- {{x: {float(s.position[0])!r}, y: {float(s.position[1])!r}, sectors: 3}}"
        for s in sites
    ]


def calibration_yaml(environment: str, seed: int = CALIBRATION_SEED) -> str:
    p = environment_params(environment)
    lines = [
        f"# {environment} calibration grid: 19 sites / 57 cells, ISD {p.isd_m:g} m",
        f"environment: {environment}",
        "simulation_time_s: 600.0",
        f"seed: {seed}",
        "sites:",
        *_site_lines(CALIBRATION_RINGS, p.isd_m),
        "x2: all-to-all",
        f"users: {{per_sector: {p.users_per_sector}, max_distance_m: {p.max_ue_distance_m!r}}}",
        "kpis: [coupling_gain, sinr]",
    ]
    return "\n".join(lines) + "\n"


def fault_demo_yaml(seed: int = 7, simulation_time_s: float = 300.0) -> str:
    """A small 3-site urban scenario exercising power and interference faults."""
    p = environment_params("urban_embb")
    lines = [
        "environment: urban_embb",
        f"simulation_time_s: {float(simulation_time_s)!r}",
        f"seed: {seed}",
        "sites:",
        *_site_lines(1, p.isd_m)[:3],
        "x2: all-to-all",
        "users: {per_sector: 5, max_distance_m: 50.0}",
        "kpis: [rsrp, rsrq, sinr, coupling_gain, serving_distance, position]",
        "faults:",
        "- {type: excessive_power_reduction, cell: 0, start_s: 60.0, end_s: 68.0, magnitude_db: 20.0}",
        "- {type: inter_cell_interference, cell: 4, start_s: 150.0, end_s: 158.0, magnitude_db: -90.0}",
    ]
    return "\n".join(lines) + "\n"


def ml_dataset_yaml(seed: int = 424242, simulation_time_s: float = 3600.0,
                    users_per_sector: int = 6) -> str:
    """Desk-scale anomaly-detection dataset: 19 sites, one hour, all fault kinds.

    Fault windows are spread across the timeline so that a contiguous
    5-fold time split leaves both classes in every fold, and sized to keep
    the labeled fraction well under the 2% budget.
    """
    p = environment_params("urban_embb")
    faults = []
    # one fault of each kind per fifth of the timeline, rotating targets;
    # the interference magnitude sits near the urban interference floor
    # (~-50 dBm at the UEs) so the injected term actually moves SINR, and
    # the too-late misconfiguration hits all three sectors of its site (a
    # site-wide parameter error) so the sag survives per-site aggregation
    kinds = [
        ("excessive_power_reduction", "magnitude_db: 20.0"),
        ("too_late_handover", "hysteresis_db: 9.0, ttt_s: 1.0"),
        ("inter_cell_interference", "magnitude_db: -50.0"),
    ]
    window = 60.0
    fold_len = simulation_time_s / 5.0
    cell = 0
    for fold in range(5):
        for j, (kind, extra) in enumerate(kinds):
            start = fold * fold_len + 60.0 + j * 200.0
            end = start + window
            target = cell % 57
            if kind == "too_late_handover":
                site_first = target - target % 3
                for c in range(site_first, site_first + 3):
                    faults.append(
                        f"- {{type: {kind}, cell: {c}, start_s: {start!r}, "
                        f"end_s: {end!r}, {extra}}}"
                    )
            else:
                faults.append(
                    f"- {{type: {kind}, cell: {target}, start_s: {start!r}, "
                    f"end_s: {end!r}, {extra}}}"
                )
            cell += 7
    lines = [
        "environment: urban_embb",
        f"simulation_time_s: {float(simulation_time_s)!r}",
        f"seed: {seed}",
        "sites:",
        *_site_lines(CALIBRATION_RINGS, p.isd_m),
        "x2: all-to-all",
        f"users: {{per_sector: {users_per_sector}, max_distance_m: 50.0}}",
        "kpis: [rsrp, rsrq, sinr, coupling_gain, serving_distance]",
        "faults:",
        *faults,
    ]
    return "\n".join(lines) + "\n"


def write_bundled_scenarios(directory) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in (
        ("urban_calibration.yaml", calibration_yaml("urban_embb")),
        ("rural_calibration.yaml", calibration_yaml("rural_embb")),
        ("urban_faults.yaml", fault_demo_yaml()),
        ("ml_dataset.yaml", ml_dataset_yaml()),
    ):
        path = directory / name
        path.write_text(text, encoding="utf-8")
        written.append(path)
    return written
