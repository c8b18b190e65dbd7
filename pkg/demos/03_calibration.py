"""Calibration end to end, in memory.

Runs the snapshot Monte Carlo for both bundled environments, builds the
coupling-gain and wideband-SINR empirical CDFs, and scores them against the
bundled reference percentile curves with the KS statistic. Equivalent to
`ranforge calibrate scenarios/urban_calibration.yaml --drops 50 -o out/`.
"""

from importlib import resources

import numpy as np

from ranforge import presets
from ranforge.calibration import calibration_report, load_reference_dir
from ranforge.engine import run_snapshot
from ranforge.scenario import parse_scenario

for environment in ("urban_embb", "rural_embb"):
    spec = parse_scenario(presets.calibration_yaml(environment))
    result = run_snapshot(spec, drops=50)
    print(f"\n== {environment}: {len(result)} samples retained from "
          f"{result.samples_generated} ({result.drops_run} drops)")

    cg = result.kpis["coupling_gain_db"]
    sinr = result.kpis["sinr_db"]
    pct = [5, 25, 50, 75, 95]
    print("   pct:", "  ".join(f"{p:>7d}" for p in pct))
    print("   cg :", "  ".join(f"{v:7.1f}" for v in np.percentile(cg, pct)))
    print("   sinr:", " ".join(f"{v:7.1f}" for v in np.percentile(sinr, pct)))

    root = resources.files("ranforge").joinpath("reference_data", environment)
    with resources.as_file(root) as p:
        references = load_reference_dir(p)
    report = calibration_report(
        {"coupling_gain": cg, "wideband_sinr": sinr},
        references, f"bundled/{environment}", environment=environment,
    )
    for entry in report.entries:
        verdict = "PASS" if entry["passed"] else "FAIL"
        print(f"   {verdict} ks[{entry['kpi']}] = {entry['ks_statistic']:.4f} "
              f"(threshold {entry['threshold']})")
