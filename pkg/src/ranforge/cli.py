"""Command-line entry point.

Subcommands::

    ranforge compile   <scenario.yaml> -o DIR [--dump-deployment] [--seed S]
    ranforge calibrate <scenario.yaml> -o DIR [--drops N] [--seed S]
                       [--reference DIR] [--jobs N] [--save-samples]
    ranforge run       <scenario.yaml> -o DIR [--seed S] [--jobs N]
    ranforge export    <run-dir> -o DIR
    ranforge channel-table [-o DIR]

Exit codes: 0 success, 1 usage, 2 scenario validation, 3 runtime failure.
Every subcommand with an output directory leaves a manifest.json there. A
seed must come from the scenario file or --seed; there is no wall-clock
default, so every result stays reproducible and citable.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import calibration, channel, dataset, engine, manifest, scenario, topology
from .errors import (
    ConfigError,
    DomainError,
    IoError,
    MissingReference,
    RanforgeError,
    SchemaError,
    ValidationError,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="ranforge", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command")

    def add_common(p, scenario_arg=True):
        if scenario_arg:
            p.add_argument("scenario", help="scenario YAML file")
            p.add_argument("--seed", type=int, default=None,
                           help="override the scenario file's seed")
        p.add_argument("-o", "--out", required=True, help="output directory")
        p.add_argument("--jobs", type=int, default=1,
                       help="worker processes for drop parallelism")

    p = sub.add_parser("compile", help="parse a scenario and emit the long-form configuration")
    add_common(p)
    p.add_argument("--dump-deployment", action=argparse.BooleanOptionalAction, default=True,
                   help="also write the deployment entity dump CSV")

    p = sub.add_parser("calibrate", help="snapshot Monte Carlo calibration run + KS report")
    add_common(p)
    p.add_argument("--drops", type=int, default=50, help="independent UE drops")
    p.add_argument("--reference", default=None,
                   help="directory of reference percentile CSVs (default: bundled curves "
                        "for the scenario's environment)")
    p.add_argument("--save-samples", action="store_true",
                   help="also write the retained per-UE samples CSV")

    p = sub.add_parser("run", help="time-stepped simulation with mobility, handover, faults")
    add_common(p)
    p.add_argument("--tick", type=float, default=engine.DEFAULT_TICK_S,
                   help="tick length in seconds")

    p = sub.add_parser("export", help="aggregate a run directory into dataset CSVs")
    p.add_argument("run_dir", help="directory produced by `ranforge run`")
    p.add_argument("-o", "--out", required=True, help="dataset output directory")

    p = sub.add_parser("channel-table", help="path loss vs distance CSV for documentation")
    p.add_argument("-o", "--out", default=None, help="output directory (default: stdout)")

    return parser


def _load_spec(args) -> tuple[scenario.ScenarioSpec, str]:
    path = Path(args.scenario)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read scenario {path}: {exc}") from exc
    spec = scenario.parse_scenario(text, seed_override=args.seed)
    return spec, text


def _cmd_compile(args) -> int:
    started = manifest.now_utc()
    spec, text = _load_spec(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    deployment = topology.build_deployment(
        spec, engine.seeded_rng(spec.seed, engine.SALT_DEPLOY)
    )
    plan = scenario.expand_x2(spec)
    config_text = scenario.emit_config(spec, plan, deployment)
    scenario.write_config(config_text, out / "config.ini")
    if args.dump_deployment:
        (out / "deployment.csv").write_text(topology.deployment_csv(deployment), encoding="utf-8")
    manifest.write_manifest(
        out, command="compile", scenario_sha256=manifest.sha256_text(text),
        seed=spec.seed, started_utc=started,
    )
    print(f"compiled {args.scenario}: {config_text.count(chr(10)) + 1} config lines, "
          f"{len(deployment.ues)} UEs, {len(deployment.cells)} cells -> {out}")
    return EXIT_OK


def _bundled_reference_dir(environment: str):
    return resources.files("ranforge").joinpath("reference_data", environment)


def _cmd_calibrate(args) -> int:
    started = manifest.now_utc()
    spec, text = _load_spec(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    result = engine.run_snapshot(spec, drops=args.drops, jobs=args.jobs)
    run_samples = {
        "coupling_gain": result.kpis["coupling_gain_db"],
        "wideband_sinr": result.kpis["sinr_db"],
    }

    if args.reference is not None:
        ref_dir = Path(args.reference)
        ref_name = ref_dir.name
        references = calibration.load_reference_dir(ref_dir)
    else:
        ref_root = _bundled_reference_dir(spec.environment)
        ref_name = f"bundled/{spec.environment}"
        with resources.as_file(ref_root) as concrete:
            references = calibration.load_reference_dir(concrete)

    report = calibration.calibration_report(
        run_samples, references, ref_name, environment=spec.environment
    )
    (out / "report.json").write_text(report.to_json(), encoding="utf-8")
    for kpi_name in report.overlays:
        (out / f"cdf_{kpi_name}.csv").write_text(
            calibration.overlay_csv(report, kpi_name), encoding="utf-8"
        )
    if args.save_samples:
        with open(out / "samples.csv", "w", newline="\n") as fh:
            writer = csv.writer(fh)
            writer.writerow(["drop", "ue_id", "serving_cell", "coupling_gain_db", "sinr_db"])
            for row in zip(result.drop, result.ue_id, result.serving_cell,
                           result.kpis["coupling_gain_db"], result.kpis["sinr_db"]):
                writer.writerow([row[0], row[1], row[2], repr(float(row[3])), repr(float(row[4]))])
    manifest.write_manifest(
        out, command="calibrate", scenario_sha256=manifest.sha256_text(text),
        seed=spec.seed, started_utc=started,
    )
    for e in report.entries:
        status = "PASS" if e["passed"] else "FAIL"
        print(f"{status} ks[{e['kpi']}] = {e['ks_statistic']:.4f} "
              f"(threshold {e['threshold']}, reference {e['reference']}, n={e['samples']})")
    return EXIT_OK if report.passed else EXIT_RUNTIME


def _cmd_run(args) -> int:
    started = manifest.now_utc()
    spec, text = _load_spec(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    result = engine.run_timeline(spec, dt=args.tick)

    cell_site = np.array([spec.cell_site(c) for c in range(spec.total_cells)], dtype=int)
    deployment = topology.build_deployment(
        spec, engine.seeded_rng(spec.seed, engine.SALT_DEPLOY)
    )
    site_pairs = topology.adjacency_pairs(deployment.sites)
    files = dataset.export(
        result.ue_series, result.labels, spec, cell_site, site_pairs, out
    )

    with open(out / "handovers.csv", "w", newline="\n") as fh:
        fh.write("time_s,ue_id,from_cell,to_cell,trigger\n")
        for ev in result.handovers:
            fh.write(f"{ev.time_s!r},{ev.ue_id},{ev.from_cell},{ev.to_cell},{ev.trigger}\n")

    meta = {
        "environment": spec.environment,
        "simulation_time_s": spec.simulation_time_s,
        "seed": spec.seed,
        "tick_s": args.tick,
        "kpis": sorted(spec.kpis),
        "handovers": len(result.handovers),
        "refused_handovers": result.refused_handovers,
        "scenario_yaml": scenario.scenario_to_yaml(spec),
    }
    (out / "run_meta.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    manifest.write_manifest(
        out, command="run", scenario_sha256=manifest.sha256_text(text),
        seed=spec.seed, started_utc=started,
    )
    print(f"ran {spec.simulation_time_s} s x {result.ue_series.n_ue} UEs: "
          f"{len(result.handovers)} handovers, {len(result.labels)} anomalous site-bins -> {out}")
    return EXIT_OK


def _cmd_export(args) -> int:
    started = manifest.now_utc()
    run_dir = Path(args.run_dir)
    meta_path = run_dir / "run_meta.json"
    if not meta_path.exists():
        raise IoError(f"{run_dir} is not a run directory (missing run_meta.json)")
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    spec = scenario.parse_scenario(meta["scenario_yaml"])
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    cell_site = np.array([spec.cell_site(c) for c in range(spec.total_cells)], dtype=int)
    bs = dataset.reaggregate_ue_csv(run_dir / "ue_kpis.csv", spec, cell_site)
    labels = engine.fault_labels(spec)
    label_map = {(l.bs_id, l.time_bin): l.kind for l in labels}
    selected = sorted(
        dataset.KPI_NAME_TO_COLUMN[k] for k in spec.kpis if k in dataset.KPI_NAME_TO_COLUMN
    )

    # emit only bins the run populated, mirroring the run-side export
    if len(bs.bins):
        present = np.zeros(len(bs.bins), dtype=bool)
        for col in dataset.KPI_COLUMNS:
            present |= ~np.isnan(bs.values[col]).all(axis=0)
        used_bins = [int(b) for b in bs.bins[present]]
    else:
        used_bins = []

    with open(out / "bs_kpis.csv", "w", newline="\n") as fh:
        fh.write(dataset.BS_CSV_HEADER + "\n")
        for b in used_bins:
            for s in range(len(spec.sites)):
                kind = label_map.get((s, b), "")
                row = [str(b), str(s)]
                for col in dataset.KPI_COLUMNS:
                    v = bs.values[col][s, b]
                    row.append(dataset._fmt(v) if col in selected else "")
                row.append("1" if kind else "0")
                row.append(kind)
                fh.write(",".join(row) + "\n")

    for name in ("adjacency.csv", "ue_kpis.csv"):
        src = run_dir / name
        if src.exists():
            (out / name).write_bytes(src.read_bytes())

    manifest.write_manifest(
        out, command="export", scenario_sha256=None, seed=meta.get("seed"), started_utc=started,
    )
    print(f"exported dataset -> {out}")
    return EXIT_OK


def _cmd_channel_table(args) -> int:
    started = manifest.now_utc()
    lines = ["environment,los,d2d_m,path_loss_db"]
    for env, h_bs, h_bld in (("uma", 25.0, 22.5), ("rma", 35.0, 10.0)):
        for los in (True, False):
            for d in np.geomspace(10, 5000, 60):
                geom = channel.LinkGeometry(
                    d2d=float(d),
                    d3d=float(np.hypot(d, h_bs - 1.5)),
                    bs_height=h_bs,
                    ue_height=1.5,
                )
                pl = channel.path_loss(env, los, geom, 4.0, building_height=h_bld)
                lines.append(f"{env},{int(los)},{float(d)!r},{pl!r}")
    text = "\n".join(lines) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "channel_table.csv").write_text(text, encoding="utf-8")
        manifest.write_manifest(out, command="channel-table", scenario_sha256=None,
                                seed=None, started_utc=started)
    return EXIT_OK


_COMMANDS = {
    "compile": _cmd_compile,
    "calibrate": _cmd_calibrate,
    "run": _cmd_run,
    "export": _cmd_export,
    "channel-table": _cmd_channel_table,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except (SchemaError, ValidationError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (IoError, DomainError, MissingReference, RanforgeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
