"""Empirical CDFs, the two-sample KS statistic, and calibration reports.

Reference distributions ship as percentile tables (``percentile,value_db``
rows for the integer percentiles 1..99) because that is how calibration
submissions circulate; a table is treated as a piecewise-linear CDF between
its knots. Run output is an ordinary right-continuous step ECDF. The KS
statistic handles both representations.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyInput, MissingReference

CALIBRATION_KPIS = ("coupling_gain", "wideband_sinr")

# pass thresholds: 2x the published simulator-vs-reference scores for each
# environment, leaving room for desk-scale sampling noise
DEFAULT_THRESHOLDS = {
    "urban_embb": {"coupling_gain": 0.13, "wideband_sinr": 0.28},
    "rural_embb": {"coupling_gain": 0.18, "wideband_sinr": 0.32},
}


@dataclass(frozen=True)
class CdfCurve:
    """A CDF as sorted values with non-decreasing probabilities ending at <=1.

    ``kind`` is "step" for an ECDF (right-continuous, jumps at each value)
    or "linear" for a percentile table interpolated between knots.
    """

    values: np.ndarray
    probabilities: np.ndarray
    kind: str = "step"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        p = np.asarray(self.probabilities, dtype=float)
        if v.size == 0:
            raise EmptyInput("a CDF needs at least one point")
        if v.shape != p.shape:
            raise ValueError("values and probabilities must have equal length")
        if np.any(np.diff(v) < 0):
            raise ValueError("values must be sorted ascending")
        if np.any(np.diff(p) < 0) or p[-1] > 1.0 + 1e-12 or p[0] < 0.0:
            raise ValueError("probabilities must be non-decreasing within [0, 1]")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "probabilities", p)

    def evaluate(self, x) -> np.ndarray:
        """F(x), right-continuous for step curves, interpolated for linear.

        A linear (percentile-table) curve clamps to its first/last knot
        probability outside the tabulated range: the tails beyond the 1st
        and 99th percentile are unknown, so no shape is invented for them.
        """
        x = np.asarray(x, dtype=float)
        if self.kind == "step":
            idx = np.searchsorted(self.values, x, side="right")
            probs = np.concatenate([[0.0], self.probabilities])
            return probs[idx]
        return np.interp(
            x, self.values, self.probabilities,
            left=float(self.probabilities[0]),
            right=float(self.probabilities[-1]),
        )

    def evaluate_left(self, x) -> np.ndarray:
        """F(x-): the left limit (differs from F(x) only for step curves)."""
        x = np.asarray(x, dtype=float)
        if self.kind == "step":
            idx = np.searchsorted(self.values, x, side="left")
            probs = np.concatenate([[0.0], self.probabilities])
            return probs[idx]
        return self.evaluate(x)


def empirical_cdf(samples) -> CdfCurve:
    """Right-continuous step ECDF of a sample set."""
    arr = np.sort(np.asarray(samples, dtype=float).ravel())
    if arr.size == 0:
        raise EmptyInput("empirical_cdf needs at least one sample")
    probs = np.arange(1, arr.size + 1, dtype=float) / arr.size
    return CdfCurve(values=arr, probabilities=probs, kind="step")


def percentile_curve(percentiles, values) -> CdfCurve:
    """Piecewise-linear CDF from (percentile in 1..99, value) knots."""
    order = np.argsort(np.asarray(percentiles, dtype=float))
    p = np.asarray(percentiles, dtype=float)[order] / 100.0
    v = np.asarray(values, dtype=float)[order]
    return CdfCurve(values=v, probabilities=p, kind="linear")


def ks_statistic(a: CdfCurve, b: CdfCurve) -> float:
    """sup_x |F_a(x) - F_b(x)| over the union of both curves' breakpoints.

    For step curves both one-sided limits are checked at every breakpoint,
    which makes the result exact for step-vs-step (classic two-sample KS)
    and step-vs-piecewise-linear comparisons.
    """
    xs = np.union1d(a.values, b.values)
    d_right = np.abs(a.evaluate(xs) - b.evaluate(xs))
    d_left = np.abs(a.evaluate_left(xs) - b.evaluate_left(xs))
    return float(max(d_right.max(), d_left.max()))


@dataclass(frozen=True)
class KsResult:
    statistic: float
    kpi: str
    reference_name: str

    def __post_init__(self):
        if not (0.0 <= self.statistic <= 1.0):
            raise ValueError("a KS statistic lies in [0, 1]")


@dataclass
class CalibrationReport:
    environment: str
    entries: list[dict] = field(default_factory=list)
    overlays: dict[str, dict[str, CdfCurve]] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(e["passed"] for e in self.entries)

    def to_json(self) -> str:
        doc = {
            "environment": self.environment,
            "passed": self.passed,
            "results": self.entries,
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_reference_dir(path) -> dict[str, CdfCurve]:
    """Load every ``<kpi>.csv`` percentile table in a directory."""
    path = Path(path)
    curves: dict[str, CdfCurve] = {}
    for csv_path in sorted(path.glob("*.csv")):
        pct, val = [], []
        with open(csv_path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != ["percentile", "value_db"]:
                raise MissingReference(
                    f"{csv_path} must have header 'percentile,value_db', got {reader.fieldnames}"
                )
            for row in reader:
                pct.append(float(row["percentile"]))
                val.append(float(row["value_db"]))
        curves[csv_path.stem] = percentile_curve(pct, val)
    if not curves:
        raise MissingReference(f"no reference curves found in {path}")
    return curves


def calibration_report(
    run_samples: dict[str, np.ndarray],
    references: dict[str, CdfCurve],
    reference_name: str,
    thresholds: dict[str, float] | None = None,
    environment: str = "",
) -> CalibrationReport:
    """KS of each run KPI distribution against its named reference curve."""
    if thresholds is None:
        thresholds = DEFAULT_THRESHOLDS.get(environment, {})
    report = CalibrationReport(environment=environment)
    for kpi_name in sorted(run_samples):
        if kpi_name not in references:
            raise MissingReference(
                f"reference set {reference_name!r} has no curve for {kpi_name!r}"
            )
        run_curve = empirical_cdf(run_samples[kpi_name])
        ref_curve = references[kpi_name]
        ks = KsResult(
            statistic=ks_statistic(run_curve, ref_curve),
            kpi=kpi_name,
            reference_name=reference_name,
        )
        threshold = thresholds.get(kpi_name)
        entry = {
            "kpi": kpi_name,
            "reference": reference_name,
            "ks_statistic": ks.statistic,
            "threshold": threshold,
            "passed": bool(threshold is None or ks.statistic <= threshold),
            "samples": int(np.asarray(run_samples[kpi_name]).size),
        }
        report.entries.append(entry)
        report.overlays[kpi_name] = {"run": run_curve, "reference": ref_curve}
    return report


def overlay_csv(report: CalibrationReport, kpi_name: str) -> str:
    """CDF overlay rows (value_db, cdf_run, cdf_reference) for plotting."""
    curves = report.overlays[kpi_name]
    run, ref = curves["run"], curves["reference"]
    xs = np.union1d(run.values, ref.values)
    lines = ["value_db,cdf_run,cdf_reference"]
    for x, fr, fe in zip(xs, run.evaluate(xs), ref.evaluate(xs)):
        lines.append(f"{x!r},{fr!r},{fe!r}")
    return "\n".join(lines) + "\n"
