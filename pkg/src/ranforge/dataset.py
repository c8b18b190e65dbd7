"""Three-step aggregation from per-UE tick samples to per-BS time series.

Step 1 bins each UE's tick samples into 1 s intervals (dB-domain mean).
Step 2 averages across the UEs a sector serves in each bin.
Step 3 averages across a site's sectors.

Missing bins (a sector serving nobody, a site with no data) are carried as
NaN sentinels, written as empty CSV fields, and never imputed - filling
gaps is the consumer's decision. Aggregation is permutation-invariant in
UEs and sectors, and re-aggregating the exported per-UE CSV reproduces the
per-BS CSV exactly (floats are serialized with full round-trip precision).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import IoError
from .scenario import ScenarioSpec

BIN_S = 1.0

KPI_COLUMNS = ("rsrp_dbm", "rsrq_db", "sinr_db", "coupling_gain_db", "serving_distance_m")

# scenario KPI selector -> exported column
KPI_NAME_TO_COLUMN = {
    "rsrp": "rsrp_dbm",
    "rsrq": "rsrq_db",
    "sinr": "sinr_db",
    "coupling_gain": "coupling_gain_db",
    "serving_distance": "serving_distance_m",
}

BS_CSV_HEADER = (
    "time_s,bs_id,rsrp_dbm,rsrq_db,sinr_db,coupling_gain_db,serving_distance_m,"
    "is_anomalous,fault_kind"
)
UE_CSV_HEADER = (
    "time_s,ue_id,serving_cell_id,bs_id,x_m,y_m,rsrp_dbm,rsrq_db,sinr_db,"
    "coupling_gain_db,serving_distance_m"
)

MAX_ANOMALY_FRACTION = 0.02


@dataclass
class UeSeries:
    """Step-1 output: per-UE 1 s series plus per-bin attachment.

    ``values[kpi]`` has shape (n_ue, n_bins) with NaN for empty bins;
    ``attachment`` holds the serving cell at each bin's last tick (-1 when
    the UE produced no sample in the bin); ``x/y`` the last tick position.
    """

    bins: np.ndarray                 # (n_bins,) int, bin start seconds
    values: dict[str, np.ndarray]    # kpi -> (n_ue, n_bins)
    attachment: np.ndarray           # (n_ue, n_bins) int
    x_m: np.ndarray
    y_m: np.ndarray

    @property
    def n_ue(self) -> int:
        return self.attachment.shape[0]

    @property
    def n_bins(self) -> int:
        return self.attachment.shape[1]


@dataclass
class SectorSeries:
    bins: np.ndarray
    values: dict[str, np.ndarray]    # kpi -> (n_cells, n_bins), NaN = missing


@dataclass
class BsSeries:
    bins: np.ndarray
    values: dict[str, np.ndarray]    # kpi -> (n_sites, n_bins), NaN = missing

    def series(self, bs_id: int, kpi: str) -> list[tuple[int, float]]:
        return [(int(b), float(v)) for b, v in zip(self.bins, self.values[kpi][bs_id])]


class StreamingBinner:
    """Accumulates per-tick sample blocks into the step-1 per-UE 1 s series."""

    def __init__(self, n_ue: int, sim_time_s: float, kpis=KPI_COLUMNS):
        self.n_ue = n_ue
        self.n_bins = max(1, int(math.ceil(sim_time_s / BIN_S)))
        self.kpis = tuple(kpis)
        self._sums = {k: np.zeros((n_ue, self.n_bins)) for k in self.kpis}
        self._counts = np.zeros((n_ue, self.n_bins), dtype=np.int64)
        self._attachment = np.full((n_ue, self.n_bins), -1, dtype=np.int64)
        self._x = np.full((n_ue, self.n_bins), np.nan)
        self._y = np.full((n_ue, self.n_bins), np.nan)

    def add_block(self, block: dict) -> None:
        ue = np.asarray(block["ue_id"], dtype=int)
        if ue.size == 0:
            return
        b = min(int(block["time_s"][0] // BIN_S), self.n_bins - 1)
        for k in self.kpis:
            self._sums[k][ue, b] += block[k]
        self._counts[ue, b] += 1
        self._attachment[ue, b] = block["serving_cell"]
        self._x[ue, b] = block["x_m"]
        self._y[ue, b] = block["y_m"]

    def finish(self) -> UeSeries:
        with np.errstate(invalid="ignore", divide="ignore"):
            values = {
                k: np.where(self._counts > 0, self._sums[k] / np.maximum(self._counts, 1), np.nan)
                for k in self.kpis
            }
        return UeSeries(
            bins=np.arange(self.n_bins, dtype=int),
            values=values,
            attachment=self._attachment,
            x_m=self._x,
            y_m=self._y,
        )


def bin_and_average(time_s, ue_id, kpis: dict, serving_cell, x_m=None, y_m=None,
                    n_ue: int | None = None, sim_time_s: float | None = None) -> UeSeries:
    """Step 1 on flat arrays of per-tick samples (time-sorted per UE)."""
    time_s = np.asarray(time_s, dtype=float)
    ue_id = np.asarray(ue_id, dtype=int)
    n_ue = int(ue_id.max()) + 1 if n_ue is None else n_ue
    sim_time = float(time_s.max()) + BIN_S if sim_time_s is None else sim_time_s
    binner = StreamingBinner(n_ue=n_ue, sim_time_s=sim_time, kpis=tuple(kpis))
    order = np.lexsort((ue_id, time_s))
    x = np.zeros_like(time_s) if x_m is None else np.asarray(x_m, dtype=float)
    y = np.zeros_like(time_s) if y_m is None else np.asarray(y_m, dtype=float)
    serving = np.asarray(serving_cell, dtype=int)
    for idx in order:
        binner.add_block(
            {
                "time_s": time_s[idx : idx + 1],
                "ue_id": ue_id[idx : idx + 1],
                "serving_cell": serving[idx : idx + 1],
                "x_m": x[idx : idx + 1],
                "y_m": y[idx : idx + 1],
                **{k: np.asarray(v, dtype=float)[idx : idx + 1] for k, v in kpis.items()},
            }
        )
    return binner.finish()


def aggregate_sector(ue_series: UeSeries, n_cells: int) -> SectorSeries:
    """Step 2: mean across the UEs attached to each cell in each bin."""
    n_bins = ue_series.n_bins
    out = {k: np.full((n_cells, n_bins), np.nan) for k in ue_series.values}
    att = ue_series.attachment
    for k, vals in ue_series.values.items():
        sums = np.zeros((n_cells, n_bins))
        counts = np.zeros((n_cells, n_bins), dtype=np.int64)
        valid = (att >= 0) & ~np.isnan(vals)
        ue_idx, bin_idx = np.nonzero(valid)
        cell_idx = att[ue_idx, bin_idx]
        np.add.at(sums, (cell_idx, bin_idx), vals[ue_idx, bin_idx])
        np.add.at(counts, (cell_idx, bin_idx), 1)
        with np.errstate(invalid="ignore"):
            out[k] = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
    return SectorSeries(bins=ue_series.bins.copy(), values=out)


def aggregate_bs(sector_series: SectorSeries, cell_site: np.ndarray,
                 n_sites: int) -> BsSeries:
    """Step 3: mean across each site's sectors, skipping missing sectors."""
    cell_site = np.asarray(cell_site, dtype=int)
    n_bins = len(sector_series.bins)
    out = {}
    for k, vals in sector_series.values.items():
        sums = np.zeros((n_sites, n_bins))
        counts = np.zeros((n_sites, n_bins), dtype=np.int64)
        present = ~np.isnan(vals)
        cell_idx, bin_idx = np.nonzero(present)
        np.add.at(sums, (cell_site[cell_idx], bin_idx), vals[cell_idx, bin_idx])
        np.add.at(counts, (cell_site[cell_idx], bin_idx), 1)
        with np.errstate(invalid="ignore"):
            out[k] = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
    return BsSeries(bins=sector_series.bins.copy(), values=out)


# ---------------------------------------------------------------------------
# export


def _fmt(x: float) -> str:
    return "" if (x is None or (isinstance(x, float) and math.isnan(x))) else repr(float(x))


def export(
    ue_series: UeSeries,
    labels,
    spec: ScenarioSpec,
    cell_site: np.ndarray,
    site_pairs,
    out_dir,
    write_ue_csv: bool = True,
) -> dict[str, Path]:
    """Write the dataset files: bs_kpis.csv, adjacency.csv, ue_kpis.csv.

    Only bins in which the run produced any sample are emitted (an empty run
    therefore yields header-only files). KPI columns not selected in the
    scenario stay empty. The anomalous-bin fraction is re-checked against
    the 2% budget before anything is written.
    """
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {out_dir}: {exc}") from exc

    n_sites = len(spec.sites)
    selected = sorted(KPI_NAME_TO_COLUMN[k] for k in spec.kpis if k in KPI_NAME_TO_COLUMN)
    sector = aggregate_sector(ue_series, n_cells=int(spec.total_cells))
    bs = aggregate_bs(sector, cell_site, n_sites=n_sites)

    label_map = {(l.bs_id, l.time_bin): l.kind for l in labels}
    has_data = np.any(ue_series.attachment >= 0, axis=0)
    used_bins = [int(b) for b in ue_series.bins[has_data]]

    if used_bins:
        used = set(used_bins)
        total = n_sites * len(used_bins)
        anomalous = sum(1 for (s, b) in label_map if b in used)
        if anomalous / total > MAX_ANOMALY_FRACTION:
            raise ValueError(
                f"labeled anomaly fraction {anomalous / total:.4f} exceeds the "
                f"{MAX_ANOMALY_FRACTION:.2f} budget"
            )

    files: dict[str, Path] = {}

    bs_path = out_dir / "bs_kpis.csv"
    with open(bs_path, "w", newline="\n") as fh:
        fh.write(BS_CSV_HEADER + "\n")
        for b in used_bins:
            for s in range(n_sites):
                kind = label_map.get((s, b), "")
                row = [str(b), str(s)]
                for col in ("rsrp_dbm", "rsrq_db", "sinr_db", "coupling_gain_db",
                            "serving_distance_m"):
                    row.append(_fmt(bs.values[col][s, b]) if col in selected else "")
                row.append("1" if kind else "0")
                row.append(kind)
                fh.write(",".join(row) + "\n")
    files["bs_kpis"] = bs_path

    adj_path = out_dir / "adjacency.csv"
    with open(adj_path, "w", newline="\n") as fh:
        fh.write("bs_a,bs_b\n")
        for a, b in site_pairs:
            fh.write(f"{a},{b}\n")
    files["adjacency"] = adj_path

    if write_ue_csv:
        ue_path = out_dir / "ue_kpis.csv"
        with open(ue_path, "w", newline="\n") as fh:
            fh.write(UE_CSV_HEADER + "\n")
            position_selected = "position" in spec.kpis
            for b in used_bins:
                att_col = ue_series.attachment[:, b]
                for ue in range(ue_series.n_ue):
                    cell = att_col[ue]
                    if cell < 0:
                        continue
                    row = [str(b), str(ue), str(int(cell)), str(int(cell_site[cell]))]
                    if position_selected:
                        row.append(_fmt(ue_series.x_m[ue, b]))
                        row.append(_fmt(ue_series.y_m[ue, b]))
                    else:
                        row.extend(["", ""])
                    for col in ("rsrp_dbm", "rsrq_db", "sinr_db", "coupling_gain_db",
                                "serving_distance_m"):
                        row.append(_fmt(ue_series.values[col][ue, b]) if col in selected else "")
                    fh.write(",".join(row) + "\n")
        files["ue_kpis"] = ue_path

    return files


def reaggregate_ue_csv(ue_csv_path, spec: ScenarioSpec, cell_site: np.ndarray) -> BsSeries:
    """Steps 2-3 recomputed from an exported per-UE CSV (idempotence check).

    Values are serialized with repr and parsed back with the round-trip
    float parser, so this reproduces the in-memory aggregation exactly.
    """
    df = pd.read_csv(ue_csv_path, float_precision="round_trip")
    if df.empty:
        n_sites = len(spec.sites)
        return BsSeries(
            bins=np.array([], dtype=int),
            values={k: np.zeros((n_sites, 0)) for k in KPI_COLUMNS},
        )
    n_bins = int(df["time_s"].max()) + 1
    n_ue = int(df["ue_id"].max()) + 1
    values = {k: np.full((n_ue, n_bins), np.nan) for k in KPI_COLUMNS}
    attachment = np.full((n_ue, n_bins), -1, dtype=np.int64)
    rows = df["ue_id"].to_numpy(dtype=int)
    bins = df["time_s"].to_numpy(dtype=int)
    attachment[rows, bins] = df["serving_cell_id"].to_numpy(dtype=int)
    for k in KPI_COLUMNS:
        if k in df.columns:
            values[k][rows, bins] = df[k].to_numpy(dtype=float)
    series = UeSeries(
        bins=np.arange(n_bins, dtype=int),
        values=values,
        attachment=attachment,
        x_m=np.full((n_ue, n_bins), np.nan),
        y_m=np.full((n_ue, n_bins), np.nan),
    )
    sector = aggregate_sector(series, n_cells=int(spec.total_cells))
    return aggregate_bs(sector, cell_site, n_sites=len(spec.sites))
