"""Windowed graph datasets from exported base-station KPI CSVs.

Consumes the simulator's dataset interface (`bs_kpis.csv` + `adjacency.csv`)
and produces sliding windows of per-node KPI history with binary anomaly
labels. Missing bins are forward-filled and flagged through an extra
feature channel, so models see both a usable value and the fact that it
was absent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd


class SchemaError(ValueError):
    """The CSV does not match the dataset interface."""


class DegenerateFold(ValueError):
    """A cross-validation fold is missing one of the two classes."""


KPI_COLUMNS = ("rsrp_dbm", "rsrq_db", "sinr_db", "coupling_gain_db", "serving_distance_m")
REQUIRED_COLUMNS = ("time_s", "bs_id", *KPI_COLUMNS, "is_anomalous", "fault_kind")

MAX_ANOMALY_FRACTION = 0.02


@dataclass
class GraphDataset:
    """Node features per sliding window plus the adjacency and labels.

    ``features`` has shape (windows, nodes, channels, W): the last axis is
    time inside the window, the channels are the KPI columns followed by a
    missing-data flag. ``labels`` has shape (windows, nodes) and carries the
    label of each window's final bin; ``window_end_bin`` maps a window index
    back to the absolute time bin it labels.
    """

    features: np.ndarray
    labels: np.ndarray
    adjacency: np.ndarray
    window_end_bin: np.ndarray
    channel_names: tuple[str, ...]
    window: int

    @property
    def n_windows(self) -> int:
        return self.features.shape[0]

    @property
    def n_nodes(self) -> int:
        return self.features.shape[1]

    @property
    def anomaly_fraction(self) -> float:
        return float(self.labels.mean())


def _load_bs_kpis(path) -> pd.DataFrame:
    try:
        df = pd.read_csv(path, low_memory=False)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    missing = [c for c in REQUIRED_COLUMNS if c not in df.columns]
    if missing:
        raise SchemaError(f"{path} lacks required columns {missing}")
    return df


def _load_adjacency(path, n_nodes: int) -> np.ndarray:
    try:
        df = pd.read_csv(path)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    if list(df.columns) != ["bs_a", "bs_b"]:
        raise SchemaError(f"{path} must have header bs_a,bs_b")
    adj = np.zeros((n_nodes, n_nodes), dtype=np.float32)
    for a, b in df.itertuples(index=False):
        if not (0 <= a < n_nodes and 0 <= b < n_nodes):
            raise SchemaError(f"adjacency references unknown node ({a}, {b})")
        adj[a, b] = adj[b, a] = 1.0
    return adj


def build_windows(bs_kpis_path, adjacency_path, window: int) -> GraphDataset:
    """Sliding windows (stride 1 s) over the per-BS series.

    Window t covers bins [t-W+1, t] and takes its label from bin t. With
    W=1 the features reduce to the current bin's KPIs.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    df = _load_bs_kpis(bs_kpis_path)
    if df.empty:
        raise SchemaError(f"{bs_kpis_path} contains no rows")

    nodes = np.sort(df["bs_id"].unique())
    n_nodes = int(nodes.max()) + 1
    bins = np.sort(df["time_s"].unique())
    bin_index = {int(b): i for i, b in enumerate(bins)}
    n_bins = len(bins)

    values = np.full((n_nodes, n_bins, len(KPI_COLUMNS)), np.nan, dtype=np.float32)
    labels = np.zeros((n_nodes, n_bins), dtype=np.float32)
    rows_node = df["bs_id"].to_numpy(dtype=int)
    rows_bin = np.array([bin_index[int(t)] for t in df["time_s"]], dtype=int)
    for k, col in enumerate(KPI_COLUMNS):
        values[rows_node, rows_bin, k] = df[col].to_numpy(dtype=np.float32)
    labels[rows_node, rows_bin] = df["is_anomalous"].to_numpy(dtype=np.float32)

    missing = np.isnan(values).any(axis=2, keepdims=True).astype(np.float32)
    # forward-fill per node along time, zero-fill anything before first data
    for k in range(values.shape[2]):
        col = values[:, :, k]
        mask = np.isnan(col)
        idx = np.where(~mask, np.arange(n_bins)[None, :], 0)
        np.maximum.accumulate(idx, axis=1, out=idx)
        col[:] = col[np.arange(n_nodes)[:, None], idx]
    values = np.nan_to_num(values, nan=0.0)

    feats = np.concatenate([values, missing], axis=2)  # (nodes, bins, channels)
    channel_names = KPI_COLUMNS + ("is_missing",)

    if n_bins < window:
        raise ValueError(f"series of {n_bins} bins is shorter than window {window}")
    n_windows = n_bins - window + 1
    # (windows, nodes, channels, W)
    windows = np.stack(
        [feats[:, t : t + window, :].transpose(0, 2, 1) for t in range(n_windows)], axis=0
    )
    window_labels = labels[:, window - 1 :].T.copy()  # (windows, nodes)
    ends = np.array([int(bins[t + window - 1]) for t in range(n_windows)], dtype=int)

    dataset = GraphDataset(
        features=windows,
        labels=window_labels,
        adjacency=_load_adjacency(adjacency_path, n_nodes),
        window_end_bin=ends,
        channel_names=channel_names,
        window=window,
    )
    if dataset.anomaly_fraction > MAX_ANOMALY_FRACTION:
        raise SchemaError(
            f"anomalous fraction {dataset.anomaly_fraction:.4f} exceeds "
            f"{MAX_ANOMALY_FRACTION} - not a valid export"
        )
    return dataset


def normalize_features(train_feats: np.ndarray, *apply_to: np.ndarray):
    """Per-channel standardization fit on the training windows only."""
    mean = train_feats.mean(axis=(0, 1, 3), keepdims=True)
    std = train_feats.std(axis=(0, 1, 3), keepdims=True)
    std = np.where(std < 1e-6, 1.0, std)
    out = [(train_feats - mean) / std]
    for arr in apply_to:
        out.append((arr - mean) / std)
    return out


def time_block_folds(dataset: GraphDataset, folds: int, trim: int | None = None):
    """Contiguous time blocks; train windows overlapping a test block are trimmed.

    Yields (fold_index, train_idx, test_idx) over window indices. Raises
    DegenerateFold when a block (or its complement) lacks one of the classes.
    """
    n = dataset.n_windows
    if folds < 2:
        raise ValueError("folds must be >= 2")
    trim = dataset.window - 1 if trim is None else trim
    edges = np.linspace(0, n, folds + 1, dtype=int)
    any_anomaly = dataset.labels.max(axis=1)  # per window
    for fold in range(folds):
        lo, hi = edges[fold], edges[fold + 1]
        test_idx = np.arange(lo, hi)
        train_mask = np.ones(n, dtype=bool)
        train_mask[max(0, lo - trim) : min(n, hi + trim)] = False
        train_idx = np.nonzero(train_mask)[0]
        for name, idx in (("test", test_idx), ("train", train_idx)):
            if idx.size == 0 or len(np.unique(any_anomaly[idx] > 0)) < 2:
                raise DegenerateFold(
                    f"fold {fold}: {name} split lacks both classes "
                    f"(windows {idx.size}, anomalous {(any_anomaly[idx] > 0).sum()})"
                )
        yield fold, train_idx, test_idx
