"""Cross-validated training and evaluation of the two detectors.

Folds are contiguous time blocks (sliding windows overlap, so train windows
within one window length of a test block are trimmed). Class imbalance is
handled by a positive-class weight in the loss; the decision threshold is
chosen on a held-out tail of each fold's training block by maximizing the
anomaly-class F1. Metrics are macro-averaged over the normal and anomalous
classes. Everything is deterministic given (dataset, seed).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import torch

from .data import GraphDataset, normalize_features, time_block_folds
from .models import Gcn, TemporalGraphNet

VALIDATION_TAIL_FRACTION = 0.15


@dataclass
class FoldResult:
    fold: int
    precision_macro: float
    recall_macro: float
    f1_macro: float
    f1_anomaly: float
    threshold: float
    confusion: dict
    scores: np.ndarray = field(repr=False)
    labels: np.ndarray = field(repr=False)
    window_end_bin: np.ndarray = field(repr=False)


@dataclass
class EvalReport:
    model: str
    seed: int
    window: int
    folds: list[FoldResult]

    @property
    def f1_macro(self) -> float:
        return float(np.mean([f.f1_macro for f in self.folds]))

    @property
    def precision_macro(self) -> float:
        return float(np.mean([f.precision_macro for f in self.folds]))

    @property
    def recall_macro(self) -> float:
        return float(np.mean([f.recall_macro for f in self.folds]))

    def to_json(self) -> str:
        doc = {
            "model": self.model,
            "seed": self.seed,
            "window": self.window,
            "macro": {
                "precision": self.precision_macro,
                "recall": self.recall_macro,
                "f1": self.f1_macro,
            },
            "folds": [
                {
                    "fold": f.fold,
                    "precision_macro": f.precision_macro,
                    "recall_macro": f.recall_macro,
                    "f1_macro": f.f1_macro,
                    "f1_anomaly": f.f1_anomaly,
                    "threshold": f.threshold,
                    "confusion": f.confusion,
                }
                for f in self.folds
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def binary_metrics(labels: np.ndarray, predictions: np.ndarray) -> dict:
    """Confusion counts plus per-class and macro precision/recall/F1."""
    labels = labels.astype(bool).ravel()
    predictions = predictions.astype(bool).ravel()
    tp = int((labels & predictions).sum())
    fp = int((~labels & predictions).sum())
    fn = int((labels & ~predictions).sum())
    tn = int((~labels & ~predictions).sum())

    def prf(tp_, fp_, fn_):
        precision = tp_ / (tp_ + fp_) if tp_ + fp_ else 0.0
        recall = tp_ / (tp_ + fn_) if tp_ + fn_ else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        return precision, recall, f1

    p_a, r_a, f_a = prf(tp, fp, fn)          # anomalous as positive
    p_n, r_n, f_n = prf(tn, fn, fp)          # normal as positive
    return {
        "tp": tp, "fp": fp, "fn": fn, "tn": tn,
        "anomaly": {"precision": p_a, "recall": r_a, "f1": f_a},
        "normal": {"precision": p_n, "recall": r_n, "f1": f_n},
        "macro": {
            "precision": (p_a + p_n) / 2,
            "recall": (r_a + r_n) / 2,
            "f1": (f_a + f_n) / 2,
        },
    }


def majority_baseline(dataset: GraphDataset) -> dict:
    """Metrics of the predict-all-normal classifier on the full label set."""
    return binary_metrics(dataset.labels, np.zeros_like(dataset.labels))


def _choose_threshold(scores: np.ndarray, labels: np.ndarray) -> float:
    """Threshold maximizing the anomaly-class F1 on validation scores."""
    flat_scores = scores.ravel()
    flat_labels = labels.ravel().astype(bool)
    if not flat_labels.any():
        return float(flat_scores.max()) + 1.0
    candidates = np.unique(np.quantile(flat_scores, np.linspace(0.0, 1.0, 201)))
    best_t, best_f1 = candidates[0], -1.0
    for t in candidates:
        m = binary_metrics(flat_labels, flat_scores >= t)
        if m["anomaly"]["f1"] > best_f1:
            best_t, best_f1 = float(t), m["anomaly"]["f1"]
    return best_t


def _build_model(name: str, dataset: GraphDataset) -> torch.nn.Module:
    channels = dataset.features.shape[2]
    if name == "gcn":
        return Gcn(dataset.adjacency, in_channels=channels)
    if name == "tgnn":
        return TemporalGraphNet(n_nodes=dataset.n_nodes, in_channels=channels)
    raise ValueError(f"unknown model {name!r}")


def _fit(model, feats, labels, *, epochs, lr, batch_size, pos_weight, generator):
    loss_fn = torch.nn.BCEWithLogitsLoss(pos_weight=torch.tensor(pos_weight, dtype=torch.float32))
    optimizer = torch.optim.Adam(model.parameters(), lr=lr)
    x = torch.as_tensor(feats, dtype=torch.float32)
    y = torch.as_tensor(labels, dtype=torch.float32)
    n = x.shape[0]
    model.train()
    for _ in range(epochs):
        order = torch.randperm(n, generator=generator)
        for start in range(0, n, batch_size):
            idx = order[start : start + batch_size]
            optimizer.zero_grad()
            logits = model(x[idx])
            loss = loss_fn(logits, y[idx])
            loss.backward()
            optimizer.step()
    return model


@torch.no_grad()
def _score(model, feats, batch_size=256) -> np.ndarray:
    model.eval()
    x = torch.as_tensor(feats, dtype=torch.float32)
    out = [model(x[i : i + batch_size]) for i in range(0, x.shape[0], batch_size)]
    return torch.cat(out).numpy()


def train_model(model_name: str, dataset: GraphDataset, folds: int = 5, seed: int = 7,
                epochs: int | None = None, lr: float = 1e-3,
                batch_size: int = 64) -> EvalReport:
    """K-fold evaluation of one detector; deterministic per (dataset, seed)."""
    if model_name == "gcn" and dataset.window != 1:
        raise ValueError("the spatial-only gcn consumes window=1 datasets")
    if model_name == "tgnn" and dataset.window < 8:
        raise ValueError("the temporal model needs window >= 8")
    torch.set_num_threads(1)
    epochs = {"gcn": 40, "tgnn": 12}[model_name] if epochs is None else epochs

    results = []
    for fold, train_idx, test_idx in time_block_folds(dataset, folds):
        torch.manual_seed(seed * 1000 + fold)
        generator = torch.Generator().manual_seed(seed * 1000 + fold + 1)

        # the last stretch of the training block is excluded from fitting and
        # used, together with the rest of the block, for threshold selection:
        # anomalies are too sparse (<2%) for a small holdout alone to give a
        # stable operating point
        n_val = max(1, int(len(train_idx) * VALIDATION_TAIL_FRACTION))
        fit_idx, val_idx = train_idx[:-n_val], train_idx
        if not dataset.labels[fit_idx].any():
            fit_idx = train_idx

        fit_feats, val_feats, test_feats = normalize_features(
            dataset.features[fit_idx], dataset.features[val_idx], dataset.features[test_idx]
        )
        fit_labels = dataset.labels[fit_idx]
        pos = float(fit_labels.sum())
        pos_weight = (fit_labels.size - pos) / pos if pos else 1.0

        model = _build_model(model_name, dataset)
        _fit(model, fit_feats, fit_labels, epochs=epochs, lr=lr, batch_size=batch_size,
             pos_weight=pos_weight, generator=generator)

        threshold = _choose_threshold(_score(model, val_feats), dataset.labels[val_idx])
        scores = _score(model, test_feats)
        predictions = scores >= threshold
        metrics = binary_metrics(dataset.labels[test_idx], predictions)
        results.append(
            FoldResult(
                fold=fold,
                precision_macro=metrics["macro"]["precision"],
                recall_macro=metrics["macro"]["recall"],
                f1_macro=metrics["macro"]["f1"],
                f1_anomaly=metrics["anomaly"]["f1"],
                threshold=threshold,
                confusion={k: metrics[k] for k in ("tp", "fp", "fn", "tn")},
                scores=scores,
                labels=dataset.labels[test_idx].copy(),
                window_end_bin=dataset.window_end_bin[test_idx].copy(),
            )
        )
    return EvalReport(model=model_name, seed=seed, window=dataset.window, folds=results)


def dump_fold_predictions(report: EvalReport, out_dir) -> list:
    """Per-fold CSVs: node, window end bin, label, score, prediction."""
    from pathlib import Path

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for f in report.folds:
        path = out_dir / f"predictions_{report.model}_fold{f.fold}.csv"
        with open(path, "w", newline="\n") as fh:
            fh.write("bs_id,time_bin,label,score,prediction\n")
            for w in range(f.scores.shape[0]):
                for node in range(f.scores.shape[1]):
                    score = f.scores[w, node]
                    fh.write(
                        f"{node},{f.window_end_bin[w]},{int(f.labels[w, node])},"
                        f"{score!r},{int(score >= f.threshold)}\n"
                    )
        paths.append(path)
    return paths
