"""Graph-based anomaly detection on exported base-station KPI series."""

from .data import DegenerateFold, GraphDataset, SchemaError, build_windows, time_block_folds
from .models import Gcn, TemporalGraphNet
from .train import EvalReport, binary_metrics, majority_baseline, train_model

__version__ = "0.1.0"
