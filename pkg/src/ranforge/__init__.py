"""ranforge: a calibration-grade 5G RAN system-level simulator.

Compact YAML scenarios compile into fully parameterized deployments;
a snapshot Monte Carlo mode collects coupling-gain / wideband-SINR
calibration statistics (validated by KS against bundled reference
percentile curves), and a time-stepped mode with random-waypoint mobility,
A3 handover, and canonical fault injection exports labeled per-base-station
KPI time series for anomaly-detection research.
"""

from .calibration import CdfCurve, KsResult, calibration_report, empirical_cdf, ks_statistic
from .channel import ChannelRealization, LinkGeometry, element_gain, los_probability, path_loss, penetration_loss, shadow_fading
from .engine import FaultLabel, HandoverEvent, SimState, evaluate_a3, run_snapshot, run_timeline, step
from .errors import (
    ConfigError,
    DomainError,
    EmptyInput,
    IoError,
    MissingReference,
    RanforgeError,
    SchemaError,
    ValidationError,
)
from .kpi import KpiSample, LinkBudget, NoiseModel, coupling_gain, rsrp, rsrq, wideband_sinr
from .params import ENVIRONMENTS, EnvironmentParams, environment_params
from .scenario import (
    BackgroundDecl,
    FaultKind,
    FaultSpec,
    ScenarioSpec,
    SiteDecl,
    X2Plan,
    X2Policy,
    emit_config,
    expand_x2,
    parse_scenario,
    scenario_to_yaml,
)
from .topology import (
    BackgroundCell,
    Cell,
    Deployment,
    Site,
    Ue,
    build_deployment,
    drop_ues,
    hex_layout,
    place_background,
    sectorize,
    ue_height,
)

__version__ = "0.1.0"
