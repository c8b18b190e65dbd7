"""Per-environment radio and deployment parameter sets.

The two bundled environments are the mid-band (4 GHz) urban and rural eMBB
macro configurations used for calibration. Values marked "calibrated" below
(max UE distance, building height, thermal noise, background user count)
are tuning results rather than standard-mandated numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

DEFAULT_SECTOR_AZIMUTHS_DEG = (30.0, 150.0, 270.0)

# 10 MHz at 15 kHz subcarrier spacing: 50 resource blocks of 12 subcarriers.
RESOURCE_BLOCKS_10MHZ = 50
SUBCARRIERS_10MHZ = 600


@dataclass(frozen=True)
class EnvironmentParams:
    name: str
    propagation: str                 # "uma" or "rma"
    carrier_frequency_ghz: float
    bandwidth_mhz: float
    isd_m: float
    bs_height_m: float
    bs_tx_power_dbm: float
    ue_tx_power_dbm: float
    bs_element_gain_dbi: float
    ue_antenna_gain_dbi: float
    bs_noise_figure_db: float
    ue_noise_figure_db: float
    indoor_fraction: float
    high_loss_fraction: float
    speed_indoor_kmh: float
    speed_outdoor_kmh: float
    min_ue_distance_m: float
    max_ue_distance_m: float         # calibrated
    building_height_m: float         # calibrated
    street_width_m: float
    thermal_noise_dbm: float         # calibrated; used as the total effective noise
    users_per_sector: int
    background_users_per_cell: int   # calibrated
    background_tx_power_dbm: float
    outdoor_ue_height_m: float
    kpi_site_count: int              # inner sites whose attached UEs feed KPI statistics
    hysteresis_db: float             # handover defaults, not standard-mandated
    time_to_trigger_s: float
    subcarriers: int
    resource_blocks: int


URBAN_EMBB = EnvironmentParams(
    name="urban_embb",
    propagation="uma",
    carrier_frequency_ghz=4.0,
    bandwidth_mhz=10.0,
    isd_m=200.0,
    bs_height_m=25.0,
    bs_tx_power_dbm=41.0,
    ue_tx_power_dbm=23.0,
    bs_element_gain_dbi=8.0,
    ue_antenna_gain_dbi=0.0,
    bs_noise_figure_db=5.0,
    ue_noise_figure_db=7.0,
    indoor_fraction=0.8,
    high_loss_fraction=0.2,
    speed_indoor_kmh=3.0,
    speed_outdoor_kmh=30.0,
    min_ue_distance_m=10.0,
    max_ue_distance_m=50.0,
    building_height_m=22.5,
    street_width_m=20.0,
    thermal_noise_dbm=-81.0,
    users_per_sector=10,
    background_users_per_cell=10,
    background_tx_power_dbm=41.0,
    outdoor_ue_height_m=1.5,
    kpi_site_count=7,
    hysteresis_db=3.0,
    time_to_trigger_s=0.1,
    subcarriers=SUBCARRIERS_10MHZ,
    resource_blocks=RESOURCE_BLOCKS_10MHZ,
)

RURAL_EMBB = EnvironmentParams(
    name="rural_embb",
    propagation="rma",
    carrier_frequency_ghz=4.0,
    bandwidth_mhz=10.0,
    isd_m=1732.0,
    bs_height_m=35.0,
    bs_tx_power_dbm=46.0,
    ue_tx_power_dbm=23.0,
    bs_element_gain_dbi=8.0,
    ue_antenna_gain_dbi=0.0,
    bs_noise_figure_db=5.0,
    ue_noise_figure_db=7.0,
    indoor_fraction=0.5,
    high_loss_fraction=0.0,
    speed_indoor_kmh=3.0,
    speed_outdoor_kmh=120.0,
    min_ue_distance_m=10.0,
    max_ue_distance_m=200.0,
    building_height_m=10.0,
    street_width_m=20.0,
    thermal_noise_dbm=-82.0,
    users_per_sector=10,
    background_users_per_cell=10,
    background_tx_power_dbm=46.0,
    outdoor_ue_height_m=1.5,
    kpi_site_count=7,
    hysteresis_db=3.0,
    time_to_trigger_s=0.1,
    subcarriers=SUBCARRIERS_10MHZ,
    resource_blocks=RESOURCE_BLOCKS_10MHZ,
)

ENVIRONMENTS = {p.name: p for p in (URBAN_EMBB, RURAL_EMBB)}


def environment_params(name: str) -> EnvironmentParams:
    try:
        return ENVIRONMENTS[name]
    except KeyError:
        raise KeyError(f"unknown environment {name!r}; expected one of {sorted(ENVIRONMENTS)}")


def with_overrides(params: EnvironmentParams, **kwargs) -> EnvironmentParams:
    """Copy a parameter set with selected fields replaced."""
    return replace(params, **kwargs)
