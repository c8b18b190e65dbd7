"""Per-link and per-UE radio KPIs: coupling gain, RSRP, RSRQ, wideband SINR.

All arithmetic is plain dB/dBm bookkeeping; conversions go through linear
milliwatts only where powers must be summed (SINR, RSSI).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def dbm_to_mw(dbm):
    return 10.0 ** (np.asarray(dbm, dtype=float) / 10.0)


def mw_to_dbm(mw):
    return 10.0 * np.log10(mw)


@dataclass(frozen=True)
class NoiseModel:
    """Effective noise for geometry SINR.

    ``thermal_noise_dbm`` is the calibrated total effective noise and is
    used directly; the noise figures ride along for documentation and
    emitted configuration, they are not added on top.
    """

    thermal_noise_dbm: float
    ue_noise_figure_db: float = 7.0
    bs_noise_figure_db: float = 5.0


@dataclass(frozen=True)
class LinkBudget:
    tx_power_dbm: float
    path_loss_db: float
    penetration_db: float
    shadow_db: float
    tx_antenna_gain_dbi: float
    rx_antenna_gain_dbi: float = 0.0

    @property
    def rx_power_dbm(self) -> float:
        return (
            self.tx_power_dbm
            - self.path_loss_db
            - self.penetration_db
            - self.shadow_db
            + self.tx_antenna_gain_dbi
            + self.rx_antenna_gain_dbi
        )


@dataclass(frozen=True)
class KpiSample:
    time_s: float
    ue_id: int
    serving_cell_id: int
    position: tuple[float, float]
    serving_distance_m: float
    rsrp_dbm: float
    rsrq_db: float
    sinr_db: float
    coupling_gain_db: float


def coupling_gain(budget: LinkBudget) -> float:
    """Received minus transmitted power: the negative of net link loss."""
    return budget.rx_power_dbm - budget.tx_power_dbm


def wideband_sinr(serving_rx_dbm, interferer_rx_dbm, noise: NoiseModel):
    """Serving power over the linear sum of interference and noise, in dB.

    ``interferer_rx_dbm`` must exclude the serving link. Accepts an empty
    list, a 1-D list (one UE), or a 2-D array (rows of per-UE interferers).
    """
    serving = np.asarray(serving_rx_dbm, dtype=float)
    interferers = np.asarray(interferer_rx_dbm, dtype=float)
    noise_mw = dbm_to_mw(noise.thermal_noise_dbm)
    if interferers.size == 0:
        total = np.zeros_like(serving)
    else:
        total = dbm_to_mw(interferers).sum(axis=-1)
    sinr = mw_to_dbm(dbm_to_mw(serving) / (total + noise_mw))
    return float(sinr) if np.isscalar(serving_rx_dbm) else sinr


def rsrp(rx_power_dbm, subcarrier_count: int):
    """Per-resource-element average power over the measured bandwidth."""
    if subcarrier_count < 1:
        raise ValueError("subcarrier_count must be >= 1")
    value = np.asarray(rx_power_dbm, dtype=float) - 10.0 * np.log10(subcarrier_count)
    return float(value) if np.isscalar(rx_power_dbm) else value


def rsrq(rsrp_dbm, rssi_dbm, allocated_blocks: int):
    """N * RSRP / RSSI expressed in dB."""
    if allocated_blocks < 1:
        raise ValueError("allocated_blocks must be >= 1")
    value = (
        10.0 * np.log10(allocated_blocks)
        + np.asarray(rsrp_dbm, dtype=float)
        - np.asarray(rssi_dbm, dtype=float)
    )
    return float(value) if np.isscalar(rsrp_dbm) else value
