"""Large-scale propagation: LOS probability, UMa/RMa path loss, shadowing,
building penetration, and the sectored base-station element pattern.

Formulas follow 3GPP TR 38.901 (Tables 7.4.1-1 and 7.4.2-1, section 7.3 for
the element pattern, section 7.4.3 for O2I penetration). Everything here is
pure given its inputs; random quantities (LOS state, shadow fading, indoor
depth) are drawn once per link by the caller and passed back in, which keeps
path loss reproducible and lets the engine vectorize over links.

Two environment strings are understood: ``"uma"`` (urban macro) and
``"rma"`` (rural macro). The urban environment uses UMa formulas with the
effective environment height fixed at 1 m; the randomized alternative branch
of the standard only matters beyond the breakpoint distance, which the
bundled urban scenario (max UE distance 50 m) never reaches.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

log = logging.getLogger(__name__)

SPEED_OF_LIGHT = 299_792_458.0  # m/s

# validity bounds on 2-D distance (meters)
MIN_VALID_D2D = 10.0
MAX_VALID_D2D = {"uma": 5000.0, "rma": 5000.0}

# shadow fading standard deviation (dB) by (environment, LOS)
SHADOW_SIGMA_DB = {
    ("uma", True): 4.0,
    ("uma", False): 6.0,
    ("rma", True): 4.0,
    ("rma", False): 8.0,
}

# element pattern constants (TR 38.901 Table 7.3-1)
ELEMENT_MAX_GAIN_DBI = 8.0
HALF_POWER_BEAMWIDTH_DEG = 65.0
PATTERN_FLOOR_DB = 30.0

# O2I material losses as linear functions of frequency in GHz
# (standard glass, infrared-reflective glass, concrete)
GLASS_LOSS = (2.0, 0.2)
IIR_GLASS_LOSS = (23.0, 0.3)
CONCRETE_LOSS = (5.0, 4.0)

INDOOR_LOSS_DB_PER_M = 0.5
MAX_INDOOR_DEPTH_M = 25.0


@dataclass(frozen=True)
class LinkGeometry:
    """Geometric inputs of one BS-UE link."""

    d2d: float
    d3d: float
    bs_height: float
    ue_height: float
    azimuth_offset_deg: float = 0.0
    zenith_offset_deg: float = 0.0

    @classmethod
    def from_positions(cls, site_xy, ue_xy, bs_height, ue_height,
                       boresight_deg=0.0):
        dx = float(ue_xy[0] - site_xy[0])
        dy = float(ue_xy[1] - site_xy[1])
        d2d = math.hypot(dx, dy)
        dh = bs_height - ue_height
        d3d = math.hypot(d2d, dh)
        az = math.degrees(math.atan2(dy, dx)) % 360.0
        az_off = (az - boresight_deg + 180.0) % 360.0 - 180.0
        zen_off = math.degrees(math.atan2(dh, d2d))
        return cls(d2d=d2d, d3d=d3d, bs_height=bs_height, ue_height=ue_height,
                   azimuth_offset_deg=az_off, zenith_offset_deg=zen_off)


@dataclass(frozen=True)
class ChannelRealization:
    """Random link state plus the resulting deterministic losses."""

    los: bool
    shadow_fading_db: float
    penetration_db: float
    path_loss_db: float


# ---------------------------------------------------------------------------
# LOS probability (TR 38.901 Table 7.4.2-1)


def los_probability(d2d, env: str, ue_height: float = 1.5):
    """Probability that a link of 2-D distance ``d2d`` is line-of-sight.

    Accepts scalars or arrays. Monotonically non-increasing in distance;
    clamps to 1 below the short-distance knee (18 m UMa, 10 m RMa).
    """
    d = np.asarray(d2d, dtype=float)
    if np.any(d < 0):
        raise ValueError("d2d must be >= 0")
    if env == "rma":
        p = np.where(d <= 10.0, 1.0, np.exp(-(d - 10.0) / 1000.0))
    elif env == "uma":
        with np.errstate(divide="ignore", invalid="ignore"):
            base = np.where(d <= 18.0, 1.0, 18.0 / d + np.exp(-d / 63.0) * (1.0 - 18.0 / d))
        if ue_height > 13.0:
            c = ((min(ue_height, 23.0) - 13.0) / 10.0) ** 1.5
            bump = 1.0 + c * 1.25 * (d / 100.0) ** 3 * np.exp(-d / 150.0)
            p = np.where(d <= 18.0, 1.0, base * bump)
        else:
            p = base
        p = np.clip(p, 0.0, 1.0)
    else:
        raise ValueError(f"unknown environment {env!r}")
    return float(p) if np.isscalar(d2d) else p


# ---------------------------------------------------------------------------
# path loss (TR 38.901 Table 7.4.1-1)


def _uma_path_loss(d2d, d3d, h_bs, h_ut, fc_ghz, los):
    """Vector UMa path loss. ``los`` is a boolean array; h_E fixed at 1 m."""
    d2d = np.asarray(d2d, dtype=float)
    d3d = np.asarray(d3d, dtype=float)
    h_ut = np.asarray(h_ut, dtype=float)
    h_e = 1.0
    d_bp = 4.0 * (h_bs - h_e) * (h_ut - h_e) * (fc_ghz * 1e9) / SPEED_OF_LIGHT
    log_d3d = np.log10(d3d)
    log_fc = math.log10(fc_ghz)
    pl1 = 28.0 + 22.0 * log_d3d + 20.0 * log_fc
    pl2 = (
        28.0 + 40.0 * log_d3d + 20.0 * log_fc
        - 9.0 * np.log10(d_bp ** 2 + (h_bs - h_ut) ** 2)
    )
    pl_los = np.where(d2d <= d_bp, pl1, pl2)
    pl_nlos = 13.54 + 39.08 * log_d3d + 20.0 * log_fc - 0.6 * (h_ut - 1.5)
    return np.where(los, pl_los, np.maximum(pl_los, pl_nlos))


def _rma_path_loss(d2d, d3d, h_bs, h_ut, fc_ghz, los, building_height, street_width):
    """Vector RMa path loss with average building height h and street width W."""
    d2d = np.asarray(d2d, dtype=float)
    d3d = np.asarray(d3d, dtype=float)
    h = building_height
    d_bp = 2.0 * math.pi * h_bs * h_ut * (fc_ghz * 1e9) / SPEED_OF_LIGHT

    a = min(0.03 * h ** 1.72, 10.0)
    b = min(0.044 * h ** 1.72, 14.77)
    c = 0.002 * math.log10(h)

    def pl1_at(d):
        return 20.0 * np.log10(40.0 * math.pi * d * fc_ghz / 3.0) + a * np.log10(d) - b + c * d

    pl1 = pl1_at(d3d)
    pl2 = pl1_at(d_bp) + 40.0 * np.log10(d3d / d_bp)
    pl_los = np.where(d2d <= d_bp, pl1, pl2)

    h_ut_arr = np.asarray(h_ut, dtype=float)
    pl_nlos = (
        161.04
        - 7.1 * math.log10(street_width)
        + 7.5 * math.log10(h)
        - (24.37 - 3.7 * (h / h_bs) ** 2) * math.log10(h_bs)
        + (43.42 - 3.1 * math.log10(h_bs)) * (np.log10(d3d) - 3.0)
        + 20.0 * math.log10(fc_ghz)
        - (3.2 * np.log10(11.75 * h_ut_arr) ** 2 - 4.97)
    )
    return np.where(los, pl_los, np.maximum(pl_los, pl_nlos))


def path_loss_array(env, d2d, d3d, h_bs, h_ut, fc_ghz, los,
                    building_height=None, street_width=20.0):
    """Vectorized basic path loss; d2d below 10 m is clamped to 10 m."""
    d2d = np.maximum(np.asarray(d2d, dtype=float), MIN_VALID_D2D)
    dh = h_bs - np.asarray(h_ut, dtype=float)
    d3d = np.maximum(np.asarray(d3d, dtype=float), np.hypot(MIN_VALID_D2D, dh))
    if env == "uma":
        return _uma_path_loss(d2d, d3d, h_bs, h_ut, fc_ghz, los)
    if env == "rma":
        if building_height is None:
            raise ValueError("rma path loss requires a building height")
        return _rma_path_loss(d2d, d3d, h_bs, h_ut, fc_ghz, los, building_height, street_width)
    raise ValueError(f"unknown environment {env!r}")


def path_loss(env: str, los: bool, geom: LinkGeometry, fc_ghz: float,
              building_height: float | None = None, street_width: float = 20.0,
              strict: bool = False) -> float:
    """Basic path loss in dB for one link.

    In strict mode a 2-D distance outside the formula's validity range
    raises DomainError; otherwise the short end is clamped to 10 m and the
    far end extrapolated with a log record, which is what simulation runs
    use for incidental out-of-range interference links.
    """
    if geom.d3d <= 0:
        raise ValueError("d3d must be > 0")
    if fc_ghz <= 0:
        raise ValueError("fc must be > 0")
    bound = MAX_VALID_D2D[env]
    if geom.d2d > bound or geom.d2d < MIN_VALID_D2D:
        if strict:
            raise DomainError(
                f"d2d={geom.d2d:.1f} m outside the {env} validity range "
                f"[{MIN_VALID_D2D}, {bound}] m"
            )
        log.debug("path loss evaluated outside validity range: d2d=%.1f m (%s)", geom.d2d, env)
    value = path_loss_array(
        env,
        geom.d2d,
        geom.d3d,
        geom.bs_height,
        geom.ue_height,
        fc_ghz,
        np.asarray(bool(los)),
        building_height=building_height,
        street_width=street_width,
    )
    return float(value)


# ---------------------------------------------------------------------------
# building penetration (O2I, TR 38.901 section 7.4.3)


def penetration_loss(pen_class: str, fc_ghz: float) -> float:
    """Through-wall loss in dB for the low- or high-loss building class.

    Low loss combines 30% standard glass with 70% concrete; high loss 70%
    infrared-reflective glass with 30% concrete; both add a 5 dB constant.
    """
    if fc_ghz <= 0:
        raise ValueError("fc must be > 0")
    l_glass = GLASS_LOSS[0] + GLASS_LOSS[1] * fc_ghz
    l_iir = IIR_GLASS_LOSS[0] + IIR_GLASS_LOSS[1] * fc_ghz
    l_concrete = CONCRETE_LOSS[0] + CONCRETE_LOSS[1] * fc_ghz
    if pen_class == "low":
        mix = 0.3 * 10.0 ** (-l_glass / 10.0) + 0.7 * 10.0 ** (-l_concrete / 10.0)
    elif pen_class == "high":
        mix = 0.7 * 10.0 ** (-l_iir / 10.0) + 0.3 * 10.0 ** (-l_concrete / 10.0)
    else:
        raise ValueError(f"unknown penetration class {pen_class!r}")
    return 5.0 - 10.0 * math.log10(mix)


# ---------------------------------------------------------------------------
# antenna element pattern (TR 38.901 section 7.3)


def element_gain(azimuth_offset_deg, zenith_offset_deg):
    """Directional element gain in dBi; 8 dBi at boresight, floor at -22 dBi.

    Attenuation is 12*(angle/65)^2 per axis, capped at 30 dB per axis and
    30 dB overall. Accepts scalars or arrays.
    """
    az = np.asarray(azimuth_offset_deg, dtype=float)
    zen = np.asarray(zenith_offset_deg, dtype=float)
    att_az = np.minimum(12.0 * (az / HALF_POWER_BEAMWIDTH_DEG) ** 2, PATTERN_FLOOR_DB)
    att_zen = np.minimum(12.0 * (zen / HALF_POWER_BEAMWIDTH_DEG) ** 2, PATTERN_FLOOR_DB)
    gain = ELEMENT_MAX_GAIN_DBI - np.minimum(att_az + att_zen, PATTERN_FLOOR_DB)
    if np.isscalar(azimuth_offset_deg) and np.isscalar(zenith_offset_deg):
        return float(gain)
    return gain


# ---------------------------------------------------------------------------
# shadow fading


def shadow_sigma_db(env: str, los: bool) -> float:
    return SHADOW_SIGMA_DB[(env, bool(los))]


def shadow_fading(rng: np.random.Generator, env: str, los: bool,
                  sigma_db: float | None = None) -> float:
    """One zero-mean log-normal shadow draw; the caller persists it per link."""
    sigma = shadow_sigma_db(env, los) if sigma_db is None else sigma_db
    return float(rng.standard_normal() * sigma)


def realize_link(rng: np.random.Generator, env: str, geom: LinkGeometry,
                 fc_ghz: float, indoor: bool, pen_class: str = "low",
                 building_height: float | None = None,
                 street_width: float = 20.0) -> ChannelRealization:
    """Draw the random state of one link and evaluate its losses.

    Draw order (LOS uniform, shadow normal, indoor depth uniform) is fixed so
    a generator seeded per link reproduces the same realization. Indoor links
    add the Eq.-style through-wall loss as `penetration` and a 0.5 dB/m
    indoor-depth term folded into `path_loss`.
    """
    p_los = los_probability(geom.d2d, env, geom.ue_height)
    los = bool(rng.random() < p_los)
    shadow = shadow_fading(rng, env, los)
    pl = path_loss(env, los, geom, fc_ghz, building_height=building_height,
                   street_width=street_width)
    pen = 0.0
    if indoor:
        pen = penetration_loss(pen_class, fc_ghz)
        d2d_in = rng.random() * min(MAX_INDOOR_DEPTH_M, geom.d2d)
        pl += INDOOR_LOSS_DB_PER_M * d2d_in
    return ChannelRealization(los=los, shadow_fading_db=shadow, penetration_db=pen,
                              path_loss_db=pl)
