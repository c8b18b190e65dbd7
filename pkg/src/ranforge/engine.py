"""Simulation engine.

Two modes share one vectorized link-budget evaluator:

* snapshot Monte Carlo - repeated independent UE drops with static
  measurement, the standard way to collect large-scale calibration
  statistics (coupling gain, wideband SINR);
* timeline - 100 ms ticks with random-waypoint mobility, A3 handover
  (hysteresis + time-to-trigger), full-buffer interference, and injection
  of the three canonical faults, producing labeled KPI streams.

Determinism: every random draw comes from a generator seeded by
(seed, salt, context...) so results are independent of evaluation order,
worker count, and platform.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import channel, kpi
from .errors import ConfigError
from .scenario import FaultKind, FaultSpec, ScenarioSpec, expand_x2
from .topology import Deployment, adjacency_pairs, build_deployment, inner_sites, place_background

log = logging.getLogger(__name__)

# seed-sequence salts; never reuse across purposes
SALT_DEPLOY = 11
SALT_DROP = 23
SALT_TIMELINE = 37
SALT_REALIZATION = 41

DEFAULT_TICK_S = 0.1

KPI_COLUMNS = ("rsrp_dbm", "rsrq_db", "sinr_db", "coupling_gain_db", "serving_distance_m")


def seeded_rng(*keys: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(k) for k in keys]))


@dataclass
class HandoverEvent:
    time_s: float
    ue_id: int
    from_cell: int
    to_cell: int
    trigger: str = "a3"


def evaluate_a3(serving_rsrp: float, neighbor_rsrp: float, hysteresis: float,
                timer: float, ttt: float, dt: float) -> tuple[float, bool]:
    """One tick of the A3 entry condition for a single neighbor.

    The timer accumulates while the neighbor exceeds the serving measurement
    by more than the hysteresis, resets otherwise; the trigger fires on the
    tick where the accumulated time reaches the time-to-trigger.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    condition = (neighbor_rsrp - serving_rsrp) > hysteresis
    new_timer = timer + dt if condition else 0.0
    return new_timer, bool(condition and new_timer >= ttt)


# ---------------------------------------------------------------------------
# static world arrays


class RadioWorld:
    """Arrays derived from a deployment, shared by both simulation modes.

    Transmitter columns are ordered: real cells first (ids match
    ``Deployment.cells``), then one omnidirectional column per background
    cell. Per-site quantities (path loss, shadow, LOS) are indexed by a
    transmitter-site axis that likewise appends background positions after
    the real sites.
    """

    def __init__(self, spec: ScenarioSpec, deployment: Deployment):
        self.spec = spec
        self.params = spec.params
        self.deployment = deployment
        p = spec.params

        sites = deployment.sites
        self.n_sites = len(sites)
        self.site_xy = deployment.site_positions()
        bg = deployment.background_cells
        self.n_bg = len(bg)
        if bg:
            bg_xy = np.array([b.position for b in bg], dtype=float).reshape(self.n_bg, 2)
            self.tx_site_xy = np.vstack([self.site_xy, bg_xy])
        else:
            self.tx_site_xy = self.site_xy
        self.tx_site_h = np.full(self.n_sites + self.n_bg, p.bs_height_m, dtype=float)

        cells = deployment.cells
        self.n_cells = len(cells)
        self.col_site = np.array(
            [c.site_id for c in cells] + [self.n_sites + j for j in range(self.n_bg)], dtype=int
        )
        self.col_az = np.array([c.azimuth_deg for c in cells] + [0.0] * self.n_bg, dtype=float)
        self.col_is_bg = np.array([False] * self.n_cells + [True] * self.n_bg)
        self.base_tx = np.array(
            [c.tx_power_dbm for c in cells] + [p.background_tx_power_dbm] * self.n_bg, dtype=float
        )
        self.base_hyst = np.array([c.hysteresis_db for c in cells], dtype=float)
        self.base_ttt = np.array([c.time_to_trigger_s for c in cells], dtype=float)
        self.cell_site = self.col_site[: self.n_cells]

        self.inner_site_ids = np.array(
            inner_sites(sites, p.kpi_site_count), dtype=int
        )
        self.noise = kpi.NoiseModel(
            thermal_noise_dbm=p.thermal_noise_dbm,
            ue_noise_figure_db=p.ue_noise_figure_db,
            bs_noise_figure_db=p.bs_noise_figure_db,
        )
        self.noise_mw = float(kpi.dbm_to_mw(p.thermal_noise_dbm))

        # handover eligibility: same site, or sites joined by an X2 link
        plan = expand_x2(spec)
        linked = np.zeros((self.n_sites, self.n_sites), dtype=bool)
        for a, b in plan.links:
            linked[a, b] = linked[b, a] = True
        same = self.cell_site[:, None] == self.cell_site[None, :]
        self.handover_allowed = same | linked[self.cell_site[:, None], self.cell_site[None, :]]
        np.fill_diagonal(self.handover_allowed, False)

        # site neighbor graph (for interference-fault blast radius and export)
        neighbor = np.zeros((self.n_sites, self.n_sites), dtype=bool)
        for a, b in adjacency_pairs(sites):
            neighbor[a, b] = neighbor[b, a] = True
        self.site_neighbors = neighbor

    # -- link-state draws ---------------------------------------------------

    def draw_realization(self, rng, ue_xy, ue_h, indoor):
        """Shadow, LOS, and frozen indoor depth for (UE row(s)) x (tx sites)."""
        d2d = self._d2d(ue_xy)
        p_los = self._los_probability(d2d, ue_h)
        los = rng.random(d2d.shape) < p_los
        sigma = np.where(
            los,
            channel.shadow_sigma_db(self.params.propagation, True),
            channel.shadow_sigma_db(self.params.propagation, False),
        )
        shadow = rng.standard_normal(d2d.shape) * sigma
        depth = rng.random(d2d.shape) * np.minimum(channel.MAX_INDOOR_DEPTH_M, d2d)
        depth = depth * np.asarray(indoor, dtype=float).reshape(-1, 1)
        return shadow, los, depth

    def _d2d(self, ue_xy):
        ue_xy = np.atleast_2d(ue_xy)
        return np.hypot(
            ue_xy[:, 0:1] - self.tx_site_xy[None, :, 0],
            ue_xy[:, 1:2] - self.tx_site_xy[None, :, 1],
        )

    def _los_probability(self, d2d, ue_h):
        env = self.params.propagation
        ue_h = np.asarray(ue_h, dtype=float).reshape(-1, 1)
        if env == "rma":
            return np.where(d2d <= 10.0, 1.0, np.exp(-(d2d - 10.0) / 1000.0))
        with np.errstate(divide="ignore", invalid="ignore"):
            base = np.where(d2d <= 18.0, 1.0, 18.0 / d2d + np.exp(-d2d / 63.0) * (1.0 - 18.0 / d2d))
        c = np.where(ue_h > 13.0, ((np.clip(ue_h, 13.0, 23.0) - 13.0) / 10.0) ** 1.5, 0.0)
        bump = 1.0 + c * 1.25 * (d2d / 100.0) ** 3 * np.exp(-d2d / 150.0)
        return np.clip(np.where(d2d <= 18.0, 1.0, base * bump), 0.0, 1.0)

    # -- received power -----------------------------------------------------

    def rx_power(self, ue_xy, ue_h, pen_db, shadow, los, depth, tx_dbm):
        """Received power matrix (n_ue, n_cells + n_bg) in dBm."""
        p = self.params
        ue_xy = np.atleast_2d(ue_xy)
        ue_h = np.asarray(ue_h, dtype=float).reshape(-1, 1)
        d2d = self._d2d(ue_xy)
        dh = self.tx_site_h[None, :] - ue_h
        d3d = np.hypot(d2d, dh)
        pl = channel.path_loss_array(
            p.propagation, d2d, d3d, p.bs_height_m, ue_h, p.carrier_frequency_ghz, los,
            building_height=p.building_height_m, street_width=p.street_width_m,
        )
        pl = pl + channel.INDOOR_LOSS_DB_PER_M * depth + shadow

        az_to_site = np.degrees(
            np.arctan2(
                ue_xy[:, 1:2] - self.tx_site_xy[None, :, 1],
                ue_xy[:, 0:1] - self.tx_site_xy[None, :, 0],
            )
        ) % 360.0
        zen_to_site = np.degrees(np.arctan2(dh, np.maximum(d2d, 1e-9)))

        az_off = (az_to_site[:, self.col_site] - self.col_az[None, :] + 180.0) % 360.0 - 180.0
        gain = channel.element_gain(az_off, zen_to_site[:, self.col_site])
        gain = np.where(self.col_is_bg[None, :], 0.0, gain)

        rx = (
            tx_dbm[None, :]
            + gain
            + p.ue_antenna_gain_dbi
            - pl[:, self.col_site]
            - np.asarray(pen_db, dtype=float).reshape(-1, 1)
        )
        return rx, d2d

    def kpis_from_rx(self, rx, serving, d2d, tx_dbm, extra_interference_mw=None):
        """Per-UE KPI vectors given the rx matrix and serving cell indices."""
        n = rx.shape[0]
        rows = np.arange(n)
        rx_serving = rx[rows, serving]
        rx_mw = kpi.dbm_to_mw(rx)
        total_mw = rx_mw.sum(axis=1)
        extra = np.zeros(n) if extra_interference_mw is None else extra_interference_mw
        interference_mw = total_mw - rx_mw[rows, serving] + extra
        sinr = kpi.mw_to_dbm(kpi.dbm_to_mw(rx_serving) / (interference_mw + self.noise_mw))
        rsrp = rx_serving - 10.0 * math.log10(self.params.subcarriers)
        rssi = kpi.mw_to_dbm(total_mw + extra + self.noise_mw)
        rsrq = 10.0 * math.log10(self.params.resource_blocks) + rsrp - rssi
        cg = rx_serving - tx_dbm[serving]
        dist = d2d[rows, self.col_site[serving]]
        return {
            "rsrp_dbm": rsrp,
            "rsrq_db": rsrq,
            "sinr_db": sinr,
            "coupling_gain_db": cg,
            "serving_distance_m": dist,
        }


# ---------------------------------------------------------------------------
# snapshot Monte Carlo mode


@dataclass
class SnapshotResult:
    """Per-UE samples retained from every drop (inner-site attachment only)."""

    drop: np.ndarray
    ue_id: np.ndarray
    serving_cell: np.ndarray
    x_m: np.ndarray
    y_m: np.ndarray
    kpis: dict[str, np.ndarray]
    drops_run: int
    samples_generated: int

    def __len__(self):
        return len(self.ue_id)


def _snapshot_drop(spec: ScenarioSpec, seed: int, drop: int):
    """One independent drop: fresh UEs, static measurement, inner-site filter."""
    rng = seeded_rng(seed, SALT_DROP, drop)
    deployment = build_deployment(spec, rng)
    # background placement is part of the scenario, not of the drop
    deployment.background_cells = place_background(
        spec.background, spec.params, seeded_rng(seed, SALT_DEPLOY)
    )
    world = RadioWorld(spec, deployment)

    ue_xy = deployment.ue_positions()
    ue_h = np.array([u.height_m for u in deployment.ues])
    indoor = np.array([u.indoor for u in deployment.ues])
    pen = np.array(
        [
            channel.penetration_loss(u.penetration_class, spec.params.carrier_frequency_ghz)
            if u.indoor
            else 0.0
            for u in deployment.ues
        ]
    )
    shadow, los, depth = world.draw_realization(rng, ue_xy, ue_h, indoor)
    rx, d2d = world.rx_power(ue_xy, ue_h, pen, shadow, los, depth, world.base_tx)
    serving = np.argmax(rx[:, : world.n_cells], axis=1)
    kpis = world.kpis_from_rx(rx, serving, d2d, world.base_tx)

    keep = np.isin(world.cell_site[serving], world.inner_site_ids)
    return {
        "drop": np.full(int(keep.sum()), drop, dtype=int),
        "ue_id": np.nonzero(keep)[0],
        "serving_cell": serving[keep],
        "x_m": ue_xy[keep, 0],
        "y_m": ue_xy[keep, 1],
        "kpis": {k: v[keep] for k, v in kpis.items()},
        "generated": len(deployment.ues),
    }


def _snapshot_drop_task(args):
    spec, seed, drop = args
    return _snapshot_drop(spec, seed, drop)


def run_snapshot(spec: ScenarioSpec, drops: int, seed: int | None = None,
                 jobs: int = 1) -> SnapshotResult:
    """Snapshot Monte Carlo: ``drops`` independent placements at fixed sites.

    Each drop re-places every UE, attaches it to the strongest-RSRP cell,
    and records one KPI sample; only samples attached to the inner KPI
    collection sites are retained. Drops are independent, so they may run
    on a process pool; results are merged in drop order, making output
    independent of ``jobs``.
    """
    if drops < 1:
        raise ValueError("drops must be >= 1")
    if spec.faults:
        raise ConfigError("snapshot mode is static; time-dependent faults need `run`")
    seed = spec.seed if seed is None else seed

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_snapshot_drop_task, [(spec, seed, d) for d in range(drops)]))
    else:
        parts = [_snapshot_drop(spec, seed, d) for d in range(drops)]

    return SnapshotResult(
        drop=np.concatenate([p["drop"] for p in parts]),
        ue_id=np.concatenate([p["ue_id"] for p in parts]),
        serving_cell=np.concatenate([p["serving_cell"] for p in parts]),
        x_m=np.concatenate([p["x_m"] for p in parts]),
        y_m=np.concatenate([p["y_m"] for p in parts]),
        kpis={
            k: np.concatenate([p["kpis"][k] for p in parts]) for k in KPI_COLUMNS
        },
        drops_run=drops,
        samples_generated=sum(p["generated"] for p in parts),
    )


# ---------------------------------------------------------------------------
# timeline mode


class SimState:
    """Mutable world of one timeline run.

    Holds the clock, per-UE kinematics and attachment, the per-link channel
    realization (redrawn per serving-cell change), per-(UE, cell) A3 timers,
    and the fault-effective radio parameters.
    """

    def __init__(self, spec: ScenarioSpec, seed: int | None = None,
                 deployment: Deployment | None = None, dt: float = DEFAULT_TICK_S):
        self.spec = spec
        self.params = spec.params
        self.seed = spec.seed if seed is None else seed
        self.dt = dt
        # integer nanoseconds, so fault windows and 1 s bins never suffer
        # from accumulated float error
        self._clock_ns = 0
        self.clock = 0.0
        if deployment is None:
            deployment = build_deployment(spec, seeded_rng(self.seed, SALT_DEPLOY))
        self.deployment = deployment
        self.world = RadioWorld(spec, deployment)
        self.rng = seeded_rng(self.seed, SALT_TIMELINE)

        ues = deployment.ues
        self.n_ue = len(ues)
        self.ue_xy = deployment.ue_positions()
        self.ue_h = np.array([u.height_m for u in ues], dtype=float)
        self.indoor = np.array([u.indoor for u in ues], dtype=bool)
        self.pen_db = np.array(
            [
                channel.penetration_loss(u.penetration_class, spec.params.carrier_frequency_ghz)
                if u.indoor
                else 0.0
                for u in ues
            ]
        )
        self.speed_mps = np.array([u.speed_kmh for u in ues], dtype=float) / 3.6
        self.drop_site_xy = np.array(
            [deployment.sites[u.drop_site].position for u in ues], dtype=float
        ).reshape(self.n_ue, 2)
        self.waypoint = np.empty((self.n_ue, 2), dtype=float)
        for i in range(self.n_ue):
            self.waypoint[i] = self._draw_waypoint(i)

        self.epoch = np.zeros(self.n_ue, dtype=int)
        self.shadow = np.empty((self.n_ue, self.world.tx_site_xy.shape[0]))
        self.los = np.empty_like(self.shadow, dtype=bool)
        self.depth = np.empty_like(self.shadow)
        for i in range(self.n_ue):
            self._redraw_realization(i)

        self.tx_eff = self.world.base_tx.copy()
        self.hyst_eff = self.world.base_hyst.copy()
        self.ttt_eff = self.world.base_ttt.copy()
        self.active_faults: tuple[FaultSpec, ...] = ()
        self.a3_timer = np.zeros((self.n_ue, self.world.n_cells), dtype=float)
        self.handovers: list[HandoverEvent] = []
        self.refused_handovers = 0

        self._refresh_faults()
        rx, d2d = self._measure()
        self.serving = np.argmax(rx[:, : self.world.n_cells], axis=1)
        for ue, cell in enumerate(self.serving):
            deployment.ues[ue].serving_cell = int(cell)
        self._rx, self._d2d = rx, d2d

    # -- internals ----------------------------------------------------------

    def _draw_waypoint(self, ue: int) -> np.ndarray:
        p = self.params
        min_d, max_d = p.min_ue_distance_m, self.spec.max_ue_distance_m
        u = self.rng.random()
        radius = math.sqrt(u * (max_d * max_d - min_d * min_d) + min_d * min_d)
        theta = self.rng.random() * 2.0 * math.pi
        return self.drop_site_xy[ue] + radius * np.array([math.cos(theta), math.sin(theta)])

    def _redraw_realization(self, ue: int) -> None:
        rng = seeded_rng(self.seed, SALT_REALIZATION, ue, int(self.epoch[ue]))
        shadow, los, depth = self.world.draw_realization(
            rng, self.ue_xy[ue : ue + 1], self.ue_h[ue : ue + 1], self.indoor[ue : ue + 1]
        )
        self.shadow[ue] = shadow[0]
        self.los[ue] = los[0]
        self.depth[ue] = depth[0]

    def _refresh_faults(self) -> None:
        self.tx_eff[:] = self.world.base_tx
        self.hyst_eff[:] = self.world.base_hyst
        self.ttt_eff[:] = self.world.base_ttt
        active = tuple(
            f for f in self.spec.faults if f.start_s <= self.clock < f.end_s
        )
        self.active_faults = active
        for f in active:
            apply_fault(self, f)

    def _extra_interference_mw(self) -> np.ndarray:
        """Per-UE co-channel interference injected by active interference faults."""
        extra = np.zeros(self.n_ue)
        for f in self.active_faults:
            if f.kind is not FaultKind.INTER_CELL_INTERFERENCE:
                continue
            target_site = int(self.world.cell_site[f.target_cell])
            serving_site = self.world.cell_site[self.serving]
            affected = (serving_site == target_site) | self.world.site_neighbors[
                target_site, serving_site
            ]
            extra[affected] += float(kpi.dbm_to_mw(f.interference_power_dbm))
        return extra

    def _measure(self):
        return self.world.rx_power(
            self.ue_xy, self.ue_h, self.pen_db, self.shadow, self.los, self.depth, self.tx_eff
        )

    def _move(self, dt: float) -> None:
        to_wp = self.waypoint - self.ue_xy
        dist = np.hypot(to_wp[:, 0], to_wp[:, 1])
        step = self.speed_mps * dt
        arriving = step >= dist
        moving = ~arriving & (dist > 0)
        scale = np.zeros_like(dist)
        scale[moving] = step[moving] / dist[moving]
        self.ue_xy[moving] += to_wp[moving] * scale[moving, None]
        for ue in np.nonzero(arriving)[0]:
            if self.speed_mps[ue] <= 0:
                continue
            self.ue_xy[ue] = self.waypoint[ue]
            self.waypoint[ue] = self._draw_waypoint(int(ue))

    def _update_handover(self, rx, dt: float) -> list[int]:
        n_cells = self.world.n_cells
        rows = np.arange(self.n_ue)
        rx_cells = rx[:, :n_cells]
        rx_serving = rx_cells[rows, self.serving]
        hyst = self.hyst_eff[self.serving]
        ttt = self.ttt_eff[self.serving]

        # vector form of evaluate_a3, one timer per (UE, neighbor cell)
        condition = (rx_cells - rx_serving[:, None]) > hyst[:, None]
        condition[rows, self.serving] = False
        self.a3_timer = np.where(condition, self.a3_timer + dt, 0.0)
        triggered = condition & (self.a3_timer >= ttt[:, None])
        if not triggered.any():
            return []

        changed: list[int] = []
        allowed = self.world.handover_allowed[self.serving]
        for ue in np.nonzero(triggered.any(axis=1))[0]:
            cand = triggered[ue] & allowed[ue]
            if not cand.any():
                self.refused_handovers += 1
                log.debug(
                    "handover refused at t=%.1f: ue %d has no X2 route from cell %d",
                    self.clock, ue, self.serving[ue],
                )
                continue
            target = int(np.nonzero(cand)[0][np.argmax(rx_cells[ue, cand])])
            self.handovers.append(
                HandoverEvent(
                    time_s=self.clock,
                    ue_id=int(ue),
                    from_cell=int(self.serving[ue]),
                    to_cell=target,
                )
            )
            self.serving[ue] = target
            self.deployment.ues[ue].serving_cell = target
            self.a3_timer[ue, :] = 0.0
            self.epoch[ue] += 1
            self._redraw_realization(int(ue))
            changed.append(int(ue))
        return changed

    def sample(self) -> dict[str, np.ndarray]:
        """KPIs of every UE at the current clock (post-handover serving)."""
        kpis = self.world.kpis_from_rx(
            self._rx, self.serving, self._d2d, self.tx_eff,
            extra_interference_mw=self._extra_interference_mw(),
        )
        kpis["time_s"] = np.full(self.n_ue, self.clock)
        kpis["ue_id"] = np.arange(self.n_ue)
        kpis["serving_cell"] = self.serving.copy()
        kpis["x_m"] = self.ue_xy[:, 0].copy()
        kpis["y_m"] = self.ue_xy[:, 1].copy()
        return kpis

    def step(self, dt: float | None = None) -> "SimState":
        """Advance one tick: move, re-measure, update A3 timers, hand over."""
        dt = self.dt if dt is None else dt
        if dt <= 0:
            raise ValueError("dt must be > 0")
        self._clock_ns += int(round(dt * 1e9))
        self.clock = self._clock_ns / 1e9
        self._move(dt)
        self._refresh_faults()
        rx, d2d = self._measure()
        changed = self._update_handover(rx, dt)
        # a handover redraws the UE's realization; refresh those rows so the
        # sampled KPIs use the post-handover channel
        if changed:
            idx = np.array(changed, dtype=int)
            rx_new, _ = self.world.rx_power(
                self.ue_xy[idx], self.ue_h[idx], self.pen_db[idx],
                self.shadow[idx], self.los[idx], self.depth[idx], self.tx_eff,
            )
            rx[idx] = rx_new
        self._rx, self._d2d = rx, d2d
        return self


def step(state: SimState, dt: float) -> SimState:
    """Module-level alias of :meth:`SimState.step`."""
    return state.step(dt)


def apply_fault(state: SimState, fault: FaultSpec) -> SimState:
    """Overlay one active fault on the state's effective radio parameters.

    Power reduction lowers the target cell's transmit power; too-late
    handover overrides the target cell's hysteresis and time-to-trigger
    with the larger faulty values; inter-cell interference is handled at
    sampling time (an extra received-interference term for every UE served
    by the target cell or a neighboring site).
    """
    if fault.kind is FaultKind.EXCESSIVE_POWER_REDUCTION:
        state.tx_eff[fault.target_cell] = (
            state.world.base_tx[fault.target_cell] - fault.power_drop_db
        )
    elif fault.kind is FaultKind.TOO_LATE_HANDOVER:
        state.hyst_eff[fault.target_cell] = fault.hysteresis_db
        state.ttt_eff[fault.target_cell] = fault.ttt_s
    # INTER_CELL_INTERFERENCE contributes via SimState._extra_interference_mw
    return state


# ---------------------------------------------------------------------------
# labels and the timeline driver


@dataclass(frozen=True)
class FaultLabel:
    bs_id: int
    time_bin: int
    kind: str
    is_anomalous: bool = True


def fault_labels(spec: ScenarioSpec) -> list[FaultLabel]:
    """Ground-truth (site, second-bin) anomaly marks for a spec's faults."""
    labels: dict[tuple[int, int], str] = {}
    for f in spec.faults:
        site = spec.cell_site(f.target_cell)
        for b in range(int(math.floor(f.start_s)), int(math.ceil(f.end_s))):
            labels.setdefault((site, b), f.kind.value)
    return [
        FaultLabel(bs_id=site, time_bin=b, kind=kind)
        for (site, b), kind in sorted(labels.items())
    ]


@dataclass
class TimelineResult:
    spec: ScenarioSpec
    ue_series: "UeSeries"
    handovers: list[HandoverEvent]
    labels: list[FaultLabel]
    refused_handovers: int
    ticks: int
    tick_blocks: list[dict] | None = None  # raw per-tick samples when kept


def run_timeline(spec: ScenarioSpec, seed: int | None = None, dt: float = DEFAULT_TICK_S,
                 deployment: Deployment | None = None,
                 keep_ticks: bool = False) -> TimelineResult:
    """Run the time-stepped simulation for ``spec.simulation_time_s``.

    Emits one KPI sample per UE per tick into a streaming 1 s binner
    (``keep_ticks=True`` additionally retains the raw per-tick blocks, for
    tests and small runs), plus the handover log and ground-truth fault
    labels.
    """
    from .dataset import StreamingBinner  # local import to avoid a cycle

    state = SimState(spec, seed=seed, deployment=deployment, dt=dt)
    n_ticks = int(round(spec.simulation_time_s / dt))
    binner = StreamingBinner(
        n_ue=state.n_ue, sim_time_s=spec.simulation_time_s, kpis=KPI_COLUMNS
    )
    blocks = [] if keep_ticks else None
    for k in range(n_ticks):
        if k > 0:
            state.step(dt)
        block = state.sample()
        binner.add_block(block)
        if keep_ticks:
            blocks.append(block)
    return TimelineResult(
        spec=spec,
        ue_series=binner.finish(),
        handovers=state.handovers,
        labels=fault_labels(spec),
        refused_handovers=state.refused_handovers,
        ticks=n_ticks,
        tick_blocks=blocks,
    )
