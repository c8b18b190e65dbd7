"""Hexagonal multi-site layouts, tri-sector cells, UE drops, background cells.

All randomness flows through an explicitly passed numpy Generator so that the
same seed reproduces the same deployment bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .params import EnvironmentParams


@dataclass
class Site:
    id: int
    position: np.ndarray  # (2,) meters
    antenna_height_m: float


@dataclass
class Cell:
    id: int
    site_id: int
    azimuth_deg: float
    tx_power_dbm: float
    carrier_frequency_ghz: float
    bandwidth_mhz: float
    hysteresis_db: float
    time_to_trigger_s: float


@dataclass
class Ue:
    id: int
    position: np.ndarray  # (2,) meters
    height_m: float
    indoor: bool
    penetration_class: str  # "low" | "high"
    speed_kmh: float
    drop_site: int
    serving_cell: int | None = None
    waypoint: np.ndarray | None = None


@dataclass
class BackgroundCell:
    id: int
    position: np.ndarray
    users: list[np.ndarray] = field(default_factory=list)


@dataclass
class Deployment:
    sites: list[Site]
    cells: list[Cell]
    ues: list[Ue]
    background_cells: list[BackgroundCell]

    def site_positions(self) -> np.ndarray:
        return np.array([s.position for s in self.sites], dtype=float).reshape(len(self.sites), 2)

    def ue_positions(self) -> np.ndarray:
        return np.array([u.position for u in self.ues], dtype=float).reshape(len(self.ues), 2)


def hex_layout(ring_count: int, isd: float) -> list[Site]:
    """Sites on a hexagonal lattice: a center plus ``ring_count`` rings.

    Ring r contributes 6r sites, so the total is 1 + 3*r*(r+1). Neighboring
    sites are exactly ``isd`` apart. Axial coordinates (q, r) map to the
    plane with basis vectors of length isd at 0 and 120 degrees.
    """
    if ring_count < 0:
        raise ValueError("ring_count must be >= 0")
    if isd <= 0:
        raise ValueError("isd must be > 0")
    coords: list[tuple[int, int]] = [(0, 0)]
    for ring in range(1, ring_count + 1):
        q, r = ring, 0
        # walk the six edges of the ring in axial space
        for dq, dr in ((-1, 1), (-1, 0), (0, -1), (1, -1), (1, 0), (0, 1)):
            for _ in range(ring):
                coords.append((q, r))
                q += dq
                r += dr
    sites = []
    for i, (q, r) in enumerate(coords):
        x = isd * (q + r / 2.0)
        y = isd * (r * math.sqrt(3.0) / 2.0)
        sites.append(Site(id=i, position=np.array([x, y]), antenna_height_m=0.0))
    return sites


def sectorize(sites: list[Site], azimuths, params: EnvironmentParams) -> list[Cell]:
    """One cell per (site, azimuth), radio defaults from the environment."""
    if not len(azimuths):
        raise ValueError("azimuths must be non-empty")
    cells = []
    cid = 0
    for site in sites:
        for az in azimuths:
            cells.append(
                Cell(
                    id=cid,
                    site_id=site.id,
                    azimuth_deg=float(az) % 360.0,
                    tx_power_dbm=params.bs_tx_power_dbm,
                    carrier_frequency_ghz=params.carrier_frequency_ghz,
                    bandwidth_mhz=params.bandwidth_mhz,
                    hysteresis_db=params.hysteresis_db,
                    time_to_trigger_s=params.time_to_trigger_s,
                )
            )
            cid += 1
    return cells


def ue_height(rng: np.random.Generator) -> float:
    """Indoor user antenna height from the two-stage floor draw.

    The building's floor count is a discrete uniform on 4..8, the user's
    floor a discrete uniform on 1..that count, and the height is
    3*(floor - 1) + 1.5 m, so the support is {1.5, 4.5, ..., 22.5}.
    """
    n_floors = int(rng.integers(4, 9))
    floor = int(rng.integers(1, n_floors + 1))
    return 3.0 * (floor - 1) + 1.5


def drop_ues(
    site: Site,
    count: int,
    min_d: float,
    max_d: float,
    params: EnvironmentParams,
    rng: np.random.Generator,
    id_start: int = 0,
) -> list[Ue]:
    """Drop ``count`` UEs uniformly (by area) in the annulus around a site.

    Indoor/outdoor and penetration class follow the environment's fractions;
    indoor users get a floor-based height and the indoor walking speed,
    outdoor users the 1.5 m height and the outdoor vehicular speed.
    """
    if max_d <= min_d:
        raise ValueError("max_d must exceed min_d")
    ues = []
    for k in range(count):
        u = rng.random()
        radius = math.sqrt(u * (max_d * max_d - min_d * min_d) + min_d * min_d)
        theta = rng.random() * 2.0 * math.pi
        pos = site.position + radius * np.array([math.cos(theta), math.sin(theta)])
        indoor = rng.random() < params.indoor_fraction
        high_loss = rng.random() < params.high_loss_fraction
        height = ue_height(rng) if indoor else params.outdoor_ue_height_m
        speed = params.speed_indoor_kmh if indoor else params.speed_outdoor_kmh
        ues.append(
            Ue(
                id=id_start + k,
                position=pos,
                height_m=height,
                indoor=indoor,
                penetration_class="high" if high_loss else "low",
                speed_kmh=speed,
                drop_site=site.id,
            )
        )
    return ues


def place_background(decl, params: EnvironmentParams, rng: np.random.Generator) -> list[BackgroundCell]:
    """Background cells and their users, uniform within the declared area."""
    cells: list[BackgroundCell] = []
    if decl.cell_count == 0:
        return cells
    x0, y0, x1, y1 = decl.area
    for i in range(decl.cell_count):
        pos = np.array([x0 + rng.random() * (x1 - x0), y0 + rng.random() * (y1 - y0)])
        users = [
            np.array([x0 + rng.random() * (x1 - x0), y0 + rng.random() * (y1 - y0)])
            for _ in range(decl.users_per_cell)
        ]
        cells.append(BackgroundCell(id=i, position=pos, users=users))
    return cells


def build_deployment(spec, rng: np.random.Generator) -> Deployment:
    """Concrete world for a spec: sites, cells, UE drops, background cells.

    Consumes the generator in a fixed order (sites in declaration order,
    then background), so equal seeds give bitwise-equal deployments.
    """
    params = spec.params
    sites = [
        Site(id=i, position=np.array(decl.position, dtype=float), antenna_height_m=params.bs_height_m)
        for i, decl in enumerate(spec.sites)
    ]
    cells: list[Cell] = []
    cid = 0
    for site, decl in zip(sites, spec.sites):
        for az in decl.sector_azimuths:
            cells.append(
                Cell(
                    id=cid,
                    site_id=site.id,
                    azimuth_deg=float(az) % 360.0,
                    tx_power_dbm=params.bs_tx_power_dbm,
                    carrier_frequency_ghz=params.carrier_frequency_ghz,
                    bandwidth_mhz=params.bandwidth_mhz,
                    hysteresis_db=params.hysteresis_db,
                    time_to_trigger_s=params.time_to_trigger_s,
                )
            )
            cid += 1
    ues: list[Ue] = []
    for site, decl in zip(sites, spec.sites):
        n = spec.users_per_sector * decl.sector_count
        ues.extend(
            drop_ues(
                site,
                n,
                params.min_ue_distance_m,
                spec.max_ue_distance_m,
                params,
                rng,
                id_start=len(ues),
            )
        )
    background = place_background(spec.background, params, rng)
    return Deployment(sites=sites, cells=cells, ues=ues, background_cells=background)


def inner_sites(sites: list[Site], count: int) -> list[int]:
    """The ``count`` sites closest to the layout centroid (KPI collection set)."""
    if len(sites) <= count:
        return [s.id for s in sites]
    pos = np.array([s.position for s in sites])
    centroid = pos.mean(axis=0)
    d = np.hypot(pos[:, 0] - centroid[0], pos[:, 1] - centroid[1])
    order = sorted(range(len(sites)), key=lambda i: (d[i], i))
    return sorted(order[:count])


def adjacency_pairs(sites: list[Site], tolerance_m: float = 1.0) -> list[tuple[int, int]]:
    """Nearest-neighbor site pairs: distance within tolerance of the minimum."""
    n = len(sites)
    if n < 2:
        return []
    pos = np.array([s.position for s in sites])
    dx = pos[:, None, 0] - pos[None, :, 0]
    dy = pos[:, None, 1] - pos[None, :, 1]
    dist = np.hypot(dx, dy)
    np.fill_diagonal(dist, np.inf)
    nn = dist.min()
    pairs = []
    for a in range(n):
        for b in range(a + 1, n):
            if dist[a, b] <= nn + tolerance_m:
                pairs.append((a, b))
    return pairs


def deployment_csv(deployment: Deployment) -> str:
    """Entity dump: entity_type, id, x, y, height, attrs."""
    lines = ["entity_type,id,x_m,y_m,height_m,attrs"]
    for s in deployment.sites:
        lines.append(f"site,{s.id},{s.position[0]!r},{s.position[1]!r},{s.antenna_height_m!r},")
    for c in deployment.cells:
        lines.append(
            f"cell,{c.id},,,,site={c.site_id};azimuth_deg={c.azimuth_deg!r};tx_power_dbm={c.tx_power_dbm!r}"
        )
    for u in deployment.ues:
        attrs = (
            f"indoor={'true' if u.indoor else 'false'};penetration={u.penetration_class};"
            f"speed_kmh={u.speed_kmh!r};drop_site={u.drop_site}"
        )
        lines.append(f"ue,{u.id},{u.position[0]!r},{u.position[1]!r},{u.height_m!r},{attrs}")
    for b in deployment.background_cells:
        lines.append(f"background_cell,{b.id},{b.position[0]!r},{b.position[1]!r},,")
        for j, pos in enumerate(b.users):
            lines.append(f"background_ue,{b.id}.{j},{pos[0]!r},{pos[1]!r},,")
    return "\n".join(lines) + "\n"
