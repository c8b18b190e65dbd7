"""Scenario parsing, X2 expansion, and long-form configuration emission.

A scenario is a compact YAML document naming the environment, site layout,
user counts, X2 policy, background entities, KPI selection, and fault
schedule. Parsing fills every environment default, validates all invariants,
and yields a :class:`ScenarioSpec` that the topology and engine modules
consume. :func:`emit_config` expands the spec plus a concrete deployment
into a long-form ini-style file (one stanza per sector, UE, X2 port, and
background entity) so the compression factor of the compact input is
auditable.

YAML schema (top-level keys)::

    environment: urban_embb | rural_embb
    simulation_time_s: <seconds, default 600>
    seed: <unsigned int; may instead come from the CLI --seed flag>
    sites: [{x, y, sectors?, azimuths?}, ...]
    x2: all-to-all | [[i, j], ...]
    users: {per_sector?, max_distance_m?}
    background: {cells?, users_per_cell?, area: {x0, y0, x1, y1}}
    kpis: [rsrp, rsrq, sinr, coupling_gain, serving_distance, position]
    faults: [{type, cell, start_s, end_s, magnitude_db? |
              hysteresis_db? + ttt_s?}, ...]

Unknown keys are hard errors: scenario files are contracts, and a typo that
silently falls back to a default is worse than a refusal. The grammar is a
reconstruction of the fragments circulating for this style of tool; it is
documented in full in the README precisely because no complete published
grammar exists.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import yaml

from .errors import IoError, SchemaError, ValidationError
from .params import (
    DEFAULT_SECTOR_AZIMUTHS_DEG,
    EnvironmentParams,
    ENVIRONMENTS,
    environment_params,
)

DEFAULT_SIMULATION_TIME_S = 600.0

KPI_NAMES = ("rsrp", "rsrq", "sinr", "coupling_gain", "serving_distance", "position")


class FaultKind(str, enum.Enum):
    TOO_LATE_HANDOVER = "too_late_handover"
    EXCESSIVE_POWER_REDUCTION = "excessive_power_reduction"
    INTER_CELL_INTERFERENCE = "inter_cell_interference"


# Demonstration defaults for fault magnitudes; none of these are
# standard-mandated values and all can be overridden per fault in YAML.
DEFAULT_POWER_DROP_DB = 20.0
DEFAULT_FAULT_HYSTERESIS_DB = 9.0
DEFAULT_FAULT_TTT_S = 1.0
DEFAULT_INTERFERENCE_POWER_DBM = -90.0

MAX_ANOMALY_FRACTION = 0.02


@dataclass(frozen=True)
class SiteDecl:
    position: tuple[float, float]
    sector_count: int
    sector_azimuths: tuple[float, ...]


@dataclass(frozen=True)
class BackgroundDecl:
    cell_count: int = 0
    users_per_cell: int = 10
    area: tuple[float, float, float, float] | None = None  # x0, y0, x1, y1


@dataclass(frozen=True)
class FaultSpec:
    kind: FaultKind
    target_cell: int
    start_s: float
    end_s: float
    power_drop_db: float | None = None
    hysteresis_db: float | None = None
    ttt_s: float | None = None
    interference_power_dbm: float | None = None


@dataclass(frozen=True)
class X2Policy:
    """Either every site pair (all-to-all) or an explicit unordered pair list."""

    all_to_all: bool
    pairs: tuple[tuple[int, int], ...] = ()


@dataclass(frozen=True)
class ScenarioSpec:
    environment: str
    params: EnvironmentParams
    simulation_time_s: float
    sites: tuple[SiteDecl, ...]
    x2: X2Policy
    users_per_sector: int
    max_ue_distance_m: float
    background: BackgroundDecl
    kpis: frozenset[str]
    faults: tuple[FaultSpec, ...]
    seed: int

    @property
    def total_cells(self) -> int:
        return sum(s.sector_count for s in self.sites)

    def cell_site(self, cell_id: int) -> int:
        """Site index owning a cell id (cells are numbered site-major)."""
        first = 0
        for i, s in enumerate(self.sites):
            if cell_id < first + s.sector_count:
                return i
            first += s.sector_count
        raise IndexError(f"cell id {cell_id} out of range")


@dataclass(frozen=True)
class X2Plan:
    links: tuple[tuple[int, int], ...]
    port_map: dict[int, tuple[tuple[int, int], ...]] = field(hash=False, default_factory=dict)

    def degree(self, site: int) -> int:
        return len(self.port_map.get(site, ()))


# ---------------------------------------------------------------------------
# parse helpers


def _expect_map(node, path, allowed):
    if not isinstance(node, dict):
        raise SchemaError(f"expected a mapping, got {type(node).__name__}", path)
    for key in node:
        if key not in allowed:
            raise SchemaError(f"unknown key {key!r}", f"{path}.{key}" if path else str(key))
    return node


def _expect_number(value, path, *, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"expected a number, got {type(value).__name__}", path)
    if integer:
        if isinstance(value, float) and not value.is_integer():
            raise SchemaError("expected an integer", path)
        return int(value)
    return float(value)


def _expect_list(value, path):
    if not isinstance(value, list):
        raise SchemaError(f"expected a list, got {type(value).__name__}", path)
    return value


def _parse_site(node, path) -> SiteDecl:
    _expect_map(node, path, {"x", "y", "sectors", "azimuths"})
    for req in ("x", "y"):
        if req not in node:
            raise SchemaError(f"missing required key {req!r}", path)
    x = _expect_number(node["x"], f"{path}.x")
    y = _expect_number(node["y"], f"{path}.y")
    sectors = _expect_number(node.get("sectors", 3), f"{path}.sectors", integer=True)
    if sectors not in (1, 2, 3):
        raise ValidationError(f"sectors must be 1, 2 or 3, got {sectors}", f"{path}.sectors")
    if "azimuths" in node:
        raw = _expect_list(node["azimuths"], f"{path}.azimuths")
        azimuths = tuple(_expect_number(a, f"{path}.azimuths[{i}]") for i, a in enumerate(raw))
    else:
        azimuths = DEFAULT_SECTOR_AZIMUTHS_DEG[:sectors]
    if len(azimuths) != sectors:
        raise ValidationError(
            f"azimuths length {len(azimuths)} != sectors {sectors}", f"{path}.azimuths"
        )
    for i, a in enumerate(azimuths):
        if not (0.0 <= a < 360.0):
            raise ValidationError(f"azimuth {a} outside [0, 360)", f"{path}.azimuths[{i}]")
    return SiteDecl(position=(x, y), sector_count=sectors, sector_azimuths=azimuths)


def _parse_x2(node, n_sites, path) -> X2Policy:
    if node is None or node == "all-to-all":
        return X2Policy(all_to_all=True)
    raw = _expect_list(node, path)
    seen = set()
    pairs = []
    for i, entry in enumerate(raw):
        p = f"{path}[{i}]"
        entry = _expect_list(entry, p)
        if len(entry) != 2:
            raise SchemaError("an x2 pair must have exactly two site indices", p)
        a = _expect_number(entry[0], f"{p}[0]", integer=True)
        b = _expect_number(entry[1], f"{p}[1]", integer=True)
        if not (0 <= a < n_sites and 0 <= b < n_sites):
            raise ValidationError(f"pair ({a}, {b}) references an undeclared site", p)
        if a == b:
            raise ValidationError(f"self-pair ({a}, {b}) not allowed", p)
        key = (min(a, b), max(a, b))
        if key in seen:
            raise ValidationError(f"duplicate pair ({a}, {b})", p)
        seen.add(key)
        pairs.append(key)
    return X2Policy(all_to_all=False, pairs=tuple(pairs))


def _parse_background(node, path) -> BackgroundDecl:
    if node is None:
        return BackgroundDecl()
    _expect_map(node, path, {"cells", "users_per_cell", "area"})
    cells = _expect_number(node.get("cells", 0), f"{path}.cells", integer=True)
    users = _expect_number(node.get("users_per_cell", 10), f"{path}.users_per_cell", integer=True)
    if cells < 0:
        raise ValidationError("cells must be >= 0", f"{path}.cells")
    if users < 0:
        raise ValidationError("users_per_cell must be >= 0", f"{path}.users_per_cell")
    area = None
    if "area" in node and node["area"] is not None:
        amap = _expect_map(node["area"], f"{path}.area", {"x0", "y0", "x1", "y1"})
        vals = []
        for k in ("x0", "y0", "x1", "y1"):
            if k not in amap:
                raise SchemaError(f"missing required key {k!r}", f"{path}.area")
            vals.append(_expect_number(amap[k], f"{path}.area.{k}"))
        area = tuple(vals)
    if cells > 0:
        if area is None:
            raise ValidationError("background cells declared without an area", f"{path}.area")
        if not (area[2] > area[0] and area[3] > area[1]):
            raise ValidationError("background area must have positive width and height", f"{path}.area")
    return BackgroundDecl(cell_count=cells, users_per_cell=users, area=area)


def _parse_fault(node, index, sim_time, total_cells, params: EnvironmentParams) -> FaultSpec:
    path = f"faults[{index}]"
    _expect_map(node, path, {"type", "cell", "start_s", "end_s", "magnitude_db", "hysteresis_db", "ttt_s"})
    for req in ("type", "cell", "start_s", "end_s"):
        if req not in node:
            raise SchemaError(f"missing required key {req!r}", path)
    kind_raw = node["type"]
    try:
        kind = FaultKind(kind_raw)
    except ValueError:
        raise SchemaError(
            f"unknown fault type {kind_raw!r}; expected one of {[k.value for k in FaultKind]}",
            f"{path}.type",
        )
    cell = _expect_number(node["cell"], f"{path}.cell", integer=True)
    if not (0 <= cell < total_cells):
        raise ValidationError(f"cell {cell} not in [0, {total_cells})", f"{path}.cell")
    start = _expect_number(node["start_s"], f"{path}.start_s")
    end = _expect_number(node["end_s"], f"{path}.end_s")
    if not (0.0 <= start < end <= sim_time):
        raise ValidationError(
            f"window [{start}, {end}] must satisfy 0 <= start < end <= simulation_time ({sim_time})",
            path,
        )

    power_drop = hysteresis = ttt = interference = None
    if kind is FaultKind.EXCESSIVE_POWER_REDUCTION:
        power_drop = _expect_number(node.get("magnitude_db", DEFAULT_POWER_DROP_DB), f"{path}.magnitude_db")
        if power_drop <= 0:
            raise ValidationError("power drop must be > 0 dB", f"{path}.magnitude_db")
        _reject_keys(node, path, ("hysteresis_db", "ttt_s"))
    elif kind is FaultKind.INTER_CELL_INTERFERENCE:
        interference = _expect_number(
            node.get("magnitude_db", DEFAULT_INTERFERENCE_POWER_DBM), f"{path}.magnitude_db"
        )
        _reject_keys(node, path, ("hysteresis_db", "ttt_s"))
    else:  # too-late handover
        _reject_keys(node, path, ("magnitude_db",))
        hysteresis = _expect_number(node.get("hysteresis_db", DEFAULT_FAULT_HYSTERESIS_DB), f"{path}.hysteresis_db")
        ttt = _expect_number(node.get("ttt_s", DEFAULT_FAULT_TTT_S), f"{path}.ttt_s")
        if hysteresis <= params.hysteresis_db:
            raise ValidationError(
                f"faulty hysteresis {hysteresis} dB must exceed the baseline {params.hysteresis_db} dB",
                f"{path}.hysteresis_db",
            )
        if ttt <= params.time_to_trigger_s:
            raise ValidationError(
                f"faulty time-to-trigger {ttt} s must exceed the baseline {params.time_to_trigger_s} s",
                f"{path}.ttt_s",
            )
    return FaultSpec(
        kind=kind,
        target_cell=cell,
        start_s=start,
        end_s=end,
        power_drop_db=power_drop,
        hysteresis_db=hysteresis,
        ttt_s=ttt,
        interference_power_dbm=interference,
    )


def _reject_keys(node, path, keys):
    for k in keys:
        if k in node:
            raise SchemaError(f"key {k!r} does not apply to this fault type", f"{path}.{k}")


def _validate_anomaly_budget(faults, sites, sim_time, spec_side_cells):
    """Labeled (site, second-bin) pairs must stay <= 2% of the grid."""
    n_sites = len(sites)
    n_bins = max(1, math.ceil(sim_time))
    labeled: set[tuple[int, int]] = set()
    first = 0
    cell_site = []
    for i, s in enumerate(sites):
        cell_site.extend([i] * s.sector_count)
        first += s.sector_count
    for f in faults:
        site = cell_site[f.target_cell]
        for b in range(int(math.floor(f.start_s)), int(math.ceil(f.end_s))):
            labeled.add((site, b))
    fraction = len(labeled) / (n_sites * n_bins)
    if fraction > MAX_ANOMALY_FRACTION:
        raise ValidationError(
            f"fault windows label {fraction:.4f} of (site, second) bins; the budget is "
            f"{MAX_ANOMALY_FRACTION:.2f}",
            "faults",
        )


# ---------------------------------------------------------------------------
# public operations


TOP_LEVEL_KEYS = {
    "environment", "simulation_time_s", "seed", "sites", "x2", "users",
    "background", "kpis", "faults",
}


def parse_scenario(yaml_text: str, *, seed_override: int | None = None) -> ScenarioSpec:
    """Parse and validate a YAML scenario into a fully-defaulted ScenarioSpec.

    Raises SchemaError for structural problems (unknown keys, wrong types)
    and ValidationError for invariant violations; both carry the offending
    key path. ``seed_override`` substitutes for the document's ``seed`` key
    (a seed must come from one of the two).
    """
    try:
        doc = yaml.safe_load(yaml_text)
    except yaml.YAMLError as exc:
        raise SchemaError(f"not valid YAML: {exc}")
    if doc is None:
        raise SchemaError("empty scenario document")
    _expect_map(doc, "", TOP_LEVEL_KEYS)

    if "environment" not in doc:
        raise SchemaError("missing required key 'environment'")
    env_name = doc["environment"]
    if env_name not in ENVIRONMENTS:
        raise SchemaError(
            f"unknown environment {env_name!r}; expected one of {sorted(ENVIRONMENTS)}",
            "environment",
        )
    params = environment_params(env_name)

    sim_time = _expect_number(doc.get("simulation_time_s", DEFAULT_SIMULATION_TIME_S), "simulation_time_s")
    if sim_time <= 0:
        raise ValidationError("simulation_time_s must be > 0", "simulation_time_s")

    if seed_override is not None:
        seed = int(seed_override)
    elif "seed" in doc:
        seed = _expect_number(doc["seed"], "seed", integer=True)
    else:
        raise ValidationError("a seed is required (set 'seed' in the file or pass --seed)", "seed")
    if seed < 0:
        raise ValidationError("seed must be a non-negative integer", "seed")

    raw_sites = _expect_list(doc.get("sites"), "sites") if "sites" in doc else None
    if not raw_sites:
        raise SchemaError("at least one site must be declared", "sites")
    sites = tuple(_parse_site(s, f"sites[{i}]") for i, s in enumerate(raw_sites))

    x2 = _parse_x2(doc.get("x2"), len(sites), "x2")

    users_node = doc.get("users")
    users_per_sector = params.users_per_sector
    max_distance = params.max_ue_distance_m
    if users_node is not None:
        _expect_map(users_node, "users", {"per_sector", "max_distance_m"})
        if "per_sector" in users_node:
            users_per_sector = _expect_number(users_node["per_sector"], "users.per_sector", integer=True)
        if "max_distance_m" in users_node:
            max_distance = _expect_number(users_node["max_distance_m"], "users.max_distance_m")
    if users_per_sector < 0:
        raise ValidationError("users.per_sector must be >= 0", "users.per_sector")
    if max_distance <= params.min_ue_distance_m:
        raise ValidationError(
            f"users.max_distance_m must exceed the minimum UE-BS distance ({params.min_ue_distance_m} m)",
            "users.max_distance_m",
        )

    background = _parse_background(doc.get("background"), "background")

    if "kpis" in doc and doc["kpis"] is not None:
        raw_kpis = _expect_list(doc["kpis"], "kpis")
        for i, k in enumerate(raw_kpis):
            if k not in KPI_NAMES:
                raise SchemaError(f"unknown kpi {k!r}; expected one of {list(KPI_NAMES)}", f"kpis[{i}]")
        kpis = frozenset(raw_kpis)
        if not kpis:
            raise ValidationError("kpis list must not be empty when present", "kpis")
    else:
        kpis = frozenset(KPI_NAMES)

    total_cells = sum(s.sector_count for s in sites)
    raw_faults = doc.get("faults") or []
    raw_faults = _expect_list(raw_faults, "faults")
    faults = tuple(
        _parse_fault(f, i, sim_time, total_cells, params) for i, f in enumerate(raw_faults)
    )
    if faults:
        _validate_anomaly_budget(faults, sites, sim_time, total_cells)

    return ScenarioSpec(
        environment=env_name,
        params=params,
        simulation_time_s=sim_time,
        sites=sites,
        x2=x2,
        users_per_sector=users_per_sector,
        max_ue_distance_m=max_distance,
        background=background,
        kpis=kpis,
        faults=faults,
        seed=seed,
    )


def expand_x2(spec: ScenarioSpec) -> X2Plan:
    """Expand the X2 policy into concrete links and per-site port tables.

    Ports are numbered per site starting from 0, assigned in ascending
    peer-site order, so a site's port count equals its degree in the link
    graph.
    """
    n = len(spec.sites)
    if spec.x2.all_to_all:
        links = tuple((a, b) for a in range(n) for b in range(a + 1, n))
    else:
        links = tuple(sorted(spec.x2.pairs))
    peers: dict[int, list[int]] = {i: [] for i in range(n)}
    for a, b in links:
        peers[a].append(b)
        peers[b].append(a)
    port_map = {
        site: tuple((port, peer) for port, peer in enumerate(sorted(ps)))
        for site, ps in peers.items()
    }
    return X2Plan(links=links, port_map=port_map)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_config(spec: ScenarioSpec, plan: X2Plan, deployment) -> str:
    """Expand (spec, plan, deployment) into the long-form configuration text.

    The output is a deterministic function of the spec and its seed: one
    ``[section]`` stanza per sector, per UE initial position, per X2 port,
    and per background entity, preceded by the full resolved parameter set.
    """
    p = spec.params
    out: list[str] = []
    w = out.append
    w("[general]")
    w(f"environment = {spec.environment}")
    w(f"seed = {spec.seed}")
    w(f"simulation_time_s = {_fmt(float(spec.simulation_time_s))}")
    w(f"carrier_frequency_ghz = {_fmt(p.carrier_frequency_ghz)}")
    w(f"bandwidth_mhz = {_fmt(p.bandwidth_mhz)}")
    w(f"propagation_model = {p.propagation}")
    w(f"bs_antenna_height_m = {_fmt(p.bs_height_m)}")
    w(f"bs_tx_power_dbm = {_fmt(p.bs_tx_power_dbm)}")
    w(f"ue_tx_power_dbm = {_fmt(p.ue_tx_power_dbm)}")
    w(f"bs_element_gain_dbi = {_fmt(p.bs_element_gain_dbi)}")
    w(f"ue_antenna_gain_dbi = {_fmt(p.ue_antenna_gain_dbi)}")
    w(f"bs_noise_figure_db = {_fmt(p.bs_noise_figure_db)}")
    w(f"ue_noise_figure_db = {_fmt(p.ue_noise_figure_db)}")
    w(f"thermal_noise_dbm = {_fmt(p.thermal_noise_dbm)}")
    w(f"indoor_fraction = {_fmt(p.indoor_fraction)}")
    w(f"high_loss_fraction = {_fmt(p.high_loss_fraction)}")
    w(f"ue_speed_indoor_kmh = {_fmt(p.speed_indoor_kmh)}")
    w(f"ue_speed_outdoor_kmh = {_fmt(p.speed_outdoor_kmh)}")
    w(f"min_ue_distance_m = {_fmt(p.min_ue_distance_m)}")
    w(f"max_ue_distance_m = {_fmt(float(spec.max_ue_distance_m))}")
    w(f"building_height_m = {_fmt(p.building_height_m)}")
    w(f"street_width_m = {_fmt(p.street_width_m)}")
    w(f"mobility_model = random_waypoint")
    w(f"traffic_model = full_buffer")
    w(f"hysteresis_db = {_fmt(p.hysteresis_db)}")
    w(f"time_to_trigger_s = {_fmt(p.time_to_trigger_s)}")
    w(f"kpi_site_count = {p.kpi_site_count}")
    w(f"kpis = {','.join(sorted(spec.kpis))}")
    w("")

    for site in deployment.sites:
        w(f"[site {site.id}]")
        w(f"x_m = {_fmt(float(site.position[0]))}")
        w(f"y_m = {_fmt(float(site.position[1]))}")
        w(f"antenna_height_m = {_fmt(site.antenna_height_m)}")
        w("")

    for cell in deployment.cells:
        w(f"[cell {cell.id}]")
        w(f"site = {cell.site_id}")
        w(f"azimuth_deg = {_fmt(cell.azimuth_deg)}")
        w(f"tx_power_dbm = {_fmt(cell.tx_power_dbm)}")
        w(f"carrier_frequency_ghz = {_fmt(cell.carrier_frequency_ghz)}")
        w(f"bandwidth_mhz = {_fmt(cell.bandwidth_mhz)}")
        w(f"hysteresis_db = {_fmt(cell.hysteresis_db)}")
        w(f"time_to_trigger_s = {_fmt(cell.time_to_trigger_s)}")
        w("")

    for site_id in sorted(plan.port_map):
        for port, peer in plan.port_map[site_id]:
            w(f"[x2 site {site_id} port {port}]")
            w(f"peer_site = {peer}")
            w("")

    for ue in deployment.ues:
        w(f"[ue {ue.id}]")
        w(f"x_m = {_fmt(float(ue.position[0]))}")
        w(f"y_m = {_fmt(float(ue.position[1]))}")
        w(f"height_m = {_fmt(ue.height_m)}")
        w(f"indoor = {_fmt(ue.indoor)}")
        w(f"penetration = {ue.penetration_class}")
        w(f"speed_kmh = {_fmt(ue.speed_kmh)}")
        w(f"drop_site = {ue.drop_site}")
        w("")

    for bg in deployment.background_cells:
        w(f"[background_cell {bg.id}]")
        w(f"x_m = {_fmt(float(bg.position[0]))}")
        w(f"y_m = {_fmt(float(bg.position[1]))}")
        w(f"tx_power_dbm = {_fmt(p.background_tx_power_dbm)}")
        w("")
        for j, pos in enumerate(bg.users):
            w(f"[background_ue {bg.id}.{j}]")
            w(f"x_m = {_fmt(float(pos[0]))}")
            w(f"y_m = {_fmt(float(pos[1]))}")
            w("")

    for i, f in enumerate(spec.faults):
        w(f"[fault {i}]")
        w(f"type = {f.kind.value}")
        w(f"cell = {f.target_cell}")
        w(f"start_s = {_fmt(f.start_s)}")
        w(f"end_s = {_fmt(f.end_s)}")
        if f.power_drop_db is not None:
            w(f"power_drop_db = {_fmt(f.power_drop_db)}")
        if f.hysteresis_db is not None:
            w(f"hysteresis_db = {_fmt(f.hysteresis_db)}")
        if f.ttt_s is not None:
            w(f"ttt_s = {_fmt(f.ttt_s)}")
        if f.interference_power_dbm is not None:
            w(f"interference_power_dbm = {_fmt(f.interference_power_dbm)}")
        w("")

    return "\n".join(out)


def write_config(text: str, path) -> None:
    """Write emitted configuration text; wraps OS failures in IoError."""
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write configuration to {path}: {exc}") from exc


def scenario_to_yaml(spec: ScenarioSpec) -> str:
    """Serialize a spec back to its canonical YAML form (round-trippable)."""
    lines: list[str] = []
    lines.append(f"environment: {spec.environment}")
    lines.append(f"simulation_time_s: {_fmt(float(spec.simulation_time_s))}")
    lines.append(f"seed: {spec.seed}")
    lines.append("sites:")
    for s in spec.sites:
        az = ", ".join(_fmt(a) for a in s.sector_azimuths)
        lines.append(
            f"- {{x: {_fmt(s.position[0])}, y: {_fmt(s.position[1])}, "
            f"sectors: {s.sector_count}, azimuths: [{az}]}}"
        )
    if spec.x2.all_to_all:
        lines.append("x2: all-to-all")
    else:
        lines.append("x2:")
        for a, b in spec.x2.pairs:
            lines.append(f"- [{a}, {b}]")
    lines.append(
        f"users: {{per_sector: {spec.users_per_sector}, "
        f"max_distance_m: {_fmt(float(spec.max_ue_distance_m))}}}"
    )
    bg = spec.background
    if bg.cell_count > 0:
        x0, y0, x1, y1 = bg.area
        lines.append(
            f"background: {{cells: {bg.cell_count}, users_per_cell: {bg.users_per_cell}, "
            f"area: {{x0: {_fmt(x0)}, y0: {_fmt(y0)}, x1: {_fmt(x1)}, y1: {_fmt(y1)}}}}}"
        )
    lines.append(f"kpis: [{', '.join(sorted(spec.kpis))}]")
    if spec.faults:
        lines.append("faults:")
        for f in spec.faults:
            extra = ""
            if f.kind is FaultKind.EXCESSIVE_POWER_REDUCTION:
                extra = f", magnitude_db: {_fmt(f.power_drop_db)}"
            elif f.kind is FaultKind.INTER_CELL_INTERFERENCE:
                extra = f", magnitude_db: {_fmt(f.interference_power_dbm)}"
            else:
                extra = f", hysteresis_db: {_fmt(f.hysteresis_db)}, ttt_s: {_fmt(f.ttt_s)}"
            lines.append(
                f"- {{type: {f.kind.value}, cell: {f.target_cell}, "
                f"start_s: {_fmt(f.start_s)}, end_s: {_fmt(f.end_s)}{extra}}}"
            )
    return "\n".join(lines) + "\n"
