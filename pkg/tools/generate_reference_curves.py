#!/usr/bin/env python3
"""Generate the bundled reference percentile curves.

This script is a deliberately independent, straight-line reimplementation of
the calibration measurement: its own hexagonal grid enumeration, its own UE
sampler, and formula-by-formula transcriptions of the TR 38.901 UMa/RMa path
loss, LOS probability, O2I penetration, and element pattern. It imports
nothing from the ranforge package, so the percentile tables it produces are
an independent route through the same published math. The calibration
acceptance check (KS of the package's output against these tables) is
therefore a dual-implementation distribution test, not a self-comparison.

Run from the repository root:

    python tools/generate_reference_curves.py

writes src/ranforge/reference_data/{urban_embb,rural_embb}/*.csv
"""

import math
import random
from pathlib import Path

C_LIGHT = 299_792_458.0

SCENARIOS = {
    "urban_embb": dict(
        model="uma", isd=200.0, bs_h=25.0, tx_dbm=41.0, max_d=50.0,
        indoor_frac=0.8, high_frac=0.2, building_h=22.5, street_w=20.0,
        noise_dbm=-81.0,
    ),
    "rural_embb": dict(
        model="rma", isd=1732.0, bs_h=35.0, tx_dbm=46.0, max_d=200.0,
        indoor_frac=0.5, high_frac=0.0, building_h=10.0, street_w=20.0,
        noise_dbm=-82.0,
    ),
}

MIN_D = 10.0
FC_GHZ = 4.0
SECTORS = (30.0, 150.0, 270.0)
RINGS = 2
INNER_SITES = 7
USERS_PER_SITE = 30
DROPS = 150
SEED = 987654321


def hex_sites(isd, rings):
    """Ring enumeration in cube coordinates, self-checked for lattice validity."""
    sites = [(0.0, 0.0)]
    for radius in range(1, rings + 1):
        cx, cz = radius, 0  # east corner of the ring; cy is implied
        directions = [(-1, 1), (-1, 0), (0, -1), (1, -1), (1, 0), (0, 1)]
        for dx, dz in directions:
            for _ in range(radius):
                x = isd * (cx + cz / 2.0)
                y = isd * (math.sqrt(3.0) / 2.0) * cz
                sites.append((x, y))
                cx += dx
                cz += dz
    expected = 1 + 3 * rings * (rings + 1)
    assert len(sites) == expected, f"hex walk produced {len(sites)} sites, wanted {expected}"
    assert len({(round(x, 6), round(y, 6)) for x, y in sites}) == expected, "duplicate sites"
    dmin = min(
        math.hypot(a[0] - b[0], a[1] - b[1])
        for i, a in enumerate(sites) for b in sites[i + 1:]
    )
    assert abs(dmin - isd) < 1e-6 * isd, f"nearest-neighbor spacing {dmin} != isd {isd}"
    return sites


def los_prob(model, d2d, ue_h):
    if model == "rma":
        return 1.0 if d2d <= 10.0 else math.exp(-(d2d - 10.0) / 1000.0)
    if d2d <= 18.0:
        return 1.0
    p = 18.0 / d2d + math.exp(-d2d / 63.0) * (1.0 - 18.0 / d2d)
    if ue_h > 13.0:
        c = ((min(ue_h, 23.0) - 13.0) / 10.0) ** 1.5
        p *= 1.0 + c * (5.0 / 4.0) * (d2d / 100.0) ** 3 * math.exp(-d2d / 150.0)
    return min(p, 1.0)


def pl_uma(d2d, d3d, bs_h, ue_h, los):
    h_e = 1.0
    d_bp = 4.0 * (bs_h - h_e) * (ue_h - h_e) * FC_GHZ * 1e9 / C_LIGHT
    if d2d <= d_bp:
        pl_los = 28.0 + 22.0 * math.log10(d3d) + 20.0 * math.log10(FC_GHZ)
    else:
        pl_los = (28.0 + 40.0 * math.log10(d3d) + 20.0 * math.log10(FC_GHZ)
                  - 9.0 * math.log10(d_bp ** 2 + (bs_h - ue_h) ** 2))
    if los:
        return pl_los
    pl_nlos = 13.54 + 39.08 * math.log10(d3d) + 20.0 * math.log10(FC_GHZ) - 0.6 * (ue_h - 1.5)
    return max(pl_los, pl_nlos)


def pl_rma(d2d, d3d, bs_h, ue_h, los, h, w):
    d_bp = 2.0 * math.pi * bs_h * ue_h * FC_GHZ * 1e9 / C_LIGHT

    def pl1(d):
        return (20.0 * math.log10(40.0 * math.pi * d * FC_GHZ / 3.0)
                + min(0.03 * h ** 1.72, 10.0) * math.log10(d)
                - min(0.044 * h ** 1.72, 14.77)
                + 0.002 * math.log10(h) * d)

    pl_los = pl1(d3d) if d2d <= d_bp else pl1(d_bp) + 40.0 * math.log10(d3d / d_bp)
    if los:
        return pl_los
    pl_nlos = (161.04 - 7.1 * math.log10(w) + 7.5 * math.log10(h)
               - (24.37 - 3.7 * (h / bs_h) ** 2) * math.log10(bs_h)
               + (43.42 - 3.1 * math.log10(bs_h)) * (math.log10(d3d) - 3.0)
               + 20.0 * math.log10(FC_GHZ)
               - (3.2 * math.log10(11.75 * ue_h) ** 2 - 4.97))
    return max(pl_los, pl_nlos)


def o2i_wall_db(high, f):
    glass = 2.0 + 0.2 * f
    iir = 23.0 + 0.3 * f
    concrete = 5.0 + 4.0 * f
    if high:
        mix = 0.7 * 10.0 ** (-iir / 10.0) + 0.3 * 10.0 ** (-concrete / 10.0)
    else:
        mix = 0.3 * 10.0 ** (-glass / 10.0) + 0.7 * 10.0 ** (-concrete / 10.0)
    return 5.0 - 10.0 * math.log10(mix)


def antenna_gain_dbi(az_off_deg, zen_off_deg):
    a = min(12.0 * (az_off_deg / 65.0) ** 2, 30.0)
    z = min(12.0 * (zen_off_deg / 65.0) ** 2, 30.0)
    return 8.0 - min(a + z, 30.0)


def draw_ue_height(rng):
    n_floors = rng.randint(4, 8)
    floor = rng.randint(1, n_floors)
    return 3.0 * (floor - 1) + 1.5


def simulate(env_name, cfg):
    rng = random.Random(SEED + hash(env_name) % 7919)
    sites = hex_sites(cfg["isd"], RINGS)
    cx = sum(s[0] for s in sites) / len(sites)
    cy = sum(s[1] for s in sites) / len(sites)
    by_dist = sorted(range(len(sites)),
                     key=lambda i: math.hypot(sites[i][0] - cx, sites[i][1] - cy))
    inner = set(by_dist[:INNER_SITES])

    sigma = {"uma": {True: 4.0, False: 6.0}, "rma": {True: 4.0, False: 8.0}}[cfg["model"]]
    noise_mw = 10.0 ** (cfg["noise_dbm"] / 10.0)

    cg_samples, sinr_samples = [], []
    for _ in range(DROPS):
        for si, (sx, sy) in enumerate(sites):
            for _ in range(USERS_PER_SITE):
                r = math.sqrt(rng.random() * (cfg["max_d"] ** 2 - MIN_D ** 2) + MIN_D ** 2)
                th = rng.random() * 2.0 * math.pi
                ux, uy = sx + r * math.cos(th), sy + r * math.sin(th)
                indoor = rng.random() < cfg["indoor_frac"]
                high = rng.random() < cfg["high_frac"]
                ue_h = draw_ue_height(rng) if indoor else 1.5
                wall = o2i_wall_db(high, FC_GHZ) if indoor else 0.0

                best_rx, best_cell_site = None, None
                rx_mw_sum = 0.0
                for ti, (tx_x, tx_y) in enumerate(sites):
                    d2d = max(math.hypot(ux - tx_x, uy - tx_y), MIN_D)
                    dh = cfg["bs_h"] - ue_h
                    d3d = math.hypot(d2d, dh)
                    los = rng.random() < los_prob(cfg["model"], d2d, ue_h)
                    if cfg["model"] == "uma":
                        pl = pl_uma(d2d, d3d, cfg["bs_h"], ue_h, los)
                    else:
                        pl = pl_rma(d2d, d3d, cfg["bs_h"], ue_h, los,
                                    cfg["building_h"], cfg["street_w"])
                    shadow = rng.gauss(0.0, sigma[los])
                    depth = rng.random() * min(25.0, d2d) if indoor else 0.0
                    loss = pl + shadow + 0.5 * depth + wall
                    az_to_ue = math.degrees(math.atan2(uy - tx_y, ux - tx_x)) % 360.0
                    zen = math.degrees(math.atan2(dh, d2d))
                    for bore in SECTORS:
                        az_off = (az_to_ue - bore + 180.0) % 360.0 - 180.0
                        rx = cfg["tx_dbm"] + antenna_gain_dbi(az_off, zen) - loss
                        rx_mw_sum += 10.0 ** (rx / 10.0)
                        if best_rx is None or rx > best_rx:
                            best_rx, best_cell_site = rx, ti
                if best_cell_site in inner:
                    s_mw = 10.0 ** (best_rx / 10.0)
                    interf = rx_mw_sum - s_mw
                    sinr = 10.0 * math.log10(s_mw / (interf + noise_mw))
                    cg_samples.append(best_rx - cfg["tx_dbm"])
                    sinr_samples.append(sinr)
    return cg_samples, sinr_samples


def percentile_table(samples):
    xs = sorted(samples)
    n = len(xs)
    rows = []
    for p in range(1, 100):
        # linear interpolation between order statistics (inclusive method)
        pos = (p / 100.0) * (n - 1)
        lo = int(math.floor(pos))
        frac = pos - lo
        v = xs[lo] if lo + 1 >= n else xs[lo] * (1 - frac) + xs[lo + 1] * frac
        rows.append((p, v))
    return rows


def main():
    out_root = Path(__file__).resolve().parent.parent / "src" / "ranforge" / "reference_data"
    for env_name, cfg in SCENARIOS.items():
        cg, sinr = simulate(env_name, cfg)
        print(f"{env_name}: {len(cg)} retained samples")
        env_dir = out_root / env_name
        env_dir.mkdir(parents=True, exist_ok=True)
        for kpi, samples in (("coupling_gain", cg), ("wideband_sinr", sinr)):
            path = env_dir / f"{kpi}.csv"
            with open(path, "w") as fh:
                fh.write("percentile,value_db\n")
                for p, v in percentile_table(samples):
                    fh.write(f"{p},{v:.6f}\n")
            print(f"  wrote {path}")


if __name__ == "__main__":
    main()
