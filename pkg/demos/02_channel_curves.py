"""Propagation model behavior at a glance.

Prints path loss vs distance for the urban (UMa) and rural (RMa) models in
both LOS states, the LOS probability decay, the O2I penetration values, and
a slice of the sector antenna pattern. Pipe the blocks into your plotting
tool of choice; nothing here needs matplotlib.
"""

import numpy as np

from ranforge.channel import (
    LinkGeometry,
    element_gain,
    los_probability,
    path_loss,
    penetration_loss,
)

print("distance_m uma_los uma_nlos rma_los rma_nlos")
for d in np.geomspace(10, 5000, 25):
    row = [f"{d:10.1f}"]
    for env, h_bs, bh in (("uma", 25.0, 22.5), ("rma", 35.0, 10.0)):
        geom = LinkGeometry(d2d=float(d), d3d=float(np.hypot(d, h_bs - 1.5)),
                            bs_height=h_bs, ue_height=1.5)
        for los in (True, False):
            row.append(f"{path_loss(env, los, geom, 4.0, building_height=bh):8.2f}")
    print(" ".join(row))

print("\ndistance_m p_los_uma p_los_rma")
for d in (10, 18, 50, 100, 200, 500, 1000, 2000):
    print(f"{d:10d} {los_probability(d, 'uma', 1.5):9.4f} {los_probability(d, 'rma'):9.4f}")

print("\nO2I penetration at 4 GHz:")
print(f"  low-loss building:  {penetration_loss('low', 4.0):6.2f} dB")
print(f"  high-loss building: {penetration_loss('high', 4.0):6.2f} dB")

print("\nazimuth_deg element_gain_dbi (zenith on boresight)")
for az in (0, 15, 30, 45, 65, 90, 120, 180):
    print(f"{az:11d} {element_gain(float(az), 0.0):8.2f}")
