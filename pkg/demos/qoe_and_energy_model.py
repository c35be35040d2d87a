#!/usr/bin/env python3
"""Walk through the closed-form model: scores, utility loss, energy, CO2.

Shows how the greenness factor reshapes the opinion-score curve, what the
green action costs a user in utility, and the linear energy/CO2 bookkeeping.
"""
import numpy as np

from greenstream import (
    ModelConstants,
    bitrate_from_energy,
    co2,
    delta_utility,
    energy_reduction,
    mos,
    session_energy,
)

consts = ModelConstants()
print(f"bitrate range [{consts.x_min:.0f}, {consts.x_max:.0f}] kbps, "
      f"power {consts.p0} + {consts.alpha}*x W, carbon {consts.eta} g/kWh\n")

print("opinion score by bitrate and greenness factor")
bitrates = np.array([300, 600, 1200, 2000, 3500, 5000])
header = "    x (kbps) " + "".join(f"  gamma={g:<4.1f}" for g in (1.0, 2.0, 3.0, 4.0))
print(header)
for x in bitrates:
    row = "".join(f"  {mos(x, g, consts):10.3f}" for g in (1.0, 2.0, 3.0, 4.0))
    print(f"    {x:8.0f} {row}")
print("    (a greener user reaches the top score at a lower bitrate)\n")

print("utility lost by switching 3500 -> 900 kbps:")
for g in (1.0, 2.0, 4.0):
    print(f"    gamma={g:.1f}: delta-U = {delta_utility(3500, 900, g, consts):.4f}")

de = energy_reduction(3500, 900, consts)
print(f"\nenergy: session at 3500 kbps uses {session_energy(3500, consts):.0f} W, "
      f"at 900 kbps {session_energy(900, consts):.0f} W")
print(f"switching saves {de:.0f} W, i.e. {co2(de, consts):.3f} g CO2 per unit-hour")
print(f"inverse map check: {de:.0f} W below baseline corresponds to "
      f"{3500 - bitrate_from_energy(session_energy(3500, consts) - de, consts):.0f} kbps off the top")
