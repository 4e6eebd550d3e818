"""
Finding the infrared line by watching the trap empty
====================================================

Before any of the level engineering works, the 3P1 - 3D1 beam has to be
parked at a known detuning, and the line itself is only 16 kHz wide.
The trick: park the trap light on, shine the infrared probe, and watch
the steady-state atom number.  Every probe scatter can shelve the atom
into a state outside the cooling cycle (via the 3D1 -> 3P0 branch), so
the trap population dips around resonance.  The dip is orders of
magnitude wider than the natural line because even the far Lorentzian
wings scatter fast compared to the trap's own slow loss rate.
"""

import numpy as np

from ybcavity import MotParams, dip_half_width, mot_dip_profile

mot = MotParams()
print("probe intensity %.0f W/m^2 (%.1f mW/cm^2), baseline loss %.1f /s"
      % (mot.probe_power_density, mot.probe_power_density / 10.0, mot.Gamma0))
print("natural linewidth %.0f kHz, saturation parameter s0 = %.2g"
      % (mot.natural_linewidth_D1 / 1e3,
         mot.probe_power_density / mot.saturation_intensity))

# ---------------------------------------------------------------------------
# The normalized dip across +/-400 MHz.
grid = np.linspace(-400.0, 400.0, 33)
profile = mot_dip_profile(grid, mot)
print("\nsteady-state atom number vs probe detuning:")
for det, val in zip(grid[::4], profile[::4]):
    print("  %+6.0f MHz : %.3f %s" % (det, val, "#" * int(round(40 * val))))

print("\ndip half width: %.0f MHz  (vs 0.016 MHz natural width)"
      % dip_half_width(mot))

# ---------------------------------------------------------------------------
# The width is set by where the shelving rate crosses the baseline loss
# rate, so it scales roughly as sqrt(intensity) through the far wings.
print("\nhalf width vs probe intensity:")
for power_density in (3.0, 10.0, 30.0, 100.0):
    hw = dip_half_width(MotParams(probe_power_density=power_density))
    print("  %5.1f mW/cm^2 : %6.1f MHz" % (power_density / 10.0, hw))

# ---------------------------------------------------------------------------
# No shelving, no dip: with zero excited-trap-state population the probe
# cannot remove atoms and the profile is exactly flat.
flat = mot_dip_profile(grid, MotParams(p1_population=0.0))
print("\nwith no 3P1 population the profile is flat: min = max = %.1f"
      % flat.min())
