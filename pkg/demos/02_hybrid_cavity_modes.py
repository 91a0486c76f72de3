"""Mode structure of a diamond-air hybrid cavity.

Solves the two-layer resonance condition for a membrane-in-cavity
geometry, classifies each mode as air-like or diamond-like, and shows how
strongly each type disperses with the air gap. Diamond-like modes are the
quiet ones: their smaller slope makes them less sensitive to vibrations.

Run from the repository root:  python3 demos/02_hybrid_cavity_modes.py
"""

import numpy as np
from scipy.constants import c

from fpcavity import (
    CavityGeometry,
    dispersion_slope,
    mode_volume,
    resonance_frequencies,
)

geo = CavityGeometry(
    diamond_thickness=3.7e-6,
    air_gap=8.0e-6,
    refractive_index=2.41,
    radius_of_curvature=25e-6,
)
band = (400e12, 500e12)
modes = resonance_frequencies(geo, band)

print(f"diamond {geo.diamond_thickness * 1e6:.1f} um + air {geo.air_gap * 1e6:.1f} um, "
      f"n = {geo.refractive_index}")
print(f"{len(modes)} modes in {band[0] / 1e12:.0f}-{band[1] / 1e12:.0f} THz\n")
print(f"{'order':>5} {'nu (THz)':>10} {'lambda (nm)':>11} {'type':>13} "
      f"{'|s| (MHz/pm)':>13} {'V (lambda^3)':>13}")
for m in modes:
    s = dispersion_slope(geo, m)
    v = mode_volume(geo, m)
    print(f"{m.mode_order:>5} {m.frequency / 1e12:>10.2f} "
          f"{m.wavelength * 1e9:>11.1f} {m.character.value:>13} "
          f"{s.magnitude_mhz_per_pm:>13.1f} {v.per_lambda_cubed:>13.1f}")

# the split in dispersion between the two families
slopes = {"air-like": [], "diamond-like": []}
for m in modes:
    slopes[m.character.value].append(abs(dispersion_slope(geo, m).s))
print(f"\nair-like     |s|: {min(slopes['air-like']) / 1e18:.0f}"
      f"-{max(slopes['air-like']) / 1e18:.0f} MHz/pm")
print(f"diamond-like |s|: {min(slopes['diamond-like']) / 1e18:.0f}"
      f"-{max(slopes['diamond-like']) / 1e18:.0f} MHz/pm")

# tracking one mode while the air gap shrinks by a wavelength
print("\ntracking the mode nearest 637 nm while closing the gap:")
target = c / 637e-9
for dgap_nm in (0, 50, 100, 150):
    g = CavityGeometry(
        diamond_thickness=geo.diamond_thickness,
        air_gap=geo.air_gap - dgap_nm * 1e-9,
        refractive_index=geo.refractive_index,
    )
    nearest = min(resonance_frequencies(g, (target - 5e12, target + 5e12)),
                  key=lambda m: abs(m.frequency - target))
    print(f"  gap -{dgap_nm:3d} nm: nu = {nearest.frequency / 1e12:.3f} THz "
          f"({nearest.character.value})")
