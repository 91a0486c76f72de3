"""Attainable Purcell factor versus cavity length stability.

Sweeps the vibration-limited Purcell bound over RMS length fluctuations
for four published cavity parameter sets and marks the ~25 pm stability
level where the air-like bound reaches the mid-twenties.

Run from the repository root:  python3 demos/01_attainable_purcell.py
Writes demos/output/design_curves.csv (and a PNG when matplotlib is there).
"""

import os

import numpy as np

from fpcavity import design_curve, load_presets, max_purcell, preset_params

OUT_DIR = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT_DIR, exist_ok=True)

sigma_range = (1e-12, 1000e-12)
curves = {}
for name in sorted(load_presets()):
    params = preset_params(name, sigma=1e-12)
    sigmas, bounds = design_curve(params, sigma_range, points=60)
    curves[name] = (sigmas, bounds)
    at_25pm = max_purcell(preset_params(name, sigma=25e-12))
    print(f"{name:18s}  F_P_max(25 pm) = {at_25pm:7.2f}")

# a stability improvement by 10x buys exactly 10x in the bound
name = "herrmann-air"
s, b = curves[name]
print(f"\n{name}: F_P_max(2.5 pm) / F_P_max(25 pm) = "
      f"{max_purcell(preset_params(name, 2.5e-12)) / max_purcell(preset_params(name, 25e-12)):.1f}")

csv_path = os.path.join(OUT_DIR, "design_curves.csv")
with open(csv_path, "w") as fh:
    fh.write("sigma_pm," + ",".join(sorted(curves)) + "\n")
    for i, sigma in enumerate(curves["herrmann-air"][0]):
        row = [f"{sigma * 1e12:.4g}"] + [
            f"{curves[k][1][i]:.6g}" for k in sorted(curves)
        ]
        fh.write(",".join(row) + "\n")
print(f"\nwrote {csv_path}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for name, (sigmas, bounds) in curves.items():
        ax.loglog(sigmas * 1e12, bounds, label=name)
    ax.axvline(25.0, color="gray", ls=":", lw=1)
    ax.text(26, ax.get_ylim()[0] * 1.5, "25 pm", color="gray")
    ax.set_xlabel("RMS length fluctuation (pm)")
    ax.set_ylabel("maximum attainable Purcell factor")
    ax.legend(fontsize=8)
    fig.tight_layout()
    png_path = os.path.join(OUT_DIR, "design_curves.png")
    fig.savefig(png_path, dpi=150)
    print(f"wrote {png_path}")
except ImportError:
    print("matplotlib not installed; skipped the plot")
