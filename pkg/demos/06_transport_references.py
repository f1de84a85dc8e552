"""
Compact branches versus physical transport equations
====================================================

The four transmission branches of the compact model are low-parameter
stand-ins for two physical mechanisms: thermionic emission over a
Schottky barrier (saturating exponential) and generalized barrier
tunnelling (hyperbolic sine).  This script overlays the compact
branches of the smallest device with representatively parameterized
physical reference curves to show the shared shapes.
"""

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ifmem import (PhysicalSchottkyParams, SimmonsParams, hrs_current,
                   load_bundled, lrs_current, schottky_reference_current,
                   simmons_reference_current)

out_dir = Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

device = load_bundled("10um").mean_model()
v = np.linspace(-2.0, 1.0, 1201)

# representative physical parameters for shape comparison only: a
# micron-scale junction at room temperature
schottky = PhysicalSchottkyParams(area=1e-10, richardson=1.1e6,
                                  temperature=300.0, barrier_height=0.65,
                                  ideality=1.3)
simmons = SimmonsParams(alpha=3.0, beta=2e-5)

fig, axes = plt.subplots(1, 2, figsize=(11, 4.2))

axes[0].semilogy(v, np.abs(hrs_current(device, v)) + 1e-15,
                 label="HRS branch (compact)")
axes[0].semilogy(v, np.abs(schottky_reference_current(schottky, v)) + 1e-15,
                 "--", label="thermionic emission")
axes[0].set_title("forward: saturating exponential")

axes[1].semilogy(v, np.abs(lrs_current(device, v)) + 1e-15,
                 label="LRS branch (compact)")
axes[1].semilogy(v, np.abs(simmons_reference_current(simmons, v)) + 1e-15,
                 "--", label="barrier tunnelling")
axes[1].set_title("tunnelling: hyperbolic sine")

for ax in axes:
    ax.set_xlabel("voltage (V)")
    ax.set_ylabel("|current| (A)")
    ax.legend()
fig.tight_layout()
fig.savefig(out_dir / "transport_references.png", dpi=150)
print(f"wrote {out_dir / 'transport_references.png'}")
