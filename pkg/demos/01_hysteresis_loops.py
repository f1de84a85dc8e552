"""
Pinched hysteresis loops of the three bundled devices
=====================================================

Simulates the mean compact model of each device area over the standard
voltage sweep (0 -> +1 V -> -2 V -> 0) and plots the resulting I-V
loops.  All three loops pass exactly through the origin, the forward
branch opens between the SET and the return pass, and the reverse
current at -2 V grows with device area.
"""

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ifmem import load_all_bundled, sample, simulate, standard_sweep
from ifmem.waveform import REFERENCE_DURATION

out_dir = Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

sweep = standard_sweep(v_max=1.0, v_min=-2.0, total_duration=REFERENCE_DURATION)
waveform = sample(sweep, REFERENCE_DURATION / 10000)

fig, (ax_lin, ax_log) = plt.subplots(1, 2, figsize=(11, 4.5))
for gset in load_all_bundled():
    trace = simulate(gset.mean_model(), waveform)
    ax_lin.plot(trace.voltage, 1e3 * trace.current, label=gset.area_label)
    ax_log.semilogy(trace.voltage, np.abs(trace.current) + 1e-12,
                    label=gset.area_label)
    i_rev = trace.current[np.argmin(trace.voltage)]
    print(f"{gset.area_label:>6}: I(+1 V) = {trace.current[np.argmax(trace.voltage)]:+.3e} A, "
          f"I(-2 V) = {i_rev:+.3e} A")

ax_lin.set_xlabel("voltage (V)")
ax_lin.set_ylabel("current (mA)")
ax_lin.set_title("linear scale")
ax_lin.legend()
ax_log.set_xlabel("voltage (V)")
ax_log.set_ylabel("|current| (A)")
ax_log.set_title("log scale (pinch at 0 V)")
ax_log.legend()
fig.tight_layout()
fig.savefig(out_dir / "hysteresis_loops.png", dpi=150)
print(f"wrote {out_dir / 'hysteresis_loops.png'}")
