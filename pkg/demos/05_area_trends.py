"""
Parameter trends across device areas
====================================

Classifies how each model parameter's mean moves from the smallest to
the largest device and plots the area-correlated groups on a log scale.
The reverse-bias switching parameters fall with area while the forward
thermionic and reverse tunnelling magnitudes rise with it.
"""

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from ifmem import load_all_bundled, trend_check

out_dir = Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

sets = load_all_bundled()
trends = trend_check(sets)

for group in ("decreasing", "increasing", "flat", "non-monotonic"):
    names = [n for n, t in trends.items() if t == group]
    print(f"{group:>14}: {', '.join(names) if names else '-'}")

falling = [n for n, t in trends.items() if t == "decreasing"]
rising = [n for n, t in trends.items() if t == "increasing"]
x = range(len(sets))
labels = [s.area_label for s in sets]

fig, (ax_a, ax_b) = plt.subplots(1, 2, figsize=(10, 4))
for ax, names, title in ((ax_a, falling, "negatively correlated with area"),
                         (ax_b, rising, "positively correlated with area")):
    for name in names:
        ax.semilogy(x, [s.parameters[name][0] for s in sets],
                    marker="o", label=name)
    ax.set_xticks(list(x), labels)
    ax.set_title(title)
    ax.legend()
fig.tight_layout()
fig.savefig(out_dir / "area_trends.png", dpi=150)
print(f"wrote {out_dir / 'area_trends.png'}")
