"""Gallery of the nine driving noise processes.

Draws one realization of each process on a shared mesh and saves a grid
of plots plus a CSV with every path, so the qualitative zoo is easy to
eyeball: diffusions (Wiener, OU, gBm, oscillating linear), jump
processes (compound Poisson, Poisson steps, self-exciting intensity),
random deterministic signals (cube-root sine mix, shock train), and
fractional Brownian motion.

Run:  python demos/noise_gallery.py
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from rodesim import TimeMesh, sample_noise, substream
from rodesim.models import model_all_noise_linear_system

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

mesh = TimeMesh(0.0, 1.0, 2 ** 10)
specs = model_all_noise_linear_system().noise_specs
labels = ["Wiener", "Ornstein-Uhlenbeck", "geometric BM", "oscillating linear SDE",
          "compound Poisson", "Poisson steps", "self-exciting intensity",
          "cube-root sine mix", "fractional BM (H=0.6)"]

fig, axes = plt.subplots(3, 3, figsize=(11, 7), sharex=True)
columns = [mesh.nodes()]
for i, (spec, label, ax) in enumerate(zip(specs, labels, axes.flat)):
    path = sample_noise(spec, mesh, substream(7, i))
    ax.plot(mesh.nodes(), path.scalar, lw=0.8)
    ax.set_title(label, fontsize=9)
    columns.append(path.scalar)

fig.suptitle("one realization of each driving process")
fig.tight_layout()
fig.savefig(OUT / "noise_gallery.png", dpi=130)
np.savetxt(OUT / "noise_gallery.csv", np.column_stack(columns), delimiter=",",
           header="t," + ",".join(labels), comments="")
print(f"wrote {OUT / 'noise_gallery.png'} and {OUT / 'noise_gallery.csv'}")
