"""Euler runs at a few resolutions against the exact-distribution target.

For x' = W_t x the reference path can be sampled exactly given the
Wiener values (trapezoid of the path plus an independent Gaussian
correction per step), so this picture shows how the coarse Euler
approximations close in on a genuinely exact solution as the mesh is
refined -- the single-sample version of what the convergence harness
averages over.

Run:  python demos/euler_vs_reference.py
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from rodesim import (TimeMesh, coarsen, euler_solve, exact_linear_homogeneous,
                     model_linear_homogeneous, sample_wiener, substream)

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

model = model_linear_homogeneous()
n_target = 2 ** 12
rng = substream(42, 0)
x0 = rng.standard_normal()
wiener = sample_wiener(TimeMesh(0.0, 1.0, n_target), rng)
target = exact_linear_homogeneous(x0, wiener, rng)

fig, ax = plt.subplots(figsize=(7, 4.2))
ax.plot(target.mesh.nodes(), target.scalar, "k-", lw=1.4, label="exact-distribution target")
for n in (16, 64, 256):
    approx = euler_solve(model.rhs, [x0], coarsen(wiener, n_target // n))
    ax.plot(approx.mesh.nodes(), approx.scalar, marker=".", ms=3, lw=0.8,
            label=f"Euler, N = {n}")
ax.set_xlabel("t")
ax.set_ylabel("x")
ax.set_title("x' = W x: coarse Euler runs vs the exact-law reference")
ax.legend(fontsize=8)
fig.tight_layout()
fig.savefig(OUT / "euler_vs_reference.png", dpi=130)
print(f"wrote {OUT / 'euler_vs_reference.png'}")
