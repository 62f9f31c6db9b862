"""Sample paths and convergence for the random logistic-harvest model.

The population grows logistically with a rate modulated by a geometric
Brownian motion and is harvested at step-process times, so paths live in
[0, 1] and keep kinks wherever the harvest level jumps. The left panel
shows one refinement sequence closing in on the fine reference; the
right panel is the measured error decay.

Run:  python demos/population_dynamics_paths.py
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from rodesim import (TimeMesh, coarsen, draw_x0, euler_solve, fit_table,
                     model_population_dynamics, plan_for, run_experiment,
                     sample_noise_bundle, substream)

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

model = model_population_dynamics()
n_target = 2 ** 14
rng = substream(11, 0)
x0 = draw_x0(model, rng)
noise = sample_noise_bundle(model.noise_specs, TimeMesh(0.0, 1.0, n_target), rng)
reference = euler_solve(model.rhs, x0, noise)

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
ax1.plot(reference.mesh.nodes(), reference.scalar, "k-", lw=1.3, label="fine reference")
for n in (16, 64, 256):
    approx = euler_solve(model.rhs, x0, coarsen(noise, n_target // n))
    ax1.plot(approx.mesh.nodes(), approx.scalar, lw=0.8, marker=".", ms=3,
             label=f"N = {n}")
ax1.set_xlabel("t")
ax1.set_ylabel("population")
ax1.set_title("one refinement sequence")
ax1.legend(fontsize=8)

plan = plan_for(model, samples=100, n_target=2 ** 14, master_seed=2023, workers=2)
table = run_experiment(plan)
fit = fit_table(table)
print(f"population dynamics: p = {fit.p:.4f}  CI [{fit.p_min:.4f}, {fit.p_max:.4f}]")
ax2.loglog(table.dts, table.errors, "o")
ax2.loglog(table.dts, np.exp(fit.ln_c) * table.dts ** fit.p, "-",
           label=f"fit: p = {fit.p:.3f}")
ax2.set_xlabel("dt")
ax2.set_ylabel("strong error")
ax2.set_title("error decay")
ax2.legend(fontsize=8)
fig.tight_layout()
fig.savefig(OUT / "population_dynamics.png", dpi=130)
print(f"wrote {OUT / 'population_dynamics.png'}")
