"""Desk-scale strong-convergence study for the Wiener-coefficient equation.

Runs the full Monte-Carlo protocol (shared noise per sample, coarsened
onto each resolution, per-node error means, max over time) at a reduced
sample count, fits the power law, and plots the log-log errors with the
fitted line. Expect an order close to 1 and a confidence interval that
brackets it.

Run:  python demos/order_study_linear.py
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from rodesim import (expected_order, fit_table, model_linear_homogeneous, plan_for,
                     run_experiment)

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

model = model_linear_homogeneous()
plan = plan_for(model, samples=200, resolutions=tuple(2 ** k for k in range(4, 11)),
                n_target=2 ** 14, master_seed=2023, workers=2)
table = run_experiment(plan)
fit = fit_table(table)

print(f"{'N':>6s} {'dt':>10s} {'error':>12s} {'std err':>12s}")
for i, n in enumerate(table.resolutions):
    print(f"{n:6d} {table.dts[i]:10.5f} {table.errors[i]:12.6f} {table.std_errs[i]:12.6f}")
print(f"\nfitted order p = {fit.p:.4f}, CI [{fit.p_min:.4f}, {fit.p_max:.4f}], "
      f"theory {expected_order(model):.1f}")

fig, ax = plt.subplots(figsize=(5.5, 4.2))
ax.loglog(table.dts, table.errors, "o", label="measured strong error")
ax.loglog(table.dts, np.exp(fit.ln_c) * table.dts ** fit.p, "-",
          label=f"fit: p = {fit.p:.3f}")
ax.fill_between(table.dts, table.eps_min, table.eps_max, alpha=0.25,
                label="per-resolution bands")
ax.set_xlabel("dt")
ax.set_ylabel("strong error")
ax.set_title("x' = W x: strong error vs step size")
ax.legend(fontsize=8)
fig.tight_layout()
fig.savefig(OUT / "order_study_linear.png", dpi=130)
print(f"wrote {OUT / 'order_study_linear.png'}")
