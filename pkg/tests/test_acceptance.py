"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v`` (add ``-m "not slow"`` to
skip the long Monte-Carlo criteria). Every tolerance below is fixed up
front; the experiments are deterministic given the seed, so reruns give
bit-identical numbers.

Known honest failures, analyzed in depth before freezing this suite:

* criterion 02: the cube-root-of-sine transport coordinate has
  integrable slope singularities whose order-dt^{4/3} error term
  dominates the N = 2^6..2^9 window and lifts the fitted order of the
  nine-noise system to ~1.21, just above the 1.2 cap (the same system
  without that coordinate fits p = 1.01; the harness was cross-checked
  against an independent integrator).
* criterion 10: with the prescribed resolution-paired spatial grids the
  coarse runs cannot resolve the reaction front, and the subsampled
  spatial-sum error stays flat (fitted p ~ 0) instead of decaying at
  order ~1.
"""

from __future__ import annotations

import time

import numpy as np
import pytest

import rodesim as rs
from rodesim import (Rhs, TimeMesh, euler_solve, expected_order, fit_power_law,
                     fit_table, plan_for, run_experiment, sample_wiener, substream)
from rodesim.cli import parse_config, run as cli_run
from rodesim.convergence import _coarse_solve, _run_sample

from distchecks import MOMENT_CHECKS, run_check

SEED = 2023
WORKERS = 2


def _report(num: int, title: str, ok: bool, detail: str) -> str:
    line = f"[acceptance] criterion {num:02d} {title}: {detail} -> {'PASS' if ok else 'FAIL'}"
    print(line)
    return line


def _order_run(model, band, samples, resolutions=None, n_target=None):
    plan = plan_for(model, samples=samples, resolutions=resolutions,
                    n_target=n_target, master_seed=SEED, workers=WORKERS)
    fit = fit_table(run_experiment(plan))
    ok = band[0] <= fit.p <= band[1]
    return fit, ok


def test_criterion_01_linear_homogeneous_order():
    start = time.perf_counter()
    fit, ok = _order_run(rs.model_linear_homogeneous(), (0.88, 1.12), samples=200,
                         resolutions=tuple(2 ** k for k in range(4, 11)),
                         n_target=2 ** 14)
    elapsed = time.perf_counter() - start
    line = _report(1, "linear homogeneous order",
                   ok and elapsed < 120.0,
                   f"p={fit.p:.4f} in [0.88, 1.12], {elapsed:.1f}s < 120s")
    assert ok and elapsed < 120.0, line


@pytest.mark.slow
def test_criterion_02_all_noise_system_order():
    start = time.perf_counter()
    fit, ok = _order_run(rs.model_all_noise_linear_system(), (0.85, 1.2), samples=40,
                         n_target=2 ** 16)
    elapsed = time.perf_counter() - start
    line = _report(2, "all-noise linear system order",
                   ok and elapsed < 600.0,
                   f"p={fit.p:.4f} in [0.85, 1.2], {elapsed:.1f}s < 600s")
    assert ok and elapsed < 600.0, line


@pytest.mark.slow
def test_criterion_03_fbm_order_law():
    start = time.perf_counter()
    results = []
    all_ok = True
    for hurst in (0.1, 0.3, 0.5, 0.7):
        target = min(hurst + 0.5, 1.0)
        fit, _ = _order_run(rs.model_fbm_linear(hurst), (target - 0.12, target + 0.12),
                            samples=100, n_target=2 ** 14)
        ok = abs(fit.p - target) <= 0.12
        all_ok = all_ok and ok
        results.append(f"H={hurst}: p={fit.p:.4f} (want {target:.1f}±0.12)")
    elapsed = time.perf_counter() - start
    line = _report(3, "fBm order min(H+1/2, 1)",
                   all_ok and elapsed < 600.0,
                   "; ".join(results) + f", {elapsed:.1f}s < 600s")
    assert all_ok and elapsed < 600.0, line


def test_criterion_04_population_dynamics_order():
    fit, ok = _order_run(rs.model_population_dynamics(), (0.9, 1.12), samples=100,
                         n_target=2 ** 14)
    line = _report(4, "population dynamics order", ok, f"p={fit.p:.4f} in [0.9, 1.12]")
    assert ok, line


def test_criterion_05_deterministic_solver_oracle():
    start = time.perf_counter()
    rhs = Rhs(lambda t, x, y: -x, 1, 1)
    errs = []
    for n in [2 ** k for k in range(4, 11)]:
        mesh = TimeMesh(0.0, 1.0, n)
        quiet = rs.SamplePath(mesh, np.zeros(n + 1))
        out = euler_solve(rhs, [1.0], quiet)
        errs.append(np.abs(out.scalar - np.exp(-mesh.nodes())).max())
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    elapsed = time.perf_counter() - start
    ok = bool(((ratios >= 1.8) & (ratios <= 2.2)).all()) and elapsed < 1.0
    line = _report(5, "deterministic Euler halving",
                   ok, f"ratios in [{ratios.min():.3f}, {ratios.max():.3f}], "
                       f"{elapsed * 1e3:.0f}ms < 1s")
    assert ok, line


def test_criterion_06_fit_oracle():
    dts = 1.0 / 2 ** np.arange(4, 11)
    ok = True
    details = []
    for c, p in ((2.0, 1.5), (0.1, 0.5), (1.0, 1.0)):
        ln_c_hat, p_hat = fit_power_law(dts, c * dts ** p)
        ok = ok and abs(p_hat - p) < 1e-10 and abs(ln_c_hat - np.log(c)) < 1e-10
        details.append(f"(C={c}, p={p}): dp={abs(p_hat - p):.1e}")
    _, p_flat = fit_power_law(dts, np.full(len(dts), 0.3))
    ok = ok and p_flat == 0.0
    details.append(f"flat: p={p_flat}")
    line = _report(6, "power-law fit inversion", ok, "; ".join(details))
    assert ok, line


def test_criterion_07_exact_target_identity():
    class ZeroCorrections:
        def normal(self, loc=0.0, scale=1.0, size=None):
            return np.zeros(size) if size is not None else 0.0

    mesh = TimeMesh(0.0, 1.0, 512)
    worst = 0.0
    for stream in range(10):
        w = sample_wiener(mesh, substream(SEED, stream))
        got = rs.exact_linear_homogeneous(1.3, w, ZeroCorrections()).scalar
        ref = 1.3 * np.exp(np.concatenate(
            ([0.0], np.cumsum(0.5 * (w.scalar[:-1] + w.scalar[1:]) * mesh.dt))))
        worst = max(worst, float(np.abs(got / ref - 1.0).max()))
    ok = worst <= 1e-12
    line = _report(7, "exact target = trapezoid with Z=0", ok, f"max rel dev {worst:.2e}")
    assert ok, line


@pytest.mark.slow
def test_criterion_08_noise_distributional_suite():
    start = time.perf_counter()
    all_ok = True
    rows = []
    for check in MOMENT_CHECKS:
        estimate, tol = run_check(check)
        ok = abs(estimate - check.target) <= tol
        all_ok = all_ok and ok
        rows.append(f"{check.name}: {estimate:.4g} vs {check.target:.4g}")
    elapsed = time.perf_counter() - start
    ok = all_ok and elapsed < 300.0
    line = _report(8, "noise distributional suite", ok,
                   "; ".join(rows) + f", {elapsed:.0f}s < 300s")
    assert ok, line


def test_criterion_09_byte_identical_reruns(tmp_path):
    base = ("model = linear_homogeneous\n\n[harness]\nsamples = 8\n"
            "resolutions = 16 32 64\nn_target = 1024\nmaster_seed = 5\n")
    blobs = []
    for tag, workers in (("a", 1), ("b", 1), ("c", 2)):
        config = parse_config(base + f"output_dir = {tmp_path}/{tag}\nworkers = {workers}\n")
        cli_run(config)
        blobs.append((tmp_path / tag / "errors.csv").read_bytes())
    ok = blobs[0] == blobs[1] == blobs[2]
    line = _report(9, "determinism across reruns and workers", ok,
                   f"{len(blobs)} runs, {len(blobs[0])} bytes each")
    assert ok, line


@pytest.mark.slow
def test_criterion_10_fisher_kpp_order_and_invariant():
    model = rs.model_fisher_kpp(k_values=(2 ** 3, 2 ** 4, 2 ** 5), k_target=2 ** 7,
                                resolutions=(2 ** 5, 2 ** 7, 2 ** 9),
                                n_target=2 ** 13, samples=10)
    plan = plan_for(model, master_seed=SEED, workers=WORKERS)
    fit = fit_table(run_experiment(plan))
    order_ok = 0.8 <= fit.p <= 1.3

    # state-band invariant over every solution of every sample, with the
    # one-step slack dt * max|f| on both sides of [0, u_max]
    invariant_ok = True
    low, high = np.inf, -np.inf
    for m in range(plan.samples):
        x0, noise, target = _run_sample(plan, m)
        solutions = [target]
        for n in plan.resolutions:
            approx, _ = _coarse_solve(plan, m, n, x0, noise, target)
            solutions.append(approx)
        for path in solutions:
            # dt * max|f| read off the realized Euler steps
            slack = float(np.abs(np.diff(path.values, axis=0)).max())
            low = min(low, float(path.values.min()))
            high = max(high, float(path.values.max()))
            if path.values.min() < -slack or path.values.max() > 1.0 + slack:
                invariant_ok = False
    ok = order_ok and invariant_ok
    line = _report(10, "Fisher-KPP order and state band", ok,
                   f"p={fit.p:.4f} (want [0.8, 1.3]); u range [{low:.4f}, {high:.4f}], "
                   f"invariant {'held' if invariant_ok else 'violated'}")
    assert ok, line


@pytest.mark.slow
def test_criterion_extra_slow_benchmark_orders():
    # reduced-sample runs of the remaining benchmarks, wide band [0.8, 1.3]
    cases = (
        (rs.model_earthquake(), 25),
        (rs.model_toggle_switch(), 25),
        (rs.model_risk(), 50),
    )
    all_ok = True
    rows = []
    for model, samples in cases:
        fit, ok = _order_run(model, (0.8, 1.3), samples=samples, n_target=2 ** 14)
        all_ok = all_ok and ok
        rows.append(f"{model.name}: p={fit.p:.4f}")
        assert expected_order(model) == 1.0
    line = _report(11, "earthquake/toggle/risk orders (reduced M)", all_ok,
                   "; ".join(rows) + " (want [0.8, 1.3])")
    assert all_ok, line
