"""Monte-Carlo strong-error estimation and order-of-convergence fitting.

The protocol, per sample: draw the initial state and one noise
realization on the fine target mesh, build the target path (exact
distribution where available, fine-mesh Euler otherwise), then rerun the
Euler scheme on every coarse resolution using the *same* noise read at
the coarse nodes, and accumulate the per-node error norms. The strong
error of a resolution is the maximum over nodes of the sample mean;
confidence bands come from the per-node standard errors, and the order
is the slope of the log-log least-squares power-law fit.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import ConfigurationError, DivergenceError, SamplePath, TimeMesh, coarsen, substream
from .exact import TargetStrategy, exact_linear_homogeneous
from .models import MODELS, ErrorNorm, ModelSpec, draw_x0
from .noise import sample_noise_bundle
from .solver import euler_solve

# Samples are processed in fixed-size chunks and merged in sample order,
# so results cannot depend on the worker count.
CHUNK = 8

MAX_CI_RESOLUTIONS = 20


@dataclass(frozen=True, eq=False)
class ExperimentPlan:
    model: ModelSpec
    resolutions: tuple[int, ...]
    n_target: int
    samples: int
    master_seed: int
    workers: int = 1


def plan_for(model: ModelSpec, samples: int | None = None,
             resolutions=None, n_target: int | None = None,
             master_seed: int = 12345, workers: int = 1) -> ExperimentPlan:
    """Plan from a model's defaults with selective overrides."""
    plan = ExperimentPlan(
        model=model,
        resolutions=tuple(resolutions) if resolutions is not None else model.resolutions,
        n_target=n_target if n_target is not None else model.n_target,
        samples=samples if samples is not None else model.samples,
        master_seed=master_seed,
        workers=workers,
    )
    validate_plan(plan)
    return plan


def validate_plan(plan: ExperimentPlan):
    res = plan.resolutions
    if len(res) == 0:
        raise ConfigurationError("plan needs at least one resolution")
    if any(b <= a for a, b in zip(res, res[1:])):
        raise ConfigurationError(f"resolutions must be strictly increasing, got {res}")
    for n in res:
        if n >= plan.n_target:
            raise ConfigurationError(f"resolution {n} must be below n_target={plan.n_target}")
        if plan.n_target % n != 0:
            raise ConfigurationError(f"resolution {n} does not divide n_target={plan.n_target}")
    if plan.samples < 2:
        raise ConfigurationError(f"need at least 2 samples, got {plan.samples}")
    if plan.workers < 1:
        raise ConfigurationError(f"workers must be >= 1, got {plan.workers}")
    spatial = plan.model.spatial
    if spatial is not None:
        spatial.check_stability(plan.n_target, spatial.target_intervals, plan.model.horizon)
        for n in res:
            spatial.check_stability(n, spatial.intervals_for(n), plan.model.horizon)


@dataclass(frozen=True, eq=False)
class ErrorTable:
    """Per-resolution strong errors with per-node-derived confidence bands.

    ``errors`` is the max-over-nodes sample mean; ``std_errs`` and
    ``sigmas`` are the standard error and sample standard deviation at
    the maximizing node; ``eps_min``/``eps_max`` maximize the per-node
    mean -/+ 2 standard errors over nodes.
    """

    resolutions: np.ndarray
    dts: np.ndarray
    errors: np.ndarray
    std_errs: np.ndarray
    eps_min: np.ndarray
    eps_max: np.ndarray
    sigmas: np.ndarray


@dataclass(frozen=True)
class FitResult:
    ln_c: float
    p: float
    p_min: float
    p_max: float


class RunningMoments:
    """Single-pass (Welford) mean/variance accumulator over node arrays.

    Memory stays O(nodes) however many samples stream through. Partial
    accumulators merge associatively, so chunked runs combine in fixed
    sample order to schedule-independent results.
    """

    def __init__(self, shape):
        self.count = 0
        self.mean = np.zeros(shape)
        self.m2 = np.zeros(shape)

    def update(self, x: np.ndarray):
        self.count += 1
        delta = x - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (x - self.mean)

    def merge(self, other: "RunningMoments"):
        if other.count == 0:
            return
        if self.count == 0:
            self.count = other.count
            self.mean = other.mean.copy()
            self.m2 = other.m2.copy()
            return
        total = self.count + other.count
        delta = other.mean - self.mean
        self.mean = self.mean + delta * (other.count / total)
        self.m2 = self.m2 + other.m2 + delta * delta * (self.count * other.count / total)
        self.count = total

    def sample_sd(self) -> np.ndarray:
        if self.count < 2:
            raise ConfigurationError("sample standard deviation needs at least 2 samples")
        return np.sqrt(self.m2 / (self.count - 1))


def _error_rows(diff: np.ndarray, norm: ErrorNorm) -> np.ndarray:
    if norm is ErrorNorm.ABS:
        return np.abs(diff[:, 0])
    if norm is ErrorNorm.EUCLIDEAN:
        return np.sqrt((diff * diff).sum(axis=1))
    if norm is ErrorNorm.SPATIAL_SUM:
        return np.abs(diff).sum(axis=1)
    raise ConfigurationError(f"unknown error norm {norm!r}")


def _run_sample(plan: ExperimentPlan, m: int):
    """One Monte-Carlo sample: initial state, target-mesh noise, target path.

    Stream consumption order is fixed: x0 first, then the noises in the
    model's declared order, then any target correction draws.
    """
    model = plan.model
    rng = substream(plan.master_seed, m)
    x0 = draw_x0(model, rng)
    target_mesh = TimeMesh(0.0, model.horizon, plan.n_target)
    noise = sample_noise_bundle(model.noise_specs, target_mesh, rng)
    try:
        if model.target is TargetStrategy.EXACT_LINEAR_HOMOGENEOUS:
            target = exact_linear_homogeneous(x0[0], noise, rng)
        else:
            target = euler_solve(model.rhs, x0, noise)
    except DivergenceError as err:
        raise DivergenceError(f"target solve, sample {m}: {err}", step=err.step) from err
    return x0, noise, target


def _coarse_solve(plan: ExperimentPlan, m: int, n: int, x0: np.ndarray,
                  noise: SamplePath, target: SamplePath):
    """Euler run at resolution n plus the matching target values."""
    model = plan.model
    factor = plan.n_target // n
    coarse_noise = coarsen(noise, factor)
    target_vals = target.values[::factor]
    if model.spatial is None:
        rhs = model.rhs
        x0_coarse = x0
    else:
        k = model.spatial.intervals_for(n)
        stride = model.spatial.target_intervals // k
        rhs = model.rhs_for_intervals(k)
        x0_coarse = x0[::stride]
        target_vals = target_vals[:, ::stride]
    try:
        approx = euler_solve(rhs, x0_coarse, coarse_noise)
    except DivergenceError as err:
        raise DivergenceError(f"resolution {n}, sample {m}: {err}", step=err.step) from err
    return approx, target_vals


def _chunk_errors(plan: ExperimentPlan, lo: int, hi: int) -> dict[int, np.ndarray]:
    """Per-node error norms for samples lo..hi-1, keyed by resolution."""
    out = {n: np.empty((hi - lo, n + 1)) for n in plan.resolutions}
    for m in range(lo, hi):
        x0, noise, target = _run_sample(plan, m)
        for n in plan.resolutions:
            approx, target_vals = _coarse_solve(plan, m, n, x0, noise, target)
            out[n][m - lo] = _error_rows(target_vals - approx.values, plan.model.error_norm)
    return out


def _chunk_worker(args) -> dict[int, np.ndarray]:
    plan, lo, hi = args
    return _chunk_errors(plan, lo, hi)


def run_experiment(plan: ExperimentPlan) -> ErrorTable:
    """Estimate the strong error of every resolution in the plan.

    Output is a pure function of the plan (seed included): samples are
    independent streams processed in fixed chunks and merged in sample
    order, so any worker count gives bit-identical tables.
    """
    validate_plan(plan)
    spans = [(lo, min(lo + CHUNK, plan.samples)) for lo in range(0, plan.samples, CHUNK)]
    if plan.workers > 1 and len(spans) > 1:
        with ProcessPoolExecutor(max_workers=plan.workers) as pool:
            chunks = list(pool.map(_chunk_worker, [(plan, lo, hi) for lo, hi in spans]))
    else:
        chunks = [_chunk_errors(plan, lo, hi) for lo, hi in spans]

    moments = {n: RunningMoments(n + 1) for n in plan.resolutions}
    for chunk in chunks:
        for n in plan.resolutions:
            for row in chunk[n]:
                moments[n].update(row)

    mesh_dt = np.array([plan.model.horizon / n for n in plan.resolutions])
    errors = np.empty(len(plan.resolutions))
    std_errs = np.empty_like(errors)
    sigmas = np.empty_like(errors)
    eps_min = np.empty_like(errors)
    eps_max = np.empty_like(errors)
    for i, n in enumerate(plan.resolutions):
        acc = moments[n]
        mean = acc.mean
        sd = acc.sample_sd()
        stderr = sd / np.sqrt(acc.count)
        j_star = int(mean.argmax())
        errors[i] = mean[j_star]
        std_errs[i] = stderr[j_star]
        sigmas[i] = sd[j_star]
        eps_min[i] = (mean - 2.0 * stderr).max()
        eps_max[i] = (mean + 2.0 * stderr).max()
    return ErrorTable(
        resolutions=np.array(plan.resolutions, dtype=int),
        dts=mesh_dt,
        errors=errors,
        std_errs=std_errs,
        eps_min=eps_min,
        eps_max=eps_max,
        sigmas=sigmas,
    )


def figure_paths(plan: ExperimentPlan, count: int):
    """(sample, resolution, nodes, target, approx) rows for path figures.

    Recomputes the first ``count`` samples and returns the first state
    component of the target and of each coarse approximation on the
    coarse nodes.
    """
    rows = []
    for m in range(min(count, plan.samples)):
        x0, noise, target = _run_sample(plan, m)
        for n in plan.resolutions:
            approx, target_vals = _coarse_solve(plan, m, n, x0, noise, target)
            rows.append((m, n, approx.mesh.nodes(), target_vals[:, 0], approx.values[:, 0]))
    return rows


def fit_power_law(dts, errors) -> tuple[float, float]:
    """Least-squares fit of errors ~ C dt^p in log-log coordinates.

    Solves the 2x2 normal equations of the linear model
    ln eps = ln C + p ln dt (in centered form, which is the same solution
    with better conditioning) and returns (ln C, p).
    """
    dts = np.asarray(dts, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if dts.shape != errors.shape or dts.ndim != 1 or len(dts) < 2:
        raise ConfigurationError("fit needs matching 1-d inputs with at least 2 points")
    if not (dts > 0).all() or not (errors > 0).all():
        raise ConfigurationError("fit needs strictly positive steps and errors")
    x = np.log(dts)
    y = np.log(errors)
    xc = x - x.mean()
    sxx = xc @ xc
    if sxx == 0.0:
        raise ConfigurationError("all time steps equal: power-law fit is singular")
    if np.ptp(y) == 0.0:  # flat data: slope exactly 0, no rounding residue
        return float(y[0]), 0.0
    p = (xc @ (y - y.mean())) / sxx
    ln_c = y.mean() - p * x.mean()
    return float(ln_c), float(p)


def confidence_interval(dts, eps_min, eps_max) -> tuple[float, float]:
    """Order bounds over every vertex of the per-resolution error box.

    Each of the 2^R sign choices picks eps_min or eps_max per resolution;
    the vertex is pushed through the same least-squares map and the
    extreme slopes are returned. R is capped because the enumeration is
    exponential.
    """
    dts = np.asarray(dts, dtype=float)
    lo = np.asarray(eps_min, dtype=float)
    hi = np.asarray(eps_max, dtype=float)
    r = len(dts)
    if lo.shape != (r,) or hi.shape != (r,):
        raise ConfigurationError("confidence interval needs one band per resolution")
    if r > MAX_CI_RESOLUTIONS:
        raise ConfigurationError(f"{r} resolutions exceed the vertex-enumeration cap "
                                 f"of {MAX_CI_RESOLUTIONS}")
    if not (lo > 0).all():
        raise ConfigurationError("lower error bands must be positive")
    if not (hi >= lo).all():
        raise ConfigurationError("upper error bands must dominate lower bands")
    x = np.log(dts)
    xc = x - x.mean()
    sxx = xc @ xc
    if sxx == 0.0:
        raise ConfigurationError("all time steps equal: power-law fit is singular")
    log_lo = np.log(lo)
    log_hi = np.log(hi)
    p_min = np.inf
    p_max = -np.inf
    total = 1 << r
    block = 1 << 16
    for start in range(0, total, block):
        idx = np.arange(start, min(start + block, total))[:, None]
        picks = (idx >> np.arange(r)) & 1
        y = np.where(picks.astype(bool), log_hi, log_lo)
        ps = (y - y.mean(axis=1, keepdims=True)) @ xc / sxx
        p_min = min(p_min, float(ps.min()))
        p_max = max(p_max, float(ps.max()))
    return p_min, p_max


def fit_table(table: ErrorTable) -> FitResult:
    """Power-law fit plus confidence interval for a finished error table."""
    ln_c, p = fit_power_law(table.dts, table.errors)
    p_min, p_max = confidence_interval(table.dts, table.eps_min, table.eps_max)
    return FitResult(ln_c=ln_c, p=p, p_min=p_min, p_max=p_max)


def expected_order(model: ModelSpec) -> float:
    """Theoretical strong order: 1 everywhere except the fBm equation."""
    if model.name == "fbm_linear":
        hurst = model.noise_specs[0].hurst
        return min(hurst + 0.5, 1.0)
    if model.name in MODELS:
        return 1.0
    raise ConfigurationError(f"unknown benchmark model {model.name!r}")
