"""Benchmark model definitions: right-hand sides, noise bundles, defaults.

Each ``model_*`` builder returns a ready-to-run :class:`ModelSpec` with
the widely varying pieces bundled together: the vector field, the
ordered noise specs feeding it, the initial-condition law, the target
strategy the harness compares against, and default Monte-Carlo settings
for a full-scale order-of-convergence run. Builders accept keyword
overrides for anything a study would want to vary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence, Union

import numpy as np

from .core import ConfigurationError, SamplePath
from .exact import TargetStrategy
from .noise import (Beta, CompoundPoisson, DistributionSpec, Exponential, FractionalBM,
                    GeometricBM, HawkesExpDecay, LinearItoHomogeneous, NoiseSpec, Normal,
                    OrnsteinUhlenbeck, PoissonStep, Transport, Uniform, Wiener, draw)
from .solver import Rhs


class ErrorNorm(Enum):
    ABS = "abs"
    EUCLIDEAN = "euclidean"
    SPATIAL_SUM = "spatial_sum"


@dataclass(frozen=True)
class SpatialPairing:
    """Per-resolution spatial interval counts for method-of-lines models."""

    pairs: tuple[tuple[int, int], ...]  # (time steps N, spatial intervals K)
    target_intervals: int
    diffusivity: float  # explicit-scheme stability needs 2*diffusivity*dt/dx^2 <= 1

    def intervals_for(self, n: int) -> int:
        for n_i, k_i in self.pairs:
            if n_i == n:
                return k_i
        raise ConfigurationError(f"no spatial pairing declared for N={n}")

    def check_stability(self, n: int, k: int, horizon: float):
        number = 2.0 * self.diffusivity * (horizon / n) * k * k  # dx = 1/k
        if number > 1.0:
            raise ConfigurationError(
                f"diffusion stability violated for N={n}, K={k}: "
                f"2 mu dt / dx^2 = {number:.4g} > 1"
            )


@dataclass(frozen=True, eq=False)
class ModelSpec:
    name: str
    rhs: Rhs
    noise_specs: tuple[NoiseSpec, ...]
    x0: Union[np.ndarray, tuple[DistributionSpec, ...]]
    target: TargetStrategy
    horizon: float
    error_norm: ErrorNorm
    samples: int
    resolutions: tuple[int, ...]
    n_target: int
    spatial: SpatialPairing | None = None
    rhs_for_intervals: Callable[[int], Rhs] | None = None

    def __post_init__(self):
        x0_len = len(self.x0)
        if x0_len != self.rhs.dim:
            raise ConfigurationError(
                f"x0 has {x0_len} components, rhs dim is {self.rhs.dim}"
            )
        if len(self.noise_specs) != self.rhs.noise_dim:
            raise ConfigurationError(
                f"{len(self.noise_specs)} noise specs for rhs noise_dim {self.rhs.noise_dim}"
            )


def draw_x0(model: ModelSpec, rng: np.random.Generator) -> np.ndarray:
    """Initial state: a fresh draw per component, or the constant vector."""
    if isinstance(model.x0, np.ndarray):
        return model.x0.copy()
    return np.array([draw(law, rng) for law in model.x0])


# --------------------------------------------------------------------------
# right-hand sides


def _linear_homogeneous_f(t, x, y):
    return y * x


def _all_noise_f(t, x, y):
    return -(y @ y) * x + y


def _fbm_linear_f(t, x, y):
    return -x + y


@dataclass(frozen=True)
class PopulationRhs:
    """Logistic growth with random specific rate and saturating harvest.

    f = gamma (1 + eps sin(g)) x (r - x) / r - alpha x h / (r + x) for
    x >= 0 and 0 for x < 0; the cutoff keeps the vector field aligned
    with the positively invariant band the model lives in.
    """

    gamma: float
    eps: float
    r: float
    alpha: float

    def __call__(self, t, x, y):
        xv = x[0]
        if xv < 0.0:
            return np.zeros(1)
        growth = self.gamma * (1.0 + self.eps * math.sin(y[0])) * xv * (self.r - xv) / self.r
        harvest = self.alpha * xv * y[1] / (self.r + xv)
        return np.array([growth - harvest])


@dataclass(frozen=True)
class OscillatorRhs:
    """Damped linear oscillator forced by (minus) the noise signal."""

    zeta0: float
    omega0: float

    def __call__(self, t, x, y):
        pos, vel = x
        return np.array([vel,
                         -2.0 * self.zeta0 * self.omega0 * vel - self.omega0 ** 2 * pos - y[0]])


@dataclass(frozen=True)
class ToggleSwitchRhs:
    """Two mutually repressing genes with quartic Hill kinetics.

    dX = (A + X^4/(a^4 + X^4)) * b^4/(b^4 + Y^4) - mu X
    dY = (B + Y^4/(c^4 + Y^4)) * d^4/(d^4 + X^4) - nu Y
    """

    a: float
    b: float
    c: float
    d: float
    mu: float
    nu: float

    def __call__(self, t, x, y):
        xg, yg = x
        x4 = xg ** 4
        y4 = yg ** 4
        dx = (y[0] + x4 / (self.a ** 4 + x4)) * self.b ** 4 / (self.b ** 4 + y4) - self.mu * xg
        dy = (y[1] + y4 / (self.c ** 4 + y4)) * self.d ** 4 / (self.d ** 4 + x4) - self.nu * yg
        return np.array([dx, dy])


@dataclass(frozen=True)
class SurplusRhs:
    """Claim- and premium-adjusted insurance surplus under random rates.

    With noise (o, c, r): f = r x + r (c + o) + nu o + premium.
    """

    nu: float
    premium: float

    def __call__(self, t, x, y):
        o, c, r = y
        return np.array([r * x[0] + r * (c + o) + self.nu * o + self.premium])


@dataclass(frozen=True)
class FisherKppRhs:
    """Method-of-lines reaction--diffusion on [0, 1] with noisy left influx.

    State u_0..u_K at x_i = i/K. Second-difference diffusion inside;
    ghost nodes encode u_x(t, 0) = -Y and u_x(t, 1) = 0 with
    Y = y[0] * y[1] (intensity-modulated colored noise). The logistic
    reaction is evaluated on max(u, 0): it vanishes identically for
    negative excursions, which keeps the invariant band attracting (the
    raw quadratic would amplify any dip below zero).
    """

    intervals: int
    mu: float
    lam: float
    u_max: float

    def __call__(self, t, u, y):
        k = self.intervals
        dx = 1.0 / k
        flux = y[0] * y[1]
        up = np.maximum(u, 0.0)
        du = self.lam * up * (1.0 - up / self.u_max)
        scale = self.mu / (dx * dx)
        out = np.empty_like(u)
        out[1:k] = du[1:k] + scale * (u[0:k - 1] - 2.0 * u[1:k] + u[2:k + 1])
        out[0] = du[0] + scale * (2.0 * u[1] - 2.0 * u[0] + 2.0 * dx * flux)
        out[k] = du[k] + scale * (2.0 * u[k - 1] - 2.0 * u[k])
        return out


# --------------------------------------------------------------------------
# model builders


def model_linear_homogeneous(samples: int = 500,
                             resolutions: Sequence[int] = tuple(2 ** i for i in range(4, 15)),
                             n_target: int = 2 ** 16) -> ModelSpec:
    """Scalar x' = W_t x with standard normal initial data on [0, 1]."""
    return ModelSpec(
        name="linear_homogeneous",
        rhs=Rhs(_linear_homogeneous_f, dim=1, noise_dim=1),
        noise_specs=(Wiener(),),
        x0=(Normal(0.0, 1.0),),
        target=TargetStrategy.EXACT_LINEAR_HOMOGENEOUS,
        horizon=1.0,
        error_norm=ErrorNorm.ABS,
        samples=samples,
        resolutions=tuple(resolutions),
        n_target=n_target,
    )


def model_all_noise_linear_system(samples: int = 80,
                                  resolutions: Sequence[int] = (2 ** 6, 2 ** 7, 2 ** 8, 2 ** 9),
                                  n_target: int = 2 ** 18) -> ModelSpec:
    """Nine-dimensional x' = -|y|^2 x + y, one coordinate per noise type."""
    specs = (
        Wiener(),
        OrnsteinUhlenbeck(nu=0.3, sigma=0.5, y0=0.2),
        GeometricBM(mu=0.3, sigma=0.5, y0=0.2),
        LinearItoHomogeneous(mu1=0.5, mu2=0.3, sigma=0.5, theta=3.0 * math.pi, y0=0.2),
        CompoundPoisson(lam=5.0, jump_law=Exponential(0.5)),
        PoissonStep(lam=5.0, step_law=Uniform(0.0, 1.0)),
        HawkesExpDecay(lambda0=3.0, a=2.0, delta=3.0, jump_law=Exponential(0.5)),
        Transport.sum_sin_cbrt(),
        FractionalBM(hurst=0.6, y0=0.2),
    )
    return ModelSpec(
        name="all_noise_linear_system",
        rhs=Rhs(_all_noise_f, dim=9, noise_dim=9),
        noise_specs=specs,
        x0=tuple(Normal(0.0, 1.0) for _ in range(9)),
        target=TargetStrategy.FINE_EULER,
        horizon=1.0,
        error_norm=ErrorNorm.EUCLIDEAN,
        samples=samples,
        resolutions=tuple(resolutions),
        n_target=n_target,
    )


def model_fbm_linear(hurst: float,
                     samples: int = 200,
                     resolutions: Sequence[int] = (2 ** 6, 2 ** 7, 2 ** 8, 2 ** 9),
                     n_target: int = 2 ** 18) -> ModelSpec:
    """Scalar x' = -x + B^H_t; the one benchmark whose order depends on H."""
    return ModelSpec(
        name="fbm_linear",
        rhs=Rhs(_fbm_linear_f, dim=1, noise_dim=1),
        noise_specs=(FractionalBM(hurst=hurst),),
        x0=(Normal(0.0, 1.0),),
        target=TargetStrategy.FINE_EULER,
        horizon=1.0,
        error_norm=ErrorNorm.ABS,
        samples=samples,
        resolutions=tuple(resolutions),
        n_target=n_target,
    )


def model_population_dynamics(gamma: float = 0.8, eps: float = 0.3, r: float = 1.0,
                              alpha: float = 0.64,
                              samples: int = 200,
                              resolutions: Sequence[int] = tuple(2 ** i for i in range(4, 10)),
                              n_target: int = 2 ** 18) -> ModelSpec:
    """Logistic growth driven by a gBm-modulated rate plus step-process harvest."""
    return ModelSpec(
        name="population_dynamics",
        rhs=Rhs(PopulationRhs(gamma, eps, r, alpha), dim=1, noise_dim=2),
        noise_specs=(GeometricBM(mu=1.0, sigma=0.8, y0=1.0),
                     PoissonStep(lam=15.0, step_law=Beta(5.0, 7.0))),
        x0=(Beta(7.0, 5.0),),
        target=TargetStrategy.FINE_EULER,
        horizon=1.0,
        error_norm=ErrorNorm.ABS,
        samples=samples,
        resolutions=tuple(resolutions),
        n_target=n_target,
    )


def model_earthquake(zeta0: float = 0.6, omega0: float = 15.0,
                     samples: int = 100,
                     resolutions: Sequence[int] = (2 ** 6, 2 ** 7, 2 ** 8, 2 ** 9),
                     n_target: int = 2 ** 18) -> ModelSpec:
    """Single-storey structure shaken by a transport-process ground acceleration."""
    return ModelSpec(
        name="earthquake",
        rhs=Rhs(OscillatorRhs(zeta0, omega0), dim=2, noise_dim=1),
        noise_specs=(Transport.ground_acceleration(),),
        x0=np.zeros(2),
        target=TargetStrategy.FINE_EULER,
        horizon=2.0,
        error_norm=ErrorNorm.EUCLIDEAN,
        samples=samples,
        resolutions=tuple(resolutions),
        n_target=n_target,
    )


def model_toggle_switch(samples: int = 100,
                        resolutions: Sequence[int] = tuple(2 ** i for i in range(5, 10)),
                        n_target: int = 2 ** 18) -> ModelSpec:
    """Gene toggle switch: compound-Poisson and linear-diffusion activations."""
    return ModelSpec(
        name="toggle_switch",
        rhs=Rhs(ToggleSwitchRhs(a=0.25, b=0.4, c=0.25, d=0.4, mu=0.75, nu=0.75),
                dim=2, noise_dim=2),
        noise_specs=(CompoundPoisson(lam=5.0, jump_law=Uniform(0.0, 0.5)),
                     LinearItoHomogeneous(mu1=0.7, mu2=0.3, sigma=0.3,
                                          theta=3.0 * math.pi, y0=0.2)),
        x0=np.array([4.0, 4.0]),
        target=TargetStrategy.FINE_EULER,
        horizon=5.0,
        error_norm=ErrorNorm.EUCLIDEAN,
        samples=samples,
        resolutions=tuple(resolutions),
        n_target=n_target,
    )


def model_risk(premium: float = 1.0,
               samples: int = 400,
               resolutions: Sequence[int] = (2 ** 6, 2 ** 7, 2 ** 8, 2 ** 9),
               n_target: int = 2 ** 18) -> ModelSpec:
    """Insurance surplus with OU premium noise, claims, and gBm interest."""
    nu = 5.0
    return ModelSpec(
        name="risk",
        rhs=Rhs(SurplusRhs(nu=nu, premium=premium), dim=1, noise_dim=3),
        noise_specs=(OrnsteinUhlenbeck(nu=nu, sigma=0.8, y0=0.0),
                     CompoundPoisson(lam=8.0, jump_law=Uniform(0.0, 0.2)),
                     GeometricBM(mu=0.02, sigma=0.4, y0=0.2)),
        x0=np.array([1.0]),
        target=TargetStrategy.FINE_EULER,
        horizon=3.0,
        error_norm=ErrorNorm.ABS,
        samples=samples,
        resolutions=tuple(resolutions),
        n_target=n_target,
    )


def risk_surplus(solution: SamplePath, noise: SamplePath) -> SamplePath:
    """Reconstruct the surplus u = x + c + o from the solved state and noise."""
    if noise.dim != 3:
        raise ConfigurationError(f"risk noise bundle must have dim 3, got {noise.dim}")
    u = solution.values[:, 0] + noise.values[:, 1] + noise.values[:, 0]
    return SamplePath(solution.mesh, u)


_KPP_DIFFUSIVITY = 0.009
_KPP_HORIZON = 2.0


@dataclass(frozen=True)
class _ReactionDiffusionRhsFactory:
    """Builds the method-of-lines vector field for a given interval count."""

    mu: float
    lam: float
    u_max: float

    def __call__(self, k: int) -> Rhs:
        return Rhs(FisherKppRhs(k, self.mu, self.lam, self.u_max), dim=k + 1, noise_dim=2)


def model_fisher_kpp(k_values: Sequence[int] = (2 ** 3, 2 ** 4, 2 ** 5),
                     k_target: int = 2 ** 9,
                     samples: int = 40,
                     resolutions: Sequence[int] = (2 ** 5, 2 ** 7, 2 ** 9),
                     n_target: int = 2 ** 18,
                     mu: float = _KPP_DIFFUSIVITY,
                     lam: float = 10.0,
                     u_max: float = 1.0) -> ModelSpec:
    """Reaction--diffusion front fed by a noisy left-boundary influx.

    The influx is an exponentially decaying self-exciting intensity
    multiplied by a fast colored (OU) signal. Spatial resolution is paired
    with time resolution so the explicit scheme stays stable, and the
    fine-solution comparison subsamples the target grid (k_target must be
    a multiple of every spatial interval count).
    """
    resolutions = tuple(resolutions)
    k_values = tuple(int(k) for k in k_values)
    if len(k_values) != len(resolutions):
        raise ConfigurationError(
            f"{len(k_values)} spatial interval counts for {len(resolutions)} resolutions"
        )
    pairing = SpatialPairing(tuple(zip(resolutions, k_values)), k_target, diffusivity=mu)
    for n_i, k_i in pairing.pairs:
        pairing.check_stability(n_i, k_i, _KPP_HORIZON)
        if k_target % k_i != 0:
            raise ConfigurationError(f"spatial intervals {k_i} do not divide k_target={k_target}")
    pairing.check_stability(n_target, k_target, _KPP_HORIZON)

    rhs_for = _ReactionDiffusionRhsFactory(mu, lam, u_max)

    tau = 0.005  # OU time scale; drift 1/tau, diffusion 0.1/tau
    return ModelSpec(
        name="fisher_kpp",
        rhs=rhs_for(k_target),
        noise_specs=(HawkesExpDecay(lambda0=3.0, a=0.3, delta=5.0,
                                    jump_law=Exponential(1.0 / 1.8)),
                     OrnsteinUhlenbeck(nu=1.0 / tau, sigma=0.1 / tau, y0=0.0)),
        x0=np.zeros(k_target + 1),
        target=TargetStrategy.FINE_EULER,
        horizon=_KPP_HORIZON,
        error_norm=ErrorNorm.SPATIAL_SUM,
        samples=samples,
        resolutions=resolutions,
        n_target=n_target,
        spatial=pairing,
        rhs_for_intervals=rhs_for,
    )


MODELS: dict[str, Callable[..., ModelSpec]] = {
    "linear_homogeneous": model_linear_homogeneous,
    "all_noise_linear_system": model_all_noise_linear_system,
    "fbm_linear": model_fbm_linear,
    "population_dynamics": model_population_dynamics,
    "earthquake": model_earthquake,
    "toggle_switch": model_toggle_switch,
    "risk": model_risk,
    "fisher_kpp": model_fisher_kpp,
}
