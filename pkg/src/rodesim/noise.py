"""Seedable generators for the nine driving noise processes.

Each generator maps ``(spec, mesh, rng)`` to a :class:`SamplePath` whose
node values follow the exact finite-dimensional law of the process (or
the best available exact scheme). Generators are pure: the same stream
state always yields a bit-identical path, and a single realization can
be read on any coarser mesh by subsampling, which is what the
convergence harness relies on.

Jump processes are event-driven (interarrival draws, not per-interval
counting) and evaluated right-continuously: a node that lands exactly on
an event time reads the post-jump value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np
from scipy.signal import lfilter

from .core import ConfigurationError, GenerationError, SamplePath, TimeMesh


# --------------------------------------------------------------------------
# distribution specs


@dataclass(frozen=True)
class Exponential:
    scale: float

    def __post_init__(self):
        if not self.scale > 0:
            raise ConfigurationError(f"exponential scale must be > 0, got {self.scale}")


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ConfigurationError(f"uniform needs lo < hi, got [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class Gamma:
    shape: float
    scale: float

    def __post_init__(self):
        if not (self.shape > 0 and self.scale > 0):
            raise ConfigurationError(f"gamma needs shape, scale > 0, got ({self.shape}, {self.scale})")


@dataclass(frozen=True)
class Beta:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ConfigurationError(f"beta needs alpha, beta > 0, got ({self.alpha}, {self.beta})")


@dataclass(frozen=True)
class Normal:
    mean: float
    sd: float

    def __post_init__(self):
        if not self.sd >= 0:
            raise ConfigurationError(f"normal sd must be >= 0, got {self.sd}")


@dataclass(frozen=True)
class Constant:
    value: float


DistributionSpec = Union[Exponential, Uniform, Gamma, Beta, Normal, Constant]


def draw(spec: DistributionSpec, rng: np.random.Generator, size: int | None = None):
    """Draw from a distribution spec; ``Constant`` consumes no stream state."""
    if isinstance(spec, Exponential):
        return rng.exponential(spec.scale, size)
    if isinstance(spec, Uniform):
        return rng.uniform(spec.lo, spec.hi, size)
    if isinstance(spec, Gamma):
        return rng.gamma(spec.shape, spec.scale, size)
    if isinstance(spec, Beta):
        return rng.beta(spec.alpha, spec.beta, size)
    if isinstance(spec, Normal):
        return rng.normal(spec.mean, spec.sd, size)
    if isinstance(spec, Constant):
        return spec.value if size is None else np.full(size, spec.value)
    raise ConfigurationError(f"unknown distribution spec {spec!r}")


def dist_mean(spec: DistributionSpec) -> float:
    """First moment, used by sanity checks and demos."""
    if isinstance(spec, Exponential):
        return spec.scale
    if isinstance(spec, Uniform):
        return 0.5 * (spec.lo + spec.hi)
    if isinstance(spec, Gamma):
        return spec.shape * spec.scale
    if isinstance(spec, Beta):
        return spec.alpha / (spec.alpha + spec.beta)
    if isinstance(spec, Normal):
        return spec.mean
    if isinstance(spec, Constant):
        return spec.value
    raise ConfigurationError(f"unknown distribution spec {spec!r}")


# --------------------------------------------------------------------------
# noise specs


@dataclass(frozen=True)
class Wiener:
    pass


@dataclass(frozen=True)
class OrnsteinUhlenbeck:
    nu: float
    sigma: float
    y0: float

    def __post_init__(self):
        if not self.nu > 0:
            raise ConfigurationError(f"OU drift rate must be > 0, got {self.nu}")
        if not self.sigma >= 0:
            raise ConfigurationError(f"OU diffusion must be >= 0, got {self.sigma}")


@dataclass(frozen=True)
class GeometricBM:
    mu: float
    sigma: float
    y0: float

    def __post_init__(self):
        if not self.y0 > 0:
            raise ConfigurationError(f"gBm initial value must be > 0, got {self.y0}")
        if not self.sigma >= 0:
            raise ConfigurationError(f"gBm diffusion must be >= 0, got {self.sigma}")


@dataclass(frozen=True)
class LinearItoHomogeneous:
    """Homogeneous linear diffusion with oscillating coefficients.

    dY = (mu1 + mu2 sin(theta t)) Y dt + sigma sin(theta t) Y dW, sampled
    from its closed-form solution with exact per-step Gaussian integrals.
    """

    mu1: float
    mu2: float
    sigma: float
    theta: float
    y0: float

    def __post_init__(self):
        if not self.sigma >= 0:
            raise ConfigurationError(f"diffusion must be >= 0, got {self.sigma}")


@dataclass(frozen=True)
class CompoundPoisson:
    lam: float
    jump_law: DistributionSpec

    def __post_init__(self):
        if not self.lam > 0:
            raise ConfigurationError(f"event rate must be > 0, got {self.lam}")


@dataclass(frozen=True)
class PoissonStep:
    lam: float
    step_law: DistributionSpec

    def __post_init__(self):
        if not self.lam > 0:
            raise ConfigurationError(f"event rate must be > 0, got {self.lam}")


@dataclass(frozen=True)
class HawkesExpDecay:
    """Self-exciting intensity with exponential decay toward a base rate.

    The emitted path is the intensity itself: between events it decays as
    a + (lambda_tau - a) exp(-delta (t - tau)) and at each event it jumps
    up by a draw from ``jump_law``.
    """

    lambda0: float
    a: float
    delta: float
    jump_law: DistributionSpec

    def __post_init__(self):
        if not self.lambda0 >= self.a >= 0:
            raise ConfigurationError(
                f"Hawkes needs lambda0 >= a >= 0, got ({self.lambda0}, {self.a})"
            )
        if not self.delta > 0:
            raise ConfigurationError(f"decay rate must be > 0, got {self.delta}")


class TransportForm(Enum):
    SUM_SIN_CBRT = "sum_sin_cbrt"
    GROUND_ACCELERATION = "ground_acceleration"


@dataclass(frozen=True)
class Transport:
    """Random-coefficient deterministic signal evaluated at the nodes.

    ``sum_sin_cbrt`` adds ``n_terms`` signed cube roots of sinusoids with
    random frequencies. ``ground_acceleration`` is the second derivative
    of a sum of delayed, exponentially damped, oscillating square-power
    fronts (an earthquake-like excitation with ``n_terms`` shocks).
    """

    form: TransportForm
    n_terms: int
    laws: tuple[tuple[str, DistributionSpec], ...]

    _REQUIRED = {
        TransportForm.SUM_SIN_CBRT: ("omega",),
        TransportForm.GROUND_ACCELERATION: ("tau", "gamma", "delta", "omega"),
    }

    def __post_init__(self):
        if self.n_terms < 1:
            raise ConfigurationError(f"transport needs n_terms >= 1, got {self.n_terms}")
        names = tuple(name for name, _ in self.laws)
        if names != self._REQUIRED[self.form]:
            raise ConfigurationError(
                f"transport form {self.form.value} needs laws {self._REQUIRED[self.form]}, got {names}"
            )

    def law(self, name: str) -> DistributionSpec:
        return dict(self.laws)[name]

    @classmethod
    def sum_sin_cbrt(cls, n_terms: int = 6,
                     omega_law: DistributionSpec = Gamma(7.5, 2.0)) -> "Transport":
        return cls(TransportForm.SUM_SIN_CBRT, n_terms, (("omega", omega_law),))

    @classmethod
    def ground_acceleration(cls, n_terms: int = 12,
                            tau_law: DistributionSpec = Exponential(0.25),
                            gamma_law: DistributionSpec = Uniform(0.0, 4.0),
                            delta_law: DistributionSpec = Uniform(8.0, 12.0),
                            omega_law: DistributionSpec = Uniform(8 * math.pi, 32 * math.pi),
                            ) -> "Transport":
        return cls(TransportForm.GROUND_ACCELERATION, n_terms,
                   (("tau", tau_law), ("gamma", gamma_law),
                    ("delta", delta_law), ("omega", omega_law)))


@dataclass(frozen=True)
class FractionalBM:
    hurst: float
    y0: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.hurst < 1.0:
            raise ConfigurationError(f"Hurst parameter must lie in (0, 1), got {self.hurst}")


NoiseSpec = Union[Wiener, OrnsteinUhlenbeck, GeometricBM, LinearItoHomogeneous,
                  CompoundPoisson, PoissonStep, HawkesExpDecay, Transport, FractionalBM]


# --------------------------------------------------------------------------
# Gaussian / diffusion generators


def sample_wiener(mesh: TimeMesh, rng: np.random.Generator) -> SamplePath:
    """Standard Wiener path: W_0 = 0, independent N(0, dt) increments."""
    incr = math.sqrt(mesh.dt) * rng.standard_normal(mesh.n)
    return SamplePath(mesh, np.concatenate(([0.0], np.cumsum(incr))))


def sample_ou(spec: OrnsteinUhlenbeck, mesh: TimeMesh, rng: np.random.Generator) -> SamplePath:
    """Ornstein-Uhlenbeck path via its exact transition.

    y_{j+1} = y_j e^{-nu dt} + sigma sqrt((1 - e^{-2 nu dt}) / (2 nu)) xi_j
    with i.i.d. standard normal xi_j, so the node values have the exact
    joint law at any step size.
    """
    dt = mesh.dt
    decay = math.exp(-spec.nu * dt)
    scale = spec.sigma * math.sqrt(-math.expm1(-2.0 * spec.nu * dt) / (2.0 * spec.nu))
    xi = rng.standard_normal(mesh.n)
    # AR(1) recursion y_j = decay*y_{j-1} + scale*xi_{j-1}, run in C
    y, _ = lfilter([1.0], [1.0, -decay], scale * xi, zi=np.array([decay * spec.y0]))
    return SamplePath(mesh, np.concatenate(([spec.y0], y)))


def sample_gbm(spec: GeometricBM, mesh: TimeMesh, rng: np.random.Generator) -> SamplePath:
    """Geometric Brownian motion via the exact lognormal transition."""
    dt = mesh.dt
    xi = rng.standard_normal(mesh.n)
    logincr = (spec.mu - 0.5 * spec.sigma ** 2) * dt + spec.sigma * math.sqrt(dt) * xi
    return SamplePath(mesh, spec.y0 * np.exp(np.concatenate(([0.0], np.cumsum(logincr)))))


def sample_linear_ito(spec: LinearItoHomogeneous, mesh: TimeMesh,
                      rng: np.random.Generator) -> SamplePath:
    """Closed-form sampling of the oscillating homogeneous linear diffusion.

    Writes Y_{t_{j+1}} = Y_{t_j} exp(m_j + s_j xi_j) where m_j integrates
    the drift minus the Ito correction over the step and s_j^2 is the
    exact Gaussian variance of the stochastic integral over the step:

        m_j   = mu1 dt - (mu2/theta)(cos(theta t_{j+1}) - cos(theta t_j)) - s_j^2 / 2
        s_j^2 = sigma^2 [dt/2 - (sin(2 theta t_{j+1}) - sin(2 theta t_j)) / (4 theta)]

    theta = 0 degenerates to the deterministic path y0 exp(mu1 t): both
    the oscillating drift term and the step variance vanish in the limit.
    """
    dt = mesh.dt
    t = mesh.nodes()
    if spec.theta == 0.0:
        m = np.full(mesh.n, spec.mu1 * dt)
        s = np.zeros(mesh.n)
    else:
        th = spec.theta
        s2 = spec.sigma ** 2 * (0.5 * dt - (np.sin(2 * th * t[1:]) - np.sin(2 * th * t[:-1])) / (4 * th))
        s2 = np.clip(s2, 0.0, None)  # integrand sin^2 >= 0; clip rounding residue
        m = spec.mu1 * dt - (spec.mu2 / th) * (np.cos(th * t[1:]) - np.cos(th * t[:-1])) - 0.5 * s2
        s = np.sqrt(s2)
    xi = rng.standard_normal(mesh.n)
    return SamplePath(mesh, spec.y0 * np.exp(np.concatenate(([0.0], np.cumsum(m + s * xi)))))


# --------------------------------------------------------------------------
# event-driven jump generators

_EVENT_BATCH = 64


def _event_times(rate: float, mesh: TimeMesh, rng: np.random.Generator) -> np.ndarray:
    """Poisson event times in (t0, tf] from batched exponential gaps."""
    times = np.empty(0)
    last = mesh.t0
    while last <= mesh.tf:
        gaps = rng.exponential(1.0 / rate, _EVENT_BATCH)
        times = np.concatenate((times, last + np.cumsum(gaps)))
        last = times[-1]
    return times[times <= mesh.tf]


def sample_compound_poisson(spec: CompoundPoisson, mesh: TimeMesh,
                            rng: np.random.Generator) -> SamplePath:
    """Running sum of i.i.d. jumps at Poisson event times, starting at 0."""
    events = _event_times(spec.lam, mesh, rng)
    jumps = draw(spec.jump_law, rng, len(events))
    totals = np.concatenate(([0.0], np.cumsum(jumps)))
    idx = np.searchsorted(events, mesh.nodes(), side="right")  # events at a node count
    return SamplePath(mesh, totals[idx])


def sample_poisson_step(spec: PoissonStep, mesh: TimeMesh,
                        rng: np.random.Generator) -> SamplePath:
    """Piecewise-constant path redrawn from ``step_law`` at Poisson events.

    The value is 0 before the first event; afterwards each node reads the
    latest draw at or before it.
    """
    events = _event_times(spec.lam, mesh, rng)
    levels = np.concatenate(([0.0], draw(spec.step_law, rng, len(events))))
    idx = np.searchsorted(events, mesh.nodes(), side="right")
    return SamplePath(mesh, levels[idx])


def sample_hawkes(spec: HawkesExpDecay, mesh: TimeMesh,
                  rng: np.random.Generator) -> SamplePath:
    """Exponentially decaying self-exciting intensity via Ogata thinning.

    Between events the intensity decays, so its current value dominates
    the whole next segment and thinning is exact: candidate gaps are
    exponential at the current intensity and accepted with probability
    lambda(candidate)/lambda(current).
    """
    t = mesh.t0
    lam_cur = spec.lambda0
    taus = [mesh.t0]
    lams = [spec.lambda0]
    while True:
        if lam_cur <= 0.0:
            break
        gap = rng.exponential(1.0 / lam_cur)
        t = t + gap
        if t > mesh.tf:
            break
        lam_t = spec.a + (lam_cur - spec.a) * math.exp(-spec.delta * gap)
        if rng.uniform() * lam_cur <= lam_t:
            lam_cur = lam_t + draw(spec.jump_law, rng)
            taus.append(t)
            lams.append(lam_cur)
        else:
            lam_cur = lam_t
    taus = np.asarray(taus)
    lams = np.asarray(lams)
    nodes = mesh.nodes()
    idx = np.searchsorted(taus, nodes, side="right") - 1
    vals = spec.a + (lams[idx] - spec.a) * np.exp(-spec.delta * (nodes - taus[idx]))
    return SamplePath(mesh, vals)


# --------------------------------------------------------------------------
# transport process


def _ground_acceleration(t: np.ndarray, tau: np.ndarray, gamma: np.ndarray,
                         delta: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """Sum of delayed shock excitations; each term vanishes before its onset."""
    out = np.zeros_like(t)
    for tau_i, g_i, d_i, w_i in zip(tau, gamma, delta, omega):
        s = t - tau_i
        m = s >= 0.0  # Heaviside convention H(0) = 1
        sm = s[m]
        damp = np.exp(-d_i * sm)
        c = np.cos(w_i * sm)
        s2 = sm * sm
        out[m] += g_i * (2.0 * damp * c
                         + (d_i * d_i - w_i * w_i) * s2 * damp * c
                         - 2.0 * (d_i + w_i) * sm * damp * c
                         + d_i * w_i * s2 * damp * np.sin(w_i * sm))
    return out


def sample_transport(spec: Transport, mesh: TimeMesh,
                     rng: np.random.Generator) -> SamplePath:
    """Draw the random coefficients once, then evaluate at every node."""
    t = mesh.nodes()
    if spec.form is TransportForm.SUM_SIN_CBRT:
        omegas = np.atleast_1d(draw(spec.law("omega"), rng, spec.n_terms))
        vals = np.cbrt(np.sin(np.outer(t, omegas))).sum(axis=1)  # signed real cube root
    else:
        taus = np.atleast_1d(draw(spec.law("tau"), rng, spec.n_terms))
        gammas = np.atleast_1d(draw(spec.law("gamma"), rng, spec.n_terms))
        deltas = np.atleast_1d(draw(spec.law("delta"), rng, spec.n_terms))
        omegas = np.atleast_1d(draw(spec.law("omega"), rng, spec.n_terms))
        vals = _ground_acceleration(t, taus, gammas, deltas, omegas)
    return SamplePath(mesh, vals)


# --------------------------------------------------------------------------
# fractional Brownian motion


def _fgn_circulant_embedding(n: int, hurst: float, rng: np.random.Generator) -> np.ndarray:
    """Exact unit-spacing fractional Gaussian noise, O(n log n) by FFT.

    Embeds the fGn covariance in a circulant of order 2n, diagonalizes it
    with the FFT, and colors complex Gaussians with the eigenvalue square
    roots. The first n real outputs carry the exact joint law.
    """
    k = np.arange(n + 1, dtype=float)
    g = 0.5 * ((k + 1) ** (2 * hurst) - 2 * k ** (2 * hurst) + np.abs(k - 1) ** (2 * hurst))
    lam = np.fft.fft(np.concatenate((g, g[-2:0:-1]))).real
    lam_max = lam.max()
    if lam.min() < -1e-10 * lam_max:
        raise GenerationError(
            f"circulant embedding not positive semi-definite for n={n}, H={hurst}: "
            f"min eigenvalue {lam.min():.3e} vs max {lam_max:.3e}"
        )
    lam = np.clip(lam, 0.0, None)  # rounding residue only, within tolerance
    m = 2 * n
    z = rng.standard_normal(m)
    w = np.empty(m, dtype=complex)
    w[0] = math.sqrt(lam[0] / m) * z[0]
    w[n] = math.sqrt(lam[n] / m) * z[1]
    half = np.sqrt(lam[1:n] / (2 * m))
    w[1:n] = half * (z[2:n + 1] + 1j * z[n + 1:])
    w[n + 1:] = np.conj(w[1:n][::-1])
    return np.fft.fft(w).real[:n]


def sample_fbm(spec: FractionalBM, mesh: TimeMesh, rng: np.random.Generator) -> SamplePath:
    """Fractional Brownian motion from exact fGn increments.

    The increments have autocovariance
    ``0.5 (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}) dt^{2H}``; the path starts
    at 0 and ``y0`` is applied as an additive offset afterwards. The mesh
    step count must be a power of two (FFT-friendly; the harness only
    ever asks for powers of two).
    """
    n = mesh.n
    if n & (n - 1) != 0:
        raise ConfigurationError(f"fBm generation needs a power-of-two step count, got n={n}")
    fgn = _fgn_circulant_embedding(n, spec.hurst, rng) * mesh.dt ** spec.hurst
    return SamplePath(mesh, spec.y0 + np.concatenate(([0.0], np.cumsum(fgn))))


# --------------------------------------------------------------------------
# dispatch


_SAMPLERS = {
    Wiener: lambda spec, mesh, rng: sample_wiener(mesh, rng),
    OrnsteinUhlenbeck: sample_ou,
    GeometricBM: sample_gbm,
    LinearItoHomogeneous: sample_linear_ito,
    CompoundPoisson: sample_compound_poisson,
    PoissonStep: sample_poisson_step,
    HawkesExpDecay: sample_hawkes,
    Transport: sample_transport,
    FractionalBM: sample_fbm,
}


def sample_noise(spec: NoiseSpec, mesh: TimeMesh, rng: np.random.Generator) -> SamplePath:
    sampler = _SAMPLERS.get(type(spec))
    if sampler is None:
        raise ConfigurationError(f"unknown noise spec {spec!r}")
    return sampler(spec, mesh, rng)


def sample_noise_bundle(specs, mesh: TimeMesh, rng: np.random.Generator) -> SamplePath:
    """Stack one path per spec, in order, into a dim-k path."""
    cols = [sample_noise(spec, mesh, rng).values[:, 0] for spec in specs]
    return SamplePath(mesh, np.column_stack(cols))
