"""Fixed-step Euler integrator for noise-driven ODE systems.

The driving path is precomputed on the mesh; the right-hand side is
evaluated with state and noise both frozen at the left endpoint of each
step, which is the scheme whose convergence order the benchmark suite
measures.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import ConfigurationError, DivergenceError, SamplePath

BLOWUP_LIMIT = 1e100


@dataclass(frozen=True)
class Rhs:
    """Evaluation contract f(t, x, y) -> dx/dt with declared dimensions.

    ``f`` must be deterministic and side-effect free, take a state vector
    of length ``dim`` and a noise vector of length ``noise_dim``, and
    return a vector of length ``dim``.
    """

    f: Callable[[float, np.ndarray, np.ndarray], np.ndarray]
    dim: int
    noise_dim: int

    def __call__(self, t: float, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.f(t, x, y)


def euler_solve(rhs: Rhs, x0, noise: SamplePath) -> SamplePath:
    """Integrate x' = f(t, x, y(t)) on the mesh of the given noise path.

    out[0] = x0 and out[j] = out[j-1] + dt * f(t_{j-1}, out[j-1], y_{j-1}):
    the noise enters at the left endpoint only. Aborts with
    :class:`DivergenceError` at the first step where any state component
    is non-finite or exceeds ``BLOWUP_LIMIT`` in magnitude.
    """
    if noise.dim != rhs.noise_dim:
        raise ConfigurationError(f"noise path has dim {noise.dim}, rhs expects {rhs.noise_dim}")
    x = np.asarray(x0, dtype=float).reshape(-1)
    if x.shape != (rhs.dim,):
        raise ConfigurationError(f"initial state shape {x.shape} does not match rhs dim {rhs.dim}")
    mesh = noise.mesh
    dt = mesh.dt
    t0 = mesh.t0
    y = noise.values
    out = np.empty((mesh.n + 1, rhs.dim))
    out[0] = x
    f = rhs.f
    for j in range(1, mesh.n + 1):
        x = x + dt * np.asarray(f(t0 + (j - 1) * dt, x, y[j - 1]))
        bound = np.abs(x).max()
        if not bound <= BLOWUP_LIMIT:  # also trips on NaN
            raise DivergenceError(
                f"state diverged at step {j} (t = {t0 + j * dt:.6g}): "
                f"max |component| = {bound!r}",
                step=j,
            )
        out[j] = x
    return SamplePath(mesh, out)
