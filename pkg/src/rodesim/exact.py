"""Target-solution strategies for the convergence harness.

A benchmark needs a high-accuracy reference path to measure coarse Euler
runs against. Two strategies exist: the distributionally exact solution
of the Wiener-coefficient linear homogeneous equation, and a plain Euler
run on a much finer mesh for everything else.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .core import ConfigurationError, SamplePath
from .solver import Rhs, euler_solve


class TargetStrategy(Enum):
    EXACT_LINEAR_HOMOGENEOUS = "exact_linear_homogeneous"
    FINE_EULER = "fine_euler"


def exact_linear_homogeneous(x0: float, wiener: SamplePath,
                             rng: np.random.Generator) -> SamplePath:
    """Exact-distribution solution of x' = W_t x given W at the mesh nodes.

    The integral of W over a step, conditioned on the endpoint values, is
    the trapezoid term plus an independent Gaussian correction:

        int_{t_i}^{t_{i+1}} W ds  =  (W_{t_i} + W_{t_{i+1}}) dt / 2  +  Z_i,
        Z_i ~ N(0, dt^3 / 12),

    so X_{t_j} = x0 exp(sum of both terms up to j). The Z_i are drawn
    once from ``rng`` (after any noise draws of the same sample stream)
    and shared by all nodes through the cumulative sum.
    """
    w = wiener.scalar
    if w[0] != 0.0:
        raise ConfigurationError(f"expected a Wiener path with W_0 = 0, got {w[0]!r}")
    mesh = wiener.mesh
    dt = mesh.dt
    z = rng.normal(0.0, np.sqrt(dt ** 3 / 12.0), size=mesh.n)
    expo = np.cumsum(0.5 * (w[:-1] + w[1:]) * dt + z)
    return SamplePath(mesh, float(x0) * np.exp(np.concatenate(([0.0], expo))))


def fine_euler_target(rhs: Rhs, x0, fine_noise: SamplePath) -> SamplePath:
    """Reference path by running the Euler scheme on the fine target mesh."""
    return euler_solve(rhs, x0, fine_noise)
