"""Meshes, sample-path containers, and splittable random streams.

Everything downstream (noise generators, the Euler solver, the
convergence harness) works on these three primitives: a uniform
:class:`TimeMesh`, a :class:`SamplePath` holding vector values at the
mesh nodes, and per-sample random streams created by :func:`substream`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ConfigurationError(ValueError):
    """Inconsistent mesh, spec, plan, or config-file input."""


class GenerationError(RuntimeError):
    """A noise generator could not produce a valid path."""


class DivergenceError(RuntimeError):
    """The Euler iteration left the finite range."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


@dataclass(frozen=True)
class TimeMesh:
    """Uniform grid of ``n + 1`` nodes on ``[t0, tf]``.

    Nodes are always computed as ``t0 + j * dt`` (one multiplication per
    node, never repeated addition), so ``node(j)`` does not depend on how
    the mesh is traversed.
    """

    t0: float
    tf: float
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ConfigurationError(f"mesh needs at least one step, got n={self.n}")
        if not self.tf > self.t0:
            raise ConfigurationError(f"mesh needs tf > t0, got [{self.t0}, {self.tf}]")

    @property
    def dt(self) -> float:
        return (self.tf - self.t0) / self.n

    def node(self, j: int) -> float:
        return self.t0 + j * self.dt

    def nodes(self) -> np.ndarray:
        return self.t0 + np.arange(self.n + 1) * self.dt


def make_mesh(t0: float, tf: float, n: int) -> TimeMesh:
    """Uniform mesh with step ``dt = (tf - t0) / n``."""
    return TimeMesh(float(t0), float(tf), int(n))


@dataclass(frozen=True)
class SamplePath:
    """Values of a d-dimensional process at the nodes of a mesh.

    ``values`` has shape ``(mesh.n + 1, dim)``; scalar input is promoted
    to a single column. Paths are treated as immutable once built.
    """

    mesh: TimeMesh
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim == 1:
            vals = vals[:, None]
        if vals.ndim != 2 or vals.shape[0] != self.mesh.n + 1:
            raise ConfigurationError(
                f"path values shape {vals.shape} does not match mesh with {self.mesh.n + 1} nodes"
            )
        if not np.isfinite(vals).all():
            raise ConfigurationError("path values must be finite")
        object.__setattr__(self, "values", vals)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def scalar(self) -> np.ndarray:
        """The single column of a dim-1 path, as a flat array."""
        if self.dim != 1:
            raise ConfigurationError(f"path has dim {self.dim}, not scalar")
        return self.values[:, 0]


def coarsen(path: SamplePath, factor: int) -> SamplePath:
    """Subsample a path onto the mesh with ``n // factor`` steps.

    Node ``j`` of the result holds the input value at node ``j * factor``;
    no interpolation is ever performed, so ``factor`` must divide ``n``.
    """
    factor = int(factor)
    if factor < 1:
        raise ConfigurationError(f"coarsening factor must be >= 1, got {factor}")
    n = path.mesh.n
    if n % factor != 0:
        raise ConfigurationError(f"coarsening factor {factor} does not divide n={n}")
    if factor == 1:
        return path
    mesh = TimeMesh(path.mesh.t0, path.mesh.tf, n // factor)
    return SamplePath(mesh, path.values[::factor].copy())


def substream(master_seed: int, stream_id: int) -> np.random.Generator:
    """Independent, reproducible random stream for one Monte-Carlo sample.

    Philox is counter-based, so the pair ``(master_seed, stream_id)``
    fully determines the draw sequence and distinct ids give streams that
    are independent regardless of creation or consumption order. All
    non-uniform draws (normal, exponential, Poisson, Gamma, Beta, ...)
    use numpy's Generator algorithms on top of this bit stream, which are
    deterministic for a fixed numpy version.
    """
    master_seed = int(master_seed)
    stream_id = int(stream_id)
    if master_seed < 0:
        raise ConfigurationError(f"master seed must be non-negative, got {master_seed}")
    if stream_id < 0:
        raise ConfigurationError(f"stream id must be non-negative, got {stream_id}")
    seq = np.random.SeedSequence(entropy=[master_seed, stream_id])
    return np.random.Generator(np.random.Philox(seq))
