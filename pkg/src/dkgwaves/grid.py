"""Uniform radial grids, Simpson quadrature and finite differences."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

MIN_NODES = 16


@dataclass(frozen=True)
class RadialGrid:
    """Uniform grid ``r_i = i * step`` on ``[0, length]``."""

    length: float
    step: float
    nodes: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (self.length > 0 and self.step > 0):
            raise DomainError(f"grid needs length > 0 and step > 0, got {self.length}, {self.step}")
        count = int(round(self.length / self.step)) + 1
        if count < MIN_NODES:
            raise DomainError(f"grid has {count} nodes, need at least {MIN_NODES}")
        nodes = np.arange(count, dtype=float) * self.step
        nodes.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)

    @property
    def node_count(self) -> int:
        return self.nodes.size

    @classmethod
    def from_count(cls, node_count: int, step: float) -> "RadialGrid":
        return cls((node_count - 1) * step, step)

    def truncated(self, node_count: int) -> "RadialGrid":
        return RadialGrid.from_count(node_count, self.step)


def make_grid(omega: float, m: float = 1.0, dr: float = 0.01, factor: float = 10.0) -> RadialGrid:
    """Grid on ``[0, L]`` with ``L = factor / sqrt(m^2 - omega^2)`` rounded up to a multiple of dr."""
    if not (m > 0):
        raise DomainError(f"mass must be positive, got {m}")
    if not (0 < omega < m):
        raise DomainError(f"need 0 < omega < m, got omega={omega}, m={m}")
    length = factor / math.sqrt(m * m - omega * omega)
    count = math.ceil(length / dr - 1e-9)
    return RadialGrid.from_count(count + 1, dr)


def angular_factor(n: int) -> float:
    """Measure of the unit sphere used to reduce R^n integrals to [0, inf)."""
    if n == 1:
        return 2.0
    if n == 3:
        return 4.0 * math.pi
    raise DomainError(f"dimension must be 1 or 3, got {n}")


def simpson_weights(count: int, step: float) -> np.ndarray:
    """Composite Simpson weights; a 3/8 panel closes an odd number of intervals."""
    if count < 4:
        raise DomainError("Simpson weights need at least 4 nodes")
    w = np.zeros(count)
    intervals = count - 1
    end = intervals if intervals % 2 == 0 else intervals - 3
    if end > 0:
        panel = np.ones(end + 1)
        panel[1:end:2] = 4.0
        panel[2:end - 1:2] = 2.0
        w[: end + 1] += panel * (step / 3.0)
    if end != intervals:
        w[end:end + 4] += np.array([1.0, 3.0, 3.0, 1.0]) * (3.0 * step / 8.0)
    return w


def radial_integral(f, grid: RadialGrid, n: int) -> float:
    """``nu_n * int_0^L f(r) r^(n-1) dr`` by composite Simpson."""
    f = np.asarray(f, dtype=float)
    if f.shape != grid.nodes.shape:
        raise ValueError(f"shape mismatch: {f.shape} vs grid {grid.nodes.shape}")
    nu = angular_factor(n)
    weights = simpson_weights(grid.node_count, grid.step)
    if n == 1:
        return float(nu * (weights @ f))
    return float(nu * (weights @ (f * grid.nodes ** (n - 1))))


def differentiate(f, grid: RadialGrid) -> np.ndarray:
    """Fourth-order finite-difference derivative on the grid.

    Central five-point stencil in the interior, one-sided fourth-order
    stencils on the two outermost nodes at each end.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != grid.nodes.shape:
        raise ValueError(f"shape mismatch: {f.shape} vs grid {grid.nodes.shape}")
    if f.size < 5:
        raise DomainError("need at least 5 nodes to differentiate")
    h12 = 12.0 * grid.step
    d = np.empty_like(f)
    d[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / h12
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / h12
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / h12
    d[-1] = (25.0 * f[-1] - 48.0 * f[-2] + 36.0 * f[-3] - 16.0 * f[-4] + 3.0 * f[-5]) / h12
    d[-2] = (3.0 * f[-1] + 10.0 * f[-2] - 18.0 * f[-3] + 6.0 * f[-4] - f[-5]) / h12
    return d
