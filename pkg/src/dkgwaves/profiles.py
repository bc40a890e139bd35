"""Data types shared by the solvers: parameters, profiles and solitary waves."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from .errors import DomainError
from .grid import RadialGrid

GAUGES = ("raw", "unit_coupling")
METHODS = ("nld", "iterative", "shooting")


@dataclass(frozen=True)
class PhysParams:
    """Physical configuration of a stationary Dirac-Klein-Gordon solve.

    ``m`` is the spinor mass, ``M`` the boson mass and ``g`` the Yukawa
    coupling; ``omega`` is the frequency of the standing wave.
    """

    n: int
    m: float = 1.0
    M: float = 1.0
    g: float = 1.0
    omega: float = 0.5

    def __post_init__(self):
        if self.n not in (1, 3):
            raise DomainError(f"dimension must be 1 or 3, got {self.n}")
        if not self.m > 0:
            raise DomainError(f"spinor mass must be positive, got {self.m}")
        if not self.M >= 0:
            raise DomainError(f"boson mass must be non-negative, got {self.M}")
        if not self.g > 0:
            raise DomainError(f"coupling must be positive, got {self.g}")
        if not 0 < self.omega < self.m:
            raise DomainError(f"need 0 < omega < m, got omega={self.omega}, m={self.m}")

    def with_(self, **changes) -> "PhysParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class SpinorProfile:
    """Radial components ``v`` (upper) and ``u`` (lower) sampled on a grid."""

    grid: RadialGrid
    v: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        for name in ("v", "u"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != self.grid.nodes.shape:
                raise ValueError(f"{name} has shape {arr.shape}, grid has {self.grid.nodes.shape}")
            object.__setattr__(self, name, arr)

    @property
    def density(self) -> np.ndarray:
        """Scalar density ``v^2 - u^2`` (the Dirac bilinear)."""
        return self.v ** 2 - self.u ** 2

    @property
    def charge_density(self) -> np.ndarray:
        return self.v ** 2 + self.u ** 2

    def scaled(self, factor: float) -> "SpinorProfile":
        return SpinorProfile(self.grid, factor * self.v, factor * self.u)


@dataclass(frozen=True)
class ScalarProfile:
    """Boson field on a grid.

    With ``shifted=True`` the stored values are the massless-frame field
    whose limit at infinity is minus the effective mass.
    """

    grid: RadialGrid
    values: np.ndarray
    mass: float = 1.0
    shifted: bool = False

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.shape != self.grid.nodes.shape:
            raise ValueError(f"values have shape {arr.shape}, grid has {self.grid.nodes.shape}")
        object.__setattr__(self, "values", arr)

    @property
    def center(self) -> float:
        return float(self.values[0])

    def scaled(self, factor: float) -> "ScalarProfile":
        return replace(self, values=factor * self.values)


@dataclass
class SolitaryWave:
    """A spinor/boson pair together with the parameters it solves.

    ``trace`` holds one row per iteration for iterative solves; ``meta``
    carries solver-specific extras (mapped boson mass, effective mass, ...).
    """

    params: PhysParams
    spinor: SpinorProfile
    scalar: ScalarProfile
    gauge: str = "raw"
    method: str = "iterative"
    trace: list = field(default_factory=list)
    converged: bool = True
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.gauge not in GAUGES:
            raise ValueError(f"unknown gauge {self.gauge!r}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.spinor.grid != self.scalar.grid:
            raise ValueError("spinor and scalar live on different grids")

    @property
    def grid(self) -> RadialGrid:
        return self.spinor.grid

    @property
    def v0(self) -> float:
        return float(self.spinor.v[0])

    @property
    def h0(self) -> float:
        return self.scalar.center

    def positive_center_density(self) -> bool:
        """Necessary condition: the scalar density must be positive at the origin."""
        return bool(self.spinor.density[0] > 0)
