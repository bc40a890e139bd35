"""Inversion of ``(-Delta + M^2)`` on symmetric sources.

The FFT solvers extend the source to ``[-L, L]`` (evenly in 1D; in 3D the
odd function ``r sigma(r)``, which reduces the radial Laplacian to a 1D
second derivative), pad to a power of two of at least ``4 (N - 1)`` points
and divide by ``k^2 + M^2``. The periodic images of the padded problem are
removed analytically, so the result matches the free-space Green's function
up to quadrature error.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.fft as sfft
from scipy.integrate import cumulative_simpson

from .errors import DomainError, ResolutionError
from .grid import RadialGrid, simpson_weights
from .profiles import ScalarProfile

MIN_TRANSFORM = 512


def _transform_size(node_count: int) -> int:
    size = 1 << max(0, (4 * (node_count - 1) - 1)).bit_length()
    if size < MIN_TRANSFORM:
        raise ResolutionError(f"transform needs at least {MIN_TRANSFORM} points, grid gives {size}")
    return size


def _periodic_solve(extended: np.ndarray, step: float, M: float) -> np.ndarray:
    k = 2 * np.pi * sfft.rfftfreq(extended.size, d=step)
    denom = k * k + M * M
    mult = np.divide(1.0, denom, out=np.zeros_like(denom), where=denom > 0)
    return sfft.irfft(sfft.rfft(extended) * mult, n=extended.size)


def _check(source, grid: RadialGrid) -> np.ndarray:
    source = np.asarray(source, dtype=float)
    if source.shape != grid.nodes.shape:
        raise ValueError(f"shape mismatch: {source.shape} vs grid {grid.nodes.shape}")
    return source


def _integral(f, grid: RadialGrid) -> float:
    return float(simpson_weights(grid.node_count, grid.step) @ f)


def yukawa_invert_1d(source, M: float, grid: RadialGrid) -> ScalarProfile:
    """Even solution of ``-h'' + M^2 h = source`` on the line."""
    if not M > 0:
        raise DomainError(f"1D inversion needs M > 0, got {M}")
    source = _check(source, grid)
    N, r = grid.node_count, grid.nodes
    size = _transform_size(N)
    w = np.zeros(size)
    w[:N] = source
    w[size - N + 1:] = source[1:][::-1]
    h = _periodic_solve(w, grid.step, M)[:N]
    # images at multiples of the period P contribute 2 B cosh(M r) / (e^{MP} - 1)
    period = size * grid.step
    b = _integral(source * np.cosh(M * r), grid) / M
    h = h + 2 * b * np.cosh(M * r) / math.expm1(M * period)
    return ScalarProfile(grid, h, mass=M)


def yukawa_invert_3d(source, M: float, grid: RadialGrid) -> ScalarProfile:
    """Radial solution of ``-h'' - (2/r) h' + M^2 h = source`` decaying at infinity.

    ``h(0)`` is filled by quadrature of the Green's function, since the
    FFT recovers ``r h`` and the division by ``r`` is singular there.
    """
    if not M >= 0:
        raise DomainError(f"boson mass must be non-negative, got {M}")
    source = _check(source, grid)
    N, r = grid.node_count, grid.nodes
    size = _transform_size(N)
    rs = r * source
    w = np.zeros(size)
    w[:N] = rs
    w[size - N + 1:] = -rs[1:][::-1]
    sol = _periodic_solve(w, grid.step, M)[:N]
    period = size * grid.step
    if M > 0:
        b = _integral(rs * np.sinh(M * r), grid) / M
        sol = sol + 2 * b * np.sinh(M * r) / math.expm1(M * period)
    else:
        # dropping the zero mode leaves a linear ramp from the images
        sol = sol + 2 * _integral(r * rs, grid) / period * r
    h = np.empty(N)
    h[1:] = sol[1:] / r[1:]
    h[0] = _integral(rs * np.exp(-M * r), grid)
    return ScalarProfile(grid, h, mass=M)


def yukawa_invert(source, M: float, grid: RadialGrid, n: int) -> ScalarProfile:
    """Dispatch to the 1D or 3D inversion."""
    if n == 1:
        return yukawa_invert_1d(source, M, grid)
    if n == 3:
        return yukawa_invert_3d(source, M, grid)
    raise DomainError(f"dimension must be 1 or 3, got {n}")


def _cumulative(f, r) -> np.ndarray:
    return cumulative_simpson(f, x=r, initial=0.0)


def greens_oracle_3d(source, M: float, grid: RadialGrid) -> ScalarProfile:
    """Radial Yukawa (or Newtonian, ``M = 0``) potential by direct quadrature."""
    source = _check(source, grid)
    r = grid.nodes
    rs = r * source
    h = np.empty_like(r)
    if M > 0:
        inner = _cumulative(rs * np.sinh(M * r), r)
        outer_full = _cumulative(rs * np.exp(-M * r), r)
        outer = outer_full[-1] - outer_full
        h[1:] = (np.exp(-M * r[1:]) * inner[1:] + np.sinh(M * r[1:]) * outer[1:]) / (M * r[1:])
        h[0] = outer[0]
    else:
        inner = _cumulative(r * rs, r)
        outer_full = _cumulative(rs, r)
        outer = outer_full[-1] - outer_full
        h[1:] = inner[1:] / r[1:] + outer[1:]
        h[0] = outer[0]
    return ScalarProfile(grid, h, mass=M)


def greens_oracle_1d(source, M: float, grid: RadialGrid) -> ScalarProfile:
    """Even 1D Yukawa potential by quadrature of ``e^{-M|x-y|} / (2M)``."""
    if not M > 0:
        raise DomainError(f"1D inversion needs M > 0, got {M}")
    source = _check(source, grid)
    r = grid.nodes
    # contributions from y in [0, x], y in [x, L] and the mirror image y < 0
    inner = _cumulative(source * np.exp(M * r), r)
    outer_full = _cumulative(source * np.exp(-M * r), r)
    outer = outer_full[-1] - outer_full
    h = (np.exp(-M * r) * inner + np.exp(M * r) * outer + np.exp(-M * r) * outer_full[-1]) / (2 * M)
    return ScalarProfile(grid, h, mass=M)
