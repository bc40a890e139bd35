"""Overshoot/undershoot classification, bracketing and bisection for radial shooting.

Every shooting system here shares one event layout: ``v_zero`` (the upper
component crosses zero), ``escape`` (inside the classically forbidden region,
``s > omega``, the lower component turns negative while ``v`` is still
positive, so the solution is growing away from the decaying branch) and
``runaway`` (the state norm explodes).
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from numba import njit
from scipy.interpolate import CubicSpline

from .errors import NoBracketError, NonConvergenceError
from .grid import RadialGrid
from .ivp import Trajectory

UNDER = "undershoot"
OVER = "overshoot"
EVENT_NAMES = ("v_zero", "escape", "runaway")
RUNAWAY_FACTOR = 1e12


def classify(traj: Trajectory, s_stop: float, omega: float) -> str:
    """Decide on which side of the localized solution a trajectory lies.

    ``s_stop`` is the effective mass ``m - g h`` at the stopping radius.
    Trajectories that reach the end of the interval are split by the sign
    of their growing mode ``v - u (s + omega) / kappa``.
    """
    if traj.termination == "event_v_zero":
        return OVER
    if traj.termination == "event_escape":
        return UNDER
    if traj.termination == "event_runaway":
        return UNDER if s_stop > omega else OVER
    if traj.termination == "step_failure":
        return OVER
    v, u = traj.y_stop[0], traj.y_stop[1]
    kappa = math.sqrt(max(s_stop * s_stop - omega * omega, 1e-300))
    return UNDER if v - u * (s_stop + omega) / kappa > 0 else OVER


def scan_bracket(classify_at: Callable[[float], str], start: float = 1e-3,
                 factor: float = 1.3, stop: float = 10.0) -> tuple[float, float, str]:
    """Geometric scan for the first change of classification.

    Returns ``(lo, hi, class_lo)`` with ``classify_at(hi) != class_lo``.
    """
    lo = start
    c_lo = classify_at(lo)
    while lo < stop:
        hi = lo * factor
        if classify_at(hi) != c_lo:
            return lo, hi, c_lo
        lo = hi
    raise NoBracketError(f"classification stayed {c_lo} on [{start}, {stop}]")


def scan_from(classify_at: Callable[[float], str], start: float, lower: float, upper: float,
              factor: float = 1.3) -> tuple[float, float, str]:
    """Bracket a parameter that undershoots when small and overshoots when large.

    Walks geometrically from ``start`` in the direction indicated by its
    classification, staying inside ``[lower, upper]``.
    """
    x = min(max(start, lower), upper)
    c = classify_at(x)
    if c == UNDER:
        while x < upper:
            nxt = min(x * factor, upper)
            if classify_at(nxt) == OVER:
                return x, nxt, UNDER
            x = nxt
    else:
        while x > lower:
            nxt = max(x / factor, lower)
            if classify_at(nxt) == UNDER:
                return nxt, x, UNDER
            x = nxt
    raise NoBracketError(f"classification stayed {c} on [{lower}, {upper}]")


def bisect(classify_at: Callable[[float], str], lo: float, hi: float, class_lo: str,
           rel_tol: float = 0.0, abs_tol: float = 0.0, max_steps: int = 200) -> float:
    """Shrink a classification bracket until ``hi - lo <= max(abs_tol, rel_tol * hi)``."""
    for _ in range(max_steps):
        if hi - lo <= max(abs_tol, rel_tol * abs(hi)):
            return 0.5 * (lo + hi)
        mid = 0.5 * (lo + hi)
        if classify_at(mid) == class_lo:
            lo = mid
        else:
            hi = mid
    raise NonConvergenceError(f"bisection did not converge in {max_steps} steps")


def breakdown_index(traj: Trajectory) -> int:
    """Grid index where ``|v| + |u|`` is smallest before the trajectory turns away."""
    mag = np.abs(traj.states[:, 0]) + np.abs(traj.states[:, 1])
    valid = np.isfinite(mag) & (traj.radii > 0)
    if not np.any(valid):
        raise NonConvergenceError("trajectory sampled no grid nodes")
    mag = np.where(valid, mag, np.inf)
    return traj.offset + int(np.argmin(mag))


def complete_profile(traj: Trajectory, grid: RadialGrid, v0: float, kappa: float,
                     n: int) -> tuple[np.ndarray, np.ndarray, int]:
    """Dense ``(v, u)`` on the whole grid from a shooting trajectory.

    The trajectory is kept up to its breakdown radius and continued by the
    linearized decay ``exp(-kappa r) r^(-(n-1)/2)``. Node 0 is set to ``(v0, 0)``.
    """
    r = grid.nodes
    v = np.empty(grid.node_count)
    u = np.empty(grid.node_count)
    cut = breakdown_index(traj)
    k = cut - traj.offset
    v[traj.offset:cut + 1] = traj.states[:k + 1, 0]
    u[traj.offset:cut + 1] = traj.states[:k + 1, 1]
    v[0], u[0] = v0, 0.0
    if traj.offset > 1:
        v[1:traj.offset] = v0
        u[1:traj.offset] = 0.0
    tail = np.exp(-kappa * (r[cut:] - r[cut])) * (r[cut] / r[cut:]) ** ((n - 1) / 2)
    v[cut:] = v[cut] * tail
    u[cut:] = u[cut] * tail
    return v, u, cut


def spline_table(values: np.ndarray, grid: RadialGrid) -> np.ndarray:
    """Cubic spline coefficients, shape ``(4, N-1)``, with zero slope at the origin.

    Evaluate in compiled code with :func:`spline_eval`.
    """
    cs = CubicSpline(grid.nodes, values, bc_type=((1, 0.0), "not-a-knot"))
    return np.ascontiguousarray(cs.c)


@njit
def spline_eval(table, step, r):
    """Horner evaluation of a :func:`spline_table` at radius ``r`` (extrapolates past the end)."""
    i = int(r / step)
    last = table.shape[1] - 1
    if i > last:
        i = last
    t = r - i * step
    return ((table[0, i] * t + table[1, i]) * t + table[2, i]) * t + table[3, i]
