"""Adaptive Dormand-Prince 4(5) integration of the radial ODE systems.

The right-hand side and event functions are numba-compiled callables with
the signature ``f(r, y, params, table)``: ``params`` is a flat float array
and ``table`` a 2-D float array (spline coefficients of a frozen field, or a
dummy). An event fires when any component of the event vector is <= 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numba import njit

from .errors import DomainError
from .grid import RadialGrid
from .profiles import PhysParams

R0_DEFAULT = 1e-6
MAX_STEPS = 5_000_000

# Dormand-Prince tableau
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = 71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40
# continuous extension (Hairer, Norsett and Wanner, DOPRI5)
_D1, _D3, _D4 = -12715105075 / 11282082432, 87487479700 / 32700410799, -10690763975 / 1880347072
_D5, _D6, _D7 = 701980252875 / 199316789632, -1453857185 / 822651844, 69997945 / 29380423

_REACHED_END, _EVENT, _STEP_FAILURE = 0, 1, 2
_EVENT_TOL = 1e-10


@njit
def _dense_coeffs(y, yn, k1, k3, k4, k5, k6, k7, h):
    diff = yn - y
    b = h * k1 - diff
    c = diff - h * k7 - b
    d = h * (_D1 * k1 + _D3 * k3 + _D4 * k4 + _D5 * k5 + _D6 * k6 + _D7 * k7)
    return diff, b, c, d


@njit
def _dense(y, diff, b, c, d, t):
    s = 1.0 - t
    return y + t * (diff + s * (b + t * (c + s * d)))


@njit
def _first_trigger(ev):
    for j in range(ev.shape[0]):
        if ev[j] <= 0.0:
            return j
    return -1


@njit
def _no_events(r, y, params, table):
    return np.ones(0)


@njit
def _dopri45(rhs, events, params, table, r0, y0, r_end, atol, rtol, out_r, h_min, max_steps):
    dim = y0.shape[0]
    n_out = out_r.shape[0]
    out = np.full((n_out, dim), np.nan)
    r = r0
    y = y0.copy()
    gi = 0
    while gi < n_out and out_r[gi] < r0:
        gi += 1
    first = gi
    if gi < n_out and out_r[gi] == r0:
        out[gi] = y
        gi += 1

    hit = _first_trigger(events(r, y, params, table))
    if hit >= 0:
        return out, first, gi, _EVENT, hit, r, y

    f = rhs(r, y, params, table)
    sc = atol + rtol * np.abs(y)
    d0 = np.sqrt(np.mean((y / sc) ** 2))
    d1 = np.sqrt(np.mean((f / sc) ** 2))
    h = 0.01 * d0 / d1 if (d0 > 1e-5 and d1 > 1e-5) else 1e-6
    h = min(h, r_end - r)
    err_old = 1e-4
    steps = 0
    while r < r_end:
        steps += 1
        if h < h_min or steps > max_steps:
            return out, first, gi, _STEP_FAILURE, -1, r, y
        last = r + h >= r_end
        if last:
            h = r_end - r
        k1 = f
        k2 = rhs(r + h / 5, y + h * _A21 * k1, params, table)
        k3 = rhs(r + 3 * h / 10, y + h * (_A31 * k1 + _A32 * k2), params, table)
        k4 = rhs(r + 4 * h / 5, y + h * (_A41 * k1 + _A42 * k2 + _A43 * k3), params, table)
        k5 = rhs(r + 8 * h / 9, y + h * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4), params, table)
        k6 = rhs(r + h, y + h * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5),
                 params, table)
        yn = y + h * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
        rn = r_end if last else r + h
        k7 = rhs(rn, yn, params, table)
        e = h * (_E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6 + _E7 * k7)
        sc = atol + rtol * np.maximum(np.abs(y), np.abs(yn))
        err = np.sqrt(np.mean((e / sc) ** 2))
        if not np.isfinite(err):
            h *= 0.2
            continue
        if err > 1.0:
            h *= max(0.2, 0.9 * err ** -0.2)
            continue

        hit = _first_trigger(events(rn, yn, params, table))
        r_stop = rn
        c_diff, c_b, c_c, c_d = _dense_coeffs(y, yn, k1, k3, k4, k5, k6, k7, h)
        if hit >= 0:
            lo, hi = 0.0, 1.0
            while (hi - lo) * h > _EVENT_TOL:
                mid = 0.5 * (lo + hi)
                ym = _dense(y, c_diff, c_b, c_c, c_d, mid)
                if _first_trigger(events(r + mid * h, ym, params, table)) >= 0:
                    hi = mid
                else:
                    lo = mid
            r_stop = r + hi * h
            ys = _dense(y, c_diff, c_b, c_c, c_d, hi)
            hit = _first_trigger(events(r_stop, ys, params, table))
            if hit < 0:
                hit = 0
        while gi < n_out and out_r[gi] <= r_stop:
            out[gi] = _dense(y, c_diff, c_b, c_c, c_d, (out_r[gi] - r) / h)
            gi += 1
        if hit >= 0:
            return out, first, gi, _EVENT, hit, r_stop, ys
        r = rn
        y = yn
        f = k7
        if err > 0:
            fac = 0.9 * err ** (-0.7 / 5) * err_old ** (0.4 / 5)
        else:
            fac = 5.0
        h *= min(5.0, max(0.2, fac))
        err_old = max(err, 1e-4)
    return out, first, gi, _REACHED_END, -1, r, y


@dataclass(frozen=True)
class OdeProblem:
    """Initial-value problem for a numba-compiled right-hand side."""

    rhs: Callable
    r_start: float
    r_end: float
    initial_state: np.ndarray
    abs_tol: float = 1e-8
    rel_tol: float = 1e-8
    params: np.ndarray = field(default_factory=lambda: np.zeros(1))
    table: np.ndarray = field(default_factory=lambda: np.zeros((1, 1)))

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("tolerances must be positive")
        if not self.r_start >= 0:
            raise DomainError(f"r_start must be non-negative, got {self.r_start}")
        if not self.r_end > self.r_start:
            raise DomainError(f"need r_end > r_start, got {self.r_start} .. {self.r_end}")
        state = np.ascontiguousarray(self.initial_state, dtype=float)
        if state.ndim != 1 or not np.all(np.isfinite(state)):
            raise DomainError("initial state must be a finite vector")
        object.__setattr__(self, "initial_state", state)
        object.__setattr__(self, "params", np.ascontiguousarray(self.params, dtype=float))
        object.__setattr__(self, "table", np.ascontiguousarray(self.table, dtype=float))


@dataclass(frozen=True)
class EventSet:
    """Compiled event function together with one name per component."""

    func: Callable
    names: Sequence[str]


NO_EVENTS = EventSet(_no_events, ())


@dataclass(frozen=True)
class Trajectory:
    """Samples of an integration on the nodes of an output grid.

    ``states[k]`` is the state at ``radii[k] = nodes[offset + k]``. Nodes
    past the stopping radius are not sampled.
    """

    radii: np.ndarray
    states: np.ndarray
    offset: int
    termination: str
    r_stop: float
    y_stop: np.ndarray
    event_name: str | None = None

    @property
    def reached_end(self) -> bool:
        return self.termination == "reached_end"

    @property
    def stop_index(self) -> int:
        """One past the last sampled grid node."""
        return self.offset + len(self.radii)


def integrate(problem: OdeProblem, events: EventSet = NO_EVENTS,
              output_grid: RadialGrid | np.ndarray | None = None,
              max_steps: int = MAX_STEPS) -> Trajectory:
    """Integrate ``problem`` and sample the solution on ``output_grid``.

    Steps are accepted by an embedded 4(5) error estimate with PI control;
    samples come from the pair's fourth-order continuous extension. The
    integration stops at the first event, located by bisection to 1e-10 in r.
    A step below ``1e-14 * r_end`` ends the run with ``step_failure``.
    """
    if output_grid is None:
        out_r = np.zeros(0)
    elif isinstance(output_grid, RadialGrid):
        out_r = np.asarray(output_grid.nodes)
    else:
        out_r = np.ascontiguousarray(output_grid, dtype=float)
    h_min = 1e-14 * max(abs(problem.r_end), 1.0)
    out, first, stop, status, idx, r_stop, y_stop = _dopri45(
        problem.rhs, events.func, problem.params, problem.table, float(problem.r_start),
        problem.initial_state, float(problem.r_end), float(problem.abs_tol),
        float(problem.rel_tol), out_r, h_min, int(max_steps))
    name = None
    if status == _EVENT:
        name = events.names[idx] if idx < len(events.names) else str(idx)
        termination = f"event_{name}"
    elif status == _STEP_FAILURE:
        termination = "step_failure"
    else:
        termination = "reached_end"
    return Trajectory(radii=out_r[first:stop].copy(), states=out[first:stop], offset=first,
                      termination=termination, r_stop=float(r_stop), y_stop=y_stop,
                      event_name=name)


def origin_start(params: PhysParams, v0: float, h0: float = 0.0, r0: float = R0_DEFAULT) -> np.ndarray:
    """Series start ``[v, u]`` at a small radius away from the origin.

    With ``u(0) = 0`` the regular solution has ``u = a r`` near the origin,
    where ``n a = -(m - omega - g h0) v0``.
    """
    if not r0 > 0:
        raise DomainError(f"start radius must be positive, got {r0}")
    s0 = params.m - params.g * h0
    return np.array([v0, -(s0 - params.omega) * v0 * r0 / params.n])
