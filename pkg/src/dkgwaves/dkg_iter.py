"""Iterative construction of Dirac-Klein-Gordon solitary waves.

Starting from a cubic Dirac ground state, alternate between solving the
field equation for ``h`` with the current spinor density and re-shooting
the spinor with ``h`` frozen, adjusting the coupling ``g`` so that the
spinor with the original ``v(0)`` is localized. Repeat until ``g`` and
``h(0)`` settle, then rescale to unit coupling.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np
from numba import njit

from . import observables
from .errors import DomainError
from .field import yukawa_invert
from .grid import RadialGrid, make_grid
from .ivp import R0_DEFAULT, EventSet, OdeProblem, integrate, origin_start
from .nld import solve_nld
from .profiles import PhysParams, ScalarProfile, SolitaryWave, SpinorProfile
from .shooting import (EVENT_NAMES, RUNAWAY_FACTOR, bisect, classify, complete_profile,
                       scan_from, spline_eval, spline_table)

TOL = 1e-8
G_RANGE = (0.1, 10.0)
G_TOL = 1e-10


@njit
def _rhs(r, y, p, table):
    n, m, w, g, step = p[0], p[1], p[2], p[3], p[4]
    s = m - g * spline_eval(table, step, r)
    v, u = y[0], y[1]
    d = np.empty(2)
    d[0] = -(s + w) * u
    d[1] = -(n - 1) / r * u - (s - w) * v
    return d


@njit
def _events(r, y, p, table):
    m, w, g, step, v0 = p[1], p[2], p[3], p[4], p[5]
    s = m - g * spline_eval(table, step, r)
    v, u = y[0], y[1]
    ev = np.empty(3)
    ev[0] = v
    ev[1] = u if (s > w and v > 0) else 1.0
    ev[2] = RUNAWAY_FACTOR * (1 + v0 * v0) - (v * v + u * u)
    return ev


EVENTS = EventSet(_events, EVENT_NAMES)


@dataclass(frozen=True)
class TraceRow:
    """One iteration: coupling, central values and raw/unit-coupling observables."""

    iter: int
    g: float
    v0: float
    h0: float
    Q: float
    E: float
    Qt: float
    Et: float
    eps: float
    rel_eps: float

    def as_dict(self) -> dict:
        return asdict(self)


def _row(k: int, g: float, v0: float, h0: float, obs: observables.Observables) -> TraceRow:
    return TraceRow(k, g, v0, h0, obs.Q, obs.E, g * obs.Q, g * obs.E, obs.epsilon,
                    obs.relative_epsilon)


def _spinor_trajectory(params: PhysParams, table: np.ndarray, grid: RadialGrid, v0: float,
                       output=None):
    h0 = float(table[3, 0])
    problem = OdeProblem(_rhs, R0_DEFAULT, grid.length, origin_start(params, v0, h0), TOL, TOL,
                         np.array([params.n, params.m, params.omega, params.g, grid.step, v0]),
                         table)
    traj = integrate(problem, EVENTS, output)
    s = params.m - params.g * _spline_at(table, grid.step, traj.r_stop)
    return traj, s


def _spline_at(table, step, r) -> float:
    return float(spline_eval(table, step, r))


def _classify_g(params: PhysParams, table, grid, v0, g) -> str:
    p = params.with_(g=g)
    traj, s = _spinor_trajectory(p, table, grid, v0)
    return classify(traj, s, p.omega)


def adjust_coupling(h: ScalarProfile, v0: float, params: PhysParams,
                    table: np.ndarray | None = None,
                    g_range: tuple[float, float] = G_RANGE) -> float:
    """Coupling for which the spinor with ``v(0) = v0`` in the frozen field ``h`` is localized.

    The search starts at ``params.g`` and stays within ``g_range``.

    Raises:
        NoBracketError: the classification does not change in that range.
    """
    if table is None:
        table = spline_table(h.values, h.grid)
    fn = lambda g: _classify_g(params, table, h.grid, v0, g)  # noqa: E731
    lo, hi, c_lo = scan_from(fn, params.g, *g_range)
    return bisect(fn, lo, hi, c_lo, abs_tol=G_TOL)


def seed_from_nld(n: int, omega: float, m: float = 1.0, dr: float = 0.01) -> SolitaryWave:
    """Cubic Dirac ground state viewed as a wave with ``h = v^2 - u^2`` and ``g = 1``."""
    sol = solve_nld(n, omega, m, dr)
    wave = sol.to_wave()
    obs = observables.compute(wave)
    wave.trace.append(_row(0, 1.0, sol.v0, wave.h0, obs))
    return wave


def iterate(n: int, omega: float, m: float = 1.0, M: float = 1.0, dr: float = 0.01,
            max_iter: int = 20, tol_g: float = 1e-6, tol_h0: float = 1e-6,
            seed: SolitaryWave | None = None,
            g_range: tuple[float, float] = G_RANGE) -> SolitaryWave:
    """Fixed-point iteration for a solitary wave in the raw gauge.

    Each step solves the field equation with the previous spinor density,
    adjusts ``g`` with ``v(0)`` frozen at the seed value and re-integrates
    the spinor. The loop stops when ``g`` and ``h(0)`` change by less than
    ``tol_g`` and ``tol_h0``; otherwise the result is flagged unconverged
    after ``max_iter`` iterations. ``seed`` replaces the cubic Dirac start
    (its spinor, ``g`` and ``h(0)`` become iteration zero).
    """
    if max_iter < 1:
        raise DomainError("max_iter must be at least 1")
    if n == 1 and not M > 0:
        raise DomainError("the 1D iteration needs M > 0")
    params = PhysParams(n=n, m=m, M=M, g=1.0, omega=omega)
    seed = seed or seed_from_nld(n, omega, m, dr)
    grid = seed.grid
    v0 = seed.v0
    kappa = math.sqrt(m * m - omega * omega)
    trace = list(seed.trace)
    spinor = seed.spinor
    g_prev, h0_prev = seed.params.g, seed.h0
    converged = False
    for k in range(1, max_iter + 1):
        h = yukawa_invert(spinor.density, M, grid, n)
        table = spline_table(h.values, grid)
        g = adjust_coupling(h, v0, params.with_(g=g_prev), table, g_range)
        params = params.with_(g=g)
        traj, _ = _spinor_trajectory(params, table, grid, v0, grid)
        v, u, _ = complete_profile(traj, grid, v0, kappa, n)
        spinor = SpinorProfile(grid, v, u)
        obs = observables.evaluate(grid, n, omega, v, u, h.values, m_eff=m, g=g, M=M,
                                   mode="dkg_massive")
        trace.append(_row(k, g, v0, h.center, obs))
        if abs(g - g_prev) < tol_g and abs(h.center - h0_prev) < tol_h0:
            converged = True
            break
        g_prev, h0_prev = g, h.center
    return SolitaryWave(params, spinor, h, gauge="raw", method="iterative", trace=trace,
                        converged=converged, meta={"iterations": len(trace) - 1})


def gauge_normalize(wave: SolitaryWave) -> SolitaryWave:
    """Rescale to unit coupling: ``h -> g h``, ``(v, u) -> sqrt(g) (v, u)``.

    Charge and energy scale by ``g``. The boson mass is unchanged; the
    value ``g M`` is recorded under ``meta["mapped_boson_mass"]`` for reference.
    """
    if wave.gauge != "raw":
        raise ValueError(f"wave is already in gauge {wave.gauge!r}")
    g = wave.params.g
    meta = dict(wave.meta, raw_coupling=g, mapped_boson_mass=g * wave.params.M)
    return replace(wave, params=wave.params.with_(g=1.0), spinor=wave.spinor.scaled(math.sqrt(g)),
                   scalar=wave.scalar.scaled(g), gauge="unit_coupling", trace=list(wave.trace),
                   meta=meta)
