"""Ground states of the cubic nonlinear Dirac equation by shooting on v(0)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from . import observables
from .grid import RadialGrid, make_grid
from .ivp import R0_DEFAULT, EventSet, OdeProblem, integrate, origin_start
from .profiles import PhysParams, ScalarProfile, SolitaryWave, SpinorProfile
from .shooting import EVENT_NAMES, RUNAWAY_FACTOR, bisect, classify, complete_profile, scan_bracket

TOL = 1e-8


@njit
def _rhs(r, y, p, table):
    n, m, w = p[0], p[1], p[2]
    v, u = y[0], y[1]
    s = m - (v * v - u * u)
    d = np.empty(2)
    d[0] = -(s + w) * u
    d[1] = -(n - 1) / r * u - (s - w) * v
    return d


@njit
def _events(r, y, p, table):
    m, w, v0 = p[1], p[2], p[3]
    v, u = y[0], y[1]
    s = m - (v * v - u * u)
    ev = np.empty(3)
    ev[0] = v
    ev[1] = u if (s > w and v > 0) else 1.0
    ev[2] = RUNAWAY_FACTOR * (1 + v0 * v0) - (v * v + u * u)
    return ev


EVENTS = EventSet(_events, EVENT_NAMES)


@dataclass(frozen=True)
class NldSolution:
    """Nodeless cubic Dirac solitary wave on a grid."""

    params: PhysParams
    grid: RadialGrid
    spinor: SpinorProfile
    v0: float
    breakdown_radius: float

    @property
    def density(self) -> np.ndarray:
        return self.spinor.density

    def to_wave(self) -> SolitaryWave:
        """Package as a wave whose field is ``h = v^2 - u^2`` at unit coupling."""
        scalar = ScalarProfile(self.grid, self.spinor.density, mass=0.0)
        return SolitaryWave(self.params, self.spinor, scalar, method="nld")


def _trajectory(params: PhysParams, v0: float, r_end: float, output=None, tol: float = TOL):
    problem = OdeProblem(_rhs, R0_DEFAULT, r_end, origin_start(params, v0, h0=v0 * v0 / params.g),
                         tol, tol, np.array([params.n, params.m, params.omega, v0]))
    traj = integrate(problem, EVENTS, output)
    v, u = traj.y_stop[0], traj.y_stop[1]
    return traj, params.m - (v * v - u * u)


def classify_v0(params: PhysParams, v0: float, r_end: float) -> str:
    traj, s = _trajectory(params, v0, r_end)
    return classify(traj, s, params.omega)


def solve_nld(n: int, omega: float, m: float = 1.0, dr: float = 0.01,
              grid: RadialGrid | None = None) -> NldSolution:
    """Shoot on ``v(0)`` for the nodeless localized solution.

    A geometric scan over ``[1e-3, 10]`` finds the first change of
    classification; bisection narrows it to ``1e-12 v0``.

    Raises:
        DomainError: ``omega`` outside ``(0, m)``.
        NoBracketError: the classification never changes over the scan.
        NonConvergenceError: bisection exceeded 200 steps.
    """
    params = PhysParams(n=n, m=m, M=0.0, g=1.0, omega=omega)
    grid = grid or make_grid(omega, m, dr)
    r_end = grid.length
    lo, hi, c_lo = scan_bracket(lambda x: classify_v0(params, x, r_end))
    v0 = bisect(lambda x: classify_v0(params, x, r_end), lo, hi, c_lo, rel_tol=1e-12)
    traj, _ = _trajectory(params, v0, r_end, grid)
    kappa = math.sqrt(m * m - omega * omega)
    v, u, cut = complete_profile(traj, grid, v0, kappa, n)
    return NldSolution(params, grid, SpinorProfile(grid, v, u), v0, float(grid.nodes[cut]))


def nld_observables(sol: NldSolution) -> observables.Observables:
    return observables.compute(sol.to_wave(), mode="nld_cubic")


def nld_virial_residual(sol: NldSolution) -> float:
    """``omega Q - ((n - 2) / n) K - N`` with ``K`` from finite differences."""
    return nld_observables(sol).epsilon


def first_integral(v, u, omega: float, m: float = 1.0) -> np.ndarray:
    """Quantity conserved along 1D trajectories; zero on the localized branch."""
    v = np.asarray(v)
    u = np.asarray(u)
    return (m - omega) * v * v - (m + omega) * u * u - 0.5 * (v * v - u * u) ** 2
