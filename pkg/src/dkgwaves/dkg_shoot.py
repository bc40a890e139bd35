"""Massless-boson solitary waves in 3D by shooting on v(0).

With ``M = 0`` the spinor mass can be absorbed into the field: writing
``g h = g h* + mu`` the system has no explicit mass, frequency ``omega0 = 1``
and ``g = 1``. For a prescribed ``h*(0)`` one shoots on ``v(0)``, reads off
the effective mass ``mu = -h*(inf)`` and rescales to unit spinor mass, which
gives a solution at frequency ``1 / mu``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from . import observables
from .errors import DegenerateError, DomainError
from .grid import RadialGrid, radial_integral
from .ivp import R0_DEFAULT, EventSet, OdeProblem, Trajectory, integrate
from .profiles import PhysParams, ScalarProfile, SolitaryWave, SpinorProfile
from .shooting import (EVENT_NAMES, RUNAWAY_FACTOR, bisect, breakdown_index, classify,
                       scan_bracket)

OMEGA0 = 1.0
TOL = 1e-8
PILOT_RADIUS = 1e4


@njit
def _rhs(r, y, p, table):
    w, g = p[0], p[1]
    v, u, hs, dh = y[0], y[1], y[2], y[3]
    d = np.empty(4)
    d[0] = -(w - g * hs) * u
    d[1] = -2.0 / r * u + (w + g * hs) * v
    d[2] = dh
    d[3] = -(v * v - u * u) - 2.0 / r * dh
    return d


@njit
def _events(r, y, p, table):
    w, g, v0 = p[0], p[1], p[2]
    v, u = y[0], y[1]
    s = -g * y[2]
    ev = np.empty(3)
    ev[0] = v
    ev[1] = u if (s > w and v > 0) else 1.0
    ev[2] = RUNAWAY_FACTOR * (1 + v0 * v0) - (v * v + u * u)
    return ev


EVENTS = EventSet(_events, EVENT_NAMES)


def origin_state(h_star0: float, v0: float, r0: float = R0_DEFAULT) -> np.ndarray:
    """Series start ``(v, u, h*, h*')`` at ``r0`` for ``u(0) = h*'(0) = 0``."""
    return np.array([v0, (OMEGA0 + h_star0) * v0 * r0 / 3,
                     h_star0 - v0 * v0 * r0 * r0 / 6, -v0 * v0 * r0 / 3])


def _trajectory(h_star0: float, v0: float, r_end: float, output=None) -> Trajectory:
    problem = OdeProblem(_rhs, R0_DEFAULT, r_end, origin_state(h_star0, v0), TOL, TOL,
                         np.array([OMEGA0, 1.0, v0]))
    return integrate(problem, EVENTS, output)


def _classify_v0(h_star0: float, v0: float) -> str:
    traj = _trajectory(h_star0, v0, PILOT_RADIUS)
    return classify(traj, -traj.y_stop[2], OMEGA0)


@dataclass(frozen=True)
class MasslessRawSolution:
    """Shooting solution in the massless frame (``omega0 = 1``, ``g = 1``)."""

    h_star0: float
    v0: float
    grid: RadialGrid
    v: np.ndarray
    u: np.ndarray
    h_star: np.ndarray
    charge: float
    pilot_mu: float

    @property
    def density(self) -> np.ndarray:
        return self.v ** 2 - self.u ** 2


@dataclass(frozen=True)
class RescaledSolution:
    """Solution rescaled to unit spinor mass, in the tilde variables ``x = mu r``."""

    mu: float
    tilde_omega: float
    tilde_v0: float
    grid: RadialGrid
    spinor: SpinorProfile
    scalar: ScalarProfile
    obs: observables.Observables
    raw: MasslessRawSolution

    def to_wave(self) -> SolitaryWave:
        params = PhysParams(n=3, m=1.0, M=0.0, g=1.0, omega=self.tilde_omega)
        return SolitaryWave(params, self.spinor, self.scalar, gauge="unit_coupling",
                            method="shooting",
                            meta={"mu": self.mu, "h_star0": self.raw.h_star0, "v0_raw": self.raw.v0})


def _complete(traj: Trajectory, grid: RadialGrid, h_star0: float, v0: float, mu: float):
    """Profiles on the whole grid; a trajectory that breaks down early gets decaying tails."""
    states = np.empty((grid.node_count, 4))
    states[0] = (v0, 0.0, h_star0, 0.0)
    if traj.reached_end and traj.stop_index == grid.node_count:
        states[traj.offset:] = traj.states
        return states[:, 0], states[:, 1], states[:, 2]
    cut = breakdown_index(traj)
    states[traj.offset:cut + 1] = traj.states[:cut + 1 - traj.offset]
    r = grid.nodes
    kappa = math.sqrt(max(mu * mu - OMEGA0 * OMEGA0, 1e-12))
    tail = np.exp(-kappa * (r[cut:] - r[cut])) * r[cut] / r[cut:]
    v, u, hs = states[:, 0].copy(), states[:, 1].copy(), states[:, 2].copy()
    v[cut:] = v[cut] * tail
    u[cut:] = u[cut] * tail
    # outside the support h* continues as the Coulomb potential of the enclosed charge
    enclosed = radial_integral(np.where(r <= r[cut], v * v - u * u, 0.0), grid, 3)
    hs[cut:] = hs[cut] + enclosed / (4 * math.pi) * (1 / r[cut:] - 1 / r[cut])
    return v, u, hs


def shoot_massless(h_star0: float, dr: float = 0.01, L: float | None = None) -> MasslessRawSolution:
    """Shoot on ``v(0)`` for prescribed ``h*(0)``.

    The localized branch is bracketed and bisected on a long pilot interval.
    The pilot gives an effective-mass estimate from which the output grid is
    chosen: step ``dr / mu`` (so the rescaled step is ``dr``) and, unless
    ``L`` is given, length ``10 / sqrt(w (1 - w)) / mu`` with ``w = 1 / mu``.

    Raises:
        DomainError: ``h_star0 <= -1``.
        NoBracketError, NonConvergenceError: shooting failed.
        DegenerateError: the pilot effective mass is not above 1.
    """
    if not h_star0 > -1:
        raise DomainError(f"need h*(0) > -1, got {h_star0}")
    fn = lambda x: _classify_v0(h_star0, x)  # noqa: E731
    lo, hi, c_lo = scan_bracket(fn)
    v0 = bisect(fn, lo, hi, c_lo, rel_tol=1e-12)
    pilot = _trajectory(h_star0, v0, PILOT_RADIUS)
    radius, hs, dhs = pilot.r_stop, pilot.y_stop[2], pilot.y_stop[3]
    mu_pilot = -hs - radius * dhs
    if not mu_pilot > OMEGA0:
        raise DegenerateError(f"pilot effective mass {mu_pilot} is not above omega0")
    step = dr / mu_pilot
    if L is None:
        w = OMEGA0 / mu_pilot
        L = 10 / math.sqrt(w * (1 - w)) / mu_pilot
    grid = RadialGrid.from_count(math.ceil(L / step - 1e-9) + 1, step)
    traj = _trajectory(h_star0, v0, grid.length, grid)
    v, u, hs = _complete(traj, grid, h_star0, v0, mu_pilot)
    charge = radial_integral(v * v - u * u, grid, 3)
    return MasslessRawSolution(h_star0, v0, grid, v, u, hs, charge, mu_pilot)


def effective_mass(raw: MasslessRawSolution) -> float:
    """``mu = -h*(L) + a / (4 pi L)``: the far-field value of ``-h*`` with the Coulomb tail."""
    L = raw.grid.length
    mu = -raw.h_star[-1] + raw.charge / (4 * math.pi * L)
    if not mu > 0:
        raise DegenerateError(f"effective mass {mu} is not positive")
    return float(mu)


def rescale_to_unit_mass(raw: MasslessRawSolution, mu: float) -> RescaledSolution:
    """Rescale by ``k = 1 / mu`` to unit spinor mass.

    Observables are computed in the massless frame with ``h = h* + mu``
    and mass ``mu`` in ``N``, then mapped: ``Q`` is invariant while ``N``,
    ``V``, ``T``, ``K``, ``E`` and the virial residual scale by ``1 / mu``.
    """
    if not mu > 0:
        raise DegenerateError(f"effective mass {mu} is not positive")
    h = raw.h_star + mu
    o = observables.evaluate(raw.grid, 3, OMEGA0, raw.v, raw.u, h, m_eff=mu, g=1.0, M=0.0,
                             mode="dkg_massless")
    k = 1.0 / mu
    tilde = observables.Observables(
        Q=o.Q, K=k * o.K, N=k * o.N, V=k * o.V, T=k * o.T, W=0.0, E=k * o.E,
        epsilon=k * o.epsilon, epsilon_mode="dkg_massless", relative_epsilon=o.relative_epsilon,
        omega=k * OMEGA0, n=3)
    grid = RadialGrid.from_count(raw.grid.node_count, raw.grid.step * mu)
    amp = k ** 1.5
    spinor = SpinorProfile(grid, amp * raw.v, amp * raw.u)
    scalar = ScalarProfile(grid, k * h, mass=0.0)
    return RescaledSolution(mu, k * OMEGA0, amp * raw.v0, grid, spinor, scalar, tilde, raw)


def massless_virial_residual(sol: RescaledSolution) -> tuple[float, float]:
    """``omega Q - N - V / 2`` in tilde variables and its ratio to ``omega Q``."""
    return sol.obs.epsilon, sol.obs.relative_epsilon


def solve_massless(h_star0: float, dr: float = 0.01) -> RescaledSolution:
    """Shoot, reconstruct the effective mass and rescale."""
    raw = shoot_massless(h_star0, dr)
    return rescale_to_unit_mass(raw, effective_mass(raw))
