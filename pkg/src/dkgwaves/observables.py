"""Charge, energy and virial functionals of stationary solutions.

All integrals use the radial measure ``nu_n r^(n-1) dr`` of the grid module.
The potential term ``V = -g int h (v^2 - u^2)`` is stored in the same
convention for every mode; for the cubic Dirac equation the field is
``h = v^2 - u^2`` with ``g = 1``, so its usual quartic potential is ``V / 2``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from .grid import RadialGrid, angular_factor, differentiate, radial_integral, simpson_weights
from .profiles import SolitaryWave

MODES = ("nld_cubic", "dkg_massive", "dkg_massless")


@dataclass(frozen=True)
class Observables:
    """Integral quantities of one solution plus its virial residual."""

    Q: float
    K: float
    N: float
    V: float
    T: float
    W: float
    E: float
    epsilon: float
    epsilon_mode: str
    relative_epsilon: float
    omega: float
    n: int

    @property
    def energy_sum(self) -> float:
        """Energy as the sum of its kinetic, mass and interaction parts."""
        if self.epsilon_mode == "nld_cubic":
            return self.K + self.N + 0.5 * self.V
        return self.K + self.N + self.V + self.T + self.W

    def as_dict(self) -> dict:
        return asdict(self)


def _ratio(num: float, den: float) -> float:
    return num / den if den != 0 else 0.0


def virial_residual(obs: Observables, mode: str, n: int) -> tuple[float, float]:
    """Virial residual ``epsilon`` and its relative form for the given mode.

    Massive modes are normalized by ``E``, the massless mode by ``omega Q``.
    """
    w, Q, K, N, V, W = obs.omega, obs.Q, obs.K, obs.N, obs.V, obs.W
    if mode == "nld_cubic":
        eps = w * Q - (n - 2) / n * K - N
        return eps, _ratio(eps, obs.E)
    if mode == "dkg_massive":
        eps = w * Q - (n - 1) / n * K - N - (n + 2) / (2 * n) * V - 2 / n * W
        return eps, _ratio(eps, obs.E)
    if mode == "dkg_massless":
        if n != 3:
            raise ValueError("the massless virial form is only defined in 3D")
        eps = w * Q - N - 0.5 * V
        return eps, _ratio(eps, w * Q)
    raise ValueError(f"unknown virial mode {mode!r}")


def _kinetic(v, u, grid: RadialGrid, n: int) -> float:
    r = grid.nodes
    dv = differentiate(v, grid)
    du = differentiate(u, grid)
    # v (u' + (n-1) u / r) - u v', times r^(n-1); regular at r = 0
    density = r ** (n - 1) * (v * du - u * dv)
    if n > 1:
        density = density + (n - 1) * v * u * r ** (n - 2)
    weights = simpson_weights(grid.node_count, grid.step)
    return float(angular_factor(n) * (weights @ density))


def evaluate(grid: RadialGrid, n: int, omega: float, v, u, h, *, m_eff: float, g: float,
             M: float, mode: str) -> Observables:
    """Observables of profiles ``v, u, h`` sampled on ``grid``.

    ``m_eff`` is the mass entering ``N``: the spinor mass for massive
    solutions and the effective mass for shifted massless ones.
    """
    if mode not in MODES:
        raise ValueError(f"unknown virial mode {mode!r}")
    v = np.asarray(v, dtype=float)
    u = np.asarray(u, dtype=float)
    h = np.asarray(h, dtype=float)
    rho = v * v - u * u
    Q = radial_integral(v * v + u * u, grid, n)
    N = m_eff * radial_integral(rho, grid, n)
    V = -g * radial_integral(h * rho, grid, n)
    K = _kinetic(v, u, grid, n)
    if mode == "nld_cubic":
        T = W = 0.0
    else:
        W = 0.5 * g * M * M * radial_integral(h * h, grid, n)
        T = 0.5 * g * radial_integral(differentiate(h, grid) ** 2, grid, n)
        if M == 0 and n == 3:
            # field energy of the Coulomb tail a / (4 pi r) beyond the grid
            a = radial_integral(rho, grid, n)
            T += g * a * a / (8 * math.pi * grid.length)
    E = omega * Q - 0.5 * V
    obs = Observables(Q=Q, K=K, N=N, V=V, T=T, W=W, E=E, epsilon=0.0, epsilon_mode=mode,
                      relative_epsilon=0.0, omega=omega, n=n)
    eps, rel = virial_residual(obs, mode, n)
    return replace(obs, epsilon=eps, relative_epsilon=rel)


def default_mode(wave: SolitaryWave) -> str:
    if wave.method == "nld":
        return "nld_cubic"
    if wave.method == "shooting":
        return "dkg_massless"
    return "dkg_massive"


def compute(wave: SolitaryWave, mode: str | None = None) -> Observables:
    """Observables of a solitary wave.

    The mass in ``N`` is ``wave.meta["m_eff"]`` when present (shifted
    massless solutions), otherwise the spinor mass.
    """
    p = wave.params
    m_eff = float(wave.meta.get("m_eff", p.m))
    return evaluate(wave.grid, p.n, p.omega, wave.spinor.v, wave.spinor.u, wave.scalar.values,
                    m_eff=m_eff, g=p.g, M=p.M, mode=mode or default_mode(wave))


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    residual: float
    relative: float


def identity_suite(wave: SolitaryWave, obs: Observables | None = None) -> list[IdentityCheck]:
    """Residuals of the exact identities every solution must satisfy.

    Each residual is reported absolutely and relative to ``E``.
    """
    obs = obs or compute(wave)
    n = obs.n
    Q, K, N, V, T, W, E, w = obs.Q, obs.K, obs.N, obs.V, obs.T, obs.W, obs.E, obs.omega
    checks = [("charge_balance", w * Q - K - N - V)]
    if obs.epsilon_mode == "nld_cubic":
        checks += [
            ("potential_kinetic", 0.5 * V + K / n),
            ("energy_no_derivatives", E - N + (n - 1) * 0.5 * V),
        ]
    else:
        checks += [
            ("field_balance", 2 * T + 2 * W + V),
            ("energy_no_derivatives", E - N - (3 - n) / 2 * V - 2 * W),
        ]
    checks.append(("energy_sum", obs.energy_sum - E))
    return [IdentityCheck(name, float(res), _ratio(float(res), abs(E))) for name, res in checks]


def lemma_positivity(obs: Observables) -> bool:
    """In 3D with ``omega >= 0`` every solitary wave has ``K > 0`` and ``E > 0``."""
    if obs.n != 3 or obs.omega < 0:
        return True
    return obs.K > 0 and obs.E > 0
