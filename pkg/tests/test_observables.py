import numpy as np
import pytest
from scipy.interpolate import CubicSpline

from dkgwaves import observables
from dkgwaves.grid import RadialGrid
from dkgwaves.nld import nld_observables


def _zero(n):
    grid = RadialGrid(10.0, 0.01)
    z = np.zeros(grid.node_count)
    return grid, z


@pytest.mark.parametrize("mode", observables.MODES)
def test_zero_profiles_give_zero(mode):
    grid, z = _zero(3)
    obs = observables.evaluate(grid, 3, 0.5, z, z, z, m_eff=1.0, g=1.0, M=0.0, mode=mode)
    for name in ("Q", "K", "N", "V", "T", "W", "E", "epsilon", "relative_epsilon"):
        assert getattr(obs, name) == 0.0
    assert all(c.residual == 0 for c in observables.identity_suite(None, obs))


def test_unknown_mode_rejected():
    grid, z = _zero(3)
    with pytest.raises(ValueError):
        observables.evaluate(grid, 3, 0.5, z, z, z, m_eff=1.0, g=1.0, M=0.0, mode="bogus")


def test_energy_definition_and_signs(iterative_waves):
    for wave in iterative_waves.values():
        obs = observables.compute(wave)
        assert obs.E == pytest.approx(obs.omega * obs.Q - 0.5 * obs.V, rel=1e-15)
        assert obs.T >= 0 and obs.W >= 0


def test_massless_wave_has_no_mass_term(massless_solutions):
    obs = observables.compute(massless_solutions[0.0].to_wave())
    assert obs.W == 0.0
    assert obs.epsilon_mode == "dkg_massless"


def test_identity_suite_on_every_wave(nld_solutions, iterative_waves, massless_solutions):
    waves = ([s.to_wave() for s in nld_solutions.values()] + list(iterative_waves.values())
             + [s.to_wave() for s in massless_solutions.values()])
    for wave in waves:
        for check in observables.identity_suite(wave):
            assert abs(check.relative) < 1e-3, (wave.params, check)


def test_nld_potential_is_minus_kinetic_over_n(nld_solutions):
    for (n, _), sol in nld_solutions.items():
        obs = nld_observables(sol)
        assert 0.5 * obs.V == pytest.approx(-obs.K / n, rel=1e-3)


def test_lemma_positivity_in_3d(nld_solutions, iterative_waves, massless_solutions):
    waves = ([s.to_wave() for (n, _), s in nld_solutions.items() if n == 3]
             + [w for (n, _), w in iterative_waves.items() if n == 3]
             + [s.to_wave() for s in massless_solutions.values()])
    for wave in waves:
        obs = observables.compute(wave)
        assert obs.K > 0 and obs.E > 0
        assert observables.lemma_positivity(obs)


def test_massive_virial_relative_error(iterative_waves):
    assert abs(observables.compute(iterative_waves[(3, 0.5)]).relative_epsilon) < 4e-4
    assert abs(observables.compute(iterative_waves[(3, 0.9)]).relative_epsilon) < 1e-4


def test_virial_residual_modes():
    obs = observables.Observables(Q=2.0, K=1.0, N=1.0, V=-0.5, T=0.1, W=0.2, E=1.25, epsilon=0,
                                  epsilon_mode="dkg_massive", relative_epsilon=0, omega=0.5, n=3)
    eps, rel = observables.virial_residual(obs, "nld_cubic", 3)
    assert eps == pytest.approx(1.0 - 1.0 / 3 - 1.0)
    eps, rel = observables.virial_residual(obs, "dkg_massive", 3)
    assert eps == pytest.approx(1.0 - 2.0 / 3 - 1.0 + 5.0 / 12 - 2.0 / 15)
    assert rel == pytest.approx(eps / 1.25)
    eps, rel = observables.virial_residual(obs, "dkg_massless", 3)
    assert rel == pytest.approx(eps / 1.0)
    with pytest.raises(ValueError):
        observables.virial_residual(obs, "dkg_massless", 1)


@pytest.mark.parametrize("case", [(1, 0.5), (3, 0.5)])
def test_dilation_scaling(nld_solutions, case):
    sol = nld_solutions[case]
    n = case[0]
    lam = 2.0
    grid = sol.grid
    big = RadialGrid.from_count(2 * grid.node_count - 1, grid.step)
    v = CubicSpline(grid.nodes, sol.spinor.v)(big.nodes / lam)
    u = CubicSpline(grid.nodes, sol.spinor.u)(big.nodes / lam)
    rho = v * v - u * u
    base = nld_observables(sol)
    scaled = observables.evaluate(big, n, 0.5, v, u, rho, m_eff=1.0, g=1.0, M=0.0, mode="nld_cubic")
    assert scaled.Q == pytest.approx(lam ** n * base.Q, rel=1e-2)
    assert scaled.N == pytest.approx(lam ** n * base.N, rel=1e-2)
    assert scaled.V == pytest.approx(lam ** n * base.V, rel=1e-2)
    assert scaled.K == pytest.approx(lam ** (n - 1) * base.K, rel=1e-2)
