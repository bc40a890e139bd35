import math

import numpy as np
import pytest
from numba import njit

from dkgwaves.errors import DomainError
from dkgwaves.grid import RadialGrid
from dkgwaves.ivp import EventSet, OdeProblem, integrate, origin_start
from dkgwaves.profiles import PhysParams


@njit
def _decay(r, y, p, t):
    return -y


@njit
def _rotation(r, y, p, t):
    return np.array([y[1], -y[0]])


@njit
def _descent(r, y, p, t):
    return np.array([-1.0])


@njit
def _crossing(r, y, p, t):
    return np.array([y[0]])


@njit
def _stiff_blowup(r, y, p, t):
    return np.array([y[0] * y[0]])


def test_exponential_decay():
    traj = integrate(OdeProblem(_decay, 0.0, 5.0, np.array([1.0])))
    assert traj.termination == "reached_end"
    assert traj.r_stop == 5.0
    assert abs(traj.y_stop[0] - math.exp(-5)) < 1e-8


def test_harmonic_rotation_returns_to_start():
    traj = integrate(OdeProblem(_rotation, 0.0, 2 * math.pi, np.array([1.0, 0.0])))
    assert np.allclose(traj.y_stop, [1.0, 0.0], atol=1e-7)


def test_event_located_to_tolerance():
    grid = RadialGrid(5.0, 0.05)
    traj = integrate(OdeProblem(_descent, 0.0, 5.0, np.array([1.0])),
                     EventSet(_crossing, ("v_zero",)), grid)
    assert traj.termination == "event_v_zero"
    assert traj.event_name == "v_zero"
    assert abs(traj.r_stop - 1.0) < 1e-10
    assert traj.radii[-1] <= traj.r_stop
    assert traj.stop_index == 21


def test_event_true_at_start_stops_immediately():
    traj = integrate(OdeProblem(_descent, 0.0, 5.0, np.array([-1.0])),
                     EventSet(_crossing, ("v_zero",)))
    assert traj.termination == "event_v_zero"
    assert traj.r_stop == 0.0


def test_finite_time_blowup_is_step_failure():
    traj = integrate(OdeProblem(_stiff_blowup, 0.0, 2.0, np.array([1.0])))
    assert traj.termination == "step_failure"
    assert traj.r_stop < 1.0 + 1e-6


def test_dense_output_matches_direct_stops():
    grid = RadialGrid(5.0, 0.25)
    tol = 1e-8
    traj = integrate(OdeProblem(_rotation, 0.0, 5.0, np.array([1.0, 0.0]), tol, tol),
                     output_grid=grid)
    for r, y in zip(traj.radii[1::4], traj.states[1::4]):
        direct = integrate(OdeProblem(_rotation, 0.0, r, np.array([1.0, 0.0]), tol, tol)).y_stop
        assert np.max(np.abs(y - direct)) < 10 * tol


def test_halving_tolerance_changes_little():
    a = integrate(OdeProblem(_rotation, 0.0, 10.0, np.array([1.0, 0.0]), 1e-8, 1e-8)).y_stop
    b = integrate(OdeProblem(_rotation, 0.0, 10.0, np.array([1.0, 0.0]), 5e-9, 5e-9)).y_stop
    assert np.max(np.abs(a - b)) < 1e-8


def test_deterministic():
    grid = RadialGrid(5.0, 0.01)
    problem = OdeProblem(_rotation, 0.0, 5.0, np.array([1.0, 0.0]))
    a = integrate(problem, output_grid=grid)
    b = integrate(problem, output_grid=grid)
    assert np.array_equal(a.states, b.states)


def test_problem_validation():
    with pytest.raises(DomainError):
        OdeProblem(_decay, 1.0, 0.5, np.array([1.0]))
    with pytest.raises(DomainError):
        OdeProblem(_decay, 0.0, 1.0, np.array([1.0]), abs_tol=0.0)


def test_origin_start_coefficients():
    p = PhysParams(n=3, m=1.0, g=1.0, omega=0.5)
    v, u = origin_start(p, 1.0, 0.0, 1e-6)
    assert v == 1.0
    assert u == pytest.approx(-0.5 / 3 * 1e-6, rel=1e-12)
    assert origin_start(PhysParams(n=3, omega=0.5), 1.0, 0.5)[1] == 0.0
    p1 = PhysParams(n=1, omega=0.5)
    assert origin_start(p1, 2.0, 0.0, 1e-6)[1] == pytest.approx(-0.5 * 2.0 * 1e-6)
    with pytest.raises(DomainError):
        origin_start(p, 1.0, 0.0, 0.0)
